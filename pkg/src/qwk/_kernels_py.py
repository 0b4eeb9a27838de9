"""Pure-Python implementation of the sparse combinatorial kernels.

This module is the reference for ``_kernels.pyx``; both expose the same
functions with identical semantics.  Keys of sparse elements are arbitrary
hashables; bitmask arguments are non-negative ints where bit ``a`` stands for
basis vector ``e_a``.
"""


def reorder_sign(a, b):
    """Sign of the permutation sorting the ascending index sets ``a`` then ``b``.

    Counts pairs ``(i, j)`` with ``i`` in ``a``, ``j`` in ``b`` and ``i > j``.
    """
    swaps = 0
    a >>= 1
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def ext_product(x, y):
    """Wedge product of two exterior elements stored as ``{mask: coeff}``."""
    acc = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            if m1 & m2:
                continue
            k = m1 | m2
            c = c1 * c2
            if reorder_sign(m1, m2) < 0:
                c = -c
            if k in acc:
                acc[k] = acc[k] + c
            else:
                acc[k] = c
    return {k: v for k, v in acc.items() if v}


def sparse_bilinear(x, y, table, fill):
    """Bilinear product driven by a lazily filled structure table.

    ``table[(k1, k2)]`` is a tuple of ``(key, coeff)`` pairs giving the product
    of basis elements ``k1`` and ``k2``; missing entries are computed by
    ``fill(k1, k2)`` and cached in ``table``.
    """
    acc = {}
    for k1, c1 in x.items():
        for k2, c2 in y.items():
            entry = table.get((k1, k2))
            if entry is None:
                entry = fill(k1, k2)
                table[(k1, k2)] = entry
            if not entry:
                continue
            c = c1 * c2
            for k, t in entry:
                v = c * t
                if k in acc:
                    acc[k] = acc[k] + v
                else:
                    acc[k] = v
    return {k: v for k, v in acc.items() if v}


def accumulate(acc, items, scale):
    """``acc += scale * items`` in place, for sparse dicts; returns ``acc``."""
    for k, t in items:
        v = scale * t
        if k in acc:
            acc[k] = acc[k] + v
        else:
            acc[k] = v
    return acc
