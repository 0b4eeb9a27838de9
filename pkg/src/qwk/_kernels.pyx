# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse combinatorial kernels; see ``_kernels_py`` for the reference.

When every coefficient is rational and ``gmpy2`` is importable, the pair loops
run on ``mpq`` values and convert back to ``Fraction`` once per output term.
"""
from fractions import Fraction

try:
    from gmpy2 import mpq
except ImportError:
    mpq = None

cdef dict _fast_tables = {}
# below this many term pairs the conversions cost more than they save
cdef Py_ssize_t FAST_MIN_PAIRS = 64


cdef inline bint _all_rational(dict d):
    for v in d.values():
        if type(v) is not Fraction and type(v) is not int:
            return False
    return True


cdef object _to_fraction(object v):
    cdef object n = int(v.numerator)
    cdef object d = int(v.denominator)
    if d == 1:
        return Fraction(n)
    try:
        return Fraction(n, d, _normalize=False)
    except TypeError:
        return Fraction(n, d)


cdef dict _back(dict acc):
    return {k: _to_fraction(v) for k, v in acc.items() if v}


cdef dict _fast_entries(dict table):
    cdef tuple hit = _fast_tables.get(id(table))
    if hit is None or hit[0] is not table:
        hit = (table, {})
        _fast_tables[id(table)] = hit
    return hit[1]


cdef inline int _popcount(unsigned long long v):
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


cdef inline int _reorder_sign(unsigned long long a, unsigned long long b):
    cdef int swaps = 0
    a >>= 1
    while a:
        swaps += _popcount(a & b)
        a >>= 1
    return -1 if swaps & 1 else 1


def reorder_sign(a, b):
    return _reorder_sign(a, b)


def ext_product(dict x, dict y):
    cdef dict acc = {}
    cdef unsigned long long m1, m2, k
    cdef bint fast = mpq is not None and len(x) * len(y) >= FAST_MIN_PAIRS and _all_rational(x) and _all_rational(y)
    if fast:
        x = {k1: mpq(c) for k1, c in x.items()}
        y = {k2: mpq(c) for k2, c in y.items()}
    for k1, c1 in x.items():
        m1 = k1
        for k2, c2 in y.items():
            m2 = k2
            if m1 & m2:
                continue
            k = m1 | m2
            c = c1 * c2
            if _reorder_sign(m1, m2) < 0:
                c = -c
            key = k
            old = acc.get(key)
            acc[key] = c if old is None else old + c
    if fast:
        return _back(acc)
    return {key: v for key, v in acc.items() if v}


def sparse_bilinear(dict x, dict y, dict table, fill):
    if mpq is not None and len(x) * len(y) >= FAST_MIN_PAIRS and _all_rational(x) and _all_rational(y):
        return _sparse_bilinear_mpq(x, y, table, fill)
    cdef dict acc = {}
    cdef tuple entry
    for k1, c1 in x.items():
        for k2, c2 in y.items():
            pair = (k1, k2)
            entry = table.get(pair)
            if entry is None:
                entry = fill(k1, k2)
                table[pair] = entry
            if not entry:
                continue
            c = c1 * c2
            for k, t in entry:
                v = c * t
                old = acc.get(k)
                acc[k] = v if old is None else old + v
    return {k: v for k, v in acc.items() if v}


cdef dict _sparse_bilinear_mpq(dict x, dict y, dict table, fill):
    cdef dict acc = {}
    cdef dict fast = _fast_entries(table)
    cdef tuple entry
    cdef list ys = [(k2, mpq(c2)) for k2, c2 in y.items()]
    for k1, c1 in x.items():
        c1 = mpq(c1)
        for k2, c2 in ys:
            pair = (k1, k2)
            entry = fast.get(pair)
            if entry is None:
                raw = table.get(pair)
                if raw is None:
                    raw = fill(k1, k2)
                    table[pair] = raw
                entry = tuple((k, mpq(t)) for k, t in raw)
                fast[pair] = entry
            if not entry:
                continue
            c = c1 * c2
            for k, t in entry:
                v = c * t
                old = acc.get(k)
                acc[k] = v if old is None else old + v
    return _back(acc)


def accumulate(dict acc, items, scale):
    for k, t in items:
        v = scale * t
        old = acc.get(k)
        acc[k] = v if old is None else old + v
    return acc
