"""Finite-dimensional g-differential algebras given by explicit matrices.

Operators act on column vectors: ``M[i][j]`` is the coefficient of basis
vector ``i`` in the image of basis vector ``j``.  ``d`` and ``iota_b`` are odd,
``L_b`` is even.  Only the module structure is needed here (no product on
``A``), which is enough for the Cartan relations, the basic subcomplex of
``A`` and of ``Wg (x) A``, and the chain-map property of ``Q (x) 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import MalformedInputError
from .exact_core import as_rational, mat_mul, nullspace, rref
from .grassmann_clifford import bits, popcount
from .lie import LieAlgebraModel
from .results import CheckResult
from .weil import all_kinds, basis_keys, operator_parity, quantization, quantum_weil, weil_algebra, z_degree


def _square(M, size, label):
    try:
        out = [[as_rational(x) for x in row] for row in M]
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"{label}: {exc}") from exc
    if len(out) != size or any(len(r) != size for r in out):
        raise MalformedInputError(f"{label}: expected a {size}x{size} matrix")
    return out


def _rank(M) -> int:
    return len(rref(M)[1]) if M and M[0] else 0


@dataclass
class FiniteGDA:
    size: int
    d: list
    iota: list
    lie: list
    degrees: list | None = None
    name: str = "A"
    _dim_g: int = field(init=False, default=0)

    def __post_init__(self):
        n = self.size
        self.d = _square(self.d, n, "d")
        if len(self.iota) != len(self.lie):
            raise MalformedInputError("iota and L need one matrix per basis direction")
        self.iota = [_square(M, n, f"iota[{b}]") for b, M in enumerate(self.iota)]
        self.lie = [_square(M, n, f"L[{b}]") for b, M in enumerate(self.lie)]
        self._dim_g = len(self.iota)
        if self.degrees is not None:
            if len(self.degrees) != n or not all(isinstance(x, int) for x in self.degrees):
                raise MalformedInputError("degrees: expected one integer per basis vector")

    def op(self, kind: tuple):
        if kind[0] == "d":
            return self.d
        return (self.iota if kind[0] == "iota" else self.lie)[kind[1]]

    def apply(self, kind: tuple, vec: dict) -> dict:
        """Apply an operator to a sparse vector ``{index: coeff}``."""
        M = self.op(kind)
        out: dict = {}
        for j, c in vec.items():
            for i in range(self.size):
                if M[i][j]:
                    out[i] = out.get(i, 0) + M[i][j] * c
        return {k: v for k, v in out.items() if v}


def trivial_gda(L: LieAlgebraModel) -> FiniteGDA:
    """The ground field with all operators zero."""
    z = [[0]]
    return FiniteGDA(1, z, [z] * L.dim, [z] * L.dim, [0], name="trivial")


def exterior_gda(L: LieAlgebraModel) -> FiniteGDA:
    """``/\\g`` (identified with ``/\\g*`` through ``B``) with the Chevalley-Eilenberg differential.

    This is the algebra of left-invariant forms on a group, on which ``g`` acts freely.
    """
    from .dynamical_forms import ce_on_mask

    sp = L.space
    n = L.dim
    masks = sorted(range(1 << n), key=lambda m: (popcount(m), m))
    index = {m: i for i, m in enumerate(masks)}
    N = len(masks)

    def matrix(fn):
        M = [[Fraction(0)] * N for _ in range(N)]
        for j, m in enumerate(masks):
            for t, v in fn(m).items():
                M[index[t]][j] += v
        return M

    def lie(b):
        def fn(m):
            out: dict = {}
            idx = bits(m)
            for pos, a in enumerate(idx):
                rest = m ^ (1 << a)
                for k, v in enumerate(L.c[b][a]):
                    if not v or rest & (1 << k):
                        continue
                    before = sum(1 << i for i in idx[:pos])
                    after = rest ^ before
                    s = _sign_insert(before, k, after)
                    t = rest | (1 << k)
                    out[t] = out.get(t, 0) + s * v
            return out
        return matrix(fn)

    return FiniteGDA(
        N,
        matrix(lambda m: ce_on_mask(L, m)),
        [matrix(lambda m, b=b: sp.vector_contract(b, m)) for b in range(n)],
        [lie(b) for b in range(n)],
        [popcount(m) for m in masks],
        name="exterior",
    )


def _sign_insert(before: int, k: int, after: int) -> int:
    """Sign of moving ``e_k`` placed between ``before`` and ``after`` into ascending order."""
    from .kernels import reorder_sign

    return reorder_sign(before, 1 << k) * reorder_sign(before | (1 << k), after) * reorder_sign(before, after)


def gda_cartan_check(L: LieAlgebraModel, A: FiniteGDA) -> CheckResult:
    """The six Cartan relations as exact matrix identities."""
    n = L.dim
    if A._dim_g != n:
        return CheckResult.fail({"reason": f"expected {n} iota/L matrices, got {A._dim_g}"})
    N = A.size

    def comm(X, px, Y, py):
        XY, YX = mat_mul(X, Y), mat_mul(Y, X)
        s = 1 if (px and py) else -1
        return [[XY[i][j] + s * YX[i][j] for j in range(N)] for i in range(N)]

    def combo(mats, coeffs):
        out = [[Fraction(0)] * N for _ in range(N)]
        for M, c in zip(mats, coeffs):
            if c:
                for i in range(N):
                    for j in range(N):
                        out[i][j] += c * M[i][j]
        return out

    zero = [[Fraction(0)] * N for _ in range(N)]
    checks = [("[d,d]=0", comm(A.d, 1, A.d, 1), zero)]
    for a in range(n):
        checks.append((f"[d,iota_{a}]=L_{a}", comm(A.d, 1, A.iota[a], 1), A.lie[a]))
        checks.append((f"[d,L_{a}]=0", comm(A.d, 1, A.lie[a], 0), zero))
        for b in range(n):
            checks.append((f"[iota_{a},iota_{b}]=0", comm(A.iota[a], 1, A.iota[b], 1), zero))
            checks.append((f"[L_{a},iota_{b}]=iota_[{a},{b}]", comm(A.lie[a], 0, A.iota[b], 1), combo(A.iota, L.c[a][b])))
            checks.append((f"[L_{a},L_{b}]=L_[{a},{b}]", comm(A.lie[a], 0, A.lie[b], 0), combo(A.lie, L.c[a][b])))
    for label, lhs, rhs in checks:
        if lhs != rhs:
            return CheckResult.fail({"relation": label})
    return CheckResult.ok(relations=len(checks))


def basic_subspace(A: FiniteGDA) -> list[list[Fraction]]:
    """Joint kernel of all ``iota_b`` and ``L_b`` on ``A``."""
    rows = [row for M in A.iota + A.lie for row in M]
    return nullspace(rows, A.size)


def basic_cohomology(A: FiniteGDA) -> dict:
    """Dimensions of basic cohomology, per degree when degrees are given."""
    B = basic_subspace(A)
    if A.degrees is None:
        images = [[sum(A.d[i][j] * v[j] for j in range(A.size)) for i in range(A.size)] for v in B]
        r = _rank(images)
        return {"total": len(B) - 2 * r}
    out = {}
    for k in sorted(set(A.degrees)):
        out[k] = _graded_dims(A, B, k)
    return out


def _graded_dims(A, B, k):
    def part(deg):
        return [v for v in B if any(v[i] for i in range(A.size)) and all(A.degrees[i] == deg for i in range(A.size) if v[i])]

    def d_rank(vs):
        imgs = [[sum(A.d[i][j] * v[j] for j in range(A.size)) for i in range(A.size)] for v in vs]
        return _rank(imgs)

    Bk = part(k)
    return len(Bk) - d_rank(Bk) - d_rank(part(k - 1))


# ---------------------------------------------------------------------------
# Wg (x) A and Ug (x) Cl(g) (x) A
# ---------------------------------------------------------------------------


def _tensor_keys(L, A: FiniteGDA, degree: int):
    if A.degrees is None:
        raise MalformedInputError("finite_gda needs 'degrees' for tensor-product computations")
    out = []
    for i, da in enumerate(A.degrees):
        dw = degree - da
        if dw < 0:
            continue
        for key in basis_keys(L.dim, dw, dw):
            out.append((key, i))
    return out


def tensor_derive(alg, A: FiniteGDA, kind: tuple, x: dict) -> dict:
    """Apply ``D (x) 1 + (-1)^{|D||w|} 1 (x) D`` to ``{i: elem}`` (``elem`` in ``alg``)."""
    odd = operator_parity(kind)
    out: dict = {}

    def add(i, e):
        if e:
            out[i] = out[i] + e if i in out else e

    for i, w in x.items():
        add(i, alg.derive(kind, w))
        img = A.apply(kind, {i: Fraction(1)})
        if not img:
            continue
        even, oddp = w.parity_parts()
        signed = alg.elem(even) - alg.elem(oddp) if odd else w
        for t, c in img.items():
            add(t, signed.scale(c))
    return {k: v for k, v in out.items() if v}


def _flatten(x: dict) -> dict:
    return {(k, i): c for i, w in x.items() for k, c in w.terms.items()}


def tensor_basic_subspace(L: LieAlgebraModel, A: FiniteGDA, degree: int) -> tuple[list, list]:
    """Basis of the basic elements of total degree ``degree`` in ``Wg (x) A``."""
    W = weil_algebra(L)
    keys = _tensor_keys(L, A, degree)
    images_by_op = []
    for kind in [("iota", b) for b in range(L.dim)] + [("L", b) for b in range(L.dim)]:
        images_by_op.append([_flatten(tensor_derive(W, A, kind, {i: W.basis(k)})) for k, i in keys])
    rows = []
    for images in images_by_op:
        targets = sorted({t for img in images for t in img}, key=repr)
        tindex = {t: r for r, t in enumerate(targets)}
        block = [[Fraction(0)] * len(keys) for _ in targets]
        for j, img in enumerate(images):
            for t, v in img.items():
                block[tindex[t]][j] = v
        rows.extend(block)
    return keys, nullspace(rows, len(keys))


def _vec_to_tensor(W, keys, vec) -> dict:
    out: dict = {}
    for (k, i), c in zip(keys, vec):
        if c:
            out.setdefault(i, {})[k] = c
    return {i: W.elem(t) for i, t in out.items()}


def tensor_basic_cohomology(L: LieAlgebraModel, A: FiniteGDA, max_degree: int) -> dict[int, int]:
    """``dim H^k`` of the basic subcomplex of ``Wg (x) A`` for ``k < max_degree``."""
    W = weil_algebra(L)
    spaces = {k: tensor_basic_subspace(L, A, k) for k in range(max_degree + 1)}

    def d_rank(k):
        keys, B = spaces[k]
        if not B:
            return 0
        imgs = [_flatten(tensor_derive(W, A, ("d",), _vec_to_tensor(W, keys, v))) for v in B]
        targets = sorted({t for img in imgs for t in img}, key=repr)
        return _rank([[img.get(t, 0) for t in targets] for img in imgs]) if targets else 0

    ranks = {k: d_rank(k) for k in range(max_degree)}
    return {k: len(spaces[k][1]) - ranks[k] - (ranks[k - 1] if k else 0) for k in range(max_degree)}


def tensor_chain_map_check(L: LieAlgebraModel, A: FiniteGDA, max_degree: int) -> CheckResult:
    """``Q (x) 1`` intertwines ``d``, ``iota_b``, ``L_b`` and sends basic elements to basic ones."""
    W, QW = weil_algebra(L), quantum_weil(L)
    Q = quantization(L)

    def q1(x):
        return {i: Q(w) for i, w in x.items() if Q(w)}

    count = 0
    for deg in range(max_degree + 1):
        for k, i in _tensor_keys(L, A, deg):
            x = {i: W.basis(k)}
            qx = q1(x)
            for kind in all_kinds(L.dim):
                count += 1
                if q1(tensor_derive(W, A, kind, x)) != tensor_derive(QW, A, kind, qx):
                    return CheckResult.fail({"element": [repr(W.basis(k)), i], "operator": list(kind)}, comparisons=count)
        keys, B = tensor_basic_subspace(L, A, deg)
        for v in B:
            qv = q1(_vec_to_tensor(W, keys, v))
            for kind in all_kinds(L.dim)[1:]:
                if tensor_derive(QW, A, kind, qv):
                    return CheckResult.fail({"basic_degree": deg, "operator": list(kind)})
    return CheckResult.ok(comparisons=count, max_degree=max_degree)


def parse_finite_gda(block: dict, L: LieAlgebraModel) -> FiniteGDA:
    """Build a :class:`FiniteGDA` from its JSON block (rationals as strings)."""
    if not isinstance(block, dict):
        raise MalformedInputError("finite_gda: expected an object")
    try:
        size = block["size"]
        d = block["d"]
        iota = block["iota"]
        lie = block["L"]
    except KeyError as exc:
        raise MalformedInputError(f"finite_gda: missing field {exc}") from None
    if not isinstance(size, int) or size < 1:
        raise MalformedInputError("finite_gda.size: expected a positive integer")
    if len(iota) != L.dim or len(lie) != L.dim:
        raise MalformedInputError(f"finite_gda: need {L.dim} iota and L matrices")
    return FiniteGDA(size, d, iota, lie, block.get("degrees"), name=block.get("name", "A"))


def serialize_finite_gda(A: FiniteGDA) -> dict:
    def mat(M):
        return [[str(x) for x in row] for row in M]

    out = {"name": A.name, "size": A.size, "d": mat(A.d), "iota": [mat(M) for M in A.iota], "L": [mat(M) for M in A.lie]}
    if A.degrees is not None:
        out["degrees"] = list(A.degrees)
    return out


def matrix_from_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[as_rational(x) for x in r] for r in rows]
