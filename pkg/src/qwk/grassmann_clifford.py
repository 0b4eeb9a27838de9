"""Exterior and Clifford algebras of a quadratic vector space.

Basis monomials are bitmasks: bit ``a`` set means ``e_a`` occurs, and a mask
stands for the ordered monomial ``e_{a1} ... e_{ak}`` with ``a1 < ... < ak``
(wedge product in the exterior algebra, Clifford product in ``Cl(V)``).

The Clifford relation is ``v v' + v' v = B(v, v')``, so ``v v = B(v, v)/2``.
Contraction satisfies ``iota(v) w = B(v, w)`` for vectors and is extended to
all of ``/\\V`` by ``iota(x ^ y) = iota(x) o iota(y)`` (:data:`LEFT`).  The
opposite order (:data:`RIGHT`) is kept available for negative controls.

Coefficients may be ``Fraction`` or :class:`~qwk.exact_core.MultiPoly`; the
containers only need ``+``, ``*``, negation and truthiness from them.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CapExceededError, MalformedInputError, RingMismatchError, SkewnessError
from .exact_core import (
    MultiPoly,
    PolyMatrix,
    as_rational,
    det_sqrt_j,
    mat_inverse,
    mat_mul,
    matrix_apply_series,
    series_of,
    series_order_needed,
)
from .kernels import accumulate, ext_product, reorder_sign, sparse_bilinear
from .results import CheckResult

LEFT = "left"
RIGHT = "right"


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _prune(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


class QuadraticSpace:
    """A vector space with a non-degenerate symmetric form ``B`` in a fixed basis.

    Instances are interned by their Gram matrix, so every element built over
    the same form shares the multiplication, quantization and contraction
    caches.
    """

    def __init__(self, gram: tuple[tuple[Fraction, ...], ...]):
        self.gram = gram
        self.n = len(gram)
        self.inv_gram = tuple(tuple(r) for r in mat_inverse(gram)) if self.n else ()
        self.diagonal = all(gram[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)
        self.top = (1 << self.n) - 1
        self._gen_left: dict[tuple[int, int], dict[int, Fraction]] = {}
        self.cl_table: dict = {}
        self._q: dict[int, dict[int, Fraction]] = {}
        self._symbol: dict[int, dict[int, Fraction]] = {}
        self.contract_tables: dict[str, dict] = {LEFT: {}, RIGHT: {}}

    @staticmethod
    def of(gram: Sequence[Sequence]) -> "QuadraticSpace":
        g = tuple(tuple(as_rational(x) for x in row) for row in gram)
        if any(len(r) != len(g) for r in g):
            raise MalformedInputError("bilinear form must be square")
        return _interned_space(g)

    def __repr__(self):
        return f"QuadraticSpace(n={self.n})"

    # -- Clifford multiplication ------------------------------------------
    def gen_left(self, c: int, m: int) -> dict[int, Fraction]:
        """``e_c * e_m`` reduced to ordered monomials."""
        key = (c, m)
        hit = self._gen_left.get(key)
        if hit is not None:
            return hit
        if m == 0:
            out = {1 << c: Fraction(1)}
        else:
            a = (m & -m).bit_length() - 1
            rest = m ^ (1 << a)
            if c < a:
                out = {m | (1 << c): Fraction(1)}
            elif c == a:
                out = {rest: self.gram[c][c] / 2}
            else:
                # e_c e_a = B(e_c, e_a) - e_a e_c, and e_c * rest only involves indices > a
                out = {}
                if self.gram[c][a]:
                    out[rest] = self.gram[c][a]
                for mask, coef in self.gen_left(c, rest).items():
                    k = mask | (1 << a)
                    out[k] = out.get(k, 0) - coef
                out = _prune(out)
        self._gen_left[key] = out
        return out

    def cl_mono_mul(self, m1: int, m2: int) -> tuple:
        """Clifford product of two ordered monomials as ``((mask, coeff), ...)``."""
        if self.diagonal:
            k = m1 ^ m2
            c = Fraction(reorder_sign(m1, m2))
            for a in bits(m1 & m2):
                c *= self.gram[a][a] / 2
            return ((k, c),) if c else ()
        cur = {m2: Fraction(1)}
        for a in reversed(bits(m1)):
            nxt: dict = {}
            for mask, coef in cur.items():
                accumulate(nxt, self.gen_left(a, mask).items(), coef)
            cur = _prune(nxt)
        return tuple(cur.items())

    # -- quantization and symbol --------------------------------------------
    def vector_contract(self, a: int, m: int) -> dict[int, Fraction]:
        """``iota(e_a)`` applied to the exterior monomial ``m``."""
        out = {}
        for pos, b in enumerate(bits(m)):
            g = self.gram[a][b]
            if g:
                out[m ^ (1 << b)] = -g if pos % 2 else g
        return out

    def q_mono(self, m: int) -> dict[int, Fraction]:
        """Quantization of an exterior monomial, via ``q(v^w) = v q(w) - q(iota(v) w)/2``."""
        hit = self._q.get(m)
        if hit is not None:
            return hit
        if m == 0:
            out = {0: Fraction(1)}
        else:
            a = (m & -m).bit_length() - 1
            rest = m ^ (1 << a)
            out = {}
            for mask, coef in self.q_mono(rest).items():
                accumulate(out, self.gen_left(a, mask).items(), coef)
            for mask, coef in self.vector_contract(a, rest).items():
                accumulate(out, self.q_mono(mask).items(), -coef / 2)
            out = _prune(out)
        self._q[m] = out
        return out

    def symbol_mono(self, m: int) -> dict[int, Fraction]:
        """Inverse of quantization on an ordered Clifford monomial.

        Uses ``sigma(v y) = v ^ sigma(y) + iota(v) sigma(y) / 2``.
        """
        hit = self._symbol.get(m)
        if hit is not None:
            return hit
        if m == 0:
            out = {0: Fraction(1)}
        else:
            a = (m & -m).bit_length() - 1
            rest = m ^ (1 << a)
            out = {}
            for mask, coef in self.symbol_mono(rest).items():
                if not mask & (1 << a):
                    k = mask | (1 << a)
                    sgn = reorder_sign(1 << a, mask)
                    out[k] = out.get(k, 0) + sgn * coef
                accumulate(out, self.vector_contract(a, mask).items(), coef / 2)
            out = _prune(out)
        self._symbol[m] = out
        return out

    # -- contraction ----------------------------------------------------------
    def contract_mono(self, m1: int, m2: int, convention: str = LEFT) -> tuple:
        """``iota(e_{m1})`` applied to ``e_{m2}`` under the given composition order."""
        order = bits(m1)
        if convention == LEFT:
            order = order[::-1]  # innermost operator acts first
        elif convention != RIGHT:
            raise ValueError(f"unknown contraction convention {convention!r}")
        cur = {m2: Fraction(1)}
        for a in order:
            nxt: dict = {}
            for mask, coef in cur.items():
                accumulate(nxt, self.vector_contract(a, mask).items(), coef)
            cur = _prune(nxt)
            if not cur:
                break
        return tuple(cur.items())


@lru_cache(maxsize=None)
def _interned_space(gram):
    return QuadraticSpace(gram)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


class _GradedElem:
    """Shared container logic for exterior and Clifford elements."""

    __slots__ = ("space", "terms")
    kind = "?"

    def __init__(self, space: QuadraticSpace, terms: Mapping[int, object] | None = None):
        self.space = space
        self.terms: dict = _prune(dict(terms)) if terms else {}

    @classmethod
    def _raw(cls, space, terms):
        e = cls.__new__(cls)
        e.space = space
        e.terms = terms
        return e

    @classmethod
    def scalar(cls, space: QuadraticSpace, c=1):
        return cls(space, {0: c})

    @classmethod
    def basis(cls, space: QuadraticSpace, mask: int, c=1):
        if mask >> space.n:
            raise MalformedInputError(f"mask {mask:b} exceeds dimension {space.n}")
        return cls(space, {mask: c})

    @classmethod
    def generator(cls, space: QuadraticSpace, a: int, c=1):
        return cls.basis(space, 1 << a, c)

    @classmethod
    def vector(cls, space: QuadraticSpace, coeffs: Sequence):
        return cls(space, {1 << a: c for a, c in enumerate(coeffs) if c})

    def _check(self, other):
        if not isinstance(other, type(self)):
            raise RingMismatchError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.space is not self.space:
            raise RingMismatchError("elements belong to different quadratic spaces")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: Fraction(other)} if other else {})
        if not isinstance(other, _GradedElem) or other.kind != self.kind:
            return NotImplemented
        return self.space is other.space and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return f"{type(self).__name__}(0)"
        sep = "^" if self.kind == "ext" else "."
        parts = []
        for m in sorted(self.terms, key=lambda k: (popcount(k), k)):
            mono = sep.join(f"e{a}" for a in bits(m)) or "1"
            parts.append(f"({self.terms[m]!r})*{mono}")
        return f"{type(self).__name__}(" + " + ".join(parts) + ")"

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        accumulate(out, other.terms.items(), 1)
        return self._raw(self.space, _prune(out))

    def __neg__(self):
        return self._raw(self.space, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return self._raw(self.space, {})
        return self._raw(self.space, _prune({k: v * c for k, v in self.terms.items()}))

    def map_coeffs(self, fn: Callable):
        return self._raw(self.space, _prune({k: fn(v) for k, v in self.terms.items()}))

    def grade(self, k: int):
        return self._raw(self.space, {m: v for m, v in self.terms.items() if popcount(m) == k})

    def degrees(self) -> set[int]:
        return {popcount(m) for m in self.terms}

    def parity(self) -> int:
        """Z2-degree of a homogeneous element (raises on mixed parity)."""
        ps = {popcount(m) % 2 for m in self.terms}
        if len(ps) > 1:
            raise ValueError("element has mixed parity")
        return ps.pop() if ps else 0

    def coefficient(self, mask: int):
        return self.terms.get(mask, 0)


class ExtElem(_GradedElem):
    """Element of the exterior algebra ``/\\V``."""

    __slots__ = ()
    kind = "ext"

    def __mul__(self, other):
        if isinstance(other, ExtElem):
            return ext_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        acc = ExtElem.scalar(self.space)
        for _ in range(k):
            acc = ext_mul(acc, self)
        return acc


class ClElem(_GradedElem):
    """Element of the Clifford algebra ``Cl(V)`` in the ordered-monomial basis."""

    __slots__ = ()
    kind = "cl"

    def __mul__(self, other):
        if isinstance(other, ClElem):
            return cl_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        acc = ClElem.scalar(self.space)
        for _ in range(k):
            acc = cl_mul(acc, self)
        return acc


def ext_mul(x: ExtElem, y: ExtElem) -> ExtElem:
    """Wedge product."""
    x._check(y)
    return ExtElem._raw(x.space, ext_product(x.terms, y.terms))


def cl_mul(x: ClElem, y: ClElem) -> ClElem:
    """Clifford product."""
    x._check(y)
    sp = x.space
    return ClElem._raw(sp, sparse_bilinear(x.terms, y.terms, sp.cl_table, sp.cl_mono_mul))


def graded_commutator(x, y, mul=None):
    """``[x, y] = xy - (-1)^{|x||y|} yx`` for homogeneous ``x`` and ``y``."""
    mul = mul or (lambda a, b: a * b)
    sign = -1 if (x.parity() and y.parity()) else 1
    xy = mul(x, y)
    yx = mul(y, x)
    return xy - yx if sign == 1 else xy + yx


def quantize(x: ExtElem) -> ClElem:
    """The quantization map ``q``: total antisymmetrization, reduced in ``Cl(V)``."""
    sp = x.space
    out: dict = {}
    for m, c in x.terms.items():
        accumulate(out, sp.q_mono(m).items(), c)
    return ClElem._raw(sp, _prune(out))


def symbol(y: ClElem) -> ExtElem:
    """The inverse of :func:`quantize`."""
    sp = y.space
    out: dict = {}
    for m, c in y.terms.items():
        accumulate(out, sp.symbol_mono(m).items(), c)
    return ExtElem._raw(sp, _prune(out))


def contract(x: ExtElem, convention: str = LEFT) -> Callable[[ExtElem], ExtElem]:
    """The contraction operator ``iota(x)`` on ``/\\V``."""
    sp = x.space
    table = sp.contract_tables.setdefault(convention, {})

    def fill(m1, m2):
        return sp.contract_mono(m1, m2, convention)

    def op(y: ExtElem) -> ExtElem:
        x._check(y)
        return ExtElem._raw(sp, sparse_bilinear(x.terms, y.terms, table, fill))

    return op


def contract_apply(x: ExtElem, y: ExtElem, convention: str = LEFT) -> ExtElem:
    return contract(x, convention)(y)


def berezin(x: _GradedElem):
    """Coefficient of the top monomial ``e_1 ^ ... ^ e_n``."""
    return x.terms.get(x.space.top, 0)


# ---------------------------------------------------------------------------
# Quadratic elements and the S-function
# ---------------------------------------------------------------------------


def _is_polymatrix(A) -> bool:
    return isinstance(A, PolyMatrix)


def raised_components(space: QuadraticSpace, A) -> list[list]:
    """Coefficients ``M`` with ``(1/2) A_ab e^a e^b = (1/2) M_cd e_c e_d``.

    ``A`` is an endomorphism (matrix acting on coordinates); the lowered
    components are ``A_ab = B(e_a, A e_b)`` and ``M = A B^{-1}``.
    """
    n = space.n
    rows = A.entries if _is_polymatrix(A) else A
    return [
        [sum((rows[c][k] * space.inv_gram[k][d] for k in range(n) if space.inv_gram[k][d]), 0) for d in range(n)]
        for c in range(n)
    ]


def check_skew(space: QuadraticSpace, A) -> None:
    """Raise :class:`SkewnessError` unless ``B A`` is antisymmetric."""
    n = space.n
    rows = A.entries if _is_polymatrix(A) else A
    if len(rows) != n:
        raise MalformedInputError("matrix size does not match the quadratic space")
    low = [[sum((space.gram[a][k] * rows[k][b] for k in range(n) if space.gram[a][k]), 0) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(a, n):
            s = low[a][b] + low[b][a]
            if s:
                raise SkewnessError(f"B*A is not antisymmetric at ({a}, {b})")


def ext_quadratic(space: QuadraticSpace, A) -> ExtElem:
    """``(1/2) A_ab e^a ^ e^b`` for a B-skew endomorphism ``A``."""
    M = raised_components(space, A)
    n = space.n
    terms = {}
    for c in range(n):
        for d in range(c + 1, n):
            v = (M[c][d] - M[d][c]) * Fraction(1, 2)
            if v:
                terms[(1 << c) | (1 << d)] = v
    return ExtElem(space, terms)


def cl_quadratic(space: QuadraticSpace, A) -> ClElem:
    """``(1/2) A_ab e^a e^b`` computed by direct Clifford multiplication."""
    M = raised_components(space, A)
    n = space.n
    acc = ClElem(space)
    for c in range(n):
        for d in range(n):
            if M[c][d]:
                prod = cl_mul(ClElem.generator(space, c), ClElem.generator(space, d))
                acc = acc + prod.scale(M[c][d] * Fraction(1, 2))
    return acc


def ext_exp(x: ExtElem) -> ExtElem:
    """Exponential of an even nilpotent exterior element (terminates at ``n/2``)."""
    sp = x.space
    acc = ExtElem.scalar(sp)
    power = ExtElem.scalar(sp)
    k = 0
    while True:
        k += 1
        power = ext_mul(power, x)
        if not power:
            return acc
        acc = acc + power.scale(Fraction(1, factorial(k)))


@dataclass
class SFunctionValue:
    """``S(A) = det(j(A))^(1/2) exp(f(A)_ab e^a ^ e^b / 2)`` with its caps."""

    element: ExtElem
    degree_cap: int

    def graded_by_degree(self) -> list[ExtElem]:
        """Split by polynomial degree of the coefficients (constant coefficients)."""
        out = []
        for d in range(self.degree_cap + 1):
            terms = {}
            for m, c in self.element.terms.items():
                part = c.homogeneous(d)
                if part:
                    terms[m] = part
            out.append(ExtElem(self.element.space, terms))
        return out


def s_function(space: QuadraticSpace, A: PolyMatrix, degree_cap: int) -> SFunctionValue:
    """Evaluate ``S(A)`` for a B-skew matrix with polynomial entries, truncated at ``degree_cap``."""
    check_skew(space, A)
    A = A.with_cap(degree_cap)
    det_factor = det_sqrt_j(A, degree_cap)
    F = matrix_apply_series(series_of("f", series_order_needed(A, degree_cap)), A, degree_cap)
    quad = ext_quadratic(space, F)
    elem = ext_exp(quad).scale(det_factor)
    return SFunctionValue(elem, degree_cap)


def _homogeneous_coeffs(x: ExtElem, d: int) -> ExtElem:
    """Degree-``d`` part of a MultiPoly-coefficient element, as rationals (one variable)."""
    terms = {}
    for m, c in x.terms.items():
        v = c.terms.get((d,), 0)
        if v:
            terms[m] = v
    return ExtElem(x.space, terms)


def expo_identity_check(space: QuadraticSpace, A, t_order: int, convention: str = LEFT) -> CheckResult:
    """Compare both sides of the exterior/Clifford exponential identity as t-series.

    Replaces ``A`` by ``tA``; the order-``k`` coefficient of the left side is
    ``X^k/k!`` with ``X = (1/2) A_ab e^a e^b`` in ``Cl(V)``, and of the right
    side ``q(sum_{i+m=k} iota(S_i) Lambda^m/m!)`` with ``Lambda`` the exterior
    counterpart and ``S_i`` the ``t^i`` coefficient of ``S(tA)``.
    """
    if t_order < 0:
        raise ValueError("t_order must be non-negative")
    A = [[as_rational(x) for x in row] for row in A]
    check_skew(space, A)
    tA = PolyMatrix(
        [[MultiPoly(1, {(1,): x}, t_order) if x else 0 for x in row] for row in A],
        num_vars=1,
        degree_cap=t_order,
    )
    S = s_function(space, tA, t_order)
    S_parts = [_homogeneous_coeffs(S.element, i) for i in range(t_order + 1)]
    X = cl_quadratic(space, A)
    lam = ext_quadratic(space, A)
    lam_powers = [ExtElem.scalar(space)]
    for m in range(1, t_order + 1):
        lam_powers.append(ext_mul(lam_powers[-1], lam))
    lhs_power = ClElem.scalar(space)
    for k in range(t_order + 1):
        if k:
            lhs_power = cl_mul(lhs_power, X)
        lhs = lhs_power.scale(Fraction(1, factorial(k)))
        inner = ExtElem(space)
        for i in range(k + 1):
            m = k - i
            if S_parts[i] and lam_powers[m]:
                inner = inner + contract(S_parts[i], convention)(lam_powers[m]).scale(Fraction(1, factorial(m)))
        rhs = quantize(inner)
        if lhs != rhs:
            return CheckResult.fail({"t_order": k, "lhs": repr(lhs), "rhs": repr(rhs)}, checked_to=k)
    return CheckResult.ok(checked_to=t_order)
