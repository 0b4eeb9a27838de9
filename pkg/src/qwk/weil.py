"""Weil algebra ``Wg = Sg (x) /\\g`` and its quantum version ``Ug (x) Cl(g)``.

Keys of both element types are pairs ``(alpha, mask)``: a PBW / polynomial
exponent vector for the even factor and a bitmask for the odd factor.  The
even factor is purely even, so products never pick up signs from it.

Derivations are named by tuples: ``("d",)``, ``("iota", b)`` and ``("L", b)``
for the basis direction ``e_b``.

On ``Wg`` they are defined on generators (``y_a`` the even copy of ``e_a``,
``e_a`` the odd copy) and extended as super-derivations::

    iota_b e_a = B_ba                     iota_b y_a = 0
    L_b e_a    = [e_b, e_a]               L_b y_a    = [e_b, e_a] (even copy)
    d e_a      = y_a - 1/2 g_a^{rs} e_r e_s
    d y_a      = - g_a^{rs} e_r y_s

with ``g_a^{rs} = f_apq Binv^{pr} Binv^{qs}``.  On the quantum side all three
are inner: ``iota_b = [1 (x) e_b, .]``, ``L_b = [e_b (x) 1 + 1 (x) q(lambda(e_b)), .]``
and ``d = [D, .]`` with the cubic Dirac operator ``D``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial
from typing import Iterable, Mapping

from .errors import RingMismatchError
from .exact_core import MultiPoly, nullspace
from .grassmann_clifford import (
    LEFT,
    ClElem,
    ExtElem,
    bits,
    cl_mul,
    ext_quadratic,
    popcount,
    quantize,
    s_function,
)
from .kernels import accumulate, reorder_sign, sparse_bilinear
from .lie import LieAlgebraModel, ad_at, ad_matrix, invariant_polynomials, monomials
from .pbw_env import UEnvElem, duflo_map, enveloping
from .results import CheckResult


def _prune(d):
    return {k: v for k, v in d.items() if v}


def _add_tuple(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _unit(n, a):
    e = [0] * n
    e[a] = 1
    return tuple(e)


def z_degree(key) -> int:
    alpha, mask = key
    return 2 * sum(alpha) + popcount(mask)


def basis_keys(n: int, max_degree: int, min_degree: int = 0) -> list[tuple]:
    """All ``(alpha, mask)`` of Z-degree in range, sorted by degree then key."""
    out = []
    for s in range(max_degree // 2 + 1):
        for alpha in monomials(n, s):
            for w in range(n + 1):
                deg = 2 * s + w
                if deg < min_degree or deg > max_degree:
                    continue
                for combo in combinations(range(n), w):
                    mask = sum(1 << i for i in combo)
                    out.append((alpha, mask))
    out.sort(key=lambda k: (z_degree(k), tuple(-x for x in k[0]), k[1]))
    return out


def operator_parity(kind: tuple) -> int:
    return 0 if kind[0] == "L" else 1


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


class _TensorElem:
    __slots__ = ("alg", "terms")

    def __init__(self, alg, terms: Mapping | None = None):
        self.alg = alg
        self.terms: dict = _prune({k: Fraction(v) for k, v in terms.items()}) if terms else {}

    @classmethod
    def _raw(cls, alg, terms):
        e = cls.__new__(cls)
        e.alg = alg
        e.terms = terms
        return e

    def _check(self, other):
        if type(other) is not type(self) or other.alg is not self.alg:
            raise RingMismatchError("elements of different algebras")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            n = self.alg.n
            return self.terms == ({((0,) * n, 0): Fraction(other)} if other else {})
        if type(other) is not type(self):
            return NotImplemented
        return self.alg is other.alg and self.terms == other.terms

    __hash__ = None

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = type(self)._raw(self.alg, {((0,) * self.alg.n, 0): Fraction(other)} if other else {})
        self._check(other)
        out = dict(self.terms)
        accumulate(out, other.terms.items(), 1)
        return type(self)._raw(self.alg, _prune(out))

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return type(self)._raw(self.alg, _prune({k: v * c for k, v in self.terms.items()}))

    def __mul__(self, other):
        if isinstance(other, type(self)):
            self._check(other)
            return type(self)._raw(self.alg, self.alg.mul_terms(self.terms, other.terms))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def parity_parts(self) -> tuple[dict, dict]:
        even, odd = {}, {}
        for k, v in self.terms.items():
            (odd if popcount(k[1]) % 2 else even)[k] = v
        return even, odd

    def filtration_degree(self) -> int:
        return max((z_degree(k) for k in self.terms), default=-1)

    def top_part(self):
        d = self.filtration_degree()
        return type(self)._raw(self.alg, {k: v for k, v in self.terms.items() if z_degree(k) == d})

    def __repr__(self):
        names = self.alg.L.basis_names
        parts = []
        for (alpha, mask), v in sorted(self.terms.items(), key=lambda t: (z_degree(t[0]), t[0])):
            even = "*".join(names[i] + (f"^{x}" if x > 1 else "") for i, x in enumerate(alpha) if x) or "1"
            odd = "." .join(names[i] for i in bits(mask)) or "1"
            parts.append(f"{v}*[{even}|{odd}]")
        return f"{type(self).__name__}(" + (" + ".join(parts) or "0") + ")"


class WeilElem(_TensorElem):
    """Element of ``Wg = Sg (x) /\\g``; Z-degree ``2*|alpha| + |mask|``."""

    __slots__ = ()


class QWeilElem(_TensorElem):
    """Element of ``Ug (x) Cl(g)``; filtration degree ``2*|alpha| + |mask|``."""

    __slots__ = ()


# ---------------------------------------------------------------------------
# Classical Weil algebra
# ---------------------------------------------------------------------------


class WeilAlgebra:
    """Structure maps of ``Wg`` for one quadratic Lie algebra."""

    def __init__(self, L: LieAlgebraModel):
        self.L = L
        self.n = L.dim
        self.zero_alpha = (0,) * self.n
        self.table: dict = {}
        self._der_cache: dict = {}
        self._images = {}

    # -- construction helpers ----------------------------------------------
    def elem(self, terms=None) -> WeilElem:
        return WeilElem(self, terms)

    def one(self) -> WeilElem:
        return WeilElem._raw(self, {(self.zero_alpha, 0): Fraction(1)})

    def odd_gen(self, a: int) -> WeilElem:
        return WeilElem._raw(self, {(self.zero_alpha, 1 << a): Fraction(1)})

    def even_gen(self, a: int) -> WeilElem:
        return WeilElem._raw(self, {(_unit(self.n, a), 0): Fraction(1)})

    def basis(self, key) -> WeilElem:
        return WeilElem._raw(self, {key: Fraction(1)})

    def from_polynomial(self, p: MultiPoly) -> WeilElem:
        return WeilElem(self, {(e, 0): c for e, c in p.terms.items()})

    def from_ext(self, x: ExtElem) -> WeilElem:
        return WeilElem(self, {(self.zero_alpha, m): c for m, c in x.terms.items()})

    # -- product --------------------------------------------------------------
    def _mono_mul(self, k1, k2):
        (a1, m1), (a2, m2) = k1, k2
        if m1 & m2:
            return ()
        return (((_add_tuple(a1, a2), m1 | m2), Fraction(reorder_sign(m1, m2))),)

    def mul_terms(self, x: dict, y: dict) -> dict:
        return sparse_bilinear(x, y, self.table, self._mono_mul)

    # -- derivations ------------------------------------------------------------
    @cached_property
    def _g_raised(self):
        L, n = self.L, self.n
        Bi, f = L.B_inv, L.f
        return [
            [[sum((f[a][p][q] * Bi[p][r] * Bi[q][s] for p in range(n) for q in range(n)), Fraction(0)) for s in range(n)] for r in range(n)]
            for a in range(n)
        ]

    def generator_images(self, kind: tuple) -> tuple[list[WeilElem], list[WeilElem]]:
        """Images of the even generators ``y_a`` and odd generators ``e_a``."""
        hit = self._images.get(kind)
        if hit is not None:
            return hit
        L, n = self.L, self.n
        za = self.zero_alpha
        if kind[0] == "iota":
            b = kind[1]
            even = [self.elem() for _ in range(n)]
            odd = [self.elem({(za, 0): L.B[b][a]}) for a in range(n)]
        elif kind[0] == "L":
            b = kind[1]
            even = [self.elem({(_unit(n, k), 0): L.c[b][a][k] for k in range(n)}) for a in range(n)]
            odd = [self.elem({(za, 1 << k): L.c[b][a][k] for k in range(n)}) for a in range(n)]
        elif kind[0] == "d":
            g = self._g_raised
            odd, even = [], []
            for a in range(n):
                t: dict = {(_unit(n, a), 0): Fraction(1)}
                for r in range(n):
                    for s in range(r + 1, n):
                        v = -(g[a][r][s] - g[a][s][r]) / 2
                        if v:
                            t[(za, (1 << r) | (1 << s))] = v
                odd.append(self.elem(t))
                t = {}
                for r in range(n):
                    for s in range(n):
                        if g[a][r][s]:
                            key = (_unit(n, s), 1 << r)
                            t[key] = t.get(key, 0) - g[a][r][s]
                even.append(self.elem(t))
        else:
            raise ValueError(f"unknown derivation {kind!r}")
        self._images[kind] = (even, odd)
        return even, odd

    def _derive_key(self, kind: tuple, key) -> dict:
        ck = (kind, key)
        hit = self._der_cache.get(ck)
        if hit is not None:
            return hit
        alpha, mask = key
        even_img, odd_img = self.generator_images(kind)
        parity = operator_parity(kind)
        n = self.n
        out: dict = {}
        # D(s (x) w) = D(s) w + s D(w); the even factor s is a product of commuting generators
        w_only = {(self.zero_alpha, mask): Fraction(1)}
        for a in range(n):
            if alpha[a] and even_img[a]:
                rest = list(alpha)
                rest[a] -= 1
                left = {(tuple(rest), 0): Fraction(alpha[a])}
                part = self.mul_terms(self.mul_terms(left, even_img[a].terms), w_only)
                accumulate(out, part.items(), 1)
        s_only = {(alpha, 0): Fraction(1)}
        idx = bits(mask)
        for pos, a in enumerate(idx):
            if not odd_img[a]:
                continue
            before = sum(1 << i for i in idx[:pos])
            after = sum(1 << i for i in idx[pos + 1 :])
            sign = -1 if (parity and pos % 2) else 1
            part = self.mul_terms({(self.zero_alpha, before): Fraction(sign)}, odd_img[a].terms)
            part = self.mul_terms(part, {(self.zero_alpha, after): Fraction(1)})
            part = self.mul_terms(s_only, part)
            accumulate(out, part.items(), 1)
        out = _prune(out)
        self._der_cache[ck] = out
        return out

    def derive(self, kind: tuple, x: WeilElem) -> WeilElem:
        kind = _normalize_kind(kind)
        if kind[0] == "iota" and isinstance(kind[1], (list, tuple)):
            return self._directional(kind, x)
        out: dict = {}
        for k, c in x.terms.items():
            accumulate(out, self._derive_key(kind, k).items(), c)
        return WeilElem._raw(self, _prune(out))

    def _directional(self, kind, x):
        acc = self.elem()
        for b, c in enumerate(kind[1]):
            if c:
                acc = acc + self.derive((kind[0], b), x).scale(c)
        return acc


def _normalize_kind(kind) -> tuple:
    if isinstance(kind, str):
        return (kind,)
    return tuple(kind)


def weil_derivation(W: WeilAlgebra, kind, x: WeilElem) -> WeilElem:
    """Apply ``d``, ``iota_b`` or ``L_b`` on ``Wg``."""
    return W.derive(kind, x)


# ---------------------------------------------------------------------------
# Quantum Weil algebra
# ---------------------------------------------------------------------------


class QuantumWeilAlgebra:
    """Structure maps of ``Ug (x) Cl(g)`` for one quadratic Lie algebra."""

    def __init__(self, L: LieAlgebraModel):
        self.L = L
        self.n = L.dim
        self.env = enveloping(L)
        self.space = L.space
        self.zero_alpha = (0,) * self.n
        self.table: dict = {}

    def elem(self, terms=None) -> QWeilElem:
        return QWeilElem(self, terms)

    def one(self) -> QWeilElem:
        return QWeilElem._raw(self, {(self.zero_alpha, 0): Fraction(1)})

    def odd_gen(self, a: int) -> QWeilElem:
        return QWeilElem._raw(self, {(self.zero_alpha, 1 << a): Fraction(1)})

    def even_gen(self, a: int) -> QWeilElem:
        return QWeilElem._raw(self, {(_unit(self.n, a), 0): Fraction(1)})

    def basis(self, key) -> QWeilElem:
        return QWeilElem._raw(self, {key: Fraction(1)})

    def from_cl(self, x: ClElem) -> QWeilElem:
        return QWeilElem(self, {(self.zero_alpha, m): c for m, c in x.terms.items()})

    def from_u(self, u: UEnvElem) -> QWeilElem:
        return QWeilElem(self, {(a, 0): c for a, c in u.terms.items()})

    def _mono_mul(self, k1, k2):
        (a1, m1), (a2, m2) = k1, k2
        u = self.env.mono_mul(a1, a2)
        cl = self.space.cl_mono_mul(m1, m2) if (m1 and m2) else ((m1 | m2, Fraction(1)),)
        return tuple(((ua, cm), uc * cc) for ua, uc in u for cm, cc in cl)

    def mul_terms(self, x: dict, y: dict) -> dict:
        return sparse_bilinear(x, y, self.table, self._mono_mul)

    def commutator(self, a: QWeilElem, x: QWeilElem, a_parity: int) -> QWeilElem:
        """Graded commutator ``[a, x]`` for homogeneous ``a`` of the given parity."""
        even, odd = x.parity_parts()
        out = self.mul_terms(a.terms, x.terms)
        if a_parity:
            accumulate(out, self.mul_terms(even, a.terms).items(), -1)
            accumulate(out, self.mul_terms(odd, a.terms).items(), 1)
        else:
            accumulate(out, self.mul_terms(x.terms, a.terms).items(), -1)
        return QWeilElem._raw(self, _prune(out))

    @cached_property
    def cubic(self) -> ClElem:
        return cubic_element(self.L)

    @cached_property
    def dirac(self) -> QWeilElem:
        """``D = e_a (x) e^a - 1 (x) C``."""
        L, n = self.L, self.n
        t: dict = {}
        for a in range(n):
            for b in range(n):
                if L.B_inv[a][b]:
                    key = (_unit(n, a), 1 << b)
                    t[key] = t.get(key, 0) + L.B_inv[a][b]
        return self.elem(t) - self.from_cl(self.cubic)

    def lie_generator(self, b: int) -> QWeilElem:
        """``e_b (x) 1 + 1 (x) q(lambda(e_b))``, whose commutator is ``L_b``."""
        lam = ext_quadratic(self.space, ad_at(self.L, self.L.unit(b)))
        return self.even_gen(b) + self.from_cl(quantize(lam))

    def derive(self, kind, x: QWeilElem) -> QWeilElem:
        kind = _normalize_kind(kind)
        if kind[0] == "iota":
            return self.commutator(self.odd_gen(kind[1]), x, 1)
        if kind[0] == "L":
            return self.commutator(self.lie_generator(kind[1]), x, 0)
        if kind[0] == "d":
            return self.commutator(self.dirac, x, 1)
        raise ValueError(f"unknown derivation {kind!r}")

    def lie_derivative_generators(self, b: int, x: QWeilElem) -> QWeilElem:
        """``L_b`` as the derivation extending the adjoint action on generators.

        Independent of :meth:`lie_generator`; used to cross-check it.
        """
        L, n = self.L, self.n
        out: dict = {}
        for (alpha, mask), c in x.terms.items():
            u = UEnvElem(L, {alpha: 1})
            gu = UEnvElem.generator(L, b)
            du = gu * u - u * gu
            accumulate(out, {(a, mask): v for a, v in du.terms.items()}.items(), c)
            idx = bits(mask)
            for pos, a in enumerate(idx):
                img = ClElem.vector(self.space, L.c[b][a])
                if not img:
                    continue
                before = ClElem.basis(self.space, sum(1 << i for i in idx[:pos]))
                after = ClElem.basis(self.space, sum(1 << i for i in idx[pos + 1 :]))
                prod = cl_mul(cl_mul(before, img), after)
                accumulate(out, {(alpha, m): v for m, v in prod.terms.items()}.items(), c)
        return QWeilElem._raw(self, _prune(out))


def qweil_derivation(QW: QuantumWeilAlgebra, kind, x: QWeilElem) -> QWeilElem:
    """Apply ``d``, ``iota_b`` or ``L_b`` on ``Ug (x) Cl(g)``."""
    return QW.derive(kind, x)


def cubic_element(L: LieAlgebraModel) -> ClElem:
    """``C = (1/6) f_abc e^a e^b e^c`` by direct Clifford multiplication."""
    sp = L.space
    n = L.dim
    F = L.f_raised
    acc = ClElem(sp)
    gens = [ClElem.generator(sp, a) for a in range(n)]
    for p in range(n):
        for q in range(n):
            for r in range(n):
                if F[p][q][r]:
                    acc = acc + cl_mul(cl_mul(gens[p], gens[q]), gens[r]).scale(F[p][q][r] / 6)
    return acc


def dirac(L: LieAlgebraModel) -> QWeilElem:
    return quantum_weil(L).dirac


# ---------------------------------------------------------------------------
# Quantization map
# ---------------------------------------------------------------------------


class Quantization:
    """``Q = (sym (x) q) o iota(S^g hat)`` with memoized values on basis keys."""

    def __init__(self, L: LieAlgebraModel, convention: str = LEFT, duflo_factor: bool = True):
        self.L = L
        self.W = weil_algebra(L)
        self.QW = quantum_weil(L)
        self.convention = convention
        self.duflo_factor = duflo_factor
        self._s: dict[int, list] = {}
        self._cache: dict = {}

    def s_terms(self, cap: int) -> list[tuple[tuple, int, Fraction]]:
        """``S^g`` up to polynomial degree ``cap`` as ``(xi-exponent, mask, coeff)`` triples."""
        hit = self._s.get(cap)
        if hit is None:
            if self.duflo_factor:
                S = s_function(self.L.space, ad_matrix(self.L, cap), cap).element
                hit = [(e, m, c) for m, poly in S.terms.items() for e, c in poly.terms.items()]
            else:
                hit = [(self.W.zero_alpha, 0, Fraction(1))]
            self._s[cap] = hit
        return hit

    def iota_s_hat(self, x: WeilElem, order: str = "contract_first") -> WeilElem:
        """Let ``S^g`` act on ``Wg``: polynomial part by derivatives, exterior part by contraction."""
        sp = self.L.space
        out: dict = {}
        for (alpha, mask), c in x.terms.items():
            p = MultiPoly.monomial(alpha)
            for e, m, s in self.s_terms(sum(alpha)):
                if any(a > b for a, b in zip(e, alpha)):
                    continue
                if order == "contract_first":
                    contracted = sp.contract_mono(m, mask, self.convention)
                    if not contracted:
                        continue
                    dp = p.partial_multi(e)
                else:
                    dp = p.partial_multi(e)
                    if not dp:
                        continue
                    contracted = sp.contract_mono(m, mask, self.convention)
                for pe, pc in dp.terms.items():
                    for cm, cc in contracted:
                        key = (pe, cm)
                        out[key] = out.get(key, 0) + c * s * pc * cc
        return WeilElem._raw(self.W, _prune(out))

    def sym_q(self, x: WeilElem) -> QWeilElem:
        env, sp = self.QW.env, self.L.space
        out: dict = {}
        for (alpha, mask), c in x.terms.items():
            qm = sp.q_mono(mask)
            for ua, uc in env.sym_mono(alpha).items():
                for cm, cc in qm.items():
                    key = (ua, cm)
                    out[key] = out.get(key, 0) + c * uc * cc
        return QWeilElem._raw(self.QW, _prune(out))

    def _basis_value(self, key) -> dict:
        hit = self._cache.get(key)
        if hit is None:
            hit = self.sym_q(self.iota_s_hat(self.W.basis(key))).terms
            self._cache[key] = hit
        return hit

    def __call__(self, x: WeilElem) -> QWeilElem:
        out: dict = {}
        for k, c in x.terms.items():
            accumulate(out, self._basis_value(k).items(), c)
        return QWeilElem._raw(self.QW, _prune(out))


_ALG_CACHE: dict = {}


def _cached(kind, L, factory):
    key = (kind, id(L))
    hit = _ALG_CACHE.get(key)
    if hit is None or hit[0] is not L:
        hit = (L, factory(L))
        _ALG_CACHE[key] = hit
    return hit[1]


def weil_algebra(L: LieAlgebraModel) -> WeilAlgebra:
    return _cached("W", L, WeilAlgebra)


def quantum_weil(L: LieAlgebraModel) -> QuantumWeilAlgebra:
    return _cached("QW", L, QuantumWeilAlgebra)


def quantization(L: LieAlgebraModel, convention: str = LEFT, duflo_factor: bool = True) -> Quantization:
    return _cached(("Q", convention, duflo_factor), L, lambda M: Quantization(M, convention, duflo_factor))


def quantization_Q(L: LieAlgebraModel, x: WeilElem, convention: str = LEFT) -> QWeilElem:
    """The quantization map ``Wg -> Ug (x) Cl(g)``."""
    return quantization(L, convention)(x)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def cubic_square_check(L: LieAlgebraModel) -> CheckResult:
    """``C^2`` against the scalar ``-(1/48) f_abc f^abc``."""
    C = cubic_element(L)
    sq = cl_mul(C, C)
    expected = -L.f_squared / 48
    details = {"C_squared": repr(sq), "expected": str(expected), "f_squared": str(L.f_squared)}
    if sq == expected:
        return CheckResult.ok(value=str(expected), **details)
    return CheckResult.fail({"C_squared": repr(sq), "expected": str(expected)}, **details)


def casimir_u(L: LieAlgebraModel) -> UEnvElem:
    """``e_a e^a`` in ``Ug``."""
    n = L.dim
    acc = UEnvElem(L)
    for a in range(n):
        for b in range(n):
            if L.B_inv[a][b]:
                acc = acc + UEnvElem.generator(L, a) * UEnvElem.generator(L, b) * L.B_inv[a][b]
    return acc


def dirac_square_check(L: LieAlgebraModel) -> CheckResult:
    """``D^2 = (1/2) e_a e^a (x) 1 - (1/48) f f`` and centrality of ``D^2``."""
    QW = quantum_weil(L)
    D = QW.dirac
    D2 = D * D
    expected = QW.from_u(casimir_u(L)).scale(Fraction(1, 2)) - QW.one().scale(L.f_squared / 48)
    if D2 != expected:
        return CheckResult.fail({"D_squared": repr(D2), "expected": repr(expected)})
    for a in range(L.dim):
        for gen, label in ((QW.odd_gen(a), f"1(x){L.basis_names[a]}"), (QW.even_gen(a), f"{L.basis_names[a]}(x)1")):
            if QW.commutator(D2, gen, 0):
                return CheckResult.fail({"not_central_against": label})
    return CheckResult.ok(D_squared=repr(D2))


def _op_label(L, kind):
    return kind[0] if len(kind) == 1 else f"{kind[0]}_{L.basis_names[kind[1]]}"


def all_kinds(n: int) -> list[tuple]:
    return [("d",)] + [("iota", b) for b in range(n)] + [("L", b) for b in range(n)]


def chain_map_check(L: LieAlgebraModel, max_degree: int, convention: str = LEFT) -> CheckResult:
    """``Q`` intertwines ``d``, every ``iota_b`` and every ``L_b`` on all basis elements."""
    W, QW = weil_algebra(L), quantum_weil(L)
    Q = quantization(L, convention)
    count = 0
    for key in basis_keys(L.dim, max_degree):
        x = W.basis(key)
        qx = Q(x)
        for kind in all_kinds(L.dim):
            lhs = Q(W.derive(kind, x))
            rhs = QW.derive(kind, qx)
            count += 1
            if lhs != rhs:
                return CheckResult.fail(
                    {"element": repr(x), "degree": z_degree(key), "operator": _op_label(L, kind),
                     "difference": repr(lhs - rhs)},
                    comparisons=count,
                )
    return CheckResult.ok(comparisons=count, max_degree=max_degree)


def weil_basic_subspace(L: LieAlgebraModel, degree: int) -> list[WeilElem]:
    """Joint kernel of all ``L_b`` and ``iota_b`` on the Z-degree-``degree`` part of ``Wg``."""
    W = weil_algebra(L)
    keys = basis_keys(L.dim, degree, degree)
    cols = {k: i for i, k in enumerate(keys)}
    rows: list[list[Fraction]] = []
    for kind in [("iota", b) for b in range(L.dim)] + [("L", b) for b in range(L.dim)]:
        images = [W.derive(kind, W.basis(k)) for k in keys]
        targets = sorted({t for img in images for t in img.terms}, key=lambda t: (z_degree(t), t))
        tindex = {t: i for i, t in enumerate(targets)}
        block = [[Fraction(0)] * len(keys) for _ in targets]
        for j, img in enumerate(images):
            for t, v in img.terms.items():
                block[tindex[t]][j] = v
        rows.extend(block)
    basis = nullspace(rows, len(keys)) if rows else nullspace([], len(keys))
    return [W.elem({keys[i]: v for i, v in enumerate(vec) if v}) for vec in basis]


def basic_multiplicativity_check(L: LieAlgebraModel, max_degree: int, use_duflo_factor: bool = True) -> CheckResult:
    """``Q(p) Q(q) = Q(pq)`` on the basic subcomplex for the trivial g-differential algebra.

    The basic subcomplex is computed as an exact kernel in each Z-degree up to
    ``2*max_degree`` and cross-checked against the invariant polynomials.
    With ``use_duflo_factor=False`` the map ``sym (x) q`` is used instead.
    """
    W = weil_algebra(L)
    Q = quantization(L, LEFT, use_duflo_factor)
    basic: list[WeilElem] = []
    for deg in range(0, 2 * max_degree + 1):
        part = weil_basic_subspace(L, deg)
        if deg % 2:
            if part:
                return CheckResult.fail({"odd_basic_degree": deg})
            continue
        expected = [W.from_polynomial(p) for p in invariant_polynomials(L, deg // 2)]
        if len(part) != len(expected):
            return CheckResult.fail({"basic_dimension_mismatch": deg, "kernel": len(part), "invariants": len(expected)})
        basic.extend(part)
    pairs = 0
    for i, p in enumerate(basic):
        for q in basic[i:]:
            pairs += 1
            lhs = Q(p) * Q(q)
            rhs = Q(p * q)
            if lhs != rhs:
                return CheckResult.fail({"p": repr(p), "q": repr(q), "difference": repr(lhs - rhs)}, pairs=pairs)
    return CheckResult.ok(pairs=pairs, basic_dimension=len(basic))


def graded_operator_commutator(apply1, p1, apply2, p2, x):
    """``[D1, D2] x = D1 D2 x - (-1)^{p1 p2} D2 D1 x``."""
    a = apply1(apply2(x))
    b = apply2(apply1(x))
    return a + b if (p1 and p2) else a - b


def cartan_relations_check(L: LieAlgebraModel, max_degree: int, side: str = "W") -> CheckResult:
    """The six g-differential-algebra relations on a full basis up to ``max_degree``.

    ``side`` is ``"W"`` for ``Wg`` or ``"QW"`` for ``Ug (x) Cl(g)``.
    """
    n = L.dim
    alg = weil_algebra(L) if side == "W" else quantum_weil(L)

    def D(kind):
        return lambda x: alg.derive(kind, x)

    def iota_combo(coeffs):
        def op(x):
            acc = alg.elem()
            for k, c in enumerate(coeffs):
                if c:
                    acc = acc + alg.derive(("iota", k), x).scale(c)
            return acc
        return op

    def lie_combo(coeffs):
        def op(x):
            acc = alg.elem()
            for k, c in enumerate(coeffs):
                if c:
                    acc = acc + alg.derive(("L", k), x).scale(c)
            return acc
        return op

    relations = []  # (name, lhs operator, rhs operator or None for zero)
    relations.append(("[d,d]=0", lambda x: graded_operator_commutator(D(("d",)), 1, D(("d",)), 1, x), None))
    for a in range(n):
        relations.append((f"[d,iota_{a}]=L_{a}",
                          (lambda a: lambda x: graded_operator_commutator(D(("d",)), 1, D(("iota", a)), 1, x))(a),
                          D(("L", a))))
        relations.append((f"[d,L_{a}]=0",
                          (lambda a: lambda x: graded_operator_commutator(D(("d",)), 1, D(("L", a)), 0, x))(a), None))
        for b in range(n):
            br = L.c[a][b]
            relations.append((f"[iota_{a},iota_{b}]=0",
                              (lambda a, b: lambda x: graded_operator_commutator(D(("iota", a)), 1, D(("iota", b)), 1, x))(a, b), None))
            relations.append((f"[L_{a},iota_{b}]=iota_[{a},{b}]",
                              (lambda a, b: lambda x: graded_operator_commutator(D(("L", a)), 0, D(("iota", b)), 1, x))(a, b),
                              iota_combo(br)))
            relations.append((f"[L_{a},L_{b}]=L_[{a},{b}]",
                              (lambda a, b: lambda x: graded_operator_commutator(D(("L", a)), 0, D(("L", b)), 0, x))(a, b),
                              lie_combo(br)))
    count = 0
    for key in basis_keys(n, max_degree):
        x = alg.basis(key)
        for name, lhs, rhs in relations:
            count += 1
            left = lhs(x)
            right = rhs(x) if rhs is not None else alg.elem()
            if left != right:
                return CheckResult.fail({"relation": name, "element": repr(x), "difference": repr(left - right)}, comparisons=count)
    if side == "QW":
        # element-level Clifford relation: [1(x)e_a, 1(x)e_b] = B_ab
        for a in range(n):
            for b in range(n):
                v = alg.commutator(alg.odd_gen(a), alg.odd_gen(b), 1)
                if v != L.B[a][b]:
                    return CheckResult.fail({"relation": f"[1(x)e_{a},1(x)e_{b}]=B", "value": repr(v)})
    return CheckResult.ok(comparisons=count, relations=len(relations))
