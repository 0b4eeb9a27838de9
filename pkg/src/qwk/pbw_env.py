"""Symmetric and enveloping algebras, symmetrization, and the Duflo map.

``Sg`` elements are :class:`~qwk.exact_core.MultiPoly` in the generators
``e_0..e_{n-1}``.  ``Ug`` elements are sparse maps from PBW exponent vectors
(ascending basis order) to rationals.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .errors import RingMismatchError
from .exact_core import MultiPoly, det_sqrt_j
from .kernels import accumulate, sparse_bilinear
from .lie import LieAlgebraModel, ad_matrix

SymElem = MultiPoly


def _prune(d):
    return {k: v for k, v in d.items() if v}


class EnvelopingAlgebra:
    """PBW rewriting machinery for one Lie algebra, with memoized products."""

    def __init__(self, L: LieAlgebraModel):
        self.L = L
        self.n = L.dim
        self._gen: dict = {}
        self.table: dict = {}
        self._sym: dict = {}
        self._brackets = [
            [tuple((k, L.c[a][b][k]) for k in range(self.n) if L.c[a][b][k]) for b in range(self.n)]
            for a in range(self.n)
        ]

    def gen_left(self, c: int, beta: tuple) -> dict:
        """``e_c * e^beta`` in PBW normal form."""
        key = (c, beta)
        hit = self._gen.get(key)
        if hit is not None:
            return hit
        a = next((i for i, x in enumerate(beta) if x), None)
        if a is None or c <= a:
            nb = list(beta)
            nb[c] += 1
            out = {tuple(nb): Fraction(1)}
        else:
            # e_c e_a rest = e_a (e_c rest) + [e_c, e_a] rest
            rest = list(beta)
            rest[a] -= 1
            rest = tuple(rest)
            out: dict = {}
            for gamma, coef in self.gen_left(c, rest).items():
                accumulate(out, self.gen_left(a, gamma).items(), coef)
            for k, v in self._brackets[c][a]:
                accumulate(out, self.gen_left(k, rest).items(), v)
            out = _prune(out)
        self._gen[key] = out
        return out

    def mono_mul(self, alpha: tuple, beta: tuple) -> tuple:
        cur = {beta: Fraction(1)}
        letters = [i for i, x in enumerate(alpha) for _ in range(x)]
        for a in reversed(letters):
            nxt: dict = {}
            for g, coef in cur.items():
                accumulate(nxt, self.gen_left(a, g).items(), coef)
            cur = _prune(nxt)
        return tuple(cur.items())

    def sym_mono(self, alpha: tuple) -> dict:
        """Symmetrization of a monomial: average over all orderings of its letters.

        The first letter is ``e_a`` with probability ``alpha_a/|alpha|``, hence
        ``sym(e^alpha) = sum_a (alpha_a/|alpha|) e_a sym(e^(alpha - 1_a))``.
        """
        hit = self._sym.get(alpha)
        if hit is not None:
            return hit
        k = sum(alpha)
        if k == 0:
            out = {alpha: Fraction(1)}
        else:
            out = {}
            for a, x in enumerate(alpha):
                if not x:
                    continue
                rest = list(alpha)
                rest[a] -= 1
                w = Fraction(x, k)
                for g, coef in self.sym_mono(tuple(rest)).items():
                    accumulate(out, self.gen_left(a, g).items(), coef * w)
            out = _prune(out)
        self._sym[alpha] = out
        return out


_ENV_CACHE: dict[int, EnvelopingAlgebra] = {}


def enveloping(L: LieAlgebraModel) -> EnvelopingAlgebra:
    env = _ENV_CACHE.get(id(L))
    if env is None or env.L is not L:
        env = EnvelopingAlgebra(L)
        _ENV_CACHE[id(L)] = env
    return env


class UEnvElem:
    """Element of ``U(g)`` in PBW normal form."""

    __slots__ = ("L", "terms")

    def __init__(self, L: LieAlgebraModel, terms: Mapping | None = None):
        self.L = L
        self.terms: dict = _prune({tuple(k): Fraction(v) for k, v in terms.items()}) if terms else {}

    @classmethod
    def _raw(cls, L, terms):
        u = cls.__new__(cls)
        u.L = L
        u.terms = terms
        return u

    @classmethod
    def scalar(cls, L, c=1):
        return cls(L, {(0,) * L.dim: c})

    @classmethod
    def generator(cls, L, a: int, c=1):
        e = [0] * L.dim
        e[a] = 1
        return cls(L, {tuple(e): c})

    def _check(self, other):
        if not isinstance(other, UEnvElem) or other.L is not self.L:
            raise RingMismatchError("enveloping-algebra elements of different Lie algebras")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.L.dim: Fraction(other)} if other else {})
        if not isinstance(other, UEnvElem):
            return NotImplemented
        return self.L is other.L and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        names = self.L.basis_names
        parts = []
        for e in sorted(self.terms, key=lambda t: (-sum(t), t), reverse=False):
            mono = "*".join(names[i] + (f"^{x}" if x > 1 else "") for i, x in enumerate(e) if x) or "1"
            parts.append(f"{self.terms[e]}*{mono}")
        return "UEnvElem(" + (" + ".join(parts) or "0") + ")"

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UEnvElem.scalar(self.L, other)
        self._check(other)
        out = dict(self.terms)
        accumulate(out, other.terms.items(), 1)
        return UEnvElem._raw(self.L, _prune(out))

    __radd__ = __add__

    def __neg__(self):
        return UEnvElem._raw(self.L, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return UEnvElem._raw(self.L, _prune({k: v * c for k, v in self.terms.items()}))

    def __mul__(self, other):
        if isinstance(other, UEnvElem):
            return u_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def filtration_degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def top_symbol(self) -> MultiPoly:
        """Leading part in ``Sg`` under the PBW symbol map."""
        d = self.filtration_degree()
        return MultiPoly(self.L.dim, {k: v for k, v in self.terms.items() if sum(k) == d})


def u_mul(x: UEnvElem, y: UEnvElem) -> UEnvElem:
    """Product in ``U(g)`` reduced to PBW normal form."""
    x._check(y)
    env = enveloping(x.L)
    return UEnvElem._raw(x.L, sparse_bilinear(x.terms, y.terms, env.table, env.mono_mul))


def u_commutator(x: UEnvElem, y: UEnvElem) -> UEnvElem:
    return u_mul(x, y) - u_mul(y, x)


def sym_map(L: LieAlgebraModel, p: SymElem) -> UEnvElem:
    """The symmetrization map ``Sg -> Ug``."""
    env = enveloping(L)
    out: dict = {}
    for e, c in p.terms.items():
        accumulate(out, env.sym_mono(e).items(), c)
    return UEnvElem._raw(L, _prune(out))


_DUFLO_SERIES: dict = {}


def duflo_series(L: LieAlgebraModel, degree: int) -> MultiPoly:
    """``J(xi)^(1/2) = det(j(ad_xi))^(1/2)`` truncated at ``degree``, memoized per algebra."""
    key = (id(L), degree)
    hit = _DUFLO_SERIES.get(key)
    if hit is not None and hit[0] is L:
        return hit[1]
    val = det_sqrt_j(ad_matrix(L, degree), degree)
    _DUFLO_SERIES[key] = (L, val)
    return val


def apply_differential_operator(op: MultiPoly, p: MultiPoly) -> MultiPoly:
    """Let ``op(xi)`` act on ``p`` by ``xi^a -> d/de_a`` (constant coefficients)."""
    acc = MultiPoly.zero(p.num_vars)
    for alpha, c in op.terms.items():
        if sum(alpha) > p.degree():
            continue
        acc = acc + p.partial_multi(alpha) * c
    return acc


def duflo_operator(L: LieAlgebraModel, p: SymElem) -> SymElem:
    """The infinite-order operator ``J^(1/2)(d/dmu)``; exact on polynomials."""
    d = max(p.degree(), 0)
    return apply_differential_operator(duflo_series(L, d), p.with_cap(None))


def duflo_map(L: LieAlgebraModel, p: SymElem) -> UEnvElem:
    """``sym`` composed with the Duflo operator."""
    return sym_map(L, duflo_operator(L, p))


def adjoint_action(L: LieAlgebraModel, a: int, u: UEnvElem) -> UEnvElem:
    """``ad_{e_a}(u) = e_a u - u e_a`` in ``Ug``."""
    return u_commutator(UEnvElem.generator(L, a), u)


def is_central(u: UEnvElem) -> bool:
    """Centrality tested by commuting with every generator."""
    return all(not adjoint_action(u.L, a, u) for a in range(u.L.dim))


def _invariant_basis(L: LieAlgebraModel, max_degree: int) -> list[MultiPoly]:
    from .lie import invariant_polynomials

    return [p for d in range(1, max_degree + 1) for p in invariant_polynomials(L, d)]


def duflo_multiplicativity_check(L: LieAlgebraModel, max_degree: int, use_duflo: bool = True):
    """``duflo_map(p) duflo_map(q) = duflo_map(pq)`` for invariant ``p, q`` of degree ``<= max_degree``.

    With ``use_duflo=False`` the bare symmetrization is tested instead.
    """
    from .results import CheckResult

    phi = duflo_map if use_duflo else sym_map
    basis = _invariant_basis(L, max_degree)
    pairs = 0
    for i, p in enumerate(basis):
        for q in basis[i:]:
            pairs += 1
            lhs = phi(L, p) * phi(L, q)
            rhs = phi(L, p * q)
            if lhs != rhs:
                return CheckResult.fail({"p": repr(p), "q": repr(q), "difference": repr(lhs - rhs)}, pairs=pairs)
    return CheckResult.ok(pairs=pairs, invariants=len(basis))


def sym_control_witness(L: LieAlgebraModel, start: int = 4, limit: int = 6):
    """Search for invariants on which bare ``sym`` is not multiplicative, escalating the degree.

    Returns ``(degree, result)``; ``result.passed`` is False when a witness was found.
    """
    res = None
    for d in range(start, limit + 1, 2 if start < limit else 1):
        res = duflo_multiplicativity_check(L, d, use_duflo=False)
        if not res.passed:
            return d, res
    return limit, res
