"""Polynomial differential forms on ``g`` tensored with ``/\\g`` or ``Cl(g)``.

A :class:`FormElem` stores ``{(first_mask, dxi_mask): MultiPoly}``, meaning
``sum p(xi) * (e_first (x) dxi^I)`` in the Z2-graded tensor product, where the
polynomial coefficients are functions of the coordinates ``xi^a``.
Multiplication follows ``(a (x) w)(a' (x) w') = (-1)^{|w||a'|} aa' (x) w^w'``.

Also here: the dynamical r-matrix ``r(xi) = f(ad_xi)`` and the check of the
classical dynamical Yang-Baxter equation it satisfies.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping

from .errors import RingMismatchError
from .exact_core import MultiPoly, PolyMatrix, matrix_apply_series, series_of, series_order_needed
from .grassmann_clifford import LEFT, QuadraticSpace, bits, popcount, s_function
from .kernels import accumulate, reorder_sign, sparse_bilinear
from .lie import LieAlgebraModel, ad_matrix, lambda_g
from .results import CheckResult
from .weil import cubic_element

EXTERIOR = "exterior"
CLIFFORD = "clifford"


def _prune(d):
    return {k: v for k, v in d.items() if v}


class FormElem:
    """Element of ``/\\g (x) Omega_poly(g)`` or ``Cl(g) (x) Omega_poly(g)``."""

    __slots__ = ("space", "kind", "degree_cap", "terms")

    def __init__(self, space: QuadraticSpace, kind: str, terms: Mapping | None = None, degree_cap: int | None = None):
        if kind not in (EXTERIOR, CLIFFORD):
            raise ValueError(f"unknown first-factor kind {kind!r}")
        self.space = space
        self.kind = kind
        self.degree_cap = degree_cap
        n = space.n
        clean = {}
        for k, v in (terms or {}).items():
            if not isinstance(v, MultiPoly):
                v = MultiPoly.constant(v, n)
            v = v.with_cap(degree_cap)
            if v:
                clean[k] = v
        self.terms: dict = clean

    @classmethod
    def _raw(cls, space, kind, terms, cap):
        e = cls.__new__(cls)
        e.space, e.kind, e.terms, e.degree_cap = space, kind, terms, cap
        return e

    def _like(self, terms):
        return FormElem._raw(self.space, self.kind, _prune(terms), self.degree_cap)

    def _check(self, other):
        if not isinstance(other, FormElem) or other.kind != self.kind or other.space is not self.space:
            raise RingMismatchError("form elements of different kinds or algebras")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self == FormElem(self.space, self.kind, {(0, 0): other}, self.degree_cap)
        if not isinstance(other, FormElem):
            return NotImplemented
        return self.kind == other.kind and self.space is other.space and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        parts = []
        for (a, w), p in sorted(self.terms.items()):
            first = ("^" if self.kind == EXTERIOR else ".").join(f"e{i}" for i in bits(a)) or "1"
            second = "^".join(f"dxi{i}" for i in bits(w)) or "1"
            parts.append(f"({p!r})*[{first}|{second}]")
        return "FormElem(" + (" + ".join(parts) or "0") + ")"

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        accumulate(out, other.terms.items(), 1)
        return self._like(out)

    def __neg__(self):
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._like({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, FormElem):
            return mixed_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def parity_parts(self):
        even, odd = {}, {}
        for k, v in self.terms.items():
            (odd if (popcount(k[0]) + popcount(k[1])) % 2 else even)[k] = v
        return even, odd

    def truncate(self, degree_cap: int):
        return FormElem(self.space, self.kind, self.terms, degree_cap)


_TABLES: dict = {}


def _mixed_table(space: QuadraticSpace, kind: str):
    key = (id(space), kind)
    hit = _TABLES.get(key)
    if hit is None or hit[0] is not space:

        def fill(k1, k2):
            (a1, w1), (a2, w2) = k1, k2
            if w1 & w2:
                return ()
            sign = reorder_sign(w1, w2)
            if popcount(w1) % 2 and popcount(a2) % 2:
                sign = -sign
            if kind == EXTERIOR:
                if a1 & a2:
                    return ()
                return (((a1 | a2, w1 | w2), Fraction(sign * reorder_sign(a1, a2))),)
            prod = space.cl_mono_mul(a1, a2) if (a1 and a2) else ((a1 | a2, Fraction(1)),)
            return tuple(((m, w1 | w2), sign * c) for m, c in prod)

        hit = (space, {}, fill)
        _TABLES[key] = hit
    return hit[1], hit[2]


def mixed_mul(x: FormElem, y: FormElem) -> FormElem:
    """Product in the Z2-graded tensor product."""
    x._check(y)
    table, fill = _mixed_table(x.space, x.kind)
    out = sparse_bilinear(x.terms, y.terms, table, fill)
    cap = x.degree_cap if y.degree_cap is None else (y.degree_cap if x.degree_cap is None else min(x.degree_cap, y.degree_cap))
    return FormElem._raw(x.space, x.kind, _prune({k: v.with_cap(cap) for k, v in out.items()}), cap)


def form_one(space, kind, degree_cap=None) -> FormElem:
    return FormElem(space, kind, {(0, 0): 1}, degree_cap)


def linear_term(L: LieAlgebraModel, kind: str, degree_cap=None) -> FormElem:
    """``e_a (x) dxi^a`` (summed over ``a``)."""
    return FormElem(L.space, kind, {(1 << a, 1 << a): 1 for a in range(L.dim)}, degree_cap)


def from_first_factor(L: LieAlgebraModel, elem, kind: str, degree_cap=None) -> FormElem:
    """Embed an exterior/Clifford element (coefficients rational or polynomial) as ``x (x) 1``."""
    return FormElem(L.space, kind, {(m, 0): c for m, c in elem.terms.items()}, degree_cap)


# ---------------------------------------------------------------------------
# Differentials
# ---------------------------------------------------------------------------


def _ce_images(L: LieAlgebraModel) -> list[dict[int, Fraction]]:
    """``d_CE(e_a) = -1/2 f_apq e^p ^ e^q`` in the ``e_r`` basis."""
    n = L.dim
    Bi, f = L.B_inv, L.f
    out = []
    for a in range(n):
        g = [[sum((f[a][p][q] * Bi[p][r] * Bi[q][s] for p in range(n) for q in range(n)), Fraction(0)) for s in range(n)] for r in range(n)]
        img = {}
        for r in range(n):
            for s in range(r + 1, n):
                v = -(g[r][s] - g[s][r]) / 2
                if v:
                    img[(1 << r) | (1 << s)] = v
        out.append(img)
    return out


def ce_on_mask(L: LieAlgebraModel, mask: int) -> dict[int, Fraction]:
    """Chevalley-Eilenberg differential on an exterior monomial (odd derivation)."""
    images = _ce_images(L)
    idx = bits(mask)
    out: dict = {}
    for pos, a in enumerate(idx):
        before = sum(1 << i for i in idx[:pos])
        after = sum(1 << i for i in idx[pos + 1 :])
        sign0 = -1 if pos % 2 else 1
        for m, v in images[a].items():
            if m & (before | after):
                continue
            s = sign0 * reorder_sign(before, m) * reorder_sign(before | m, after)
            k = before | m | after
            out[k] = out.get(k, 0) + s * v
    return _prune(out)


def mixed_differential(L: LieAlgebraModel, kind: str, x: FormElem) -> FormElem:
    """``rham``, ``ce`` (exterior only), ``clifford`` (Clifford only) or ``total``.

    The Clifford differential is the graded commutator with ``-C (x) 1``; its
    associated graded is the ``ce`` differential.
    """
    if kind == "total":
        inner = "ce" if x.kind == EXTERIOR else "clifford"
        return mixed_differential(L, "rham", x) + mixed_differential(L, inner, x)
    if kind == "rham":
        out: dict = {}
        n = L.dim
        for (a, w), p in x.terms.items():
            sign_a = -1 if popcount(a) % 2 else 1
            for k in range(n):
                if w & (1 << k):
                    continue
                dp = p.partial(k)
                if not dp:
                    continue
                s = sign_a * reorder_sign(1 << k, w)
                key = (a, w | (1 << k))
                out[key] = out.get(key, 0) + dp * s
        return x._like(out)
    if kind == "ce":
        if x.kind != EXTERIOR:
            raise RingMismatchError("ce differential needs an exterior first factor")
        out = {}
        for (a, w), p in x.terms.items():
            for m, v in ce_on_mask(L, a).items():
                key = (m, w)
                out[key] = out.get(key, 0) + p * v
        return x._like(out)
    if kind == "clifford":
        if x.kind != CLIFFORD:
            raise RingMismatchError("clifford differential needs a Clifford first factor")
        C = from_first_factor(L, cubic_element(L), CLIFFORD, x.degree_cap).scale(-1)
        even, odd = x.parity_parts()
        xe = x._like(even)
        xo = x._like(odd)
        # C is odd: [C, x] = Cx - xC on even x, Cx + xC on odd x
        return mixed_mul(C, x) - mixed_mul(xe, C) + mixed_mul(xo, C)
    raise ValueError(f"unknown differential {kind!r}")


def quantize_first(L: LieAlgebraModel, x: FormElem) -> FormElem:
    """Apply ``q`` to the first factor of an exterior-kind element."""
    sp = L.space
    out: dict = {}
    for (a, w), p in x.terms.items():
        for m, c in sp.q_mono(a).items():
            key = (m, w)
            out[key] = out.get(key, 0) + p * c
    return FormElem._raw(sp, CLIFFORD, _prune(out), x.degree_cap)


def symbol_first(L: LieAlgebraModel, x: FormElem) -> FormElem:
    sp = L.space
    out: dict = {}
    for (a, w), p in x.terms.items():
        for m, c in sp.symbol_mono(a).items():
            key = (m, w)
            out[key] = out.get(key, 0) + p * c
    return FormElem._raw(sp, EXTERIOR, _prune(out), x.degree_cap)


def closedness_check(L: LieAlgebraModel) -> CheckResult:
    """``lambda - e_a dxi^a`` and ``q(lambda) - e_a dxi^a`` are closed for the total differentials."""
    lam = lambda_g(L)
    z_ext = from_first_factor(L, lam, EXTERIOR) - linear_term(L, EXTERIOR)
    z_cl = quantize_first(L, from_first_factor(L, lam, EXTERIOR)) - linear_term(L, CLIFFORD)
    d_ext = mixed_differential(L, "total", z_ext)
    d_cl = mixed_differential(L, "total", z_cl)
    details = {"exterior": not d_ext, "clifford": not d_cl}
    if d_ext or d_cl:
        return CheckResult.fail(
            {"exterior_defect": repr(d_ext) if d_ext else None, "clifford_defect": repr(d_cl) if d_cl else None},
            **details,
        )
    return CheckResult.ok(**details)


# ---------------------------------------------------------------------------
# The mixed exponential identity
# ---------------------------------------------------------------------------


def _contract_s_first(L, S_part, y: FormElem, convention) -> FormElem:
    """``iota(S)`` on the first factor, multiplying polynomial coefficients."""
    sp = L.space
    out: dict = {}
    for s_mask, s_poly in S_part.terms.items():
        for (a, w), p in y.terms.items():
            for m, c in sp.contract_mono(s_mask, a, convention):
                key = (m, w)
                out[key] = out.get(key, 0) + s_poly * p * c
    return FormElem(sp, EXTERIOR, _prune(out), y.degree_cap)


def eq2_sides(L: LieAlgebraModel, degree_cap: int, t_order: int, convention: str = LEFT):
    """Coefficients of ``t^k``, ``k <= t_order``, of both sides of the mixed identity.

    Scaling the whole exponent by ``t`` is the pullback along ``xi -> t xi``,
    so the ``t^k`` coefficient of ``S^g`` is its polynomial-degree-``k`` part.
    """
    sp = L.space
    lam = lambda_g(L)
    lin_e = linear_term(L, EXTERIOR, degree_cap)
    lin_c = linear_term(L, CLIFFORD, degree_cap)
    y = from_first_factor(L, lam, EXTERIOR, degree_cap) - lin_e
    x = quantize_first(L, from_first_factor(L, lam, EXTERIOR, degree_cap)) - lin_c
    S_parts = s_function(sp, ad_matrix(L, degree_cap), degree_cap).graded_by_degree()
    S_parts += [None] * (t_order + 1 - len(S_parts))
    y_pows = [form_one(sp, EXTERIOR, degree_cap)]
    x_pows = [form_one(sp, CLIFFORD, degree_cap)]
    for _ in range(t_order):
        y_pows.append(mixed_mul(y_pows[-1], y))
        x_pows.append(mixed_mul(x_pows[-1], x))
    lhs, rhs = [], []
    for k in range(t_order + 1):
        lhs.append(x_pows[k].scale(Fraction(1, factorial(k))))
        inner = FormElem(sp, EXTERIOR, {}, degree_cap)
        for i in range(k + 1):
            m = k - i
            if S_parts[i] and y_pows[m]:
                inner = inner + _contract_s_first(L, S_parts[i], y_pows[m], convention).scale(Fraction(1, factorial(m)))
        rhs.append(quantize_first(L, inner))
    return lhs, rhs


def eq2_check(L: LieAlgebraModel, degree_cap: int, t_order: int, convention: str = LEFT) -> CheckResult:
    """Exact comparison of the mixed exponential identity, order by order in ``t``."""
    lhs, rhs = eq2_sides(L, degree_cap, t_order, convention)
    for k, (a, b) in enumerate(zip(lhs, rhs)):
        if a != b:
            return CheckResult.fail({"t_order": k, "difference": repr(a - b)})
    return CheckResult.ok(t_order=t_order, degree_cap=degree_cap)


# ---------------------------------------------------------------------------
# Dynamical r-matrix and CDYBE
# ---------------------------------------------------------------------------


@dataclass
class RMatrix:
    """Lowered components ``r_ab(xi) = B(e_a, f(ad_xi) e_b)`` up to ``degree_cap``."""

    matrix: PolyMatrix
    degree_cap: int

    def __getitem__(self, ab):
        return self.matrix[ab]


def r_matrix(L: LieAlgebraModel, degree_cap: int) -> RMatrix:
    A = ad_matrix(L, degree_cap)
    F = matrix_apply_series(series_of("f", series_order_needed(A, degree_cap)), A, degree_cap)
    B = PolyMatrix(L.B, L.dim, degree_cap)
    return RMatrix(B @ F, degree_cap)


def _f_two_raised(L: LieAlgebraModel):
    """``f^{kl}_b``: first two indices of ``f_klb`` raised with ``B^{-1}``."""
    n = L.dim
    Bi, f = L.B_inv, L.f
    return [
        [[sum((Bi[k][p] * Bi[l][q] * f[p][q][b] for p in range(n) for q in range(n)), Fraction(0)) for b in range(n)] for l in range(n)]
        for k in range(n)
    ]


def cdybe_lhs(L: LieAlgebraModel, degree_cap: int, scale=1, quadratic_sign=1) -> list:
    """``cycl_abc (d r_ab / d xi^c + s r_ak f^{kl}_b r_lc)`` for ``r -> scale * r``.

    With ``f_abc = B(e_a, [e_b, e_c])`` and ``f^{kl}_b`` raised on its first two
    slots, the identity holds for ``s = +1``; ``s = -1`` is kept as a control.
    """
    n = L.dim
    r = r_matrix(L, degree_cap + 1).matrix * scale
    F2 = _f_two_raised(L)
    pieces = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                t = r[a, b].partial(c).with_cap(degree_cap)
                for k in range(n):
                    if not r[a, k]:
                        continue
                    for l in range(n):
                        if F2[k][l][b] and r[l, c]:
                            t = t + (r[a, k] * r[l, c]).with_cap(degree_cap) * (F2[k][l][b] * quadratic_sign)
                pieces[(a, b, c)] = t
    return [[[pieces[(a, b, c)] + pieces[(b, c, a)] + pieces[(c, a, b)] for c in range(n)] for b in range(n)] for a in range(n)]


def cdybe_check(L: LieAlgebraModel, degree_cap: int, scale=1, quadratic_sign=1) -> CheckResult:
    """Verify the CDYBE coefficientwise up to ``xi``-degree ``degree_cap``.

    ``scale`` replaces ``r`` by ``scale * r`` (``scale=2`` is the negative control).
    """
    if degree_cap < 0:
        raise ValueError("degree_cap must be non-negative")
    n = L.dim
    lhs = cdybe_lhs(L, degree_cap, scale, quadratic_sign)
    slice0 = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                target = -L.f[a][b][c] / 4
                diff = lhs[a][b][c] - target
                v0 = lhs[a][b][c].constant_term()
                if v0:
                    slice0[f"{a},{b},{c}"] = str(v0)
                if diff:
                    mono = min(diff.terms, key=lambda e: (sum(e), tuple(-x for x in e)))
                    return CheckResult.fail(
                        {"a": a, "b": b, "c": c, "monomial": list(mono), "defect": str(diff.terms[mono])},
                        degree_cap=degree_cap,
                    )
    return CheckResult.ok(degree_cap=degree_cap, degree0_slice=slice0)
