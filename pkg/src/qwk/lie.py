"""Quadratic Lie algebras given by structure constants and an invariant form.

Conventions: ``[e_a, e_b] = sum_k c[a][b][k] e_k``; ``B[a][b] = B(e_a, e_b)``;
``f_abc = B(e_a, [e_b, e_c])``; the dual basis is ``e^a = sum_b Binv[a][b] e_b``
and coordinates are ``xi^a = B(xi, e^a)``, i.e. ``xi = sum_a xi^a e_a``.
Indices are 0-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
import re
from typing import Sequence

from .errors import MalformedInputError, UnknownNameError
from .exact_core import MultiPoly, PolyMatrix, as_rational, mat_det, nullspace
from .grassmann_clifford import ExtElem, QuadraticSpace

AXIOMS = ("antisymmetry", "jacobi", "form_symmetry", "form_nondegeneracy", "form_invariance")


class LieAlgebraModel:
    """Finite-dimensional Lie algebra with a symmetric bilinear form.

    The model is not validated on construction; call :func:`validate` before
    handing it to anything downstream.
    """

    def __init__(self, name: str, basis_names: Sequence[str], brackets, form):
        n = len(basis_names)
        self.name = name
        self.dim = n
        self.basis_names = tuple(basis_names)
        try:
            self.c = tuple(
                tuple(tuple(as_rational(brackets[a][b][k]) for k in range(n)) for b in range(n))
                for a in range(n)
            )
            if len(brackets) != n or any(len(r) != n for r in brackets) or any(
                len(v) != n for r in brackets for v in r
            ):
                raise MalformedInputError("structure constants must have shape n x n x n")
        except (IndexError, TypeError):
            raise MalformedInputError("structure constants must have shape n x n x n") from None
        if len(form) != n or any(len(r) != n for r in form):
            raise MalformedInputError(f"bilinear form must be {n} x {n}")
        self.B = tuple(tuple(as_rational(x) for x in r) for r in form)

    @classmethod
    def from_pairs(cls, name, basis_names, form, pairs: dict) -> "LieAlgebraModel":
        """Build from ``{(a, b): {k: coeff}}`` with each unordered pair listed once; ``(b, a)`` follows by antisymmetry."""
        n = len(basis_names)
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (a, b), coeffs in pairs.items():
            if not (0 <= a < n and 0 <= b < n):
                raise MalformedInputError(f"bracket index out of range: ({a}, {b})")
            if a == b:
                raise MalformedInputError(f"bracket [e{a}, e{a}] must not be listed")
            for k, v in coeffs.items():
                if not 0 <= k < n:
                    raise MalformedInputError(f"bracket coefficient index out of range: {k}")
                v = as_rational(v)
                c[a][b][k] += v
                c[b][a][k] -= v
        return cls(name, basis_names, c, form)

    def __repr__(self):
        return f"LieAlgebraModel({self.name!r}, dim={self.dim})"

    # -- derived data ----------------------------------------------------------
    @cached_property
    def space(self) -> QuadraticSpace:
        return QuadraticSpace.of(self.B)

    @property
    def B_inv(self):
        return self.space.inv_gram

    @cached_property
    def f(self) -> tuple:
        """``f[a][b][c] = B(e_a, [e_b, e_c])``."""
        n = self.dim
        return tuple(
            tuple(
                tuple(sum((self.B[a][k] * self.c[b][cc][k] for k in range(n)), Fraction(0)) for cc in range(n))
                for b in range(n)
            )
            for a in range(n)
        )

    @cached_property
    def f_raised(self) -> tuple:
        """``f^{abc}`` with all three indices raised by ``B^{-1}``."""
        n = self.dim
        Bi = self.B_inv
        f = self.f
        step1 = [[[sum((Bi[a][p] * f[p][b][c] for p in range(n)), Fraction(0)) for c in range(n)] for b in range(n)] for a in range(n)]
        step2 = [[[sum((Bi[b][p] * step1[a][p][c] for p in range(n)), Fraction(0)) for c in range(n)] for b in range(n)] for a in range(n)]
        return tuple(
            tuple(tuple(sum((Bi[c][p] * step2[a][b][p] for p in range(n)), Fraction(0)) for c in range(n)) for b in range(n))
            for a in range(n)
        )

    @cached_property
    def f_squared(self) -> Fraction:
        """``f_abc f^abc``."""
        n = self.dim
        return sum(
            (self.f[a][b][c] * self.f_raised[a][b][c] for a in range(n) for b in range(n) for c in range(n)),
            Fraction(0),
        )

    def bracket(self, x: Sequence, y: Sequence) -> list[Fraction]:
        """Bracket of two vectors given by coordinates."""
        n = self.dim
        out = [Fraction(0)] * n
        for a in range(n):
            if not x[a]:
                continue
            for b in range(n):
                if not y[b]:
                    continue
                for k in range(n):
                    if self.c[a][b][k]:
                        out[k] += x[a] * y[b] * self.c[a][b][k]
        return out

    def form(self, x: Sequence, y: Sequence) -> Fraction:
        return sum((x[a] * self.B[a][b] * y[b] for a in range(self.dim) for b in range(self.dim)), Fraction(0))

    def unit(self, a: int) -> list[Fraction]:
        return [Fraction(int(i == a)) for i in range(self.dim)]

    def is_abelian(self) -> bool:
        return not any(v for plane in self.c for row in plane for v in row)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    """Per-axiom status; failing axioms carry a witness index tuple."""

    status: dict[str, bool] = field(default_factory=dict)
    witness: dict[str, tuple | None] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.status.get(a, False) for a in AXIOMS)

    def __bool__(self):
        return self.passed

    def failures(self) -> list[str]:
        return [a for a in AXIOMS if not self.status.get(a, False)]

    def format(self) -> str:
        lines = []
        for a in AXIOMS:
            ok = self.status.get(a, False)
            w = self.witness.get(a)
            lines.append(f"{a:20s} {'pass' if ok else 'FAIL'}" + ("" if ok or w is None else f"  witness={w}"))
        return "\n".join(lines)


def validate(L: LieAlgebraModel) -> ValidationReport:
    """Check the five quadratic-Lie-algebra axioms exactly."""
    n = L.dim
    c, B = L.c, L.B
    rep = ValidationReport()

    def record(axiom, witness):
        rep.status[axiom] = witness is None
        rep.witness[axiom] = witness

    w = None
    for a in range(n):
        for b in range(a, n):
            if any(c[a][b][k] + c[b][a][k] for k in range(n)):
                w = (a, b)
                break
        if w:
            break
    record("antisymmetry", w)

    w = None
    for a in range(n):
        for b in range(n):
            for cc in range(n):
                ea, eb, ec = L.unit(a), L.unit(b), L.unit(cc)
                t1 = L.bracket(ea, L.bracket(eb, ec))
                t2 = L.bracket(eb, L.bracket(ec, ea))
                t3 = L.bracket(ec, L.bracket(ea, eb))
                if any(x + y + z for x, y, z in zip(t1, t2, t3)):
                    w = (a, b, cc)
                    break
            if w:
                break
        if w:
            break
    record("jacobi", w)

    w = next(((a, b) for a in range(n) for b in range(a + 1, n) if B[a][b] != B[b][a]), None)
    record("form_symmetry", w)

    record("form_nondegeneracy", None if n == 0 or mat_det(B) != 0 else ())

    # invariance: B([a,b],c) + B(b,[a,c]) = 0
    w = None
    for a in range(n):
        for b in range(n):
            ab = L.bracket(L.unit(a), L.unit(b))
            for cc in range(n):
                ac = L.bracket(L.unit(a), L.unit(cc))
                if L.form(ab, L.unit(cc)) + L.form(L.unit(b), ac):
                    w = (a, b, cc)
                    break
            if w:
                break
        if w:
            break
    record("form_invariance", w)
    return rep


# ---------------------------------------------------------------------------
# Builtins
# ---------------------------------------------------------------------------


def _abelian(n: int) -> LieAlgebraModel:
    names = [f"x{i}" for i in range(n)]
    zero = [[[0] * n for _ in range(n)] for _ in range(n)]
    eye = [[int(i == j) for j in range(n)] for i in range(n)]
    return LieAlgebraModel(f"abelian{n}", names, zero, eye)


def _so3() -> LieAlgebraModel:
    pairs = {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}}
    eye = [[int(i == j) for j in range(3)] for i in range(3)]
    return LieAlgebraModel.from_pairs("so3", ["e1", "e2", "e3"], eye, pairs)


def _sl2() -> LieAlgebraModel:
    # basis (h, e, f); trace form of the defining representation
    pairs = {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}
    form = [[2, 0, 0], [0, 0, 1], [0, 1, 0]]
    return LieAlgebraModel.from_pairs("sl2", ["h", "e", "f"], form, pairs)


def _double_nonabelian2() -> LieAlgebraModel:
    # s = span(x, y) with [x, y] = y, plus s* = span(x*, y*) under the coadjoint action
    pairs = {(0, 1): {1: 1}, (0, 3): {3: -1}, (1, 3): {2: 1}}
    form = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    return LieAlgebraModel.from_pairs("double_nonabelian2", ["x", "y", "x*", "y*"], form, pairs)


BUILTIN_NAMES = ("abelian(n)", "so3", "sl2", "double_nonabelian2")


def builtin(name: str) -> LieAlgebraModel:
    """Builtin algebras: ``abelian(n)`` (or ``abelianN``), ``so3``, ``sl2``, ``double_nonabelian2``."""
    m = re.fullmatch(r"abelian\(?(\d+)\)?", name)
    if m:
        return _abelian(int(m.group(1)))
    table = {"so3": _so3, "sl2": _sl2, "double_nonabelian2": _double_nonabelian2}
    try:
        return table[name]()
    except KeyError:
        raise UnknownNameError(f"unknown builtin algebra {name!r}") from None


# ---------------------------------------------------------------------------
# Adjoint matrices, lambda and invariants
# ---------------------------------------------------------------------------


def ad_matrix(L: LieAlgebraModel, degree_cap: int | None = None) -> PolyMatrix:
    """``ad_xi`` as an endomorphism matrix, entries linear in ``xi^0..xi^{n-1}``.

    Entry ``[a][b]`` is the ``e_a`` component of ``[xi, e_b]``.
    """
    n = L.dim
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            terms = {}
            for k in range(n):
                v = L.c[k][b][a]
                if v:
                    e = [0] * n
                    e[k] = 1
                    terms[tuple(e)] = v
            row.append(MultiPoly(n, terms, degree_cap))
        rows.append(row)
    return PolyMatrix(rows, n, degree_cap)


def ad_lowered(L: LieAlgebraModel, degree_cap: int | None = None) -> PolyMatrix:
    """Components ``(ad_xi)_ab = B(e_a, [xi, e_b])``."""
    n = L.dim
    B = PolyMatrix(L.B, n, degree_cap)
    return B @ ad_matrix(L, degree_cap)


def ad_at(L: LieAlgebraModel, point: Sequence) -> list[list[Fraction]]:
    """``ad_xi`` as a rational endomorphism matrix at a given ``xi``."""
    return ad_matrix(L).evaluate([as_rational(x) for x in point])


def lambda_g(L: LieAlgebraModel) -> ExtElem:
    """``lambda(xi) = (1/2) (ad_xi)_ab e^a ^ e^b`` with coefficients linear in ``xi``."""
    from .grassmann_clifford import ext_quadratic

    return ext_quadratic(L.space, ad_matrix(L))


def monomials(n: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``d`` in lexicographically descending order."""
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def act_on_polynomial(L: LieAlgebraModel, a: int, p: MultiPoly) -> MultiPoly:
    """The derivation of ``Sg`` extending ``e_b -> [e_a, e_b]``."""
    n = L.dim
    acc = MultiPoly.zero(n, p.degree_cap)
    for b in range(n):
        img = {}
        for k in range(n):
            if L.c[a][b][k]:
                e = [0] * n
                e[k] = 1
                img[tuple(e)] = L.c[a][b][k]
        if img:
            acc = acc + p.partial(b) * MultiPoly(n, img)
    return acc


def invariant_polynomials(L: LieAlgebraModel, degree: int) -> list[MultiPoly]:
    """Basis of ``(S^degree g)^g`` in reduced echelon form over descending-lex monomials."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    n = L.dim
    monos = monomials(n, degree)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for a in range(n):
        images = [act_on_polynomial(L, a, MultiPoly.monomial(m)) for m in monos]
        block = [[Fraction(0)] * len(monos) for _ in monos]
        for j, img in enumerate(images):
            for e, v in img.terms.items():
                block[index[e]][j] = v
        rows.extend(r for r in block if any(r))
    basis = nullspace(rows, len(monos))
    return [MultiPoly(n, {monos[i]: v for i, v in enumerate(vec) if v}) for vec in basis]
