from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwk.errors import RingMismatchError
from qwk.exact_core import MultiPoly
from qwk.lie import act_on_polynomial, builtin, invariant_polynomials
from qwk.pbw_env import (
    UEnvElem,
    adjoint_action,
    duflo_map,
    duflo_multiplicativity_check,
    duflo_operator,
    duflo_series,
    is_central,
    sym_control_witness,
    sym_map,
    u_commutator,
    u_mul,
)
from qwk.weil import casimir_u

from conftest import NONABELIAN

small = st.fractions(min_value=-2, max_value=2, max_denominator=3)


def u_elements(L, max_deg=2, max_terms=3):
    expo = st.lists(st.integers(0, max_deg), min_size=L.dim, max_size=L.dim).map(tuple)
    return st.dictionaries(expo, small, max_size=max_terms).map(lambda t: UEnvElem(L, t))


def brute_sym(L, alpha):
    """Average of the products of all orderings of the letters of ``e^alpha``."""
    letters = [a for a, x in enumerate(alpha) for _ in range(x)]
    acc = UEnvElem(L)
    for perm in permutations(letters):
        w = UEnvElem.scalar(L)
        for a in perm:
            w = w * UEnvElem.generator(L, a)
        acc = acc + w
    return acc.scale(Fraction(1, factorial(len(letters))))


@pytest.mark.parametrize("name", NONABELIAN)
def test_defining_relation(name):
    L = builtin(name)
    for a in range(L.dim):
        for b in range(L.dim):
            ea, eb = UEnvElem.generator(L, a), UEnvElem.generator(L, b)
            assert u_commutator(ea, eb) == UEnvElem(L, {tuple(int(i == k) for i in range(L.dim)): L.c[a][b][k]
                                                         for k in range(L.dim) if L.c[a][b][k]})


@pytest.mark.parametrize("name", NONABELIAN)
def test_pbw_associativity(name):
    L = builtin(name)

    @given(u_elements(L), u_elements(L), u_elements(L))
    def check(x, y, z):
        assert (x * y) * z == x * (y * z)

    check()


@pytest.mark.parametrize("name", NONABELIAN)
def test_sym_matches_word_average(name):
    L = builtin(name)
    n = L.dim
    for alpha in [(2, 1, 0, 0)[:n], (1, 1, 1, 0)[:n], (0, 2, 1, 0)[:n], (1, 0, 1, 1)[:n]]:
        p = MultiPoly(n, {tuple(alpha): 1})
        assert sym_map(L, p) == brute_sym(L, alpha)


@pytest.mark.parametrize("name", NONABELIAN)
def test_sym_is_equivariant(name):
    L = builtin(name)
    n = L.dim
    monos = st.lists(st.integers(0, 2), min_size=n, max_size=n).map(tuple)

    @given(st.dictionaries(monos, small, max_size=3), st.integers(0, n - 1))
    def check(terms, a):
        p = MultiPoly(n, terms)
        assert sym_map(L, act_on_polynomial(L, a, p)) == adjoint_action(L, a, sym_map(L, p))

    check()


@pytest.mark.parametrize("name", NONABELIAN)
def test_top_symbol_is_multiplicative(name):
    L = builtin(name)

    @given(u_elements(L), u_elements(L))
    def check(x, y):
        if not x or not y:
            return
        assert (x * y).top_symbol() == x.top_symbol() * y.top_symbol()
        assert (x * y).filtration_degree() == x.filtration_degree() + y.filtration_degree()

    check()


def test_sym_top_symbol_is_identity(so3):
    p = MultiPoly(3, {(2, 1, 0): 3, (0, 1, 2): -1})
    assert sym_map(so3, p).top_symbol() == p


def test_duflo_series_so3():
    L = builtin("so3")
    x = [MultiPoly.variable(i, 3) for i in range(3)]
    r2 = x[0] ** 2 + x[1] ** 2 + x[2] ** 2
    # sinh(|xi|/2)/(|xi|/2) with the Euclidean norm: 1 + r2/24 of j, and J^(1/2) = j(|xi|) for so3
    assert duflo_series(L, 4) == 1 - r2 / 24 + r2 * r2 / 1920


def test_duflo_operator_so3_casimir():
    L = builtin("so3")
    (c,) = invariant_polynomials(L, 2)
    assert duflo_operator(L, c) == c - MultiPoly.constant(Fraction(1, 4), 3)


def test_duflo_operator_sl2_casimir():
    # Killing form 8 xi0^2 + 8 xi1 xi2, so J^(1/2) = 1 + (xi0^2 + xi1 xi2)/6 + ...; acting on x0^2 + 4 x1 x2 adds 1
    L = builtin("sl2")
    (c,) = invariant_polynomials(L, 2)
    assert duflo_operator(L, c) == c + 1


@pytest.mark.parametrize("name", NONABELIAN)
def test_casimir_central(name):
    L = builtin(name)
    assert is_central(casimir_u(L))
    assert not is_central(UEnvElem.generator(L, 0))


@pytest.mark.parametrize("name", ["so3", "sl2"])
def test_duflo_images_central(name):
    L = builtin(name)
    for d in (2, 4):
        for p in invariant_polynomials(L, d):
            assert is_central(duflo_map(L, p))
            assert is_central(sym_map(L, p))


@pytest.mark.parametrize("name", ["so3", "sl2"])
def test_duflo_multiplicative(name):
    res = duflo_multiplicativity_check(builtin(name), 4)
    assert res.passed, res.witness


def test_abelian_sym_multiplicative():
    # in the abelian case sym is an algebra isomorphism, so the control cannot fail
    res = duflo_multiplicativity_check(builtin("abelian(3)"), 4, use_duflo=False)
    assert res.passed


@pytest.mark.parametrize("name", NONABELIAN)
def test_sym_control_fails(name):
    degree, res = sym_control_witness(builtin(name))
    assert not res.passed and degree == 4


def test_so3_casimir_square():
    L = builtin("so3")
    (c,) = invariant_polynomials(L, 2)
    dc = duflo_map(L, c)
    assert dc == casimir_u(L) - UEnvElem.scalar(L, Fraction(1, 4))
    assert u_mul(dc, dc) == duflo_map(L, c * c)
    assert sym_map(L, c) * sym_map(L, c) != sym_map(L, c * c)


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        UEnvElem.scalar(builtin("so3")) * UEnvElem.scalar(builtin("sl2"))
