from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwk.errors import RingMismatchError
from qwk.exact_core import MultiPoly
from qwk.grassmann_clifford import RIGHT
from qwk.lie import builtin, lambda_g
from qwk.dynamical_forms import (
    CLIFFORD,
    EXTERIOR,
    FormElem,
    cdybe_check,
    ce_on_mask,
    closedness_check,
    eq2_check,
    eq2_sides,
    form_one,
    from_first_factor,
    linear_term,
    mixed_differential,
    mixed_mul,
    quantize_first,
    r_matrix,
    symbol_first,
)

from conftest import BUILTINS, NONABELIAN

small = st.fractions(min_value=-2, max_value=2, max_denominator=3)


def polys(n):
    monos = st.lists(st.integers(0, 2), min_size=n, max_size=n).map(tuple)
    return st.dictionaries(monos, small, max_size=3).map(lambda t: MultiPoly(n, t))


def forms(L, kind, max_terms=3):
    n = L.dim
    key = st.tuples(st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1))
    return st.dictionaries(key, polys(n), max_size=max_terms).map(lambda t: FormElem(L.space, kind, t))


# -- algebra --------------------------------------------------------------------


@pytest.mark.parametrize("kind", [EXTERIOR, CLIFFORD])
def test_mixed_product_associative(kind):
    L = builtin("sl2")

    @given(forms(L, kind), forms(L, kind), forms(L, kind))
    def check(x, y, z):
        assert mixed_mul(mixed_mul(x, y), z) == mixed_mul(x, mixed_mul(y, z))

    check()


def test_koszul_sign(so3):
    # (e0 (x) dxi^1)(e1 (x) 1) = -(e0 e1 (x) dxi^1)
    x = FormElem(so3.space, EXTERIOR, {(0b001, 0b010): 1})
    y = FormElem(so3.space, EXTERIOR, {(0b010, 0): 1})
    assert x * y == FormElem(so3.space, EXTERIOR, {(0b011, 0b010): -1})


def test_kind_mismatch(so3):
    with pytest.raises(RingMismatchError):
        form_one(so3.space, EXTERIOR) * form_one(so3.space, CLIFFORD)
    with pytest.raises(RingMismatchError):
        mixed_differential(so3, "ce", form_one(so3.space, CLIFFORD))


def test_quantize_symbol_first_round_trip(sl2):
    @given(forms(sl2, EXTERIOR))
    def check(x):
        assert symbol_first(sl2, quantize_first(sl2, x)) == x

    check()


def test_truncate(so3):
    x = FormElem(so3.space, EXTERIOR, {(0, 0): MultiPoly(3, {(0, 0, 0): 1, (2, 1, 0): 5})})
    assert x.truncate(2) == form_one(so3.space, EXTERIOR)


# -- differentials --------------------------------------------------------------


@pytest.mark.parametrize("name", NONABELIAN)
def test_ce_squares_to_zero(name):
    L = builtin(name)
    for mask in range(1 << L.dim):
        x = FormElem(L.space, EXTERIOR, {(mask, 0): 1})
        assert not mixed_differential(L, "ce", mixed_differential(L, "ce", x))


def test_ce_on_generator_so3(so3):
    # d_CE e_0 = -1/2 f_0pq e^p e^q = -e1 ^ e2
    assert ce_on_mask(so3, 0b001) == {0b110: -1}


@pytest.mark.parametrize("name", NONABELIAN)
@pytest.mark.parametrize("kind", [EXTERIOR, CLIFFORD])
def test_total_differential_squares_to_zero(name, kind):
    L = builtin(name)

    @given(forms(L, kind))
    def check(x):
        assert not mixed_differential(L, "total", mixed_differential(L, "total", x))

    check()


def test_rham_is_exterior_derivative(so3):
    # d(xi0^2 xi1) = 2 xi0 xi1 dxi0 + xi0^2 dxi1
    x = FormElem(so3.space, EXTERIOR, {(0, 0): MultiPoly(3, {(2, 1, 0): 1})})
    expected = FormElem(so3.space, EXTERIOR, {(0, 0b001): MultiPoly(3, {(1, 1, 0): 2}), (0, 0b010): MultiPoly(3, {(2, 0, 0): 1})})
    assert mixed_differential(so3, "rham", x) == expected


def test_clifford_differential_grades_to_ce(sl2):
    # the top-degree part of the Clifford differential agrees with d_CE on the symbol
    for mask in range(8):
        x = quantize_first(sl2, FormElem(sl2.space, EXTERIOR, {(mask, 0): 1}))
        dcl = symbol_first(sl2, mixed_differential(sl2, "clifford", x))
        dce = mixed_differential(sl2, "ce", FormElem(sl2.space, EXTERIOR, {(mask, 0): 1}))
        top = bin(mask).count("1") + 1
        assert FormElem(sl2.space, EXTERIOR, {k: v for k, v in dcl.terms.items() if bin(k[0]).count("1") == top}) == dce


@pytest.mark.parametrize("name", BUILTINS)
def test_closedness(name):
    res = closedness_check(builtin(name))
    assert res.passed, res.witness


def test_linear_term_alone_is_not_closed(so3):
    assert mixed_differential(so3, "total", linear_term(so3, EXTERIOR))
    assert mixed_differential(so3, "total", from_first_factor(so3, lambda_g(so3), EXTERIOR))


# -- mixed exponential identity -------------------------------------------------


@pytest.mark.parametrize("name", ["so3", "sl2", "abelian(2)"])
def test_eq2(name):
    res = eq2_check(builtin(name), 3, 3)
    assert res.passed, res.witness


def test_eq2_order_one_is_quantization(sl2):
    # at t^1 the identity says q(lambda) - e_a dxi^a is the quantization of its symbol
    lhs, rhs = eq2_sides(sl2, 2, 1)
    assert lhs[0] == rhs[0] == form_one(sl2.space, CLIFFORD, 2)
    assert lhs[1] == rhs[1]


def test_eq2_right_convention_fails(so3):
    assert not eq2_check(so3, 3, 4, convention=RIGHT).passed


# -- dynamical r-matrix and CDYBE -----------------------------------------------


@pytest.mark.parametrize("name", NONABELIAN)
def test_r_matrix_skew_and_odd(name):
    L = builtin(name)
    r = r_matrix(L, 5)
    for a in range(L.dim):
        for b in range(L.dim):
            assert r[a, b] == -r[b, a]
            assert all(sum(e) % 2 == 1 for e in r[a, b].terms)


@pytest.mark.parametrize("name", NONABELIAN)
def test_r_matrix_linear_term(name):
    L = builtin(name)
    n = L.dim
    r = r_matrix(L, 1)
    for a in range(n):
        for b in range(n):
            expected = MultiPoly(n, {tuple(int(i == k) for i in range(n)): -L.f[a][b][k] / 12 for k in range(n) if L.f[a][b][k]})
            assert r[a, b].homogeneous(1) == expected


def test_r_matrix_cubic_term_so3(so3):
    # f has z^3 coefficient -1/720; (ad^3) lowered on so3 gives the cubic part
    r = r_matrix(so3, 3)
    assert r[0, 1].homogeneous(3)
    x = [MultiPoly.variable(i, 3) for i in range(3)]
    # ad_xi^3 = -|xi|^2 ad_xi for so3, so r_01 cubic = (-1/720)(-|xi|^2)(-xi2)
    r2 = x[0] ** 2 + x[1] ** 2 + x[2] ** 2
    assert r[0, 1].homogeneous(3) == r2 * x[2] * Fraction(-1, 720)


@pytest.mark.parametrize("name", NONABELIAN)
def test_cdybe(name):
    L = builtin(name)
    res = cdybe_check(L, 4)
    assert res.passed, res.witness
    n = L.dim
    expected = {f"{a},{b},{c}": str(-L.f[a][b][c] / 4) for a in range(n) for b in range(n) for c in range(n) if L.f[a][b][c]}
    assert res.details["degree0_slice"] == expected


@pytest.mark.parametrize("name", NONABELIAN)
def test_cdybe_double_r_fails_at_degree_zero(name):
    L = builtin(name)
    res = cdybe_check(L, 3, scale=2)
    assert not res.passed and sum(res.witness["monomial"]) == 0


def test_cdybe_opposite_quadratic_sign_fails(so3):
    res = cdybe_check(so3, 3, quadratic_sign=-1)
    assert not res.passed
    assert sum(res.witness["monomial"]) == 2 and res.witness["defect"] == "-1/72"


def test_cdybe_abelian_trivial():
    assert cdybe_check(builtin("abelian(3)"), 4).passed
