from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwk.errors import MalformedInputError, UnknownNameError
from qwk.exact_core import MultiPoly, mat_det
from qwk.grassmann_clifford import berezin
from qwk.lie import (
    LieAlgebraModel,
    act_on_polynomial,
    ad_at,
    ad_lowered,
    ad_matrix,
    builtin,
    invariant_polynomials,
    lambda_g,
    monomials,
    validate,
)

from conftest import BUILTINS


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_validate(name):
    rep = validate(builtin(name))
    assert rep.passed, rep.format()


def test_builtin_aliases():
    assert builtin("abelian3").dim == builtin("abelian(3)").dim == 3
    with pytest.raises(UnknownNameError):
        builtin("so4")


def test_structure_constant_values():
    assert builtin("so3").f_squared == 6
    assert builtin("sl2").f_squared == -12
    assert builtin("double_nonabelian2").f_squared == 0
    assert mat_det(builtin("sl2").B) == -2


def test_so3_f_is_epsilon():
    f = builtin("so3").f
    assert f[0][1][2] == 1 and f[1][0][2] == -1 and f[2][0][1] == 1 and f[0][0][1] == 0


def test_f_totally_antisymmetric(any_algebra):
    L = any_algebra
    n = L.dim
    for a in range(n):
        for b in range(n):
            for c in range(n):
                v = L.f[a][b][c]
                assert L.f[b][a][c] == -v and L.f[a][c][b] == -v and L.f[b][c][a] == v


def test_broken_jacobi_witness():
    # [e0,e1] = e1, [e0,e2] = e1, [e1,e2] = e0 violates Jacobi
    L = LieAlgebraModel.from_pairs("bad", ["a", "b", "c"], [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                                   {(0, 1): {1: 1}, (0, 2): {1: 1}, (1, 2): {0: 1}})
    rep = validate(L)
    assert not rep.status["jacobi"]
    assert rep.witness["jacobi"] is not None and len(rep.witness["jacobi"]) == 3


def test_degenerate_form_fails():
    L = LieAlgebraModel("z", ["a", "b"], [[[0, 0], [0, 0]], [[0, 0], [0, 0]]], [[1, 1], [1, 1]])
    rep = validate(L)
    assert not rep.status["form_nondegeneracy"] and rep.status["form_symmetry"]


def test_non_invariant_form_witness():
    # so3 brackets with a non-invariant form; B([e0,e1],e2) + B(e1,[e0,e2]) = 1 - 2, first failing triple (0, 1, 2)
    L = LieAlgebraModel.from_pairs("x", ["a", "b", "c"], [[1, 0, 0], [0, 2, 0], [0, 0, 1]],
                                   {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}})
    rep = validate(L)
    assert not rep.status["form_invariance"] and rep.witness["form_invariance"] == (0, 1, 2)


def test_bad_bracket_index():
    with pytest.raises(MalformedInputError):
        LieAlgebraModel.from_pairs("x", ["a"], [[1]], {(0, 3): {0: 1}})


def test_ad_matrix_convention(nonabelian):
    L = nonabelian
    n = L.dim
    A = ad_matrix(L)
    # column b of ad_xi is [xi, e_b]
    for k in range(n):
        M = A.evaluate(L.unit(k))
        for b in range(n):
            assert [M[a][b] for a in range(n)] == L.bracket(L.unit(k), L.unit(b))


def test_ad_lowered_is_minus_f_contracted(nonabelian):
    L = nonabelian
    n = L.dim
    low = ad_lowered(L)
    for a in range(n):
        for b in range(n):
            expected = MultiPoly(n, {tuple(int(i == k) for i in range(n)): -L.f[a][b][k] for k in range(n) if L.f[a][b][k]})
            assert low[a, b] == expected


def test_ad_is_b_skew(any_algebra):
    L = any_algebra
    n = L.dim
    M = ad_at(L, [Fraction(k + 1, 3) for k in range(n)])
    low = [[sum(L.B[a][k] * M[k][b] for k in range(n)) for b in range(n)] for a in range(n)]
    assert all(low[a][b] == -low[b][a] for a in range(n) for b in range(n))


def test_lambda_so3():
    L = builtin("so3")
    lam = lambda_g(L)
    assert lam.degrees() == {2}
    # lambda(xi) = (1/2)(ad_xi)_ab e^a e^b; for so3 the e1^e2 coefficient is -xi^3
    assert lam.coefficient(0b011) == MultiPoly(3, {(0, 0, 1): -1})


def test_monomials_order():
    assert monomials(2, 2) == [(2, 0), (1, 1), (0, 2)]


def test_invariants_so3():
    L = builtin("so3")
    assert invariant_polynomials(L, 1) == []
    (c,) = invariant_polynomials(L, 2)
    assert c == MultiPoly(3, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
    assert invariant_polynomials(L, 3) == []
    assert len(invariant_polynomials(L, 4)) == 1


def test_invariants_sl2():
    (c,) = invariant_polynomials(builtin("sl2"), 2)
    assert c == MultiPoly(3, {(2, 0, 0): 1, (0, 1, 1): 4})


@given(st.integers(0, 4))
def test_invariants_are_annihilated(d):
    for name in ("so3", "sl2", "double_nonabelian2"):
        L = builtin(name)
        for p in invariant_polynomials(L, d):
            assert all(not act_on_polynomial(L, a, p) for a in range(L.dim))


def test_abelian_everything_invariant():
    L = builtin("abelian(2)")
    assert len(invariant_polynomials(L, 3)) == 4


def test_berezin_of_lambda_power_so3():
    # the top coefficient of lambda is zero in odd dimension 3 (lambda has degree 2)
    assert berezin(lambda_g(builtin("so3"))) == 0


def test_antisymmetry_witness():
    # flip c^2_{01} in one slot only; witness is the 0-based pair (0, 1)
    L = builtin("so3")
    c = [[list(row) for row in m] for m in L.c]
    c[0][1][2] = -c[0][1][2]
    rep = validate(LieAlgebraModel("x", ["a", "b", "c"], c, L.B))
    assert not rep.status["antisymmetry"] and rep.witness["antisymmetry"] == (0, 1)
