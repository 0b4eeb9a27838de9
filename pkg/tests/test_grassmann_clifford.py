from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwk.errors import RingMismatchError, SkewnessError
from qwk.exact_core import PolyMatrix, mat_mul, permutation_sign
from qwk.grassmann_clifford import (
    LEFT,
    RIGHT,
    ClElem,
    ExtElem,
    QuadraticSpace,
    berezin,
    bits,
    cl_mul,
    cl_quadratic,
    contract,
    contract_apply,
    expo_identity_check,
    ext_exp,
    ext_quadratic,
    graded_commutator,
    quantize,
    s_function,
    symbol,
)
from qwk.lie import ad_at, ad_matrix, builtin

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)
GRAMS = {
    "euclid3": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "sl2": [[2, 0, 0], [0, 0, 1], [0, 1, 0]],
    "split4": [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
    "mixed3": [[2, 1, 0], [1, 3, 0], [0, 0, -1]],
}


def space(name):
    return QuadraticSpace.of(GRAMS[name])


def elements(cls, sp, max_terms=4):
    return st.dictionaries(st.integers(0, (1 << sp.n) - 1), rationals, max_size=max_terms).map(lambda t: cls(sp, t))


def brute_quantize(sp, mask):
    """Total antisymmetrization with explicit Clifford products of generators."""
    idx = bits(mask)
    k = len(idx)
    acc = ClElem(sp)
    for perm in permutations(range(k)):
        term = ClElem.scalar(sp)
        for p in perm:
            term = cl_mul(term, ClElem.generator(sp, idx[p]))
        acc = acc + term.scale(permutation_sign(perm))
    return acc.scale(Fraction(1, factorial(k)))


def test_bits():
    assert bits(0b1011) == [0, 1, 3]


def test_space_interning():
    assert QuadraticSpace.of(GRAMS["sl2"]) is QuadraticSpace.of([[Fraction(2), 0, 0], [0, 0, 1], [0, 1, 0]])


@pytest.mark.parametrize("name", GRAMS)
def test_clifford_relation(name):
    sp = space(name)
    for a in range(sp.n):
        for b in range(sp.n):
            ea, eb = ClElem.generator(sp, a), ClElem.generator(sp, b)
            assert ea * eb + eb * ea == ClElem.scalar(sp, sp.gram[a][b])


@pytest.mark.parametrize("name", GRAMS)
def test_quantize_matches_antisymmetrization(name):
    sp = space(name)
    for mask in range(1 << sp.n):
        assert quantize(ExtElem.basis(sp, mask)) == brute_quantize(sp, mask)


def test_quantize_degree_two():
    sp = space("mixed3")
    x = quantize(ExtElem.basis(sp, 0b011))
    assert x == ClElem.basis(sp, 0b011) - ClElem.scalar(sp, Fraction(1, 2))


@pytest.mark.parametrize("name", ["sl2", "mixed3", "split4"])
def test_associativity(name):
    sp = space(name)

    @given(elements(ClElem, sp), elements(ClElem, sp), elements(ClElem, sp),
           elements(ExtElem, sp), elements(ExtElem, sp), elements(ExtElem, sp))
    def check(a, b, c, x, y, z):
        assert (a * b) * c == a * (b * c)
        assert (x * y) * z == x * (y * z)

    check()


@pytest.mark.parametrize("name", GRAMS)
def test_symbol_inverts_quantize(name):
    sp = space(name)

    @given(elements(ExtElem, sp, 6))
    def check(x):
        assert symbol(quantize(x)) == x
        assert quantize(symbol(quantize(x))) == quantize(x)

    check()


def test_exterior_graded_commutativity():
    sp = space("split4")

    @given(elements(ExtElem, sp), elements(ExtElem, sp))
    def check(x, y):
        for p in (0, 1):
            for q in (0, 1):
                xp = ExtElem(sp, {m: c for m, c in x.terms.items() if bin(m).count("1") % 2 == p})
                yq = ExtElem(sp, {m: c for m, c in y.terms.items() if bin(m).count("1") % 2 == q})
                assert xp * yq == (yq * xp).scale(-1 if p and q else 1)

    check()


def test_contraction_on_vectors():
    sp = space("mixed3")
    for a in range(3):
        for b in range(3):
            assert contract_apply(ExtElem.generator(sp, a), ExtElem.generator(sp, b)) == ExtElem.scalar(sp, sp.gram[a][b])


@pytest.mark.parametrize("name", ["mixed3", "split4"])
def test_contraction_is_odd_derivation(name):
    sp = space(name)

    @given(st.integers(0, sp.n - 1), elements(ExtElem, sp), elements(ExtElem, sp))
    def check(a, x, y):
        iv = contract(ExtElem.generator(sp, a))
        for p in (0, 1):
            xp = ExtElem(sp, {m: c for m, c in x.terms.items() if bin(m).count("1") % 2 == p})
            assert iv(xp * y) == iv(xp) * y + (xp * iv(y)).scale(-1 if p else 1)

    check()


def test_left_convention_composition():
    sp = space("mixed3")

    @given(elements(ExtElem, sp), elements(ExtElem, sp), elements(ExtElem, sp))
    def check(x, y, w):
        assert contract(x * y, LEFT)(w) == contract(x, LEFT)(contract(y, LEFT)(w))
        assert contract(x * y, RIGHT)(w) == contract(y, RIGHT)(contract(x, RIGHT)(w))

    check()


def test_contraction_pairing_so3():
    sp = builtin("so3").space
    e12 = ExtElem.basis(sp, 0b011)
    assert contract_apply(e12, e12, LEFT) == ExtElem.scalar(sp, -1)
    assert contract_apply(e12, e12, RIGHT) == ExtElem.scalar(sp, 1)


def test_berezin():
    sp = space("euclid3")
    x = ExtElem(sp, {0b111: Fraction(5, 2), 0b001: 1})
    assert berezin(x) == Fraction(5, 2)
    assert berezin(ExtElem.scalar(sp, 3)) == 0


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        ExtElem.scalar(space("euclid3")) * ExtElem.scalar(space("mixed3"))


def skew_matrix(sp, entries):
    n = sp.n
    S = [[Fraction(0)] * n for _ in range(n)]
    it = iter(entries)
    for a in range(n):
        for b in range(a + 1, n):
            v = next(it)
            S[a][b], S[b][a] = v, -v
    return mat_mul(sp.inv_gram, S)


@pytest.mark.parametrize("name", GRAMS)
def test_quadratic_element_acts_by_commutator(name):
    # [q(lambda(A)), v] = A v for a B-skew A: the quadratic element generates A inside Cl(V)
    sp = space(name)
    n = sp.n
    A = skew_matrix(sp, [Fraction(k + 1, 2) * (-1) ** k for k in range(n * (n - 1) // 2)])
    X = cl_quadratic(sp, A)
    assert X == quantize(ext_quadratic(sp, A))
    for b in range(n):
        v = ClElem.generator(sp, b)
        Av = ClElem.vector(sp, [A[a][b] for a in range(n)])
        assert X * v - v * X == Av


def test_skewness_error():
    sp = space("euclid3")
    bad = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
    with pytest.raises(SkewnessError):
        expo_identity_check(sp, bad, 2)
    with pytest.raises(SkewnessError):
        s_function(sp, PolyMatrix(bad, 0, None), 2)


def test_ext_exp_nilpotent():
    sp = space("split4")
    x = ExtElem.basis(sp, 0b0011) + ExtElem.basis(sp, 0b1100)
    assert ext_exp(x) == ExtElem.scalar(sp) + x + ExtElem.basis(sp, 0b1111).scale(1)


def test_s_function_abelian_is_one():
    L = builtin("abelian(3)")
    S = s_function(L.space, ad_matrix(L, 3), 3)
    assert S.element == ExtElem.scalar(L.space, S.element.terms[0])
    assert S.element.terms[0] == 1


def test_s_function_so3_low_orders():
    L = builtin("so3")
    parts = s_function(L.space, ad_matrix(L, 2), 2).graded_by_degree()
    assert parts[0] == ExtElem.scalar(L.space)
    # degree 1: f(ad) ~ ad/12 so the exterior factor is (1/24)(ad)_ab e^a e^b
    assert parts[1] == ext_quadratic(L.space, ad_matrix(L)).map_coeffs(lambda p: p / 12)


@pytest.mark.parametrize("name", ["abelian(2)", "so3", "sl2", "double_nonabelian2"])
def test_expo_identity_at_points(name):
    L = builtin(name)
    for point in ([1] + [0] * (L.dim - 1), [Fraction(k + 1, 2) for k in range(L.dim)]):
        res = expo_identity_check(L.space, ad_at(L, point), 5)
        assert res.passed, res.witness


@given(st.lists(rationals, min_size=6, max_size=6))
def test_expo_identity_random_skew(entries):
    sp = space("split4")
    assert expo_identity_check(sp, skew_matrix(sp, entries), 4).passed


def test_expo_identity_right_convention_fails():
    L = builtin("so3")
    res = expo_identity_check(L.space, ad_at(L, [1, 2, 3]), 4, convention=RIGHT)
    assert not res.passed and res.witness["t_order"] == 2


def test_expo_order_one_is_quantization():
    # at t-order 1 the identity reads X = q(lambda + iota(S_1) 1) with S_1 scalar-free
    L = builtin("sl2")
    A = ad_at(L, [1, 1, 2])
    assert cl_quadratic(L.space, A) == quantize(ext_quadratic(L.space, A))


def test_graded_commutator_parity():
    sp = space("euclid3")
    a, b = ClElem.generator(sp, 0), ClElem.generator(sp, 1)
    assert graded_commutator(a, b) == a * b + b * a == ClElem(sp)
    assert graded_commutator(a, a) == ClElem.scalar(sp, 1)
