import copy
from fractions import Fraction

import pytest

from qwk.errors import MalformedInputError
from qwk.gda import (
    FiniteGDA,
    basic_cohomology,
    basic_subspace,
    exterior_gda,
    gda_cartan_check,
    parse_finite_gda,
    serialize_finite_gda,
    tensor_basic_cohomology,
    tensor_chain_map_check,
    trivial_gda,
)
from qwk.lie import builtin, invariant_polynomials

from conftest import NONABELIAN


@pytest.mark.parametrize("name", NONABELIAN + ["abelian(2)"])
@pytest.mark.parametrize("builder", [trivial_gda, exterior_gda])
def test_cartan_relations(name, builder):
    L = builtin(name)
    res = gda_cartan_check(L, builder(L))
    assert res.passed, res.witness


def test_exterior_gda_shape(so3):
    A = exterior_gda(so3)
    assert A.size == 8 and sorted(A.degrees) == [0, 1, 1, 1, 2, 2, 2, 3]


def test_corrupted_d_fails(so3):
    A = exterior_gda(so3)
    d = copy.deepcopy(A.d)
    i, j = next((i, j) for i in range(8) for j in range(8) if d[i][j])
    d[i][j] += 1
    bad = FiniteGDA(A.size, d, A.iota, A.lie, A.degrees)
    res = gda_cartan_check(so3, bad)
    assert not res.passed and res.witness["relation"]


def test_wrong_number_of_matrices(so3):
    A = trivial_gda(builtin("abelian(2)"))
    assert not gda_cartan_check(so3, A).passed


def test_basic_subspace_of_exterior_is_scalars(sl2):
    (v,) = basic_subspace(exterior_gda(sl2))
    assert [i for i, x in enumerate(v) if x] == [0]


def test_basic_cohomology_graded_and_total(so3):
    A = exterior_gda(so3)
    assert basic_cohomology(A) == {0: 1, 1: 0, 2: 0, 3: 0}
    ungraded = FiniteGDA(A.size, A.d, A.iota, A.lie)
    assert basic_cohomology(ungraded) == {"total": 1}


@pytest.mark.parametrize("name", ["so3", "sl2"])
def test_free_action_cohomology(name):
    # Wg (x) /\g: basic cohomology is the ground field in degree 0
    L = builtin(name)
    H = tensor_basic_cohomology(L, exterior_gda(L), 4)
    assert H[0] == 1 and not any(H[k] for k in H if k)


def test_trivial_gda_gives_invariants(so3):
    H = tensor_basic_cohomology(so3, trivial_gda(so3), 5)
    for k, dim in H.items():
        expected = len(invariant_polynomials(so3, k // 2)) if k % 2 == 0 else 0
        assert dim == expected, k


@pytest.mark.parametrize("builder", [trivial_gda, exterior_gda])
def test_tensor_chain_map(so3, builder):
    res = tensor_chain_map_check(so3, builder(so3), 3)
    assert res.passed, res.witness


def test_serialize_round_trip(sl2):
    A = exterior_gda(sl2)
    block = serialize_finite_gda(A)
    assert all(isinstance(x, str) for row in block["d"] for x in row)
    B = parse_finite_gda(block, sl2)
    assert (B.d, B.iota, B.lie, B.degrees, B.size) == (A.d, A.iota, A.lie, A.degrees, A.size)


def test_parse_rejects_missing_field(so3):
    block = serialize_finite_gda(trivial_gda(so3))
    del block["iota"]
    with pytest.raises(MalformedInputError, match="iota"):
        parse_finite_gda(block, so3)


def test_parse_rejects_bad_shape(so3):
    block = serialize_finite_gda(trivial_gda(so3))
    block["d"] = [["0", "0"]]
    with pytest.raises(MalformedInputError):
        parse_finite_gda(block, so3)


def test_degrees_validation():
    z = [[0]]
    with pytest.raises(MalformedInputError):
        FiniteGDA(1, z, [z], [z], degrees=[Fraction(1, 2)])
