"""The ten acceptance criteria, each with its runtime budget.

Every test records a one-line verdict; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""
import time
from contextlib import contextmanager
from fractions import Fraction

from qwk.checks import expo_matrices
from qwk.dynamical_forms import cdybe_check, closedness_check, eq2_check
from qwk.exact_core import MultiPoly, series_identity_check, series_of
from qwk.grassmann_clifford import RIGHT, expo_identity_check
from qwk.lie import builtin, invariant_polynomials
from qwk.pbw_env import duflo_map, duflo_multiplicativity_check, duflo_operator, sym_control_witness, u_mul
from qwk.weil import cartan_relations_check, chain_map_check, cubic_square_check, dirac_square_check

RESULTS: dict[int, str] = {}
ALL = ["abelian(1)", "abelian(2)", "abelian(3)", "abelian(4)", "so3", "sl2", "double_nonabelian2"]


@contextmanager
def criterion(number: int, title: str, budget_s: float):
    start = time.perf_counter()
    state = {"ok": False, "note": ""}
    try:
        yield state
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < budget_s
        ok = state["ok"] and within
        note = state["note"] or ("" if within else f"over budget {budget_s}s")
        RESULTS[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f}s / {budget_s:g}s){'  ' + note if note else ''}"
        print(RESULTS[number])
    assert within, f"criterion {number} took {elapsed:.2f}s (budget {budget_s}s)"


def test_criterion_01_cubic_constant():
    with criterion(1, "cubic element squares to -(1/48) f_abc f^abc", 4 * 1.0) as st:
        for name in ["abelian(3)", "so3", "sl2", "double_nonabelian2"]:
            t = time.perf_counter()
            res = cubic_square_check(builtin(name))
            assert res.passed, (name, res.witness)
            assert time.perf_counter() - t < 1.0
        assert cubic_square_check(builtin("so3")).details["value"] == "-1/8"
        st["ok"] = True


def test_criterion_02_dirac_square_and_centrality():
    with criterion(2, "Dirac square formula and centrality", 5.0) as st:
        for name in ALL:
            res = dirac_square_check(builtin(name))
            assert res.passed, (name, res.witness)
        st["ok"] = True


def test_criterion_03_exponential_identity():
    with criterion(3, "exponential identity, t-order 5, 6 matrices per algebra", 30.0) as st:
        count = 0
        for name in ALL:
            L = builtin(name)
            assert L.dim <= 4
            for label, A in expo_matrices(L):
                res = expo_identity_check(L.space, A, 5)
                assert res.passed, (name, label, res.witness)
                count += 1
        assert count == 6 * len(ALL)
        st["ok"] = True


def test_criterion_04_closedness():
    with criterion(4, "closedness of both mixed elements", 1.0 * len(ALL)) as st:
        for name in ALL:
            t = time.perf_counter()
            res = closedness_check(builtin(name))
            assert res.passed, (name, res.witness)
            assert time.perf_counter() - t < 1.0
        st["ok"] = True


def test_criterion_05_mixed_identity():
    with criterion(5, "mixed identity in Cl(g) x Omega(g), degree 3, t-order 4", 60.0) as st:
        for name in ["so3", "sl2"]:
            res = eq2_check(builtin(name), 3, 4)
            assert res.passed, (name, res.witness)
        st["ok"] = True


def test_criterion_06_cdybe():
    with criterion(6, "CDYBE to degree 5 with -f/4 slice and 2r control", 30.0) as st:
        for name in ["so3", "sl2", "double_nonabelian2"]:
            L = builtin(name)
            res = cdybe_check(L, 5)
            assert res.passed, (name, res.witness)
            n = L.dim
            for a in range(n):
                for b in range(n):
                    for c in range(n):
                        expected = -L.f[a][b][c] / 4
                        got = res.details["degree0_slice"].get(f"{a},{b},{c}", "0")
                        assert got == str(expected), (name, a, b, c)
            control = cdybe_check(L, 5, scale=2)
            assert not control.passed and control.witness
        st["ok"] = True


def test_criterion_07_chain_map():
    with criterion(7, "Q intertwines d, iota, L (so3 deg 6, sl2 deg 4) + flipped control", 300.0) as st:
        assert chain_map_check(builtin("so3"), 6).passed
        assert chain_map_check(builtin("sl2"), 4).passed
        control = chain_map_check(builtin("so3"), 6, convention=RIGHT)
        assert not control.passed
        assert control.witness["degree"] <= 3
        st["ok"] = True
        st["note"] = f"control witness {control.witness['element']} under {control.witness['operator']}"


def test_criterion_08_duflo():
    with criterion(8, "Duflo multiplicativity on invariants, bare sym fails", 120.0) as st:
        for name in ["so3", "sl2"]:
            res = duflo_multiplicativity_check(builtin(name), 4)
            assert res.passed, (name, res.witness)
        L = builtin("so3")
        (c,) = invariant_polynomials(L, 2)
        assert c == MultiPoly(3, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
        assert duflo_operator(L, c) == c - MultiPoly.constant(Fraction(1, 4), 3)
        dc = duflo_map(L, c)
        assert u_mul(dc, dc) == duflo_map(L, c * c)
        degree, control = sym_control_witness(L)
        assert not control.passed and degree <= 6
        st["ok"] = True


def test_criterion_09_cartan_relations():
    with criterion(9, "Cartan relations in Wg and Ug x Cl(g), degree 5", 120.0) as st:
        for name in ["so3", "sl2"]:
            for side in ("W", "QW"):
                res = cartan_relations_check(builtin(name), 5, side)
                assert res.passed, (name, side, res.witness)
        st["ok"] = True


def test_criterion_10_series():
    with criterion(10, "f = (ln j)' and parity to order 12", 1.0) as st:
        assert series_identity_check(12).passed
        f = series_of("f", 12)
        assert f[1] * 12 == 1 and f[3] * -720 == 1 and f[5] * 30240 == 1
        st["ok"] = True


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
