"""Registry of named identity checks with their default caps.

Each entry maps a check id to a runner ``(L, params, gda) -> CheckResult`` and
the parameters it accepts.  Default caps: t-order 4, xi-degree 4, Weil degree 6
(the polynomial degree for ``duflo`` and ``basic-mult`` defaults to 4).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .dynamical_forms import cdybe_check, closedness_check, eq2_check
from .exact_core import mat_mul, series_identity_check
from .grassmann_clifford import expo_identity_check
from .lie import LieAlgebraModel, ad_at
from .pbw_env import duflo_multiplicativity_check
from .results import CheckResult
from .weil import (
    basic_multiplicativity_check,
    cartan_relations_check,
    chain_map_check,
    cubic_square_check,
    dirac_square_check,
)

DEFAULT_T_ORDER = 4
DEFAULT_DEGREE = 4
DEFAULT_WEIL_DEGREE = 6
DEFAULT_POLY_DEGREE = 4
EXPO_SEED = 20240611


@dataclass(frozen=True)
class CheckDef:
    id: str
    run: Callable
    params: tuple  # accepted parameter names
    defaults: dict
    extended: bool = False


def expo_points(n: int) -> list[list[Fraction]]:
    """Three fixed rational evaluation points for ``ad``."""
    base = [
        [Fraction(1)] + [Fraction(0)] * max(n - 1, 0),
        [Fraction(k + 1) for k in range(n)],
        [Fraction((-1) ** k * (k + 1), k + 2) for k in range(n)],
    ]
    return [p[:n] for p in base]


def random_skew(L: LieAlgebraModel, rng: random.Random) -> list[list[Fraction]]:
    """A B-skew matrix ``B^{-1} S`` with ``S`` antisymmetric and small rational entries."""
    n = L.dim
    S = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            v = Fraction(rng.randint(-3, 3), rng.choice((1, 2, 3)))
            S[a][b], S[b][a] = v, -v
    return mat_mul(L.B_inv, S)


def expo_matrices(L: LieAlgebraModel, seed: int = EXPO_SEED) -> list[tuple[str, list]]:
    rng = random.Random(seed)
    out = [(f"ad at {[str(x) for x in p]}", ad_at(L, p)) for p in expo_points(L.dim)]
    out += [(f"random skew #{i}", random_skew(L, rng)) for i in range(3)]
    return out


def run_expo(L, params, gda=None) -> CheckResult:
    t = params["t_order"]
    for label, A in expo_matrices(L):
        res = expo_identity_check(L.space, A, t)
        if not res.passed:
            return CheckResult.fail({"matrix": label, **res.witness})
    return CheckResult.ok(matrices=6, t_order=t)


def run_cdybe(L, params, gda=None) -> CheckResult:
    res = cdybe_check(L, params["degree"])
    control = cdybe_check(L, params["degree"], scale=2)
    res.details["control_2r_fails"] = not control.passed
    if res.passed and control.passed and not L.is_abelian():
        return CheckResult.fail({"reason": "negative control 2r passed"}, **res.details)
    return res


def run_chain_map(L, params, gda=None) -> CheckResult:
    return chain_map_check(L, params["max_degree"])


def run_duflo(L, params, gda=None) -> CheckResult:
    return duflo_multiplicativity_check(L, params["max_degree"])


def run_basic_mult(L, params, gda=None) -> CheckResult:
    return basic_multiplicativity_check(L, params["max_degree"])


def run_cartan(side):
    def run(L, params, gda=None):
        return cartan_relations_check(L, params["max_degree"], side)
    return run


def run_series(L, params, gda=None) -> CheckResult:
    return series_identity_check(params["order"])


def run_gda_cartan(L, params, gda=None) -> CheckResult:
    from .gda import gda_cartan_check

    if gda is None:
        return CheckResult.ok(skipped="no finite_gda block")
    return gda_cartan_check(L, gda)


def run_gda_chain(L, params, gda=None) -> CheckResult:
    from .gda import gda_cartan_check, tensor_basic_cohomology, tensor_chain_map_check

    if gda is None:
        return CheckResult.ok(skipped="no finite_gda block")
    if not gda_cartan_check(L, gda).passed:
        return CheckResult.fail({"reason": "finite_gda violates the Cartan relations"})
    res = tensor_chain_map_check(L, gda, params["max_degree"])
    if res.passed:
        dims = tensor_basic_cohomology(L, gda, params["max_degree"])
        res.details["basic_cohomology"] = {str(k): v for k, v in dims.items()}
    return res


REGISTRY: dict[str, CheckDef] = {
    c.id: c
    for c in [
        CheckDef("cubic", lambda L, p, g=None: cubic_square_check(L), (), {}),
        CheckDef("dirac", lambda L, p, g=None: dirac_square_check(L), (), {}),
        CheckDef("expo", run_expo, ("t_order",), {"t_order": DEFAULT_T_ORDER}),
        CheckDef("closedness", lambda L, p, g=None: closedness_check(L), (), {}),
        CheckDef("eq2", lambda L, p, g=None: eq2_check(L, p["degree"], p["t_order"]), ("degree", "t_order"),
                  {"degree": DEFAULT_DEGREE, "t_order": DEFAULT_T_ORDER}),
        CheckDef("cdybe", run_cdybe, ("degree",), {"degree": DEFAULT_DEGREE}),
        CheckDef("chain-map", run_chain_map, ("max_degree",), {"max_degree": DEFAULT_WEIL_DEGREE}),
        CheckDef("duflo", run_duflo, ("max_degree",), {"max_degree": DEFAULT_POLY_DEGREE}),
        CheckDef("basic-mult", run_basic_mult, ("max_degree",), {"max_degree": DEFAULT_POLY_DEGREE}),
        CheckDef("cartan-W", run_cartan("W"), ("max_degree",), {"max_degree": 5}, extended=True),
        CheckDef("cartan-QW", run_cartan("QW"), ("max_degree",), {"max_degree": 5}, extended=True),
        CheckDef("series", run_series, ("order",), {"order": 12}, extended=True),
        CheckDef("gda-cartan", run_gda_cartan, (), {}, extended=True),
        CheckDef("gda-basic", run_gda_chain, ("max_degree",), {"max_degree": 4}, extended=True),
    ]
}

CORE_IDS = tuple(k for k, v in REGISTRY.items() if not v.extended)


def resolve_params(check_id: str, overrides: dict) -> dict:
    entry = REGISTRY[check_id]
    params = dict(entry.defaults)
    for k, v in overrides.items():
        if v is not None and k in entry.params:
            params[k] = v
    return params


def run_check(check_id: str, L: LieAlgebraModel, overrides: dict | None = None, gda=None) -> tuple[dict, CheckResult]:
    params = resolve_params(check_id, overrides or {})
    return params, REGISTRY[check_id].run(L, params, gda)
