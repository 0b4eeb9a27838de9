"""Compare the compiled and pure-Python kernel backends on representative workloads.

Each backend runs in a fresh interpreter (the backend is fixed at import time).

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, random, sys, time
from fractions import Fraction
from qwk import kernels
from qwk.grassmann_clifford import ClElem, ExtElem, QuadraticSpace, cl_mul, ext_mul
from qwk.lie import builtin
from qwk.pbw_env import UEnvElem, u_mul
from qwk.weil import chain_map_check, cartan_relations_check

rng = random.Random(7)
def rand_elem(cls, sp, terms):
    return cls(sp, {rng.randrange(1 << sp.n): Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(terms)})

def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t)
    return best

repeat = int(sys.argv[1])
sp = QuadraticSpace.of(tuple(tuple(Fraction(int(i == j) * (1 + i % 2)) for j in range(8)) for i in range(8)))
xs = [rand_elem(ExtElem, sp, 40) for _ in range(20)]
cs = [rand_elem(ClElem, sp, 40) for _ in range(20)]
L = builtin("sl2")
us = [UEnvElem(L, {(rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3)): rng.randint(1, 9) for _ in range(6)}) for _ in range(8)]

out = {"backend": kernels.BACKEND}
out["ext_mul 8-dim, 20x20 products"] = bench(lambda: [ext_mul(a, b) for a in xs for b in xs], repeat)
out["cl_mul 8-dim, 20x20 products"] = bench(lambda: [cl_mul(a, b) for a in cs for b in cs], repeat)
out["u_mul sl2, 8x8 products"] = bench(lambda: [u_mul(a, b) for a in us for b in us], repeat)
out["chain_map so3 degree 6 (cold)"] = bench(lambda: chain_map_check(builtin("so3"), 6), 1)
out["cartan QW sl2 degree 4 (cold)"] = bench(lambda: cartan_relations_check(builtin("sl2"), 4, "QW"), 1)
print(json.dumps(out))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("QWK_PURE_PYTHON", None)
    if pure:
        env["QWK_PURE_PYTHON"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    if fast["backend"] != "cython":
        print("compiled backend not available; both columns use pure Python")
    print(f"{'workload':36s} {fast['backend']:>10s} {'python':>10s} {'speedup':>8s}")
    for key in fast:
        if key == "backend":
            continue
        a, b = fast[key], slow[key]
        print(f"{key:36s} {a * 1000:9.1f}ms {b * 1000:9.1f}ms {b / a:7.2f}x")


if __name__ == "__main__":
    main()
