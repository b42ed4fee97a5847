"""Compiled vs interpreted kernels on the figure fixtures.

    python benchmarks/bench_kernels.py [--energies 5] [--repeat 3]

Each mode runs in its own interpreter, since the JIT switch is read at import.
Compilation (or cache loading) is excluded by a warm-up solve.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = """
import json, sys, time
import numpy as np
from nls_scatter._jit import JIT_ENABLED
from nls_scatter.config import figure_config
from nls_scatter.ode import IntegratorConfig
from nls_scatter.scattering import solve_energy
from dataclasses import replace

n_e, repeat = int(sys.argv[1]), int(sys.argv[2])
out = {"jit": JIT_ENABLED, "rows": []}
for mode, integ in (("adaptive", IntegratorConfig()), ("fixed", IntegratorConfig.fixed())):
    for fig in (1, 4):
        cfg = replace(figure_config(fig).sweep.config, integrator=integ)
        solve_energy(cfg, 1.0)  # warm-up
        energies = np.linspace(0.1, 10.0, n_e)
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            for E in energies:
                solve_energy(cfg, float(E))
            best = min(best, time.perf_counter() - t0)
        out["rows"].append({"mode": mode, "figure": fig, "per_point": best / n_e})
json.dump(out, sys.stdout)
"""


def run(no_jit, n_e, repeat):
    env = dict(os.environ, NLS_SCATTER_NO_JIT="1" if no_jit else "0")
    env.pop("NLS_SEED_TOL", None)
    done = subprocess.run([sys.executable, "-c", WORKER, str(n_e), str(repeat)],
                          capture_output=True, text=True, env=env, check=True)
    return json.loads(done.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--energies", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    jit = run(False, args.energies, args.repeat)
    py = run(True, args.energies, args.repeat)
    print(f"{'integrator':<10} {'figure':>6} {'numba s/pt':>12} {'python s/pt':>12} {'speedup':>8}")
    for a, b in zip(jit["rows"], py["rows"]):
        print(f"{a['mode']:<10} {a['figure']:>6} {a['per_point']:>12.4g} {b['per_point']:>12.4g} "
              f"{b['per_point'] / a['per_point']:>8.0f}x")


if __name__ == "__main__":
    main()
