"""Oracle battery behind ``nls-scatter verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, List

import numpy as np

from .config import apply_seed_tolerance, figure_config
from .models import (ConfinementGeometry, Gaussian, NonlinearitySpec, Rectangular)
from .ode import IntegratorConfig
from .scattering import (RIGHT_SHARED_BASIS, ScatterConfig, amplitudes_symmetric_closed_form,
                         integrate_basis, solve_energy, unitarity_defect, wronskian_drift)
from .sweep import run_sweep, theorem_report


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status:<5} {self.name:<34} measured={self.measured:.3e}  bound={self.tolerance:.1e}  {self.detail}"


def _below(name, measured, tol, detail=""):
    return Check(name, measured, tol, bool(measured < tol), detail)


def barrier_transmission(V0: float, width: float, E: float) -> float:
    """Closed-form T for a square barrier/well of height V0 and given width (hbar = 2m = 1)."""
    if E == V0:
        return 1.0 / (1.0 + V0 * width ** 2 / 4.0)
    if E < V0:
        kappa = math.sqrt(V0 - E)
        return 1.0 / (1.0 + V0 ** 2 * math.sinh(kappa * width) ** 2 / (4 * E * (V0 - E)))
    q = math.sqrt(E - V0)
    return 1.0 / (1.0 + V0 ** 2 * math.sin(q * width) ** 2 / (4 * E * (E - V0)))


def _integrator():
    return apply_seed_tolerance(IntegratorConfig())


def check_free_space():
    worst = 0.0
    for geom in (ConfinementGeometry.symmetric(4.0), ConfinementGeometry.half_interval(4.0)):
        cfg = ScatterConfig(Gaussian(0.0), NonlinearitySpec(), geom, _integrator())
        for E in (0.3, 1.0, 4.0, 9.0):
            r = solve_energy(cfg, E)
            worst = max(worst, r.R_left, r.R_right, abs(r.T_left - 1), abs(r.T_right - 1))
    return _below("free space R=0, T=1", worst, 1e-8)


def check_rectangular_barrier():
    worst = 0.0
    for V0 in (2.0, -2.0):
        cfg = ScatterConfig(Rectangular(V0, -1.0, 1.0), NonlinearitySpec(),
                            ConfinementGeometry.symmetric(1.5), _integrator())
        for E in (0.5, 1.0, 1.5, 3.0):
            r = solve_energy(cfg, E)
            worst = max(worst, abs(r.T_left - barrier_transmission(V0, 2.0, E)),
                        abs(r.T_right - barrier_transmission(V0, 2.0, E)))
    return _below("rectangular barrier closed form", worst, 1e-6, "V0=+-2 on [-1,1]")


def check_linear_wronskian():
    integ = _integrator()
    worst = 0.0
    for V0 in (-3.0, 3.0):
        cfg = ScatterConfig(Gaussian(V0), NonlinearitySpec(), ConfinementGeometry.symmetric(5.0), integ)
        for k in (0.5, 1.0, 2.5):
            ep = integrate_basis(cfg, k)
            worst = max(worst, abs(ep.W1 - 1), abs(ep.W2 - 1))
    return _below("linear Wronskian constancy", worst, max(100 * integ.abs_tol, 1e-11))


def check_closed_form(force_linear=False):
    cfg = figure_config(1, force_linear=force_linear).sweep.config
    worst = 0.0
    for E in (0.5, 1.0, 3.0, 7.0):
        r = solve_energy(cfg, E)
        R, T = amplitudes_symmetric_closed_form(r.endpoint, r.k)
        worst = max(worst, abs(R - r.R_left), abs(T - r.T_left), abs(R - r.R_right), abs(T - r.T_right))
    return _below("symmetric closed form vs two-sided", worst, 1e-9, "figure 1 fixture")


def check_defect_identity(force_linear=False):
    cfg = figure_config(4, force_linear=force_linear).sweep.config
    worst = 0.0
    for E in np.linspace(0.1, 10.0, 25):
        r = solve_energy(cfg, float(E))
        worst = max(worst, abs(unitarity_defect(r.endpoint, r.k) - (r.sum_left - 1)))
    return _below("R+T closed form vs amplitudes", worst, 1e-10, "figure 4 fixture")


def check_wronskian_drift(force_linear=False):
    cfg = figure_config(4, force_linear=force_linear).sweep.config
    drift, integral = wronskian_drift(cfg, 1.0)
    return _below("Wronskian drift vs quadrature", abs(drift - integral), 1e-7,
                  f"figure 4 fixture, E=1, W(L)-1={drift:.4g}")


def check_mirrored_right_incidence(force_linear=False):
    worst = 0.0
    for n in (2, 3, 5):
        cfg = figure_config(n, force_linear=force_linear).sweep.config
        mirrored = replace(cfg, potential=cfg.potential.mirrored(cfg.geometry.midpoint))
        for E in (0.5, 2.0, 6.0):
            r, m = solve_energy(cfg, E), solve_energy(mirrored, E)
            worst = max(worst, abs(r.R_right - m.R_left), abs(r.T_right - m.T_left),
                        abs(r.R_left - m.R_right), abs(r.T_left - m.T_right))
    # in the linear limit the shared-basis reconstruction must agree with the mirror
    lin = replace(figure_config(5).sweep.config, nonlinearity=NonlinearitySpec())
    for E in (0.5, 2.0, 6.0):
        a, b = solve_energy(lin, E), solve_energy(replace(lin, half_interval_right=RIGHT_SHARED_BASIS), E)
        worst = max(worst, abs(a.R_right - b.R_right), abs(a.T_right - b.T_right))
    return _below("mirrored-potential right incidence", worst, 1e-9, "figures 2, 3, 5")


def check_convergence(force_linear=False, n_points=24):
    worst = 0.0
    where = ""
    for n in range(1, 6):
        spec = figure_config(n, force_linear=force_linear).sweep
        spec = replace(spec, n_points=n_points)
        table = run_sweep(spec)
        refined = replace(spec.config, integrator=spec.config.integrator.refined())
        for row in table.rows:
            ref = solve_energy(refined, row.E)
            r = row.result
            shift = max(abs(r.R_left - ref.R_left), abs(r.R_right - ref.R_right),
                        abs(r.T_left - ref.T_left), abs(r.T_right - ref.T_right))
            if shift > worst:
                worst, where = shift, f"figure {n}, E={row.E:.4g}"
    return _below("step refinement convergence", worst, 1e-7, where)


def check_fixture_theorems(force_linear=False, n_points=40):
    checks = []
    for n in range(1, 6):
        spec = replace(figure_config(n, force_linear=force_linear).sweep, n_points=n_points)
        report = theorem_report(run_sweep(spec), spec.config)
        verdicts = ", ".join(f"{c.name}: {c.verdict}" for c in report.checks)
        unitarity = report.check("unitarity").measured
        checks.append(Check(f"figure {n} regime {report.regime} pattern", unitarity,
                            float("nan"), report.consistent, verdicts))
    return checks


def run_battery(force_linear: bool = False) -> List[Check]:
    steps: List[Callable] = [
        check_free_space,
        check_rectangular_barrier,
        check_linear_wronskian,
        lambda: check_closed_form(force_linear),
        lambda: check_defect_identity(force_linear),
        lambda: check_wronskian_drift(force_linear),
        lambda: check_mirrored_right_incidence(force_linear),
        lambda: check_convergence(force_linear),
    ]
    checks = [step() for step in steps]
    checks.extend(check_fixture_theorems(force_linear))
    return checks
