"""Basis solutions, endpoint Wronskians and reflection/transmission amplitudes.

Two real basis solutions are integrated from fixed initial data,
u(0) = 1, u'(0) = 0 and v(0) = 0, v'(0) = 1, each with the nonlinearity evaluated
on its own amplitude. The interior wave is taken as a superposition of u and v
and matched to plane waves at the confinement edges.

Asymptotic conventions (amplitudes carry the exact plane-wave phases):

* left incidence:  e^{ikx} + r_left e^{-ikx}  (x < x_lo),  t_left e^{ikx}   (x > x_hi)
* right incidence: e^{-ikx} + r_right e^{ikx} (x > x_hi),  t_right e^{-ikx} (x < x_lo)

For the half-interval box [0, L] the right-incidence problem is solved as the
left-incidence problem of the mirrored potential V(L - x), i.e. with the basis
started at the edge x = L where the wave enters. ``half_interval_right =
"shared_basis"`` instead reuses the x = 0 basis for both sides.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from .models import (ConfinementGeometry, GeometryKind, NonlinearitySpec, PotentialSpec,
                     Tabulated, TabulatedOutOfRange, eval_nonlinearity, pack_params, scatter_rhs)
from ._jit import jit
from ._kernels import dopri_inline, rk4_inline
from .ode import IntegratorConfig, run_kernel

K_MIN = 1e-3
DEGENERACY_RTOL = 1e-14

RIGHT_MIRROR = "mirror"
RIGHT_SHARED_BASIS = "shared_basis"


class KTooSmall(ValueError):
    pass


class DegenerateDenominator(ArithmeticError):
    pass


@dataclass(frozen=True)
class ScatterConfig:
    potential: PotentialSpec
    nonlinearity: NonlinearitySpec
    geometry: ConfinementGeometry
    integrator: IntegratorConfig = IntegratorConfig()
    half_interval_right: str = RIGHT_MIRROR

    def __post_init__(self):
        if self.half_interval_right not in (RIGHT_MIRROR, RIGHT_SHARED_BASIS):
            raise ValueError(f"half_interval_right must be 'mirror' or 'shared_basis', "
                             f"got {self.half_interval_right!r}")
        if isinstance(self.potential, Tabulated):
            lo, hi = self.geometry.interval
            if self.potential.x[0] > lo or self.potential.x[-1] < hi:
                raise TabulatedOutOfRange(
                    f"tabulated span [{self.potential.x[0]}, {self.potential.x[-1]}] "
                    f"does not cover the confinement interval [{lo}, {hi}]")

    @property
    def symmetric_geometry(self):
        return self.geometry.kind is GeometryKind.SYMMETRIC


@dataclass(frozen=True)
class BasisEndpointData:
    """u, v and slopes at x = +L (suffix 1) and x = -L (suffix 2).

    For the half-interval geometry only the x = L set is populated, W = W1, and
    ``mirror`` holds the same data for the basis started at x = L, expressed in
    the mirrored coordinate L - x. ``trajectory`` holds dense samples on [0, L]
    when requested.
    """

    L: float
    u1: float
    du1: float
    v1: float
    dv1: float
    W1: float
    u2: Optional[float] = None
    du2: Optional[float] = None
    v2: Optional[float] = None
    dv2: Optional[float] = None
    W2: Optional[float] = None
    mirror: Optional["BasisEndpointData"] = None
    trajectory: Optional[dict] = field(default=None, repr=False, compare=False)

    @property
    def W(self):
        return self.W1


@dataclass(frozen=True)
class ScatteringResult:
    k: float
    r_left: complex
    r_right: complex
    t_left: complex
    t_right: complex
    endpoint: BasisEndpointData = field(repr=False)

    @property
    def E(self):
        return self.k * self.k

    @property
    def R_left(self):
        return abs(self.r_left) ** 2

    @property
    def R_right(self):
        return abs(self.r_right) ** 2

    @property
    def T_left(self):
        return abs(self.t_left) ** 2

    @property
    def T_right(self):
        return abs(self.t_right) ** 2

    @property
    def sum_left(self):
        return self.R_left + self.T_left

    @property
    def sum_right(self):
        return self.R_right + self.T_right


def wronskian(u, du, v, dv):
    return u * dv - du * v


def _check_k(k):
    if not k >= K_MIN:
        raise KTooSmall(f"k={k} below k_min={K_MIN}")


@jit
def _scatter_rk4(params, x0, y0, dy0, h, max_steps, stops, is_break, is_sample):
    return rk4_inline(scatter_rhs, params, x0, y0, dy0, h, max_steps, stops, is_break, is_sample)


@jit
def _scatter_dopri(params, x0, y0, dy0, atol, rtol, max_steps, stops, is_break, is_sample):
    return dopri_inline(scatter_rhs, params, x0, y0, dy0, atol, rtol, max_steps,
                        stops, is_break, is_sample)


_DRIVERS = (_scatter_rk4, _scatter_dopri)


def _run(cfg, params, x0, x1, y0, dy0, samples=()):
    return run_kernel(scatter_rhs, params, x0, x1, y0, dy0, cfg.integrator,
                      samples=samples, breaks=cfg.potential.breakpoints(),
                      drivers=_DRIVERS)


def integrate_basis(cfg: ScatterConfig, k: float, n_samples: int = 0) -> BasisEndpointData:
    """Integrate u and v across the confinement interval and collect endpoint data.

    ``n_samples > 0`` additionally records both trajectories at ``n_samples``
    equally spaced points of [0, L] in ``trajectory``.
    """
    _check_k(k)
    L = cfg.geometry.L
    params = pack_params(k, cfg.potential, cfg.nonlinearity)
    samples = np.linspace(0.0, L, n_samples) if n_samples else ()

    u1, du1, _, xs, us, dus = _run(cfg, params, 0.0, L, 1.0, 0.0, samples)
    v1, dv1, _, _, vs, dvs = _run(cfg, params, 0.0, L, 0.0, 1.0, samples)
    trajectory = None
    if n_samples:
        trajectory = {"x": xs, "u": us, "du": dus, "v": vs, "dv": dvs}

    if cfg.symmetric_geometry:
        u2, du2, *_ = _run(cfg, params, 0.0, -L, 1.0, 0.0)
        v2, dv2, *_ = _run(cfg, params, 0.0, -L, 0.0, 1.0)
        return BasisEndpointData(L, u1, du1, v1, dv1, wronskian(u1, du1, v1, dv1),
                                 u2, du2, v2, dv2, wronskian(u2, du2, v2, dv2),
                                 trajectory=trajectory)

    mirror = None
    if cfg.half_interval_right == RIGHT_MIRROR:
        # basis in s = L - x: s-slope is minus the x-slope
        mu, mdu, *_ = _run(cfg, params, L, 0.0, 1.0, 0.0)
        mv, mdv, *_ = _run(cfg, params, L, 0.0, 0.0, -1.0)
        mirror = BasisEndpointData(L, mu, -mdu, mv, -mdv, wronskian(mu, -mdu, mv, -mdv))
    return BasisEndpointData(L, u1, du1, v1, dv1, wronskian(u1, du1, v1, dv1),
                             mirror=mirror, trajectory=trajectory)


def _guard(denominator, scale):
    if abs(denominator) <= DEGENERACY_RTOL * scale:
        raise DegenerateDenominator(
            f"|D|={abs(denominator):.3e} is below {DEGENERACY_RTOL:g} x term scale {scale:.3e}")


def amplitudes_two_sided(ep: BasisEndpointData, k: float) -> ScatteringResult:
    """Left and right amplitudes for the box [-L, L] from endpoint data at both edges."""
    _check_k(k)
    if ep.u2 is None:
        raise ValueError("two-sided amplitudes need endpoint data at x = -L")
    u1, du1, v1, dv1 = ep.u1, ep.du1, ep.v1, ep.dv1
    u2, du2, v2, dv2 = ep.u2, ep.du2, ep.v2, ep.dv2
    ik = 1j * k
    k2 = k * k
    a = du2 * dv1 - du1 * dv2
    b1 = du1 * v2 - u1 * dv2
    b2 = u2 * dv1 - du2 * v1
    c = u1 * v2 - u2 * v1
    D = -a + ik * b1 - ik * b2 + k2 * c
    _guard(D, abs(a) + k * abs(b1) + k * abs(b2) + k2 * abs(c))

    n_left = a + ik * (du1 * v2 + u1 * dv2) - ik * (u2 * dv1 + du2 * v1) + k2 * c
    n_right = a + ik * (du2 * v1 + u2 * dv1) - ik * (u1 * dv2 + du1 * v2) + k2 * c
    phase = cmath.exp(-2j * k * ep.L)
    return ScatteringResult(
        k=k,
        r_left=phase * n_left / D,
        r_right=phase * n_right / D,
        t_left=phase * (-2 * ik * ep.W1) / D,
        t_right=phase * (-2 * ik * ep.W2) / D,
        endpoint=ep,
    )


def _half_left(u, du, v, dv, k, L):
    ik = 1j * k
    k2 = k * k
    den = k2 * v - du + ik * (dv + u)
    _guard(den, k2 * abs(v) + abs(du) + k * abs(dv) + k * abs(u))
    r = (k2 * v + du + ik * (dv - u)) / den
    t = 2 * ik * wronskian(u, du, v, dv) * cmath.exp(-ik * L) / den
    return r, t, den


def amplitudes_half_interval(ep: BasisEndpointData, k: float) -> ScatteringResult:
    """Left and right amplitudes for the box [0, L] from endpoint data at x = L."""
    _check_k(k)
    L = ep.L
    r_left, t_left, den = _half_left(ep.u1, ep.du1, ep.v1, ep.dv1, k, L)
    if ep.mirror is not None:
        m = ep.mirror
        r_m, t_m, _ = _half_left(m.u1, m.du1, m.v1, m.dv1, k, L)
        r_right = r_m * cmath.exp(-2j * k * L)
        t_right = t_m
    else:
        # same x = 0 basis: psi(0) = F, psi'(0) = -ik F, matched to e^{-ikx} + r e^{ikx} at x = L
        ik = 1j * k
        u, du, v, dv = ep.u1, ep.du1, ep.v1, ep.dv1
        r_right = cmath.exp(-2 * ik * L) * (ik * u + k * k * v + du - ik * dv) / den
        t_right = 2 * ik * cmath.exp(-ik * L) / den
    return ScatteringResult(k, r_left, r_right, t_left, t_right, ep)


def amplitudes_symmetric_closed_form(ep: BasisEndpointData, k: float):
    """(R, T) from x = +L data alone, valid when u is even and v odd."""
    u, du, v, dv = ep.u1, ep.du1, ep.v1, ep.dv1
    k2 = k * k
    delta = (k2 * u * v - du * dv) ** 2 + k2 * (u * dv + du * v) ** 2
    if delta == 0.0:
        raise DegenerateDenominator("all endpoint data vanish")
    R = (k2 * u * v + du * dv) ** 2 / delta
    T = k2 * (u * dv - du * v) ** 2 / delta
    return R, T


def unitarity_defect(ep: BasisEndpointData, k: float) -> float:
    """(R + T) - 1 for left incidence on [0, L], in closed form through W = W(L).

    R + T = (S + 2k^2 W (2W - 1)) / (S + 2k^2 W) with S = k^4 v^2 + u'^2 + k^2 (v'^2 + u^2),
    which reduces to a defect of 4 k^2 W (W - 1) / (S + 2k^2 W).
    The denominator is evaluated as (k^2 v - u')^2 + k^2 (v' + u)^2, the same
    quantity without cancellation when W < 0.
    """
    u, du, v, dv, W = ep.u1, ep.du1, ep.v1, ep.dv1, ep.W1
    k2 = k * k
    den = (k2 * v - du) ** 2 + k2 * (dv + u) ** 2
    if not abs(den) > 1e-300:
        raise DegenerateDenominator("unitarity-defect denominator underflows")
    return 4 * k2 * W * (W - 1) / den


def solve(cfg: ScatterConfig, k: float) -> ScatteringResult:
    """Full scattering solution at wavenumber ``k``."""
    ep = integrate_basis(cfg, k)
    if cfg.symmetric_geometry:
        return amplitudes_two_sided(ep, k)
    return amplitudes_half_interval(ep, k)


def solve_energy(cfg: ScatterConfig, E: float) -> ScatteringResult:
    if not E > 0:
        raise KTooSmall(f"energy must be > 0, got {E}")
    return solve(cfg, math.sqrt(E))


def wronskian_drift(cfg: ScatterConfig, k: float, n_samples: int = 5001):
    """Return (W(L) - W(0), integral over [0, L] of gamma [f(|u|) - f(|v|)] u v dx).

    The two agree because W' = gamma [f(|u|) - f(|v|)] u v for the interior
    equation; the integral is a Simpson rule over sampled trajectories.
    """
    ep = integrate_basis(cfg, k, n_samples=n_samples)
    tr = ep.trajectory
    u, v = tr["u"], tr["v"]
    integrand = (eval_nonlinearity(cfg.nonlinearity, np.abs(u))
                 - eval_nonlinearity(cfg.nonlinearity, np.abs(v))) * u * v
    return ep.W1 - 1.0, float(simpson(integrand, x=tr["x"]))
