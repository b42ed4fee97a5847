"""Real second-order ODE integration, y'' = F(x, y, y').

Two drivers share one contract: classical RK4 on a uniform grid whose last step
is shortened to land on ``x_end``, and an adaptive Dormand-Prince 5(4) pair with
per-step local error bounded by ``abs_tol + rel_tol * |state|`` (max norm over
value and slope). Integration may run in either direction.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from ._jit import JIT_ENABLED, is_compiled, numba


class IntegrationError(RuntimeError):
    pass


class StepLimitExceeded(IntegrationError):
    pass


class NonFiniteState(IntegrationError):
    pass


class Mode(enum.Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


DEFAULT_TOL = 1e-13
DEFAULT_STEP = 5e-4
DEFAULT_MAX_STEPS = 2_000_000


@dataclass(frozen=True)
class IntegratorConfig:
    mode: Mode = Mode.ADAPTIVE
    step: float = DEFAULT_STEP
    abs_tol: float = DEFAULT_TOL
    rel_tol: float = DEFAULT_TOL
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if not isinstance(self.mode, Mode):
            object.__setattr__(self, "mode", Mode(self.mode))
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step}")
        for name in ("abs_tol", "rel_tol"):
            tol = getattr(self, name)
            if not 0 < tol < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {tol}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")

    @classmethod
    def fixed(cls, step: float = DEFAULT_STEP, **kw) -> "IntegratorConfig":
        return cls(mode=Mode.FIXED, step=step, **kw)

    @classmethod
    def adaptive(cls, tol: float = DEFAULT_TOL, **kw) -> "IntegratorConfig":
        return cls(mode=Mode.ADAPTIVE, abs_tol=tol, rel_tol=tol, **kw)

    def refined(self) -> "IntegratorConfig":
        """Half the step, or tolerances tightened by 2**5 (the same for a 5th-order controller)."""
        if self.mode is Mode.FIXED:
            return IntegratorConfig.fixed(self.step / 2, max_steps=2 * self.max_steps)
        return IntegratorConfig(mode=Mode.ADAPTIVE, abs_tol=self.abs_tol / 32,
                                rel_tol=self.rel_tol / 32, max_steps=2 * self.max_steps)


@dataclass(frozen=True)
class OdeProblem:
    """``rhs(x, y, dy)`` returns y''. Kernels that need parameters use ``rhs(x, y, dy, params)``
    together with ``params``; see :func:`integrate`."""

    rhs: Callable
    x_start: float
    x_end: float
    y0: float
    dy0: float
    params: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Trajectory:
    final_value: float
    final_slope: float
    steps_taken: int
    sample_x: Optional[np.ndarray] = None
    sample_value: Optional[np.ndarray] = None
    sample_slope: Optional[np.ndarray] = None


_NO_PARAMS = np.zeros(1)


def _plan_stops(x0, x1, samples, breaks):
    """Merge sample points, interior breakpoints and the end point into an ordered stop list."""
    direction = 1.0 if x1 >= x0 else -1.0
    lo, hi = min(x0, x1), max(x0, x1)
    pts = {}
    for b in breaks:
        b = float(b)
        if lo < b < hi:
            pts[b] = [True, False]
    for s in samples:
        s = float(s)
        if not lo <= s <= hi:
            raise ValueError(f"sample position {s} outside integration window [{lo}, {hi}]")
        if s == x0:
            continue
        pts.setdefault(s, [False, False])[1] = True
    pts.setdefault(float(x1), [False, False])
    order = sorted(pts, key=lambda p: direction * p)
    stops = np.array(order, dtype=np.float64)
    is_break = np.array([pts[p][0] for p in order], dtype=np.bool_)
    is_sample = np.array([pts[p][1] for p in order], dtype=np.bool_)
    return stops, is_break, is_sample


@functools.lru_cache(maxsize=None)
def _adapt_compiled(rhs):
    # numba rhs with the 3-argument signature, lifted to the kernel signature
    @numba.njit(nogil=True)
    def wrapped(x, y, dy, params):
        return rhs(x, y, dy)

    return wrapped


def run_kernel(rhs, params, x0, x1, y0, dy0, cfg: IntegratorConfig,
               samples: Sequence[float] = (), breaks: Sequence[float] = (), drivers=None):
    """Run the configured driver with a kernel-signature ``rhs``; raises on failure.

    Returns ``(y, dy, steps, sample_x, sample_y, sample_dy)``. Uses the compiled
    driver when ``rhs`` is compiled, the interpreted one otherwise. ``drivers``
    optionally supplies an ``(rk4, dopri)`` pair already bound to ``rhs``; they
    take the driver arguments without the leading rhs.
    """
    if x0 == x1:
        raise ValueError("x_start and x_end coincide")
    stops, is_break, is_sample = _plan_stops(float(x0), float(x1), samples, breaks)
    fixed = cfg.mode is Mode.FIXED
    if drivers is not None:
        driver = drivers[0] if fixed else drivers[1]
    else:
        driver = _kernels.rk4_drive if fixed else _kernels.dopri_drive
        if not is_compiled(rhs) and JIT_ENABLED:
            driver = driver.py_func
        driver = functools.partial(driver, rhs)
    if fixed:
        status, x, y, dy, steps, out_y, out_dy = driver(
            params, float(x0), float(y0), float(dy0), cfg.step, cfg.max_steps,
            stops, is_break, is_sample)
    else:
        status, x, y, dy, steps, out_y, out_dy = driver(
            params, float(x0), float(y0), float(dy0), cfg.abs_tol, cfg.rel_tol,
            cfg.max_steps, stops, is_break, is_sample)
    if status == _kernels.STEP_LIMIT:
        raise StepLimitExceeded(f"max_steps={cfg.max_steps} reached at x={x:.6g} (target {x1})")
    if status == _kernels.STEP_UNDERFLOW:
        raise StepLimitExceeded(f"step size underflow at x={x:.6g}")
    if status == _kernels.NON_FINITE:
        raise NonFiniteState(f"state overflowed at x={x:.6g}: y={y}, dy={dy}")

    sample_x = sample_y = sample_dy = None
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size:
        lookup = {p: i for i, p in enumerate(stops)}
        sample_x = samples.copy()
        sample_y = np.empty_like(samples)
        sample_dy = np.empty_like(samples)
        for i, s in enumerate(samples):
            if s == x0:
                sample_y[i], sample_dy[i] = y0, dy0
            else:
                j = lookup[s]
                sample_y[i], sample_dy[i] = out_y[j], out_dy[j]
    return y, dy, int(steps), sample_x, sample_y, sample_dy


def integrate(problem: OdeProblem, cfg: IntegratorConfig = IntegratorConfig(),
              samples: Sequence[float] = ()) -> Trajectory:
    """Integrate ``problem`` from ``x_start`` to ``x_end``.

    Without ``problem.params`` the rhs is called as ``rhs(x, y, dy)``; with params
    as ``rhs(x, y, dy, params)``. Numba-compiled rhs functions run through the
    compiled drivers; plain Python callables run interpreted.
    """
    rhs = problem.rhs
    params = problem.params
    if params is None:
        params = _NO_PARAMS
        if is_compiled(rhs):
            rhs = _adapt_compiled(rhs)
        else:
            user = rhs
            rhs = lambda x, y, dy, p: user(x, y, dy)  # noqa: E731
    y, dy, steps, sx, sy, sdy = run_kernel(
        rhs, np.asarray(params, dtype=np.float64), problem.x_start, problem.x_end,
        problem.y0, problem.dy0, cfg, samples=samples)
    return Trajectory(y, dy, steps, sx, sy, sdy)
