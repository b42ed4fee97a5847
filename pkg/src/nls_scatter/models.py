"""Potential profiles V(x), nonlinearity profiles f(|psi|) and confinement geometries.

The interior equation solved everywhere in this package is

    psi'' + [k^2 - V(x) + gamma * f(|psi|)] psi = 0,

so V > 0 is a barrier and V < 0 a well, and the free equation psi'' + k^2 psi = 0
is recovered when V and gamma vanish. Units: hbar = 1, 2m = 1, k = sqrt(E).

Each spec packs into a flat float64 parameter block consumed by the compiled
right-hand side :func:`scatter_rhs`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._jit import jit


class TabulatedOutOfRange(ValueError):
    pass


# ---------------------------------------------------------------------------
# potentials

_POT_ZERO = 0
_POT_GAUSSIAN = 1
_POT_PIECEWISE = 2
_POT_RECT = 3
_POT_TABLE = 4


@dataclass(frozen=True)
class Gaussian:
    """V0 * exp(-((x - center) / width)**2)."""

    V0: float
    width: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"width must be > 0, got {self.width}")

    def params(self):
        return [_POT_GAUSSIAN, self.V0, self.width, self.center]

    def breakpoints(self):
        return ()

    def mirrored(self, about):
        return Gaussian(self.V0, self.width, 2 * about - self.center)


@dataclass(frozen=True)
class ShiftedGaussian:
    """Gaussian centred at ``mu * length`` inside a half-interval box of size ``length``."""

    V0: float
    mu: float
    length: float
    width: float = 1.0

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be > 0, got {self.length}")
        if not self.width > 0:
            raise ValueError(f"width must be > 0, got {self.width}")

    @property
    def center(self):
        return self.mu * self.length

    def params(self):
        return [_POT_GAUSSIAN, self.V0, self.width, self.center]

    def breakpoints(self):
        return ()

    def mirrored(self, about):
        return Gaussian(self.V0, self.width, 2 * about - self.center)


@dataclass(frozen=True)
class PiecewiseGaussian:
    """V0 * exp(-((x - center) / w)**2) with w = width_left for x <= center, width_right above.

    Continuous at the joint (both sides equal V0), with a slope kink unless the widths match.
    """

    V0: float
    width_left: float
    width_right: float
    center: float = 0.0

    def __post_init__(self):
        if not (self.width_left > 0 and self.width_right > 0):
            raise ValueError("widths must be > 0")

    def params(self):
        return [_POT_PIECEWISE, self.V0, self.width_left, self.width_right, self.center]

    def breakpoints(self):
        return (self.center,)

    def mirrored(self, about):
        return PiecewiseGaussian(self.V0, self.width_right, self.width_left, 2 * about - self.center)


@dataclass(frozen=True)
class Rectangular:
    """V0 on a <= x <= b, zero elsewhere."""

    V0: float
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a={self.a}, b={self.b}")

    def params(self):
        return [_POT_RECT, self.V0, self.a, self.b]

    def breakpoints(self):
        return (self.a, self.b)

    def mirrored(self, about):
        return Rectangular(self.V0, 2 * about - self.b, 2 * about - self.a)


@dataclass(frozen=True)
class Tabulated:
    """Linear interpolation through (x, V) samples; x strictly increasing."""

    x: tuple
    V: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        V = tuple(float(v) for v in self.V)
        if len(x) != len(V) or len(x) < 2:
            raise ValueError("tabulated potential needs >= 2 samples of matching length")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise ValueError("tabulated sample positions must be strictly increasing")
        if not all(map(math.isfinite, x + V)):
            raise ValueError("tabulated samples must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "V", V)

    def params(self):
        return [_POT_TABLE, len(self.x), *self.x, *self.V]

    def breakpoints(self):
        return self.x

    def mirrored(self, about):
        return Tabulated(tuple(2 * about - v for v in reversed(self.x)), tuple(reversed(self.V)))


PotentialSpec = Union[Gaussian, ShiftedGaussian, PiecewiseGaussian, Rectangular, Tabulated]


@jit
def potential_at(x, p):
    """Evaluate a packed potential block ``p`` at ``x`` (tables are clamped, not checked)."""
    kind = int(p[0])
    if kind == _POT_GAUSSIAN:
        s = (x - p[3]) / p[2]
        return p[1] * math.exp(-s * s)
    if kind == _POT_PIECEWISE:
        w = p[2] if x <= p[4] else p[3]
        s = (x - p[4]) / w
        return p[1] * math.exp(-s * s)
    if kind == _POT_RECT:
        if p[2] <= x <= p[3]:
            return p[1]
        return 0.0
    if kind == _POT_TABLE:
        n = int(p[1])
        xs = p[2:2 + n]
        vs = p[2 + n:2 + 2 * n]
        if x <= xs[0]:
            return vs[0]
        if x >= xs[n - 1]:
            return vs[n - 1]
        i = np.searchsorted(xs, x) - 1
        t = (x - xs[i]) / (xs[i + 1] - xs[i])
        return vs[i] + t * (vs[i + 1] - vs[i])
    return 0.0


def eval_potential(spec: PotentialSpec, x):
    """V(x) for a scalar or array of positions."""
    xs = np.asarray(x, dtype=np.float64)
    if isinstance(spec, Tabulated):
        lo, hi = spec.x[0], spec.x[-1]
        if np.any((xs < lo) | (xs > hi)):
            raise TabulatedOutOfRange(f"query outside tabulated span [{lo}, {hi}]")
    p = np.asarray(spec.params(), dtype=np.float64)
    if xs.ndim == 0:
        return float(potential_at(float(xs), p))
    return np.array([potential_at(float(v), p) for v in xs.ravel()]).reshape(xs.shape)


# ---------------------------------------------------------------------------
# nonlinearity

class NonlinearityKind(enum.Enum):
    NONE = "none"
    KERR = "kerr"
    SATURATING = "saturating"


_NL_CODES = {NonlinearityKind.NONE: 0, NonlinearityKind.KERR: 1, NonlinearityKind.SATURATING: 2}


@dataclass(frozen=True)
class NonlinearitySpec:
    """gamma * f(|psi|): Kerr f = |psi|^2, saturating f = 1 / (1 + (|psi|/a_s)^2), a_s = 1 by default."""

    kind: NonlinearityKind = NonlinearityKind.NONE
    gamma: float = 0.0
    saturation_amplitude: float = 1.0

    def __post_init__(self):
        if not isinstance(self.kind, NonlinearityKind):
            object.__setattr__(self, "kind", NonlinearityKind(self.kind))
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if not self.saturation_amplitude > 0:
            raise ValueError(f"saturation_amplitude must be > 0, got {self.saturation_amplitude}")

    @classmethod
    def kerr(cls, gamma=1.0):
        return cls(NonlinearityKind.KERR, gamma)

    @classmethod
    def saturating(cls, gamma=1.0, saturation_amplitude=1.0):
        return cls(NonlinearityKind.SATURATING, gamma, saturation_amplitude)

    @property
    def is_linear(self):
        return self.kind is NonlinearityKind.NONE or self.gamma == 0.0

    def params(self):
        return [_NL_CODES[self.kind], self.gamma, self.saturation_amplitude]


@jit
def nonlinearity_at(amplitude, code, gamma, sat):
    if code == 1:
        return gamma * amplitude * amplitude
    if code == 2:
        s = amplitude / sat
        return gamma / (1.0 + s * s)
    return 0.0


def eval_nonlinearity(spec: NonlinearitySpec, amplitude):
    """gamma * f(amplitude), amplitude >= 0."""
    a = np.asarray(amplitude, dtype=np.float64)
    if np.any(a < 0):
        raise ValueError("amplitude must be >= 0")
    code, gamma, sat = spec.params()
    if a.ndim == 0:
        return float(nonlinearity_at(float(a), code, gamma, sat))
    return np.array([nonlinearity_at(float(v), code, gamma, sat) for v in a.ravel()]).reshape(a.shape)


# ---------------------------------------------------------------------------
# geometry

class GeometryKind(enum.Enum):
    SYMMETRIC = "symmetric"          # confinement on [-L, L]
    HALF_INTERVAL = "half_interval"  # confinement on [0, L]


@dataclass(frozen=True)
class ConfinementGeometry:
    kind: GeometryKind
    L: float

    def __post_init__(self):
        if not isinstance(self.kind, GeometryKind):
            object.__setattr__(self, "kind", GeometryKind(self.kind))
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")

    @classmethod
    def symmetric(cls, L):
        return cls(GeometryKind.SYMMETRIC, L)

    @classmethod
    def half_interval(cls, L):
        return cls(GeometryKind.HALF_INTERVAL, L)

    @property
    def interval(self):
        if self.kind is GeometryKind.SYMMETRIC:
            return (-self.L, self.L)
        return (0.0, self.L)

    @property
    def midpoint(self):
        lo, hi = self.interval
        return 0.5 * (lo + hi)


def _close(a, b):
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def is_symmetric(spec: PotentialSpec, geometry: ConfinementGeometry) -> bool:
    """True iff V restricted to the confinement interval is even about its midpoint."""
    m = geometry.midpoint
    lo, hi = geometry.interval
    if isinstance(spec, Tabulated):
        if spec.x[0] > lo or spec.x[-1] < hi:
            return False
        d = np.linspace(0.0, 0.5 * (hi - lo), 200)
        left = eval_potential(spec, np.maximum(m - d, lo))
        right = eval_potential(spec, np.minimum(m + d, hi))
        return bool(np.all(np.abs(left - right) <= 1e-12))
    if spec.V0 == 0:
        return True
    if isinstance(spec, (Gaussian, ShiftedGaussian)):
        return _close(spec.center, m)
    if isinstance(spec, PiecewiseGaussian):
        return spec.width_left == spec.width_right and _close(spec.center, m)
    if isinstance(spec, Rectangular):
        a, b = max(spec.a, lo), min(spec.b, hi)
        if a > b:
            return True
        return _close(a + b, 2 * m)
    raise TypeError(f"unknown potential spec {spec!r}")


# ---------------------------------------------------------------------------
# interior equation

# layout of the packed block: [k^2, nl_code, gamma, saturation_amplitude, potential...]
_HEAD = 4


def pack_params(k: float, potential: PotentialSpec, nonlinearity: NonlinearitySpec) -> np.ndarray:
    return np.array([k * k, *nonlinearity.params(), *potential.params()], dtype=np.float64)


@jit
def scatter_rhs(x, y, dy, p):
    """psi'' for one real basis trajectory; f is evaluated on that trajectory's own amplitude."""
    f = nonlinearity_at(abs(y), p[1], p[2], p[3])
    return -(p[0] - potential_at(x, p[_HEAD:]) + f) * y
