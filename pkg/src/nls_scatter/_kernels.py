"""Hot loops: fixed-step RK4 and Dormand-Prince 5(4) drivers for y'' = F(x, y, y').

Everything here is numba-compatible scalar code. ``rhs`` is passed in as a
function argument with signature ``rhs(x, y, dy, params) -> float``.

Both drivers integrate from ``x0`` through an ordered array of ``stops`` whose
last entry is the end point. Each stop is landed on exactly. Stops flagged in
``is_break`` are potential discontinuities: stage evaluations that sit exactly on
one are moved one ulp into the current step, so each step sees the potential
from its own side. Stops flagged in ``is_sample`` have their state recorded.

Status codes: 0 ok, 1 step limit, 2 non-finite state, 3 step size underflow.
"""

import math

import numpy as np

from ._jit import inline, jit

OK = 0
STEP_LIMIT = 1
NON_FINITE = 2
STEP_UNDERFLOW = 3

_BIG = 1e300


def rk4_drive(rhs, params, x0, y0, dy0, h, max_steps, stops, is_break, is_sample):
    n_stops = stops.shape[0]
    out_y = np.zeros(n_stops)
    out_dy = np.zeros(n_stops)
    direction = 1.0 if stops[n_stops - 1] >= x0 else -1.0
    hh = abs(h) * direction
    x = x0
    y = y0
    dy = dy0
    steps = 0
    start_break = False
    for j in range(n_stops):
        s = stops[j]
        seg_start = x
        n = 0
        while x != s:
            if steps >= max_steps:
                return STEP_LIMIT, x, y, dy, steps, out_y, out_dy
            xn = seg_start + (n + 1) * hh
            if (xn - s) * direction >= 0.0 or abs(s - xn) < 1e-9 * abs(hh):
                xn = s
            hs = xn - x
            xa = x
            if start_break:
                xa = np.nextafter(x, xn)
            xb = xn
            if xn == s and is_break[j]:
                xb = np.nextafter(xn, x)
            xm = x + 0.5 * hs

            k1y = dy
            k1d = rhs(xa, y, dy, params)
            k2y = dy + 0.5 * hs * k1d
            k2d = rhs(xm, y + 0.5 * hs * k1y, k2y, params)
            k3y = dy + 0.5 * hs * k2d
            k3d = rhs(xm, y + 0.5 * hs * k2y, k3y, params)
            k4y = dy + hs * k3d
            k4d = rhs(xb, y + hs * k3y, k4y, params)

            y = y + hs * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
            dy = dy + hs * (k1d + 2.0 * k2d + 2.0 * k3d + k4d) / 6.0
            x = xn
            n += 1
            steps += 1
            start_break = False
            if not (abs(y) < _BIG and abs(dy) < _BIG):
                return NON_FINITE, x, y, dy, steps, out_y, out_dy
        start_break = is_break[j]
        if is_sample[j]:
            out_y[j] = y
            out_dy[j] = dy
    return OK, x, y, dy, steps, out_y, out_dy


# Dormand-Prince 5(4) tableau; the 5th-order solution is propagated.
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def dopri_drive(rhs, params, x0, y0, dy0, atol, rtol, max_steps, stops, is_break, is_sample):
    n_stops = stops.shape[0]
    out_y = np.zeros(n_stops)
    out_dy = np.zeros(n_stops)
    x_end = stops[n_stops - 1]
    direction = 1.0 if x_end >= x0 else -1.0
    span = abs(x_end - x0)

    # starting step from first/second derivative magnitudes (Hairer, Norsett & Wanner)
    sc_y = atol + rtol * abs(y0)
    sc_d = atol + rtol * abs(dy0)
    f0d = rhs(x0, y0, dy0, params)
    d0 = max(abs(y0) / sc_y, abs(dy0) / sc_d)
    d1 = max(abs(dy0) / sc_y, abs(f0d) / sc_d)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, span)
    f1d = rhs(x0 + direction * h0, y0 + direction * h0 * dy0, dy0 + direction * h0 * f0d, params)
    d2 = max(abs(direction * h0 * f0d) / sc_y, abs(f1d - f0d) / sc_d) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = direction * min(100.0 * h0, h1, span)

    x = x0
    y = y0
    dy = dy0
    accepted = 0
    attempts = 0
    start_break = False
    for j in range(n_stops):
        s = stops[j]
        rejected = False
        while x != s:
            if attempts >= max_steps:
                return STEP_LIMIT, x, y, dy, accepted, out_y, out_dy
            landing = (x + h - s) * direction >= -1e-6 * abs(h)
            if landing:
                hs = s - x
                xn = s
            else:
                hs = h
                xn = x + h
            if abs(hs) <= 1e-15 * max(1.0, abs(x)):
                return STEP_UNDERFLOW, x, y, dy, accepted, out_y, out_dy
            xa = x
            if start_break:
                xa = np.nextafter(x, xn)
            xb = xn
            if landing and is_break[j]:
                xb = np.nextafter(xn, x)

            k1y = dy
            k1d = rhs(xa, y, dy, params)
            k2y = dy + hs * _A21 * k1d
            k2d = rhs(x + _C2 * hs, y + hs * _A21 * k1y, k2y, params)
            k3y = dy + hs * (_A31 * k1d + _A32 * k2d)
            k3d = rhs(x + _C3 * hs, y + hs * (_A31 * k1y + _A32 * k2y), k3y, params)
            k4y = dy + hs * (_A41 * k1d + _A42 * k2d + _A43 * k3d)
            k4d = rhs(x + _C4 * hs, y + hs * (_A41 * k1y + _A42 * k2y + _A43 * k3y), k4y, params)
            k5y = dy + hs * (_A51 * k1d + _A52 * k2d + _A53 * k3d + _A54 * k4d)
            k5d = rhs(x + _C5 * hs,
                      y + hs * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y), k5y, params)
            k6y = dy + hs * (_A61 * k1d + _A62 * k2d + _A63 * k3d + _A64 * k4d + _A65 * k5d)
            k6d = rhs(xb, y + hs * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y),
                      k6y, params)
            yn = y + hs * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
            dyn = dy + hs * (_B1 * k1d + _B3 * k3d + _B4 * k4d + _B5 * k5d + _B6 * k6d)
            k7y = dyn
            k7d = rhs(xb, yn, dyn, params)

            ey = hs * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
            ed = hs * (_E1 * k1d + _E3 * k3d + _E4 * k4d + _E5 * k5d + _E6 * k6d + _E7 * k7d)
            err = max(abs(ey) / (atol + rtol * max(abs(y), abs(yn))),
                      abs(ed) / (atol + rtol * max(abs(dy), abs(dyn))))
            attempts += 1

            if err <= 1.0:
                if err == 0.0:
                    factor = _MAX_FACTOR
                else:
                    factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
                if rejected:
                    factor = min(factor, 1.0)
                h_next = hs * factor
                if landing:
                    # keep the controller's unclipped proposal after a forced landing
                    h_next = direction * max(abs(h_next), abs(h))
                h = h_next
                x = xn
                y = yn
                dy = dyn
                accepted += 1
                rejected = False
                start_break = False
                if not (abs(y) < _BIG and abs(dy) < _BIG):
                    return NON_FINITE, x, y, dy, accepted, out_y, out_dy
            else:
                if math.isfinite(err):
                    factor = max(_MIN_FACTOR, _SAFETY * err ** -0.2)
                else:
                    factor = _MIN_FACTOR
                h = hs * factor
                rejected = True
        start_break = is_break[j]
        if is_sample[j]:
            out_y[j] = y
            out_dy[j] = dy
    return OK, x, y, dy, accepted, out_y, out_dy


# Generic drivers take any compiled rhs as a first-class argument and are
# compiled per process; numba cannot reuse such overloads from its disk cache.
# Cached specialisations instead call the inlined variants with a global rhs
# (see scattering._scatter_dopri).
rk4_inline = inline(rk4_drive)
dopri_inline = inline(dopri_drive)
rk4_drive = jit(rk4_drive, cache=False)
dopri_drive = jit(dopri_drive, cache=False)
