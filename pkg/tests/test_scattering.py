"""Scattering amplitudes against independent oracles and structural identities."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nls_scatter.models import (ConfinementGeometry, Gaussian, NonlinearitySpec,
                                PiecewiseGaussian, Rectangular, ShiftedGaussian)
from nls_scatter.ode import IntegratorConfig
from nls_scatter.scattering import (RIGHT_SHARED_BASIS, BasisEndpointData, DegenerateDenominator,
                                    KTooSmall, ScatterConfig, amplitudes_half_interval,
                                    amplitudes_symmetric_closed_form, amplitudes_two_sided,
                                    integrate_basis, solve, solve_energy, unitarity_defect,
                                    wronskian, wronskian_drift)

SYM5 = ConfinementGeometry.symmetric(5.0)
HALF5 = ConfinementGeometry.half_interval(5.0)
LINEAR = NonlinearitySpec()


def transfer_matrix_rt(steps, E):
    """(r, t) for left incidence on piecewise-constant V, plane waves exp(+-ikx) unshifted.

    ``steps`` is a list of (x_left, x_right, V) regions; V = 0 outside them.
    """
    edges, values = [], [0.0]
    for a, b, V in steps:
        edges += [a, b]
        values += [V, 0.0]
    q = [cmath.sqrt(E - V) for V in values]

    def basis(j, x):
        # columns: exp(i q x), exp(-i q x) and their derivatives
        e, f = cmath.exp(1j * q[j] * x), cmath.exp(-1j * q[j] * x)
        return np.array([[e, f], [1j * q[j] * e, -1j * q[j] * f]])

    M = np.eye(2, dtype=complex)
    for j, x in enumerate(edges):
        M = np.linalg.solve(basis(j + 1, x), basis(j, x)) @ M
    # outgoing (t, 0) = M (1, r)
    r = -M[1, 0] / M[1, 1]
    t = M[0, 0] + M[0, 1] * r
    return r, t


def square_barrier_T(V0, width, E):
    if E > V0:
        q = math.sqrt(E - V0)
        return 1 / (1 + V0 ** 2 * math.sin(q * width) ** 2 / (4 * E * (E - V0)))
    kappa = math.sqrt(V0 - E)
    return 1 / (1 + V0 ** 2 * math.sinh(kappa * width) ** 2 / (4 * E * (V0 - E)))


def test_transfer_matrix_oracle_itself():
    r, t = transfer_matrix_rt([(-1.0, 1.0, 2.0)], 3.0)
    assert abs(t) ** 2 == pytest.approx(square_barrier_T(2.0, 2.0, 3.0), rel=1e-12)
    assert abs(r) ** 2 + abs(t) ** 2 == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# linear oracles

@pytest.mark.parametrize("geom", [SYM5, HALF5])
@pytest.mark.parametrize("E", [0.3, 1.0, 9.0])
def test_free_space(geom, E):
    r = solve_energy(ScatterConfig(Gaussian(0.0), LINEAR, geom), E)
    for amp in (r.r_left, r.r_right):
        assert abs(amp) < 1e-9
    assert r.T_left == pytest.approx(1.0, abs=1e-9)
    assert r.T_right == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("V0", [2.0, -2.0])
@pytest.mark.parametrize("E", [0.5, 1.0, 1.5, 3.0])
def test_rectangular_barrier(V0, E):
    cfg = ScatterConfig(Rectangular(V0, -1.0, 1.0), LINEAR, ConfinementGeometry.symmetric(1.5))
    res = solve_energy(cfg, E)
    r_tm, t_tm = transfer_matrix_rt([(-1.0, 1.0, V0)], E)
    assert res.T_left == pytest.approx(square_barrier_T(V0, 2.0, E), abs=1e-6)
    assert res.T_right == pytest.approx(square_barrier_T(V0, 2.0, E), abs=1e-6)
    # full complex amplitudes, phase convention included
    assert abs(res.r_left - r_tm) < 1e-8
    assert abs(res.t_left - t_tm) < 1e-8


@pytest.mark.parametrize("E", [0.4, 2.0, 5.0])
def test_offset_barrier_half_interval(E):
    # asymmetric step pair inside [0, 5]; linear, so both incidences follow the transfer matrix
    steps = [(1.0, 2.0, 1.5)]
    cfg = ScatterConfig(Rectangular(1.5, 1.0, 2.0), LINEAR, HALF5)
    res = solve_energy(cfg, E)
    r_tm, t_tm = transfer_matrix_rt(steps, E)
    assert abs(res.r_left - r_tm) < 1e-8
    assert abs(res.t_left - t_tm) < 1e-8
    # right incidence: mirror the barrier about x = 0 and undo the shift
    r_m, _ = transfer_matrix_rt([(-2.0, -1.0, 1.5)], E)
    assert res.R_right == pytest.approx(abs(r_m) ** 2, abs=1e-8)
    assert res.T_right == pytest.approx(abs(t_tm) ** 2, abs=1e-8)


@given(V0=st.floats(-4, 4), w=st.floats(0.3, 2.0), c=st.floats(-2, 2), E=st.floats(0.2, 10))
@settings(max_examples=25, deadline=None)
def test_linear_unitarity_and_reciprocity(V0, w, c, E):
    res = solve_energy(ScatterConfig(Gaussian(V0, w, c), LINEAR, SYM5), E)
    assert res.sum_left == pytest.approx(1.0, abs=1e-9)
    assert res.sum_right == pytest.approx(1.0, abs=1e-9)
    assert res.T_left == pytest.approx(res.T_right, abs=1e-9)
    assert abs(res.endpoint.W1 - 1) < 1e-10 and abs(res.endpoint.W2 - 1) < 1e-10


# ---------------------------------------------------------------------------
# amplitude formulas against a direct matching solve

endpoint_values = st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3)


def _match(rows, rhs):
    return np.linalg.solve(np.array(rows, dtype=complex), np.array(rhs, dtype=complex))


@given(d=st.lists(endpoint_values, min_size=8, max_size=8), k=st.floats(0.2, 4), L=st.floats(0.5, 5))
@settings(max_examples=60)
def test_two_sided_formulas_match_linear_solve(d, k, L):
    u1, du1, v1, dv1, u2, du2, v2, dv2 = d
    ep = BasisEndpointData(L, u1, du1, v1, dv1, wronskian(u1, du1, v1, dv1),
                           u2, du2, v2, dv2, wronskian(u2, du2, v2, dv2))
    M = [[u2, v2, 0, 0], [du2, dv2, 0, 0], [u1, v1, 0, 0], [du1, dv1, 0, 0]]
    e = lambda x: cmath.exp(1j * k * x)  # noqa: E731
    ik = 1j * k
    # unknowns (A, B, r, t): psi = A u + B v inside
    try:
        # left: e^{ikx} + r e^{-ikx} for x < -L, t e^{ikx} for x > L
        A = [[*M[0][:2], -e(L), 0], [*M[1][:2], ik * e(L), 0],
             [*M[2][:2], 0, -e(L)], [*M[3][:2], 0, -ik * e(L)]]
        _, _, r_l, t_l = _match(A, [e(-L), ik * e(-L), 0, 0])
        # right: e^{-ikx} + r e^{ikx} for x > L, t e^{-ikx} for x < -L
        A = [[*M[0][:2], 0, -e(L)], [*M[1][:2], 0, ik * e(L)],
             [*M[2][:2], -e(L), 0], [*M[3][:2], -ik * e(L), 0]]
        _, _, r_r, t_r = _match(A, [0, 0, e(-L), -ik * e(-L)])
        res = amplitudes_two_sided(ep, k)
    except (np.linalg.LinAlgError, DegenerateDenominator):
        return
    scale = 1 + abs(r_l) + abs(t_l) + abs(r_r) + abs(t_r)
    for got, want in [(res.r_left, r_l), (res.t_left, t_l), (res.r_right, r_r), (res.t_right, t_r)]:
        assert abs(got - want) < 1e-8 * scale


@given(d=st.lists(endpoint_values, min_size=4, max_size=4), k=st.floats(0.2, 4), L=st.floats(0.5, 5))
@settings(max_examples=60)
def test_half_interval_formulas_match_linear_solve(d, k, L):
    u, du, v, dv = d
    ep = BasisEndpointData(L, u, du, v, dv, wronskian(u, du, v, dv))
    e = lambda x: cmath.exp(1j * k * x)  # noqa: E731
    ik = 1j * k
    try:
        # left: psi(0) = 1 + r, psi'(0) = ik(1 - r); psi = (1 + r) u + ik(1 - r) v; t e^{ikx} at L
        A = [[u - ik * v, -e(L)], [du - ik * dv, -ik * e(L)]]
        r_l, t_l = _match(A, [-(u + ik * v), -(du + ik * dv)])
        # right, same basis: psi(0) = t, psi'(0) = -ik t; e^{-ikx} + r e^{ikx} at L
        A = [[u - ik * v, -e(L)], [du - ik * dv, -ik * e(L)]]
        t_r, r_r = _match(A, [e(-L), -ik * e(-L)])
        res = amplitudes_half_interval(ep, k)
    except (np.linalg.LinAlgError, DegenerateDenominator):
        return
    scale = 1 + abs(r_l) + abs(t_l) + abs(r_r) + abs(t_r)
    for got, want in [(res.r_left, r_l), (res.t_left, t_l), (res.r_right, r_r), (res.t_right, t_r)]:
        assert abs(got - want) < 1e-8 * scale


@given(d=st.lists(endpoint_values, min_size=8, max_size=8), k=st.floats(0.2, 4))
@settings(max_examples=60)
def test_two_sided_reflectivity_always_reciprocal(d, k):
    # real endpoint data make the two reflection numerators complex conjugates
    u1, du1, v1, dv1, u2, du2, v2, dv2 = d
    W1, W2 = wronskian(u1, du1, v1, dv1), wronskian(u2, du2, v2, dv2)
    assume(abs(W2) > 1e-6)
    try:
        res = amplitudes_two_sided(BasisEndpointData(5.0, u1, du1, v1, dv1, W1, u2, du2, v2, dv2, W2), k)
    except DegenerateDenominator:
        return
    assert res.R_left == pytest.approx(res.R_right, rel=1e-10, abs=1e-12)
    assert res.T_left == pytest.approx(res.T_right * (W1 / W2) ** 2, rel=1e-10, abs=1e-12)


# ---------------------------------------------------------------------------
# nonlinear structure

def test_parity_of_symmetric_basis():
    cfg = ScatterConfig(Gaussian(-3.0), NonlinearitySpec.saturating(1.0), SYM5)
    ep = integrate_basis(cfg, 1.2)
    # u even, v odd: u(-L) = u(L), u'(-L) = -u'(L), v(-L) = -v(L), v'(-L) = v'(L)
    assert ep.u2 == pytest.approx(ep.u1, abs=1e-10)
    assert ep.du2 == pytest.approx(-ep.du1, abs=1e-10)
    assert ep.v2 == pytest.approx(-ep.v1, abs=1e-10)
    assert ep.dv2 == pytest.approx(ep.dv1, abs=1e-10)
    assert ep.W1 == pytest.approx(ep.W2, abs=1e-10)


@pytest.mark.parametrize("nl", [NonlinearitySpec.saturating(1.0), NonlinearitySpec.kerr(0.5), LINEAR])
@pytest.mark.parametrize("E", [0.3, 1.0, 4.0, 8.5])
def test_symmetric_closed_form(nl, E):
    res = solve_energy(ScatterConfig(Gaussian(-3.0), nl, SYM5), E)
    R, T = amplitudes_symmetric_closed_form(res.endpoint, res.k)
    for got in (res.R_left, res.R_right):
        assert got == pytest.approx(R, abs=1e-9)
    for got in (res.T_left, res.T_right):
        assert got == pytest.approx(T, abs=1e-9)


def test_defect_vanishes_for_unit_wronskian():
    ep = BasisEndpointData(5.0, 1.0, 0.0, 0.0, 1.0, 1.0)
    assert unitarity_defect(ep, 0.7) == 0.0


@pytest.mark.parametrize("mu", [0.4, 0.5])
@pytest.mark.parametrize("E", np.linspace(0.1, 10.0, 9))
def test_defect_identity(mu, E):
    cfg = ScatterConfig(ShiftedGaussian(3.0, mu, 5.0), NonlinearitySpec.kerr(1.0), HALF5)
    res = solve_energy(cfg, E)
    assert unitarity_defect(res.endpoint, res.k) == pytest.approx(res.sum_left - 1, abs=1e-10)


def test_linear_defect_small():
    cfg = ScatterConfig(ShiftedGaussian(3.0, 0.4, 5.0), LINEAR, HALF5)
    for E in (0.5, 3.0):
        res = solve_energy(cfg, E)
        assert abs(unitarity_defect(res.endpoint, res.k)) < 1e-8


@pytest.mark.parametrize("nl", [NonlinearitySpec.kerr(1.0), NonlinearitySpec.saturating(1.0)])
def test_wronskian_drift(nl):
    cfg = ScatterConfig(ShiftedGaussian(3.0, 0.5, 5.0), nl, HALF5)
    drift, integral = wronskian_drift(cfg, 1.0)
    assert abs(drift) > 1e-3  # the check is not vacuous
    assert drift == pytest.approx(integral, abs=1e-7)


@pytest.mark.parametrize("mu", [0.3, 0.4])
@pytest.mark.parametrize("nl", [NonlinearitySpec.kerr(1.0), NonlinearitySpec.saturating(1.0)])
def test_right_incidence_is_mirrored_left_incidence(mu, nl):
    cfg = ScatterConfig(ShiftedGaussian(3.0, mu, 5.0), nl, HALF5)
    mirrored = ScatterConfig(cfg.potential.mirrored(2.5), nl, HALF5)
    for E in (0.5, 2.0, 6.0):
        a, b = solve_energy(cfg, E), solve_energy(mirrored, E)
        assert a.R_right == pytest.approx(b.R_left, abs=1e-9)
        assert a.T_right == pytest.approx(b.T_left, abs=1e-9)


def test_two_sided_right_incidence_is_mirrored():
    cfg = ScatterConfig(PiecewiseGaussian(-3.0, 1.0, 0.8), NonlinearitySpec.kerr(1.0), SYM5)
    mirrored = ScatterConfig(cfg.potential.mirrored(0.0), cfg.nonlinearity, SYM5)
    for E in (0.5, 3.0):
        a, b = solve_energy(cfg, E), solve_energy(mirrored, E)
        assert a.T_right == pytest.approx(b.T_left, abs=1e-9)
        assert a.R_right == pytest.approx(b.R_left, abs=1e-9)


def test_shared_basis_agrees_with_mirror_when_linear():
    pot = ShiftedGaussian(3.0, 0.4, 5.0)
    a = ScatterConfig(pot, LINEAR, HALF5)
    b = ScatterConfig(pot, LINEAR, HALF5, half_interval_right=RIGHT_SHARED_BASIS)
    for E in (0.5, 2.0, 6.0):
        x, y = solve_energy(a, E), solve_energy(b, E)
        assert abs(x.r_right - y.r_right) < 1e-9 and abs(x.t_right - y.t_right) < 1e-9


@given(V0=st.sampled_from([-3.0, -1.0, 1.0, 3.0]), gamma=st.sampled_from([0.5, 1.0]),
       kind=st.sampled_from(["kerr", "saturating"]), E=st.floats(0.5, 10.0))
@settings(max_examples=25, deadline=None)
def test_half_interval_symmetric_potential_is_reciprocal(V0, gamma, kind, E):
    cfg = ScatterConfig(ShiftedGaussian(V0, 0.5, 5.0), NonlinearitySpec(kind, gamma), HALF5)
    res = solve_energy(cfg, E)
    scale = 1 + res.R_left + res.T_left
    assert res.R_left == pytest.approx(res.R_right, abs=1e-7 * scale)
    assert res.T_left == pytest.approx(res.T_right, abs=1e-7 * scale)


# ---------------------------------------------------------------------------
# errors

def test_wronskian_examples():
    assert wronskian(1, 0, 0, 1) == 1
    assert wronskian(-1, 0, 0, -1) == 1
    assert wronskian(2, 1, 1, 1) == 1


@pytest.mark.parametrize("k", [0.0, 1e-4, -1.0, float("nan")])
def test_k_too_small(k):
    with pytest.raises(KTooSmall):
        solve(ScatterConfig(Gaussian(-3.0), LINEAR, SYM5), k)


def test_energy_must_be_positive():
    with pytest.raises(KTooSmall):
        solve_energy(ScatterConfig(Gaussian(-3.0), LINEAR, SYM5), 0.0)


def test_degenerate_denominator():
    zero = BasisEndpointData(5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(DegenerateDenominator):
        amplitudes_two_sided(zero, 1.0)
    with pytest.raises(DegenerateDenominator):
        amplitudes_half_interval(BasisEndpointData(5.0, 0.0, 0.0, 0.0, 0.0, 0.0), 1.0)


def test_half_interval_data_rejected_by_two_sided():
    with pytest.raises(ValueError):
        amplitudes_two_sided(BasisEndpointData(5.0, 1.0, 0.0, 0.0, 1.0, 1.0), 1.0)


def test_bad_right_incidence_option():
    with pytest.raises(ValueError):
        ScatterConfig(Gaussian(0.0), LINEAR, HALF5, half_interval_right="guess")


def test_fixed_step_mode_agrees_with_adaptive():
    pot, nl = PiecewiseGaussian(-3.0, 1.0, 0.8), NonlinearitySpec.kerr(1.0)
    a = solve_energy(ScatterConfig(pot, nl, SYM5), 2.0)
    b = solve_energy(ScatterConfig(pot, nl, SYM5, IntegratorConfig.fixed()), 2.0)
    assert abs(a.r_left - b.r_left) < 1e-8 and abs(a.t_right - b.t_right) < 1e-8


def test_free_space_basis_endpoints():
    ep = integrate_basis(ScatterConfig(Gaussian(0.0), LINEAR, ConfinementGeometry.symmetric(math.pi)), 1.0)
    got = [ep.u1, ep.du1, ep.v1, ep.dv1, ep.u2, ep.du2, ep.v2, ep.dv2]
    np.testing.assert_allclose(got, [-1, 0, 0, -1, -1, 0, 0, -1], atol=1e-8)
    assert ep.W1 == pytest.approx(1.0, abs=1e-8) and ep.W2 == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("k, L", [(0.5, 3.0), (2.0, 5.0)])
def test_free_space_half_interval_basis(k, L):
    ep = integrate_basis(ScatterConfig(Gaussian(0.0), LINEAR, ConfinementGeometry.half_interval(L)), k)
    np.testing.assert_allclose([ep.u1, ep.v1], [math.cos(k * L), math.sin(k * L) / k], atol=1e-8)
    assert ep.W == pytest.approx(1.0, abs=1e-8)


def test_fig1_wronskians_equal_but_not_one():
    ep = integrate_basis(ScatterConfig(Gaussian(-3.0), NonlinearitySpec.saturating(1.0), SYM5), 1.0)
    assert abs(ep.W1 - ep.W2) < 1e-8
    assert abs(ep.W1 - 1) > 1e-3
