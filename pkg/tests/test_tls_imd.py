import dataclasses
import math

import numpy as np
import pytest
from scipy import constants, integrate

from app.core.errors import NumericError, PoleError
from app.services.tls_imd import (
    DEBYE,
    SinglePoleParams,
    TlsBathParams,
    averaged_psi,
    dbm_to_volts,
    im3_dips,
    im_output,
    imd_sweep,
    psi3,
    psi5,
    rabi_envelope,
    rho_v2,
    scaled_pump_for_gain,
    single_pole_gain,
    susceptibility,
    v_tls,
)

W0 = 2 * math.pi * 4.6e9
KAPPA = 2 * math.pi * 50e6


def _params(f_p, mu_p=0.0):
    return SinglePoleParams(omega0=W0, omega_p=2 * W0, kappa=KAPPA, f_p=f_p, mu_p=mu_p)


def _adiabatic_psi(order, xi):
    """
    cos(k dw t) harmonic of the saturated TLS response, averaged over dipole
    orientation (mu = cos theta, uniform on [0, 1]) in the adiabatic limit.
    """
    k = (order - 1) // 2
    nodes, weights = np.polynomial.legendre.leggauss(64)
    mu, weights = 0.5 * (nodes + 1), 0.5 * weights
    phi = 2 * np.pi * np.arange(256) / 256
    saturation = 1 / (1 + 0.5 * xi * mu[:, None] ** 2 * (1 + np.cos(phi)[None, :]))
    harmonic = np.mean(saturation * np.cos(k * phi)[None, :], axis=1)
    return (-1) ** k * 0.5 * xi * np.sum(weights * mu ** 2 * harmonic)


def _slope(f, x_lo, x_hi):
    return math.log(f(x_hi) / f(x_lo)) / math.log(x_hi / x_lo)


def _bloch_im3_average(zeta_bar, t1_over_t2, dw_t2=0.05, n_detunings=201, n_samples=512):
    """
    Two-tone Bloch equations in units of T2, integrated in time over a grid of
    TLS detunings and dipole orientations. Returns the detuning integral of the
    absorptive 2w1 - w2 component, normalised like averaged_psi(3, zeta_bar, 1).
    """
    t1 = t1_over_t2
    delta = np.linspace(-10, 10, n_detunings)[:, None]
    nodes, weights = np.polynomial.legendre.leggauss(10)
    mu, weights = 0.5 * (nodes + 1), 0.5 * weights
    peak_rabi = math.sqrt(2 * zeta_bar / t1)
    rabi = peak_rabi * mu[None, :]
    shape = (n_detunings, len(mu))
    size = shape[0] * shape[1]

    def rhs(t, state):
        x, y, z = state.reshape(3, *shape)
        drive = rabi * math.cos(0.5 * dw_t2 * t)
        return np.concatenate([
            (-delta * y - x).ravel(),
            (delta * x - drive * z - y).ravel(),
            (drive * y - (z + 1) / t1).ravel(),
        ])

    # start on the steady state at the envelope maximum
    den = 1 + delta ** 2 + rabi ** 2 * t1
    y0 = rabi / den
    start = np.concatenate([(-delta * y0).ravel(), y0.ravel(), (-(1 + delta ** 2) / den).ravel()])
    period = 4 * math.pi / dw_t2
    t_eval = 20.0 + period * np.arange(n_samples) / n_samples
    sol = integrate.solve_ivp(rhs, (0.0, t_eval[-1]), start, t_eval=t_eval, rtol=1e-6, atol=1e-9)
    assert sol.success

    y = sol.y[size:2 * size].reshape(*shape, n_samples)
    im3 = 2 * np.mean(y * np.exp(1.5j * dw_t2 * t_eval), axis=-1)
    total = integrate.trapezoid(im3 @ (weights * mu), delta[:, 0])
    return zeta_bar / peak_rabi * abs(total)


def test_unpumped_resonance():
    assert susceptibility(W0, _params(0.0)) == pytest.approx(1j / (2 * W0 * KAPPA))


def test_susceptibility_at_design_gain():
    f_p = scaled_pump_for_gain(100)
    assert susceptibility(W0, _params(f_p)) * 2 * W0 * KAPPA == pytest.approx(10j, rel=1e-10)


def test_susceptibility_half_pump():
    chi = susceptibility(W0, _params(0.5))
    assert abs(chi) * 2 * W0 * KAPPA == pytest.approx(4 / 3)
    assert single_pole_gain(0.5) == pytest.approx(16 / 9)


@pytest.mark.parametrize("f_p", np.linspace(0, 0.9, 10))
def test_susceptibility_tracks_gain(f_p):
    chi = susceptibility(W0, _params(f_p))
    assert abs(chi) * 2 * W0 * KAPPA == pytest.approx(math.sqrt(single_pole_gain(f_p)), rel=1e-10)


def test_susceptibility_pole():
    with pytest.raises(PoleError):
        susceptibility(W0, _params(1.0))


def test_gain_and_pump_are_inverse():
    assert single_pole_gain(scaled_pump_for_gain(37.0)) == pytest.approx(37.0)
    with pytest.raises(PoleError):
        single_pole_gain(1.0)


def test_psi_values():
    assert psi3(0.0) == 0.0
    assert psi5(0.0) == 0.0
    assert psi3(1.0) == pytest.approx(0.014583, rel=1e-4)
    assert psi5(1.0) == pytest.approx(0.0018501, rel=1e-4)


def test_psi3_small_argument():
    assert psi3(0.01) == pytest.approx(2.5e-6, rel=0.01)
    assert psi3(1e-4) / 1e-8 == pytest.approx(1 / 40, rel=0.005)


def test_psi5_small_argument_is_cubic():
    ratios = [psi5(x) / x ** 3 for x in np.logspace(-4, math.log10(5e-3), 20)]
    assert max(ratios) / min(ratios) - 1 < 0.01


def test_psi_branches_join_smoothly():
    for psi, edge in ((psi3, 1e-3), (psi5, 2e-2)):
        below, above = psi(edge * (1 - 1e-9)), psi(edge)
        assert above == pytest.approx(below, rel=1e-5)


def test_psi_monotone_and_nonnegative():
    xi = np.logspace(-4, 3, 200)
    for psi in (psi3, psi5):
        values = np.array([psi(x) for x in xi])
        assert np.all(values > 0)
        assert np.all(np.diff(values) > 0)


def test_psi_rejects_negative():
    with pytest.raises(NumericError):
        psi3(-0.1)
    with pytest.raises(NumericError):
        psi5(-0.1)


@pytest.mark.parametrize("xi", [0.1, 1.0, 10.0])
def test_psi_matches_adiabatic_harmonic(xi):
    assert psi3(xi) == pytest.approx(_adiabatic_psi(3, xi), rel=1e-6)
    assert psi5(xi) == pytest.approx(_adiabatic_psi(5, xi), rel=1e-6)


def test_averaged_psi_zero_drive():
    assert averaged_psi(3, 0.0, 1.0) == 0.0


def test_averaged_psi_scales_with_t2():
    assert averaged_psi(3, 1.0, 2.0) == pytest.approx(0.5 * averaged_psi(3, 1.0, 1.0), rel=1e-7)


@pytest.mark.parametrize("zeta_bar", [0.1, 1.0, 10.0])
def test_averaged_psi_midpoint_cross_check(zeta_bar):
    n = 20001
    t = -math.pi / 2 + math.pi * (np.arange(n) + 0.5) / n
    c2 = np.cos(t) ** 2
    for order, psi in ((3, psi3), (5, psi5)):
        integrand = np.array([psi(2 * zeta_bar * c) for c in c2]) / c2
        brute = np.sum(integrand) * math.pi / n
        assert averaged_psi(order, zeta_bar, 1.0) == pytest.approx(brute, rel=1e-6)


@pytest.mark.parametrize("zeta_bar", [0.1, 1.0, 10.0])
def test_averaged_psi_on_detuning_grid(zeta_bar):
    t2 = 4e-6
    detunings = np.linspace(-10 / t2, 10 / t2, 201)
    values = [psi3(2 * zeta_bar / (1 + (t2 * d) ** 2)) for d in detunings]
    grid = integrate.trapezoid(values, detunings)
    assert averaged_psi(3, zeta_bar, t2) == pytest.approx(grid, rel=0.05)


def test_averaged_psi_low_drive_limit():
    zeta_bar = 1e-3
    assert averaged_psi(3, zeta_bar, 1.0) == pytest.approx(math.pi * zeta_bar ** 2 / 20, rel=1e-2)


def test_averaged_psi_increasing():
    values = [averaged_psi(3, z, 1.0) for z in np.logspace(-3, 3, 25)]
    assert np.all(np.diff(values) > 0)


def test_rabi_envelope_zero_input(drive_map, bath):
    env = rabi_envelope(0.0, drive_map, bath)
    assert env == {"v_d": 0.0, "v_env": 0.0, "omega_r": 0.0, "zeta_bar": 0.0}


def test_drive_voltage_mapping(drive_map, bath):
    assert rabi_envelope(1e-6, drive_map, bath)["v_d"] == pytest.approx(0.781e-6, rel=1e-3)


def test_rabi_frequency_for_one_microvolt(drive_map, bath):
    v_in = 1e-6 / (math.sqrt(2 * drive_map.gain) * 0.781486)
    env = rabi_envelope(v_in, drive_map, bath)
    assert env["v_env"] == pytest.approx(1e-6, rel=1e-5)
    assert env["omega_r"] == pytest.approx(3.16e5, rel=2e-3)


def test_debye_constant():
    assert DEBYE == pytest.approx(3.33564e-30, rel=1e-5)


def test_spectral_density_helper(bath):
    assert bath.rho_v2(W0) == rho_v2(W0, 250) == pytest.approx(3 / math.pi * constants.hbar * W0 ** 2 / 250)


def test_tls_term_is_cubic_at_low_power(drive_map, bath):
    slope = _slope(
        lambda v: v_tls(3, v, drive_map, bath), dbm_to_volts(-190, 50), dbm_to_volts(-170, 50)
    )
    assert slope == pytest.approx(3.0, abs=0.02)


def test_fifth_order_term_slope(drive_map, bath):
    slope = _slope(
        lambda v: v_tls(5, v, drive_map, bath), dbm_to_volts(-190, 50), dbm_to_volts(-170, 50)
    )
    assert slope == pytest.approx(5.0, abs=0.05)


def test_tls_term_levels_off(drive_map, bath):
    slope = _slope(
        lambda v: v_tls(3, v, drive_map, bath), dbm_to_volts(-90, 50), dbm_to_volts(-80, 50)
    )
    assert slope < 1.0


def test_zero_input_gives_zero_tls_voltage(drive_map, bath):
    assert v_tls(3, 0.0, drive_map, bath) == 0.0


def _tls_term_from_bloch(zeta_bar, drive_map, bath):
    """(v_tls3, the same term with the Bloch-integrated detuning average)."""
    unit = rabi_envelope(1e-6, drive_map, bath)["zeta_bar"]
    v_in = 1e-6 * math.sqrt(zeta_bar / unit)
    env = rabi_envelope(v_in, drive_map, bath)
    average = _bloch_im3_average(env["zeta_bar"], bath.t1 / bath.t2) / bath.t2
    prefactor = 3 * drive_map.gain / (4 * math.pi * bath.qi)
    scale = drive_map.omega0 * env["v_d"] / (drive_map.kappa * bath.t1 * env["omega_r"] ** 2)
    return v_tls(3, v_in, drive_map, bath), prefactor * scale * average


def test_bloch_integration_matches_tls_term_below_saturation(drive_map, bath):
    closed, integrated = _tls_term_from_bloch(0.1, drive_map, bath)
    assert integrated == pytest.approx(closed, rel=0.1)


@pytest.mark.parametrize("zeta_bar, ratio", [(1.0, 0.846), (10.0, 0.583)])
def test_bloch_integration_falls_below_closed_form_when_saturated(drive_map, bath, zeta_bar, ratio):
    # the closed form keeps only the first beat harmonic of the saturation factor
    closed, integrated = _tls_term_from_bloch(zeta_bar, drive_map, bath)
    assert integrated / closed == pytest.approx(ratio, abs=0.03)


def test_single_dip_between_regimes(drive_map, bath):
    curve = imd_sweep(np.linspace(-140, -80, 121), 1e3, drive_map, bath)
    dips = im3_dips(curve)
    assert len(dips) == 1
    assert -120 <= dips[0] <= -95
    difference = curve.column("v_tls3") - curve.column("v_kerr3")
    assert difference[0] > 0 > difference[-1]


def test_kerr_free_output_is_pure_tls(drive_map, bath):
    kerr_free = dataclasses.replace(drive_map, k3=0.0)
    curve = imd_sweep(np.linspace(-140, -60, 41), 1e3, kerr_free, bath)
    assert np.array_equal(curve.column("im3_dbm"), curve.column("tls3_dbm"))
    assert np.all(np.diff(curve.column("im3_dbm")) >= 0)


def test_tls_free_output_is_pure_kerr(drive_map):
    clean = TlsBathParams(t1=2e-6, t2=4e-6, qi=1e12, dipole=DEBYE, t_diel=100e-9)
    curve = imd_sweep(np.linspace(-140, -60, 41), 1e3, drive_map, clean)
    assert np.allclose(curve.column("im3_dbm"), curve.column("kerr3_dbm"), atol=0.01)
    im3 = curve.column("im3_dbm")
    assert (im3[-1] - im3[0]) / 80 == pytest.approx(3.0, abs=1e-3)


def test_fifth_order_has_no_kerr_term(drive_map, bath):
    point = im_output(dbm_to_volts(-110, 50), 1e3, drive_map, bath)
    assert point.v_out5 == point.v_tls5
    assert point.im5_dbm < point.tls3_dbm


def test_validity_flag(drive_map, bath):
    powers = np.linspace(-140, -80, 5)
    assert all(p.valid for p in imd_sweep(powers, 1e3, drive_map, bath).points)
    assert not any(p.valid for p in imd_sweep(powers, 2e4, drive_map, bath).points)
