"""
TLS Intermodulation Service.
Single-pole susceptibility, the saturable-TLS functions Psi for the
third- and fifth-order products, their average over TLS detuning, and the
IM output of the amplifier versus input power (TLS term against Kerr term).
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import constants, integrate

from app.core.errors import NumericError, PoleError, QuadratureError
from app.models.traces import ImdCurve, ImdPoint

logger = logging.getLogger(__name__)

DEBYE = 1e-21 / constants.c
QUAD_EPSREL = 1e-8
ADIABATIC_LIMIT = 0.3
# below these the closed forms cancel catastrophically
PSI3_SERIES_BELOW = 1e-3
PSI5_SERIES_BELOW = 2e-2


@dataclass(frozen=True)
class SinglePoleParams:
    omega0: float
    omega_p: float
    kappa: float
    f_p: float
    mu_p: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise NumericError("kappa must be positive")
        if self.f_p < 0:
            raise NumericError("scaled pump f_p must be nonnegative")


@dataclass(frozen=True)
class TlsBathParams:
    """T1, T2 in s; dipole in C*m; t_diel in m."""
    t1: float
    t2: float
    qi: float
    dipole: float
    t_diel: float

    def __post_init__(self):
        for name in ("t1", "t2", "qi", "t_diel"):
            if getattr(self, name) <= 0:
                raise NumericError(f"TLS bath parameter {name} must be positive")

    def rho_v2(self, omega0: float) -> float:
        return rho_v2(omega0, self.qi)


@dataclass(frozen=True)
class ImdDriveMap:
    gain: float
    w: float
    g1: float
    g4: float
    z1: float
    z0: float
    f0: float
    k3: float

    def __post_init__(self):
        if self.gain <= 1:
            raise NumericError("IMD drive map needs power gain G > 1")
        for name in ("w", "g1", "g4", "z1", "z0", "f0"):
            if getattr(self, name) <= 0:
                raise NumericError(f"IMD drive map parameter {name} must be positive")
        if self.k3 < 0:
            raise NumericError("K3 must be nonnegative")

    @property
    def omega0(self) -> float:
        return 2 * math.pi * self.f0

    @property
    def kappa(self) -> float:
        return self.w * self.omega0 / self.g1

    @property
    def output_factor(self) -> float:
        """Mode-voltage to output-line voltage."""
        return math.sqrt(self.w * self.z0 / (self.g1 * self.g4 * self.z1))


def rho_v2(omega0: float, qi: float) -> float:
    return (3 / math.pi) * constants.hbar * omega0 ** 2 / qi


def scaled_pump_for_gain(gain: float) -> float:
    if gain < 1:
        raise NumericError("single-pole gain cannot be below 1")
    return math.sqrt(1 - gain ** -0.5)


def single_pole_gain(f_p: float) -> float:
    if not 0 <= f_p < 1:
        raise PoleError(f"f_p = {f_p} is at or beyond the oscillation threshold")
    return (1 - f_p ** 2) ** -2


def susceptibility(omega: float, sp: SinglePoleParams) -> complex:
    k = sp.kappa
    num = k - 1j * (omega + sp.omega0 - sp.omega_p)
    den = (k - 1j * (omega - sp.omega_p / 2)) ** 2 - k ** 2 * (sp.f_p ** 2 - sp.mu_p ** 2)
    if abs(den) < 1e-12 * k ** 2:
        raise PoleError(f"susceptibility pole at omega = {omega:.6e} rad/s")
    return (1j / sp.omega_p) * num / den


def _check_xi(xi: float) -> None:
    if xi < 0 or math.isnan(xi):
        raise NumericError(f"xi = {xi} must be nonnegative")


def psi3(xi: float) -> float:
    _check_xi(xi)
    if xi < PSI3_SERIES_BELOW:
        return xi ** 2 / 40 - xi ** 3 / 56 + 5 * xi ** 4 / 384
    root = math.sqrt(xi)
    return 0.25 * math.sqrt(xi + 1) + 0.75 * math.asinh(root) / root - 1


def psi5(xi: float) -> float:
    _check_xi(xi)
    if xi < PSI5_SERIES_BELOW:
        return xi ** 3 / 224 - xi ** 4 / 192 + 7 * xi ** 5 / 1408 - 15 * xi ** 6 / 3328
    root = math.sqrt(xi)
    num = 16 - 8 * xi + (xi - 16) * math.sqrt(1 + xi) + 15 * root * math.asinh(root)
    return num / (4 * xi)


PSI = {3: psi3, 5: psi5}


def averaged_psi(order: int, zeta_bar: float, t2: float) -> float:
    """
    Psi averaged over a flat TLS density in detuning, in rad/s:
    (1/T2) * integral du Psi(2 zeta/(1 + u^2)), mapped onto u = tan(t).
    """
    if order not in PSI:
        raise NumericError(f"no Psi function for order {order}")
    if zeta_bar < 0:
        raise NumericError(f"zeta_bar = {zeta_bar} must be nonnegative")
    if zeta_bar == 0:
        return 0.0
    psi = PSI[order]

    def integrand(t: float) -> float:
        c2 = math.cos(t) ** 2
        return psi(2 * zeta_bar * c2) / c2

    points = None
    if 2 * zeta_bar > 1:
        # saturation knee where the local xi crosses 1
        points = [math.acos(1 / math.sqrt(2 * zeta_bar))]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(
                integrand, 0.0, math.pi / 2, epsabs=0.0, epsrel=QUAD_EPSREL,
                limit=200, points=points,
            )
        except integrate.IntegrationWarning as e:
            raise QuadratureError(f"detuning average did not converge: {e}") from e
    return 2 * value / t2


def rabi_envelope(v_in: float, m: ImdDriveMap, bath: TlsBathParams) -> dict:
    if v_in < 0:
        raise NumericError("input amplitude must be nonnegative")
    v_d = v_in * math.sqrt(m.z1 * m.g1 / (m.w * m.z0))
    v_env = math.sqrt(2 * m.gain) * v_d
    omega_r = (bath.dipole / constants.hbar) * (v_env / bath.t_diel)
    return {
        "v_d": v_d,
        "v_env": v_env,
        "omega_r": omega_r,
        "zeta_bar": bath.t1 * bath.t2 * omega_r ** 2,
    }


def v_tls(order: int, v_in: float, m: ImdDriveMap, bath: TlsBathParams) -> float:
    """Magnitude of the TLS intermodulation voltage on the mode, volts."""
    env = rabi_envelope(v_in, m, bath)
    if env["omega_r"] == 0:
        return 0.0
    avg = averaged_psi(order, env["zeta_bar"], bath.t2)
    prefactor = 3 * m.gain / (4 * math.pi * bath.qi)
    return prefactor * m.omega0 * env["v_d"] / (m.kappa * bath.t1 * env["omega_r"] ** 2) * avg


def volts_to_dbm(v: float, z0: float) -> float:
    power = abs(v) ** 2 / (2 * z0)
    if power == 0:
        return -math.inf
    return 10 * math.log10(power / 1e-3)


def dbm_to_volts(p_dbm: float, z0: float) -> float:
    return math.sqrt(2 * z0 * 1e-3 * 10 ** (p_dbm / 10))


def is_adiabatic(delta_f: float, t2: float) -> bool:
    return 2 * math.pi * delta_f * t2 <= ADIABATIC_LIMIT


def im_output(v_in: float, delta_f: float, m: ImdDriveMap, bath: TlsBathParams) -> ImdPoint:
    """Third-order output is TLS minus Kerr; fifth-order carries the TLS term only."""
    factor = m.output_factor
    tls3 = v_tls(3, v_in, m, bath) * factor
    kerr3 = 0.75 * m.gain * m.k3 * v_in ** 3
    tls5 = v_tls(5, v_in, m, bath) * factor
    out3 = tls3 - kerr3
    return ImdPoint(
        pin_dbm=volts_to_dbm(v_in, m.z0),
        v_tls3=tls3,
        v_kerr3=kerr3,
        v_out3=out3,
        v_tls5=tls5,
        v_out5=tls5,
        im3_dbm=volts_to_dbm(out3, m.z0),
        tls3_dbm=volts_to_dbm(tls3, m.z0),
        kerr3_dbm=volts_to_dbm(kerr3, m.z0),
        im5_dbm=volts_to_dbm(tls5, m.z0),
        valid=is_adiabatic(delta_f, bath.t2),
    )


def imd_sweep(
    powers_dbm: Sequence[float], delta_f: float, m: ImdDriveMap, bath: TlsBathParams
) -> ImdCurve:
    points = tuple(im_output(dbm_to_volts(p, m.z0), delta_f, m, bath) for p in powers_dbm)
    if not is_adiabatic(delta_f, bath.t2):
        logger.warning(
            f"[IMD] tone spacing {delta_f:.3g} Hz outside the adiabatic regime; rows flagged invalid"
        )
    return ImdCurve(delta_f=delta_f, points=points)


def im3_dips(curve: ImdCurve) -> list:
    """Input powers of interior local minima of the total IM3 output."""
    im3 = curve.column("im3_dbm")
    pins = curve.column("pin_dbm")
    return [
        float(pins[i])
        for i in range(1, len(im3) - 1)
        if im3[i] < im3[i - 1] and im3[i] <= im3[i + 1]
    ]
