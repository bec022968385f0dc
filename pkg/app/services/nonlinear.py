"""
Nonlinear Service.
Pump linearisation of the snake (inverse-inductance modulation -> J_PA),
the operating-point tune-up, perturbative gain compression, P1dB/K3
extraction and the compression-only system noise model.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import constants, optimize

from app.core.config import settings
from app.core.errors import ConfigError, ConvergenceError, NotFoundError, PumpError
from app.models.design import ComponentSet, SnakeParams
from app.models.traces import CompressionCurve
from app.services.abcd_engine import cascade, lesa_netlist, netlist_gain, signal_elements
from app.services.synthesis import SINGULARITY_TOL, snake_inductance, solve_bias

logger = logging.getLogger(__name__)

PUMP_SAMPLES = 1024
DAMPING = 0.5
GAIN_TOL_DB = 1e-3
MAX_ITERATIONS = 100
# 1 - 10^(-1/20) scaled by 4/3
K3_ONE_DB = (4 / 3) * (1 - 10 ** (-1 / 20))


@dataclass(frozen=True)
class PumpOperatingPoint:
    delta0: float
    delta_p: float
    omega_p: float

    def __post_init__(self):
        if self.delta_p < 0:
            raise PumpError(f"pump amplitude {self.delta_p} rad is negative")


@dataclass(frozen=True)
class PumpResponse:
    l_eff: float
    j_pa: float
    modulation: float


@dataclass(frozen=True)
class NoiseModelParams:
    t_hemt: float
    f0: float

    def __post_init__(self):
        if self.t_hemt <= 0:
            raise ConfigError("HEMT noise temperature must be positive", key="t_hemt_k")

    @property
    def t_q(self) -> float:
        return constants.h * self.f0 / constants.k


def _array_inductance(s: SnakeParams, delta: np.ndarray) -> np.ndarray:
    cos = np.cos(delta)
    den = s.lj + (4 * s.l1s + s.l2s) * cos
    if np.min(np.abs(den)) <= SINGULARITY_TOL * s.lj:
        raise PumpError("pump swings the snake through its inductance singularity")
    return s.n_stages * (s.lj * (s.l1s + s.l2s) + s.l1s * s.l2s * cos) / den


def _pump_phases(delta0: float, delta_p: float, n_samples: int) -> np.ndarray:
    t = 2 * np.pi * np.arange(n_samples) / n_samples
    return delta0 + delta_p * np.cos(t)


def _snake_waveform(s: SnakeParams, delta: np.ndarray, offset: float = 0.0) -> np.ndarray:
    """L(t) with the two arrays shifted to delta -/+ offset and combined in parallel."""
    la = _array_inductance(s, delta - offset)
    lb = _array_inductance(s, delta + offset)
    return s.lb + la * lb / (la + lb)


def _first_harmonics(samples: np.ndarray):
    spectrum = np.fft.rfft(samples) / len(samples)
    return spectrum[0].real, 2 * abs(spectrum[1])


def snake_harmonics(s: SnakeParams, delta0: float, delta_p: float, n_samples: int = PUMP_SAMPLES) -> Dict[str, float]:
    """dc and first-harmonic amplitudes of L(t) and 1/L(t) over one pump period."""
    l_t = _snake_waveform(s, _pump_phases(delta0, delta_p, n_samples))
    l_dc, l_first = _first_harmonics(l_t)
    inv_dc, inv_first = _first_harmonics(1 / l_t)
    return {"l_dc": l_dc, "l_first": l_first, "inv_dc": inv_dc, "inv_first": inv_first}


def pump_to_jpa(
    s: SnakeParams, op: PumpOperatingPoint, omega0: float, offset: float = 0.0
) -> PumpResponse:
    """
    Linearise the pumped snake: the dc part of 1/L(t) sets L_eff, half of its
    fractional first-harmonic modulation acts as the parametric admittance.
    """
    delta = _pump_phases(op.delta0, op.delta_p, PUMP_SAMPLES)
    inv_dc, inv_first = _first_harmonics(1 / _snake_waveform(s, delta, offset))
    l_eff = 1 / inv_dc
    m = inv_first * l_eff if op.delta_p > 0 else 0.0
    return PumpResponse(l_eff=l_eff, j_pa=m / (2 * omega0 * l_eff), modulation=m)


def _reflection(c: ComponentSet, response: PumpResponse, omega: float) -> complex:
    j = response.j_pa if response.j_pa > 0 else None
    s11, _ = netlist_gain(lesa_netlist(c, j, l_snake=response.l_eff), omega)
    return s11


def center_gain_db(c: ComponentSet, response: PumpResponse) -> float:
    return 20 * math.log10(abs(_reflection(c, response, c.omega0)))


def solve_operating_point(
    s: SnakeParams,
    c: ComponentSet,
    target_gain_db: float,
    delta_p_max: float = 1.5,
    step: float = 0.02,
) -> PumpOperatingPoint:
    """
    Tune-up: hold the dc phase at the static bias of the synthesised snake and
    root-find the pump amplitude giving the target centre gain. The pumped
    L_eff drifts above L_snake; the netlist carries that drift. Scans upward
    so the first crossing is below threshold.
    """
    omega0 = c.omega0
    delta0 = solve_bias(s, c.l_snake)

    def gain_minus_target(dp: float) -> float:
        response = pump_to_jpa(s, PumpOperatingPoint(delta0, dp, 2 * omega0), omega0)
        return center_gain_db(c, response) - target_gain_db

    grid = np.arange(step, delta_p_max + step / 2, step)
    previous = gain_minus_target(0.0)
    lower = 0.0
    for dp in grid:
        current = gain_minus_target(dp)
        if previous < 0 <= current:
            delta_p = optimize.brentq(gain_minus_target, lower, dp, xtol=1e-10)
            logger.info(
                f"[Compress] operating point: delta0={delta0:.5f} rad, delta_p={delta_p:.5f} rad"
            )
            return PumpOperatingPoint(delta0, delta_p, 2 * omega0)
        previous, lower = current, dp
    raise PumpError(f"no pump amplitude below {delta_p_max} rad reaches {target_gain_db} dB")


def _snake_current(
    c: ComponentSet, response: PumpResponse, s11: complex, v_inc: float, omega: float
) -> float:
    """Signal current amplitude through the snake for an incident wave v_inc."""
    port = np.array([v_inc * (1 + s11), v_inc * (1 - s11) / c.z0])
    # stop short of the snake shunt so the solve lands on the snake node
    t = cascade(signal_elements(c, response.l_eff)[:-1], omega)
    v_node = np.linalg.solve(t.matrix, port)[0]
    return abs(v_node / (1j * omega * response.l_eff))


def _compress_point(
    c: ComponentSet, s: SnakeParams, op: PumpOperatingPoint, p_dbm: float, omega: float
):
    v_inc = math.sqrt(2 * c.z0 * 1e-3 * 10 ** (p_dbm / 10))
    phase_per_amp = 2 * math.pi / constants.physical_constants["mag. flux quantum"][0]
    l_static = snake_inductance(s, op.delta0)
    omega0 = c.omega0

    offset = 0.0
    response = pump_to_jpa(s, op, omega0)
    s11 = _reflection(c, response, omega)
    gain = 20 * math.log10(abs(s11))
    for _ in range(MAX_ITERATIONS):
        i_s = _snake_current(c, response, s11, v_inc, omega)
        delta_s = phase_per_amp * l_static * i_s
        offset = DAMPING * offset + (1 - DAMPING) * delta_s / s.n_total
        response = pump_to_jpa(s, op, omega0, offset=offset)
        s11 = _reflection(c, response, omega)
        new_gain = 20 * math.log10(abs(s11))
        if abs(new_gain - gain) < GAIN_TOL_DB:
            return new_gain, math.degrees(np.angle(s11)), True
        gain = new_gain
    logger.warning(f"[Compress] no convergence at {p_dbm:.2f} dBm")
    return gain, math.degrees(np.angle(s11)), False


def compression_sweep(
    c: ComponentSet,
    s: SnakeParams,
    op: PumpOperatingPoint,
    powers_dbm: Sequence[float],
    f_signal: Optional[float] = None,
) -> CompressionCurve:
    """Gain versus input power at the amplifier port, one fixed point per power."""
    powers = np.asarray(powers_dbm, dtype=float)
    omega = 2 * math.pi * (f_signal if f_signal is not None else c.f0)

    def run(p: float):
        return _compress_point(c, s, op, p, omega)

    if settings.SWEEP_WORKERS > 1:
        with ThreadPoolExecutor(max_workers=settings.SWEEP_WORKERS) as pool:
            results = list(pool.map(run, powers))
    else:
        results = [run(p) for p in powers]

    gain, phase, converged = (np.array(col) for col in zip(*results))
    if not converged.any():
        raise ConvergenceError("no compression point converged")
    logger.info(f"[Compress] {converged.sum()}/{len(powers)} points converged")
    return CompressionCurve(powers_dbm=powers, gain_db=gain, converged=converged, phase_deg=phase)


def p1db(curve: CompressionCurve) -> Dict[str, float]:
    gain = curve.gain_db
    target = gain[0] - 1
    below = np.nonzero(gain <= target)[0]
    if len(below) == 0 or below[0] == 0:
        raise NotFoundError("gain never compresses by 1 dB in the sweep")
    i = below[0]
    p0, p1 = curve.powers_dbm[i - 1], curve.powers_dbm[i]
    g0, g1 = gain[i - 1], gain[i]
    p_in = p0 + (target - g0) * (p1 - p0) / (g1 - g0)
    return {"input_p1db_dbm": float(p_in), "output_p1db_dbm": float(p_in + target)}


def phase_change_at(curve: CompressionCurve, p_in: float) -> float:
    """Signal phase change relative to the lowest-power point, degrees."""
    phase = np.unwrap(np.radians(curve.phase_deg))
    value = np.interp(p_in, curve.powers_dbm, phase) - phase[0]
    return float(np.degrees(value))


def k3_from_p1db(input_p1db_dbm: float, z0: float = 50.0) -> float:
    """Kerr coefficient in 1/V^2 from the peak voltage at the 1 dB point."""
    power = 1e-3 * 10 ** (input_p1db_dbm / 10)
    v1db = math.sqrt(2 * z0 * power)
    if v1db == 0:
        return math.inf
    return K3_ONE_DB / v1db ** 2


def k3_per_uv2(k3: float) -> float:
    return k3 * 1e-12


def system_noise_model(curve: CompressionCurve, nm: NoiseModelParams) -> np.ndarray:
    """Noise change in dB relative to the lowest power from gain compression alone."""
    gain = 10 ** (curve.gain_db / 10)
    noise = gain * nm.t_q + nm.t_hemt
    return 10 * np.log10(noise / noise[0])
