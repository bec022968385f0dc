"""
Coupled-mode gain engine.
Builds the 2N x 2N equations-of-motion matrix of a chain of resonant modes
(port mode N ... parametric mode 1, then the conjugate copies) and reads the
signal and idler amplitude gains off the first column of its inverse.
"""
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy import linalg

from app.core.config import settings
from app.core.errors import ConfigError, NoBandError, ThresholdError
from app.models.design import ReducedCouplings
from app.models.traces import BandMetrics, GainTrace

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class ModeGraph:
    """Chain of `order` modes; pump sits at exactly twice omega0."""
    order: int
    omega0: float
    couplings: ReducedCouplings

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError("mode graph needs at least one mode")
        if len(self.couplings.betas) != self.order - 1:
            raise ConfigError(
                f"order {self.order} needs {self.order - 1} chain couplings, "
                f"got {len(self.couplings.betas)}"
            )
        values = (self.couplings.gamma0, self.couplings.beta_p, *self.couplings.betas)
        if not np.all(np.isfinite(values)):
            raise ConfigError("mode graph couplings must be finite")


def build_matrix(graph: ModeGraph, omega: float) -> np.ndarray:
    n = graph.order
    c = graph.couplings
    detuning = (omega - graph.omega0) / c.gamma0
    m = np.zeros((2 * n, 2 * n), dtype=complex)

    for k in range(1, n + 1):
        delta = detuning + (0.5j if k == n else 0)
        m[n - k, n - k] = delta
        m[n - 1 + k, n - 1 + k] = delta

    for k, beta in enumerate(c.betas, start=1):
        # mode k <-> k+1, and the conjugate pair with opposite sign
        m[n - k, n - k - 1] = m[n - k - 1, n - k] = beta
        m[n - 1 + k, n + k] = m[n + k, n - 1 + k] = -beta

    m[n - 1, n] = c.beta_p
    m[n, n - 1] = -np.conj(c.beta_p)
    return m


def solve_gains(m: np.ndarray) -> Tuple[complex, complex]:
    """(sqrt Gs, sqrt Gi) from the first column of the inverse."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(m, check_finite=True)
    scale = np.max(np.abs(m))
    if np.min(np.abs(np.diag(lu))) < PIVOT_TOL * scale:
        raise ThresholdError("coupled-mode matrix is singular (oscillation threshold)")
    rhs = np.zeros(m.shape[0], dtype=complex)
    rhs[0] = 1.0
    column = linalg.lu_solve((lu, piv), rhs)
    return 1j * column[0] - 1, 1j * column[-1]


def _solve_at(graph: ModeGraph, f: float) -> Tuple[complex, complex]:
    try:
        return solve_gains(build_matrix(graph, 2 * np.pi * f))
    except ThresholdError as e:
        raise ThresholdError(f"{e} at {f / 1e9:.6f} GHz", frequency_hz=f) from e


def sweep(graph: ModeGraph, f_start: float, f_stop: float, n_points: int) -> GainTrace:
    if not f_start < f_stop or n_points < 2:
        raise ConfigError("sweep needs f_start < f_stop and at least two points")
    freqs = np.linspace(f_start, f_stop, n_points)

    if settings.SWEEP_WORKERS > 1:
        with ThreadPoolExecutor(max_workers=settings.SWEEP_WORKERS) as pool:
            results = list(pool.map(lambda f: _solve_at(graph, f), freqs))
    else:
        results = [_solve_at(graph, f) for f in freqs]

    gs, gi = zip(*results)
    logger.info(f"[Gain] coupled-mode sweep: {n_points} points, order {graph.order}")
    return GainTrace(frequencies=freqs, sqrt_gs=np.array(gs), sqrt_gi=np.array(gi))


def _contiguous_around(mask: np.ndarray, index: int) -> Tuple[int, int]:
    lo = hi = index
    while lo > 0 and mask[lo - 1]:
        lo -= 1
    while hi < len(mask) - 1 and mask[hi + 1]:
        hi += 1
    return lo, hi


def band_metrics(trace: GainTrace, design_gain_db: float) -> BandMetrics:
    gain = trace.gain_db
    if len(gain) == 0:
        raise NoBandError("empty trace")
    peak = int(np.argmax(gain))
    if gain[peak] < design_gain_db - 3:
        raise NoBandError(
            f"peak gain {gain[peak]:.2f} dB never reaches {design_gain_db - 3:.2f} dB"
        )
    f = trace.frequencies
    lo, hi = _contiguous_around(gain >= design_gain_db - 3, peak)
    center = 0.5 * (f[lo] + f[hi])
    bandwidth = f[hi] - f[lo]

    rlo, rhi = _contiguous_around(gain >= design_gain_db - 1, peak)
    if gain[peak] >= design_gain_db - 1:
        in_band = gain[rlo:rhi + 1]
        ripple = float(in_band.max() - in_band.min())
    else:
        ripple = float("nan")
    return BandMetrics(
        center=float(center), bandwidth=float(bandwidth),
        ripple_db=ripple, peak_gain_db=float(gain[peak]),
    )


def effective_damping(couplings: ReducedCouplings) -> float:
    """
    Reduced damping mode 1 sees on resonance: the port rate 1/2 carried
    down the chain through beta_{k,k+1}^2 / eta_{k+1}.
    """
    eta = 0.5
    for beta in reversed(couplings.betas):
        eta = beta ** 2 / eta
    return eta


def metrics_dict(m: BandMetrics) -> Dict[str, float]:
    return {
        "center_hz": m.center,
        "bandwidth_hz": m.bandwidth,
        "ripple_db": m.ripple_db,
        "peak_gain_db": m.peak_gain_db,
    }
