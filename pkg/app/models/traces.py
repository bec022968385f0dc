"""
Sweep results. Plain dataclasses over numpy arrays; they are produced and
consumed by the numerical services and only become JSON/CSV at the edges.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class GainTrace:
    frequencies: np.ndarray
    sqrt_gs: np.ndarray
    sqrt_gi: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.frequencies) != len(self.sqrt_gs):
            raise ValueError("frequency and gain arrays differ in length")
        if self.sqrt_gi is not None and len(self.sqrt_gi) != len(self.sqrt_gs):
            raise ValueError("idler and signal arrays differ in length")

    @property
    def gain_db(self) -> np.ndarray:
        return 20 * np.log10(np.abs(self.sqrt_gs))

    @property
    def phase_deg(self) -> np.ndarray:
        return np.degrees(np.angle(self.sqrt_gs))

    @property
    def idler_gain_db(self) -> Optional[np.ndarray]:
        if self.sqrt_gi is None:
            return None
        with np.errstate(divide="ignore"):
            return 20 * np.log10(np.abs(self.sqrt_gi))


@dataclass(frozen=True)
class BandMetrics:
    center: float
    bandwidth: float
    ripple_db: float
    peak_gain_db: float


@dataclass(frozen=True)
class CompressionCurve:
    powers_dbm: np.ndarray
    gain_db: np.ndarray
    converged: np.ndarray
    phase_deg: np.ndarray = field(default=None)

    def __post_init__(self):
        if np.any(np.diff(self.powers_dbm) <= 0):
            raise ValueError("power grid must be strictly increasing")
        if self.phase_deg is None:
            object.__setattr__(self, "phase_deg", np.zeros_like(self.gain_db))


@dataclass(frozen=True)
class ImdPoint:
    pin_dbm: float
    v_tls3: float
    v_kerr3: float
    v_out3: float
    v_tls5: float
    v_out5: float
    im3_dbm: float
    tls3_dbm: float
    kerr3_dbm: float
    im5_dbm: float
    valid: bool


@dataclass(frozen=True)
class ImdCurve:
    delta_f: float
    points: tuple

    def __post_init__(self):
        powers = [p.pin_dbm for p in self.points]
        if any(b <= a for a, b in zip(powers, powers[1:])):
            raise ValueError("power grid must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])
