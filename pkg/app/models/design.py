"""
Design-side data models.
Frequencies are carried in Hz at the boundaries; every derived angular quantity
is exposed as a property in rad/s.
"""
import math
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import constants


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ChebyshevPrototype(_Frozen):
    """Ladder g0..g_{N+1} of a matched-amplifier prototype."""
    order: int = Field(ge=1)
    g: Tuple[float, ...]
    design_gain_db: float = 20.0
    ripple_db: float = 0.5

    @property
    def design_gain(self) -> float:
        return 10 ** (self.design_gain_db / 10)


class BandSpec(_Frozen):
    f0: float = Field(gt=0)
    fractional_bandwidth: float = Field(ge=0, lt=1)

    @property
    def omega0(self) -> float:
        return 2 * math.pi * self.f0

    @property
    def delta_omega(self) -> float:
        return self.fractional_bandwidth * self.omega0


class ReducedCouplings(_Frozen):
    """gamma0 in rad/s; chain betas ordered beta_12, beta_23, ...; all dimensionless."""
    gamma0: float
    betas: Tuple[float, ...]
    beta_p: float

    @property
    def beta12(self) -> float:
        return self.betas[0]

    @property
    def beta23(self) -> float:
        return self.betas[1]


class ImpedancePlan(_Frozen):
    z1: float = Field(gt=0)
    z2: float = Field(gt=0)
    z3: float = Field(gt=0)
    z0: float = Field(gt=0)


class SnakeParams(_Frozen):
    """Two parallel rf-SQUID arrays of n_total/2 stages each, plus stray inductance."""
    n_total: int = Field(gt=0)
    ic: float = Field(gt=0)
    l1s: float = Field(ge=0)
    l2s: float = Field(ge=0)
    lb: float = Field(default=50e-12, ge=0)

    @field_validator("n_total")
    @classmethod
    def check_even(cls, v: int) -> int:
        if v % 2:
            raise ValueError("n_total must be even (two parallel arrays)")
        return v

    @property
    def n_stages(self) -> int:
        return self.n_total // 2

    @property
    def lj(self) -> float:
        return constants.hbar / (2 * constants.e * self.ic)


class InverterRealization(_Frozen):
    j: float
    b0: float
    b1: float
    theta_comp_deg: float


class ComponentSet(_Frozen):
    """Physical element values of the amplifier, SI units, angles in degrees."""
    c1: float
    c2: float
    c12: float
    c23: float
    l2: float
    l34: float
    z3: float
    theta_deg: float
    theta_trim_deg: float = 0.0
    l_snake: float
    f0: float
    z0: float = 50.0

    @property
    def omega0(self) -> float:
        return 2 * math.pi * self.f0

    @property
    def effective_theta_deg(self) -> float:
        return self.theta_deg + self.theta_trim_deg

    def formatted(self) -> dict:
        """Values at the precision they are usually quoted with."""
        return {
            "c1_pf": round(self.c1 * 1e12, 3),
            "c2_pf": round(self.c2 * 1e12, 3),
            "c12_pf": round(self.c12 * 1e12, 3),
            "c23_pf": round(self.c23 * 1e12, 3),
            "l2_nh": round(self.l2 * 1e9, 3),
            "l34_nh": round(self.l34 * 1e9, 3),
            "l_snake_ph": round(self.l_snake * 1e12, 2),
            "theta_deg": round(self.theta_deg, 1),
            "theta_effective_deg": round(self.effective_theta_deg, 1),
        }
