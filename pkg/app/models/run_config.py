"""
Run configuration.
One pydantic model per INI section; unknown keys are rejected and units are
carried in the key suffix (_hz, _s, _h, _a, _dbm, ...).
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.errors import ConfigError
from app.models.design import BandSpec, ChebyshevPrototype, ImpedancePlan, SnakeParams

SECTION_NAMES = ("design", "snake", "pump", "tls", "sweep")


def _split_list(v):
    if isinstance(v, str):
        return [item for item in (part.strip() for part in v.split(",")) if item]
    return v


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class DesignSection(_Section):
    f0_hz: float = Field(gt=0)
    fractional_bandwidth: float = Field(ge=0, lt=1)
    g: List[float] = Field(min_length=3)
    z1: float = Field(gt=0)
    z2: float = Field(gt=0)
    z3: float = Field(gt=0)
    z0: float = Field(default=50.0, gt=0)
    theta_trim_deg: float = 0.0
    design_gain_db: float = 20.0
    ripple_db: float = 0.5

    @field_validator("g", mode="before")
    @classmethod
    def split_g(cls, v):
        return _split_list(v)

    @property
    def order(self) -> int:
        return len(self.g) - 2

    def prototype(self) -> ChebyshevPrototype:
        return ChebyshevPrototype(
            order=self.order,
            g=tuple(self.g),
            design_gain_db=self.design_gain_db,
            ripple_db=self.ripple_db,
        )

    def band(self) -> BandSpec:
        return BandSpec(f0=self.f0_hz, fractional_bandwidth=self.fractional_bandwidth)

    def plan(self) -> ImpedancePlan:
        return ImpedancePlan(z1=self.z1, z2=self.z2, z3=self.z3, z0=self.z0)


class SnakeSection(_Section):
    n_total: int = Field(gt=0)
    ic_a: float = Field(gt=0)
    l1s_h: float = Field(ge=0)
    l2s_h: float = Field(ge=0)
    lb_h: float = Field(default=50e-12, ge=0)

    def params(self) -> SnakeParams:
        return SnakeParams(
            n_total=self.n_total, ic=self.ic_a, l1s=self.l1s_h, l2s=self.l2s_h, lb=self.lb_h
        )


class PumpSection(_Section):
    """Either a fixed pump amplitude or a target centre gain to tune to."""
    delta_p_rad: Optional[float] = Field(default=None, ge=0)
    target_gain_db: Optional[float] = None
    t_hemt_k: float = Field(default=2.5, gt=0)

    @model_validator(mode="after")
    def check_one_of(self):
        if self.delta_p_rad is not None and self.target_gain_db is not None:
            raise ValueError("set either delta_p_rad or target_gain_db, not both")
        if self.delta_p_rad is None and self.target_gain_db is None:
            raise ValueError("set one of delta_p_rad or target_gain_db")
        return self


class TlsSection(_Section):
    """
    Bath and drive-map parameters for the IMD model. Amplifier values left
    unset fall back to the [design] section.
    """
    t1_s: float = Field(gt=0)
    t2_s: float = Field(gt=0)
    qi: float = Field(gt=0)
    dipole_debye: float = Field(default=1.0, ge=0)
    t_diel_m: float = Field(default=100e-9, gt=0)
    k3_per_v2: Optional[float] = Field(default=None, ge=0)
    from_p1db_dbm: Optional[float] = None
    gain_db: float = Field(default=20.0, gt=0)
    fractional_bandwidth: Optional[float] = Field(default=None, gt=0, lt=1)
    z1: Optional[float] = Field(default=None, gt=0)
    f0_hz: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def check_kerr_source(self):
        if (self.k3_per_v2 is None) == (self.from_p1db_dbm is None):
            raise ValueError("set exactly one of k3_per_v2 or from_p1db_dbm")
        return self


class SweepSection(_Section):
    f_start_hz: Optional[float] = Field(default=None, gt=0)
    f_stop_hz: Optional[float] = Field(default=None, gt=0)
    n_points: int = Field(default=1001, ge=2)
    p_start_dbm: Optional[float] = None
    p_stop_dbm: Optional[float] = None
    p_points: int = Field(default=61, ge=2)
    delta_f_hz: List[float] = Field(default_factory=lambda: [1e3], min_length=1)

    @field_validator("delta_f_hz", mode="before")
    @classmethod
    def split_delta_f(cls, v):
        return _split_list(v)

    @model_validator(mode="after")
    def check_ranges(self):
        if None not in (self.f_start_hz, self.f_stop_hz) and self.f_stop_hz <= self.f_start_hz:
            raise ValueError("f_stop_hz must exceed f_start_hz")
        if None not in (self.p_start_dbm, self.p_stop_dbm) and self.p_stop_dbm <= self.p_start_dbm:
            raise ValueError("p_stop_dbm must exceed p_start_dbm")
        if any(df <= 0 for df in self.delta_f_hz):
            raise ValueError("delta_f_hz values must be positive")
        return self

    def frequency_grid(self):
        for key in ("f_start_hz", "f_stop_hz"):
            if getattr(self, key) is None:
                raise ConfigError(f"[sweep] {key} is required for a frequency sweep", key=key)
        return self.f_start_hz, self.f_stop_hz, self.n_points

    def power_grid(self):
        for key in ("p_start_dbm", "p_stop_dbm"):
            if getattr(self, key) is None:
                raise ConfigError(f"[sweep] {key} is required for a power sweep", key=key)
        return self.p_start_dbm, self.p_stop_dbm, self.p_points


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    design: Optional[DesignSection] = None
    snake: Optional[SnakeSection] = None
    pump: Optional[PumpSection] = None
    tls: Optional[TlsSection] = None
    sweep: Optional[SweepSection] = None

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"missing section [{name}]", key=name)
