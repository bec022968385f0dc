"""
Synthesis Service.
Prototype + band + impedance plan -> immittance inverters -> physical
component values, plus the snake inductance model and its bias inversion.
"""
import logging
import math
from typing import Dict

from scipy import optimize

from app.core.errors import BiasError, SynthesisError
from app.models.design import (
    BandSpec,
    ChebyshevPrototype,
    ComponentSet,
    ImpedancePlan,
    InverterRealization,
    SnakeParams,
)
from app.services.prototype import validate_prototype

logger = logging.getLogger(__name__)

SINGULARITY_TOL = 1e-9
BIAS_XTOL = 1e-12
BRANCH_MAX = math.pi / 2


def immittance_inverters(
    p: ChebyshevPrototype, band: BandSpec, plan: ImpedancePlan
) -> Dict[str, float]:
    """J12, J23 (S) and K34 (ohm); the pi/4 factors belong to the quarter-wave resonator 3."""
    validate_prototype(p)
    g = p.g
    w = band.fractional_bandwidth
    j12 = w * math.sqrt(1 / (g[1] * g[2] * plan.z1 * plan.z2))
    j23 = w * math.sqrt(math.pi / (4 * g[2] * g[3] * plan.z2 * plan.z3))
    k34 = math.sqrt((math.pi / 4) * w * plan.z3 * plan.z0 / (g[3] * g[4]))
    return {"J12": j12, "J23": j23, "K34": k34}


def lumped_tl_inverter(j: float, yc: float) -> InverterRealization:
    """
    Series susceptance B0, shunt susceptance B1 and a negative line length
    that together act as an admittance inverter J on a line of admittance Yc.
    """
    if j < 0 or yc <= 0:
        raise SynthesisError(f"inverter needs J >= 0 and Yc > 0 (J={j}, Yc={yc})")
    ratio = j / yc
    if ratio >= 1:
        raise SynthesisError(f"J = {j} S is not realizable on Yc = {yc} S", element="J")
    root = math.sqrt(1 - ratio ** 2)
    b0 = j / root
    b1 = -j * root
    theta = -math.degrees(math.atan(b0 / yc))
    return InverterRealization(j=j, b0=b0, b1=b1, theta_comp_deg=theta)


def inverter_input_admittance(r: InverterRealization, yc: float, y_load: complex) -> complex:
    """Admittance looking into shunt B1, series B0 and the compensating line, toward y_load."""
    t = math.tan(abs(math.radians(r.theta_comp_deg)))
    y_line = yc * (y_load - 1j * yc * t) / (yc - 1j * y_load * t)
    if r.b0 == 0:
        y_series = 0j
    else:
        y_series = 1j * r.b0 * y_line / (1j * r.b0 + y_line)
    return 1j * r.b1 + y_series


def realize_network(
    p: ChebyshevPrototype,
    band: BandSpec,
    plan: ImpedancePlan,
    theta_trim_deg: float = 0.0,
) -> ComponentSet:
    inv = immittance_inverters(p, band, plan)
    w0 = band.omega0
    j12, j23, k34 = inv["J12"], inv["J23"], inv["K34"]

    if k34 >= plan.z3:
        raise SynthesisError(f"K34 = {k34:.4g} ohm is not realizable on Z3 = {plan.z3} ohm", element="K34")
    j23_realization = lumped_tl_inverter(j23, 1 / plan.z3)

    c12 = j12 / w0
    x34 = k34 / (1 - (k34 / plan.z3) ** 2)
    l34 = x34 / w0
    b23 = j23_realization.b0
    c23 = b23 / w0
    c1 = 1 / (plan.z1 * w0) - c12
    l2 = plan.z2 / w0
    # shunt B1 of the J23 inverter is absorbed into resonator 2
    b23e = -j23_realization.b1
    c2 = 1 / (plan.z2 * w0) - c12 - b23e / w0
    theta = 90.0 - math.degrees(math.atan(b23 * plan.z3)) - 0.5 * math.degrees(math.atan(2 * x34 / plan.z3))

    values = {"C1": c1, "C2": c2, "C12": c12, "C23": c23, "L2": l2, "L34": l34}
    for name, value in values.items():
        if not value > 0:
            raise SynthesisError(f"{name} = {value:.4g} is not positive", element=name)
    if not 0 < theta + theta_trim_deg < 90:
        raise SynthesisError(
            f"line length {theta + theta_trim_deg:.2f} deg outside (0, 90)", element="theta"
        )

    components = ComponentSet(
        c1=c1, c2=c2, c12=c12, c23=c23, l2=l2, l34=l34,
        z3=plan.z3, theta_deg=theta, theta_trim_deg=theta_trim_deg,
        l_snake=plan.z1 / w0, f0=band.f0, z0=plan.z0,
    )
    logger.info(
        f"[Synth] C12={c12 * 1e12:.3f} pF, C1={c1 * 1e12:.3f} pF, theta={theta:.2f} deg"
    )
    return components


def _denominator(s: SnakeParams, delta0: float) -> float:
    return s.lj + (4 * s.l1s + s.l2s) * math.cos(delta0)


def stage_inductance(s: SnakeParams, delta: float) -> float:
    """Inductance of one rf-SQUID stage at dc phase delta."""
    den = _denominator(s, delta)
    if abs(den) <= SINGULARITY_TOL * s.lj:
        raise BiasError(f"snake inductance singular at delta0 = {delta:.6f} rad")
    return (s.lj * (s.l1s + s.l2s) + s.l1s * s.l2s * math.cos(delta)) / den


def snake_inductance(s: SnakeParams, delta0: float) -> float:
    return s.lb + (s.n_stages / 2) * stage_inductance(s, delta0)


def solve_bias(s: SnakeParams, l_target: float) -> float:
    """dc phase on [0, pi/2] at which the snake reaches l_target."""
    low = snake_inductance(s, 0.0)
    high = snake_inductance(s, BRANCH_MAX)
    if not low <= l_target <= high:
        raise BiasError(
            f"L_target = {l_target * 1e12:.2f} pH outside reachable "
            f"[{low * 1e12:.2f}, {high * 1e12:.2f}] pH"
        )
    if l_target == low:
        return 0.0
    if l_target == high:
        return BRANCH_MAX
    return optimize.bisect(
        lambda d: snake_inductance(s, d) - l_target, 0.0, BRANCH_MAX, xtol=BIAS_XTOL
    )
