"""
Prototype Service.
Validates g-coefficient ladders and turns them into reduced coupling rates
and parametric-inverter values.
"""
import logging
import math

from app.core.errors import NumericError, PrototypeError
from app.models.design import BandSpec, ChebyshevPrototype, ReducedCouplings

logger = logging.getLogger(__name__)

# Single-pole oscillation threshold for beta_p
SINGLE_POLE_THRESHOLD = 0.5


def validate_prototype(p: ChebyshevPrototype) -> ChebyshevPrototype:
    if len(p.g) != p.order + 2:
        raise PrototypeError(
            f"order {p.order} needs {p.order + 2} coefficients, got {len(p.g)}"
        )
    for index, value in enumerate(p.g):
        if not value > 0:
            raise PrototypeError(f"g{index} = {value} is not positive", index=index)
    return p


def reduced_couplings(p: ChebyshevPrototype, band: BandSpec) -> ReducedCouplings:
    """
    Port decay rate and chain couplings of an order-N matched amplifier.

    gamma0 = dw/(g_N g_{N+1}), beta_{k,k+1} = dw/(2 gamma0 sqrt(g_k g_{k+1})),
    beta_p = g_N g_{N+1}/(2 g0 g1).
    """
    validate_prototype(p)
    n = p.order
    g = p.g
    dw = band.delta_omega
    if dw <= 0:
        raise NumericError("zero bandwidth leaves the port decay rate undefined")

    gamma0 = dw / (g[n] * g[n + 1])
    betas = tuple(
        dw / (2 * gamma0 * math.sqrt(g[k] * g[k + 1])) for k in range(1, n)
    )
    beta_p = 0.5 * g[n] * g[n + 1] / (g[0] * g[1])
    if n != 3:
        logger.info(f"[Prototype] beta_p for order {n} uses the third-order pattern")
    if beta_p >= SINGLE_POLE_THRESHOLD:
        logger.warning(f"[Prototype] beta_p = {beta_p:.4f} at or above single-pole threshold")
    return ReducedCouplings(gamma0=gamma0, betas=betas, beta_p=beta_p)


def jpa_value(p: ChebyshevPrototype, w: float, z1: float) -> float:
    """Parametric admittance inverter from the prototype ladder, in siemens."""
    validate_prototype(p)
    if z1 <= 0:
        raise PrototypeError(f"Z1 = {z1} must be positive")
    g = p.g
    n = p.order
    exponent = 1 if n % 2 == 0 else -1
    return w / (z1 * g[1] * math.sqrt(g[0])) * math.sqrt(g[n + 1] ** exponent)


def jpa_value_from_gain(gain: float, g1: float, w: float, z1: float) -> float:
    """Same inverter expressed through the linear power gain G."""
    if gain <= 1:
        raise NumericError(f"gain form needs G > 1, got {gain}")
    if z1 <= 0:
        raise PrototypeError(f"Z1 = {z1} must be positive")
    s = math.sqrt(gain) + math.sqrt(gain - 1)
    return (w / (z1 * g1)) * math.sqrt((s + 1) / (s - 1))
