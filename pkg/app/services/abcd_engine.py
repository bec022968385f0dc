"""
ABCD Engine.
Linear S-parameter simulation of the physical amplifier: signal-side elements,
their idler-frequency mirror images evaluated at (omega - omega_p), and the
parametric admittance inverter joining the two halves.
"""
import logging
import math
from dataclasses import asdict, dataclass
from functools import reduce, singledispatch
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import ConfigError, ConversionError
from app.models.design import ComponentSet, ReducedCouplings
from app.models.traces import GainTrace
from app.services.coupled_mode import effective_damping

logger = logging.getLogger(__name__)

CONVERSION_RTOL = 1e-12


@dataclass(frozen=True)
class Capacitor:
    value: float
    shunt: bool = True
    idler: bool = False
    name: str = ""


@dataclass(frozen=True)
class Inductor:
    value: float
    shunt: bool = True
    idler: bool = False
    name: str = ""


@dataclass(frozen=True)
class ParallelResonator:
    """Shunt L || C."""
    inductance: float
    capacitance: float
    idler: bool = False
    name: str = ""


@dataclass(frozen=True)
class TransmissionLine:
    z: float
    theta_deg: float
    omega0: float
    idler: bool = False
    name: str = ""


@dataclass(frozen=True)
class ParametricInverter:
    j: float
    name: str = "J_PA"


@dataclass(frozen=True)
class TwoPort:
    matrix: np.ndarray

    @property
    def a(self) -> complex:
        return self.matrix[0, 0]

    @property
    def b(self) -> complex:
        return self.matrix[0, 1]

    @property
    def c(self) -> complex:
        return self.matrix[1, 0]

    @property
    def d(self) -> complex:
        return self.matrix[1, 1]

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c


@dataclass(frozen=True)
class Netlist:
    """Elements ordered from the signal port; z_load None leaves the far end open."""
    elements: Tuple
    z_source: float = 50.0
    z_load: Optional[float] = 50.0
    omega_p: Optional[float] = None

    @property
    def has_inverter(self) -> bool:
        return any(isinstance(e, ParametricInverter) for e in self.elements)


def _shunt(y: complex) -> np.ndarray:
    return np.array([[1, 0], [y, 1]], dtype=complex)


def _series(z: complex) -> np.ndarray:
    return np.array([[1, z], [0, 1]], dtype=complex)


def _frequency(e, omega: float, omega_p: Optional[float]) -> float:
    if not getattr(e, "idler", False):
        return omega
    if omega_p is None:
        raise ConfigError(f"idler element {e.name or type(e).__name__} needs omega_p")
    return omega - omega_p


@singledispatch
def element_abcd(e, omega: float, omega_p: Optional[float] = None) -> TwoPort:
    raise ConfigError(f"unknown element type {type(e).__name__}")


@element_abcd.register
def _(e: Capacitor, omega: float, omega_p: Optional[float] = None) -> TwoPort:
    nu = _frequency(e, omega, omega_p)
    y = 1j * nu * e.value
    if e.shunt:
        return TwoPort(_shunt(y))
    if y == 0:
        raise ConversionError(f"series capacitor {e.name} open at zero frequency")
    return TwoPort(_series(1 / y))


@element_abcd.register
def _(e: Inductor, omega: float, omega_p: Optional[float] = None) -> TwoPort:
    nu = _frequency(e, omega, omega_p)
    z = 1j * nu * e.value
    if not e.shunt:
        return TwoPort(_series(z))
    if z == 0:
        raise ConversionError(f"shunt inductor {e.name} shorts at zero frequency")
    return TwoPort(_shunt(1 / z))


@element_abcd.register
def _(e: ParallelResonator, omega: float, omega_p: Optional[float] = None) -> TwoPort:
    nu = _frequency(e, omega, omega_p)
    if nu == 0:
        raise ConversionError(f"resonator {e.name} shorts at zero frequency")
    y = 1j * nu * e.capacitance + 1 / (1j * nu * e.inductance)
    return TwoPort(_shunt(y))


@element_abcd.register
def _(e: TransmissionLine, omega: float, omega_p: Optional[float] = None) -> TwoPort:
    nu = _frequency(e, omega, omega_p)
    arg = math.radians(e.theta_deg) * nu / e.omega0
    cos, sin = math.cos(arg), math.sin(arg)
    return TwoPort(np.array([[cos, 1j * e.z * sin], [1j * sin / e.z, cos]], dtype=complex))


@element_abcd.register
def _(e: ParametricInverter, omega: float, omega_p: Optional[float] = None) -> TwoPort:
    if e.j == 0:
        raise ConversionError("parametric inverter with J_PA = 0; remove it for pump-off runs")
    return TwoPort(np.array([[0, 1j / e.j], [-1j * e.j, 0]], dtype=complex))


def cascade(elements: Sequence, omega: float, omega_p: Optional[float] = None) -> TwoPort:
    if not elements:
        raise ConfigError("cannot cascade an empty element list")
    matrices = [element_abcd(e, omega, omega_p).matrix for e in elements]
    return TwoPort(reduce(np.matmul, matrices))


def _degenerate(den: complex, *terms: float) -> bool:
    """Denominator lost to cancellation against the size of its own terms."""
    return abs(den) <= CONVERSION_RTOL * max(terms)


def to_s(t: TwoPort, zs: float, zl: float) -> Dict[str, complex]:
    if zs <= 0 or zl <= 0:
        raise ConfigError("reference impedances must be positive")
    a, b, c, d = t.a, t.b, t.c, t.d
    den = a * zl + b + c * zs * zl + d * zs
    if _degenerate(den, abs(a) * zl, abs(b), abs(c) * zs * zl, abs(d) * zs):
        raise ConversionError("degenerate ABCD -> S denominator")
    root = 2 * math.sqrt(zs * zl)
    return {
        "S11": (a * zl + b - c * zs * zl - d * zs) / den,
        "S12": root * t.det / den,
        "S21": root / den,
        "S22": (-a * zl + b - c * zs * zl + d * zs) / den,
    }


def input_reflection(t: TwoPort, zs: float, zl: Optional[float] = None) -> complex:
    """S11 seen from the source; zl None is an open far end."""
    if zl is not None:
        return to_s(t, zs, zl)["S11"]
    den = t.a + t.c * zs
    if _degenerate(den, abs(t.a), abs(t.c) * zs):
        raise ConversionError("degenerate open-ended reflection")
    return (t.a - t.c * zs) / den


def node_admittance(elements: Sequence, omega: float, z_source: float, omega_p: Optional[float] = None) -> complex:
    """Admittance at the far end of `elements` looking back to a z_source port."""
    t = cascade(elements, omega, omega_p)
    den = t.d * z_source + t.b
    if _degenerate(den, abs(t.d) * z_source, abs(t.b)):
        raise ConversionError("node admittance is unbounded")
    return (t.c * z_source + t.a) / den


def signal_elements(c: ComponentSet, l_snake: Optional[float] = None, idler: bool = False) -> List:
    """Signal half from the port to the snake node."""
    return [
        Inductor(c.l34, shunt=True, idler=idler, name="L34"),
        TransmissionLine(c.z3, c.effective_theta_deg, c.omega0, idler=idler, name="TL3"),
        Capacitor(c.c23, shunt=False, idler=idler, name="C23"),
        ParallelResonator(c.l2, c.c2, idler=idler, name="LC2"),
        Capacitor(c.c12, shunt=False, idler=idler, name="C12"),
        Capacitor(c.c1, shunt=True, idler=idler, name="C1"),
        Inductor(l_snake if l_snake is not None else c.l_snake, shunt=True, idler=idler, name="L_snake"),
    ]


def lesa_netlist(c: ComponentSet, j_pa: Optional[float], l_snake: Optional[float] = None) -> Netlist:
    """
    Amplifier netlist: signal half, parametric inverter, mirrored idler half.
    With j_pa None only the signal half is returned, far end open (pump off).
    """
    signal = signal_elements(c, l_snake)
    if j_pa is None:
        return Netlist(tuple(signal), z_source=c.z0, z_load=None, omega_p=2 * c.omega0)
    idler = signal_elements(c, l_snake, idler=True)[::-1]
    elements = tuple(signal) + (ParametricInverter(j_pa),) + tuple(idler)
    return Netlist(elements, z_source=c.z0, z_load=c.z0, omega_p=2 * c.omega0)


def netlist_gain(n: Netlist, omega: float, omega_p: Optional[float] = None) -> Tuple[complex, Optional[complex]]:
    """(S11, S21) at one frequency; S21 is None for an open far end."""
    wp = omega_p if omega_p is not None else n.omega_p
    t = cascade(n.elements, omega, wp)
    if n.z_load is None:
        return input_reflection(t, n.z_source), None
    s = to_s(t, n.z_source, n.z_load)
    return s["S11"], s["S21"]


def gain_sweep(
    n: Netlist, f_start: float, f_stop: float, n_points: int, omega_p: Optional[float] = None
) -> GainTrace:
    if not f_start < f_stop or n_points < 2:
        raise ConfigError("sweep needs f_start < f_stop and at least two points")
    freqs = np.linspace(f_start, f_stop, n_points)
    results = [netlist_gain(n, 2 * math.pi * f, omega_p) for f in freqs]
    s11 = np.array([r[0] for r in results])
    s21 = None if n.z_load is None else np.array([r[1] for r in results])
    logger.info(f"[Gain] ABCD sweep: {n_points} points, {len(n.elements)} elements")
    return GainTrace(frequencies=freqs, sqrt_gs=s11, sqrt_gi=s21)


def netlist_to_dict(n: Netlist) -> Dict:
    return {
        "z_source": n.z_source,
        "z_load": n.z_load,
        "omega_p": n.omega_p,
        "elements": [{"type": type(e).__name__, **asdict(e)} for e in n.elements],
    }


def consistent_jpa(c: ComponentSet, couplings: ReducedCouplings) -> float:
    """
    Inverter value that makes the circuit reproduce the coupled-mode gain at
    omega0: J = beta_p / eta_1 * G_node, with G_node the conductance the
    signal half presents at the snake node.
    """
    y_node = node_admittance(signal_elements(c), c.omega0, c.z0)
    return couplings.beta_p / effective_damping(couplings) * y_node.real
