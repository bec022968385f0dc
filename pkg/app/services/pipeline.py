"""
Design Pipeline.
Runs one command (synth, gain, compress, imd) against a RunConfig and packs
the result into a ReportBundle. Shared by the CLI and the HTTP endpoints.
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import ConfigError, NoBandError, NotFoundError
from app.models.design import ComponentSet
from app.models.report import COMPRESS_COLUMNS, GAIN_COLUMNS, IMD_COLUMNS, ReportBundle, Table
from app.models.run_config import RunConfig
from app.models.traces import GainTrace
from app.services import abcd_engine, coupled_mode, nonlinear, synthesis, tls_imd
from app.services.config_parser import config_hash
from app.services.prototype import jpa_value, jpa_value_from_gain, reduced_couplings

logger = logging.getLogger(__name__)

ENGINES = ("cm", "abcd")


def _floats(values) -> List[float]:
    return [float(v) for v in values]


class DesignPipeline:
    """
    Command runners:
    synth    -> component report (design + snake)
    gain     -> gain trace + band metrics (design + sweep, pump for abcd)
    compress -> gain vs input power, P1dB, K3 (design + snake + pump + sweep)
    imd      -> IM3/IM5 vs input power per tone spacing (design + tls + sweep)
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.hash = config_hash(config)

    def _bundle(self, command: str, report: Dict, tables: Optional[List[Table]] = None) -> ReportBundle:
        return ReportBundle(
            command=command,
            config_hash=self.hash,
            tool_version=settings.TOOL_VERSION,
            report=report,
            tables=tables or [],
        )

    def _components(self) -> ComponentSet:
        d = self.config.design
        return synthesis.realize_network(d.prototype(), d.band(), d.plan(), d.theta_trim_deg)

    def run_synth(self) -> ReportBundle:
        self.config.require("design", "snake")
        d = self.config.design
        prototype, band, plan = d.prototype(), d.band(), d.plan()
        logger.info(f"[Synth] order {prototype.order} at {band.f0 / 1e9:.3f} GHz, w={band.fractional_bandwidth}")

        components = self._components()
        couplings = reduced_couplings(prototype, band)
        snake = self.config.snake.params()
        delta0 = synthesis.solve_bias(snake, components.l_snake)
        report = {
            "components": components.model_dump(),
            "formatted": components.formatted(),
            "inverters": synthesis.immittance_inverters(prototype, band, plan),
            "couplings": {
                "gamma0_over_2pi_hz": couplings.gamma0 / (2 * math.pi),
                "betas": list(couplings.betas),
                "beta_p": couplings.beta_p,
            },
            "j_pa_s": jpa_value(prototype, band.fractional_bandwidth, plan.z1),
            "j_pa_from_gain_s": jpa_value_from_gain(
                prototype.design_gain, prototype.g[1], band.fractional_bandwidth, plan.z1
            ),
            "snake": {
                "lj_h": snake.lj,
                "l_target_h": components.l_snake,
                "delta0_rad": delta0,
            },
        }
        return self._bundle("synth", report)

    def _operating_point(self, components: ComponentSet) -> nonlinear.PumpOperatingPoint:
        self.config.require("snake", "pump")
        pump = self.config.pump
        snake = self.config.snake.params()
        if pump.target_gain_db is not None:
            return nonlinear.solve_operating_point(snake, components, pump.target_gain_db)
        delta0 = synthesis.solve_bias(snake, components.l_snake)
        return nonlinear.PumpOperatingPoint(delta0, pump.delta_p_rad, 2 * components.omega0)

    def _abcd_netlist(self, components: ComponentSet) -> Tuple[abcd_engine.Netlist, Dict]:
        """Pumped netlist from the [pump] section, or the prototype J_PA without one."""
        d = self.config.design
        if self.config.pump is None:
            j = jpa_value(d.prototype(), d.fractional_bandwidth, d.z1)
            return abcd_engine.lesa_netlist(components, j), {"j_pa_s": j, "source": "prototype"}
        op = self._operating_point(components)
        response = nonlinear.pump_to_jpa(self.config.snake.params(), op, components.omega0)
        j = response.j_pa if response.j_pa > 0 else None
        pump = {
            "j_pa_s": response.j_pa,
            "l_eff_h": response.l_eff,
            "modulation": response.modulation,
            "delta0_rad": op.delta0,
            "delta_p_rad": op.delta_p,
            "source": "pump",
        }
        return abcd_engine.lesa_netlist(components, j, l_snake=response.l_eff), pump

    def run_gain(self, engine: str = "cm") -> ReportBundle:
        if engine not in ENGINES:
            raise ConfigError(f"unknown engine '{engine}' (use cm or abcd)", key="engine")
        self.config.require("design", "sweep")
        d = self.config.design
        f_start, f_stop, n_points = self.config.sweep.frequency_grid()
        report: Dict = {"engine": engine}

        if engine == "cm":
            couplings = reduced_couplings(d.prototype(), d.band())
            graph = coupled_mode.ModeGraph(d.order, d.band().omega0, couplings)
            trace = coupled_mode.sweep(graph, f_start, f_stop, n_points)
        else:
            components = self._components()
            netlist, pump = self._abcd_netlist(components)
            trace = abcd_engine.gain_sweep(netlist, f_start, f_stop, n_points)
            report["pump"] = pump
            report["netlist"] = abcd_engine.netlist_to_dict(netlist)

        try:
            report["band"] = coupled_mode.metrics_dict(coupled_mode.band_metrics(trace, d.design_gain_db))
        except NoBandError as e:
            logger.warning(f"[Gain] no band: {e}")
            report["band"] = None
            report["note"] = str(e)
        return self._bundle("gain", report, [self._gain_table(engine, trace)])

    @staticmethod
    def _gain_table(engine: str, trace: GainTrace) -> Table:
        columns = GAIN_COLUMNS if engine == "cm" else GAIN_COLUMNS[:3]
        cols = [trace.frequencies, trace.gain_db, trace.phase_deg]
        if engine == "cm":
            cols.append(trace.idler_gain_db)
        rows = [_floats(row) for row in zip(*cols)]
        return Table(name=f"gain_{engine}", columns=list(columns), rows=rows)

    def run_compress(self) -> ReportBundle:
        self.config.require("design", "snake", "pump", "sweep")
        p_start, p_stop, p_points = self.config.sweep.power_grid()
        components = self._components()
        snake = self.config.snake.params()
        op = self._operating_point(components)
        response = nonlinear.pump_to_jpa(snake, op, components.omega0)
        powers = np.linspace(p_start, p_stop, p_points)
        curve = nonlinear.compression_sweep(components, snake, op, powers)

        noise = nonlinear.NoiseModelParams(t_hemt=self.config.pump.t_hemt_k, f0=components.f0)
        report: Dict = {
            "operating_point": {
                "delta0_rad": op.delta0,
                "delta_p_rad": op.delta_p,
                "j_pa_s": response.j_pa,
                "l_eff_h": response.l_eff,
                "modulation": response.modulation,
            },
            "small_signal_gain_db": float(curve.gain_db[0]),
            "converged_points": int(curve.converged.sum()),
            "system_noise_model": {
                "t_hemt_k": noise.t_hemt,
                "t_q_k": noise.t_q,
                "noise_change_db": _floats(nonlinear.system_noise_model(curve, noise)),
            },
        }
        try:
            p1 = nonlinear.p1db(curve)
        except NotFoundError as e:
            logger.info(f"[Compress] {e}")
            report.update({"p1db": None, "note": "P1dB not found in the sweep range"})
        else:
            k3 = nonlinear.k3_from_p1db(p1["input_p1db_dbm"], components.z0)
            report.update({
                "p1db": p1,
                "phase_change_at_p1db_deg": nonlinear.phase_change_at(curve, p1["input_p1db_dbm"]),
                "k3_per_v2": k3,
                "k3_per_uv2": nonlinear.k3_per_uv2(k3),
            })
        rows = [
            [float(p), float(g), bool(c)]
            for p, g, c in zip(curve.powers_dbm, curve.gain_db, curve.converged)
        ]
        table = Table(name="compress", columns=list(COMPRESS_COLUMNS), rows=rows)
        return self._bundle("compress", report, [table])

    def _drive_map(self) -> tls_imd.ImdDriveMap:
        d, t = self.config.design, self.config.tls
        if t.k3_per_v2 is not None:
            k3 = t.k3_per_v2
        else:
            k3 = nonlinear.k3_from_p1db(t.from_p1db_dbm, d.z0)
        return tls_imd.ImdDriveMap(
            gain=10 ** (t.gain_db / 10),
            w=t.fractional_bandwidth if t.fractional_bandwidth is not None else d.fractional_bandwidth,
            g1=d.g[1],
            g4=d.g[d.order + 1],
            z1=t.z1 if t.z1 is not None else d.z1,
            z0=d.z0,
            f0=t.f0_hz if t.f0_hz is not None else d.f0_hz,
            k3=k3,
        )

    def run_imd(self) -> ReportBundle:
        self.config.require("design", "tls", "sweep")
        t = self.config.tls
        p_start, p_stop, p_points = self.config.sweep.power_grid()
        drive = self._drive_map()
        bath = tls_imd.TlsBathParams(
            t1=t.t1_s, t2=t.t2_s, qi=t.qi, dipole=t.dipole_debye * tls_imd.DEBYE, t_diel=t.t_diel_m
        )
        powers = np.linspace(p_start, p_stop, p_points)

        tables, spacings = [], []
        for delta_f in self.config.sweep.delta_f_hz:
            curve = tls_imd.imd_sweep(powers, delta_f, drive, bath)
            rows = [
                [p.pin_dbm, p.im3_dbm, p.tls3_dbm, p.kerr3_dbm, p.im5_dbm, p.valid]
                for p in curve.points
            ]
            tables.append(Table(name=f"imd_df{delta_f:g}", columns=list(IMD_COLUMNS), rows=rows))
            spacings.append({
                "delta_f_hz": delta_f,
                "valid": tls_imd.is_adiabatic(delta_f, bath.t2),
                "im3_dips_dbm": tls_imd.im3_dips(curve),
            })
            logger.info(f"[IMD] delta_f={delta_f:g} Hz: {len(rows)} powers")

        report = {
            "drive_map": {
                "gain": drive.gain, "w": drive.w, "g1": drive.g1, "g4": drive.g4,
                "z1": drive.z1, "z0": drive.z0, "f0_hz": drive.f0, "kappa": drive.kappa,
                "k3_per_v2": drive.k3, "k3_per_uv2": nonlinear.k3_per_uv2(drive.k3),
            },
            "bath": {
                "t1_s": bath.t1, "t2_s": bath.t2, "qi": bath.qi,
                "dipole_cm": bath.dipole, "t_diel_m": bath.t_diel,
                "rho_v2": bath.rho_v2(drive.omega0),
            },
            "spacings": spacings,
        }
        return self._bundle("imd", report, tables)

    def run(self, command: str, engine: str = "cm") -> ReportBundle:
        if command == "synth":
            return self.run_synth()
        if command == "gain":
            return self.run_gain(engine)
        if command == "compress":
            return self.run_compress()
        if command == "imd":
            return self.run_imd()
        raise ConfigError(f"unknown command '{command}'", key="command")
