"""
Built-in named run configurations.
"""
from app.core.errors import ConfigError

DEFAULT_DESIGN = """\
# Third-order 20 dB / 0.5 dB-ripple LESA at 4.9 GHz
[design]
f0_hz = 4.9e9
fractional_bandwidth = 0.135
g = 1.0, 0.5899, 0.6681, 0.3753, 0.9045
z1 = 4.42
z2 = 20
z3 = 50
z0 = 50
# layout trim of the lambda/4 line
theta_trim_deg = -6

[snake]
n_total = 40
ic_a = 16e-6
l1s_h = 2.6e-12
l2s_h = 8e-12
lb_h = 50e-12

[pump]
target_gain_db = 20
t_hemt_k = 2.5

# IMD device: G = 100, w = 0.085, Z1 = 4.4 ohm
[tls]
t1_s = 2e-6
t2_s = 4e-6
qi = 250
dipole_debye = 1
t_diel_m = 100e-9
k3_per_v2 = 2.1e9
gain_db = 20
fractional_bandwidth = 0.085
z1 = 4.4
f0_hz = 4.6e9

[sweep]
f_start_hz = 4.4e9
f_stop_hz = 5.4e9
n_points = 1001
p_start_dbm = -140
p_stop_dbm = -60
p_points = 61
delta_f_hz = 1000, 10000
"""

FIXTURES = {"paper_design": DEFAULT_DESIGN}


def load_fixture(name: str) -> str:
    try:
        return FIXTURES[name]
    except KeyError:
        raise ConfigError(
            f"unknown fixture '{name}' (available: {', '.join(sorted(FIXTURES))})", key="fixture"
        ) from None
