"""
Plotting Service.
Overlay line charts of gain, compression or IMD CSVs as a single SVG.
Output is byte-stable for identical inputs.
"""
import io
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from app.core.errors import SchemaError  # noqa: E402
from app.models.report import COMPRESS_COLUMNS, GAIN_COLUMNS, IMD_COLUMNS  # noqa: E402
from app.services.report_writer import atomic_write, read_table  # noqa: E402

logger = logging.getLogger(__name__)

# x column, plotted series
SCHEMAS: Dict[str, tuple] = {
    "gain": ("frequency_hz", ["gain_db"]),
    "compress": ("pin_dbm", ["gain_db"]),
    "imd": ("pin_dbm", ["im3_dbm", "tls3_dbm", "kerr3_dbm"]),
}
LINEAR_SUFFIXES = ("_db", "_dbm", "_hz", "_deg")


def detect_schema(header: List[str]) -> str:
    if header in (GAIN_COLUMNS, GAIN_COLUMNS[:3]):
        return "gain"
    if header == COMPRESS_COLUMNS:
        return "compress"
    if header == IMD_COLUMNS:
        return "imd"
    raise SchemaError(f"unrecognised CSV header: {','.join(header)}", key="csv")


def axis_scale(column: str) -> str:
    """Quantities already in dB (or plain Hz/deg) go on linear axes."""
    return "linear" if column.endswith(LINEAR_SUFFIXES) else "log"


def _label(column: str) -> str:
    name, _, unit = column.rpartition("_")
    return f"{name.replace('_', ' ')} ({unit})" if name else column


def plot_tables(csv_paths: Sequence[Union[str, Path]], out_svg: Union[str, Path]) -> Path:
    if not csv_paths:
        raise SchemaError("no CSV files to plot", key="csv")
    tables = [(Path(p), *read_table(p)) for p in csv_paths]
    kinds = {detect_schema(header) for _, header, _ in tables}
    if len(kinds) > 1:
        raise SchemaError(f"cannot overlay different table kinds: {', '.join(sorted(kinds))}", key="csv")
    kind = kinds.pop()
    x_col, y_cols = SCHEMAS[kind]

    with plt.rc_context({"svg.hashsalt": "lesa", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for path, header, rows in tables:
            x = [row[header.index(x_col)] for row in rows]
            for y_col in y_cols:
                y = [row[header.index(y_col)] for row in rows]
                label = path.stem if len(y_cols) == 1 else f"{path.stem}: {y_col}"
                ax.plot(x, y, label=label, linewidth=1.2)
        ax.set_xscale(axis_scale(x_col))
        ax.set_yscale(axis_scale(y_cols[0]))
        ax.set_xlabel(_label(x_col))
        ax.set_ylabel(_label(y_cols[0]) if len(y_cols) == 1 else "output (dBm)")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
        plt.close(fig)

    path = atomic_write(out_svg, buffer.getvalue())
    logger.info(f"[Plot] {kind} chart of {len(tables)} tables -> {path}")
    return path
