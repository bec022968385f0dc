"""
Report Writer Service.
Writes a ReportBundle as report.json, one CSV per table and run.json.
Every file is written to a temp file in the target directory and renamed.
"""
import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import List, Tuple, Union

from app.core.errors import SchemaError
from app.models.report import ReportBundle, Table

logger = logging.getLogger(__name__)


def atomic_write(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def table_to_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    return float(text)


def read_table(path: Union[str, Path]) -> Tuple[List[str], List[list]]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader)
            rows = [[_parse_cell(cell) for cell in row] for row in reader if row]
    except (OSError, StopIteration) as e:
        raise SchemaError(f"cannot read table {path}: {e}", key="csv") from e
    except ValueError as e:
        raise SchemaError(f"{path}: non-numeric cell ({e})", key="csv") from e
    for row in rows:
        if len(row) != len(header):
            raise SchemaError(f"{path}: row width differs from header", key="csv")
    return header, rows


def write_bundle(bundle: ReportBundle, out_dir: Union[str, Path]) -> List[str]:
    """Write all artifacts; returns the file names, run.json last."""
    out = Path(out_dir)
    files = []
    atomic_write(out / "report.json", json.dumps(bundle.report, indent=2) + "\n")
    files.append("report.json")
    for table in bundle.tables:
        name = f"{table.name}.csv"
        atomic_write(out / name, table_to_csv(table))
        files.append(name)
    bundle.files = files + ["run.json"]
    atomic_write(out / "run.json", json.dumps(bundle.metadata(), indent=2) + "\n")
    logger.info(f"[Report] wrote {len(bundle.files)} files to {out}")
    return bundle.files
