"""
Report bundle and request/response bodies.
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

# documented CSV headers, in order
GAIN_COLUMNS = ["frequency_hz", "gain_db", "phase_deg", "idler_gain_db"]
COMPRESS_COLUMNS = ["pin_dbm", "gain_db", "converged"]
IMD_COLUMNS = ["pin_dbm", "im3_dbm", "tls3_dbm", "kerr3_dbm", "im5_dbm", "valid"]


class Table(BaseModel):
    name: str
    columns: List[str]
    rows: List[List[Any]]

    @model_validator(mode="after")
    def check_widths(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"table {self.name}: row width {len(row)} != {len(self.columns)}")
        return self


class ReportBundle(BaseModel):
    command: str
    config_hash: str
    tool_version: str
    report: Dict[str, Any]
    tables: List[Table] = Field(default_factory=list)
    files: List[str] = Field(default_factory=list)

    def metadata(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "files": self.files,
        }


class RunRequest(BaseModel):
    fixture: Optional[str] = None
    config: Optional[str] = None
    overrides: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_source(self):
        if (self.fixture is None) == (self.config is None):
            raise ValueError("provide exactly one of 'fixture' or 'config'")
        return self
