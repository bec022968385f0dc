"""
Config Parser Service.
INI text <-> RunConfig. Errors carry the offending key and its source line.
"""
import configparser
import hashlib
import logging
import re
from typing import Dict, Mapping, Optional, Tuple

from pydantic import ValidationError

from app.core.errors import ConfigError
from app.models.run_config import SECTION_NAMES, RunConfig

logger = logging.getLogger(__name__)

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([A-Za-z0-9_]+)\s*[=:]")


def _line_index(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    """(section, key) -> 1-based line; (section, None) for headers."""
    index = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        match = _SECTION_RE.match(line)
        if match:
            section = match.group(1).strip()
            index[(section, None)] = number
            continue
        match = _KEY_RE.match(line)
        if match and section is not None:
            index.setdefault((section, match.group(1)), number)
    return index


def _read_ini(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        default_section="__defaults__",
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("key outside of any [section]", line=e.lineno) from e
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as e:
        raise ConfigError(e.message, line=e.lineno) from e
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError("malformed line, expected key = value", line=line) from e
    return parser


def parse_config(text: str, overrides: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Parse INI text into a validated RunConfig.
    overrides maps "section.key" to a raw string value and wins over the text.
    """
    parser = _read_ini(text)
    lines = _line_index(text)

    for section in parser.sections():
        if section not in SECTION_NAMES:
            raise ConfigError(
                f"unknown section [{section}]", key=section, line=lines.get((section, None))
            )
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if section not in SECTION_NAMES or not key:
            raise ConfigError(f"override '{dotted}' is not of the form section.key", key=dotted)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, str(value))
        # an override has no source line
        lines.pop((section, key), None)

    data = {section: dict(parser.items(section)) for section in parser.sections()}
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise _to_config_error(e, lines) from e


def _to_config_error(e: ValidationError, lines: Dict) -> ConfigError:
    first = e.errors()[0]
    loc = [str(part) for part in first["loc"]]
    section = loc[0] if loc else None
    key = loc[1] if len(loc) > 1 else None
    if key is not None and key.isdigit():
        key = None
    line = lines.get((section, key)) if key else lines.get((section, None))
    name = f"{section}.{key}" if key else section
    return ConfigError(f"{name}: {first['msg']}", key=key or section, line=line)


def _format_value(value) -> str:
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize(config: RunConfig) -> str:
    """INI text that parses back to an equal RunConfig."""
    blocks = []
    for name in SECTION_NAMES:
        section = getattr(config, name)
        if section is None:
            continue
        body = [f"[{name}]"]
        for key, value in section.model_dump(exclude_none=True).items():
            body.append(f"{key} = {_format_value(value)}")
        blocks.append("\n".join(body))
    return "\n\n".join(blocks) + "\n"


def config_hash(config: RunConfig) -> str:
    return hashlib.sha256(serialize(config).encode()).hexdigest()
