"""
Command-line surface.

    python -m app.cli synth    --fixture paper_design --out out/
    python -m app.cli gain     --config lesa.ini --engine abcd --design.theta_trim_deg 0
    python -m app.cli compress --fixture paper_design
    python -m app.cli imd      --fixture paper_design --sweep.p_points 101
    python -m app.cli plot     out/gain_cm.csv out/gain_abcd.csv -o out/gain.svg

Exit codes: 0 success, 1 configuration/usage error, 2 numeric failure.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from dotenv import load_dotenv

from app.core.config import settings
from app.core.errors import ConfigError, LesaError
from app.core.fixtures import FIXTURES, load_fixture
from app.models.run_config import SECTION_NAMES, RunConfig
from app.services.config_parser import parse_config
from app.services.pipeline import ENGINES, DesignPipeline
from app.services.plotting import plot_tables
from app.services.report_writer import write_bundle

logger = logging.getLogger("app.cli")

RUN_COMMANDS = ("synth", "gain", "compress", "imd")


class _Parser(argparse.ArgumentParser):
    """Usage errors become ConfigError so they exit with code 1."""

    def error(self, message):
        raise ConfigError(f"usage: {message}")


def split_overrides(argv: List[str]) -> Tuple[List[str], Dict[str, str]]:
    """Pull --section.key value (or --section.key=value) pairs out of argv."""
    rest, overrides = [], {}
    i = 0
    while i < len(argv):
        token = argv[i]
        name = token[2:].split("=", 1)[0] if token.startswith("--") else ""
        if "." in name and name.split(".", 1)[0] in SECTION_NAMES:
            if "=" in token:
                overrides[name] = token.split("=", 1)[1]
                i += 1
            elif i + 1 < len(argv):
                overrides[name] = argv[i + 1]
                i += 2
            else:
                raise ConfigError(f"override {token} needs a value", key=name)
            continue
        rest.append(token)
        i += 1
    return rest, overrides


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lesa", description="LESA design and simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in RUN_COMMANDS:
        cmd = sub.add_parser(name)
        source = cmd.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", type=Path, help="INI run configuration")
        source.add_argument("--fixture", choices=sorted(FIXTURES), help="built-in configuration")
        cmd.add_argument("--out", type=Path, default=Path(settings.OUTPUT_DIR), help="output directory")
        if name == "gain":
            cmd.add_argument("--engine", choices=ENGINES, default="cm")

    plot = sub.add_parser("plot")
    plot.add_argument("csv", nargs="+", type=Path)
    plot.add_argument("-o", "--output", type=Path, required=True, help="SVG file to write")
    return parser


def load_run_config(args: argparse.Namespace, overrides: Dict[str, str]) -> RunConfig:
    if args.fixture:
        text = load_fixture(args.fixture)
    else:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}", key="config") from e
    return parse_config(text, overrides)


def run(argv: List[str]) -> None:
    argv, overrides = split_overrides(argv)
    args = build_parser().parse_args(argv)

    if args.command == "plot":
        if overrides:
            raise ConfigError("plot takes no --section.key overrides")
        path = plot_tables(args.csv, args.output)
        print(path)
        return

    config = load_run_config(args, overrides)
    pipeline = DesignPipeline(config)
    logger.info(f"[CLI] {args.command} (config {pipeline.hash[:12]})")
    bundle = pipeline.run(args.command, engine=getattr(args, "engine", "cm"))
    files = write_bundle(bundle, args.out)
    for name in files:
        print(args.out / name)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        run(list(sys.argv[1:] if argv is None else argv))
    except LesaError as e:
        logger.error(f"[CLI] {type(e).__name__}: {e}")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
