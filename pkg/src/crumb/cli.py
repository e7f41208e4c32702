"""Command-line entry point.

Subcommands:
  ingest   validate snapshot files and print a summary
  audit    run the full pipeline and write report files

Every flag can be supplied through a CRUMB_-prefixed environment variable
(e.g. CRUMB_PSL, CRUMB_OUT; list-valued variables are colon-separated).
Logs go to standard error; reports go to files only.

Exit codes for audit: 0 success, 1 operational error, 2 when any
Violation-severity finding exists (for CI gating).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .filterlist import load_filterlists
from .pipeline import ingest, run_audit
from .profiles import ProfileError, load_default_profiles, load_profiles_file
from .psl import PslError, load_psl_file
from .report import ReportFormat, UnwritableOutput
from .security import CsrfMode, DEFAULT_LIFESPAN_LIMIT_DAYS

logger = logging.getLogger(__name__)

ENV_PREFIX = "CRUMB_"

_CSRF_MODES = {
    "none-plus-default": CsrfMode.NONE_PLUS_DEFAULT,
    "none-only": CsrfMode.NONE_ONLY,
}


@dataclass
class RunConfig:
    snapshot_paths: list[str]
    psl_path: str
    filterlist_paths: list[str]
    out_dir: str
    profiles_path: str | None = None
    lifespan_limit_days: int | None = None
    csrf_mode: CsrfMode = CsrfMode.NONE_PLUS_DEFAULT
    formats: set[ReportFormat] = field(
        default_factory=lambda: {ReportFormat.JSON, ReportFormat.CSV, ReportFormat.MARKDOWN}
    )


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def _env_list(name: str) -> list[str] | None:
    raw = _env(name)
    if raw is None:
        return None
    return [part for part in raw.split(os.pathsep) if part]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crumb",
        description="Audit cookie capture snapshots for security and consent compliance.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--snapshots",
        action="append",
        default=None,
        metavar="PATH",
        help="snapshot JSON file or directory (repeatable)",
    )

    sub.add_parser("ingest", parents=[common], help="validate snapshot files")

    audit = sub.add_parser("audit", parents=[common], help="run the full audit pipeline")
    audit.add_argument("--psl", default=_env("PSL"), metavar="FILE",
                       help="public suffix list file")
    audit.add_argument("--filterlist", action="append", default=None, metavar="FILE",
                       help="Adblock-syntax filter list (repeatable)")
    audit.add_argument("--profiles", default=_env("PROFILES"), metavar="FILE",
                       help="jurisdiction profile config (built-in default when omitted)")
    audit.add_argument("--lifespan-days", type=int, default=None, metavar="N",
                       help=f"override the lifespan limit for every profile "
                            f"(profiles default to {DEFAULT_LIFESPAN_LIMIT_DAYS})")
    audit.add_argument("--csrf-mode", choices=sorted(_CSRF_MODES), default=None,
                       help="count Default sameSite as CSRF-susceptible or only None")
    audit.add_argument("--out", default=_env("OUT"), metavar="DIR",
                       help="report output directory")
    audit.add_argument("--format", action="append", default=None,
                       choices=[f.value for f in ReportFormat],
                       help="report format (repeatable; default: all)")
    return parser


def _resolve_audit_config(args: argparse.Namespace) -> RunConfig:
    snapshots = args.snapshots or _env_list("SNAPSHOTS")
    if not snapshots:
        raise SystemExit("error: --snapshots is required (or set CRUMB_SNAPSHOTS)")
    if not args.psl:
        raise SystemExit("error: --psl is required (or set CRUMB_PSL)")
    filterlists = args.filterlist or _env_list("FILTERLIST")
    if not filterlists:
        raise SystemExit("error: --filterlist is required (or set CRUMB_FILTERLIST)")
    if not args.out:
        raise SystemExit("error: --out is required (or set CRUMB_OUT)")

    lifespan = args.lifespan_days
    if lifespan is None and _env("LIFESPAN_DAYS"):
        lifespan = int(_env("LIFESPAN_DAYS"))
    csrf_raw = args.csrf_mode or _env("CSRF_MODE")
    csrf_mode = _CSRF_MODES[csrf_raw] if csrf_raw else CsrfMode.NONE_PLUS_DEFAULT

    formats_raw = args.format or _env_list("FORMAT")
    formats = (
        {ReportFormat(f) for f in formats_raw}
        if formats_raw
        else {ReportFormat.JSON, ReportFormat.CSV, ReportFormat.MARKDOWN}
    )
    return RunConfig(
        snapshot_paths=snapshots,
        psl_path=args.psl,
        filterlist_paths=filterlists,
        out_dir=args.out,
        profiles_path=args.profiles,
        lifespan_limit_days=lifespan,
        csrf_mode=csrf_mode,
        formats=formats,
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    snapshots = args.snapshots or _env_list("SNAPSHOTS")
    if not snapshots:
        print("error: --snapshots is required (or set CRUMB_SNAPSHOTS)", file=sys.stderr)
        return 1
    store = ingest(snapshots)
    for path, message in store.errors:
        logger.warning("invalid snapshot %s: %s", path, message)
    print(
        f"ingested {len(store.snapshots)} snapshot(s), "
        f"{len(store.errors)} invalid file(s)",
        file=sys.stderr,
    )
    return 0 if store.snapshots else 1


def cmd_audit(args: argparse.Namespace) -> int:
    config = _resolve_audit_config(args)
    started = time.time()

    try:
        rules = load_psl_file(config.psl_path)
    except (OSError, PslError) as exc:
        logger.error("cannot load public suffix list: %s", exc)
        return 1
    try:
        filters = load_filterlists(config.filterlist_paths)
    except OSError as exc:
        logger.error("cannot load filter list: %s", exc)
        return 1
    try:
        profiles = (
            load_profiles_file(config.profiles_path)
            if config.profiles_path
            else load_default_profiles()
        )
    except (OSError, ProfileError) as exc:
        logger.error("cannot load profiles: %s", exc)
        return 1

    store = ingest(config.snapshot_paths)
    for path, message in store.errors:
        logger.warning("invalid snapshot %s: %s", path, message)
    if not store.snapshots:
        logger.error("no valid snapshots among %d file error(s)", len(store.errors))
        return 1

    try:
        result = run_audit(
            store,
            rules,
            filters,
            profiles,
            out_dir=config.out_dir,
            formats=config.formats,
            lifespan_limit_days=config.lifespan_limit_days,
            csrf_mode=config.csrf_mode,
            run_meta={
            "tool_version": __version__,
            "started_at": started,
            "duration_seconds": time.time() - started,
                "snapshot_paths": sorted(str(Path(p)) for p in config.snapshot_paths),
                "psl": str(config.psl_path),
                "filterlists": [str(p) for p in config.filterlist_paths],
                "snapshots_analyzed": len(store.snapshots),
                "invalid_files": len(store.errors),
            },
        )
    except UnwritableOutput as exc:
        logger.error("%s", exc)
        return 1
    logger.info(
        "analyzed %d snapshot(s): %d finding(s), %d violation(s); reports in %s",
        len(store.snapshots),
        len(result.finding_records),
        result.violation_count,
        config.out_dir,
    )
    return 2 if result.violation_count else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "ingest":
        return cmd_ingest(args)
    return cmd_audit(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
