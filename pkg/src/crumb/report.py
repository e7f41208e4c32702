"""Report assembly and emission (JSON, CSV, Markdown, plot-ready CSVs).

Report bodies are fully deterministic: stable ordering everywhere and no
timestamps. Run metadata (wall time, input paths) goes to a separate sidecar
file so two runs over identical inputs emit byte-identical reports.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

from .aggregate import ALL_COUNTRIES, CountryStats
from .model import PHASE_ORDER, Phase
from .security import Finding, Severity

REPORT_VERSION = 1


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    MARKDOWN = "markdown"


class UnwritableOutput(OSError):
    pass


def stats_to_dict(stats: CountryStats) -> dict[str, Any]:
    return {
        "country": stats.country,
        "total_cookies": stats.total_cookies,
        "third_party_share": stats.third_party_share,
        "tracker_share_of_third_party": stats.tracker_share_of_third_party,
        "samesite_distribution": dict(stats.samesite_distribution),
        "default_share": stats.default_share,
        "default_secure_false_share": stats.default_secure_false_share,
        "lifespan_violation_share": stats.lifespan_violation_share,
        "avg_lifespan_days": stats.avg_lifespan_days,
        "top_third_party": [[d, f] for d, f in stats.top_third_party],
        "masquerading_instances": [
            [rd, list(sites)] for rd, sites in stats.masquerading_instances
        ],
    }


def stats_from_dict(doc: Mapping[str, Any]) -> CountryStats:
    return CountryStats(
        country=doc["country"],
        total_cookies=doc["total_cookies"],
        third_party_share=doc["third_party_share"],
        tracker_share_of_third_party=doc["tracker_share_of_third_party"],
        samesite_distribution=dict(doc["samesite_distribution"]),
        default_share=doc["default_share"],
        default_secure_false_share=doc["default_secure_false_share"],
        lifespan_violation_share=doc["lifespan_violation_share"],
        avg_lifespan_days=doc["avg_lifespan_days"],
        top_third_party=tuple((d, f) for d, f in doc["top_third_party"]),
        masquerading_instances=tuple(
            (rd, tuple(sites)) for rd, sites in doc["masquerading_instances"]
        ),
    )


def finding_record(finding: Finding, snapshot) -> dict[str, Any]:
    """Flat JSON-able record for one finding with its snapshot context."""
    return {
        "rule": finding.rule_id.value,
        "severity": finding.severity.value,
        "cookie_name": finding.cookie_key[0],
        "cookie_domain": finding.cookie_key[1],
        "site_url": finding.site_url,
        "site_host": snapshot.site_host,
        "country": snapshot.country,
        "phase": snapshot.phase.value,
        "evidence": dict(finding.evidence),
    }


def sort_finding_records(records: list[dict[str, Any]]) -> list[dict[str, Any]]:
    return sorted(
        records,
        key=lambda r: (
            r["country"],
            r["site_host"],
            PHASE_ORDER[Phase(r["phase"])],
            r["cookie_name"],
            r["cookie_domain"],
            r["rule"],
        ),
    )


def build_report(
    union_stats: list[CountryStats],
    per_phase_stats: dict[str, list[CountryStats]],
    finding_records: list[dict[str, Any]],
) -> dict[str, Any]:
    """Assemble the versioned report document from finished statistics."""
    records = sort_finding_records(finding_records)
    by_rule: dict[str, Counter] = {}
    severity_counts: Counter = Counter()
    for record in records:
        by_rule.setdefault(record["country"], Counter())[record["rule"]] += 1
        by_rule.setdefault(ALL_COUNTRIES, Counter())[record["rule"]] += 1
        severity_counts[record["severity"]] += 1
    return {
        "report_version": REPORT_VERSION,
        "views": {
            "union": {"countries": [stats_to_dict(s) for s in union_stats]},
            "per_phase": {
                phase: {"countries": [stats_to_dict(s) for s in stats]}
                for phase, stats in sorted(per_phase_stats.items())
            },
        },
        "findings_by_rule": {
            country: dict(sorted(counter.items()))
            for country, counter in sorted(by_rule.items())
        },
        "severity_counts": {s.value: severity_counts.get(s.value, 0) for s in Severity},
        "findings": records,
    }


def render_json(report: Mapping[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def render_findings_jsonl(records: Iterable[Mapping[str, Any]]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def render_findings_csv(records: Iterable[Mapping[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["rule", "severity", "cookie_name", "cookie_domain", "site_url",
         "site_host", "country", "phase", "evidence"]
    )
    for record in records:
        writer.writerow(
            [record["rule"], record["severity"], record["cookie_name"],
             record["cookie_domain"], record["site_url"], record["site_host"],
             record["country"], record["phase"],
             json.dumps(record["evidence"], sort_keys=True)]
        )
    return buffer.getvalue()


_SCALAR_METRICS = (
    "total_cookies",
    "third_party_share",
    "tracker_share_of_third_party",
    "default_share",
    "default_secure_false_share",
    "lifespan_violation_share",
    "avg_lifespan_days",
)


def render_csv(union_stats: list[CountryStats]) -> str:
    """Main metrics table: one row per (country, metric)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["country", "metric", "value"])
    for stats in union_stats:
        doc = stats_to_dict(stats)
        for metric in _SCALAR_METRICS:
            value = doc[metric]
            writer.writerow([stats.country, metric, "" if value is None else value])
        for flag, share in sorted(stats.samesite_distribution.items()):
            writer.writerow([stats.country, f"samesite_{flag.lower()}_share", share])
    return buffer.getvalue()


def _pct(fraction: float | None) -> str:
    if fraction is None:
        return "n/a"
    return f"{fraction * 100:.2f}%"


def render_markdown(report: Mapping[str, Any]) -> str:
    """Human-readable digest: attribute tables plus a findings summary."""
    union = [stats_from_dict(d) for d in report["views"]["union"]["countries"]]
    lines = ["# Cookie compliance report", ""]

    lines += ["## sameSite default and secure flags", ""]
    lines += ["| Country | Default | secure (FF) |", "| --- | --- | --- |"]
    for stats in union:
        lines.append(
            f"| {stats.country} | {_pct(stats.default_share)} "
            f"| {_pct(stats.default_secure_false_share)} |"
        )

    lines += ["", "## Cookie lifespans", ""]
    lines += [
        "| Country | Lifespan violations | Average lifespan (days) |",
        "| --- | --- | --- |",
    ]
    for stats in union:
        avg = "n/a" if stats.avg_lifespan_days is None else f"{stats.avg_lifespan_days:.1f}"
        lines.append(
            f"| {stats.country} | {_pct(stats.lifespan_violation_share)} | {avg} |"
        )

    lines += ["", "## Third parties", ""]
    lines += [
        "| Country | Cookies | Third-party | Trackers among third-party |",
        "| --- | --- | --- | --- |",
    ]
    for stats in union:
        lines.append(
            f"| {stats.country} | {stats.total_cookies} | {_pct(stats.third_party_share)} "
            f"| {_pct(stats.tracker_share_of_third_party)} |"
        )

    masquerading = [s for s in union if s.country == ALL_COUNTRIES and s.masquerading_instances]
    if masquerading:
        lines += ["", "## Masquerading cookies", ""]
        lines += ["| Cookie domain | Observed on |", "| --- | --- |"]
        for rd, sites in masquerading[0].masquerading_instances:
            lines.append(f"| {rd} | {', '.join(sites)} |")

    lines += ["", "## Findings", ""]
    lines += ["| Rule | Count |", "| --- | --- |"]
    all_rules = report["findings_by_rule"].get(ALL_COUNTRIES, {})
    for rule, count in sorted(all_rules.items()):
        lines.append(f"| {rule} | {count} |")
    lines += ["", "Severities: " + ", ".join(
        f"{name}={count}" for name, count in sorted(report["severity_counts"].items())
    )]
    return "\n".join(lines) + "\n"


def emit_report(
    union_stats: list[CountryStats],
    per_phase_stats: dict[str, list[CountryStats]],
    finding_records: list[dict[str, Any]],
    fmt: ReportFormat,
) -> str:
    """Render the report in one format and return the document text."""
    report = build_report(union_stats, per_phase_stats, finding_records)
    if fmt is ReportFormat.JSON:
        return render_json(report)
    if fmt is ReportFormat.CSV:
        return render_csv(union_stats)
    return render_markdown(report)


def _plot_rows(union_stats: list[CountryStats]) -> dict[str, list[list[Any]]]:
    plots: dict[str, list[list[Any]]] = {}
    plots["samesite_distribution.csv"] = [["country", "strict", "lax", "none", "default"]] + [
        [s.country,
         s.samesite_distribution["Strict"], s.samesite_distribution["Lax"],
         s.samesite_distribution["None"], s.samesite_distribution["Default"]]
        for s in union_stats
    ]
    plots["third_party_share.csv"] = [
        ["country", "third_party_share", "tracker_share_of_third_party"]
    ] + [
        [s.country, s.third_party_share, s.tracker_share_of_third_party]
        for s in union_stats
    ]
    plots["lifespan.csv"] = [["country", "avg_lifespan_days", "violation_share"]] + [
        [s.country,
         "" if s.avg_lifespan_days is None else s.avg_lifespan_days,
         s.lifespan_violation_share]
        for s in union_stats
    ]
    top_rows: list[list[Any]] = [["scope", "rank", "domain", "occurrence_fraction"]]
    for stats in union_stats:
        for rank, (domain, fraction) in enumerate(stats.top_third_party, start=1):
            top_rows.append([stats.country, rank, domain, fraction])
    plots["top_third_party.csv"] = top_rows
    masq_rows: list[list[Any]] = [["cookie_domain", "sites"]]
    for stats in union_stats:
        if stats.country != ALL_COUNTRIES:
            continue
        for rd, sites in stats.masquerading_instances:
            masq_rows.append([rd, "|".join(sites)])
    plots["masquerading.csv"] = masq_rows
    return plots


def write_reports(
    out_dir: str | Path,
    union_stats: list[CountryStats],
    per_phase_stats: dict[str, list[CountryStats]],
    finding_records: list[dict[str, Any]],
    formats: Iterable[ReportFormat],
    run_meta: Mapping[str, Any] | None = None,
) -> list[Path]:
    """Write report files into ``out_dir`` and return the written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UnwritableOutput(f"cannot create output directory {out}: {exc}") from exc

    report = build_report(union_stats, per_phase_stats, finding_records)
    records = report["findings"]
    formats = set(formats)
    written = []

    def write(path: Path, text: str) -> None:
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UnwritableOutput(f"cannot write {path}: {exc}") from exc
        written.append(path)

    if ReportFormat.JSON in formats:
        write(out / "report.json", render_json(report))
        write(out / "findings.jsonl", render_findings_jsonl(records))
    if ReportFormat.CSV in formats:
        write(out / "report.csv", render_csv(union_stats))
        write(out / "findings.csv", render_findings_csv(records))
        plots_dir = out / "plots"
        plots_dir.mkdir(exist_ok=True)
        for filename, rows in _plot_rows(union_stats).items():
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerows(rows)
            write(plots_dir / filename, buffer.getvalue())
    if ReportFormat.MARKDOWN in formats:
        write(out / "report.md", render_markdown(report))
    if run_meta is not None:
        write(out / "run_meta.json", json.dumps(dict(run_meta), indent=2, sort_keys=True) + "\n")
    return written
