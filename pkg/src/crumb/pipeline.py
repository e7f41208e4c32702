"""Full audit pipeline: ingest, classify, filter, analyze, profile, aggregate.

Snapshots are processed in a deterministic order and each cookie is analyzed
independently, so the pipeline can fan out per snapshot; the aggregation
merge is order-independent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .aggregate import CookieAnalysis, SnapshotAnalysis, aggregate
from .filterlist import FilterSet, is_tracker
from .model import PHASE_ORDER, CaptureSnapshot, InvalidSnapshot, Phase, load_snapshot
from .party import UnclassifiableDomain, classify_party
from .profiles import Profile, apply_profile, profile_for_country
from .psl import SuffixRules
from .report import ReportFormat, finding_record, write_reports
from .security import (
    CsrfMode,
    Finding,
    Severity,
    csrf_susceptible,
    lifespan_violation,
    masquerading_finding,
    path_pervasive_tracker,
    pre_consent_violation,
    samesite_compliance,
    xss_susceptible,
)

logger = logging.getLogger(__name__)


@dataclass
class SnapshotStore:
    """Validated snapshots indexed by (site_host, phase, country)."""

    snapshots: dict[tuple[str, str, str], CaptureSnapshot] = field(default_factory=dict)
    errors: list[tuple[str, str]] = field(default_factory=list)

    def add(self, snapshot: CaptureSnapshot, source: str) -> None:
        key = (snapshot.site_host, snapshot.phase.value, snapshot.country)
        if key in self.snapshots:
            logger.warning("duplicate snapshot for %s from %s, keeping first", key, source)
            return
        self.snapshots[key] = snapshot

    def ordered(self) -> list[CaptureSnapshot]:
        return sorted(
            self.snapshots.values(),
            key=lambda s: (s.country, s.site_host, PHASE_ORDER[s.phase], s.captured_at),
        )

    def reject_keys(self, site_host: str) -> frozenset[tuple[str, str]] | None:
        """Cookie keys seen in the site's PostConsentReject snapshot, if any."""
        for (host, phase, _country), snapshot in self.snapshots.items():
            if host == site_host and phase == Phase.POST_CONSENT_REJECT.value:
                return frozenset(c.key for c in snapshot.cookies)
        return None


def ingest(paths: list[str | Path]) -> SnapshotStore:
    """Load snapshot JSON files from files or directories, fail-soft per file."""
    store = SnapshotStore()
    files: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(path.glob("*.json")))
        else:
            files.append(path)
    for path in files:
        try:
            snapshot = load_snapshot(str(path))
        except (InvalidSnapshot, OSError) as exc:
            store.errors.append((str(path), str(exc)))
            logger.warning("skipping %s: %s", path, exc)
            continue
        store.add(snapshot, str(path))
    return store


def analyze_snapshot(
    snapshot: CaptureSnapshot,
    rules: SuffixRules,
    filters: FilterSet,
    profiles: list[Profile],
    lifespan_limit_days: int | None = None,
    csrf_mode: CsrfMode = CsrfMode.NONE_PLUS_DEFAULT,
    reject_keys: frozenset[tuple[str, str]] | None = None,
) -> SnapshotAnalysis:
    """Run every per-cookie rule plus the snapshot-level pre-consent check.

    ``lifespan_limit_days`` overrides the country profile's limit when given.
    """
    profile = profile_for_country(snapshot.country, profiles)
    limit = lifespan_limit_days if lifespan_limit_days is not None else profile.lifespan_limit_days

    analyses = []
    classifications = []
    for cookie in snapshot.cookies:
        try:
            classification = classify_party(cookie, snapshot, rules, reject_keys)
        except UnclassifiableDomain as exc:
            logger.warning("%s: %s", snapshot.site_url, exc)
            classification = None
        classifications.append(classification)

        tracker = False
        if classification is not None:
            tracker = is_tracker(
                cookie.bare_domain,
                classification.site_rd,
                filters,
                cookie_rd=classification.cookie_rd,
            )

        findings: list[Finding] = []
        for finding in (
            xss_susceptible(cookie, snapshot.site_url),
            csrf_susceptible(cookie, snapshot.site_url, csrf_mode),
            lifespan_violation(cookie, snapshot.captured_at, limit, snapshot.site_url),
        ):
            if finding is not None:
                findings.append(finding)
        findings.extend(samesite_compliance(cookie, snapshot.site_url))
        if classification is not None:
            for finding in (
                masquerading_finding(cookie, classification, snapshot.site_url),
                path_pervasive_tracker(cookie, classification, tracker, snapshot.site_url),
            ):
                if finding is not None:
                    findings.append(finding)

        analyses.append(
            CookieAnalysis(
                cookie=cookie,
                classification=classification,
                tracker=tracker,
                findings=tuple(apply_profile(findings, snapshot, profiles)),
            )
        )

    if snapshot.phase is Phase.ON_LANDING:
        pre_consent = apply_profile(
            pre_consent_violation(snapshot, classifications, filters),
            snapshot,
            profiles,
        )
        by_key: dict[tuple[str, str], list[Finding]] = {}
        for finding in pre_consent:
            by_key.setdefault(finding.cookie_key, []).append(finding)
        analyses = [
            CookieAnalysis(
                cookie=a.cookie,
                classification=a.classification,
                tracker=a.tracker,
                findings=a.findings + tuple(by_key.get(a.cookie.key, ())),
            )
            for a in analyses
        ]

    return SnapshotAnalysis(snapshot=snapshot, cookies=tuple(analyses))


@dataclass
class AuditResult:
    analyses: list[SnapshotAnalysis]
    union_stats: list
    per_phase_stats: dict[str, list]
    finding_records: list[dict]
    violation_count: int
    written: list[Path] = field(default_factory=list)


def run_audit(
    store: SnapshotStore,
    rules: SuffixRules,
    filters: FilterSet,
    profiles: list[Profile],
    out_dir: str | Path | None = None,
    formats: set[ReportFormat] | None = None,
    lifespan_limit_days: int | None = None,
    csrf_mode: CsrfMode = CsrfMode.NONE_PLUS_DEFAULT,
    run_meta: dict | None = None,
) -> AuditResult:
    """Analyze every stored snapshot and (optionally) write report files."""
    analyses = []
    for snapshot in store.ordered():
        reject_keys = None
        if snapshot.phase is not Phase.POST_CONSENT_REJECT:
            reject_keys = store.reject_keys(snapshot.site_host)
        analyses.append(
            analyze_snapshot(
                snapshot,
                rules,
                filters,
                profiles,
                lifespan_limit_days=lifespan_limit_days,
                csrf_mode=csrf_mode,
                reject_keys=reject_keys,
            )
        )

    union_stats = aggregate(analyses, dedup_across_phases=True)
    phases_present = sorted(
        {a.snapshot.phase for a in analyses}, key=lambda p: PHASE_ORDER[p]
    )
    per_phase_stats = {
        phase.value: aggregate(
            [a for a in analyses if a.snapshot.phase is phase],
            dedup_across_phases=False,
        )
        for phase in phases_present
    }

    finding_records = [
        finding_record(finding, analysis.snapshot)
        for analysis in analyses
        for cookie_analysis in analysis.cookies
        for finding in cookie_analysis.findings
    ]
    violation_count = sum(
        1 for record in finding_records if record["severity"] == Severity.VIOLATION.value
    )

    result = AuditResult(
        analyses=analyses,
        union_stats=union_stats,
        per_phase_stats=per_phase_stats,
        finding_records=finding_records,
        violation_count=violation_count,
    )
    if out_dir is not None:
        result.written = write_reports(
            out_dir,
            union_stats,
            per_phase_stats,
            finding_records,
            formats or {ReportFormat.JSON, ReportFormat.CSV, ReportFormat.MARKDOWN},
            run_meta=run_meta,
        )
    return result
