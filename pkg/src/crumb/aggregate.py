"""Corpus-level aggregation of per-cookie results into country statistics.

Accumulators form a merge monoid: partial aggregates combine associatively
and commutatively, so aggregation is permutation-invariant over snapshots
and cookies, and aggregating two halves of a corpus then merging equals
aggregating the whole.

Counting unit is the cookie record; repeats of (name, domain, path) within
one snapshot count once. The union view additionally deduplicates the same
cookie across a site's capture phases (landing beats accept beats reject
beats revisit).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .model import PHASE_ORDER, CaptureSnapshot, CookieRecord, SameSite
from .party import PartyClassification, Verdict
from .security import Finding, RuleId, lifespan_days

ALL_COUNTRIES = "ALL"


@dataclass(frozen=True, slots=True)
class CookieAnalysis:
    """Everything the pipeline learned about one cookie record."""

    cookie: CookieRecord
    classification: PartyClassification | None
    tracker: bool
    findings: tuple[Finding, ...]


@dataclass(frozen=True, slots=True)
class SnapshotAnalysis:
    snapshot: CaptureSnapshot
    cookies: tuple[CookieAnalysis, ...]


@dataclass(frozen=True, slots=True)
class CountryStats:
    country: str
    total_cookies: int
    third_party_share: float
    tracker_share_of_third_party: float
    samesite_distribution: dict[str, float]
    default_share: float
    default_secure_false_share: float
    lifespan_violation_share: float
    avg_lifespan_days: float | None
    top_third_party: tuple[tuple[str, float], ...]
    masquerading_instances: tuple[tuple[str, tuple[str, ...]], ...]


@dataclass
class CountryAccumulator:
    """Mergeable counting state for one country scope."""

    total: int = 0
    third_party: int = 0
    trackers: int = 0
    samesite: Counter = field(default_factory=Counter)
    default_secure_false: int = 0
    lifespan_violations: int = 0
    lifespan_sum_days: float = 0.0
    persistent_cookies: int = 0
    third_party_domains: Counter = field(default_factory=Counter)
    masquerading: dict[str, set[str]] = field(default_factory=dict)

    def add(self, analysis: CookieAnalysis) -> None:
        cookie = analysis.cookie
        self.total += 1
        self.samesite[cookie.same_site.value] += 1
        if cookie.same_site is SameSite.DEFAULT and not cookie.secure:
            self.default_secure_false += 1
        classification = analysis.classification
        if classification is not None and classification.verdict is not Verdict.FIRST_PARTY:
            self.third_party += 1
            self.third_party_domains[classification.cookie_rd] += 1
            if analysis.tracker:
                self.trackers += 1
            if classification.verdict is Verdict.MASQUERADING:
                self.masquerading.setdefault(classification.cookie_rd, set()).add(
                    classification.site_rd
                )
        if any(f.rule_id is RuleId.LIFESPAN_EXCEEDED for f in analysis.findings):
            self.lifespan_violations += 1

    def add_lifespan(self, days: float) -> None:
        self.persistent_cookies += 1
        self.lifespan_sum_days += max(0.0, days)

    def merge(self, other: "CountryAccumulator") -> "CountryAccumulator":
        merged = CountryAccumulator(
            total=self.total + other.total,
            third_party=self.third_party + other.third_party,
            trackers=self.trackers + other.trackers,
            samesite=self.samesite + other.samesite,
            default_secure_false=self.default_secure_false + other.default_secure_false,
            lifespan_violations=self.lifespan_violations + other.lifespan_violations,
            lifespan_sum_days=self.lifespan_sum_days + other.lifespan_sum_days,
            persistent_cookies=self.persistent_cookies + other.persistent_cookies,
            third_party_domains=self.third_party_domains + other.third_party_domains,
        )
        for rd, sites in self.masquerading.items():
            merged.masquerading.setdefault(rd, set()).update(sites)
        for rd, sites in other.masquerading.items():
            merged.masquerading.setdefault(rd, set()).update(sites)
        return merged

    def finalize(self, country: str, top_k: int = 20) -> CountryStats:
        total = self.total
        default_count = self.samesite.get(SameSite.DEFAULT.value, 0)
        distribution = {
            member.value: (self.samesite.get(member.value, 0) / total) if total else 0.0
            for member in SameSite
        }
        return CountryStats(
            country=country,
            total_cookies=total,
            third_party_share=(self.third_party / total) if total else 0.0,
            tracker_share_of_third_party=(
                (self.trackers / self.third_party) if self.third_party else 0.0
            ),
            samesite_distribution=distribution,
            default_share=(default_count / total) if total else 0.0,
            default_secure_false_share=(
                (self.default_secure_false / default_count) if default_count else 0.0
            ),
            lifespan_violation_share=(
                (self.lifespan_violations / total) if total else 0.0
            ),
            avg_lifespan_days=(
                (self.lifespan_sum_days / self.persistent_cookies)
                if self.persistent_cookies
                else None
            ),
            top_third_party=rank_domains(self.third_party_domains, top_k),
            masquerading_instances=tuple(
                (rd, tuple(sorted(sites)))
                for rd, sites in sorted(self.masquerading.items())
            ),
        )


def rank_domains(counts: Counter, k: int) -> tuple[tuple[str, float], ...]:
    """Top-k domains as (domain, occurrence fraction), ties lexicographic."""
    total = sum(counts.values())
    if not total:
        return ()
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return tuple((domain, count / total) for domain, count in ranked[:k])


def dedup_cookies(analysis: SnapshotAnalysis) -> list[CookieAnalysis]:
    """First occurrence wins for repeated (name, domain, path) in a snapshot."""
    seen = set()
    kept = []
    for item in analysis.cookies:
        key = (item.cookie.name, item.cookie.domain, item.cookie.path)
        if key in seen:
            continue
        seen.add(key)
        kept.append(item)
    return kept


def _union_stream(
    analyses: Iterable[SnapshotAnalysis],
) -> list[tuple[SnapshotAnalysis, CookieAnalysis]]:
    """Cookie stream deduplicated per site across phases (earliest phase wins)."""
    ordered = sorted(
        analyses,
        key=lambda a: (
            a.snapshot.country,
            a.snapshot.site_host,
            PHASE_ORDER[a.snapshot.phase],
            a.snapshot.captured_at,
        ),
    )
    seen: set[tuple] = set()
    stream = []
    for analysis in ordered:
        for item in dedup_cookies(analysis):
            key = (
                analysis.snapshot.site_host,
                item.cookie.name,
                item.cookie.domain,
                item.cookie.path,
            )
            if key in seen:
                continue
            seen.add(key)
            stream.append((analysis, item))
    return stream


def accumulate(
    analyses: Iterable[SnapshotAnalysis],
    dedup_across_phases: bool = False,
) -> dict[str, CountryAccumulator]:
    """Build per-country accumulators (plus the ALL pseudo-country)."""
    if dedup_across_phases:
        stream = _union_stream(analyses)
    else:
        stream = [
            (analysis, item)
            for analysis in analyses
            for item in dedup_cookies(analysis)
        ]
    accumulators: dict[str, CountryAccumulator] = {}
    for analysis, item in stream:
        for scope in (analysis.snapshot.country, ALL_COUNTRIES):
            accumulator = accumulators.setdefault(scope, CountryAccumulator())
            accumulator.add(item)
            days = lifespan_days(item.cookie, analysis.snapshot.captured_at)
            if days is not None:
                accumulator.add_lifespan(days)
    return accumulators


def merge_accumulators(
    left: dict[str, CountryAccumulator], right: dict[str, CountryAccumulator]
) -> dict[str, CountryAccumulator]:
    merged = dict(left)
    for country, accumulator in right.items():
        if country in merged:
            merged[country] = merged[country].merge(accumulator)
        else:
            merged[country] = accumulator
    return merged


def finalize(
    accumulators: dict[str, CountryAccumulator], top_k: int = 20
) -> list[CountryStats]:
    """CountryStats per scope, ALL first then countries alphabetically."""
    ordered = sorted(accumulators, key=lambda c: (c != ALL_COUNTRIES, c))
    return [accumulators[country].finalize(country, top_k) for country in ordered]


def aggregate(
    analyses: Iterable[SnapshotAnalysis],
    dedup_across_phases: bool = False,
    top_k: int = 20,
) -> list[CountryStats]:
    """One CountryStats per country present, plus the ALL pseudo-country."""
    return finalize(accumulate(analyses, dedup_across_phases), top_k)


def top_k_third_party(
    analyses: Iterable[SnapshotAnalysis],
    k: int = 20,
    country: str = ALL_COUNTRIES,
    dedup_across_phases: bool = False,
) -> tuple[tuple[str, float], ...]:
    """Top k third-party registrable domains by occurrence within a scope."""
    accumulators = accumulate(analyses, dedup_across_phases)
    if country not in accumulators:
        return ()
    return rank_domains(accumulators[country].third_party_domains, k)
