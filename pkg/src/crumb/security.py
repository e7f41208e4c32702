"""Per-cookie security and regulatory rules.

Each rule is a pure function of one cookie (plus snapshot context where
stated) and yields a Finding or nothing, so corpus evaluation can fan out
freely; removing one cookie never changes another cookie's findings.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from types import MappingProxyType
from typing import Any, Mapping, Sequence

from .filterlist import FilterSet, is_tracker
from .model import CaptureSnapshot, CookieRecord, Phase, SameSite
from .party import PartyClassification, Verdict, path_pervasive

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400
DEFAULT_LIFESPAN_LIMIT_DAYS = 365


class PhaseMismatch(ValueError):
    """Raised when a phase-specific check runs on the wrong snapshot phase."""


class RuleId(str, Enum):
    XSS_SUSCEPTIBLE = "XssSusceptible"
    CSRF_SUSCEPTIBLE = "CsrfSusceptible"
    SAMESITE_NONE_INSECURE = "SameSiteNoneInsecure"
    DEFAULT_WITHOUT_SECURE = "DefaultWithoutSecure"
    LIFESPAN_EXCEEDED = "LifespanExceeded"
    PRE_CONSENT_THIRD_PARTY = "PreConsentThirdParty"
    MASQUERADING_COOKIE = "MasqueradingCookie"
    PATH_PERVASIVE_TRACKER = "PathPervasiveTracker"
    CLOCK_SKEW = "ClockSkew"


class Severity(str, Enum):
    INFO = "Info"
    WARNING = "Warning"
    VIOLATION = "Violation"


class SameSitePolicy(str, Enum):
    # Pre-2019 behavior: a missing/invalid sameSite attribute behaves as None.
    LEGACY_2016 = "Legacy2016"
    # 2019/2020 behavior: the browser treats a missing attribute as Lax.
    MODERN_2020 = "Modern2020"


class CsrfMode(str, Enum):
    NONE_PLUS_DEFAULT = "NonePlusDefault"
    NONE_ONLY = "NoneOnly"


@dataclass(frozen=True)
class Finding:
    rule_id: RuleId
    severity: Severity
    cookie_key: tuple[str, str]
    site_url: str
    evidence: Mapping[str, Any]

    def __post_init__(self) -> None:
        object.__setattr__(self, "evidence", MappingProxyType(dict(self.evidence)))

    def with_severity(self, severity: Severity) -> "Finding":
        return replace(self, severity=severity)


@dataclass(frozen=True, slots=True)
class EffectiveSameSite:
    declared: SameSite
    policy: SameSitePolicy
    effective: SameSite


def effective_same_site(
    cookie: CookieRecord, policy: SameSitePolicy = SameSitePolicy.MODERN_2020
) -> EffectiveSameSite:
    """Resolve the declared sameSite value to the browser-effective one."""
    if cookie.same_site is SameSite.DEFAULT:
        effective = (
            SameSite.NONE if policy is SameSitePolicy.LEGACY_2016 else SameSite.LAX
        )
    else:
        effective = cookie.same_site
    return EffectiveSameSite(cookie.same_site, policy, effective)


def xss_susceptible(cookie: CookieRecord, site_url: str = "") -> Finding | None:
    """Script-readable cookie: httpOnly is false.

    The secure and session flags ride along as evidence; a secure flag does
    not block script access, so it never suppresses the finding.
    """
    if cookie.http_only:
        return None
    return Finding(
        rule_id=RuleId.XSS_SUSCEPTIBLE,
        severity=Severity.WARNING,
        cookie_key=cookie.key,
        site_url=site_url,
        evidence={
            "http_only": cookie.http_only,
            "secure": cookie.secure,
            "session": cookie.session,
        },
    )


def csrf_susceptible(
    cookie: CookieRecord,
    site_url: str = "",
    mode: CsrfMode = CsrfMode.NONE_PLUS_DEFAULT,
) -> Finding | None:
    """Cross-site sendable cookie: sameSite None, or Default (browser-decided).

    Default counts as susceptible unless mode is NoneOnly. Severity escalates
    to Violation when the secure flag is also false.
    """
    susceptible = cookie.same_site is SameSite.NONE or (
        mode is CsrfMode.NONE_PLUS_DEFAULT and cookie.same_site is SameSite.DEFAULT
    )
    if not susceptible:
        return None
    return Finding(
        rule_id=RuleId.CSRF_SUSCEPTIBLE,
        severity=Severity.WARNING if cookie.secure else Severity.VIOLATION,
        cookie_key=cookie.key,
        site_url=site_url,
        evidence={"same_site": cookie.same_site.value, "secure": cookie.secure},
    )


def samesite_compliance(cookie: CookieRecord, site_url: str = "") -> list[Finding]:
    """sameSite/secure pairing rules: None and Default both require secure."""
    findings = []
    if cookie.same_site is SameSite.NONE and not cookie.secure:
        findings.append(
            Finding(
                rule_id=RuleId.SAMESITE_NONE_INSECURE,
                severity=Severity.VIOLATION,
                cookie_key=cookie.key,
                site_url=site_url,
                evidence={"same_site": cookie.same_site.value, "secure": cookie.secure},
            )
        )
    if cookie.same_site is SameSite.DEFAULT and not cookie.secure:
        findings.append(
            Finding(
                rule_id=RuleId.DEFAULT_WITHOUT_SECURE,
                severity=Severity.VIOLATION,
                cookie_key=cookie.key,
                site_url=site_url,
                evidence={"same_site": cookie.same_site.value, "secure": cookie.secure},
            )
        )
    return findings


def lifespan_days(cookie: CookieRecord, captured_at: float) -> float | None:
    """Declared lifespan in 86400-second days; None for session cookies."""
    if cookie.session:
        return None
    return (cookie.expires - captured_at) / SECONDS_PER_DAY


def lifespan_violation(
    cookie: CookieRecord,
    captured_at: float,
    limit_days: int = DEFAULT_LIFESPAN_LIMIT_DAYS,
    site_url: str = "",
) -> Finding | None:
    """Persistent cookie declaring a lifespan beyond the limit.

    A persistent cookie already expired by more than a day at capture time is
    reported as an Info-level ClockSkew anomaly instead of a violation.
    """
    if cookie.session:
        return None
    span = cookie.expires - captured_at
    if span < -SECONDS_PER_DAY:
        return Finding(
            rule_id=RuleId.CLOCK_SKEW,
            severity=Severity.INFO,
            cookie_key=cookie.key,
            site_url=site_url,
            evidence={"expires": cookie.expires, "captured_at": captured_at},
        )
    if span <= limit_days * SECONDS_PER_DAY:
        return None
    return Finding(
        rule_id=RuleId.LIFESPAN_EXCEEDED,
        severity=Severity.VIOLATION,
        cookie_key=cookie.key,
        site_url=site_url,
        evidence={
            "expires": cookie.expires,
            "captured_at": captured_at,
            "lifespan_days": span / SECONDS_PER_DAY,
            "limit_days": limit_days,
        },
    )


# Marker returned by average_lifespan when a snapshot has no persistent cookie.
NO_PERSISTENT_COOKIES = None


def average_lifespan(snapshot: CaptureSnapshot) -> float | None:
    """Mean lifespan in days over the snapshot's persistent cookies.

    Session cookies are excluded; negative lifespans clamp to 0 before
    averaging. Returns the NO_PERSISTENT_COOKIES marker for all-session
    snapshots.
    """
    spans = [
        max(0.0, (c.expires - snapshot.captured_at) / SECONDS_PER_DAY)
        for c in snapshot.cookies
        if not c.session
    ]
    if not spans:
        return NO_PERSISTENT_COOKIES
    return sum(spans) / len(spans)


def masquerading_finding(
    cookie: CookieRecord,
    classification: PartyClassification,
    site_url: str = "",
) -> Finding | None:
    """Finding for a third-party cookie camouflaged under the site's brand.

    Persisting through an explicit reject raises the severity to Violation.
    """
    if classification.verdict is not Verdict.MASQUERADING:
        return None
    severity = (
        Severity.VIOLATION if classification.persists_after_reject else Severity.WARNING
    )
    return Finding(
        rule_id=RuleId.MASQUERADING_COOKIE,
        severity=severity,
        cookie_key=cookie.key,
        site_url=site_url,
        evidence={
            "site_rd": classification.site_rd,
            "cookie_rd": classification.cookie_rd,
            "brand_label": classification.brand_label,
            "same_party": cookie.same_party,
            "persists_after_reject": (
                classification.persists_after_reject
                if classification.persistence_evaluated
                else "not evaluated"
            ),
        },
    )


def path_pervasive_tracker(
    cookie: CookieRecord,
    classification: PartyClassification,
    tracker: bool,
    site_url: str = "",
) -> Finding | None:
    """Tracker-listed third-party cookie whose path scope spans every page."""
    if classification.verdict is Verdict.FIRST_PARTY or not tracker:
        return None
    if not path_pervasive(cookie):
        return None
    return Finding(
        rule_id=RuleId.PATH_PERVASIVE_TRACKER,
        severity=Severity.INFO,
        cookie_key=cookie.key,
        site_url=site_url,
        evidence={"path": cookie.path, "cookie_rd": classification.cookie_rd},
    )


def pre_consent_violation(
    snapshot: CaptureSnapshot,
    classifications: Sequence[PartyClassification | None],
    filters: FilterSet,
) -> list[Finding]:
    """Third-party cookies already present on landing, before any consent.

    One finding per non-first-party cookie; tracker-listed ones are
    Violations, the rest Warnings. Without a CMP on the page the severity is
    capped at Warning (jurisdiction profiles adjust it later).

    Raises PhaseMismatch when the snapshot is not an OnLanding capture.
    """
    if snapshot.phase is not Phase.ON_LANDING:
        raise PhaseMismatch(
            f"pre-consent check requires an OnLanding snapshot, got {snapshot.phase.value}"
        )
    findings = []
    for cookie, classification in zip(snapshot.cookies, classifications):
        if classification is None or classification.verdict is Verdict.FIRST_PARTY:
            continue
        tracker = is_tracker(
            cookie.bare_domain,
            classification.site_rd,
            filters,
            cookie_rd=classification.cookie_rd,
        )
        severity = Severity.VIOLATION if tracker else Severity.WARNING
        if not snapshot.cmp_present:
            severity = Severity.WARNING
        findings.append(
            Finding(
                rule_id=RuleId.PRE_CONSENT_THIRD_PARTY,
                severity=severity,
                cookie_key=cookie.key,
                site_url=snapshot.site_url,
                evidence={
                    "cookie_rd": classification.cookie_rd,
                    "site_rd": classification.site_rd,
                    "tracker": tracker,
                    "cmp_present": snapshot.cmp_present,
                },
            )
        )
    return findings
