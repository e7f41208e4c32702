"""crumb: batch cookie-compliance auditing for site-visit cookie snapshots."""

__version__ = "0.1.0"

from .aggregate import (
    ALL_COUNTRIES,
    CookieAnalysis,
    CountryStats,
    SnapshotAnalysis,
    aggregate,
    top_k_third_party,
)
from .filterlist import FilterRule, FilterSet, is_tracker, parse_filterlist
from .model import (
    CaptureSnapshot,
    CookieRecord,
    InvalidSnapshot,
    MalformedRecord,
    Phase,
    Priority,
    SameSite,
    SourceScheme,
    load_snapshot,
    normalize_record,
    record_to_raw,
    snapshot_from_dict,
    snapshot_to_dict,
)
from .party import (
    PartyClassification,
    UnclassifiableDomain,
    Verdict,
    classify_party,
    detect_masquerading,
    path_pervasive,
)
from .profiles import (
    DuplicateCountry,
    Profile,
    UnknownRuleId,
    apply_profile,
    load_default_profiles,
    load_profiles,
)
from .psl import (
    EmptyRuleSet,
    InvalidHost,
    NoRegistrableDomain,
    SuffixRules,
    load_psl,
    registrable_domain,
)
from .security import (
    CsrfMode,
    EffectiveSameSite,
    Finding,
    PhaseMismatch,
    RuleId,
    SameSitePolicy,
    Severity,
    average_lifespan,
    csrf_susceptible,
    effective_same_site,
    lifespan_violation,
    pre_consent_violation,
    samesite_compliance,
    xss_susceptible,
)

__all__ = [
    "ALL_COUNTRIES",
    "CaptureSnapshot",
    "CookieAnalysis",
    "CookieRecord",
    "CountryStats",
    "CsrfMode",
    "DuplicateCountry",
    "EffectiveSameSite",
    "EmptyRuleSet",
    "FilterRule",
    "FilterSet",
    "Finding",
    "InvalidHost",
    "InvalidSnapshot",
    "MalformedRecord",
    "NoRegistrableDomain",
    "PartyClassification",
    "Phase",
    "PhaseMismatch",
    "Priority",
    "Profile",
    "RuleId",
    "SameSite",
    "SameSitePolicy",
    "Severity",
    "SnapshotAnalysis",
    "SourceScheme",
    "SuffixRules",
    "UnclassifiableDomain",
    "UnknownRuleId",
    "Verdict",
    "aggregate",
    "apply_profile",
    "average_lifespan",
    "classify_party",
    "csrf_susceptible",
    "detect_masquerading",
    "effective_same_site",
    "is_tracker",
    "lifespan_violation",
    "load_default_profiles",
    "load_profiles",
    "load_psl",
    "load_snapshot",
    "normalize_record",
    "parse_filterlist",
    "path_pervasive",
    "pre_consent_violation",
    "record_to_raw",
    "registrable_domain",
    "samesite_compliance",
    "snapshot_from_dict",
    "snapshot_to_dict",
    "top_k_third_party",
    "xss_susceptible",
]
