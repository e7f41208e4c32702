"""Jurisdiction profiles: country groupings and per-profile rule activation.

Two groups ship by default: countries under GDPR/ePrivacy or the CCPA
(consent strictly required before third-party cookies) and countries with
GDPR-like regimes where consent tooling is patchier. Findings from a country
keep their analyzer severity except where the profile says otherwise;
findings from unmapped countries fall back to a neutral profile that
downgrades everything to Info.
"""

from __future__ import annotations

import configparser
import logging
from dataclasses import dataclass

from .model import CaptureSnapshot
from .security import DEFAULT_LIFESPAN_LIMIT_DAYS, Finding, RuleId, Severity

logger = logging.getLogger(__name__)


class ProfileError(ValueError):
    pass


class DuplicateCountry(ProfileError):
    """A country was assigned to more than one profile."""


class UnknownRuleId(ProfileError):
    """A profile activates a rule id the analyzer does not define."""


@dataclass(frozen=True, slots=True)
class Profile:
    id: str
    countries: frozenset[str]
    consent_required_before_third_party: bool
    lifespan_limit_days: int
    active_rules: frozenset[RuleId]


NEUTRAL_PROFILE = Profile(
    id="neutral",
    countries=frozenset(),
    consent_required_before_third_party=False,
    lifespan_limit_days=DEFAULT_LIFESPAN_LIMIT_DAYS,
    active_rules=frozenset(RuleId),
)

DEFAULT_PROFILES_CONFIG = """\
[profile:gdpr_ccpa]
countries = FR DE IT NL PL ES SE US
consent_required_before_third_party = true
lifespan_limit_days = 365
active_rules = all

[profile:gdpr_like]
countries = AU BR CA CL CN IN JP NZ KR CH
consent_required_before_third_party = false
lifespan_limit_days = 365
active_rules = all
"""


def load_profiles(config_text: str) -> list[Profile]:
    """Parse a line-oriented key-value profile config (INI sections).

    Section names take the form ``[profile:<id>]``. ``countries`` is a
    space- or comma-separated ISO alpha-2 list; ``active_rules`` lists rule
    ids or the keyword ``all``.

    Raises DuplicateCountry or UnknownRuleId on bad configuration.
    """
    parser = configparser.ConfigParser()
    try:
        parser.read_string(config_text)
    except configparser.Error as exc:
        raise ProfileError(f"unparseable profile config: {exc}") from exc

    profiles = []
    seen_countries: dict[str, str] = {}
    for section in parser.sections():
        if not section.startswith("profile:"):
            logger.warning("ignoring unrecognized config section [%s]", section)
            continue
        profile_id = section.split(":", 1)[1].strip()
        options = parser[section]

        countries = set()
        for token in options.get("countries", "").replace(",", " ").split():
            country = token.strip().upper()
            if country in seen_countries:
                raise DuplicateCountry(
                    f"country {country} appears in both "
                    f"{seen_countries[country]!r} and {profile_id!r}"
                )
            seen_countries[country] = profile_id
            countries.add(country)

        rules_spec = options.get("active_rules", "all").replace(",", " ").split()
        if any(token.lower() == "all" for token in rules_spec):
            active_rules = frozenset(RuleId)
        else:
            active_rules = set()
            for token in rules_spec:
                try:
                    active_rules.add(RuleId(token))
                except ValueError:
                    raise UnknownRuleId(f"unknown rule id {token!r} in profile {profile_id!r}") from None
            active_rules = frozenset(active_rules)

        profiles.append(
            Profile(
                id=profile_id,
                countries=frozenset(countries),
                consent_required_before_third_party=options.getboolean(
                    "consent_required_before_third_party", fallback=False
                ),
                lifespan_limit_days=options.getint(
                    "lifespan_limit_days", fallback=DEFAULT_LIFESPAN_LIMIT_DAYS
                ),
                active_rules=active_rules,
            )
        )
    if not profiles:
        raise ProfileError("profile config defines no profiles")
    return profiles


def load_default_profiles() -> list[Profile]:
    return load_profiles(DEFAULT_PROFILES_CONFIG)


def load_profiles_file(path: str) -> list[Profile]:
    with open(path, encoding="utf-8") as handle:
        return load_profiles(handle.read())


def profile_for_country(country: str, profiles: list[Profile]) -> Profile:
    """Profile governing a country; the neutral profile when unmapped."""
    for profile in profiles:
        if country in profile.countries:
            return profile
    return NEUTRAL_PROFILE


def apply_profile(
    findings: list[Finding],
    snapshot: CaptureSnapshot,
    profiles: list[Profile],
) -> list[Finding]:
    """Re-severity findings under the snapshot country's profile.

    Never adds or removes findings. Inactive rules drop to Info, pre-consent
    third-party findings become Violations exactly where consent is required
    beforehand, and unmapped countries neutralize everything to Info.
    Applying a profile twice equals applying it once.
    """
    profile = profile_for_country(snapshot.country, profiles)
    if profile is NEUTRAL_PROFILE:
        logger.debug("country %s unmapped; using neutral profile", snapshot.country)
        return [f.with_severity(Severity.INFO) for f in findings]

    adjusted = []
    for finding in findings:
        if finding.rule_id not in profile.active_rules:
            adjusted.append(finding.with_severity(Severity.INFO))
        elif finding.rule_id is RuleId.PRE_CONSENT_THIRD_PARTY:
            severity = (
                Severity.VIOLATION
                if profile.consent_required_before_third_party
                else Severity.WARNING
            )
            adjusted.append(finding.with_severity(severity))
        else:
            adjusted.append(finding)
    return adjusted
