"""First-party / third-party / masquerading classification of cookies.

A cookie is first-party when its registrable domain equals the visited
site's. A third-party cookie whose brand label (the label immediately left
of the public suffix) equals the site's brand label is masquerading: it
camouflages as first-party while living under a different registrable
domain (e.g. a shein.com cookie on shein.fr).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from .model import CaptureSnapshot, CookieRecord
from .psl import PslError, SuffixRules, registrable_domain

logger = logging.getLogger(__name__)


class UnclassifiableDomain(ValueError):
    """Raised when a registrable domain cannot be computed for either side."""


class Verdict(str, Enum):
    FIRST_PARTY = "FirstParty"
    THIRD_PARTY = "ThirdParty"
    MASQUERADING = "Masquerading"


@dataclass(frozen=True, slots=True)
class PartyClassification:
    verdict: Verdict
    site_rd: str
    cookie_rd: str
    # Brand label of the cookie's registrable domain.
    brand_label: str
    persists_after_reject: bool = False
    # False when no PostConsentReject snapshot existed for the site, in which
    # case persists_after_reject reads as "not evaluated" in reports.
    persistence_evaluated: bool = False


def brand_label(rd: str) -> str:
    """Leftmost label of a registrable domain (the label left of the suffix)."""
    return rd.split(".", 1)[0]


def detect_masquerading(cookie: CookieRecord, site_rd: str, cookie_rd: str) -> bool:
    """True when two differing registrable domains share their brand label.

    Expects site_rd != cookie_rd (the cookie is already third-party). A
    sameParty=false flag on such a cookie corroborates the verdict and is
    recorded as finding evidence, but is not required: an absent flag must
    not hide a masquerader.
    """
    masquerading = brand_label(site_rd) == brand_label(cookie_rd)
    if masquerading:
        logger.debug(
            "masquerading cookie %s: %s on %s (sameParty=%s)",
            cookie.name, cookie_rd, site_rd, cookie.same_party,
        )
    return masquerading


def classify_party(
    cookie: CookieRecord,
    snapshot: CaptureSnapshot,
    rules: SuffixRules,
    reject_keys: frozenset[tuple[str, str]] | None = None,
) -> PartyClassification:
    """Classify one cookie against the snapshot's site.

    ``reject_keys`` holds the (name, domain) pairs observed in the site's
    PostConsentReject snapshot when one exists; None means persistence after
    rejection was not evaluated.

    Raises UnclassifiableDomain when either registrable domain cannot be
    computed.
    """
    try:
        site_rd = registrable_domain(snapshot.site_host, rules)
    except PslError as exc:
        raise UnclassifiableDomain(f"site host {snapshot.site_host!r}: {exc}") from exc
    try:
        cookie_rd = registrable_domain(cookie.bare_domain, rules)
    except PslError as exc:
        raise UnclassifiableDomain(f"cookie domain {cookie.domain!r}: {exc}") from exc

    if site_rd == cookie_rd:
        verdict = Verdict.FIRST_PARTY
    elif detect_masquerading(cookie, site_rd, cookie_rd):
        verdict = Verdict.MASQUERADING
    else:
        verdict = Verdict.THIRD_PARTY

    return PartyClassification(
        verdict=verdict,
        site_rd=site_rd,
        cookie_rd=cookie_rd,
        brand_label=brand_label(cookie_rd),
        persists_after_reject=reject_keys is not None and cookie.key in reject_keys,
        persistence_evaluated=reject_keys is not None,
    )


def path_pervasive(cookie: CookieRecord) -> bool:
    """True when the cookie's path scope covers every page of its domain."""
    return cookie.path == "/"
