"""Cookie and snapshot data model.

A captured cookie carries the fourteen attributes a Chromium-family devtools
export produces (``Network.getAllCookies``). Snapshots group every cookie
observed during one visit to one site at one consent phase, and are exchanged
as JSON files (see ``schemas/snapshot.schema.json``).

Session cookies carry no expiry; they are normalized to the ``SESSION_EXPIRES``
sentinel so that ``session == (expires == SESSION_EXPIRES)`` always holds.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping
from urllib.parse import urlparse

logger = logging.getLogger(__name__)

# Expiry value stored for session cookies (devtools exports use -1).
SESSION_EXPIRES = -1.0

_DOMAIN_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789-_")


class MalformedRecord(ValueError):
    """Raised when a raw cookie record cannot be normalized."""


class InvalidSnapshot(ValueError):
    """Raised when a snapshot document violates the snapshot contract."""


class Priority(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


class SameSite(str, Enum):
    STRICT = "Strict"
    LAX = "Lax"
    NONE = "None"
    # Attribute absent, blank, or carrying an unknown value; the browser
    # decides how to treat the cookie.
    DEFAULT = "Default"


class SourceScheme(str, Enum):
    SECURE = "Secure"
    NON_SECURE = "NonSecure"
    UNSET = "Unset"


class Phase(str, Enum):
    ON_LANDING = "OnLanding"
    POST_CONSENT_ACCEPT = "PostConsentAccept"
    POST_CONSENT_REJECT = "PostConsentReject"
    REVISIT = "Revisit"


# Capture order of the phases within one visit session.
PHASE_ORDER = {
    Phase.ON_LANDING: 0,
    Phase.POST_CONSENT_ACCEPT: 1,
    Phase.POST_CONSENT_REJECT: 2,
    Phase.REVISIT: 3,
}


@dataclass(frozen=True, slots=True)
class CookieRecord:
    """One captured cookie, immutable after construction."""

    domain: str
    expires: float
    http_only: bool
    name: str
    path: str
    priority: Priority
    same_party: bool
    same_site: SameSite
    secure: bool
    session: bool
    size: int
    source_port: int
    source_scheme: SourceScheme
    value: str

    @property
    def bare_domain(self) -> str:
        """Domain attribute with a single leading dot removed."""
        return self.domain[1:] if self.domain.startswith(".") else self.domain

    @property
    def key(self) -> tuple[str, str]:
        """(name, domain) pair identifying the cookie within a snapshot."""
        return (self.name, self.domain)


@dataclass(frozen=True, slots=True)
class CaptureSnapshot:
    """Every cookie observed for one site visit at one consent phase."""

    site_url: str
    site_host: str
    country: str
    phase: Phase
    captured_at: float
    cmp_present: bool
    cookies: tuple[CookieRecord, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.captured_at <= 0:
            raise InvalidSnapshot("captured_at must be positive")
        if not self.site_host:
            raise InvalidSnapshot("site_host must be non-empty")
        if (
            self.phase in (Phase.POST_CONSENT_ACCEPT, Phase.POST_CONSENT_REJECT)
            and not self.cmp_present
        ):
            raise InvalidSnapshot(
                f"phase {self.phase.value} requires cmp_present to be true"
            )


def _valid_domain(domain: str) -> bool:
    """Syntactic DNS-name check: labels of 1-63 chars, at most 253 total."""
    if not domain or len(domain) > 253:
        return False
    for label in domain.split("."):
        if not 1 <= len(label) <= 63:
            return False
        if not set(label) <= _DOMAIN_CHARS:
            return False
    return True


def _parse_same_site(raw: Any) -> SameSite:
    if isinstance(raw, str):
        lowered = raw.strip().lower()
        if lowered == "strict":
            return SameSite.STRICT
        if lowered == "lax":
            return SameSite.LAX
        if lowered == "none":
            return SameSite.NONE
    return SameSite.DEFAULT


def _parse_priority(raw: Any) -> Priority:
    if raw is None:
        return Priority.MEDIUM
    if isinstance(raw, str):
        lowered = raw.strip().lower()
        for member in Priority:
            if member.value.lower() == lowered:
                return member
    logger.warning("unknown cookie priority %r, defaulting to Medium", raw)
    return Priority.MEDIUM


def _parse_source_scheme(raw: Any) -> SourceScheme:
    if isinstance(raw, str):
        lowered = raw.strip().lower()
        for member in SourceScheme:
            if member.value.lower() == lowered:
                return member
    return SourceScheme.UNSET


def normalize_record(raw: Mapping[str, Any]) -> CookieRecord:
    """Canonicalize a raw attribute map (devtools key names) into a CookieRecord.

    Missing sameSite becomes Default, missing boolean flags become false, a
    missing or negative expiry marks a session cookie. Normalizing an
    already-normalized record is a no-op.

    Raises MalformedRecord when the name is empty or the domain is not a
    syntactically valid DNS name.
    """
    name = str(raw.get("name", "")).strip()
    if not name:
        raise MalformedRecord("cookie name is empty")

    domain = str(raw.get("domain", "")).strip().lower()
    if not _valid_domain(domain[1:] if domain.startswith(".") else domain):
        raise MalformedRecord(f"invalid cookie domain {domain!r}")

    path = str(raw.get("path", "") or "").strip()
    if not path:
        path = "/"
    elif not path.startswith("/"):
        path = "/" + path

    raw_expires = raw.get("expires")
    if raw_expires is not None:
        try:
            raw_expires = float(raw_expires)
        except (TypeError, ValueError):
            raise MalformedRecord(f"expires {raw_expires!r} is not a number") from None
    raw_session = raw.get("session")
    if raw_session is not None:
        session = bool(raw_session)
        if not session and (raw_expires is None or raw_expires < 0):
            session = True
    else:
        session = raw_expires is None or raw_expires < 0
    expires = SESSION_EXPIRES if session else raw_expires

    raw_size = raw.get("size")
    if raw_size is None:
        size = len(name) + len(str(raw.get("value", "")))
    else:
        size = int(raw_size)
        if size < 0:
            logger.warning("negative cookie size %d clamped to 0", size)
            size = 0

    raw_port = raw.get("sourcePort")
    source_port = int(raw_port) if raw_port is not None else 0
    if not 0 <= source_port <= 65535:
        logger.warning("source port %d out of range, recorded as 0", source_port)
        source_port = 0

    return CookieRecord(
        domain=domain,
        expires=expires,
        http_only=bool(raw.get("httpOnly", False)),
        name=name,
        path=path,
        priority=_parse_priority(raw.get("priority")),
        same_party=bool(raw.get("sameParty", False)),
        same_site=_parse_same_site(raw.get("sameSite")),
        secure=bool(raw.get("secure", False)),
        session=session,
        size=size,
        source_port=source_port,
        source_scheme=_parse_source_scheme(raw.get("sourceScheme")),
        value=str(raw.get("value", "")).strip(),
    )


def record_to_raw(cookie: CookieRecord) -> dict[str, Any]:
    """Serialize a CookieRecord back to the devtools-style attribute map."""
    return {
        "domain": cookie.domain,
        "expires": cookie.expires,
        "httpOnly": cookie.http_only,
        "name": cookie.name,
        "path": cookie.path,
        "priority": cookie.priority.value,
        "sameParty": cookie.same_party,
        "sameSite": cookie.same_site.value,
        "secure": cookie.secure,
        "session": cookie.session,
        "size": cookie.size,
        "sourcePort": cookie.source_port,
        "sourceScheme": cookie.source_scheme.value,
        "value": cookie.value,
    }


def snapshot_from_dict(doc: Mapping[str, Any]) -> CaptureSnapshot:
    """Build a CaptureSnapshot from a parsed snapshot JSON document.

    Raises InvalidSnapshot (with the offending field named) or
    MalformedRecord for a bad cookie entry.
    """
    for key in ("site_url", "country", "phase", "captured_at", "cmp_present", "cookies"):
        if key not in doc:
            raise InvalidSnapshot(f"missing required key {key!r}")

    site_url = str(doc["site_url"])
    host = urlparse(site_url).hostname
    if not host:
        raise InvalidSnapshot(f"site_url {site_url!r} has no hostname")

    phase_raw = str(doc["phase"])
    try:
        phase = Phase(phase_raw)
    except ValueError:
        matches = [p for p in Phase if p.value.lower() == phase_raw.strip().lower()]
        if not matches:
            raise InvalidSnapshot(f"unknown phase {phase_raw!r}") from None
        phase = matches[0]

    country = str(doc["country"]).strip().upper()
    if len(country) != 2 or not country.isalpha():
        raise InvalidSnapshot(f"country {doc['country']!r} is not an ISO alpha-2 code")

    raw_cookies = doc["cookies"]
    if not isinstance(raw_cookies, list):
        raise InvalidSnapshot("cookies must be an array")
    cookies = []
    for index, raw in enumerate(raw_cookies):
        if not isinstance(raw, Mapping):
            raise InvalidSnapshot(f"cookies[{index}] is not an object")
        try:
            cookies.append(normalize_record(raw))
        except MalformedRecord as exc:
            raise InvalidSnapshot(f"cookies[{index}]: {exc}") from exc

    try:
        captured_at = float(doc["captured_at"])
    except (TypeError, ValueError):
        raise InvalidSnapshot("captured_at is not a number") from None

    return CaptureSnapshot(
        site_url=site_url,
        site_host=host.lower(),
        country=country,
        phase=phase,
        captured_at=captured_at,
        cmp_present=bool(doc["cmp_present"]),
        cookies=tuple(cookies),
    )


def snapshot_to_dict(snapshot: CaptureSnapshot) -> dict[str, Any]:
    """Serialize a snapshot to the JSON document shape (site_host is derived)."""
    return {
        "site_url": snapshot.site_url,
        "country": snapshot.country,
        "phase": snapshot.phase.value,
        "captured_at": snapshot.captured_at,
        "cmp_present": snapshot.cmp_present,
        "cookies": [record_to_raw(c) for c in snapshot.cookies],
    }


def load_snapshot(path: str) -> CaptureSnapshot:
    """Read and validate one snapshot JSON file."""
    with open(path, encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidSnapshot(
                f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(doc, Mapping):
        raise InvalidSnapshot("snapshot file must contain a JSON object")
    return snapshot_from_dict(doc)
