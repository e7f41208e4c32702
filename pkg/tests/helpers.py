"""Builders shared across the test modules."""

from __future__ import annotations

import random
from typing import Any

from crumb.model import CaptureSnapshot, Phase, normalize_record, snapshot_from_dict

CAPTURED_AT = 1_689_500_000.0
DAY = 86_400


def generate_psl_hosts(psl_text: str, count: int) -> list[str]:
    """Deterministic host mix: listed suffixes, wildcard/exception TLDs,
    unknown TLDs, and plain junk hosts."""
    rng = random.Random(1234)
    suffixes = []
    for line in psl_text.splitlines():
        line = line.strip()
        if not line or line.startswith("//"):
            continue
        suffixes.append(line.lstrip("!").replace("*.", "wild."))
    words = ["shop", "cdn", "app", "site", "store", "media", "x", "long-label"]
    hosts = []
    for i in range(count):
        base = rng.choice(suffixes)
        depth = rng.randrange(0, 3)
        labels = [
            rng.choice(words) + (str(i) if rng.random() < 0.4 else "")
            for _ in range(depth)
        ]
        hosts.append(".".join(labels + [base]) if labels else base)
    return hosts


def generate_filter_lookups(filter_text: str, count: int) -> list[str]:
    """Deterministic lookup mix: rule domains, their subdomains, near-miss
    prefixes, and unrelated hosts."""
    rng = random.Random(99)
    anchors = []
    for line in filter_text.splitlines():
        body = line[2:] if line.startswith("@@") else line
        if body.startswith("||"):
            anchor = body[2:]
            for stop in "^$/|*":
                anchor = anchor.split(stop)[0]
            if anchor:
                anchors.append(anchor)
    words = ["cdn", "static", "img", "sub", "x"]
    tlds = ["com", "net", "org", "io"]
    domains = []
    for i in range(count):
        mode = i % 5
        if mode == 0 and anchors:
            domains.append(rng.choice(anchors))
        elif mode == 1 and anchors:
            domains.append(f"{rng.choice(words)}.{rng.choice(anchors)}")
        elif mode == 2 and anchors:
            domains.append("x" + rng.choice(anchors))
        elif mode == 3:
            domains.append(f"{rng.choice(words)}{i}.{rng.choice(tlds)}")
        else:
            domains.append(f"site{i}.example.{rng.choice(tlds)}")
    return domains


def raw_cookie(name: str = "sid", domain: str = ".example.com", **overrides: Any) -> dict:
    """Raw devtools-style cookie map with sane defaults."""
    record = {
        "domain": domain,
        "expires": CAPTURED_AT + 30 * DAY,
        "httpOnly": False,
        "name": name,
        "path": "/",
        "priority": "Medium",
        "sameParty": False,
        "sameSite": "Lax",
        "secure": True,
        "session": False,
        "size": 10,
        "sourcePort": 443,
        "sourceScheme": "Secure",
        "value": "v",
    }
    record.update(overrides)
    return record


def make_cookie(name: str = "sid", domain: str = ".example.com", **overrides: Any):
    return normalize_record(raw_cookie(name, domain, **overrides))


def make_snapshot(
    site: str = "www.example.com",
    cookies: list[dict] | None = None,
    country: str = "US",
    phase: str = Phase.ON_LANDING.value,
    cmp_present: bool = False,
    captured_at: float = CAPTURED_AT,
) -> CaptureSnapshot:
    return snapshot_from_dict(
        {
            "site_url": f"https://{site}/",
            "country": country,
            "phase": phase,
            "captured_at": captured_at,
            "cmp_present": cmp_present,
            "cookies": cookies or [],
        }
    )
