"""Adblock-syntax filter lists compiled for tracker-domain classification.

Supports the network-rule subset the tracker lists rely on:

* ``||domain`` anchors a pattern at a hostname boundary (the domain itself
  or any subdomain);
* ``|pattern`` / ``pattern|`` anchor at the start / end of the URL;
* ``^`` matches any separator character (anything outside
  ``[a-zA-Z0-9_.%-]``) or the end of the URL;
* ``*`` matches any span;
* ``@@`` marks an exception rule, which always beats block rules;
* ``$third-party``, ``$~third-party`` and ``$domain=`` options gate when a
  rule applies. Other options are accepted but ignored (counted).

Element-hiding lines (``##`` and friends), comments and headers are skipped.
Parsing is fail-soft: unparseable lines increment a counter, never raise.

Matching walks token sequences over a synthetic ``https://<domain>/`` URL.
Domain-anchored rules are bucketed by the first label of their anchor domain
so a lookup touches only candidate rules; a lookup by the labels of a
hostname always returns a superset of the rules that could match it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

logger = logging.getLogger(__name__)

# Characters the "^" separator does NOT match.
SEPARATOR_EXEMPT = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.%"
)

_ELEMENT_HIDING_MARKERS = ("##", "#@#", "#?#", "#$#", "#%#")

# Token kinds: ("lit", text) literal run, ("sep",) separator, ("wild",) any
# span, ("end",) end-of-URL anchor (always last).
Token = tuple


class Anchor(str, Enum):
    DOMAIN = "DomainAnchor"
    SUBSTRING = "PlainSubstring"
    LEFT = "LeftAnchor"
    RIGHT = "RightAnchor"


class RuleOption(str, Enum):
    THIRD_PARTY_ONLY = "ThirdPartyOnly"
    FIRST_PARTY_ONLY = "FirstPartyOnly"
    DOMAIN_RESTRICTED = "DomainRestricted"


@dataclass(frozen=True, slots=True)
class FilterRule:
    pattern: str
    anchor: Anchor
    is_exception: bool
    options: frozenset[RuleOption]
    tokens: tuple[Token, ...]
    # $domain= restriction entries; "~"-negated ones in excluded_domains.
    domains: tuple[str, ...] = ()
    excluded_domains: tuple[str, ...] = ()


@dataclass
class FilterSet:
    """Compiled block and exception rules from one or more lists."""

    block_rules: tuple[FilterRule, ...] = ()
    exception_rules: tuple[FilterRule, ...] = ()
    source_names: tuple[str, ...] = ()
    skipped: int = 0
    unsupported_options: int = 0
    _block_index: dict = field(default_factory=dict, repr=False)
    _block_general: list = field(default_factory=list, repr=False)
    _exc_index: dict = field(default_factory=dict, repr=False)
    _exc_general: list = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        for rule in self.block_rules:
            _index_rule(rule, self._block_index, self._block_general)
        for rule in self.exception_rules:
            _index_rule(rule, self._exc_index, self._exc_general)

    def candidates(self, hostname: str, exceptions: bool = False) -> list[FilterRule]:
        """All rules that could match a URL for ``hostname`` (a superset)."""
        index = self._exc_index if exceptions else self._block_index
        general = self._exc_general if exceptions else self._block_general
        found = list(general)
        for label in hostname.split("."):
            found.extend(index.get(label, ()))
        return found

    def merge(self, other: "FilterSet") -> "FilterSet":
        return FilterSet(
            block_rules=self.block_rules + other.block_rules,
            exception_rules=self.exception_rules + other.exception_rules,
            source_names=self.source_names + other.source_names,
            skipped=self.skipped + other.skipped,
            unsupported_options=self.unsupported_options + other.unsupported_options,
        )


def _index_rule(rule: FilterRule, index: dict, general: list) -> None:
    # A domain-anchored rule whose anchor starts with a complete label
    # ("adnxs." of "adnxs.com") can only match hostnames containing that
    # label, so it is bucketed under it. Everything else is always scanned.
    if rule.anchor is Anchor.DOMAIN and rule.tokens:
        first = rule.tokens[0]
        if first[0] == "lit":
            dot = first[1].find(".")
            if dot > 0:
                index.setdefault(first[1][:dot], []).append(rule)
                return
    general.append(rule)


def _tokenize(body: str) -> tuple[Token, ...]:
    tokens: list[Token] = []
    literal: list[str] = []

    def flush() -> None:
        if literal:
            tokens.append(("lit", "".join(literal)))
            literal.clear()

    for char in body:
        if char == "*":
            flush()
            if not tokens or tokens[-1] != ("wild",):
                tokens.append(("wild",))
        elif char == "^":
            flush()
            tokens.append(("sep",))
        else:
            literal.append(char)
    flush()
    return tuple(tokens)


def _parse_options(tail: str) -> tuple[frozenset[RuleOption], tuple, tuple, int]:
    options = set()
    domains: list[str] = []
    excluded: list[str] = []
    unsupported = 0
    for raw_opt in tail.split(","):
        opt = raw_opt.strip().lower()
        if not opt:
            continue
        if opt == "third-party" or opt == "3p":
            options.add(RuleOption.THIRD_PARTY_ONLY)
        elif opt == "~third-party" or opt == "~3p":
            options.add(RuleOption.FIRST_PARTY_ONLY)
        elif opt.startswith("domain="):
            options.add(RuleOption.DOMAIN_RESTRICTED)
            for entry in opt[len("domain="):].split("|"):
                entry = entry.strip()
                if not entry:
                    continue
                if entry.startswith("~"):
                    excluded.append(entry[1:])
                else:
                    domains.append(entry)
        else:
            unsupported += 1
    return frozenset(options), tuple(domains), tuple(excluded), unsupported


def _parse_rule(line: str) -> tuple[FilterRule | None, int]:
    """Parse one network rule line; (None, unsupported_count) when unusable."""
    is_exception = line.startswith("@@")
    body = line[2:] if is_exception else line

    # Raw regex rules are out of scope for domain classification.
    if len(body) > 2 and body.startswith("/") and body.endswith("/"):
        return None, 0

    unsupported = 0
    options: frozenset[RuleOption] = frozenset()
    domains: tuple = ()
    excluded: tuple = ()
    dollar = body.rfind("$")
    if dollar > 0:
        tail = body[dollar + 1:]
        if tail and all(c.isalnum() or c in "~=,|.-_*" for c in tail):
            options, domains, excluded, unsupported = _parse_options(tail)
            body = body[:dollar]

    if body.startswith("||"):
        anchor = Anchor.DOMAIN
        body = body[2:]
    elif body.startswith("|"):
        anchor = Anchor.LEFT
        body = body[1:]
    else:
        anchor = Anchor.SUBSTRING

    end_anchored = body.endswith("|")
    if end_anchored:
        body = body[:-1]
        if anchor is Anchor.SUBSTRING:
            anchor = Anchor.RIGHT

    if not body:
        return None, unsupported

    tokens = _tokenize(body.lower())
    if end_anchored:
        tokens = tokens + (("end",),)

    if anchor is Anchor.DOMAIN:
        # The anchor needs a leading domain token to latch onto.
        if not tokens or tokens[0][0] != "lit" or not tokens[0][1][0].isalnum():
            return None, unsupported

    return (
        FilterRule(
            pattern=line,
            anchor=anchor,
            is_exception=is_exception,
            options=options,
            tokens=tokens,
            domains=domains,
            excluded_domains=excluded,
        ),
        unsupported,
    )


def parse_filterlist(text: str, source: str = "<string>") -> FilterSet:
    """Compile one filter-list text into a FilterSet.

    ``!`` lines and ``[Adblock...`` headers are comments; element-hiding
    lines are skipped and counted together with unparseable lines.
    """
    block: list[FilterRule] = []
    exceptions: list[FilterRule] = []
    skipped = 0
    unsupported_total = 0
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("!") or line.startswith("[Adblock"):
            continue
        if any(marker in line for marker in _ELEMENT_HIDING_MARKERS):
            skipped += 1
            continue
        rule, unsupported = _parse_rule(line)
        unsupported_total += unsupported
        if rule is None:
            skipped += 1
            continue
        (exceptions if rule.is_exception else block).append(rule)
    if skipped:
        logger.info("%s: skipped %d non-network or unparseable lines", source, skipped)
    if unsupported_total:
        logger.info("%s: ignored %d unsupported rule options", source, unsupported_total)
    return FilterSet(
        block_rules=tuple(block),
        exception_rules=tuple(exceptions),
        source_names=(source,),
        skipped=skipped,
        unsupported_options=unsupported_total,
    )


def load_filterlists(paths: list[str]) -> FilterSet:
    merged = FilterSet()
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            merged = merged.merge(parse_filterlist(handle.read(), source=path))
    return merged


def _match_tokens(tokens: tuple[Token, ...], ti: int, url: str, pos: int) -> bool:
    n = len(url)
    while ti < len(tokens):
        token = tokens[ti]
        kind = token[0]
        if kind == "lit":
            text = token[1]
            if not url.startswith(text, pos):
                return False
            pos += len(text)
        elif kind == "sep":
            if pos == n:
                pass  # "^" also matches the end of the URL, consuming nothing
            elif url[pos] not in SEPARATOR_EXEMPT:
                pos += 1
            else:
                return False
        elif kind == "wild":
            if ti + 1 == len(tokens):
                return True
            for next_pos in range(pos, n + 1):
                if _match_tokens(tokens, ti + 1, url, next_pos):
                    return True
            return False
        else:  # "end"
            return pos == n
        ti += 1
    return True


def _rule_matches_url(rule: FilterRule, url: str, host_start: int, host_end: int) -> bool:
    if rule.anchor is Anchor.LEFT:
        starts = [0]
    elif rule.anchor is Anchor.DOMAIN:
        starts = [host_start]
        starts.extend(
            i + 1 for i in range(host_start, host_end) if url[i] == "."
        )
    else:
        starts = range(len(url) + 1)
    return any(_match_tokens(rule.tokens, 0, url, s) for s in starts)


def _domain_within(host: str, entry: str) -> bool:
    return host == entry or host.endswith("." + entry)


def _rule_applies(rule: FilterRule, third_party: bool, site_rd: str) -> bool:
    if RuleOption.THIRD_PARTY_ONLY in rule.options and not third_party:
        return False
    if RuleOption.FIRST_PARTY_ONLY in rule.options and third_party:
        return False
    if RuleOption.DOMAIN_RESTRICTED in rule.options:
        if any(_domain_within(site_rd, entry) for entry in rule.excluded_domains):
            return False
        if rule.domains and not any(
            _domain_within(site_rd, entry) for entry in rule.domains
        ):
            return False
    return True


def is_tracker(
    cookie_domain: str,
    site_rd: str,
    filters: FilterSet,
    cookie_rd: str | None = None,
) -> bool:
    """Classify a cookie domain as a tracker against the compiled lists.

    Matches block rules against the synthetic URL ``https://<domain>/`` in
    the context of a page on ``site_rd``; an exception rule match always
    wins. ``cookie_rd`` (the cookie domain's registrable domain) decides
    third-party context; without it, a cookie domain at or under site_rd
    counts as first-party.
    """
    cookie_domain = cookie_domain.lower().lstrip(".")
    if cookie_rd is not None:
        third_party = cookie_rd != site_rd
    else:
        third_party = not _domain_within(cookie_domain, site_rd)

    url = f"https://{cookie_domain}/"
    host_start = len("https://")
    host_end = host_start + len(cookie_domain)

    blocked = any(
        _rule_applies(rule, third_party, site_rd)
        and _rule_matches_url(rule, url, host_start, host_end)
        for rule in filters.candidates(cookie_domain)
    )
    if not blocked:
        return False
    return not any(
        _rule_applies(rule, third_party, site_rd)
        and _rule_matches_url(rule, url, host_start, host_end)
        for rule in filters.candidates(cookie_domain, exceptions=True)
    )
