"""Registrable-domain (eTLD+1) computation from a Public Suffix List file.

Implements the standard PSL matching algorithm:

* a normal rule matches a host whose trailing labels equal the rule's labels;
* a wildcard rule ``*.foo`` matches any host with exactly one extra label in
  the wildcard position;
* among matching rules, an exception rule (``!bar.foo``) prevails and its
  public suffix is the rule minus its leftmost label;
* otherwise the rule with the most labels prevails;
* if nothing matches, the host's last label is the public suffix.

The registrable domain is the prevailing public suffix plus one label. Hosts
are compared after ASCII lowercasing; non-ASCII labels are rejected (the
corpora this engine audits are ASCII-hosted).
"""

from __future__ import annotations

import logging
from enum import Enum

logger = logging.getLogger(__name__)

_HOST_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789-_")


class PslError(ValueError):
    pass


class EmptyRuleSet(PslError):
    """Raised when a PSL file yields no usable rules."""


class InvalidHost(PslError):
    """Raised for hosts that are not syntactically valid DNS names."""


class NoRegistrableDomain(PslError):
    """Raised when the host is itself a public suffix."""


class RuleKind(Enum):
    NORMAL = "normal"
    WILDCARD = "wildcard"
    EXCEPTION = "exception"


class SuffixRules:
    """Immutable, lookup-indexed rule set parsed from a PSL file.

    ``rules`` holds (reversed label tuple, kind) pairs; the reversed
    orientation puts the TLD first, which is the natural lookup order.
    """

    __slots__ = ("rules", "loaded_from", "_normal", "_wildcard_bases", "_exceptions")

    def __init__(
        self,
        rules: frozenset[tuple[tuple[str, ...], RuleKind]],
        loaded_from: str = "<string>",
    ):
        self.rules = rules
        self.loaded_from = loaded_from
        normal = set()
        wildcard_bases = set()
        exceptions = set()
        for labels, kind in rules:
            if kind is RuleKind.NORMAL:
                normal.add(labels)
            elif kind is RuleKind.WILDCARD:
                # labels stores the base without the "*" label.
                wildcard_bases.add(labels)
            else:
                exceptions.add(labels)
        self._normal = frozenset(normal)
        self._wildcard_bases = frozenset(wildcard_bases)
        self._exceptions = frozenset(exceptions)

    def __len__(self) -> int:
        return len(self.rules)

    def __repr__(self) -> str:
        return f"SuffixRules({len(self.rules)} rules from {self.loaded_from!r})"


def _valid_rule_labels(labels: list[str]) -> bool:
    return all(label and set(label) <= _HOST_CHARS for label in labels)


def load_psl(text: str, loaded_from: str = "<string>") -> SuffixRules:
    """Parse a PSL-format file into a SuffixRules set.

    ``//`` lines are comments (section markers included), ``!`` prefixes an
    exception rule, ``*.`` a wildcard rule. Only the first whitespace token
    of a line counts. Unusable lines are skipped with a warning.

    Raises EmptyRuleSet if no rules parse.
    """
    rules: set[tuple[tuple[str, ...], RuleKind]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("//"):
            continue
        token = stripped.split()[0].lower()
        if token.startswith("!"):
            kind = RuleKind.EXCEPTION
            body = token[1:]
        elif token.startswith("*."):
            kind = RuleKind.WILDCARD
            body = token[2:]
        else:
            kind = RuleKind.NORMAL
            body = token
        labels = body.split(".")
        if "*" in body or not _valid_rule_labels(labels):
            logger.warning("skipping unusable rule at %s:%d: %r", loaded_from, lineno, token)
            continue
        rules.add((tuple(reversed(labels)), kind))
    if not rules:
        raise EmptyRuleSet(f"no rules parsed from {loaded_from}")
    return SuffixRules(frozenset(rules), loaded_from)


def load_psl_file(path: str) -> SuffixRules:
    with open(path, encoding="utf-8") as handle:
        return load_psl(handle.read(), loaded_from=path)


def _host_labels(host: str) -> list[str]:
    if not host or host.startswith(".") or host.endswith("."):
        raise InvalidHost(f"invalid host {host!r}")
    if len(host) > 253:
        raise InvalidHost(f"host too long: {host!r}")
    labels = host.split(".")
    for label in labels:
        if not 1 <= len(label) <= 63 or not set(label) <= _HOST_CHARS:
            raise InvalidHost(f"invalid label {label!r} in host {host!r}")
    return labels


def public_suffix(host: str, rules: SuffixRules) -> str:
    """Return the public suffix of ``host`` under ``rules``."""
    labels = _host_labels(host.lower())
    reversed_labels = tuple(reversed(labels))
    n = len(labels)

    # Exception rules prevail outright; their suffix drops the leftmost label.
    best_exception = 0
    for length in range(1, n + 1):
        if reversed_labels[:length] in rules._exceptions:
            best_exception = max(best_exception, length)
    if best_exception:
        return ".".join(labels[n - best_exception + 1:])

    best = 1  # implicit "*" rule: the last label is a suffix
    for length in range(1, n + 1):
        prefix = reversed_labels[:length]
        if prefix in rules._normal:
            best = max(best, length)
        # A wildcard rule "*.<base>" matches <base> plus exactly one label.
        if length >= 2 and prefix[:-1] in rules._wildcard_bases:
            best = max(best, length)
    return ".".join(labels[n - best:])


def registrable_domain(host: str, rules: SuffixRules) -> str:
    """Return the public suffix of ``host`` plus one label (eTLD+1).

    Raises NoRegistrableDomain when the host is itself a public suffix and
    InvalidHost for syntactically bad input. The host must be lowercase
    without a leading dot; uppercase input is tolerated and lowered.
    """
    host = host.lower()
    suffix = public_suffix(host, rules)
    labels = host.split(".")
    suffix_len = len(suffix.split("."))
    if suffix_len >= len(labels):
        raise NoRegistrableDomain(f"{host!r} is a public suffix")
    return ".".join(labels[len(labels) - suffix_len - 1:])
