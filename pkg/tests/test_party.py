import json
from pathlib import Path

import pytest

from crumb.model import normalize_record
from crumb.party import (
    UnclassifiableDomain,
    Verdict,
    brand_label,
    classify_party,
    detect_masquerading,
    path_pervasive,
)

from helpers import make_cookie, make_snapshot

FIXTURES = Path(__file__).parent / "fixtures"

# Brand rows reconstructed as (cookie domain, site host) pairs.
MASQUERADING_CASES = [
    ("aliexpress.com", "www.aliexpress.nl"),
    ("amazon.com", "www.amazon.fr"),
    ("amazon.com", "www.amazon.de"),
    ("asos.com", "www.asos.fr"),
    ("boohoo.com", "www.boohoo.co.nz"),
    ("ebay.com", "www.ebay.ch"),
    ("ebay.com", "www.ebay.es"),
    ("ebay.com", "www.ebay.pl"),
    ("hm.com", "www.hm.de"),
    ("hm.com", "www.hm.nl"),
    ("hm.com", "www.hm.in"),
    ("hm.com", "www.hm.se"),
    ("shein.com", "www.shein.de"),
    ("shein.com", "www.shein.it"),
    ("shein.com", "www.shein.nl"),
    ("shein.com", "www.shein.pl"),
    ("shein.com", "www.shein.es"),
    ("shein.com", "www.shein.fr"),
    ("shein.com", "www.shein.com.au"),
    ("zara.com", "www.zara.de"),
    ("zara.com", "www.zara.it"),
    ("zara.com", "www.zara.nl"),
    ("zara.com", "www.zara.es"),
    ("zara.com", "www.zara.se"),
    ("zara.com", "www.zara.fr"),
]


def test_devtools_cookie_is_third_party_on_other_site(psl_small):
    raw = json.loads((FIXTURES / "fig2_cookie.json").read_text())
    cookie = normalize_record(raw)
    snapshot = make_snapshot(site="www.amazon.com")
    result = classify_party(cookie, snapshot, psl_small)
    assert result.verdict is Verdict.THIRD_PARTY
    assert result.site_rd == "amazon.com"
    assert result.cookie_rd == "360yield.com"


def test_equal_registrable_domains_are_first_party(psl_small):
    cookie = make_cookie(domain=".amazon.com")
    snapshot = make_snapshot(site="www.amazon.com")
    assert classify_party(cookie, snapshot, psl_small).verdict is Verdict.FIRST_PARTY


def test_shared_brand_over_different_suffix_is_masquerading(psl_small):
    cookie = make_cookie(domain=".shein.com")
    snapshot = make_snapshot(site="www.shein.fr", country="FR")
    result = classify_party(cookie, snapshot, psl_small)
    assert result.verdict is Verdict.MASQUERADING
    assert result.brand_label == "shein"


@pytest.mark.parametrize("cookie_domain,site", MASQUERADING_CASES)
def test_all_brand_rows_flagged(cookie_domain, site, psl_small):
    cookie = make_cookie(domain="." + cookie_domain)
    snapshot = make_snapshot(site=site)
    assert classify_party(cookie, snapshot, psl_small).verdict is Verdict.MASQUERADING


def test_unrelated_third_party_not_masquerading(psl_small):
    cookie = make_cookie(domain=".criteo.com")
    snapshot = make_snapshot(site="www.amazon.fr")
    assert classify_party(cookie, snapshot, psl_small).verdict is Verdict.THIRD_PARTY


def test_detect_masquerading_brand_pairs():
    probe = make_cookie()
    assert detect_masquerading(probe, "amazon.fr", "amazon.com") is True
    assert detect_masquerading(probe, "amazon.fr", "criteo.com") is False
    assert detect_masquerading(probe, "zara.se", "zara.com") is True


def test_detect_masquerading_symmetric():
    probe = make_cookie()
    pairs = [("amazon.fr", "amazon.com"), ("zara.se", "criteo.com"), ("a.com", "a.org")]
    for left, right in pairs:
        assert detect_masquerading(probe, left, right) == detect_masquerading(probe, right, left)


def test_multi_label_suffix_uses_single_brand_label():
    assert brand_label("amazon.co.uk") == "amazon"
    assert brand_label("boohoo.co.nz") == "boohoo"


def test_verdicts_exclusive(psl_small):
    # A first-party cookie never reads as masquerading even though the brand
    # labels trivially match.
    cookie = make_cookie(domain=".shein.fr")
    snapshot = make_snapshot(site="www.shein.fr", country="FR")
    assert classify_party(cookie, snapshot, psl_small).verdict is Verdict.FIRST_PARTY


def test_leading_dot_ignored_for_comparison(psl_small):
    dotted = make_cookie(domain=".amazon.com")
    bare = make_cookie(domain="amazon.com")
    snapshot = make_snapshot(site="www.amazon.com")
    assert classify_party(dotted, snapshot, psl_small).verdict is Verdict.FIRST_PARTY
    assert classify_party(bare, snapshot, psl_small).verdict is Verdict.FIRST_PARTY


def test_unclassifiable_when_cookie_domain_is_suffix(psl_small):
    cookie = make_cookie(domain=".com")
    snapshot = make_snapshot(site="www.amazon.com")
    with pytest.raises(UnclassifiableDomain):
        classify_party(cookie, snapshot, psl_small)


def test_persistence_markers(psl_small):
    cookie = make_cookie(name="tid", domain=".shein.com")
    snapshot = make_snapshot(site="www.shein.fr", country="FR")

    unevaluated = classify_party(cookie, snapshot, psl_small, reject_keys=None)
    assert unevaluated.persistence_evaluated is False
    assert unevaluated.persists_after_reject is False

    persisted = classify_party(
        cookie, snapshot, psl_small, reject_keys=frozenset({("tid", ".shein.com")})
    )
    assert persisted.persistence_evaluated is True
    assert persisted.persists_after_reject is True

    gone = classify_party(cookie, snapshot, psl_small, reject_keys=frozenset())
    assert gone.persistence_evaluated is True
    assert gone.persists_after_reject is False


def test_path_pervasiveness():
    assert path_pervasive(make_cookie(path="/")) is True
    assert path_pervasive(make_cookie(path="/checkout")) is False


def test_pervasiveness_rate_by_direct_count():
    cookies = [make_cookie(name=f"c{i}", path="/") for i in range(98)]
    cookies += [make_cookie(name=f"p{i}", path="/checkout") for i in range(2)]
    rate = sum(1 for c in cookies if path_pervasive(c)) / len(cookies)
    assert rate == 0.98
