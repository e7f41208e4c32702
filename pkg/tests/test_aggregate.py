import random

import pytest

from crumb.aggregate import (
    ALL_COUNTRIES,
    accumulate,
    aggregate,
    finalize,
    merge_accumulators,
    top_k_third_party,
)
from crumb.filterlist import parse_filterlist
from crumb.pipeline import analyze_snapshot
from crumb.profiles import load_default_profiles
from crumb.psl import load_psl

from helpers import CAPTURED_AT, DAY, make_snapshot, raw_cookie

PSL = load_psl("com\nnet\norg\nio\nfr\n")
PROFILES = load_default_profiles()
NO_FILTERS = parse_filterlist("||nothing-blocked.example^")
TRACKER_FILTERS = parse_filterlist("||tracker0.net^\n||tracker1.net^\n")


def analyses_for(snapshots, filters=NO_FILTERS):
    return [analyze_snapshot(s, PSL, filters, PROFILES) for s in snapshots]


def corpus_with_shares():
    """100 cookies on one site: 37 third-party, US scope."""
    cookies = [raw_cookie(f"fp{i}", domain=".shop.com") for i in range(63)]
    cookies += [raw_cookie(f"tp{i}", domain=f".third{i % 9}.net") for i in range(37)]
    return [make_snapshot(site="www.shop.com", cookies=cookies)]


def test_third_party_share_from_direct_count():
    stats = aggregate(analyses_for(corpus_with_shares()))
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.total_cookies == 100
    assert all_stats.third_party_share == pytest.approx(0.37)


def test_tracker_share_within_third_party():
    cookies = [raw_cookie(f"fp{i}", domain=".shop.com") for i in range(70)]
    cookies += [raw_cookie(f"t{i}", domain=f".tracker{i % 2}.net") for i in range(20)]
    cookies += [raw_cookie(f"c{i}", domain=f".clean{i % 5}.net") for i in range(10)]
    snapshots = [make_snapshot(site="www.shop.com", cookies=cookies)]
    stats = aggregate(analyses_for(snapshots, TRACKER_FILTERS))
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.third_party_share == pytest.approx(0.30)
    assert all_stats.tracker_share_of_third_party == pytest.approx(0.6667, abs=1e-4)


def test_all_first_party_shares_are_zero():
    snapshots = [
        make_snapshot(cookies=[raw_cookie("a", domain=".example.com")])
    ]
    stats = aggregate(analyses_for(snapshots))
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.third_party_share == 0
    assert all_stats.tracker_share_of_third_party == 0


def test_samesite_distribution_sums_to_one():
    cookies = [
        raw_cookie("a", sameSite="Strict"),
        raw_cookie("b", sameSite="Lax"),
        raw_cookie("c", sameSite="None"),
        raw_cookie("d", sameSite=""),
        raw_cookie("e", sameSite="Lax"),
    ]
    stats = aggregate(analyses_for([make_snapshot(cookies=cookies)]))
    for entry in stats:
        assert sum(entry.samesite_distribution.values()) == pytest.approx(1, abs=1e-9)
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.samesite_distribution["Lax"] == pytest.approx(0.4)


def test_conditional_default_denominator():
    # 4 of 8 cookies carry the browser-default sameSite; 3 of those 4 lack
    # secure. The within-default share must use the 4, not the 8.
    cookies = [raw_cookie(f"d{i}", sameSite="", secure=(i == 0)) for i in range(4)]
    cookies += [raw_cookie(f"x{i}", sameSite="Lax", secure=False) for i in range(4)]
    stats = aggregate(analyses_for([make_snapshot(cookies=cookies)]))
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.default_share == pytest.approx(0.5)
    assert all_stats.default_secure_false_share == pytest.approx(0.75)


def test_per_country_rows_and_all_pseudo_country():
    snapshots = [
        make_snapshot(site="www.a.com", country="FR", cookies=[raw_cookie("a")]),
        make_snapshot(site="www.b.com", country="AU", cookies=[raw_cookie("b")]),
    ]
    stats = aggregate(analyses_for(snapshots))
    assert [s.country for s in stats] == [ALL_COUNTRIES, "AU", "FR"]
    assert next(s for s in stats if s.country == ALL_COUNTRIES).total_cookies == 2


def test_empty_corpus_gives_empty_list():
    assert aggregate([]) == []


def test_within_snapshot_duplicates_count_once():
    cookies = [raw_cookie("dup"), raw_cookie("dup"), raw_cookie("other")]
    stats = aggregate(analyses_for([make_snapshot(cookies=cookies)]))
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.total_cookies == 2


def test_union_view_dedups_across_phases():
    landing = make_snapshot(
        cookies=[raw_cookie("seen"), raw_cookie("landing-only")],
        phase="OnLanding",
        cmp_present=True,
    )
    revisit = make_snapshot(
        cookies=[raw_cookie("seen"), raw_cookie("revisit-only")],
        phase="Revisit",
        cmp_present=True,
    )
    analyses = analyses_for([landing, revisit])
    union = aggregate(analyses, dedup_across_phases=True)
    per_phase = aggregate(analyses, dedup_across_phases=False)
    union_all = next(s for s in union if s.country == ALL_COUNTRIES)
    flat_all = next(s for s in per_phase if s.country == ALL_COUNTRIES)
    assert union_all.total_cookies == 3
    assert flat_all.total_cookies == 4


def test_permutation_invariance():
    snapshots = [
        make_snapshot(site=f"www.s{i}.com", country=c, cookies=[
            raw_cookie(f"c{i}{j}", domain=d)
            for j, d in enumerate([".s%d.com" % i, ".adnet.net", ".other.org"])
        ])
        for i, c in enumerate(["FR", "AU", "US", "JP"])
    ]
    analyses = analyses_for(snapshots)
    baseline = aggregate(analyses)
    rng = random.Random(17)
    for _ in range(5):
        shuffled = analyses[:]
        rng.shuffle(shuffled)
        assert aggregate(shuffled) == baseline


def test_partitioned_merge_equals_whole():
    snapshots = [
        make_snapshot(
            site=f"www.s{i}.com",
            country=["FR", "AU"][i % 2],
            cookies=[
                raw_cookie(f"a{i}", domain=f".s{i}.com"),
                raw_cookie(f"b{i}", domain=".tracker0.net"),
                raw_cookie(f"c{i}", domain=".tracker0.net", path="/x"),
            ],
        )
        for i in range(6)
    ]
    analyses = analyses_for(snapshots, TRACKER_FILTERS)
    whole = finalize(accumulate(analyses))
    left = accumulate(analyses[:3])
    right = accumulate(analyses[3:])
    assert finalize(merge_accumulators(left, right)) == whole


def test_top_third_party_ranking_and_tie_break():
    cookies = [raw_cookie(f"b{i}", domain=".bbb.net") for i in range(3)]
    cookies += [raw_cookie(f"a{i}", domain=".aaa.net") for i in range(3)]
    cookies += [raw_cookie("c0", domain=".ccc.net")]
    analyses = analyses_for([make_snapshot(site="www.shop.com", cookies=cookies)])
    top = top_k_third_party(analyses, k=20)
    assert [d for d, _ in top] == ["aaa.net", "bbb.net", "ccc.net"]
    assert top[0][1] == pytest.approx(3 / 7)
    assert len(top) == 3


def test_top_third_party_headline_fraction():
    # 5000 third-party occurrences, 253 of them bing.com: a 5.06% share.
    cookies = [raw_cookie(f"bing{i}", domain=".bing.com") for i in range(253)]
    spread = 4747
    per_domain = 200
    index = 0
    while spread:
        take = min(per_domain, spread)
        cookies += [
            raw_cookie(f"d{index}_{j}", domain=f".domain{index:03d}.net")
            for j in range(take)
        ]
        spread -= take
        index += 1
    analyses = analyses_for([make_snapshot(site="www.shop.com", cookies=cookies)])
    top = top_k_third_party(analyses, k=20)
    assert top[0][0] == "bing.com"
    assert top[0][1] == pytest.approx(0.0506, abs=1e-6)
    assert len(top) == 20


def test_k_larger_than_distinct_domains():
    cookies = [raw_cookie(f"c{i}", domain=f".only{i}.net") for i in range(3)]
    analyses = analyses_for([make_snapshot(site="www.shop.com", cookies=cookies)])
    assert len(top_k_third_party(analyses, k=20)) == 3


def test_masquerading_instances_recorded():
    psl = load_psl("com\nfr\nde\n")
    snapshots = [
        make_snapshot(
            site="www.shein.fr",
            country="FR",
            cookies=[raw_cookie("tid", domain=".shein.com")],
        ),
        make_snapshot(
            site="www.shein.de",
            country="DE",
            cookies=[raw_cookie("tid", domain=".shein.com")],
        ),
    ]
    analyses = [analyze_snapshot(s, psl, NO_FILTERS, PROFILES) for s in snapshots]
    all_stats = next(s for s in aggregate(analyses) if s.country == ALL_COUNTRIES)
    assert all_stats.masquerading_instances == (
        ("shein.com", ("shein.de", "shein.fr")),
    )


def test_lifespan_stats():
    cookies = [
        raw_cookie("ok", expires=CAPTURED_AT + 100 * DAY),
        raw_cookie("long", expires=CAPTURED_AT + 400 * DAY),
        raw_cookie("session", session=True, expires=None),
    ]
    stats = aggregate(analyses_for([make_snapshot(cookies=cookies)]))
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.lifespan_violation_share == pytest.approx(1 / 3)
    assert all_stats.avg_lifespan_days == pytest.approx(250)


def test_all_session_average_is_marker():
    stats = aggregate(
        analyses_for([make_snapshot(cookies=[raw_cookie("s", session=True, expires=None)])])
    )
    all_stats = next(s for s in stats if s.country == ALL_COUNTRIES)
    assert all_stats.avg_lifespan_days is None
