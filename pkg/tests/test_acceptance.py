"""Acceptance criteria 1-11, each at its stated size and tolerance.

Every test prints one ``PASS``/``FAIL`` line.  The lines are also repeated in
the terminal summary, so they show up without ``-s``.
"""

import time

import pytest

from tbrkernel import parse
from tbrkernel.bruteforce import bruteforce_distance
from tbrkernel.search import maf_search
from tbrkernel.errors import BudgetExceeded
from tbrkernel.forest import is_agreement_forest
from tbrkernel.network import tight_family
from tbrkernel.reductions import is_exhaustively_reduced
from tbrkernel.tbr import tbr_distance
from tbrkernel.verify import (suite_bounds, suite_generators, suite_metric, suite_rules, suite_safety,
                              suite_move_oracle, suite_chain_preservation)

from conftest import CHAIN_PAIR, ACCEPTANCE_LINES


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)
    assert ok, detail


@pytest.fixture(scope="module")
def preservation():
    return suite_chain_preservation(seed=1, samples=100)


@pytest.fixture(scope="module")
def bounds():
    return suite_bounds(seed=1, samples=200)


def test_criterion_1_three_chain_pair():
    t0 = time.perf_counter()
    t1, t2 = parse(CHAIN_PAIR[0]), parse(CHAIN_PAIR[1])
    d = tbr_distance(t1, t2).distance
    # shortening the common chain (b,c,d) to (b,c) deletes d
    s1, s2 = t1.delete_taxa({"d"}), t2.delete_taxa({"d"})
    d_short = tbr_distance(s1, s2).distance
    oracle = bruteforce_distance(t1, t2), bruteforce_distance(s1, s2)
    secs = time.perf_counter() - t0
    ok = d == 2 and d_short == 1 and oracle == (2, 1) and secs < 1
    report(1, ok, f"d={d}, after shortening (b,c,d) d={d_short}, oracle={oracle}, {secs:.2f}s")


def test_criterion_2_move_oracle():
    rep = suite_move_oracle(seed=1, samples=100)
    ok = rep.ok and rep.counts == {"pairs_n5": 225, "pairs_n6": 100} and rep.seconds < 120
    report(2, ok, f"{rep.counts}, {len(rep.violations)} mismatches, {rep.seconds:.1f}s")


def test_criterion_3_reduction_safety():
    rep = suite_safety(seed=1, samples=200)
    ok = rep.ok and rep.counts["pairs"] == 200 and rep.seconds < 600
    report(3, ok, f"{rep.counts}, {len(rep.violations)} mismatches, {rep.seconds:.1f}s")


def test_criterion_4_rule_offsets():
    rep = suite_rules(seed=1, samples=10)
    ok = rep.ok and all(v >= 10 for v in rep.counts.values()) and len(rep.counts) == 7
    report(4, ok, f"{rep.counts}, {len(rep.violations)} wrong offsets")


def test_criterion_5_preserving_maf_exists(preservation):
    bad = [v for v in preservation.violations if v.startswith("existence")]
    ok = not bad and preservation.counts["chain_sets"] > 0 and preservation.seconds < 600
    report(5, ok, f"{preservation.counts['pairs_with_chains']} pairs with chains, "
                  f"{preservation.counts['chain_sets']} chain sets, {len(bad)} without a preserving MAF, "
                  f"{preservation.seconds:.1f}s")


def test_criterion_6_constructive_preservation(preservation):
    bad = [v for v in preservation.violations if v.startswith("constructive")]
    ok = not bad and preservation.counts["constructive_runs"] > 0
    report(6, ok, f"{preservation.counts['constructive_runs']} runs over every MAF "
                  f"({preservation.counts.get('rewrites', 0)} changed), {len(bad)} failures or assertions")


def test_criterion_7_kernel_bound(bounds):
    bad = [v for v in bounds.violations if v.startswith("11d-9")]
    ok = not bad and bounds.counts["reduced_pairs"] == 200
    report(7, ok, f"{bounds.counts['reduced_pairs']} reduced pairs with d>=2, {len(bad)} violations, "
                  f"min slack {bounds.counts['reduced_min_slack']}")


def test_criterion_8_chain_free_bound(bounds):
    bad = [v for v in bounds.violations if v.startswith("5d-3")]
    ok = not bad and bounds.counts["chain_free_pairs"] == 200
    report(8, ok, f"{bounds.counts['chain_free_pairs']} chain-free pairs with d>=2, {len(bad)} violations, "
                  f"{bounds.counts['chain_free_at_bound']} exactly at the bound")


@pytest.mark.parametrize("k", [4, 5])
def test_criterion_9_tight_family(k):
    t0 = time.perf_counter()
    t1, t2 = tight_family(k)
    reduced = is_exhaustively_reduced(t1, t2)
    try:
        maf_search(t1, t2, k - 1)
        lower = False
    except BudgetExceeded:
        lower = True
    size, witness = maf_search(t1, t2, k)
    secs = time.perf_counter() - t0
    ok = (t1.n_taxa == 11 * k - 9 and reduced and lower and size - 1 == k
          and bool(is_agreement_forest(t1, t2, witness)) and secs < 300)
    report(9, ok, f"k={k}: {t1.n_taxa} taxa, reduced={reduced}, budget {k - 1} exceeded={lower}, "
                  f"distance {size - 1} with budget {k}, {secs:.1f}s")


def test_criterion_10_generators():
    rep = suite_generators(seed=1, samples=3)
    ok = rep.ok and rep.counts["networks"] == 24 and rep.counts["displayed_pairs"] > 0
    report(10, ok, f"{rep.counts}, {len(rep.violations)} violations (side count 3(k-1), r(N) >= d)")


def test_criterion_11_metric():
    rep = suite_metric(seed=1, samples=100)
    ok = rep.ok and rep.counts["triples_n5"] == 15 ** 3 and rep.seconds < 300
    report(11, ok, f"{rep.counts}, {len(rep.violations)} violations, {rep.seconds:.1f}s")
