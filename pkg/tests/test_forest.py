import pytest

from tbrkernel.bruteforce import bruteforce_distance, enumerate_mafs, maf_bruteforce, oracle_max_n
from tbrkernel.errors import BudgetExceeded, NotAPartitionError, TooLargeError
from tbrkernel.forest import AgreementForest, ChainStatus, chain_status, is_agreement_forest, singletons
from tbrkernel.search import SearchStats, maf_search, search_distance
from tbrkernel.tree import caterpillar, default_taxa

from conftest import random_pairs


def test_forest_text_form():
    f = AgreementForest.parse("d|a,c|b")
    assert str(f) == "a,c|b|d" and f.size == 3
    assert f.component_of("c") == frozenset("ac")


def test_whole_set_for_identical_trees():
    t = caterpillar("abcdef")
    assert is_agreement_forest(t, t, [t.taxa])


def test_singletons_always_agree():
    for t1, t2 in random_pairs(20, 4, 9, seed=1):
        assert is_agreement_forest(t1, t2, singletons(t1.taxa))


def test_quartet_pair_condition_two(quartets):
    check = is_agreement_forest(quartets[0], quartets[1], AgreementForest.parse("a,b|c,d"))
    assert not check and check.violation.startswith("condition 2") and "T'" in check.violation


def test_condition_one_reported(quartets):
    check = is_agreement_forest(quartets[0], quartets[1], [set("abcd")])
    assert not check and check.violation.startswith("condition 1")


def test_not_a_partition(quartets):
    with pytest.raises(NotAPartitionError):
        is_agreement_forest(quartets[0], quartets[1], [set("ab"), set("bcd")])
    with pytest.raises(NotAPartitionError):
        is_agreement_forest(quartets[0], quartets[1], [set("ab"), set("c")])


def test_brute_force_sizes(chain_pair, quartets):
    t = caterpillar("abcde")
    assert maf_bruteforce(t, t)[0] == 1
    size, forest = maf_bruteforce(quartets[0], quartets[1])
    assert size == 2 and any(len(c) == 1 for c in forest)
    assert maf_bruteforce(*chain_pair)[0] == 3


def test_enumerate_mafs(quartets):
    t = caterpillar("abcde")
    assert list(enumerate_mafs(t, t)) == [AgreementForest([t.taxa])]
    mafs = list(enumerate_mafs(quartets[0], quartets[1]))
    assert len(mafs) == len(set(mafs)) and mafs
    assert all(f.size == 2 and any(len(c) == 1 for c in f) for f in mafs)
    assert all(is_agreement_forest(quartets[0], quartets[1], f) for f in mafs)


def test_oracle_guard(monkeypatch):
    t = caterpillar(default_taxa(10))
    with pytest.raises(TooLargeError):
        maf_bruteforce(t, t)
    monkeypatch.setenv("TBRKERNEL_MAX_N", "10")
    assert oracle_max_n() == 10
    assert maf_bruteforce(t, t)[0] == 1


def test_chain_status():
    assert chain_status(singletons("abcd"), "abc") is ChainStatus.ATOMIZED
    assert chain_status(AgreementForest(["abcd"]), "abc") is ChainStatus.PRESERVED
    assert chain_status(AgreementForest.parse("a,b|c,d"), "abc") is ChainStatus.SPLIT


def test_search_budgets(chain_pair):
    t = caterpillar("abcdef")
    assert maf_search(t, t, 0)[0] == 1
    with pytest.raises(BudgetExceeded):
        maf_search(*chain_pair, 1)
    size, forest = maf_search(*chain_pair, 2)
    assert size == 3 and is_agreement_forest(*chain_pair, forest)


def test_search_matches_brute_force():
    for t1, t2 in random_pairs(200, 4, 8, seed=7):
        stats = SearchStats()
        size, forest = maf_search(t1, t2, t1.n_taxa, stats)
        assert size == maf_bruteforce(t1, t2)[0]
        assert forest.size == size and is_agreement_forest(t1, t2, forest)
        assert search_distance(t1, t2) == bruteforce_distance(t1, t2)
