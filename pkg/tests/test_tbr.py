import pytest

from tbrkernel import parse
from tbrkernel.bruteforce import bruteforce_distance
from tbrkernel.errors import BudgetExceeded, CardinalityError, TooLargeError
from tbrkernel.forest import is_agreement_forest
from tbrkernel.tbr import audit_metric, tbr_bfs_distance, tbr_distance, tbr_neighbors
from tbrkernel.tree import caterpillar, default_taxa, enumerate_trees, validate

from conftest import random_pairs


def test_quartet_neighbours(quartets):
    got = {t.canonical for t in tbr_neighbors(quartets[0])}
    assert got == {quartets[1].canonical, quartets[2].canonical}


def test_caterpillar_neighbours():
    t = caterpillar("abcde")
    nbrs = list(tbr_neighbors(t))
    assert 0 < len(nbrs) <= 14
    assert all(validate(n) is None for n in nbrs)
    assert t.canonical not in {n.canonical for n in nbrs}


def test_neighbours_need_four_taxa():
    with pytest.raises(CardinalityError):
        list(tbr_neighbors(parse("(a,b,c);")))


def test_bfs_small(quartets):
    assert tbr_bfs_distance(quartets[0], quartets[1]) == 1
    assert tbr_bfs_distance(quartets[0], quartets[0]) == 0


def test_bfs_guard():
    t = caterpillar(default_taxa(8))
    with pytest.raises(TooLargeError):
        tbr_bfs_distance(t, t)


def test_bfs_matches_partition_oracle_n5():
    trees = list(enumerate_trees(default_taxa(5)))
    for a in trees:
        for b in trees:
            assert tbr_bfs_distance(a, b) == bruteforce_distance(a, b)


def test_distance_examples(chain_pair):
    t = caterpillar("abcdefg")
    assert tbr_distance(t, t).distance == 0
    res = tbr_distance(*chain_pair)
    assert res.distance == 2 and res.offset == 0 and res.kernel_taxa == 5
    assert res.witness.size == 3
    with pytest.raises(BudgetExceeded):
        tbr_distance(*chain_pair, budget=1)
    assert tbr_distance(*chain_pair, budget=2).distance == 2


def test_tiny_inputs():
    t = parse("(a,b,c);")
    assert tbr_distance(t, t).distance == 0


def test_pipeline_matches_oracle():
    for t1, t2 in random_pairs(200, 4, 8, seed=3):
        res = tbr_distance(t1, t2)
        assert res.distance == bruteforce_distance(t1, t2)
        k1, k2 = res.kernel_pair
        if k1.n_taxa >= 4:
            assert is_agreement_forest(k1, k2, res.witness)


def test_budget_boundary():
    for t1, t2 in random_pairs(30, 6, 9, seed=5):
        d = tbr_distance(t1, t2).distance
        assert tbr_distance(t1, t2, budget=d).distance == d
        if d > 0:
            with pytest.raises(BudgetExceeded):
                tbr_distance(t1, t2, budget=d - 1)


def test_metric_n5():
    rep = audit_metric(default_taxa(5))
    assert rep.ok and rep.checked == 15 ** 3


def test_metric_n6_sampled():
    rep = audit_metric(default_taxa(6), samples=200, seed=2)
    assert rep.ok and rep.checked == 200


def test_metric_guard():
    with pytest.raises(CardinalityError):
        audit_metric(default_taxa(7))


def test_metric_audit_catches_a_broken_distance():
    rep = audit_metric(default_taxa(4), distance=lambda a, b: 0 if a == b else (1 if a.canonical < b.canonical else 2))
    assert not rep.ok and any(v.startswith("symmetry") for v in rep.violations)
