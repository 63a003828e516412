import pytest

from tbrkernel import bruteforce_distance, parse, serialize
from tbrkernel.chains import find_common_pendant_subtrees
from tbrkernel.errors import CardinalityError
from tbrkernel.reductions import (ReductionStep, RuleKind, apply_31star, apply_32, apply_33, apply_212,
                                  apply_chain_reduction, apply_star3star, apply_subtree_reduction,
                                  exhaustively_reduce, first_match, is_exhaustively_reduced)
from tbrkernel.tree import caterpillar, default_taxa, isomorphic
from tbrkernel.network import tight_family

from conftest import CHAIN_PAIR, random_pairs

# One seeded instance per rule on which that rule is the driver's next step,
# with the partition-oracle distance before and after.
INSTANCES = {
    RuleKind.SUBTREE: ("(a,((((b,c),(g,h)),e),f),d);", "(a,((b,c),(d,(e,f))),(g,h));", "b,c", 2, 2),
    RuleKind.CHAIN: ("(a,(b,g),(c,f));", "(a,b,(c,(f,g)));", "f", 1, 1),
    RuleKind.STAR3STAR: ("(a,(b,g),(c,(((d,e),h),f)));", "(a,b,((c,(f,g)),(d,(e,h))));", "d,e,h", 2, 1),
    RuleKind.THREE_ONE_STAR: ("(a,((b,((d,g),e)),c),f);", "(a,((b,(d,e)),(c,f)),g);", "g", 2, 1),
    RuleKind.TWO_ONE_TWO: ("(a,((b,d),f),(c,(e,g)));", "(a,((b,e),g),(c,(d,f)));", "b", 2, 1),
    RuleKind.THREE_THREE: ("(a,((b,f),e),(c,d));", "(a,(((b,e),f),c),d);", "b,f", 1, 1),
    RuleKind.THREE_TWO: ("(a,b,((((c,g),f),e),d));", "(a,(b,((c,(d,f)),g)),e);", "b", 2, 2),
}


@pytest.mark.parametrize("rule", list(RuleKind), ids=lambda r: r.value)
def test_frozen_instance(rule):
    s1, s2, removed, before, after = INSTANCES[rule]
    t1, t2 = parse(s1), parse(s2)
    r1, r2, step = first_match(t1, t2)
    assert step.rule is rule
    assert ",".join(step.removed) == removed
    assert bruteforce_distance(t1, t2) == before
    assert bruteforce_distance(r1, r2) == after
    assert before - after == rule.offset


def test_offsets():
    assert [r.offset for r in RuleKind] == [0, 0, 1, 1, 1, 0, 0]


def test_subtree_identical_quartets():
    t = parse("((a,b),(c,d));")
    r1, r2, step = apply_subtree_reduction(t, t)
    assert step.removed == ("a", "b") and step.new_label == "_s1"
    assert r1.taxa == frozenset({"_s1", "c", "d"}) and r1 == r2


def test_subtree_no_match_on_quartets(quartets):
    assert apply_subtree_reduction(quartets[0], quartets[1]) is None


def test_subtree_example():
    t1, t2 = parse("((a,(b,c)),(d,(e,f)));"), parse("(((a,b),c),(d,(e,f)));")
    r1, r2, step = apply_subtree_reduction(t1, t2)
    assert set(step.removed) == set("def") and step.new_label == "_s1"


def test_chain_reduction_on_caterpillars():
    t = caterpillar("abcdef")
    r1, r2, step = apply_chain_reduction(t, t)
    assert step.rule is RuleKind.CHAIN and r1.n_taxa == 3
    assert len(step.witness[0]) == 6


def test_chain_reduction_keeps_prefix_and_distance():
    # common 5-chain (c,d,e,f,g) with the trees differing on a,b,h,i
    t1 = parse("((a,b),(c,(d,(e,(f,(g,(h,i)))))));")
    t2 = parse("((a,h),(c,(d,(e,(f,(g,(b,i)))))));")
    r1, r2, step = apply_chain_reduction(t1, t2)
    kept = set(step.witness[0][:3])
    assert kept <= r1.taxa and not set(step.removed) & r1.taxa
    assert bruteforce_distance(t1, t2) == bruteforce_distance(r1, r2)


def test_chain_pair_no_rule_fires(chain_pair):
    t1, t2 = chain_pair
    for matcher in (apply_subtree_reduction, apply_chain_reduction, apply_star3star, apply_31star,
                    apply_212, apply_33, apply_32):
        assert matcher(t1, t2) is None
    k1, k2, trace = exhaustively_reduce(t1, t2)
    assert not trace.steps and trace.total_offset == 0


def test_star3star_example():
    t1 = parse("((a,(b,c)),((d,e),(f,g)));")
    t2 = parse("(((a,b),c),((d,f),(e,g)));")
    r1, r2, step = apply_star3star(t1, t2)
    assert set(step.removed) == set("abc")
    assert bruteforce_distance(t1, t2) == 2 and bruteforce_distance(r1, r2) == 1


def test_star3star_identical_trees_no_match():
    t = caterpillar("abcdefg")
    assert apply_star3star(t, t) is None


def test_31star_leaves_pendant_subtree():
    s1, s2, *_ = INSTANCES[RuleKind.THREE_ONE_STAR]
    r1, r2, step = apply_31star(parse(s1), parse(s2))
    chain = set(step.witness[0])
    assert step.removed[0] not in chain
    assert any(chain <= s for s in find_common_pendant_subtrees(r1, r2))


def test_212_then_subtree_twice():
    s1, s2, *_ = INSTANCES[RuleKind.TWO_ONE_TWO]
    k1, k2, trace = exhaustively_reduce(parse(s1), parse(s2))
    rules = [s.rule for s in trace.steps]
    assert rules[0] is RuleKind.TWO_ONE_TWO
    assert rules[1:3] == [RuleKind.SUBTREE, RuleKind.SUBTREE]


def test_212_needs_all_four_cherries():
    # same shape as the instance but x moved so {b,x} is no longer a cherry in T
    t1 = parse("(a,((b,d),f),(c,(e,g)));")
    t2 = parse("(a,((b,e),g),(c,(d,f)));")
    assert apply_212(t1, t2) is not None
    t1b = parse("(a,(b,(d,f)),(c,(e,g)));")
    assert apply_212(t1b, t2) is None


def test_33_no_match_without_cherry():
    s1, s2, *_ = INSTANCES[RuleKind.THREE_THREE]
    t1, t2 = parse(s1), parse(s2)
    assert apply_33(t1, t2) is not None
    assert apply_33(t1, t1) is None


def test_32_and_33_are_disjoint():
    for t1, t2 in random_pairs(300, 7, 9, seed=4):
        m33 = apply_33(t1, t2)
        m32 = apply_32(t1, t2)
        if m33 is not None and m32 is not None:
            assert set(m32[2].witness[1]) != set(m33[2].witness[1][:2])


def test_tight_family_is_reduced():
    t1, t2 = tight_family(4)
    assert t1.n_taxa == 35 and is_exhaustively_reduced(t1, t2)


def test_identical_trees_reduce_by_subtree():
    t = caterpillar(default_taxa(7))
    k1, k2, trace = exhaustively_reduce(t, t)
    assert k1.n_taxa == 3
    assert all(s.rule is RuleKind.SUBTREE for s in trace.steps) and trace.total_offset == 0


def test_driver_guards():
    t = parse("(a,b,c);")
    with pytest.raises(CardinalityError):
        exhaustively_reduce(t, t)
    u = parse("((_x,b),(c,d));")
    with pytest.raises(ValueError):
        exhaustively_reduce(u, u)


def test_trace_replay_label_map_and_text():
    for t1, t2 in random_pairs(40, 5, 10, seed=2):
        k1, k2, trace = exhaustively_reduce(t1, t2)
        assert trace.replay(t1, t2) == (k1, k2)
        assert trace.total_offset == sum(s.offset for s in trace.steps)
        assert trace.to_text().count("RULE ") == len(trace.steps)
        for new, orig in trace.label_map.items():
            assert new.startswith("_s") and orig <= t1.taxa
        assert is_exhaustively_reduced(k1, k2)


def test_step_line_format():
    step = ReductionStep(RuleKind.SUBTREE, (("a", "b"),), ("a", "b"), "_s1")
    assert step.to_line() == "RULE Subtree witness=(a,b)->_s1 removed=a,b offset=0"
    step = ReductionStep(RuleKind.THREE_ONE_STAR, (("a", "b", "c"), ("x",)), ("x",))
    assert step.to_line() == "RULE ThreeOneStar witness=(a,b,c);x removed=x offset=1"


def test_safety_sample():
    for t1, t2 in random_pairs(60, 4, 8, seed=11):
        k1, k2, trace = exhaustively_reduce(t1, t2)
        kd = bruteforce_distance(k1, k2) if k1.n_taxa >= 4 else 0
        assert bruteforce_distance(t1, t2) == kd + trace.total_offset


def test_serialized_kernel_is_canonical():
    t1, t2 = parse(CHAIN_PAIR[0]), parse(CHAIN_PAIR[1])
    k1, _, _ = exhaustively_reduce(t1, t2)
    assert isomorphic(parse(serialize(k1)), t1)
