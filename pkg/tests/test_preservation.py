import pytest

from tbrkernel import parse
from tbrkernel.bruteforce import enumerate_mafs, maf_bruteforce
from tbrkernel.errors import IneligibleChainError, NotMaximumError
from tbrkernel.forest import AgreementForest, ChainStatus, chain_status, is_agreement_forest, preserves
from tbrkernel.preservation import chain_sides, classify_components, enforce_chain_preservation
from tbrkernel.tree import caterpillar

# Forests found by exhaustive search that exercise the separate rewrite branches.
BYPASS_BOTH = ("(a,((((b,(d,e)),g),h),f),c);", "(a,((((b,(c,g)),e),h),f),d);",
               "a|b,c,d,e,g|f|h", ("a", "f", "h"))
BYPASS_PENDANT = ("(a,((b,(d,h)),g),((c,e),f));", "(a,(b,((((c,h),e),d),g)),f);",
                  "a,b,d,f,h|c|e|g", ("c", "e"))
STRADDLE_ONE = ("(a,(((((b,c),h),e),d),g),f);", "(a,((((b,d),e),h),g),(c,f));",
                "a,b,d,f,g|c|e|h", ("d", "e", "h"))


def _load(case):
    s1, s2, f, chain = case
    return parse(s1), parse(s2), AgreementForest.parse(f), chain


def test_chain_sides_interior_and_pendant():
    t = parse("((a,b),(c,(d,(e,(f,g)))));")
    left, right = chain_sides(t, ("c", "d", "e"))
    assert {left, right} == {frozenset("ab"), frozenset("fg")}
    assert chain_sides(caterpillar("abcdef"), ("a", "b", "c")) is None


def test_bypass_in_both_trees():
    t1, t2, f, chain = _load(BYPASS_BOTH)
    tax = classify_components(t1, t2, f, chain)
    (b,) = tax.bypass()
    assert tax.flags[b].bypass_t1 and tax.flags[b].bypass_t2
    assert chain_status(f, chain) is ChainStatus.ATOMIZED
    assert tax.observation_violations() == []
    out = enforce_chain_preservation(t1, t2, [chain], f)
    assert out.size == f.size and preserves(out, chain) and is_agreement_forest(t1, t2, out)


@pytest.mark.parametrize("case", [BYPASS_PENDANT, STRADDLE_ONE], ids=["pendant-bypass", "straddle"])
def test_rewrite_cases(case):
    t1, t2, f, chain = _load(case)
    assert f.size == maf_bruteforce(t1, t2)[0]
    assert not preserves(f, chain)
    out = enforce_chain_preservation(t1, t2, [chain], f)
    assert out.size == f.size and preserves(out, chain) and is_agreement_forest(t1, t2, out)


def test_inside_outside_flag():
    t1, t2, f, chain = _load(STRADDLE_ONE)
    tax = classify_components(t1, t2, f, chain)
    (b,) = tax.inside_outside()
    assert b == frozenset("abdfg")
    assert tax.flags[b].straddles_t1 or tax.flags[b].straddles_t2


def test_already_preserved_is_unchanged(chain_pair):
    t1, t2 = chain_pair
    for f in enumerate_mafs(t1, t2):
        if preserves(f, "bcd"):
            assert enforce_chain_preservation(t1, t2, [("b", "c", "d")], f) == f
            break
    else:
        pytest.fail("no forest preserves (b,c,d)")


def test_all_mafs_of_three_chain_pair(chain_pair):
    t1, t2 = chain_pair
    for f in enumerate_mafs(t1, t2):
        out = enforce_chain_preservation(t1, t2, [("b", "c", "d")], f)
        assert out.size == 3 and preserves(out, "bcd")


def test_errors(chain_pair):
    t1, t2 = chain_pair
    size, f = maf_bruteforce(t1, t2)
    with pytest.raises(IneligibleChainError):
        enforce_chain_preservation(t1, t2, [("a", "b", "c")], f)
    with pytest.raises(IneligibleChainError):
        enforce_chain_preservation(t1, t2, [("b", "c", "d"), ("c", "d")], f)
    with pytest.raises(ValueError):
        enforce_chain_preservation(t1, t2, [("b", "c", "d")], AgreementForest(["abcde"]))
    bigger = AgreementForest([[x] for x in "abcde"])
    with pytest.raises(NotMaximumError):
        enforce_chain_preservation(t1, t2, [("b", "c", "d")], bigger)


def test_structural_observations_on_split_chains():
    from tbrkernel.chains import eligible_common_chains
    from conftest import random_pairs

    checked = 0
    for t1, t2 in random_pairs(150, 6, 7, seed=9):
        chains = eligible_common_chains(t1, t2)
        if not chains:
            continue
        for f in enumerate_mafs(t1, t2):
            for ch in chains:
                if preserves(f, ch.leaves):
                    continue
                tax = classify_components(t1, t2, f, ch)
                assert tax.observation_violations() == []
                if tax.bypass():
                    assert chain_status(f, ch.leaves) is ChainStatus.ATOMIZED
                checked += 1
    assert checked > 100
