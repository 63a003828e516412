"""Property suites that check the library against its independent oracles.

Each suite is deterministic given its seed and returns a :class:`SuiteReport`
with per-property counts and the list of violations (empty on success).
"""

from __future__ import annotations

import itertools
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .bruteforce import bruteforce_distance, enumerate_mafs, maf_bruteforce
from .chains import common_chains, eligible_common_chains
from .errors import BudgetExceeded
from .forest import is_agreement_forest, preserves
from .network import (Generator, attach, displayed_trees, extract_generator, necklace_generator,
                      reticulation_number, tight_family_instance)
from .preservation import enforce_chain_preservation
from .reductions import (RuleKind, apply_subtree_reduction, exhaustively_reduce, first_match)
from .search import SearchStats, maf_search
from .tbr import audit_metric, tbr_bfs_distance, tbr_distance
from .tree import UnrootedTree, default_taxa, enumerate_trees, random_tree


@dataclass
class SuiteReport:
    name: str
    counts: Dict[str, int] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def bump(self, key: str, by: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + by

    def lines(self) -> List[str]:
        out = [f"suite={self.name}"]
        out += [f"{k}={v}" for k, v in sorted(self.counts.items())]
        out += [f"note={n}" for n in self.notes]
        out += [f"violation={v}" for v in self.violations]
        out.append(f"violations={len(self.violations)}")
        return out


def _pair(n: int, rng: random.Random) -> Tuple[UnrootedTree, UnrootedTree]:
    taxa = default_taxa(n)
    return random_tree(taxa, rng), random_tree(taxa, rng)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.seconds = time.perf_counter() - t0
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- distance oracles ------------------------------------------------------------


@_timed
def suite_move_oracle(seed: int = 1, samples: int = 100) -> SuiteReport:
    """MAF size - 1 equals the BFS move distance: all n=5 ordered pairs and
    ``samples`` random n=6 pairs."""
    rep = SuiteReport("theorem3")
    trees = list(enumerate_trees(default_taxa(5)))
    for a, b in itertools.product(trees, repeat=2):
        rep.bump("pairs_n5")
        if maf_bruteforce(a, b)[0] - 1 != tbr_bfs_distance(a, b):
            rep.violations.append(f"{a} {b}")
    rng = random.Random(seed)
    for _ in range(samples):
        a, b = _pair(6, rng)
        rep.bump("pairs_n6")
        if maf_bruteforce(a, b)[0] - 1 != tbr_bfs_distance(a, b):
            rep.violations.append(f"{a} {b}")
    return rep


@_timed
def suite_safety(seed: int = 1, samples: int = 200) -> SuiteReport:
    """Pipeline distance (kernel MAF - 1 + offset) equals the partition oracle
    on random pairs with 4 <= n <= 8."""
    rep = SuiteReport("safety")
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(4, 8)
        a, b = _pair(n, rng)
        res = tbr_distance(a, b)
        k1, k2 = res.kernel_pair
        kernel_d = maf_bruteforce(k1, k2)[0] - 1
        rep.bump("pairs")
        rep.bump("rule_steps", len(res.trace.steps))
        if kernel_d + res.offset != bruteforce_distance(a, b) or res.distance != kernel_d + res.offset:
            rep.violations.append(f"{a} {b}")
    return rep


def rule_instances(rule: RuleKind, count: int, seed: int = 1, max_n: int = 9,
                   max_tries: int = 200000) -> Iterator[Tuple[UnrootedTree, UnrootedTree]]:
    """Pairs (n <= max_n) on which ``rule`` is the rule the driver would apply
    next, so the five newer rules are only ever seen on subtree- and
    chain-reduced pairs.  Found by running the driver on seeded random pairs."""
    rng = random.Random(seed)
    found, seen = 0, set()
    for _ in range(max_tries):
        a, b = _pair(rng.randint(6, max_n), rng)
        while found < count:
            m = first_match(a, b)
            if m is None:
                break
            if m[2].rule is rule:
                key = (a.canonical, b.canonical)
                if key not in seen:
                    seen.add(key)
                    found += 1
                    yield a, b
            a, b, _ = m
        if found >= count:
            return


@_timed
def suite_rules(seed: int = 1, samples: int = 10) -> SuiteReport:
    """Each rule changes the partition-oracle distance by exactly its offset."""
    rep = SuiteReport("rules")
    for rule in RuleKind:
        got = 0
        for a, b in rule_instances(rule, samples, seed):
            m = first_match(a, b)
            r1, r2, step = m
            before, after = bruteforce_distance(a, b), bruteforce_distance(r1, r2)
            got += 1
            if before - after != rule.offset:
                rep.violations.append(f"{rule.value}: {a} {b} {before}->{after}")
        rep.counts[f"instances_{rule.value}"] = got
        if got < samples:
            rep.violations.append(f"{rule.value}: only {got} instances found")
    return rep


# -- chain preservation ----------------------------------------------------------


def _chain_sets(chains):
    for c in chains:
        yield [c]
    for a, b in itertools.combinations(chains, 2):
        if not a.taxa & b.taxa:
            yield [a, b]


def check_chain_preservation(t1: UnrootedTree, t2: UnrootedTree, rep: SuiteReport) -> None:
    """Existence and constructive checks on every eligible chain set of size <= 2."""
    chains = eligible_common_chains(t1, t2)
    if not chains:
        return
    rep.bump("pairs_with_chains")
    mafs = list(enumerate_mafs(t1, t2, max_n=9))
    for chain_set in _chain_sets(chains):
        rep.bump("chain_sets")
        seqs = [c.leaves for c in chain_set]
        if not any(all(preserves(f, s) for s in seqs) for f in mafs):
            rep.violations.append(f"existence: {t1} {t2} {seqs}")
        for f in mafs:
            rep.bump("constructive_runs")
            try:
                g = enforce_chain_preservation(t1, t2, chain_set, f, check_maximum=False)
            except AssertionError as exc:
                rep.violations.append(f"constructive: {t1} {t2} {seqs} {f}: {exc}")
                continue
            if g != f:
                rep.bump("rewrites")
            if g.size != f.size or not is_agreement_forest(t1, t2, g) \
                    or not all(preserves(g, s) for s in seqs):
                rep.violations.append(f"constructive: {t1} {t2} {seqs} {f} -> {g}")


@_timed
def suite_chain_preservation(seed: int = 1, samples: int = 100) -> SuiteReport:
    """All pairs on 6 taxa, plus ``samples`` random pairs on 7 taxa."""
    rep = SuiteReport("theorem5")
    trees = list(enumerate_trees(default_taxa(6)))
    for a, b in itertools.product(trees, repeat=2):
        rep.bump("pairs")
        check_chain_preservation(a, b, rep)
    rng = random.Random(seed)
    for _ in range(samples):
        rep.bump("pairs")
        check_chain_preservation(*_pair(7, rng), rep)
    return rep


# -- metric ----------------------------------------------------------------------


@_timed
def suite_metric(seed: int = 1, samples: int = 100) -> SuiteReport:
    """Metric axioms over every n=5 triple, and ``samples`` random n=6 triples."""
    rep = SuiteReport("metric")
    full = audit_metric(default_taxa(5))
    rep.counts["triples_n5"] = full.checked
    rep.violations += full.violations
    part = audit_metric(default_taxa(6), samples=samples, seed=seed)
    rep.counts["triples_n6"] = part.checked
    rep.violations += part.violations
    return rep


# -- kernel bounds ---------------------------------------------------------------


def reduced_pairs(count: int, seed: int = 1, max_n: int = 8) -> Iterator[Tuple[UnrootedTree, UnrootedTree, int]]:
    """Seeded exhaustively reduced pairs with 4 <= n <= max_n and oracle d >= 2,
    as (t1, t2, d).  Kernels are taken from random pairs of up to 14 taxa."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        a, b = _pair(rng.randint(6, 14), rng)
        k1, k2, _ = exhaustively_reduce(a, b)
        if not 4 <= k1.n_taxa <= max_n:
            continue
        d = bruteforce_distance(k1, k2)
        if d >= 2:
            produced += 1
            yield k1, k2, d


def subtree_reduce(t1: UnrootedTree, t2: UnrootedTree) -> Tuple[UnrootedTree, UnrootedTree]:
    while True:
        m = apply_subtree_reduction(t1, t2)
        if m is None:
            return t1, t2
        t1, t2, _ = m


def chain_free_pairs(count: int, seed: int = 1, max_n: int = 8) -> Iterator[Tuple[UnrootedTree, UnrootedTree, int]]:
    """Seeded subtree-reduced pairs without common chains of length >= 2, with
    4 <= n <= max_n and oracle d >= 2."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        a, b = subtree_reduce(*_pair(rng.randint(4, max_n), rng))
        if a.n_taxa < 4 or common_chains(a, b):
            continue
        d = bruteforce_distance(a, b)
        if d >= 2:
            produced += 1
            yield a, b, d


@_timed
def suite_bounds(seed: int = 1, samples: int = 200) -> SuiteReport:
    """|X| <= 11d - 9 on exhaustively reduced pairs and |X| <= 5d - 3 on
    subtree-reduced chain-free pairs (both with d >= 2, n <= 8)."""
    rep = SuiteReport("bounds")
    tight = Counter()
    for k1, k2, d in reduced_pairs(samples, seed):
        rep.bump("reduced_pairs")
        if k1.n_taxa > 11 * d - 9:
            rep.violations.append(f"11d-9: n={k1.n_taxa} d={d} {k1} {k2}")
        tight[11 * d - 9 - k1.n_taxa] += 1
    rep.counts["reduced_min_slack"] = min(tight)
    slack = Counter()
    for a, b, d in chain_free_pairs(samples, seed):
        rep.bump("chain_free_pairs")
        if a.n_taxa > 5 * d - 3:
            rep.violations.append(f"5d-3: n={a.n_taxa} d={d} {a} {b}")
        slack[5 * d - 3 - a.n_taxa] += 1
    rep.counts["chain_free_min_slack"] = min(slack)
    rep.counts["chain_free_at_bound"] = slack[0]
    return rep


# -- tight family and generators --------------------------------------------------


def check_tight(k: int) -> Dict[str, object]:
    """Taxon count, reducedness, and distance of the k-th tight pair."""
    inst = tight_family_instance(k)
    t1, t2 = inst.t1, inst.t2
    out: Dict[str, object] = {"k": k, "n_taxa": t1.n_taxa, "expected_taxa": 11 * k - 9}
    out["reduced"] = first_match(t1, t2) is None
    stats = SearchStats()
    try:
        maf_search(t1, t2, k - 1, stats)
        out["lower_ok"] = False
    except BudgetExceeded:
        out["lower_ok"] = True
    size, witness = maf_search(t1, t2, k, stats)
    out["distance"] = size - 1
    out["witness_ok"] = bool(is_agreement_forest(t1, t2, witness))
    out["nodes"] = stats.nodes
    out["r"] = reticulation_number(inst.network)
    return out


@_timed
def suite_tight(seed: int = 1, samples: int = 0, ks=(4, 5)) -> SuiteReport:
    rep = SuiteReport("tight")
    for k in ks:
        res = check_tight(k)
        for key in ("n_taxa", "distance", "nodes"):
            rep.counts[f"k{k}_{key}"] = res[key]
        if res["n_taxa"] != 11 * k - 9:
            rep.violations.append(f"k={k}: {res['n_taxa']} taxa")
        if not res["reduced"]:
            rep.violations.append(f"k={k}: a reduction rule applies")
        if not res["lower_ok"] or res["distance"] != k or not res["witness_ok"]:
            rep.violations.append(f"k={k}: distance {res['distance']}")
    return rep


def generator_corpus() -> List[Generator]:
    """Connected cubic multigraphs with k = 2, 3, 4."""
    return [
        Generator([(0, 1), (0, 1), (0, 1)]),                      # theta, k=2
        Generator([(0, 0), (0, 1), (1, 1)]),                      # dumbbell, k=2
        Generator([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),  # K4, k=3
        necklace_generator(3),                                    # k=3
        Generator([(0, 0), (0, 1), (1, 2), (1, 3), (2, 3), (2, 3)]),  # loop + digon, k=3
        Generator([(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]),  # K33
        Generator([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]),  # prism
        necklace_generator(4),                                    # k=4
    ]


def _leaf_lists(gen: Generator, rng: random.Random) -> List[List[str]]:
    # a loop side needs two leaves and one of two parallel sides needs one,
    # or the network is not a simple graph
    must, loops = set(), set()
    for i, (u, v) in enumerate(gen.sides):
        if u == v:
            must.add(i)
            loops.add(i)
    for (i, e), (j, f) in itertools.combinations(enumerate(gen.sides), 2):
        if sorted(e) == sorted(f) and i not in must and j not in must:
            must.add(i)
    counter = itertools.count()
    out = []
    for i in range(len(gen.sides)):
        m = rng.randint(2 if i in loops else 1 if i in must else 0, 2)
        out.append([f"x{next(counter)}" for _ in range(m)])
    return out


@_timed
def suite_generators(seed: int = 1, samples: int = 3) -> SuiteReport:
    """Side count 3(k-1) and extract/attach round trip for the generator corpus;
    r(N) >= pipeline distance for pairs of trees displayed by each network."""
    rep = SuiteReport("generators")
    rng = random.Random(seed)
    for gen in generator_corpus():
        for _ in range(samples):
            leaves = _leaf_lists(gen, rng)
            net = attach(gen, leaves)
            dec = extract_generator(net)
            rep.bump("networks")
            if len(dec.generator.sides) != 3 * (gen.k - 1):
                rep.violations.append(f"side count {len(dec.generator.sides)} for k={gen.k}")
            if not dec.generator.isomorphic(gen):
                rep.violations.append(f"round trip changed the generator (k={gen.k})")
            if sorted(map(sorted, dec.attachments)) != sorted(map(sorted, leaves)):
                rep.violations.append("round trip changed the attachments")
            if net.taxa and len(net.taxa) >= 4:
                r = reticulation_number(net)
                shown = {t.canonical: t for t in displayed_trees(net)}
                trees = sorted(shown.values(), key=lambda t: t.canonical)
                picks = [(trees[0], trees[-1])] + [tuple(rng.sample(trees, 2)) for _ in range(2)] \
                    if len(trees) >= 2 else []
                for a, b in picks:
                    rep.bump("displayed_pairs")
                    if tbr_distance(a, b).distance > r:
                        rep.violations.append(f"r={r} below distance for {a} {b}")
    return rep


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "safety": suite_safety,
    "theorem3": suite_move_oracle,
    "moves": suite_move_oracle,
    "theorem5": suite_chain_preservation,
    "chains": suite_chain_preservation,
    "metric": suite_metric,
    "bounds": suite_bounds,
    "tight": suite_tight,
    "rules": suite_rules,
    "generators": suite_generators,
}


def run_suite(name: str, seed: int = 1, samples: Optional[int] = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    fn = SUITES[name]
    return fn(seed=seed) if samples is None else fn(seed=seed, samples=samples)
