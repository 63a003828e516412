"""TBR distance: the kernelize-then-solve pipeline and the move-based oracle."""

from __future__ import annotations

import functools
import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded, CardinalityError, TooLargeError
from .forest import AgreementForest
from .reductions import MIN_TAXA, ReductionTrace, exhaustively_reduce
from .search import SearchStats, maf_search
from .tree import UnrootedTree, check_same_taxa, default_taxa, enumerate_trees, random_tree

BFS_MAX_N = 7


@dataclass
class DistanceResult:
    distance: int
    trace: ReductionTrace
    kernel_pair: Tuple[UnrootedTree, UnrootedTree]
    witness: AgreementForest
    nodes: int = 0

    @property
    def offset(self) -> int:
        return self.trace.total_offset

    @property
    def kernel_taxa(self) -> int:
        return self.kernel_pair[0].n_taxa


def tbr_distance(t1: UnrootedTree, t2: UnrootedTree, budget: Optional[int] = None) -> DistanceResult:
    """Reduce the pair exhaustively, solve the kernel exactly, add the offset.

    With ``budget`` set, raises :class:`BudgetExceeded` when the distance is
    larger than the budget.
    """
    taxa = check_same_taxa(t1, t2)
    if len(taxa) < MIN_TAXA:
        return DistanceResult(0, ReductionTrace(), (t1, t2), AgreementForest([taxa]))
    k1, k2, trace = exhaustively_reduce(t1, t2)
    offset = trace.total_offset
    if budget is None:
        kernel_budget = max(k1.n_taxa - 3, 0)
    else:
        kernel_budget = budget - offset
        if kernel_budget < 0:
            raise BudgetExceeded(budget)
    stats = SearchStats()
    try:
        size, witness = maf_search(k1, k2, kernel_budget, stats)
    except BudgetExceeded:
        raise BudgetExceeded(budget) from None
    return DistanceResult(size - 1 + offset, trace, (k1, k2), witness, stats.nodes)


# -- TBR moves -------------------------------------------------------------------


def _side(adj, start) -> set:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def tbr_neighbors(t: UnrootedTree) -> Iterator[UnrootedTree]:
    """Every tree one TBR move away from ``t``, each once; ``t`` itself is not
    yielded."""
    if t.n_taxa < 4:
        raise CardinalityError("tbr_neighbors needs at least 4 taxa")
    labels = t.labels()
    seen = {t.canonical}
    for u, v in t.edges:
        adj = t.adjacency()
        adj[u].discard(v)
        adj[v].discard(u)
        side_u = _side(adj, u)
        for x in (u, v):
            if x not in labels:
                a, b = adj.pop(x)
                adj[a].discard(x)
                adj[b].discard(x)
                adj[a].add(b)
                adj[b].add(a)
        side_u = {w for w in side_u if w in adj}
        side_v = {w for w in adj if w not in side_u}

        def spots(side):
            edges = [(a, b) for a in side for b in adj[a] if a < b]
            return edges or [next(iter(side))]

        for s1 in spots(side_u):
            for s2 in spots(side_v):
                new = {w: set(ns) for w, ns in adj.items()}
                ends = []
                for spot in (s1, s2):
                    if isinstance(spot, tuple):
                        a, b = spot
                        m = max(new) + 1
                        new[a].discard(b)
                        new[b].discard(a)
                        new[m] = {a, b}
                        new[a].add(m)
                        new[b].add(m)
                        ends.append(m)
                    else:
                        ends.append(spot)
                new[ends[0]].add(ends[1])
                new[ends[1]].add(ends[0])
                tree = UnrootedTree(new, labels)
                key = tree.canonical
                if key not in seen:
                    seen.add(key)
                    yield tree


@functools.lru_cache(maxsize=8)
def _tbr_graph(taxa: Tuple[str, ...]) -> Tuple[Dict[str, int], List[List[int]]]:
    trees = list(enumerate_trees(taxa))
    index = {tr.canonical: i for i, tr in enumerate(trees)}
    graph = [[index[nb.canonical] for nb in tbr_neighbors(tr)] for tr in trees]
    return index, graph


def tbr_bfs_distance(t1: UnrootedTree, t2: UnrootedTree, max_n: int = BFS_MAX_N) -> int:
    """Fewest TBR moves turning t1 into t2, by breadth-first search over tree space."""
    taxa = check_same_taxa(t1, t2)
    if len(taxa) > max_n:
        raise TooLargeError(f"BFS over tree space is limited to {max_n} taxa")
    if t1 == t2:
        return 0
    if len(taxa) < 4:
        return 0
    index, graph = _tbr_graph(tuple(sorted(taxa)))
    src, dst = index[t1.canonical], index[t2.canonical]
    dist = {src: 0}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in graph[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                if w == dst:
                    return dist[w]
                queue.append(w)
    raise AssertionError("tree space is connected under TBR")


# -- metric audit ----------------------------------------------------------------


@dataclass
class MetricReport:
    checked: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_metric(taxa: Sequence[str], samples: Optional[int] = None, seed: int = 0,
                 distance=None) -> MetricReport:
    """Check the metric axioms for the TBR distance on trees over ``taxa``.

    With ``samples=None`` every ordered triple is checked, otherwise that many
    random triples.  Distances are memoised per ordered pair.
    """
    taxa = tuple(sorted(taxa))
    if not 4 <= len(taxa) <= 6:
        raise CardinalityError("audit_metric supports 4 to 6 taxa")
    distance = distance or (lambda a, b: tbr_distance(a, b).distance)
    trees = list(enumerate_trees(taxa))
    report = MetricReport()
    d: Dict[Tuple[int, int], int] = {}

    def dist(i, j):
        if (i, j) not in d:
            d[i, j] = distance(trees[i], trees[j])
        return d[i, j]

    for i in range(len(trees)):
        if dist(i, i) != 0:
            report.violations.append(f"identity: d(T{i},T{i})={dist(i, i)}")
    if samples is None:
        triples = itertools.product(range(len(trees)), repeat=3)
    else:
        rng = random.Random(seed)
        triples = ([rng.randrange(len(trees)) for _ in range(3)] for _ in range(samples))
    for i, j, k in triples:
        report.checked += 1
        if dist(i, j) != dist(j, i):
            report.violations.append(f"symmetry: T{i},T{j}")
        if i != j and dist(i, j) == 0:
            report.violations.append(f"separation: T{i},T{j}")
        if dist(i, k) > dist(i, j) + dist(j, k):
            report.violations.append(f"triangle: T{i},T{j},T{k}")
    return report


def random_pair(n: int, rng: random.Random, taxa: Optional[Sequence[str]] = None) -> Tuple[UnrootedTree, UnrootedTree]:
    taxa = list(taxa or default_taxa(n))
    return random_tree(taxa, rng), random_tree(taxa, rng)
