"""Budgeted exact search for a maximum agreement forest.

The search keeps two forests, one grown from each tree by deleting edges,
and repeatedly looks at a cherry {a, c} of the first forest.  Depending on
how a and c sit in the second forest it either contracts them into a single
leaf (forced), or branches:

* a and c in different components of F2: one of them is a singleton;
* a and c joined in F2 by a path with m >= 2 pendant subtrees: a is a
  singleton, c is a singleton, or a and c share a component that reaches
  into at most one of the pendant subtrees, so the edges to all others are
  cut.

Every branch deletes at least one edge or removes a leaf, and the number of
components of either forest never exceeds the number in the final forest,
which gives the budget test.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .errors import BudgetExceeded
from .forest import AgreementForest
from .tree import UnrootedTree, check_same_taxa

log = logging.getLogger(__name__)


class _Forest:
    __slots__ = ("adj", "labels", "leaf")

    def __init__(self, adj: Dict[int, Set[int]], labels: Dict[int, str]):
        self.adj = adj
        self.labels = labels
        self.leaf = {lab: v for v, lab in labels.items()}

    @classmethod
    def from_tree(cls, tree: UnrootedTree) -> "_Forest":
        return cls(tree.adjacency(), tree.labels())

    def copy(self) -> "_Forest":
        new = _Forest.__new__(_Forest)
        new.adj = {v: set(ns) for v, ns in self.adj.items()}
        new.labels = dict(self.labels)
        new.leaf = dict(self.leaf)
        return new

    def _tidy(self, x: int) -> None:
        """Restore the forest invariants around vertex x after a local change."""
        stack = [x]
        while stack:
            v = stack.pop()
            if v not in self.adj or v in self.labels:
                continue
            ns = self.adj[v]
            if len(ns) <= 1:
                del self.adj[v]
                for w in ns:
                    self.adj[w].discard(v)
                    stack.append(w)
            elif len(ns) == 2:
                u, w = ns
                del self.adj[v]
                self.adj[u].discard(v)
                self.adj[w].discard(v)
                self.adj[u].add(w)
                self.adj[w].add(u)

    def cut(self, u: int, v: int) -> None:
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self._tidy(u)
        self._tidy(v)

    def isolate(self, label: str) -> None:
        v = self.leaf[label]
        for w in list(self.adj[v]):
            self.cut(v, w)

    def isolated(self, label: str) -> bool:
        return not self.adj[self.leaf[label]]

    def remove_leaf(self, label: str) -> None:
        v = self.leaf.pop(label)
        del self.labels[v]
        ns = self.adj.pop(v)
        for w in ns:
            self.adj[w].discard(v)
            self._tidy(w)

    def component_count(self) -> int:
        seen: Set[int] = set()
        count = 0
        for v in self.adj:
            if v in seen:
                continue
            count += 1
            stack = [v]
            seen.add(v)
            while stack:
                for w in self.adj[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return count

    def component_size(self, label: str) -> int:
        start = self.leaf[label]
        seen, stack, n = {start}, [start], 0
        while stack:
            v = stack.pop()
            n += v in self.labels
            for w in self.adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return n

    def path(self, a: str, c: str) -> Optional[List[int]]:
        src, dst = self.leaf[a], self.leaf[c]
        prev = {src: None}
        stack = [src]
        while stack:
            v = stack.pop()
            if v == dst:
                out = [v]
                while prev[out[-1]] is not None:
                    out.append(prev[out[-1]])
                return out[::-1]
            for w in self.adj[v]:
                if w not in prev:
                    prev[w] = v
                    stack.append(w)
        return None

    def cherries(self) -> List[Tuple[str, str]]:
        out = []
        for v, ns in self.adj.items():
            if v in self.labels:
                for w in ns:
                    if w in self.labels and self.labels[v] < self.labels[w]:
                        out.append((self.labels[v], self.labels[w]))
                continue
            leaves = sorted(self.labels[w] for w in ns if w in self.labels)
            for i in range(len(leaves)):
                for j in range(i + 1, len(leaves)):
                    out.append((leaves[i], leaves[j]))
        return out


@dataclass
class SearchStats:
    nodes: int = 0


class _Solver:
    def __init__(self, t1: UnrootedTree, t2: UnrootedTree):
        self.t1, self.t2 = t1, t2
        self.stats = SearchStats()

    def run(self, limit: int) -> Optional[List[FrozenSet[str]]]:
        """A forest with at most ``limit`` components, or None."""
        f1 = _Forest.from_tree(self.t1)
        f2 = _Forest.from_tree(self.t2)
        groups = {t: frozenset([t]) for t in self.t1.taxa}
        return self._solve(f1, f2, groups, limit)

    def _solve(self, f1: _Forest, f2: _Forest, groups, limit) -> Optional[List[FrozenSet[str]]]:
        self.stats.nodes += 1
        # singletons in one forest are singletons in the final forest
        changed = True
        while changed:
            changed = False
            for lab in list(f1.leaf):
                i1, i2 = f1.isolated(lab), f2.isolated(lab)
                if i1 != i2:
                    (f2 if i1 else f1).isolate(lab)
                    changed = True
        if max(f1.component_count(), f2.component_count()) > limit:
            return None

        best = None
        for a, c in f1.cherries():
            path = f2.path(a, c)
            if path is None:
                key = (1, 2)
            else:
                m = len(path) - 2
                if m <= 1:
                    best = ("contract", a, c, path)
                    break
                key = (2, m)
            if best is None or key < best[0]:
                best = (key, a, c, path)
        if best is None:
            return [groups[lab] for lab in sorted(f1.leaf)]

        kind, a, c, path = best
        if kind == "contract":
            f1, f2 = f1.copy(), f2.copy()
            f1.remove_leaf(c)
            f2.remove_leaf(c)
            groups = dict(groups)
            groups[a] = groups[a] | groups.pop(c)
            return self._solve(f1, f2, groups, limit)

        pair = f1.component_size(a) == 2
        if path is None:
            if pair:
                g1 = f1.copy()
                g1.isolate(a)
                return self._solve(g1, f2.copy(), groups, limit)
            for x in (a, c):
                g1, g2 = f1.copy(), f2.copy()
                g1.isolate(x)
                g2.isolate(x)
                res = self._solve(g1, g2, groups, limit)
                if res is not None:
                    return res
            return None

        interior = path[1:-1]
        on_path = set(path)
        pendant = []
        for v in interior:
            (w,) = [w for w in f2.adj[v] if w not in on_path]
            pendant.append((v, w))
        options = []
        if pair:
            options.append(("split", None))
        else:
            options += [("single", a), ("single", c)]
            options += [("keep", j) for j in range(len(pendant))]
        options.append(("keep", None))
        for kind, arg in options:
            g1, g2 = f1.copy(), f2.copy()
            if kind == "split":
                g1.isolate(a)
            elif kind == "single":
                g1.isolate(arg)
                g2.isolate(arg)
            else:
                cuts = [e for j, e in enumerate(pendant) if j != arg]
                if g2.component_count() + len(cuts) > limit:
                    continue
                for u, w in cuts:
                    g2.cut(u, w)
            res = self._solve(g1, g2, groups, limit)
            if res is not None:
                return res
        return None


def maf_search(t1: UnrootedTree, t2: UnrootedTree, budget: int,
               stats: Optional[SearchStats] = None) -> Tuple[int, AgreementForest]:
    """Exact MAF if the TBR distance is at most ``budget``.

    Returns ``(size, witness)`` with ``size = distance + 1``; raises
    :class:`BudgetExceeded` when the distance is larger than ``budget``.
    """
    taxa = check_same_taxa(t1, t2)
    if budget < 0:
        raise BudgetExceeded(budget)
    if len(taxa) <= 3:
        return 1, AgreementForest([taxa])
    solver = _Solver(t1, t2)
    try:
        for limit in range(1, min(budget + 1, len(taxa)) + 1):
            comps = solver.run(limit)
            if comps is not None:
                log.debug("maf_search: size %d after %d nodes", len(comps), solver.stats.nodes)
                return len(comps), AgreementForest(comps)
    finally:
        if stats is not None:
            stats.nodes += solver.stats.nodes
    raise BudgetExceeded(budget)


def search_distance(t1: UnrootedTree, t2: UnrootedTree, budget: Optional[int] = None) -> int:
    if budget is None:
        budget = max(t1.n_taxa - 3, 0)
    return maf_search(t1, t2, budget)[0] - 1
