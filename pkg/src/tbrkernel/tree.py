"""Unrooted binary phylogenetic trees.

Trees are immutable.  Vertices are opaque integers; only leaf labels carry
meaning, and two trees compare equal when a label-preserving isomorphism
exists between them.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import CardinalityError, TaxonSetMismatchError, UnknownTaxonError


@dataclass(frozen=True, order=True)
class Quartet:
    """Quartet topology ``ab|cd`` stored in canonical orientation.

    The smallest taxon comes first within each pair, and the pair holding the
    smallest of the four taxa comes first, so ``ab|cd == cd|ba``.
    """

    pair_a: Tuple[str, str]
    pair_b: Tuple[str, str]

    @classmethod
    def of(cls, a: str, b: str, c: str, d: str) -> "Quartet":
        if len({a, b, c, d}) != 4:
            raise CardinalityError("a quartet needs four distinct taxa")
        p = tuple(sorted((a, b)))
        q = tuple(sorted((c, d)))
        if q < p:
            p, q = q, p
        return cls(p, q)

    @property
    def taxa(self) -> FrozenSet[str]:
        return frozenset(self.pair_a + self.pair_b)

    def __str__(self):
        sep = "" if all(len(t) == 1 for t in self.pair_a + self.pair_b) else ","
        return f"{sep.join(self.pair_a)}|{sep.join(self.pair_b)}"


def _prune_and_suppress(adj: Dict[int, set], labels: Dict[int, str]) -> None:
    """Delete unlabeled degree <= 1 vertices and suppress degree-2 vertices, in place."""
    stack = [v for v, ns in adj.items() if len(ns) <= 1 and v not in labels]
    while stack:
        v = stack.pop()
        if v not in adj or v in labels or len(adj[v]) > 1:
            continue
        for u in adj.pop(v):
            adj[u].discard(v)
            if len(adj[u]) <= 1 and u not in labels:
                stack.append(u)
    for v in [v for v, ns in adj.items() if len(ns) == 2 and v not in labels]:
        if v not in adj or len(adj[v]) != 2:
            continue
        u, w = adj.pop(v)
        adj[u].discard(v)
        adj[w].discard(v)
        adj[u].add(w)
        adj[w].add(u)


class UnrootedTree:
    """A leaf-labelled unrooted tree given by adjacency lists.

    The constructor does not check the binary-tree invariants; call
    :func:`validate` for that.  Everything built by this package (parsers,
    restriction, enumeration, moves) produces valid trees.
    """

    __slots__ = ("_adj", "_labels", "_leaves", "__dict__")

    def __init__(self, adjacency: Dict[int, Iterable[int]], labels: Dict[int, str]):
        self._adj: Dict[int, Tuple[int, ...]] = {
            v: tuple(sorted(ns)) for v, ns in adjacency.items()
        }
        self._labels: Dict[int, str] = dict(labels)
        self._leaves: Dict[str, int] = {lab: v for v, lab in self._labels.items()}

    # -- construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[int, int]], labels: Dict[int, str]) -> "UnrootedTree":
        adj: Dict[int, set] = {v: set() for v in labels}
        for u, v in edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return cls(adj, labels)

    @classmethod
    def single(cls, label: str) -> "UnrootedTree":
        return cls({0: ()}, {0: label})

    # -- basic structure ----------------------------------------------------

    @property
    def taxa(self) -> FrozenSet[str]:
        return frozenset(self._leaves)

    @property
    def n_taxa(self) -> int:
        return len(self._leaves)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(self._adj)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u, ns in self._adj.items() for v in ns if u < v]

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def label(self, v: int) -> Optional[str]:
        return self._labels.get(v)

    def labels(self) -> Dict[int, str]:
        return dict(self._labels)

    def adjacency(self) -> Dict[int, set]:
        """A mutable copy of the adjacency lists."""
        return {v: set(ns) for v, ns in self._adj.items()}

    def is_leaf(self, v: int) -> bool:
        return v in self._labels

    def leaf(self, taxon: str) -> int:
        try:
            return self._leaves[taxon]
        except KeyError:
            raise UnknownTaxonError(f"unknown taxon {taxon!r}") from None

    def parent(self, taxon: str) -> int:
        """The unique neighbour of the leaf labelled ``taxon``."""
        v = self.leaf(taxon)
        ns = self._adj[v]
        if len(ns) != 1:
            raise CardinalityError(f"leaf {taxon!r} has no unique parent")
        return ns[0]

    def _check_taxa(self, subset: Iterable[str]) -> FrozenSet[str]:
        subset = frozenset(subset)
        missing = subset - self.taxa
        if missing:
            raise UnknownTaxonError(f"unknown taxa {sorted(missing)}")
        return subset

    # -- paths and embeddings -----------------------------------------------

    @cached_property
    def _rooting(self) -> Tuple[Dict[int, Optional[int]], Dict[int, int]]:
        root = min(self._adj)
        parent: Dict[int, Optional[int]] = {root: None}
        depth = {root: 0}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in self._adj[u]:
                if w not in parent:
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    queue.append(w)
        return parent, depth

    def path(self, u: int, v: int) -> List[int]:
        """Vertices on the unique u-v path, endpoints included."""
        parent, depth = self._rooting
        left, right = [u], [v]
        while depth[u] > depth[v]:
            u = parent[u]
            left.append(u)
        while depth[v] > depth[u]:
            v = parent[v]
            right.append(v)
        while u != v:
            u = parent[u]
            v = parent[v]
            left.append(u)
            right.append(v)
        right.pop()
        return left + right[::-1]

    def distance(self, u: int, v: int) -> int:
        return len(self.path(u, v)) - 1

    def embedding(self, subset: Iterable[str]) -> FrozenSet[int]:
        """Vertex set of the minimal subtree connecting ``subset`` (no suppression)."""
        subset = sorted(self._check_taxa(subset))
        if not subset:
            raise CardinalityError("embedding of an empty taxon set")
        first = self._leaves[subset[0]]
        verts = {first}
        for t in subset[1:]:
            verts.update(self.path(first, self._leaves[t]))
        return frozenset(verts)

    def restrict(self, subset: Iterable[str]) -> "UnrootedTree":
        """The tree ``T|subset``: minimal connecting subtree, degree-2 vertices suppressed."""
        subset = self._check_taxa(subset)
        if not subset:
            raise CardinalityError("restriction to an empty taxon set")
        keep = self.embedding(subset)
        adj = {v: {w for w in self._adj[v] if w in keep} for v in keep}
        labels = {v: lab for v, lab in self._labels.items() if lab in subset}
        _prune_and_suppress(adj, labels)
        return UnrootedTree(adj, labels)

    def delete_taxa(self, taxa: Iterable[str]) -> "UnrootedTree":
        return self.restrict(self.taxa - self._check_taxa(taxa))

    # -- quartets and cherries ----------------------------------------------

    @cached_property
    def _leaf_distance(self) -> Dict[Tuple[str, str], int]:
        out = {}
        for a in self._leaves:
            src = self._leaves[a]
            dist = {src: 0}
            queue = deque([src])
            while queue:
                u = queue.popleft()
                for w in self._adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            for b, v in self._leaves.items():
                out[a, b] = dist[v]
        return out

    def leaf_distance(self, a: str, b: str) -> int:
        return self._leaf_distance[a, b]

    def quartet(self, a: str, b: str, c: str, d: str) -> Quartet:
        """Topology induced on four taxa (four-point condition on edge counts)."""
        self._check_taxa((a, b, c, d))
        if len({a, b, c, d}) != 4:
            raise CardinalityError("quartet_topology needs four distinct taxa")
        dist = self._leaf_distance
        sums = [
            (dist[a, b] + dist[c, d], (a, b, c, d)),
            (dist[a, c] + dist[b, d], (a, c, b, d)),
            (dist[a, d] + dist[b, c], (a, d, b, c)),
        ]
        return Quartet.of(*min(sums)[1])

    def cherries(self) -> List[Tuple[str, str]]:
        """All unordered leaf pairs sharing a neighbour, as sorted tuples."""
        out = []
        if len(self._leaves) == 2:
            return [tuple(sorted(self._leaves))]
        for v, ns in self._adj.items():
            if v in self._labels:
                continue
            leaves = sorted(self._labels[w] for w in ns if w in self._labels)
            out.extend(itertools.combinations(leaves, 2))
        return sorted(out)

    # -- pendant subtrees ---------------------------------------------------

    def _side(self, u: int, v: int) -> List[int]:
        """Vertices on v's side of edge {u, v}, in preorder from v."""
        order, stack = [], [(v, u)]
        while stack:
            x, p = stack.pop()
            order.append(x)
            stack.extend((w, x) for w in self._adj[x] if w != p)
        return order

    def side_taxa(self, u: int, v: int) -> FrozenSet[str]:
        return frozenset(self._labels[x] for x in self._side(u, v) if x in self._labels)

    def rooted_shape(self, u: int, v: int) -> str:
        """Canonical string of the subtree hanging off edge {u, v} on v's side."""
        return self._subtree_newick(v, u)[1]

    @cached_property
    def pendant_sides(self) -> List[Tuple[FrozenSet[str], str, Tuple[int, int]]]:
        """``(taxa, rooted shape, (u, v))`` for every directed edge u -> v."""
        out = []
        for u, v in self.edges:
            for a, b in ((u, v), (v, u)):
                out.append((self.side_taxa(a, b), self.rooted_shape(a, b), (a, b)))
        return out

    # -- canonical form -----------------------------------------------------

    def _subtree_newick(self, v: int, parent: Optional[int]) -> Tuple[str, str]:
        """(smallest label, canonical Newick) of the subtree at v, away from parent."""
        order, stack = [], [(v, parent)]
        while stack:
            x, p = stack.pop()
            order.append((x, p))
            stack.extend((w, x) for w in self._adj[x] if w != p)
        done: Dict[int, Tuple[str, str]] = {}
        for x, p in reversed(order):
            if x in self._labels and (p is not None or len(self._adj[x]) == 0):
                done[x] = (self._labels[x], self._labels[x])
                continue
            kids = sorted(done[w] for w in self._adj[x] if w != p)
            if x in self._labels:
                kids.insert(0, (self._labels[x], self._labels[x]))
            done[x] = (kids[0][0], "(" + ",".join(s for _, s in kids) + ")")
        return done[v]

    @cached_property
    def canonical(self) -> str:
        """Canonical Newick string; equal strings iff isomorphic trees."""
        n = len(self._leaves)
        if n == 0:
            return ";"
        if n == 1:
            return next(iter(self._leaves)) + ";"
        if n == 2:
            a, b = sorted(self._leaves)
            return f"({a},{b});"
        smallest = min(self._leaves)
        root = self._adj[self._leaves[smallest]][0]
        return self._subtree_newick(root, None)[1] + ";"

    def __eq__(self, other):
        if not isinstance(other, UnrootedTree):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def __repr__(self):
        return f"UnrootedTree({self.canonical!r})"

    def __str__(self):
        return self.canonical

    # -- relabelling --------------------------------------------------------

    def relabel(self, mapping: Dict[str, str]) -> "UnrootedTree":
        labels = {v: mapping.get(lab, lab) for v, lab in self._labels.items()}
        return UnrootedTree(self._adj, labels)

    def replace_taxa(self, taxa: Iterable[str], new_label: str) -> "UnrootedTree":
        """Collapse the pendant subtree on ``taxa`` to a single leaf ``new_label``."""
        taxa = self._check_taxa(taxa)
        for side, _, (u, v) in self.pendant_sides:
            if side == taxa:
                adj = self.adjacency()
                labels = self.labels()
                for x in self._side(u, v):
                    for w in adj.pop(x):
                        if w in adj:
                            adj[w].discard(x)
                    labels.pop(x, None)
                adj[v] = {u}
                adj[u].add(v)
                labels[v] = new_label
                return UnrootedTree(adj, labels)
        raise ValueError(f"{sorted(taxa)} is not the leaf set of a pendant subtree")


def isomorphic(t1: UnrootedTree, t2: UnrootedTree) -> bool:
    return t1.canonical == t2.canonical


def validate(tree: UnrootedTree) -> Optional[str]:
    """Return ``None`` for a valid unrooted binary tree, else the first violated invariant."""
    adj = {v: tree.neighbors(v) for v in tree.vertices}
    if not adj:
        return "empty tree"
    seen_labels = set()
    for v in sorted(adj):
        lab = tree.label(v)
        if lab is None:
            continue
        if not lab:
            return "empty label"
        if lab in seen_labels:
            return "label bijection: duplicate label " + repr(lab)
        seen_labels.add(lab)
    for v, ns in adj.items():
        if v in ns or len(set(ns)) != len(ns):
            return "not simple"
        for w in ns:
            if w not in adj or v not in adj[w]:
                return "asymmetric adjacency"
    n_edges = sum(len(ns) for ns in adj.values()) // 2
    if n_edges != len(adj) - 1:
        return "not a tree: |E| != |V| - 1"
    start = next(iter(adj))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(adj):
        return "not connected"
    if len(adj) == 1:
        return None if tree.label(start) is not None else "label bijection: unlabeled single vertex"
    for v in sorted(adj):
        deg = len(adj[v])
        labelled = tree.label(v) is not None
        if deg == 1 and not labelled:
            return "label bijection: unlabeled leaf"
        if deg != 1 and labelled:
            return "label bijection: labeled internal vertex"
        if deg not in (1, 3):
            return "internal degree != 3"
    return None


def is_valid(tree: UnrootedTree) -> bool:
    return validate(tree) is None


# -- builders -----------------------------------------------------------------


def caterpillar(taxa: Sequence[str]) -> UnrootedTree:
    """Caterpillar with cherries ``{taxa[0], taxa[1]}`` and ``{taxa[-2], taxa[-1]}``."""
    taxa = list(taxa)
    n = len(taxa)
    if len(set(taxa)) != n:
        raise ValueError("duplicate taxa")
    if n == 1:
        return UnrootedTree.single(taxa[0])
    labels = {i: t for i, t in enumerate(taxa)}
    if n == 2:
        return UnrootedTree.from_edges([(0, 1)], labels)
    spine = list(range(n, 2 * n - 2))
    edges = list(zip(spine, spine[1:]))
    edges += [(0, spine[0]), (1, spine[0]), (n - 1, spine[-1])]
    edges += [(i, spine[i - 1]) for i in range(2, n - 1)]
    return UnrootedTree.from_edges(edges, labels)


def _insertion_tree(taxa: Sequence[str], choices: Sequence[int]) -> UnrootedTree:
    """Stepwise addition: taxon i+3 subdivides edge ``choices[i]`` of the current tree."""
    labels = {0: taxa[0], 1: taxa[1], 2: taxa[2]}
    edges = [(0, 3), (1, 3), (2, 3)]
    nxt = 4
    for t, idx in zip(taxa[3:], choices):
        u, v = edges[idx]
        leaf, mid = nxt, nxt + 1
        nxt += 2
        labels[leaf] = t
        edges[idx] = (u, mid)
        edges += [(mid, v), (mid, leaf)]
    return UnrootedTree.from_edges(edges, labels)


def enumerate_trees(taxa: Iterable[str]) -> Iterator[UnrootedTree]:
    """Yield every unrooted binary tree on ``taxa`` exactly once ((2n-5)!! trees)."""
    taxa = sorted(set(taxa))
    n = len(taxa)
    if n < 3:
        raise CardinalityError("enumerate_trees needs at least 3 taxa")
    ranges = [range(2 * k - 3) for k in range(3, n)]
    for choices in itertools.product(*ranges):
        yield _insertion_tree(taxa, choices)


def random_tree(taxa: Iterable[str], rng: random.Random) -> UnrootedTree:
    """Uniformly random unrooted binary tree, by random stepwise addition."""
    taxa = sorted(set(taxa))
    n = len(taxa)
    if n < 3:
        if n == 0:
            raise CardinalityError("random_tree needs at least one taxon")
        return caterpillar(taxa)
    order = taxa[:]
    rng.shuffle(order)
    choices = [rng.randrange(2 * k - 3) for k in range(3, n)]
    return _insertion_tree(order, choices)


def default_taxa(n: int) -> List[str]:
    """``a, b, ..., z, t26, t27, ...``: short labels for generated instances."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    return [letters[i] if i < 26 else f"t{i}" for i in range(n)]


def check_same_taxa(t1: UnrootedTree, t2: UnrootedTree) -> FrozenSet[str]:
    if t1.taxa != t2.taxa:
        raise TaxonSetMismatchError(
            f"trees differ on taxa {sorted(t1.taxa ^ t2.taxa)}"
        )
    return t1.taxa
