"""Unrooted phylogenetic networks, display testing, generators, and a family
of pairs meeting the kernel bound with equality.

Networks are multigraphs kept as an edge list, so parallel edges and loops
(which only occur in generators) have stable edge ids.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import NetworkError, TaxonSetMismatchError, TooLargeError
from .tree import UnrootedTree, _prune_and_suppress

DISPLAY_MAX_R = 6

Edge = Tuple[int, int]


@dataclass
class UnrootedNetwork:
    """A connected multigraph whose degree-1 vertices carry taxon labels."""

    edges: List[Edge]
    labels: Dict[int, str]
    extra_vertices: Tuple[int, ...] = ()

    @classmethod
    def from_tree(cls, tree: UnrootedTree) -> "UnrootedNetwork":
        return cls(list(tree.edges), tree.labels(), tuple(tree.vertices) if tree.n_taxa == 1 else ())

    @property
    def vertices(self) -> List[int]:
        vs = set(self.extra_vertices) | set(self.labels)
        for u, v in self.edges:
            vs.add(u)
            vs.add(v)
        return sorted(vs)

    @property
    def taxa(self) -> frozenset:
        return frozenset(self.labels.values())

    def degree(self) -> Dict[int, int]:
        deg = {v: 0 for v in self.vertices}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        return nx.is_connected(self.graph()) if self.vertices else False

    def validate(self) -> Optional[str]:
        if not self.is_connected():
            return "disconnected"
        pairs = [frozenset(e) for e in self.edges]
        if any(len(p) == 1 for p in pairs) or len(set(pairs)) != len(pairs):
            return "not a simple graph"
        for v, d in self.degree().items():
            if v in self.labels and d != 1 and len(self.vertices) > 1:
                return f"leaf {self.labels[v]!r} has degree {d}"
            if v not in self.labels and d != 3:
                return f"internal vertex {v} has degree {d}"
        if len(set(self.labels.values())) != len(self.labels):
            return "duplicate label"
        return None

    def to_text(self) -> str:
        lines = [f"{u} {v}" for u, v in self.edges]
        lines += [f"{v} LABEL={lab}" for v, lab in sorted(self.labels.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "UnrootedNetwork":
        edges, labels = [], {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) == 2 and parts[1].startswith("LABEL="):
                labels[int(parts[0])] = parts[1][len("LABEL="):]
            elif len(parts) == 2:
                edges.append((int(parts[0]), int(parts[1])))
            else:
                raise NetworkError(f"cannot parse network line {raw!r}")
        return cls(edges, labels)


def reticulation_number(net: UnrootedNetwork) -> int:
    if not net.is_connected():
        raise NetworkError("network is disconnected")
    return len(net.edges) - len(net.vertices) + 1


def add_reticulation(net: UnrootedNetwork, e1: int, e2: int) -> UnrootedNetwork:
    """Subdivide edges ``e1`` and ``e2`` (by index) and join the new vertices."""
    if e1 == e2:
        raise NetworkError("need two distinct edges")
    nxt = max(net.vertices) + 1
    a, b = nxt, nxt + 1
    edges = [e for i, e in enumerate(net.edges) if i not in (e1, e2)]
    for e, m in ((net.edges[e1], a), (net.edges[e2], b)):
        edges += [(e[0], m), (m, e[1])]
    edges.append((a, b))
    return UnrootedNetwork(edges, dict(net.labels))


def _tree_from_edges(edges: Iterable[Edge], labels: Dict[int, str]) -> Optional[UnrootedTree]:
    adj: Dict[int, set] = {}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    for v in labels:
        adj.setdefault(v, set())
    _prune_and_suppress(adj, labels)
    return UnrootedTree(adj, labels)


def _bridges(net: UnrootedNetwork) -> set:
    g = nx.MultiGraph()
    g.add_nodes_from(net.vertices)
    for i, (u, v) in enumerate(net.edges):
        g.add_edge(u, v, key=i)
    out = set()
    for u, v in nx.bridges(nx.Graph(g)):
        if g.number_of_edges(u, v) == 1:
            out.add(next(iter(g[u][v])))
    return out


def displayed_trees(net: UnrootedNetwork) -> Iterable[UnrootedTree]:
    """Trees obtained from spanning trees of ``net`` (with repeats)."""
    r = reticulation_number(net)
    if r > DISPLAY_MAX_R:
        raise TooLargeError(f"display search is limited to r <= {DISPLAY_MAX_R}, got {r}")
    vertices = net.vertices
    bridges = _bridges(net)
    candidates = [i for i, (u, v) in enumerate(net.edges) if i not in bridges]
    for drop in itertools.combinations(candidates, r):
        dropped = set(drop)
        kept = [e for i, e in enumerate(net.edges) if i not in dropped]
        uf = {v: v for v in vertices}

        def find(x):
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        ok = True
        for u, v in kept:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            uf[ru] = rv
        if ok:
            yield _tree_from_edges(kept, net.labels)


def displays(net: UnrootedNetwork, tree: UnrootedTree) -> bool:
    """Whether some spanning tree of ``net``, once unlabeled leaves are pruned
    and degree-2 vertices suppressed, equals ``tree``."""
    if net.taxa != tree.taxa:
        raise TaxonSetMismatchError("network and tree have different taxa")
    target = tree.canonical
    return any(t.canonical == target for t in displayed_trees(net))


def hu_upper_bound_check(net: UnrootedNetwork, t1: UnrootedTree, t2: UnrootedTree) -> bool:
    """True iff ``net`` displays both trees and r(net) >= their TBR distance."""
    from .tbr import tbr_distance

    if not (displays(net, t1) and displays(net, t2)):
        return False
    return reticulation_number(net) >= tbr_distance(t1, t2).distance


# -- generators ------------------------------------------------------------------


@dataclass
class Generator:
    """A connected cubic multigraph; its edges are the sides."""

    sides: List[Edge]

    @property
    def vertices(self) -> List[int]:
        return sorted({x for e in self.sides for x in e})

    @property
    def k(self) -> int:
        return len(self.sides) - len(self.vertices) + 1

    def validate(self) -> Optional[str]:
        deg = {v: 0 for v in self.vertices}
        for u, v in self.sides:
            deg[u] += 1
            deg[v] += 1
        bad = [v for v, d in deg.items() if d != 3]
        if bad:
            return f"vertex {bad[0]} has degree {deg[bad[0]]}"
        g = nx.MultiGraph()
        g.add_edges_from(self.sides)
        if not nx.is_connected(g):
            return "disconnected"
        if self.k < 2:
            return "k < 2"
        return None

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.sides)
        return g

    def isomorphic(self, other: "Generator") -> bool:
        return nx.is_isomorphic(self.graph(), other.graph())


@dataclass
class GeneratorDecomposition:
    """A generator plus, for every side, the leaves attached to it (listed from
    the side's first endpoint to its second)."""

    generator: Generator
    attachments: List[Tuple[str, ...]] = field(default_factory=list)


def extract_generator(net: UnrootedNetwork) -> GeneratorDecomposition:
    """Delete leaves and suppress degree-2 vertices until a cubic multigraph remains."""
    r = reticulation_number(net)
    if r < 2:
        raise NetworkError(f"a generator needs r >= 2, got {r}")
    adj: Dict[int, List[Tuple[int, int]]] = {v: [] for v in net.vertices}
    for i, (u, v) in enumerate(net.edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    # the 2-core: peel degree-1 vertices
    alive = set(adj)
    deg = {v: len(adj[v]) for v in adj}
    stack = [v for v in adj if deg[v] <= 1]
    removed_leaf_of: Dict[int, int] = {}
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w, _ in adj[v]:
            if w in alive:
                deg[w] -= 1
                removed_leaf_of.setdefault(w, v)
                if deg[w] <= 1:
                    stack.append(w)
    for v, leaf in removed_leaf_of.items():
        if v in alive and leaf not in net.labels:
            raise NetworkError("network has a pendant subtree with two or more leaves")
    core_edges = {i for i, (u, v) in enumerate(net.edges) if u in alive and v in alive}
    branch = sorted(v for v in alive if deg[v] == 3)
    if not branch:
        raise NetworkError("core is a single cycle")
    sides, attachments = [], []
    used = set()
    for start in branch:
        for w, i in adj[start]:
            if i not in core_edges or i in used:
                continue
            used.add(i)
            leaves, cur = [], w
            while deg[cur] == 2:
                leaves.append(net.labels[removed_leaf_of[cur]])
                (nxt, j), = [(x, j) for x, j in adj[cur] if j in core_edges and j not in used]
                used.add(j)
                cur = nxt
            sides.append((start, cur))
            attachments.append(tuple(leaves))
    index = {v: i for i, v in enumerate(branch)}
    gen = Generator([(index[u], index[v]) for u, v in sides])
    return GeneratorDecomposition(gen, attachments)


def _attach(gen: Generator, attachments: Sequence[Sequence[str]]) -> Tuple[UnrootedNetwork, List[List[int]]]:
    if len(attachments) != len(gen.sides):
        raise NetworkError("one leaf list per side is required")
    nxt = max(gen.vertices) + 1
    edges: List[Edge] = []
    labels: Dict[int, str] = {}
    paths: List[List[int]] = []
    for (u, v), leaves in zip(gen.sides, attachments):
        prev, path = u, []
        for lab in leaves:
            mid, leaf = nxt, nxt + 1
            nxt += 2
            path.append(len(edges))
            edges += [(prev, mid), (mid, leaf)]
            labels[leaf] = lab
            prev = mid
        path.append(len(edges))
        edges.append((prev, v))
        paths.append(path)
    net = UnrootedNetwork(edges, labels)
    problem = net.validate()
    if problem is not None:
        raise NetworkError(f"attachment does not give a phylogenetic network: {problem}")
    return net, paths


def attach(gen: Generator, attachments: Sequence[Sequence[str]]) -> UnrootedNetwork:
    """Subdivide each side once per leaf and hang the leaves, in order."""
    return _attach(gen, attachments)[0]


# -- tight family ----------------------------------------------------------------


def necklace_generator(k: int) -> Generator:
    """k-1 digons joined in a cycle: vertices x_i = 2i and y_i = 2i+1, sides
    x_i=y_i (twice) and y_i-x_{i+1}.  Has 2(k-1) vertices and 3(k-1) sides."""
    if k < 3:
        raise NetworkError("the necklace needs k >= 3")
    d = k - 1
    sides: List[Edge] = []
    for i in range(d):
        x, y = 2 * i, 2 * i + 1
        sides += [(x, y), (x, y), (y, 2 * ((i + 1) % d))]
    return Generator(sides)


@dataclass
class TightFamily:
    k: int
    generator: Generator
    attachments: List[Tuple[str, ...]]
    network: UnrootedNetwork
    # per side: "T" or "T'" if that tree's spanning tree misses an edge of the side
    breakpoints: List[Optional[str]]
    t1: UnrootedTree
    t2: UnrootedTree


def tight_family_instance(k: int, a_block: int = 1) -> TightFamily:
    """The pair built on the necklace generator.

    In each digon the first parallel side is cut in T and the second in T';
    the cycle side leaving digon 0 is cut in T and the one leaving digon 1 in
    T'.  Cut sides carry an A block of ``a_block`` leaves, then the cut, then a
    B block of 3 leaves; the other k-3 sides carry 3 leaves.  With
    ``a_block=1`` there are 11k-9 taxa.  With ``a_block=3`` there are 15k-9,
    and (3,3)-reductions bring the pair back to the ``a_block=1`` shape.
    """
    if k < 4:
        raise NetworkError("the tight family needs k >= 4")
    if a_block not in (1, 3):
        raise ValueError("a_block must be 1 or 3")
    gen = necklace_generator(k)
    breaks: List[Optional[str]] = []
    attachments: List[Tuple[str, ...]] = []
    for j in range(len(gen.sides)):
        digon, pos = divmod(j, 3)
        if pos < 2:
            kind = "T" if pos == 0 else "T'"
        else:
            kind = {0: "T", 1: "T'"}.get(digon)
        breaks.append(kind)
        if kind is None:
            attachments.append(tuple(f"Z{j}{c}" for c in "abc"))
        else:
            a = (f"A{j}",) if a_block == 1 else tuple(f"A{j}{c}" for c in "abc")
            attachments.append(a + tuple(f"B{j}{c}" for c in "abc"))
    net, paths = _attach(gen, attachments)
    trees = []
    for which in ("T", "T'"):
        drop = {paths[j][a_block] for j, kind in enumerate(breaks) if kind == which}
        kept = [e for i, e in enumerate(net.edges) if i not in drop]
        trees.append(_tree_from_edges(kept, net.labels))
    return TightFamily(k, gen, attachments, net, breaks, trees[0], trees[1])


def tight_family(k: int) -> Tuple[UnrootedTree, UnrootedTree]:
    """Exhaustively reduced pair on 11k-9 taxa at TBR distance k."""
    inst = tight_family_instance(k)
    return inst.t1, inst.t2
