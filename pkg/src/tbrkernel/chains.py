"""Chains, common chains and common pendant subtrees of tree pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .errors import CardinalityError, UnknownTaxonError
from .tree import UnrootedTree, check_same_taxa


@dataclass(frozen=True)
class Chain:
    """An ordered leaf sequence that is a chain in one or more host trees.

    ``walks[i]`` is the parent walk p1..pn in the i-th host tree and
    ``pendant[i]`` records whether the chain is pendant there.
    """

    leaves: Tuple[str, ...]
    walks: Tuple[Tuple[int, ...], ...] = ()
    pendant: Tuple[bool, ...] = ()

    def __len__(self):
        return len(self.leaves)

    def __iter__(self):
        return iter(self.leaves)

    @property
    def taxa(self) -> FrozenSet[str]:
        return frozenset(self.leaves)

    @property
    def pendant_somewhere(self) -> bool:
        return any(self.pendant)

    @property
    def eligible(self) -> bool:
        """Length >= 3, or length 2 and pendant in at least one host tree."""
        return len(self.leaves) >= 3 or (len(self.leaves) == 2 and self.pendant_somewhere)

    def __str__(self):
        return "(" + ",".join(self.leaves) + ")"


def parent_walk(tree: UnrootedTree, seq: Sequence[str]) -> Optional[Tuple[int, ...]]:
    """The parent walk of ``seq`` if it is a chain of ``tree``, else ``None``.

    Consecutive parents must coincide or be adjacent; the only coincidences
    allowed are p1 = p2 and p(n-1) = pn.
    """
    if len(set(seq)) != len(seq) or not seq:
        return None
    try:
        ps = tuple(tree.parent(t) for t in seq)
    except (UnknownTaxonError, CardinalityError):
        return None
    n = len(ps)
    for i in range(n - 1):
        if ps[i] != ps[i + 1] and ps[i + 1] not in tree.neighbors(ps[i]):
            return None
    for i in range(n):
        for j in range(i + 1, n):
            if ps[i] == ps[j] and not (j == i + 1 and (i == 0 or j == n - 1)):
                return None
    return ps


def is_pendant_walk(walk: Sequence[int]) -> bool:
    return len(walk) >= 2 and (walk[0] == walk[1] or walk[-2] == walk[-1])


def chain_in(tree: UnrootedTree, seq: Sequence[str]) -> Optional[Chain]:
    walk = parent_walk(tree, seq)
    if walk is None:
        return None
    return Chain(tuple(seq), (walk,), (is_pendant_walk(walk),))


def is_common_chain(t1: UnrootedTree, t2: UnrootedTree, seq: Sequence[str]) -> bool:
    return parent_walk(t1, seq) is not None and parent_walk(t2, seq) is not None


def common_chain(t1: UnrootedTree, t2: UnrootedTree, seq: Sequence[str]) -> Optional[Chain]:
    w1 = parent_walk(t1, seq)
    w2 = parent_walk(t2, seq) if w1 is not None else None
    if w2 is None:
        return None
    return Chain(tuple(seq), (w1, w2), (is_pendant_walk(w1), is_pendant_walk(w2)))


def _successors(tree: UnrootedTree, taxon: str) -> List[str]:
    """Leaves whose parent equals or neighbours the parent of ``taxon``."""
    p = tree.parent(taxon)
    out = []
    for q in (p,) + tree.neighbors(p):
        for w in tree.neighbors(q):
            lab = tree.label(w)
            if lab is not None and lab != taxon:
                out.append(lab)
    return sorted(out)


def _extend_all(trees: Sequence[UnrootedTree], seq: Tuple[str, ...]) -> Iterator[Tuple[str, ...]]:
    for x in _successors(trees[0], seq[-1]):
        cand = seq + (x,)
        if all(parent_walk(t, cand) is not None for t in trees):
            yield cand


def iter_chains(trees: Sequence[UnrootedTree], length: Optional[int] = None,
                min_length: int = 2) -> Iterator[Tuple[str, ...]]:
    """All leaf sequences (both orientations) that are chains of every tree in ``trees``."""
    if trees[0].n_taxa < 2:
        return
    stack = [(t,) for t in sorted(trees[0].taxa, reverse=True)]
    while stack:
        seq = stack.pop()
        n = len(seq)
        if n >= min_length and (length is None or n == length):
            yield seq
        if length is not None and n >= length:
            continue
        stack.extend(sorted(_extend_all(trees, seq), reverse=True))


def canonical_orientation(seq: Sequence[str]) -> Tuple[str, ...]:
    seq = tuple(seq)
    return seq if seq[0] <= seq[-1] else seq[::-1]


def common_chains(t1: UnrootedTree, t2: UnrootedTree, length: Optional[int] = None,
                  min_length: int = 2) -> List[Chain]:
    """Every common chain (canonical orientation, deduplicated as sequences)."""
    check_same_taxa(t1, t2)
    seen = sorted({canonical_orientation(s) for s in iter_chains((t1, t2), length, min_length)})
    return [common_chain(t1, t2, s) for s in seen]


def find_maximal_common_chains(t1: UnrootedTree, t2: UnrootedTree) -> List[Chain]:
    """Maximal common chains of length >= 2, one per leaf set.

    A chain is maximal when neither end can be extended by another leaf.
    Chains that differ only by the order of a cherry at an end share a leaf
    set; the lexicographically smallest canonical sequence represents them.
    """
    check_same_taxa(t1, t2)
    trees = (t1, t2)
    best = {}
    for seq in iter_chains(trees, min_length=2):
        if any(True for _ in _extend_all(trees, seq)):
            continue
        if any(True for _ in _extend_all(trees, seq[::-1])):
            continue
        seq = canonical_orientation(seq)
        key = frozenset(seq)
        if key not in best or seq < best[key]:
            best[key] = seq
    return [common_chain(t1, t2, s) for s in sorted(best.values())]


def chains_of(tree: UnrootedTree, length: Optional[int] = None, min_length: int = 2) -> List[Chain]:
    seqs = sorted({canonical_orientation(s) for s in iter_chains((tree,), length, min_length)})
    return [chain_in(tree, s) for s in seqs]


def find_common_pendant_subtrees(t1: UnrootedTree, t2: UnrootedTree) -> List[FrozenSet[str]]:
    """Maximal leaf sets S, 2 <= |S| <= n - 2, hanging off an edge in both trees
    with equal rooted shape."""
    taxa = check_same_taxa(t1, t2)
    n = len(taxa)

    def sides(tree):
        return {s: shape for s, shape, _ in tree.pendant_sides if 2 <= len(s) <= n - 2}

    s1, s2 = sides(t1), sides(t2)
    common = [s for s, shape in s1.items() if s2.get(s) == shape]
    maximal = [s for s in common if not any(s < o for o in common)]
    return sorted(maximal, key=lambda s: (sorted(s), len(s)))


def eligible_common_chains(t1: UnrootedTree, t2: UnrootedTree) -> List[Chain]:
    """Common chains of length >= 3, plus common 2-chains pendant in some tree;
    one representative per leaf set."""
    best = {}
    for ch in common_chains(t1, t2):
        if ch.eligible and ch.taxa not in best:
            best[ch.taxa] = ch
    return list(best.values())
