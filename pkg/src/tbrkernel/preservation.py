"""Turning a maximum agreement forest into one that keeps given chains whole.

A chain C that is split by a forest F is repaired by one local rewrite of F,
chosen by how the components of F sit relative to C:

* inside-outside component: meets C and also holds taxa outside C;
* bypass component (in T): misses C but has taxa on both sides of C in T.

The sides of a chain that is not pendant in T are the two taxon sets left
after deleting the chain leaves and their parents from T.  Every rewrite is
checked on the spot: the result must be an agreement forest of the same size
that still preserves every chain that was preserved before.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .chains import Chain, common_chain, is_pendant_walk, parent_walk
from .errors import BudgetExceeded, IneligibleChainError, NotMaximumError
from .forest import AgreementForest, is_agreement_forest, preserves
from .search import maf_search
from .tree import UnrootedTree, check_same_taxa

Sides = Optional[Tuple[FrozenSet[str], FrozenSet[str]]]


def chain_sides(tree: UnrootedTree, seq: Sequence[str]) -> Sides:
    """(L, R) for a chain of ``tree``, or None when the chain is pendant in it."""
    walk = parent_walk(tree, seq)
    if walk is None:
        raise IneligibleChainError(f"({','.join(seq)}) is not a chain of the tree")
    if is_pendant_walk(walk):
        return None
    removed = set(walk) | {tree.leaf(x) for x in seq}
    out = []
    for end in (walk[0], walk[-1]):
        (start,) = [w for w in tree.neighbors(end) if w not in removed]
        seen, stack = {start}, [start]
        while stack:
            v = stack.pop()
            for w in tree.neighbors(v):
                if w not in seen and w not in removed:
                    seen.add(w)
                    stack.append(w)
        out.append(frozenset(tree.label(v) for v in seen if tree.is_leaf(v)))
    return out[0], out[1]


@dataclass(frozen=True)
class ComponentFlags:
    inside_outside: bool
    bypass_t1: bool
    bypass_t2: bool
    straddles_t1: bool
    straddles_t2: bool

    @property
    def bypass(self) -> bool:
        return self.bypass_t1 or self.bypass_t2


@dataclass
class ComponentTaxonomy:
    chain: Tuple[str, ...]
    sides: Tuple[Sides, Sides]
    flags: Dict[FrozenSet[str], ComponentFlags]
    atomized: bool

    @property
    def taxa(self) -> FrozenSet[str]:
        return frozenset(self.chain)

    @property
    def pendant(self) -> Tuple[bool, bool]:
        return self.sides[0] is None, self.sides[1] is None

    def touching(self) -> List[FrozenSet[str]]:
        return [b for b in self.flags if b & self.taxa]

    def inside_outside(self) -> List[FrozenSet[str]]:
        return [b for b, f in self.flags.items() if f.inside_outside]

    def bypass(self) -> List[FrozenSet[str]]:
        return [b for b, f in self.flags.items() if f.bypass]

    def observation_violations(self) -> List[str]:
        """Which of the structural facts (a)-(e) about a split chain fail."""
        out = []
        byp = self.bypass()
        in_t1 = [b for b in byp if self.flags[b].bypass_t1]
        in_t2 = [b for b in byp if self.flags[b].bypass_t2]
        both = [b for b in byp if self.flags[b].bypass_t1 and self.flags[b].bypass_t2]
        if len(byp) > 2 or len(in_t1) > 1 or len(in_t2) > 1 or (both and len(byp) > 1):
            out.append("(a) too many bypass components")
        if byp and not self.atomized:
            out.append("(b) bypass component but chain not atomized")
        if byp and self.inside_outside():
            out.append("(c) bypass and inside-outside components together")
        for b in self.touching():
            if not self.flags[b].inside_outside and not b <= self.taxa:
                out.append("(d) component meets the chain without being inside-outside")
        if any(self.pendant) and (len(byp) > 1 or len(self.inside_outside()) > 1):
            out.append("(e) pendant chain with two bypass or inside-outside components")
        return out


def _straddles(b: FrozenSet[str], sides: Sides) -> bool:
    return sides is not None and bool(b & sides[0]) and bool(b & sides[1])


def classify_components(t1: UnrootedTree, t2: UnrootedTree, forest: AgreementForest,
                        chain) -> ComponentTaxonomy:
    seq = tuple(chain.leaves if isinstance(chain, Chain) else chain)
    c = frozenset(seq)
    sides = (chain_sides(t1, seq), chain_sides(t2, seq))
    flags = {}
    for b in forest.components:
        s1, s2 = _straddles(b, sides[0]), _straddles(b, sides[1])
        meets = bool(b & c)
        flags[b] = ComponentFlags(
            inside_outside=meets and not b <= c,
            bypass_t1=not meets and s1,
            bypass_t2=not meets and s2,
            straddles_t1=s1,
            straddles_t2=s2,
        )
    atomized = all(frozenset([x]) in flags for x in c)
    return ComponentTaxonomy(seq, sides, flags, atomized)


# -- the rewrite -------------------------------------------------------------------


class _Rewrite:
    def __init__(self, comps: Iterable[FrozenSet[str]]):
        self.comps = set(comps)

    def remove(self, b):
        self.comps.remove(b)

    def add(self, b):
        if b:
            self.comps.add(frozenset(b))

    def drop_subsets_of(self, c):
        self.comps = {b for b in self.comps if not b <= c}


def _not_maximum(why: str):
    raise NotMaximumError(f"forest is not maximum: {why}")


def _four_way(b, s1: Tuple, s2: Tuple) -> List[FrozenSet[str]]:
    parts = [b & x & y for x in s1 for y in s2]
    nonempty = [p for p in parts if p]
    if len(nonempty) > 3:
        raise AssertionError("bypass component splits into four nonempty parts")
    return nonempty


def _repair(tax: ComponentTaxonomy, comps: Iterable[FrozenSet[str]]) -> List[FrozenSet[str]]:
    """One rewrite making ``tax.chain`` preserved."""
    c = tax.taxa
    out = _Rewrite(comps)
    byp = tax.bypass()
    io = tax.inside_outside()
    s1, s2 = tax.sides

    if byp:
        # split the bypass component(s), then gather the atomized chain
        for b in byp:
            f = tax.flags[b]
            out.remove(b)
            if f.bypass_t1 and f.bypass_t2:
                for part in _four_way(b, s1, s2):
                    out.add(part)
            else:
                side = s1 if f.bypass_t1 else s2
                out.add(b & side[0])
                out.add(b & side[1])
        for x in c:
            out.remove(frozenset([x]))
        out.add(c)
        return list(out.comps)

    if not io:
        _not_maximum(f"chain ({','.join(tax.chain)}) lies in several components with no outside taxa")
    if len(io) > 1:
        _not_maximum(f"chain ({','.join(tax.chain)}) meets two inside-outside components")
    (b1,) = io
    f = tax.flags[b1]
    inside = b1 & c
    if len(inside) >= 2:
        if f.straddles_t1 or f.straddles_t2:
            _not_maximum("the inside-outside component straddles the chain")
        out.remove(b1)
        out.add(b1 - c)
        out.drop_subsets_of(c)
        out.add(c)
        return list(out.comps)

    (x,) = inside
    side = s1 if f.straddles_t1 else s2 if f.straddles_t2 else None
    if side is None:
        out.remove(b1)
        out.add(b1 - c)
        out.drop_subsets_of(c)
        out.add(c)
        return list(out.comps)
    rest = b1 - c
    out.remove(b1)
    if len(c) == 2:
        (y,) = c - {x}
        out.remove(frozenset([y]))
        out.add((rest & side[0]) | c)
        out.add(rest & side[1])
        return list(out.comps)
    for z in c - {x}:
        out.remove(frozenset([z]))
    out.add(rest & side[0])
    out.add(rest & side[1])
    out.add(c)
    return list(out.comps)


def _check_chains(t1: UnrootedTree, t2: UnrootedTree, chains) -> List[Tuple[str, ...]]:
    seqs = []
    for ch in chains:
        seq = tuple(ch.leaves if isinstance(ch, Chain) else ch)
        found = common_chain(t1, t2, seq)
        if found is None:
            raise IneligibleChainError(f"({','.join(seq)}) is not a common chain")
        if not found.eligible:
            raise IneligibleChainError(
                f"({','.join(seq)}) is a 2-chain that is pendant in neither tree")
        seqs.append(seq)
    for a, b in itertools.combinations(seqs, 2):
        if set(a) & set(b):
            raise IneligibleChainError(f"chains ({','.join(a)}) and ({','.join(b)}) share taxa")
    return sorted(seqs, key=lambda s: (min(s[0], s[-1]), s))


def enforce_chain_preservation(t1: UnrootedTree, t2: UnrootedTree, chains,
                               forest: AgreementForest, check_maximum: bool = True) -> AgreementForest:
    """A maximum agreement forest of the same size as ``forest`` in which every
    chain of ``chains`` is preserved.

    ``chains`` must be mutually taxon-disjoint eligible common chains (length
    at least 3, or length 2 and pendant in at least one tree).  With
    ``check_maximum`` the input is first confirmed to be maximum with the
    exact solver.
    """
    check_same_taxa(t1, t2)
    seqs = _check_chains(t1, t2, chains)
    check = is_agreement_forest(t1, t2, forest)
    if not check:
        raise ValueError(f"not an agreement forest: {check.violation}")
    size = forest.size
    if check_maximum and size >= 2:
        try:
            maf_search(t1, t2, size - 2)
        except BudgetExceeded:
            pass
        else:
            _not_maximum(f"a forest with fewer than {size} components exists")
    current = forest
    for _ in range(len(seqs) * 4 + 1):
        pending = [s for s in seqs if not preserves(current, s)]
        if not pending:
            return current
        seq = pending[0]
        kept = [s for s in seqs if preserves(current, s)]
        tax = classify_components(t1, t2, current, seq)
        problems = tax.observation_violations()
        if problems:
            raise AssertionError(f"chain ({','.join(seq)}): {'; '.join(problems)}")
        new = AgreementForest(_repair(tax, current.components))
        check = is_agreement_forest(t1, t2, new)
        if not check:
            raise AssertionError(f"rewrite for ({','.join(seq)}) broke the forest: {check.violation}")
        if new.size < size:
            _not_maximum(f"rewrite produced {new.size} < {size} components")
        if new.size > size:
            raise AssertionError(f"rewrite grew the forest from {size} to {new.size}")
        lost = [s for s in kept if not preserves(new, s)]
        if lost or not preserves(new, seq):
            raise AssertionError(f"rewrite for ({','.join(seq)}) split another chain")
        current = new
    raise AssertionError("chain preservation did not converge")
