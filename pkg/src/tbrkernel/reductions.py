"""Distance-preserving and distance-lowering reduction rules for tree pairs.

Every matcher takes a pair of trees on the same taxa and returns either
``None`` (no match) or ``(t1_reduced, t2_reduced, step)``.  Matchers for the
five chain/cherry rules try both tree orders, since the distance is
symmetric, and return the first match in canonical taxon order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .chains import find_common_pendant_subtrees, find_maximal_common_chains, iter_chains, parent_walk
from .errors import CardinalityError
from .tree import UnrootedTree, check_same_taxa

MIN_TAXA = 4
FRESH_PREFIX = "_s"


class RuleKind(enum.Enum):
    SUBTREE = "Subtree"
    CHAIN = "Chain"
    STAR3STAR = "Star3Star"
    THREE_ONE_STAR = "ThreeOneStar"
    TWO_ONE_TWO = "TwoOneTwo"
    THREE_THREE = "ThreeThree"
    THREE_TWO = "ThreeTwo"

    @property
    def offset(self) -> int:
        return 1 if self in _LOWERING else 0


_LOWERING = {RuleKind.STAR3STAR, RuleKind.THREE_ONE_STAR, RuleKind.TWO_ONE_TWO}


@dataclass(frozen=True)
class ReductionStep:
    rule: RuleKind
    witness: Tuple[Tuple[str, ...], ...]
    removed: Tuple[str, ...]
    new_label: Optional[str] = None

    @property
    def offset(self) -> int:
        return self.rule.offset

    def to_line(self) -> str:
        parts = []
        for w in self.witness:
            parts.append("(" + ",".join(w) + ")" if len(w) > 1 else w[0])
        witness = ";".join(parts)
        if self.new_label is not None:
            witness += "->" + self.new_label
        removed = ",".join(self.removed) or "-"
        return f"RULE {self.rule.value} witness={witness} removed={removed} offset={self.offset}"

    def apply(self, t1: UnrootedTree, t2: UnrootedTree) -> Tuple[UnrootedTree, UnrootedTree]:
        """Replay this step on a pair."""
        if self.rule is RuleKind.SUBTREE:
            return (t1.replace_taxa(self.removed, self.new_label),
                    t2.replace_taxa(self.removed, self.new_label))
        return t1.delete_taxa(self.removed), t2.delete_taxa(self.removed)


@dataclass
class ReductionTrace:
    steps: List[ReductionStep] = field(default_factory=list)
    label_map: Dict[str, FrozenSet[str]] = field(default_factory=dict)

    @property
    def total_offset(self) -> int:
        return sum(s.offset for s in self.steps)

    def append(self, step: ReductionStep) -> None:
        self.steps.append(step)
        if step.rule is RuleKind.SUBTREE:
            original = frozenset().union(
                *(self.label_map.get(t, frozenset([t])) for t in step.removed))
            self.label_map[step.new_label] = original

    def replay(self, t1: UnrootedTree, t2: UnrootedTree) -> Tuple[UnrootedTree, UnrootedTree]:
        for step in self.steps:
            t1, t2 = step.apply(t1, t2)
        return t1, t2

    def counts(self) -> Dict[RuleKind, int]:
        out = {k: 0 for k in RuleKind}
        for s in self.steps:
            out[s.rule] += 1
        return out

    def to_text(self) -> str:
        return "".join(s.to_line() + "\n" for s in self.steps)


Match = Optional[Tuple[UnrootedTree, UnrootedTree, ReductionStep]]


def _fresh_label(taxa) -> str:
    i = 1
    while f"{FRESH_PREFIX}{i}" in taxa:
        i += 1
    return f"{FRESH_PREFIX}{i}"


def _delete(t1, t2, rule, witness, removed) -> Match:
    removed = tuple(sorted(removed))
    step = ReductionStep(rule, tuple(tuple(w) for w in witness), removed)
    return t1.delete_taxa(removed), t2.delete_taxa(removed), step


def _cherries(tree: UnrootedTree):
    return {frozenset(p) for p in tree.cherries()}


def _orders(t1, t2):
    """(T, T', swapped) for both role assignments."""
    return ((t1, t2, False), (t2, t1, True))


# -- subtree and chain reductions ----------------------------------------------


def apply_subtree_reduction(t1: UnrootedTree, t2: UnrootedTree, new_label: Optional[str] = None) -> Match:
    """Replace the first maximal common pendant subtree by a fresh leaf."""
    taxa = check_same_taxa(t1, t2)
    subtrees = find_common_pendant_subtrees(t1, t2)
    if not subtrees:
        return None
    s = subtrees[0]
    label = new_label or _fresh_label(taxa)
    removed = tuple(sorted(s))
    step = ReductionStep(RuleKind.SUBTREE, (removed,), removed, label)
    return t1.replace_taxa(s, label), t2.replace_taxa(s, label), step


def apply_chain_reduction(t1: UnrootedTree, t2: UnrootedTree) -> Match:
    """Truncate the first maximal common chain of length >= 4 to its first three leaves."""
    check_same_taxa(t1, t2)
    for chain in find_maximal_common_chains(t1, t2):
        if len(chain) >= 4:
            return _delete(t1, t2, RuleKind.CHAIN, [chain.leaves], chain.leaves[3:])
    return None


# -- the five chain/cherry rules -------------------------------------------------


def _room(t1: UnrootedTree, k: int) -> bool:
    return t1.n_taxa - k >= MIN_TAXA


def apply_star3star(t1: UnrootedTree, t2: UnrootedTree) -> Match:
    """Common 3-chain (a,b,c), cherry {b,c} in T and {a,b} in T': delete a, b, c."""
    check_same_taxa(t1, t2)
    if not _room(t1, 3):
        return None
    for T, Tp, _ in _orders(t1, t2):
        cT, cTp = _cherries(T), _cherries(Tp)
        for a, b, c in iter_chains((t1, t2), length=3):
            if frozenset((b, c)) in cT and frozenset((a, b)) in cTp:
                return _delete(t1, t2, RuleKind.STAR3STAR, [(a, b, c)], (a, b, c))
    return None


def apply_31star(t1: UnrootedTree, t2: UnrootedTree) -> Match:
    """Common 3-chain (a,b,c), cherry {b,c} in T' and {c,x} in T with x outside
    the chain: delete x."""
    check_same_taxa(t1, t2)
    if not _room(t1, 1):
        return None
    for T, Tp, _ in _orders(t1, t2):
        cT, cTp = _cherries(T), _cherries(Tp)
        for a, b, c in iter_chains((t1, t2), length=3):
            if frozenset((b, c)) not in cTp:
                continue
            for pair in sorted(cT, key=sorted):
                if c in pair:
                    (x,) = pair - {c}
                    if x not in (a, b):
                        return _delete(t1, t2, RuleKind.THREE_ONE_STAR, [(a, b, c), (x,)], (x,))
    return None


def apply_212(t1: UnrootedTree, t2: UnrootedTree) -> Match:
    """Common 2-chains (a,b), (c,d); T has cherries {b,x}, {c,d}; T' has cherries
    {a,b}, {d,x}: delete x."""
    taxa = check_same_taxa(t1, t2)
    if not _room(t1, 1):
        return None
    for T, Tp, _ in _orders(t1, t2):
        cT, cTp = _cherries(T), _cherries(Tp)

        def partners(cherries, y):
            return sorted(next(iter(p - {y})) for p in cherries if y in p)

        for x in sorted(taxa):
            for b in partners(cT, x):
                for a in partners(cTp, b):
                    if a == x or parent_walk(T, (a, b)) is None:
                        continue
                    for d in partners(cTp, x):
                        if d in (a, b):
                            continue
                        for c in partners(cT, d):
                            if c in (a, b, x) or parent_walk(Tp, (c, d)) is None:
                                continue
                            return _delete(t1, t2, RuleKind.TWO_ONE_TWO, [(a, b), (c, d), (x,)], (x,))
    return None


def _pattern_33(t1, t2):
    for T, Tp, _ in _orders(t1, t2):
        cT = _cherries(T)
        threes = [s for s in iter_chains((t1, t2), length=3) if frozenset(s[1:]) in cT]
        for a, b, c in threes:
            for x, y, z in iter_chains((t1, t2), length=3):
                if frozenset((x, y)) not in cT or {x, y, z} & {a, b, c}:
                    continue
                if parent_walk(Tp, (a, b, c, x, y, z)) is not None:
                    yield (a, b, c), (x, y, z)


def apply_33(t1: UnrootedTree, t2: UnrootedTree) -> Match:
    """Common 3-chains (a,b,c), (x,y,z); T has cherries {b,c}, {x,y}; T' has the
    6-chain (a,b,c,x,y,z): delete x and y."""
    check_same_taxa(t1, t2)
    if not _room(t1, 2):
        return None
    for c1, c2 in _pattern_33(t1, t2):
        return _delete(t1, t2, RuleKind.THREE_THREE, [c1, c2], c2[:2])
    return None


def apply_32(t1: UnrootedTree, t2: UnrootedTree) -> Match:
    """Common chains (a,b,c), (y,z); T has cherries {b,c}, {y,z}; T' has the
    5-chain (a,b,c,y,z): delete y.

    Instances where (y,z) extends to the (3,3) pattern are left to
    :func:`apply_33`.
    """
    taxa = check_same_taxa(t1, t2)
    if not _room(t1, 1):
        return None
    for T, Tp, _ in _orders(t1, t2):
        cT = _cherries(T)
        threes = [s for s in iter_chains((t1, t2), length=3) if frozenset(s[1:]) in cT]
        for a, b, c in threes:
            for y, z in iter_chains((t1, t2), length=2):
                if frozenset((y, z)) not in cT or {y, z} & {a, b, c}:
                    continue
                if parent_walk(Tp, (a, b, c, y, z)) is None:
                    continue
                if any(parent_walk(t1, (y, z, w)) and parent_walk(t2, (y, z, w))
                       and parent_walk(Tp, (a, b, c, y, z, w))
                       for w in sorted(taxa - {a, b, c, y, z})):
                    continue
                return _delete(t1, t2, RuleKind.THREE_TWO, [(a, b, c), (y, z)], (y,))
    return None


MATCHERS: Sequence[Tuple[RuleKind, Callable[[UnrootedTree, UnrootedTree], Match]]] = (
    (RuleKind.SUBTREE, apply_subtree_reduction),
    (RuleKind.CHAIN, apply_chain_reduction),
    (RuleKind.STAR3STAR, apply_star3star),
    (RuleKind.THREE_ONE_STAR, apply_31star),
    (RuleKind.TWO_ONE_TWO, apply_212),
    (RuleKind.THREE_THREE, apply_33),
    (RuleKind.THREE_TWO, apply_32),
)


def first_match(t1: UnrootedTree, t2: UnrootedTree) -> Match:
    for _, matcher in MATCHERS:
        res = matcher(t1, t2)
        if res is not None:
            return res
    return None


def exhaustively_reduce(t1: UnrootedTree, t2: UnrootedTree) -> Tuple[UnrootedTree, UnrootedTree, ReductionTrace]:
    """Apply the rules to a fixed point, restarting from the subtree rule after
    every step, so the five newer rules only ever see subtree- and
    chain-reduced pairs."""
    taxa = check_same_taxa(t1, t2)
    if len(taxa) < MIN_TAXA:
        raise CardinalityError("exhaustively_reduce needs at least 4 taxa")
    reserved = sorted(t for t in taxa if t.startswith("_"))
    if reserved:
        raise ValueError(f"labels starting with '_' are reserved: {reserved}")
    trace = ReductionTrace()
    while True:
        res = first_match(t1, t2)
        if res is None:
            return t1, t2, trace
        t1, t2, step = res
        trace.append(step)


def is_exhaustively_reduced(t1: UnrootedTree, t2: UnrootedTree) -> bool:
    return first_match(t1, t2) is None
