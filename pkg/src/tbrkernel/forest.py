"""Agreement forests: representation, validity, and chain status."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

from .errors import NotAPartitionError
from .tree import UnrootedTree, check_same_taxa, isomorphic


@dataclass(frozen=True)
class AgreementForest:
    """A partition of the taxon set into components.

    Components are stored sorted by their smallest member, which makes the
    text form ``"a,b,c|d|e"`` canonical.
    """

    components: Tuple[FrozenSet[str], ...]

    def __init__(self, components: Iterable[Iterable[str]]):
        comps = [frozenset(c) for c in components]
        comps.sort(key=lambda c: min(c) if c else "")
        object.__setattr__(self, "components", tuple(comps))

    @property
    def size(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def taxa(self) -> FrozenSet[str]:
        return frozenset().union(*self.components)

    def component_of(self, taxon: str) -> FrozenSet[str]:
        for c in self.components:
            if taxon in c:
                return c
        raise KeyError(taxon)

    def __str__(self):
        return "|".join(",".join(sorted(c)) for c in self.components)

    @classmethod
    def parse(cls, text: str) -> "AgreementForest":
        return cls(part.split(",") for part in text.strip().split("|"))


class ForestCheck(NamedTuple):
    ok: bool
    violation: Optional[str] = None

    def __bool__(self):
        return self.ok


def check_partition(taxa: FrozenSet[str], components: Iterable[FrozenSet[str]]) -> None:
    comps = [frozenset(c) for c in components]
    if any(not c for c in comps):
        raise NotAPartitionError("empty component")
    union = frozenset().union(*comps) if comps else frozenset()
    if sum(len(c) for c in comps) != len(union):
        raise NotAPartitionError("components overlap")
    if union != taxa:
        raise NotAPartitionError(f"components do not cover the taxa: {sorted(union ^ taxa)}")


def is_agreement_forest(t1: UnrootedTree, t2: UnrootedTree, partition) -> ForestCheck:
    """Check both agreement-forest conditions, reporting the first violation."""
    taxa = check_same_taxa(t1, t2)
    comps = list(partition.components if isinstance(partition, AgreementForest) else partition)
    comps = [frozenset(c) for c in comps]
    check_partition(taxa, comps)
    comps.sort(key=min)
    for c in comps:
        if len(c) >= 4 and not isomorphic(t1.restrict(c), t2.restrict(c)):
            return ForestCheck(False, f"condition 1: T|B != T'|B for B={{{','.join(sorted(c))}}}")
    for name, tree in (("T", t1), ("T'", t2)):
        embeds = [(c, tree.embedding(c)) for c in comps]
        for (c1, e1), (c2, e2) in itertools.combinations(embeds, 2):
            if e1 & e2:
                return ForestCheck(
                    False,
                    f"condition 2: embeddings of {{{','.join(sorted(c1))}}} and "
                    f"{{{','.join(sorted(c2))}}} intersect in {name}",
                )
    return ForestCheck(True)


class ChainStatus(enum.Enum):
    PRESERVED = "preserved"
    SPLIT = "split"
    ATOMIZED = "atomized"


def chain_status(forest: AgreementForest, chain: Iterable[str]) -> ChainStatus:
    """Preserved if one component holds the whole chain; atomized if every chain
    taxon is a singleton component; split otherwise."""
    chain = frozenset(chain)
    if any(chain <= c for c in forest.components):
        return ChainStatus.PRESERVED
    if all(frozenset([x]) in forest.components for x in chain):
        return ChainStatus.ATOMIZED
    return ChainStatus.SPLIT


def preserves(forest: AgreementForest, chain: Iterable[str]) -> bool:
    return chain_status(forest, chain) is ChainStatus.PRESERVED


def singletons(taxa: Iterable[str]) -> AgreementForest:
    return AgreementForest([x] for x in taxa)


def sorted_components(components: Iterable[FrozenSet[str]]) -> List[FrozenSet[str]]:
    return sorted((frozenset(c) for c in components), key=min)
