"""Exhaustive maximum-agreement-forest oracle.

Set partitions are generated as restricted-growth strings.  A partial block
is abandoned as soon as it contains a quartet on which the trees disagree or
its embedding meets another block's embedding; both defects persist in
every superset, so the pruning is exact.
"""

from __future__ import annotations

import itertools
import os
from typing import Dict, Iterator, List, Tuple

from .errors import TooLargeError
from .forest import AgreementForest
from .tree import UnrootedTree, check_same_taxa

DEFAULT_MAX_N = 9


def oracle_max_n(default: int = DEFAULT_MAX_N) -> int:
    """Oracle size guard; ``TBRKERNEL_MAX_N`` in the environment overrides it."""
    value = os.environ.get("TBRKERNEL_MAX_N")
    return int(value) if value else default


class _Instance:
    def __init__(self, t1: UnrootedTree, t2: UnrootedTree):
        self.taxa = sorted(check_same_taxa(t1, t2))
        n = len(self.taxa)
        # bad[x] holds triples (i, j, k) < x such that {i, j, k, x} is a conflicting quartet
        self.bad: List[set] = [set() for _ in range(n)]
        for quad in itertools.combinations(range(n), 4):
            names = [self.taxa[i] for i in quad]
            if t1.quartet(*names) != t2.quartet(*names):
                self.bad[quad[3]].add(quad[:3])
        self.paths = [self._path_masks(t) for t in (t1, t2)]

    def _path_masks(self, tree: UnrootedTree) -> Dict[Tuple[int, int], int]:
        index = {v: i for i, v in enumerate(tree.vertices)}
        leaves = [tree.leaf(t) for t in self.taxa]
        masks = {}
        for i, j in itertools.combinations(range(len(leaves)), 2):
            m = 0
            for v in tree.path(leaves[i], leaves[j]):
                m |= 1 << index[v]
            masks[i, j] = m
        for i in range(len(leaves)):
            masks[i, i] = 1 << index[leaves[i]]
        return masks

    def search(self, limit: int) -> Iterator[List[List[int]]]:
        """Yield every agreement forest (as index blocks) with at most ``limit`` blocks."""
        n = len(self.taxa)
        blocks: List[List[int]] = []
        embeds: List[List[int]] = [[], []]

        def can_join(b: int, x: int) -> Tuple[int, int] | None:
            members = blocks[b]
            if len(members) >= 3 and self.bad[x]:
                for tri in itertools.combinations(members, 3):
                    if tri in self.bad[x]:
                        return None
            new = []
            for t in (0, 1):
                m = embeds[t][b] | self.paths[t][members[0], x]
                for other in range(len(blocks)):
                    if other != b and m & embeds[t][other]:
                        return None
                new.append(m)
            return new[0], new[1]

        def rec(x: int):
            if x == n:
                yield [list(b) for b in blocks]
                return
            for b in range(len(blocks)):
                joined = can_join(b, x)
                if joined is None:
                    continue
                saved = embeds[0][b], embeds[1][b]
                blocks[b].append(x)
                embeds[0][b], embeds[1][b] = joined
                yield from rec(x + 1)
                blocks[b].pop()
                embeds[0][b], embeds[1][b] = saved
            if len(blocks) < limit:
                blocks.append([x])
                embeds[0].append(self.paths[0][x, x])
                embeds[1].append(self.paths[1][x, x])
                yield from rec(x + 1)
                blocks.pop()
                embeds[0].pop()
                embeds[1].pop()

        yield from rec(0)

    def forest(self, blocks: List[List[int]]) -> AgreementForest:
        return AgreementForest([self.taxa[i] for i in b] for b in blocks)


def _guard(t1: UnrootedTree, t2: UnrootedTree, max_n: int | None) -> None:
    limit = oracle_max_n() if max_n is None else max_n
    if t1.n_taxa > limit:
        raise TooLargeError(f"{t1.n_taxa} taxa exceeds the oracle guard of {limit}")


def maf_bruteforce(t1: UnrootedTree, t2: UnrootedTree, max_n: int | None = None) -> Tuple[int, AgreementForest]:
    """Minimum agreement-forest size over all set partitions, with a witness."""
    _guard(t1, t2, max_n)
    inst = _Instance(t1, t2)
    best = None
    limit = len(inst.taxa)
    while True:
        found = next(inst.search(limit), None)
        if found is None:
            break
        best = found
        limit = len(found) - 1
    forest = inst.forest(best)
    return forest.size, forest


def bruteforce_distance(t1: UnrootedTree, t2: UnrootedTree, max_n: int | None = None) -> int:
    return maf_bruteforce(t1, t2, max_n)[0] - 1


def enumerate_mafs(t1: UnrootedTree, t2: UnrootedTree, max_n: int = 8) -> Iterator[AgreementForest]:
    """Every maximum agreement forest, each exactly once."""
    _guard(t1, t2, max_n)
    size, _ = maf_bruteforce(t1, t2, max_n)
    inst = _Instance(t1, t2)
    for blocks in inst.search(size):
        if len(blocks) == size:
            yield inst.forest(blocks)
