import random

import pytest

from tbrkernel import parse
from tbrkernel.tree import default_taxa, random_tree

CHAIN_PAIR = ("((a,b),c,(d,e));", "((b,e),c,(a,d));")

QUARTET_NET = """\
1 3
1 4
4 6
1 7
7 2
4 8
8 5
7 8
2 LABEL=a
3 LABEL=b
5 LABEL=c
6 LABEL=d
"""

CHAIN_NET_R2 = """\
0 4
1 2
5 7
0 8
8 1
5 9
9 6
8 9
0 10
10 5
1 11
11 3
10 11
2 LABEL=a
3 LABEL=b
4 LABEL=c
6 LABEL=d
7 LABEL=e
"""


@pytest.fixture
def chain_pair():
    return parse(CHAIN_PAIR[0]), parse(CHAIN_PAIR[1])


@pytest.fixture
def quartets():
    return parse("((a,b),(c,d));"), parse("((a,c),(b,d));"), parse("((a,d),(b,c));")


def random_pairs(count, n_lo, n_hi, seed):
    rng = random.Random(seed)
    for _ in range(count):
        taxa = default_taxa(rng.randint(n_lo, n_hi))
        yield random_tree(taxa, rng), random_tree(taxa, rng)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
