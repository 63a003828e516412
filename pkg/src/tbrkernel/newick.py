"""Newick input and canonical Newick output for unrooted binary trees."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Set

from .errors import CardinalityError, DegreeError, DuplicateLabelError, NewickSyntaxError
from .tree import UnrootedTree, validate

_LABEL = re.compile(r"[A-Za-z0-9_]+")
_LENGTH = re.compile(r":\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?")


class BranchLengthWarning(UserWarning):
    """Branch lengths were present in the input and have been dropped."""


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.adj: Dict[int, Set[int]] = {}
        self.labels: Dict[int, str] = {}
        self.saw_length = False

    def error(self, msg):
        raise NewickSyntaxError(msg, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def new_vertex(self):
        v = len(self.adj)
        self.adj[v] = set()
        return v

    def link(self, u, v):
        self.adj[u].add(v)
        self.adj[v].add(u)

    def branch_length(self):
        self.skip_ws()
        m = _LENGTH.match(self.text, self.pos)
        if self.peek() == ":":
            if not m:
                self.error("malformed branch length")
            self.pos = m.end()
            self.saw_length = True

    def label(self):
        self.skip_ws()
        m = _LABEL.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group()

    def subtree(self):
        """Parse one subtree; returns its top vertex."""
        if self.peek() == "(":
            self.pos += 1
            v = self.new_vertex()
            while True:
                child = self.subtree()
                self.link(v, child)
                c = self.peek()
                if c == ",":
                    self.pos += 1
                    continue
                if c == ")":
                    self.pos += 1
                    break
                self.error("expected ',' or ')'")
            self.label()  # internal node labels (support values) carry no topology
            self.branch_length()
            return v
        name = self.label()
        if name is None:
            self.error("expected a taxon label or '('")
        v = self.new_vertex()
        if name in self.labels.values():
            raise DuplicateLabelError(f"duplicate label {name!r}")
        self.labels[v] = name
        self.branch_length()
        return v

    def parse(self) -> UnrootedTree:
        root = self.subtree()
        if self.peek() != ";":
            self.error("expected ';'")
        self.pos += 1
        if self.peek():
            self.error("trailing characters after ';'")
        if self.saw_length:
            warnings.warn("branch lengths discarded", BranchLengthWarning, stacklevel=3)
        if root not in self.labels and len(self.adj[root]) == 2:
            u, w = self.adj.pop(root)
            self.adj[u].discard(root)
            self.adj[w].discard(root)
            self.link(u, w)
        tree = UnrootedTree(self.adj, self.labels)
        problem = validate(tree)
        if problem is not None:
            if "degree" in problem or "unlabeled" in problem:
                raise DegreeError(problem)
            raise NewickSyntaxError(problem)
        return tree


def parse(text: str) -> UnrootedTree:
    """Parse a single Newick expression terminated by ';'.

    A degree-2 root is suppressed; a trifurcating top level is read as the
    central vertex of an unrooted tree.  Branch lengths are dropped with a
    :class:`BranchLengthWarning`.
    """
    return _Parser(text).parse()


def serialize(tree: UnrootedTree) -> str:
    """Canonical Newick: rooted at the parent of the smallest taxon, children
    ordered by their smallest descendant label."""
    if tree.n_taxa == 0:
        raise CardinalityError("cannot serialize an empty tree")
    return tree.canonical


@dataclass
class NewickDocument:
    """Trees read from a line-oriented file; '#' lines and blank lines are skipped."""

    text: str
    trees: List[UnrootedTree] = field(default_factory=list)

    @classmethod
    def from_text(cls, text: str) -> "NewickDocument":
        trees = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            trees.append(parse(line))
        return cls(text, trees)

    @classmethod
    def from_trees(cls, trees: Iterable[UnrootedTree]) -> "NewickDocument":
        trees = list(trees)
        return cls("".join(serialize(t) + "\n" for t in trees), trees)


def read_trees(path) -> List[UnrootedTree]:
    with open(path) as fh:
        return NewickDocument.from_text(fh.read()).trees
