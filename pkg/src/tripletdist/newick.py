"""
Newick input/output and the flat tree type shared by the whole package.

A :class:`Tree` is a rooted, unordered, leaf-labelled tree stored as three
parallel arrays in preorder (depth first, children left to right):

    size[p]    number of nodes in the subtree rooted at position p
    degree[p]  number of children of p (0 for a leaf)
    label[p]   leaf label (>= 1), 0 for internal nodes

The first child of an internal node p sits at p + 1 and every following
sibling is found by jumping over the previous sibling's subtree.  Nothing in
the package walks trees recursively, so caterpillars with millions of leaves
are fine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NewickError",
    "LabelError",
    "Tree",
    "LabelSet",
    "parse_newick",
    "read_newick",
    "write_newick",
    "validate_pair",
    "canonical_form",
    "isomorphic",
]


class NewickError(ValueError):
    """Malformed Newick text.  ``offset`` is the 0-based character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class LabelError(ValueError):
    """The two input trees do not share the leaf label set {1..n}."""

    def __init__(self, message: str, label: int | None = None):
        super().__init__(message)
        self.label = label


@dataclass(frozen=True, eq=False)
class Tree:
    size: np.ndarray
    degree: np.ndarray
    label: np.ndarray

    def __post_init__(self):
        if not (len(self.size) == len(self.degree) == len(self.label)):
            raise ValueError("size, degree and label must have equal length")

    # ------------------------------------------------------------------ #
    # Construction helpers

    @classmethod
    def from_arrays(cls, size, degree, label) -> "Tree":
        return cls(
            np.ascontiguousarray(size, dtype=np.int64),
            np.ascontiguousarray(degree, dtype=np.int64),
            np.ascontiguousarray(label, dtype=np.int64),
        )

    @classmethod
    def from_nested(cls, obj) -> "Tree":
        """
        Build a tree from nested tuples/lists of ints, e.g. ``((1, 2), 3)``.

        A bare int is a single-leaf tree.  Unary tuples are contracted the
        same way the parser contracts them.
        """
        sizes, degrees, labels = [], [], []
        # (object, slot in output or -1); iterative so deep nests are fine
        stack = [obj]
        order = []
        while stack:
            node = stack.pop()
            while isinstance(node, (tuple, list)) and len(node) == 1:
                node = node[0]
            order.append(node)
            if isinstance(node, (tuple, list)):
                if len(node) == 0:
                    raise ValueError("empty subtree")
                stack.extend(reversed(node))
        n = len(order)
        sizes = np.ones(n, dtype=np.int64)
        degrees = np.zeros(n, dtype=np.int64)
        labels = np.zeros(n, dtype=np.int64)
        for p, node in enumerate(order):
            if isinstance(node, (tuple, list)):
                degrees[p] = len(node)
            else:
                labels[p] = int(node)
        _fill_sizes(sizes, degrees)
        return cls(sizes, degrees, labels)

    # ------------------------------------------------------------------ #
    # Shape queries

    @property
    def n_nodes(self) -> int:
        return int(self.size.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.degree == 0))

    @property
    def is_binary(self) -> bool:
        """True when every internal node has exactly two children."""
        return bool(np.all((self.degree == 0) | (self.degree == 2)))

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n_nodes else 0

    def children(self, p: int) -> list[int]:
        out = []
        c = p + 1
        for _ in range(int(self.degree[p])):
            out.append(c)
            c += int(self.size[c])
        return out

    def leaves(self) -> np.ndarray:
        """Leaf labels in left-to-right order."""
        return self.label[self.degree == 0]

    def to_nested(self):
        """Inverse of :meth:`from_nested`: nested tuples of Python ints."""
        built = {}
        for p in range(self.n_nodes - 1, -1, -1):
            if self.degree[p] == 0:
                built[p] = int(self.label[p])
            else:
                built[p] = tuple(built.pop(c) for c in self.children(p))
        return built[0]

    def __repr__(self) -> str:
        return f"Tree(n_leaves={self.n_leaves}, n_nodes={self.n_nodes})"


def _fill_sizes(size: np.ndarray, degree: np.ndarray) -> None:
    # reverse preorder: every child is finished before its parent
    pending: list[int] = []
    for p in range(len(size) - 1, -1, -1):
        s = 1
        for _ in range(int(degree[p])):
            s += pending.pop()
        size[p] = s
        pending.append(s)


# ---------------------------------------------------------------------- #
# Parsing

_TOKEN = re.compile(r"\s+|[(),;]|:[^(),;]*|[^\s(),;:]+")
_NUMBER = re.compile(r"\s*[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?\s*$")


def parse_newick(text: str) -> Tree:
    """
    Parse one rooted tree in Newick format.

    Leaf labels must be positive integers.  Branch lengths and internal node
    names are accepted and dropped, and unary nodes are contracted away.

    Raises
    ------
    NewickError
        With the offending character offset, for unbalanced parentheses,
        an empty subtree ``()``, a missing or non-integer leaf label, a
        duplicate label, or a missing terminating ``;``.
    """
    kids: list[list[int] | None] = []
    labels: list[int] = []
    seen: dict[int, int] = {}
    open_stack: list[tuple[int, list[int]]] = []
    expect_subtree = True
    prev = ""
    last = -1
    done = False

    for m in _TOKEN.finditer(text):
        tok = m.group()
        off = m.start()
        if tok[0].isspace():
            continue
        if done:
            raise NewickError("unexpected text after ';'", off)
        c = tok[0]
        if c == "(":
            if not expect_subtree:
                raise NewickError("unexpected '('", off)
            open_stack.append((off, []))
        elif c == "," or c == ")":
            if expect_subtree:
                if c == ")" and prev == "(":
                    raise NewickError("empty subtree", off)
                raise NewickError("missing leaf label", off)
            if not open_stack:
                raise NewickError("unbalanced parentheses", off)
            open_stack[-1][1].append(last)
            if c == ",":
                expect_subtree = True
            else:
                _, children = open_stack.pop()
                if len(children) == 1:
                    last = children[0]
                else:
                    last = len(kids)
                    kids.append(children)
                    labels.append(0)
                expect_subtree = False
        elif c == ";":
            if expect_subtree:
                raise NewickError("missing leaf label", off)
            if open_stack:
                raise NewickError("unbalanced parentheses", off)
            done = True
        elif c == ":":
            if expect_subtree:
                raise NewickError("branch length without a node", off)
            if not _NUMBER.match(tok[1:]):
                raise NewickError(f"invalid branch length {tok[1:].strip()!r}", off)
        else:
            if expect_subtree:
                try:
                    value = int(tok)
                except ValueError:
                    raise NewickError(f"non-integer leaf label {tok!r}", off) from None
                if value < 1 or value >= 2**63:
                    raise NewickError(f"leaf label {tok} out of range", off)
                if value in seen:
                    raise NewickError(f"duplicate leaf label {value}", off)
                seen[value] = off
                last = len(kids)
                kids.append(None)
                labels.append(value)
                expect_subtree = False
            elif prev != ")":
                raise NewickError(f"unexpected token {tok!r}", off)
            # otherwise an internal node name: ignored
        prev = c if c in "(),;:" else "w"

    if not done:
        if open_stack:
            raise NewickError("unbalanced parentheses", len(text))
        raise NewickError("missing ';'", len(text))
    return _from_children(kids, labels, last)


def _from_children(kids, labels, root) -> Tree:
    n = len(kids)
    order = np.empty(n, dtype=np.int64)
    stack = [root]
    i = 0
    while stack:
        v = stack.pop()
        order[i] = v
        i += 1
        ch = kids[v]
        if ch is not None:
            stack.extend(reversed(ch))
    order = order[:i]
    degree = np.fromiter(
        (0 if kids[v] is None else len(kids[v]) for v in order), dtype=np.int64, count=i
    )
    label = np.asarray(labels, dtype=np.int64)[order]
    size = np.ones(i, dtype=np.int64)
    _fill_sizes(size, degree)
    return Tree(size, degree, label)


def read_newick(path) -> Tree:
    with open(path, encoding="utf-8") as fh:
        return parse_newick(fh.read())


def write_newick(tree: Tree) -> str:
    """Serialize without branch lengths; ``parse_newick`` inverts it exactly."""
    out: list[str] = []
    remaining: list[int] = []
    degree = tree.degree.tolist()
    label = tree.label.tolist()
    for p in range(len(degree)):
        if degree[p]:
            out.append("(")
            remaining.append(degree[p])
            continue
        out.append(str(label[p]))
        while remaining:
            remaining[-1] -= 1
            if remaining[-1]:
                out.append(",")
                break
            remaining.pop()
            out.append(")")
    out.append(";")
    return "".join(out)


# ---------------------------------------------------------------------- #
# Validation and comparison


@dataclass(frozen=True)
class LabelSet:
    n: int

    @property
    def present(self) -> range:
        return range(1, self.n + 1)


def _check_labels(tree: Tree, n: int, which: str) -> None:
    leaves = tree.leaves()
    bad = leaves[(leaves < 1) | (leaves > n)]
    if bad.size:
        lab = int(bad[0])
        raise LabelError(f"{which}: label {lab} not in {{1..{n}}}", lab)
    counts = np.bincount(leaves, minlength=n + 1)
    dup = np.flatnonzero(counts > 1)
    if dup.size:
        lab = int(dup[0])
        raise LabelError(f"{which}: duplicate label {lab}", lab)


def validate_pair(t1: Tree, t2: Tree) -> LabelSet:
    """Check that both trees are labelled by exactly {1..n} for the same n."""
    n1, n2 = t1.n_leaves, t2.n_leaves
    if n1 != n2:
        raise LabelError(f"leaf-count mismatch: first tree has {n1}, second has {n2}")
    _check_labels(t1, n1, "first tree")
    _check_labels(t2, n1, "second tree")
    return LabelSet(n1)


def canonical_form(tree: Tree) -> str:
    """
    Order-independent string for a tree: children are sorted by their
    smallest descendant label.  Two trees are isomorphic (as leaf-labelled
    unordered trees) iff their canonical forms are equal.
    """
    text: dict[int, tuple[int, str]] = {}
    for p in range(tree.n_nodes - 1, -1, -1):
        if tree.degree[p] == 0:
            lab = int(tree.label[p])
            text[p] = (lab, str(lab))
        else:
            parts = sorted(text.pop(c) for c in tree.children(p))
            text[p] = (parts[0][0], "(" + ",".join(s for _, s in parts) + ")")
    return text[0][1] + ";"


def isomorphic(a: Tree, b: Tree) -> bool:
    return canonical_form(a) == canonical_form(b)
