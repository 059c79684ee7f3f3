"""
Flat array layouts.

``PreorderTree`` is used for the first tree (and its binarized form, which
carries orange flags).  ``PostorderTree`` is used for the second tree and
for every contraction of it: children precede their parent, the root is the
last slot, and a node's right child sits immediately before it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .newick import Tree, _fill_sizes

__all__ = [
    "PreorderTree",
    "PostorderTree",
    "to_preorder",
    "to_postorder",
    "postorder_to_tree",
    "postorder_sizes",
    "preorder_depths",
]


@dataclass(frozen=True, eq=False)
class PreorderTree:
    """
    Preorder layout.

    Attributes
    ----------
    size : int64 array
        Node count of each subtree.
    label : int64 array
        Leaf label, 0 for internal nodes.
    degree : int64 array
        Number of children.
    orange : bool array
        Marks the helper nodes introduced by binarization.
    """

    size: np.ndarray
    label: np.ndarray
    degree: np.ndarray
    orange: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.size.shape[0])

    @property
    def left_size(self) -> np.ndarray:
        """Size of the first child's subtree (0 at leaves)."""
        out = np.zeros_like(self.size)
        internal = np.flatnonzero(self.degree > 0)
        out[internal] = self.size[internal + 1]
        return out

    def left_child(self, p: int) -> int:
        return p + 1

    def right_child(self, p: int) -> int:
        """Right child of a binary node: position p + x + 1 with x the left size."""
        return p + int(self.size[p + 1]) + 1

    def children(self, p: int) -> list[int]:
        out = []
        c = p + 1
        for _ in range(int(self.degree[p])):
            out.append(c)
            c += int(self.size[c])
        return out

    def to_tree(self) -> Tree:
        return Tree(self.size.copy(), self.degree.copy(), self.label.copy())


@dataclass(frozen=True, eq=False)
class PostorderTree:
    size: np.ndarray
    label: np.ndarray
    degree: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.size.shape[0])

    @property
    def root(self) -> int:
        return self.n_nodes - 1

    @property
    def right_size(self) -> np.ndarray:
        """Size of the last child's subtree (0 at leaves)."""
        out = np.zeros_like(self.size)
        internal = np.flatnonzero(self.degree > 0)
        out[internal] = self.size[internal - 1]
        return out

    def right_child(self, q: int) -> int:
        return q - 1

    def left_child(self, q: int) -> int:
        """Left child of a binary node: position q - y - 1 with y the right size."""
        return q - int(self.size[q - 1]) - 1

    def children(self, q: int) -> list[int]:
        """Children of q in left-to-right order."""
        out = []
        c = q - 1
        for _ in range(int(self.degree[q])):
            out.append(c)
            c -= int(self.size[c])
        out.reverse()
        return out

    def leaves(self) -> np.ndarray:
        return self.label[self.degree == 0]


@njit(cache=True)
def preorder_depths(size, degree):
    n = size.shape[0]
    depth = np.zeros(n, dtype=np.int64)
    # ends[k]: first position past the subtree of the k-th open ancestor
    ends = np.empty(n + 1, dtype=np.int64)
    top = 0
    for p in range(n):
        while top > 0 and ends[top - 1] <= p:
            top -= 1
        depth[p] = top
        if degree[p] > 0:
            ends[top] = p + size[p]
            top += 1
    return depth


@njit(cache=True)
def _postorder_index(size, degree):
    depth = preorder_depths(size, degree)
    n = size.shape[0]
    post = np.empty(n, dtype=np.int64)
    for p in range(n):
        post[p] = p - depth[p] + size[p] - 1
    return post


def to_preorder(tree: Tree) -> PreorderTree:
    return PreorderTree(
        tree.size.copy(),
        tree.label.copy(),
        tree.degree.copy(),
        np.zeros(tree.n_nodes, dtype=np.bool_),
    )


def to_postorder(tree: Tree) -> PostorderTree:
    post = _postorder_index(tree.size, tree.degree)
    size = np.empty_like(tree.size)
    label = np.empty_like(tree.label)
    degree = np.empty_like(tree.degree)
    size[post] = tree.size
    label[post] = tree.label
    degree[post] = tree.degree
    return PostorderTree(size, label, degree)


def postorder_sizes(degree: np.ndarray) -> np.ndarray:
    """Subtree sizes of a postorder array given only the degrees."""
    return _postorder_sizes(np.ascontiguousarray(degree, dtype=np.int64))


@njit(cache=True)
def _postorder_sizes(degree):
    n = degree.shape[0]
    size = np.empty(n, dtype=np.int64)
    for q in range(n):
        s = 1
        c = q - 1
        for _ in range(degree[q]):
            s += size[c]
            c -= size[c]
        size[q] = s
    return size


def postorder_to_tree(t: PostorderTree) -> Tree:
    """Back to the preorder :class:`Tree` form (children keep their order)."""
    n = t.n_nodes
    order = np.empty(n, dtype=np.int64)
    stack = [t.root]
    i = 0
    while stack:
        q = stack.pop()
        order[i] = q
        i += 1
        stack.extend(reversed(t.children(q)))
    degree = t.degree[order]
    size = np.ones(n, dtype=np.int64)
    _fill_sizes(size, degree)
    return Tree(size, degree.copy(), t.label[order].copy())
