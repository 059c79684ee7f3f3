"""
Preprocessing of the two input trees.

The first tree is turned into a left-heavy binary tree: binary nodes get
their larger child (by leaf count) on the left, and a node with k >= 3
children becomes a left path of k - 2 extra "orange" nodes whose leaves are
the original children.  Leaves are then renumbered 1..n left to right and
the same renumbering is applied to the second tree, so that every subtree
of the first tree covers one contiguous label interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .layout import PostorderTree, PreorderTree

__all__ = [
    "LabelMap",
    "BinarizedTree",
    "make_left_heavy",
    "binarize",
    "relabel_leaves",
    "prepare_first",
    "is_left_heavy",
]


@dataclass(frozen=True, eq=False)
class LabelMap:
    """``new_of_old[old]`` is the new label; slot 0 is unused."""

    new_of_old: np.ndarray

    @property
    def n(self) -> int:
        return int(self.new_of_old.shape[0]) - 1

    def __call__(self, labels):
        return self.new_of_old[labels]

    def as_dict(self) -> dict[int, int]:
        return {i: int(self.new_of_old[i]) for i in range(1, self.n + 1)}


@njit(cache=True)
def leaf_counts(size, degree):
    n = size.shape[0]
    lc = np.zeros(n, dtype=np.int64)
    for p in range(n - 1, -1, -1):
        if degree[p] == 0:
            lc[p] = 1
        else:
            c = p + 1
            s = 0
            for _ in range(degree[p]):
                s += lc[c]
                c += size[c]
            lc[p] = s
    return lc


@njit(cache=True)
def _binarize(size, degree, label):
    n_in = size.shape[0]
    lc = leaf_counts(size, degree)
    n_leaves = lc[0]
    m = 2 * n_leaves - 1
    bsize = np.empty(m, dtype=np.int64)
    blabel = np.zeros(m, dtype=np.int64)
    orange = np.zeros(m, dtype=np.bool_)
    maxdeg = 0
    for p in range(n_in):
        if degree[p] > maxdeg:
            maxdeg = degree[p]
    kids = np.empty(maxdeg, dtype=np.int64)
    kidlc = np.empty(maxdeg, dtype=np.int64)
    stack = np.empty(n_leaves + 1, dtype=np.int64)
    top = 0
    stack[top] = 0
    top += 1
    q = 0
    while top > 0:
        top -= 1
        p = stack[top]
        k = degree[p]
        bsize[q] = 2 * lc[p] - 1
        if k == 0:
            blabel[q] = label[p]
            q += 1
            continue
        q += 1
        c = p + 1
        for i in range(k):
            kids[i] = c
            kidlc[i] = lc[c]
            c += size[c]
        if k == 2:
            # larger on the left; equal sizes keep their order
            if kidlc[1] > kidlc[0]:
                stack[top] = kids[0]
                stack[top + 1] = kids[1]
            else:
                stack[top] = kids[1]
                stack[top + 1] = kids[0]
            top += 2
            continue
        # ascending by leaf count; the smallest hangs right below w, the
        # two largest share the bottom orange node
        asc = np.argsort(kidlc[:k], kind="mergesort")
        rest = lc[p]
        for i in range(k - 2):
            rest -= kidlc[asc[i]]
            bsize[q] = 2 * rest - 1
            orange[q] = True
            q += 1
        for i in range(k):
            stack[top] = kids[asc[i]]
            top += 1
    return bsize, blabel, orange


@njit(cache=True)
def _relabel(blabel, n_leaves):
    new_of_old = np.zeros(n_leaves + 1, dtype=np.int64)
    out = np.zeros_like(blabel)
    nxt = 1
    for q in range(blabel.shape[0]):
        if blabel[q] > 0:
            new_of_old[blabel[q]] = nxt
            out[q] = nxt
            nxt += 1
    return out, new_of_old


@njit(cache=True)
def _map_labels(label, new_of_old):
    out = np.zeros_like(label)
    for i in range(label.shape[0]):
        if label[i] > 0:
            out[i] = new_of_old[label[i]]
    return out


def _as_binary(bsize, blabel, orange) -> PreorderTree:
    degree = np.where(blabel > 0, 0, 2).astype(np.int64)
    return PreorderTree(bsize, blabel, degree, orange)


def make_left_heavy(t: PreorderTree) -> PreorderTree:
    """
    Swap children so that every left subtree has at least as many leaves
    as its right sibling.  The input must be binary; labels are unchanged.
    """
    if np.any((t.degree != 0) & (t.degree != 2)):
        raise ValueError("make_left_heavy expects a binary tree")
    return _as_binary(*_binarize(t.size, t.degree, t.label))


def binarize(t: PreorderTree) -> PreorderTree:
    """
    Binarize a general tree into a left-heavy binary tree with orange nodes.

    A node with k >= 3 children gets k - 2 orange descendants on its left
    path.  With the children sorted by ascending leaf count s_1..s_k, the
    node's right child is s_1, the i-th orange node's right child is
    s_{i+1}, and the lowest orange node has s_k on the left.
    """
    return _as_binary(*_binarize(t.size, t.degree, t.label))


def is_left_heavy(t: PreorderTree) -> bool:
    lc = leaf_counts(t.size, t.degree)
    internal = np.flatnonzero(t.degree == 2)
    left = internal + 1
    right = left + t.size[left]
    return bool(np.all(lc[left] >= lc[right]))


def relabel_leaves(
    t1: PreorderTree, t2: PostorderTree
) -> tuple[PreorderTree, PostorderTree, LabelMap]:
    """Number the leaves of ``t1`` 1..n left to right and carry the map to ``t2``."""
    n = int(np.count_nonzero(t1.label))
    label1, new_of_old = _relabel(t1.label, n)
    label2 = _map_labels(t2.label, new_of_old)
    return (
        PreorderTree(t1.size, label1, t1.degree, t1.orange),
        PostorderTree(t2.size, label2, t2.degree),
        LabelMap(new_of_old),
    )


@dataclass(frozen=True, eq=False)
class BinarizedTree:
    """
    Left-heavy, canonically labelled binary form of the first tree, plus
    the per-node label intervals used to color leaves.

    ``lo[p]..hi[p]`` is the label interval of the subtree at p.  ``chi[p]``
    is ``hi`` of the topmost node of p's orange chain (``hi[p]`` for a
    node that is not orange), so the leaves of the original node that the
    chain replaces are ``lo[p]..chi[p]``.
    """

    size: np.ndarray
    orange: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    chi: np.ndarray
    n: int

    @property
    def n_nodes(self) -> int:
        return int(self.size.shape[0])

    @property
    def n_orange(self) -> int:
        return int(np.count_nonzero(self.orange))


@njit(cache=True)
def _intervals(bsize, orange):
    m = bsize.shape[0]
    lo = np.empty(m, dtype=np.int64)
    hi = np.empty(m, dtype=np.int64)
    chi = np.empty(m, dtype=np.int64)
    seen = 0
    for p in range(m):
        lo[p] = seen + 1
        hi[p] = seen + (bsize[p] + 1) // 2
        if bsize[p] == 1:
            seen += 1
        if orange[p]:
            chi[p] = chi[p - 1]
        else:
            chi[p] = hi[p]
    return lo, hi, chi


def prepare_first(t1: PreorderTree, t2: PostorderTree):
    """
    Binarize and relabel ``t1``; relabel ``t2`` to match.

    Returns ``(BinarizedTree, relabelled t2, LabelMap)``.
    """
    b = binarize(t1)
    b, t2r, lmap = relabel_leaves(b, t2)
    lo, hi, chi = _intervals(b.size, b.orange)
    bt = BinarizedTree(b.size, b.orange, lo, hi, chi, lmap.n)
    return bt, t2r, lmap
