"""
Seeded random trees.

All randomness comes from ``numpy.random.default_rng(seed)``, i.e. the
PCG64 bit generator, whose streams are identical across platforms and
numpy versions that share the ``Generator`` API.  Each generator draws, in
order: the shape decisions (random model only), one uniform per preorder
node for the contraction step, and one permutation for the labels.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .newick import Tree

__all__ = ["gen_random", "gen_alpha", "shuffle_labels", "contract_random"]


@njit(cache=True)
def _grow(picks, n):
    """
    Random model: start from a cherry; step i expands the leaf at index
    ``picks[i]`` of the current leaf list into a cherry.  Returns child
    arrays of the resulting binary tree (node 0 is the root).
    """
    m = 2 * n - 1
    left = np.full(m, -1, dtype=np.int64)
    right = np.full(m, -1, dtype=np.int64)
    leaves = np.empty(n, dtype=np.int64)
    left[0] = 1
    right[0] = 2
    leaves[0] = 1
    leaves[1] = 2
    nxt = 3
    count = 2
    for i in range(picks.shape[0]):
        v = leaves[picks[i]]
        left[v] = nxt
        right[v] = nxt + 1
        leaves[picks[i]] = nxt
        leaves[count] = nxt + 1
        count += 1
        nxt += 2
    return left, right


@njit(cache=True)
def _to_preorder(left, right):
    m = left.shape[0]
    order = np.empty(m, dtype=np.int64)
    stack = np.empty(m, dtype=np.int64)
    top = 1
    stack[0] = 0
    i = 0
    while top > 0:
        top -= 1
        v = stack[top]
        order[i] = v
        i += 1
        if left[v] >= 0:
            stack[top] = right[v]
            stack[top + 1] = left[v]
            top += 2
    pos = np.empty(m, dtype=np.int64)
    for k in range(m):
        pos[order[k]] = k
    size = np.ones(m, dtype=np.int64)
    degree = np.zeros(m, dtype=np.int64)
    for k in range(m - 1, -1, -1):
        v = order[k]
        if left[v] >= 0:
            degree[k] = 2
            size[k] = 1 + size[pos[left[v]]] + size[pos[right[v]]]
    return size, degree


@njit(cache=True)
def _alpha_shape(n, alpha):
    m = 2 * n - 1
    size = np.empty(m, dtype=np.int64)
    degree = np.zeros(m, dtype=np.int64)
    stack = np.empty(n + 1, dtype=np.int64)
    stack[0] = n
    top = 1
    q = 0
    while top > 0:
        top -= 1
        k = stack[top]
        size[q] = 2 * k - 1
        if k > 1:
            degree[q] = 2
            lft = min(math.floor(alpha * k), k - 1)
            if lft < 1:
                lft = 1
            stack[top] = k - lft
            stack[top + 1] = lft
            top += 2
        q += 1
    return size, degree


@njit(cache=True)
def _contract(size, degree, draws, p):
    """Splice out every non-root internal node whose draw is below ``p``."""
    m = size.shape[0]
    gone = np.zeros(m, dtype=np.bool_)
    for k in range(1, m):
        if degree[k] > 0 and draws[k] < p:
            gone[k] = True
    # effective degree: a spliced child passes its own children up
    eff = degree.copy()
    removed_below = np.zeros(m, dtype=np.int64)
    for k in range(m - 1, -1, -1):
        if degree[k] == 0:
            continue
        c = k + 1
        e = 0
        r = 0
        for _ in range(degree[k]):
            if gone[c]:
                e += eff[c]
                r += removed_below[c] + 1
            else:
                e += 1
                r += removed_below[c]
            c += size[c]
        eff[k] = e
        removed_below[k] = r
    keep = m - removed_below[0]
    nsize = np.empty(keep, dtype=np.int64)
    ndeg = np.empty(keep, dtype=np.int64)
    j = 0
    for k in range(m):
        if not gone[k]:
            nsize[j] = size[k] - removed_below[k]
            ndeg[j] = eff[k]
            j += 1
    return nsize, ndeg


def _leaf_labels(degree: np.ndarray, labels_in_order: np.ndarray) -> np.ndarray:
    label = np.zeros(degree.shape[0], dtype=np.int64)
    label[degree == 0] = labels_in_order
    return label


def contract_random(tree: Tree, p: float, rng: np.random.Generator) -> Tree:
    """Contract each non-root internal node independently with probability ``p``."""
    draws = rng.random(tree.n_nodes)
    leaf_labels = tree.leaves()
    size, degree = _contract(tree.size, tree.degree, draws, float(p))
    return Tree(size, degree, _leaf_labels(degree, leaf_labels))


def _finish(size, degree, n, p, rng) -> Tree:
    draws = rng.random(size.shape[0])
    size, degree = _contract(size, degree, draws, float(p))
    perm = rng.permutation(n).astype(np.int64) + 1
    return Tree(size, degree, _leaf_labels(degree, perm))


def _check(n, p):
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")


def gen_random(n: int, p: float = 0.0, seed: int = 0) -> Tree:
    """
    Random model: grow from a cherry by expanding a uniformly chosen leaf
    until there are ``n`` leaves, contract, then shuffle the labels.
    """
    _check(n, p)
    rng = np.random.default_rng(seed)
    if n == 1:
        return _finish(np.ones(1, np.int64), np.zeros(1, np.int64), 1, p, rng)
    picks = rng.integers(0, np.arange(2, n)) if n > 2 else np.zeros(0, np.int64)
    left, right = _grow(np.asarray(picks, dtype=np.int64), n)
    size, degree = _to_preorder(left, right)
    return _finish(size, degree, n, p, rng)


def gen_alpha(n: int, alpha: float, p: float = 0.0, seed: int = 0) -> Tree:
    """
    Alpha model: a subtree with m >= 2 leaves puts
    ``max(1, min(floor(alpha * m), m - 1))`` of them on the left.
    """
    _check(n, p)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    size, degree = _alpha_shape(n, float(alpha))
    return _finish(size, degree, n, p, rng)


def shuffle_labels(tree: Tree, seed: int) -> Tree:
    """Apply a seeded uniform permutation of 1..n to the leaf labels (n = leaf count)."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(tree.n_leaves).astype(np.int64) + 1
    label = np.zeros_like(tree.label)
    leaf = tree.label > 0
    label[leaf] = perm[tree.label[leaf] - 1]
    return Tree(tree.size.copy(), tree.degree.copy(), label)
