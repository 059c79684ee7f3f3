"""
Modified centroid decomposition of the binarized first tree.

A component is identified by two positions in the preorder array: its top
node ``r`` and, optionally, a hole ``y``.  The component is the subtree of
``r`` minus the subtree of ``y``; the hole is always the left child of a
node on the leftmost path of ``r``, so the path is the contiguous run of
positions ``r .. y - 1`` and the component's leaves form the single label
interval ``hi[y] + 1 .. hi[r]``.  The leaves under the hole are the ones
contracted away below the component; everything outside the subtree of
``r`` is contracted away above it.

Components are never copied; the traversal keeps only an explicit stack of
``(r, y)`` pairs, so the full decomposition tree is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

from .preprocess import BinarizedTree

__all__ = [
    "Component",
    "Colors",
    "ChildPlan",
    "find_centroid",
    "find_split_node",
    "split",
    "split_colors",
    "child_plans",
    "mcd_traverse",
    "mcd_stats",
]

NO_HOLE = -1


# ---------------------------------------------------------------------- #
# Scalar kernels shared by the Python API and the compiled traversal


@njit(cache=True)
def comp_size(size, r, y):
    if y < 0:
        return size[r]
    return size[r] - size[y]


@njit(cache=True)
def centroid(size, r, y):
    total = comp_size(size, r, y)
    w = r
    while size[w] > 1:
        left = w + 1
        right = left + size[left]
        cl = size[left]
        if y >= 0 and left <= y < left + size[left]:
            cl -= size[y]
        if 2 * cl > total:
            w = left
        elif 2 * size[right] > total:
            w = right
        else:
            break
    return w


@njit(cache=True)
def split_node(size, r, y):
    if y < 0:
        return centroid(size, r, y)
    total = size[r] - size[y]
    w = r
    # walk down the leftmost path while the heavy side stays on it
    while w + 1 != y and 2 * (size[w + 1] - size[y]) > total:
        w += 1
    return w


@njit(cache=True)
def colors_at(size, orange, lo, hi, chi, n, r, y, u):
    """
    Label intervals of the leaves of the component split at ``u``.

    Returns ``(red_lo, red_hi, blue_lo, blue_hi, green_lo, green_hi,
    g_green, total_black)``.  Leaves contracted below the component are
    red; leaves contracted in the orange-chain zone above it are green when
    ``g_green`` is set and black otherwise; all other contracted leaves are
    black.
    """
    hi_y = hi[y] if y >= 0 else lo[r] - 1
    left = u + 1
    right = left + size[left]
    red_lo = max(lo[left], hi_y + 1)
    red_hi = hi[left]
    blue_lo = lo[right]
    blue_hi = hi[right]
    if orange[u]:
        green_lo = hi[u] + 1
        green_hi = min(chi[u], hi[r])
        g_green = chi[u] == chi[r]
    else:
        green_lo = 1
        green_hi = 0
        g_green = False
    total_black = n - (chi[u] - lo[u] + 1)
    return red_lo, red_hi, blue_lo, blue_hi, green_lo, green_hi, g_green, total_black


@njit(cache=True)
def plans_at(size, lo, hi, chi, r, y, u, out):
    """
    Fill ``out[3, 9]`` with the three child components of a split, in the
    order left, right, parent.  Columns: active, root, hole, keep_lo,
    keep_hi, x_max, g_max, keep_x, keep_g.

    Leaves pruned by a child's contraction become "below" leaves if their
    label is at most ``x_max``, chain-zone leaves if at most ``g_max`` and
    "above" leaves otherwise.  ``keep_x`` / ``keep_g`` say whether leaves
    already contracted in those categories stay in them (otherwise they
    move to the above category).
    """
    hi_y = hi[y] if y >= 0 else lo[r] - 1
    left = u + 1
    right = left + size[left]
    # left child: same hole, leaves of L minus the hole
    out[0, 0] = 1 if (left != y and (y >= 0 or size[left] > 1)) else 0
    out[0, 1] = left
    out[0, 2] = y
    out[0, 3] = hi_y + 1
    out[0, 4] = hi[left]
    out[0, 5] = 0
    out[0, 6] = chi[left]
    out[0, 7] = 1
    out[0, 8] = 1 if chi[left] == chi[r] else 0
    # right child: a complete subtree
    out[1, 0] = 1 if size[right] > 1 else 0
    out[1, 1] = right
    out[1, 2] = NO_HOLE
    out[1, 3] = lo[right]
    out[1, 4] = hi[right]
    out[1, 5] = 0
    out[1, 6] = 0
    out[1, 7] = 0
    out[1, 8] = 0
    # part above u: u becomes the hole
    out[2, 0] = 1 if u != r else 0
    out[2, 1] = r
    out[2, 2] = u
    out[2, 3] = hi[u] + 1
    out[2, 4] = hi[r]
    out[2, 5] = hi[u]
    out[2, 6] = chi[r]
    out[2, 7] = 1
    out[2, 8] = 1


@njit(cache=True)
def _walk(size, record):
    """Decomposition only: (max depth, number of splits, split order)."""
    m = size.shape[0]
    order = np.empty(m if record else 0, dtype=np.int64)
    cap = 64
    sr = np.empty(cap, dtype=np.int64)
    sy = np.empty(cap, dtype=np.int64)
    sd = np.empty(cap, dtype=np.int64)
    top = 0
    count = 0
    max_depth = 0
    if size[0] > 1:
        sr[0] = 0
        sy[0] = NO_HOLE
        sd[0] = 1
        top = 1
    while top > 0:
        top -= 1
        r = sr[top]
        y = sy[top]
        d = sd[top]
        if d > max_depth:
            max_depth = d
        u = split_node(size, r, y)
        if record:
            order[count] = u
        count += 1
        if top + 3 > cap:
            cap *= 2
            sr2 = np.empty(cap, dtype=np.int64)
            sy2 = np.empty(cap, dtype=np.int64)
            sd2 = np.empty(cap, dtype=np.int64)
            sr2[:top] = sr[:top]
            sy2[:top] = sy[:top]
            sd2[:top] = sd[:top]
            sr, sy, sd = sr2, sy2, sd2
        left = u + 1
        right = left + size[left]
        if u != r:
            sr[top] = r
            sy[top] = u
            sd[top] = d + 1
            top += 1
        if size[right] > 1:
            sr[top] = right
            sy[top] = NO_HOLE
            sd[top] = d + 1
            top += 1
        if left != y and (y >= 0 or size[left] > 1):
            sr[top] = left
            sy[top] = y
            sd[top] = d + 1
            top += 1
    return max_depth, count, order[:count]


# ---------------------------------------------------------------------- #
# Python-facing objects


@dataclass(frozen=True)
class Component:
    """
    A component ``(root, hole)`` of a binarized tree.

    ``hole`` is -1 when nothing is cut away below.  ``below_edge`` is the
    pair ``(x, y)`` where ``x = y - 1`` is the path node the hole hangs
    from, or None.
    """

    tree: BinarizedTree
    root: int
    hole: int = NO_HOLE

    @property
    def size(self) -> int:
        return int(comp_size(self.tree.size, self.root, self.hole))

    @property
    def below_edge(self) -> tuple[int, int] | None:
        if self.hole < 0:
            return None
        return self.hole - 1, self.hole

    @property
    def leaf_interval(self) -> tuple[int, int]:
        t = self.tree
        lo = int(t.hi[self.hole]) + 1 if self.hole >= 0 else int(t.lo[self.root])
        return lo, int(t.hi[self.root])

    @property
    def n_leaves(self) -> int:
        a, b = self.leaf_interval
        return b - a + 1

    def nodes(self) -> np.ndarray:
        """Preorder positions that belong to the component."""
        r = self.root
        pos = np.arange(r, r + int(self.tree.size[r]))
        if self.hole >= 0:
            y = self.hole
            pos = pos[(pos < y) | (pos >= y + int(self.tree.size[y]))]
        return pos

    def leftmost_path(self) -> np.ndarray:
        """Positions of the leftmost path inside the component (top down)."""
        if self.hole >= 0:
            return np.arange(self.root, self.hole)
        t = self.tree
        path = [self.root]
        while t.size[path[-1]] > 1:
            path.append(path[-1] + 1)
        return np.asarray(path)

    def part_sizes(self, u: int) -> tuple[int, int, int]:
        """Node counts of the three pieces left after removing ``u``."""
        t = self.tree
        if t.size[u] == 1:
            return 0, 0, self.size - 1
        left = u + 1
        right = left + int(t.size[left])
        y = self.hole
        cl = int(t.size[left])
        if y >= 0 and left <= y < left + cl:
            cl -= int(t.size[y])
        cu = int(t.size[u])
        if y >= 0 and u <= y < u + cu:
            cu -= int(t.size[y])
        return cl, int(t.size[right]), self.size - cu


@dataclass(frozen=True)
class Colors:
    """Leaf coloring of a component for one split node (all inclusive)."""

    red: tuple[int, int]
    blue: tuple[int, int]
    green: tuple[int, int]
    green_contracted: bool
    total_black: int

    def classify(self, label: int) -> str:
        for name in ("red", "blue", "green"):
            a, b = getattr(self, name)
            if a <= label <= b:
                return name
        return "black"


@dataclass(frozen=True)
class ChildPlan:
    component: Component
    keep: tuple[int, int]
    x_max: int
    g_max: int
    keep_x: bool
    keep_g: bool


def find_centroid(c: Component) -> int:
    return int(centroid(c.tree.size, c.root, c.hole))


def find_split_node(c: Component) -> int:
    """
    Centroid when the component has no hole; otherwise the lowest common
    ancestor of the hole's parent and the centroid, found on the leftmost
    path.
    """
    return int(split_node(c.tree.size, c.root, c.hole))


def split_colors(c: Component, u: int) -> Colors:
    t = c.tree
    rl, rh, bl, bh, gl, gh, gg, tb = colors_at(
        t.size, t.orange, t.lo, t.hi, t.chi, t.n, c.root, c.hole, u
    )
    return Colors((int(rl), int(rh)), (int(bl), int(bh)), (int(gl), int(gh)), bool(gg), int(tb))


def child_plans(c: Component, u: int) -> list[ChildPlan | None]:
    """Plans for ``(C_l, C_r, C_p)``; inactive children are None."""
    t = c.tree
    out = np.zeros((3, 9), dtype=np.int64)
    plans_at(t.size, t.lo, t.hi, t.chi, c.root, c.hole, u, out)
    res: list[ChildPlan | None] = []
    for row in out:
        if not row[0]:
            res.append(None)
            continue
        res.append(
            ChildPlan(
                Component(t, int(row[1]), int(row[2])),
                (int(row[3]), int(row[4])),
                int(row[5]),
                int(row[6]),
                bool(row[7]),
                bool(row[8]),
            )
        )
    return res


def split(c: Component, u: int) -> tuple[Component | None, Component | None, Component | None]:
    """
    Remove ``u`` from ``c``.  Returns ``(C_l, C_r, C_p)``; a part with no
    internal node is returned as None.
    """
    if c.tree.size[u] == 1:
        return None, None, None
    return tuple(p.component if p is not None else None for p in child_plans(c, u))


def mcd_traverse(tree: BinarizedTree) -> Iterator[tuple[Component, int, int]]:
    """
    Depth-first walk of the decomposition.

    Yields ``(component, split node, depth)`` with depth 1 for the whole
    tree.  Children are visited in the order left, right, parent.
    """
    if tree.size[0] <= 1:
        return
    stack = [(Component(tree, 0), 1)]
    while stack:
        c, d = stack.pop()
        u = find_split_node(c)
        yield c, u, d
        cl, cr, cp = split(c, u)
        for child in (cp, cr, cl):
            if child is not None:
                stack.append((child, d + 1))


@dataclass(frozen=True)
class MCDStats:
    max_depth: int
    n_splits: int
    order: np.ndarray


def mcd_stats(tree: BinarizedTree, record: bool = False) -> MCDStats:
    d, k, order = _walk(tree.size, record)
    return MCDStats(int(d), int(k), order)
