"""
Shared-triplet counting for binary trees.

With the first tree split at u, leaves under u's left child are red and
leaves under its right child blue.  A triplet anchored at u is shared iff
its two same-colored leaves also pair up first in the second tree; such a
triplet is anchored in the second tree either at a surviving node of the
contraction or at a spliced node on one of its edges.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._int128 import choose2, mul_add, to_int
from .contract import B_LABEL, B_PS, B_TS, BinaryEdgeCounters, ContractedTree, build_table, lookup

__all__ = [
    "RED",
    "BLUE",
    "GREEN",
    "BLACK",
    "shared_at_node",
    "shared_on_edge",
    "count_component_binary",
    "color_table",
]

RED, BLUE, GREEN, BLACK = 1, 2, 3, 4


def _c2(x: int) -> int:
    return x * (x - 1) // 2


def shared_at_node(left: BinaryEdgeCounters, right: BinaryEdgeCounters) -> int:
    """
    Triplets anchored at a surviving node whose children carry ``left`` and
    ``right``: two leaves of one color under one child, one leaf of the
    other color under the other child.
    """
    return (
        _c2(left.red) * right.blue
        + _c2(left.blue) * right.red
        + _c2(right.red) * left.blue
        + _c2(right.blue) * left.red
    )


def shared_on_edge(v: BinaryEdgeCounters) -> int:
    """Triplets anchored at spliced nodes on the edge above ``v``."""
    return _c2(v.blue) * v.ts + v.blue * v.ps


@njit(cache=True)
def color_table(rl, rh, bl, bh, gl, gh, tab_hi, tab_cls, t):
    ilo = np.empty(3, dtype=np.int64)
    ihi = np.empty(3, dtype=np.int64)
    icls = np.empty(3, dtype=np.int64)
    ilo[0] = rl
    ihi[0] = rh
    icls[0] = RED
    ilo[1] = bl
    ihi[1] = bh
    icls[1] = BLUE
    ilo[2] = gl
    ihi[2] = gh
    icls[2] = GREEN
    return build_table(ilo, ihi, icls, 3, BLACK, tab_hi, tab_cls, t)


@njit(cache=True)
def count_binary(arena, base, length, tab_hi, tab_cls, wide, s_red, s_blue):
    """One postorder scan; returns the count as ``(hi, lo)`` uint64 words."""
    hi = np.uint64(0)
    lo = np.uint64(0)
    sp = 0
    for q in range(base, base + length):
        lab = arena[B_LABEL, q]
        if lab > 0:
            col = lookup(tab_hi, tab_cls, 0, lab)
            red = 1 if col == RED else 0
            blue = 1 if col == BLUE else 0
        else:
            lr = s_red[sp - 2]
            lb = s_blue[sp - 2]
            rr = s_red[sp - 1]
            rb = s_blue[sp - 1]
            hi, lo = mul_add(hi, lo, choose2(lr), rb, wide)
            hi, lo = mul_add(hi, lo, choose2(lb), rr, wide)
            hi, lo = mul_add(hi, lo, choose2(rr), lb, wide)
            hi, lo = mul_add(hi, lo, choose2(rb), lr, wide)
            red = lr + rr
            blue = lb + rb
            sp -= 2
        ts = arena[B_TS, q]
        if blue > 0 and ts > 0:
            hi, lo = mul_add(hi, lo, choose2(blue), ts, wide)
            hi, lo = mul_add(hi, lo, blue, arena[B_PS, q], wide)
        s_red[sp] = red + ts
        s_blue[sp] = blue
        sp += 1
    return hi, lo


def _colors_table(colors):
    tab_hi = np.zeros((1, 8), dtype=np.int64)
    tab_cls = np.zeros((1, 8), dtype=np.int64)
    color_table(colors.red[0], colors.red[1], colors.blue[0], colors.blue[1],
                colors.green[0], colors.green[1], tab_hi, tab_cls, 0)
    return tab_hi, tab_cls


def count_component_binary(c: ContractedTree, colors, wide: bool = False) -> int:
    """
    Shared triplets anchored at the split node, from one scan of ``c``.

    ``colors`` gives the red and blue label intervals (a
    :class:`tripletdist.decompose.Colors`); leaves removed into the edge
    counters of ``c`` are red.
    """
    if c.mode != "binary":
        raise ValueError("count_component_binary needs a binary contraction")
    tab_hi, tab_cls = _colors_table(colors)
    depth = c.stack_depth + 1
    hi, lo = count_binary(np.ascontiguousarray(c.data), 0, c.n_nodes, tab_hi, tab_cls,
                          wide, np.empty(depth, np.int64), np.empty(depth, np.int64))
    return to_int(hi, lo)
