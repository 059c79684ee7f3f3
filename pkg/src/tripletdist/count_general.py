"""
Four-color shared-triplet counting for general trees.

For an edge (w, c) of the first tree, leaves under children of w left of c
are red, under c blue, under children right of c green, and outside w
black.  A triplet is shared and anchored there iff, in the second tree,
either a red and a blue leaf meet at a node v with a black leaf outside v
(resolved), or a red, a blue and a green leaf sit in three different child
subtrees of one node (unresolved).

A node's children are folded one at a time into a :class:`ScanState`.  All
right-hand sides of an update read the state from before the update, so
``p_*`` counts pairs from two distinct earlier children and ``t_rgb``
triples from three distinct children.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ._int128 import mul_add, to_int
from .contract import (
    G_AG, G_AX, G_AXG, G_AY, G_BG, G_BX, G_BXG, G_BXLG, G_BXLY, G_BY, G_DEG, G_LABEL,
    ContractedTree, GeneralCounters, lookup,
)
from .count_binary import BLUE, GREEN, RED, _colors_table

__all__ = [
    "ScanState",
    "scan_update",
    "anchored_at_children",
    "anchored_on_edge",
    "count_component_general",
]


@dataclass
class ScanState:
    """
    Running counters over the children seen so far.  Fields may be ints or
    equally shaped numpy arrays (one lane per node).
    """

    a_red: object = 0
    a_blue: object = 0
    a_green: object = 0
    p_red_green: object = 0
    p_red_blue: object = 0
    p_blue_green: object = 0
    t_red_blue_green: object = 0


def scan_update(s: ScanState, red, blue, green) -> ScanState:
    """Fold in the next child subtree with the given color tallies."""
    return ScanState(
        a_red=s.a_red + red,
        a_blue=s.a_blue + blue,
        a_green=s.a_green + green,
        p_red_green=s.p_red_green + s.a_green * red + s.a_red * green,
        p_red_blue=s.p_red_blue + s.a_blue * red + s.a_red * blue,
        p_blue_green=s.p_blue_green + s.a_green * blue + s.a_blue * green,
        t_red_blue_green=s.t_red_blue_green
        + s.p_red_green * blue
        + s.p_red_blue * green
        + s.p_blue_green * red,
    )


def anchored_at_children(v: GeneralCounters, children) -> int:
    """
    Triplets anchored at node ``v`` itself: the removed child subtrees of
    ``v`` seed the state, then every surviving child is folded in.
    """
    s = ScanState(a_red=v.A_red, a_green=v.A_green, p_red_green=v.A_red_green)
    for c in children:
        s = scan_update(s, c.red, c.blue, c.green)
    return s.p_red_blue * v.black_out + s.t_red_blue_green


def anchored_on_edge(v: GeneralCounters) -> int:
    """Triplets anchored at spliced nodes on the edge above ``v``."""
    return (
        v.blue * v.B_red_green
        + v.blue * v.B_red_black
        + v.blue * v.B_red * (v.black_out - v.B_black)
    )


@njit(cache=True)
def count_general(arena, base, length, tab_hi, tab_cls, g_green, total_black, wide, s_cnt):
    """
    One postorder scan of a general contraction.  ``s_cnt[4, depth]`` is
    scratch for per-subtree (red, blue, green, black) tallies including the
    removed leaves on the edge above each subtree.
    """
    hi = np.uint64(0)
    lo = np.uint64(0)
    sp = 0
    for q in range(base, base + length):
        deg = arena[G_DEG, q]
        if deg == 0:
            col = lookup(tab_hi, tab_cls, 0, arena[G_LABEL, q])
            nr = 1 if col == RED else 0
            nb = 1 if col == BLUE else 0
            ng = 1 if col == GREEN else 0
            nk = 1 - nr - nb - ng
        else:
            ax = arena[G_AX, q]
            ag = arena[G_AG, q]
            ay = arena[G_AY, q]
            a_r = ax
            a_b = 0
            if g_green:
                a_g = ag
                p_rg = arena[G_AXG, q]
                nk = ay
            else:
                a_g = 0
                p_rg = 0
                nk = ay + ag
            p_rb = 0
            p_bg = 0
            first = sp - deg
            for c in range(first, sp):
                cr = s_cnt[0, c]
                cb = s_cnt[1, c]
                cg = s_cnt[2, c]
                hi, lo = mul_add(hi, lo, p_rg, cb, wide)
                hi, lo = mul_add(hi, lo, p_rb, cg, wide)
                hi, lo = mul_add(hi, lo, p_bg, cr, wide)
                n_rg = p_rg + a_g * cr + a_r * cg
                n_rb = p_rb + a_b * cr + a_r * cb
                n_bg = p_bg + a_g * cb + a_b * cg
                p_rg = n_rg
                p_rb = n_rb
                p_bg = n_bg
                a_r += cr
                a_b += cb
                a_g += cg
                nk += s_cnt[3, c]
            nr = a_r
            nb = a_b
            ng = a_g
            hi, lo = mul_add(hi, lo, p_rb, total_black - nk, wide)
            sp = first
        # spliced nodes on the edge above q
        bx = arena[G_BX, q]
        bg = arena[G_BG, q]
        by = arena[G_BY, q]
        if nb > 0 and (bx > 0 or bg > 0):
            if g_green:
                pairs = arena[G_BXG, q] + arena[G_BXLY, q]
                b_black = by
            else:
                pairs = arena[G_BXLY, q] + arena[G_BXLG, q]
                b_black = by + bg
            hi, lo = mul_add(hi, lo, nb, pairs, wide)
            hi, lo = mul_add(hi, lo, nb * bx, total_black - nk - b_black, wide)
        s_cnt[0, sp] = nr + bx
        s_cnt[1, sp] = nb
        if g_green:
            s_cnt[2, sp] = ng + bg
            s_cnt[3, sp] = nk + by
        else:
            s_cnt[2, sp] = ng
            s_cnt[3, sp] = nk + by + bg
        sp += 1
    return hi, lo


def count_component_general(c: ContractedTree, colors, wide: bool = False) -> int:
    """
    Shared triplets anchored at the split node's edge, from one scan of ``c``.

    ``colors`` is a :class:`tripletdist.decompose.Colors`: label intervals
    for red, blue and green, whether removed chain-zone leaves count as
    green, and the total number of black leaves.
    """
    if c.mode != "general":
        raise ValueError("count_component_general needs a general contraction")
    tab_hi, tab_cls = _colors_table(colors)
    depth = c.stack_depth + 1
    hi, lo = count_general(np.ascontiguousarray(c.data), 0, c.n_nodes, tab_hi, tab_cls,
                           bool(colors.green_contracted), int(colors.total_black), wide,
                           np.empty((4, depth), np.int64))
    return to_int(hi, lo)
