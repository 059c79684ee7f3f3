"""
Triplet distance: D(T1, T2) = C(n, 3) - S(T1, T2).

The fast algorithms binarize and relabel T1, then walk its modified
centroid decomposition depth first.  Each component owns a contraction of
T2 restricted to the component's leaves; at the component's split node the
contraction is scanned once to count shared triplets anchored there, and
once more to produce the (up to three) child contractions, which are
pushed above it on an array-backed stack.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import comb

import numpy as np
from numba import njit

from ._int128 import WIDE_THRESHOLD, add, to_int
from .contract import B_FIELDS, G_DEG, G_FIELDS, contract_binary, contract_general, plan_table, stack_need
from .count_binary import color_table, count_binary
from .count_general import count_general
from .decompose import colors_at, plans_at, split_node
from .layout import to_postorder, to_preorder
from .newick import Tree, validate_pair
from .oracle import naive_shared, quadratic_binary_shared, quadratic_general_shared
from .preprocess import prepare_first

__all__ = [
    "ALGORITHMS",
    "InvariantError",
    "RunStats",
    "Result",
    "compute",
    "shared_triplets",
    "triplet_distance",
    "debug_enabled",
]

ALGORITHMS = ("auto", "binary_fast", "general_fast", "quadratic", "naive")

OK = 0
ERR_EMPTY = 1
ERR_CAPACITY = 2
ERR_PATH = 3

_MESSAGES = {
    ERR_EMPTY: "a child contraction kept no leaf",
    ERR_CAPACITY: "contraction stack exceeded its capacity of 24n node slots",
    ERR_PATH: "a decomposition path holds more than 8n contraction nodes",
}

STACK_FACTOR = 24
PATH_FACTOR = 8
TRACE_COLS = 6  # root, hole, split, depth, nodes, path nodes


class InvariantError(RuntimeError):
    """An internal bound was violated; the result would not be trustworthy."""


def debug_enabled() -> bool:
    return os.environ.get("TRIPLETDIST_DEBUG_ASSERT", "") == "1"


@njit(cache=True)
def _grow2(a, new_cols, used):
    b = np.zeros((a.shape[0], new_cols), dtype=a.dtype)
    b[:, :used] = a[:, :used]
    return b


@njit(cache=True)
def _grow3(a, new_depth):
    b = np.empty((a.shape[0], a.shape[1], new_depth), dtype=a.dtype)
    return b


@njit(cache=True)
def _traverse(general, bsize, orange, lo, hi, chi, n, label2, degree2, wide, debug,
              trace, hard_cap, path_cap):
    n2 = label2.shape[0]
    fields = G_FIELDS if general else B_FIELDS
    cap = min(hard_cap, max(4 * n2, 64))
    arena = np.zeros((fields, cap), dtype=np.int64)
    arena[0, :n2] = label2
    if general:
        arena[G_DEG, :n2] = degree2

    depth = stack_need(degree2) + 1
    s_pos = np.empty((3, depth), dtype=np.int64)
    s_a = np.empty((3, depth), dtype=np.int64)
    s_b = np.empty((3, depth), dtype=np.int64)
    s_v = np.empty((3, 6, depth if general else 1), dtype=np.int64)
    s_cnt = np.empty((4, depth), dtype=np.int64)

    tab_hi_c = np.zeros((1, 8), dtype=np.int64)
    tab_cls_c = np.zeros((1, 8), dtype=np.int64)
    tab_hi_p = np.zeros((3, 8), dtype=np.int64)
    tab_cls_p = np.zeros((3, 8), dtype=np.int64)
    keep_x = np.zeros(3, dtype=np.bool_)
    keep_g = np.zeros(3, dtype=np.bool_)
    out_base = np.zeros(3, dtype=np.int64)
    out_len = np.zeros(3, dtype=np.int64)
    out_need = np.zeros(3, dtype=np.int64)
    tmap = np.zeros(3, dtype=np.int64)
    plans = np.zeros((3, 9), dtype=np.int64)

    n_trace = (bsize.shape[0] - 1) // 2 if trace else 0
    tr = np.zeros((n_trace, TRACE_COLS), dtype=np.int64)
    tr_count = np.zeros((n_trace, 2), dtype=np.uint64)

    ccap = 64
    c_r = np.empty(ccap, dtype=np.int64)
    c_y = np.empty(ccap, dtype=np.int64)
    c_base = np.empty(ccap, dtype=np.int64)
    c_len = np.empty(ccap, dtype=np.int64)
    c_need = np.empty(ccap, dtype=np.int64)
    c_d = np.empty(ccap, dtype=np.int64)
    c_path = np.empty(ccap, dtype=np.int64)
    ctop = 0

    s_hi = np.uint64(0)
    s_lo = np.uint64(0)
    peak = n2
    max_depth = 0
    max_path = 0
    n_split = 0
    status = 0

    if bsize[0] > 1:
        c_r[0] = 0
        c_y[0] = -1
        c_base[0] = 0
        c_len[0] = n2
        c_need[0] = depth - 1
        c_d[0] = 1
        c_path[0] = n2
        ctop = 1

    while ctop > 0:
        ctop -= 1
        r = c_r[ctop]
        y = c_y[ctop]
        base = c_base[ctop]
        ln = c_len[ctop]
        need_here = c_need[ctop]
        d = c_d[ctop]
        path = c_path[ctop]
        if d > max_depth:
            max_depth = d
        if path > max_path:
            max_path = path
        if debug and path > path_cap:
            status = ERR_PATH
            break
        if need_here + 1 > depth:
            depth = 2 * (need_here + 1)
            s_pos = np.empty((3, depth), dtype=np.int64)
            s_a = np.empty((3, depth), dtype=np.int64)
            s_b = np.empty((3, depth), dtype=np.int64)
            if general:
                s_v = _grow3(s_v, depth)
            s_cnt = np.empty((4, depth), dtype=np.int64)

        u = split_node(bsize, r, y)
        rl, rh, bl, bh, gl, gh, gg, tb = colors_at(bsize, orange, lo, hi, chi, n, r, y, u)
        color_table(rl, rh, bl, bh, gl, gh, tab_hi_c, tab_cls_c, 0)
        if general:
            h, l = count_general(arena, base, ln, tab_hi_c, tab_cls_c, gg, tb, wide, s_cnt)
        else:
            h, l = count_binary(arena, base, ln, tab_hi_c, tab_cls_c, wide, s_cnt[0], s_cnt[1])
        s_hi, s_lo = add(s_hi, s_lo, l)
        s_hi = s_hi + h
        if trace:
            tr[n_split, 0] = r
            tr[n_split, 1] = y
            tr[n_split, 2] = u
            tr[n_split, 3] = d
            tr[n_split, 4] = ln
            tr[n_split, 5] = path
            tr_count[n_split, 0] = h
            tr_count[n_split, 1] = l
        n_split += 1

        plans_at(bsize, lo, hi, chi, r, y, u, plans)
        end = base + ln
        reserve = 0
        nt = 0
        # arena order: part above u lowest, then right, then left on top
        for idx in (2, 1, 0):
            if plans[idx, 0] == 0:
                continue
            tmap[nt] = idx
            klo = plans[idx, 3]
            khi = plans[idx, 4]
            plan_table(klo, khi, plans[idx, 5], plans[idx, 6], tab_hi_p, tab_cls_p, nt)
            keep_x[nt] = plans[idx, 7] == 1
            keep_g[nt] = plans[idx, 8] == 1
            out_base[nt] = end + reserve
            reserve += 2 * (khi - klo + 1) - 1
            nt += 1
        if nt == 0:
            continue
        need = end + reserve
        if need > cap:
            if need > hard_cap:
                status = ERR_CAPACITY
                break
            cap = min(hard_cap, max(need, cap + cap // 2))
            arena = _grow2(arena, cap, end)
        if general:
            st = contract_general(arena, base, ln, nt, tab_hi_p, tab_cls_p, keep_x, keep_g,
                                  out_base, out_len, out_need, s_pos, s_v)
        else:
            st = contract_binary(arena, base, ln, nt, tab_hi_p, tab_cls_p, keep_x,
                                 out_base, out_len, out_need, s_pos, s_a, s_b)
        if st != 0:
            status = ERR_EMPTY
            break
        live = out_base[nt - 1] + out_len[nt - 1]
        if live > peak:
            peak = live

        if ctop + 3 > ccap:
            ccap *= 2
            c_r = np.concatenate((c_r[:ctop], np.empty(ccap - ctop, dtype=np.int64)))
            c_y = np.concatenate((c_y[:ctop], np.empty(ccap - ctop, dtype=np.int64)))
            c_base = np.concatenate((c_base[:ctop], np.empty(ccap - ctop, dtype=np.int64)))
            c_len = np.concatenate((c_len[:ctop], np.empty(ccap - ctop, dtype=np.int64)))
            c_need = np.concatenate((c_need[:ctop], np.empty(ccap - ctop, dtype=np.int64)))
            c_d = np.concatenate((c_d[:ctop], np.empty(ccap - ctop, dtype=np.int64)))
            c_path = np.concatenate((c_path[:ctop], np.empty(ccap - ctop, dtype=np.int64)))

        # children stay where they were written; the parent's slots are
        # reclaimed once the last of them is popped
        for k in range(nt):
            idx = tmap[k]
            c_r[ctop] = plans[idx, 1]
            c_y[ctop] = plans[idx, 2]
            c_base[ctop] = out_base[k]
            c_len[ctop] = out_len[k]
            c_need[ctop] = out_need[k]
            c_d[ctop] = d + 1
            c_path[ctop] = path + out_len[k]
            ctop += 1

    return s_hi, s_lo, peak, max_depth, max_path, n_split, status, tr, tr_count


# ---------------------------------------------------------------------- #
# Python API


@dataclass
class RunStats:
    """Instrumentation of one fast run (node counts are arena slots)."""

    n: int = 0
    peak_stack_nodes: int = 0
    max_depth: int = 0
    max_path_nodes: int = 0
    n_splits: int = 0
    wide: bool = False
    trace: tuple | None = field(default=None, repr=False)


@dataclass
class Result:
    n: int
    shared: int
    distance: int
    algorithm: str
    stats: RunStats | None = None


def _fast(t1: Tree, t2: Tree, general: bool, debug: bool, trace: bool,
          wide: bool | None = None) -> tuple[int, RunStats]:
    n = t1.n_leaves
    bt, t2r, _ = prepare_first(to_preorder(t1), to_postorder(t2))
    if wide is None:
        wide = n > WIDE_THRESHOLD
    hard_cap = STACK_FACTOR * n
    s_hi, s_lo, peak, depth, path, k, status, tr, tr_count = _traverse(
        general, bt.size, bt.orange, bt.lo, bt.hi, bt.chi, n,
        t2r.label, t2r.degree, wide, debug, trace, hard_cap, PATH_FACTOR * n,
    )
    if status != OK:
        raise InvariantError(_MESSAGES[int(status)])
    stats = RunStats(n, int(peak), int(depth), int(path), int(k), bool(wide))
    if trace:
        counts = [to_int(a, b) for a, b in tr_count[:k]]
        stats.trace = (tr[:k].copy(), counts)
    return to_int(s_hi, s_lo), stats


def compute(t1: Tree, t2: Tree, algorithm: str = "auto", *, debug: bool | None = None,
            trace: bool = False, wide: bool | None = None) -> Result:
    """
    Shared triplets and distance with run statistics.

    ``debug`` (default: the ``TRIPLETDIST_DEBUG_ASSERT`` environment
    variable) turns on the per-path bound check.  ``wide`` forces the
    128-bit product path on or off; by default it is used for more than
    2,097,152 leaves.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    labels = validate_pair(t1, t2)
    n = labels.n
    total = comb(n, 3)
    if debug is None:
        debug = debug_enabled()
    both_binary = t1.is_binary and t2.is_binary
    if algorithm == "auto":
        algorithm = "binary_fast" if both_binary else "general_fast"
    if algorithm == "binary_fast" and not both_binary:
        raise ValueError("binary_fast needs two binary trees")
    if n < 3:
        return Result(n, 0, 0, algorithm, RunStats(n))
    stats = None
    if algorithm == "binary_fast":
        s, stats = _fast(t1, t2, False, debug, trace, wide)
    elif algorithm == "general_fast":
        s, stats = _fast(t1, t2, True, debug, trace, wide)
    elif algorithm == "quadratic":
        s = quadratic_binary_shared(t1, t2) if both_binary else quadratic_general_shared(t1, t2)
    else:
        s = naive_shared(t1, t2)
    return Result(n, s, total - s, algorithm, stats)


def shared_triplets(t1: Tree, t2: Tree, algorithm: str = "auto") -> int:
    """Number of leaf triples with the same topology in both trees."""
    return compute(t1, t2, algorithm).shared


def triplet_distance(t1: Tree, t2: Tree, algorithm: str = "auto") -> int:
    """Number of leaf triples whose topologies differ."""
    return compute(t1, t2, algorithm).distance


# ---------------------------------------------------------------------- #
# Reference traversal built from the Python-level operations


@dataclass
class ReferenceStep:
    component: object
    split: int
    depth: int
    contraction: object
    count: int
    label_map: object = None


def reference_steps(t1: Tree, t2: Tree, mode: str):
    """
    Walk the decomposition with :class:`ContractionStack` and the public
    ``contract`` / ``count_component_*`` operations, yielding one
    :class:`ReferenceStep` per split.  Slow; meant for tests.

    Leaf labels inside the steps are the relabelled ones; every step
    carries the :class:`LabelMap` from original to relabelled.
    """
    from .contract import ContractionStack, contract, initial_contraction
    from .count_binary import count_component_binary
    from .count_general import count_component_general
    from .decompose import Component, child_plans, find_split_node, split_colors

    validate_pair(t1, t2)
    n = t1.n_leaves
    bt, t2r, lmap = prepare_first(to_preorder(t1), to_postorder(t2))
    if bt.size[0] <= 1:
        return
    counter = count_component_binary if mode == "binary" else count_component_general
    stack = ContractionStack(mode, STACK_FACTOR * n)
    stack.push(initial_contraction(t2r, mode))
    comps = [(Component(bt, 0), 1)]
    while comps:
        comp, d = comps.pop()
        cur = stack.pop()
        u = find_split_node(comp)
        colors = split_colors(comp, u)
        yield ReferenceStep(comp, u, d, cur, counter(cur, colors), lmap)
        plans = child_plans(comp, u)
        for plan in (plans[2], plans[1], plans[0]):
            if plan is None:
                continue

            def category(lab, plan=plan):
                if lab <= plan.x_max:
                    return "x"
                if lab <= plan.g_max:
                    return "g"
                return "y"

            child = contract(cur, plan.keep, category, keep_x=plan.keep_x, keep_g=plan.keep_g)
            stack.push(child)
            comps.append((plan.component, d + 1))
