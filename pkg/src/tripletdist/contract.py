"""
Contractions of the second tree.

A contraction keeps a subset of the leaves, removes everything else and
splices out the nodes left with one child.  Nothing is forgotten: every
removed leaf is folded into counters on the node or edge it hung from.

Removed leaves fall into three categories, fixed by where they sit relative
to the component of the first tree that owns the contraction:

    X  below the component (always red when counting)
    G  in the orange-chain zone directly above it (green or black)
    Y  anywhere else above it (black)

Binary mode tracks X only, as two edge counters per node: ``ts`` (X leaves
hanging off the edge) and ``ps`` (pairs of X leaves hanging off the same
spliced node).  General mode keeps, per node, an "A" bundle for whole
removed child subtrees and a "B" bundle for the spliced nodes on the edge
above it.

Contractions live in one flat arena of shape ``(fields, capacity)`` in
postorder.  The field layouts are given by the ``B_*`` and ``G_*`` column
constants below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .layout import PostorderTree, postorder_sizes

__all__ = [
    "BinaryEdgeCounters",
    "GeneralCounters",
    "ContractedTree",
    "ContractionStack",
    "StackOverflow",
    "initial_contraction",
    "contract",
    "stack_need",
    "KEEP",
    "CAT_X",
    "CAT_G",
    "CAT_Y",
    "DROP",
]

# leaf classes used by contraction tables
KEEP, CAT_X, CAT_G, CAT_Y, DROP = 0, 1, 2, 3, 4

BIG = np.int64(2**62)

# binary arena columns
B_LABEL, B_TS, B_PS = 0, 1, 2
B_FIELDS = 3

# general arena columns
G_LABEL, G_DEG = 0, 1
G_AX, G_AG, G_AY, G_AXG = 2, 3, 4, 5
G_BX, G_BG, G_BY, G_BXG, G_BXLG, G_BXLY = 6, 7, 8, 9, 10, 11
G_FIELDS = 12

_CATEGORY = {"x": CAT_X, "red": CAT_X, "g": CAT_G, "y": CAT_Y, None: DROP, "drop": DROP}


class StackOverflow(RuntimeError):
    """The contraction arena exceeded its fixed capacity."""


# ---------------------------------------------------------------------- #
# Counter bundles (plain records used by the formula-level operations)


@dataclass
class BinaryEdgeCounters:
    """Tallies of one binary node; ``ts``/``ps`` describe the edge above it."""

    red: int = 0
    blue: int = 0
    ts: int = 0
    ps: int = 0


@dataclass
class GeneralCounters:
    """
    Tallies of one node in general mode.

    ``red``, ``blue``, ``green`` count the leaves of the node's subtree
    (removed ones included) and ``black_out`` the black leaves outside it.
    The ``A_*`` fields describe removed child subtrees of the node; the
    ``B_*`` fields describe spliced nodes on the edge above it, with
    ``B_red_black`` counting (red, black) pairs whose black leaf hangs from
    a spliced node strictly closer to the parent.
    """

    red: int = 0
    blue: int = 0
    green: int = 0
    black_out: int = 0
    A_red: int = 0
    A_green: int = 0
    A_black: int = 0
    A_red_green: int = 0
    B_red: int = 0
    B_green: int = 0
    B_black: int = 0
    B_red_green: int = 0
    B_red_black: int = 0


# ---------------------------------------------------------------------- #
# Tables: label -> class, as sorted runs


@njit(cache=True)
def build_table(ilo, ihi, icls, ni, default, tab_hi, tab_cls, t):
    """
    Write into row ``t`` the runs of the function that maps a label to the
    class of the first interval ``ilo[i]..ihi[i]`` containing it, or to
    ``default``.  Returns the number of runs; the last run ends at BIG.
    """
    bp = np.empty(2 * ni + 1, dtype=np.int64)
    k = 0
    for i in range(ni):
        if ilo[i] <= ihi[i]:
            bp[k] = ilo[i] - 1
            bp[k + 1] = ihi[i]
            k += 2
    bp[k] = BIG
    k += 1
    bp[:k].sort()
    nr = 0
    for j in range(k):
        b = bp[j]
        if b < 1 or (nr > 0 and b <= tab_hi[t, nr - 1]):
            continue
        cls = default
        for i in range(ni):
            if ilo[i] <= b <= ihi[i]:
                cls = icls[i]
                break
        if nr > 0 and tab_cls[t, nr - 1] == cls:
            tab_hi[t, nr - 1] = b
        else:
            tab_hi[t, nr] = b
            tab_cls[t, nr] = cls
            nr += 1
    return nr


@njit(cache=True)
def plan_table(keep_lo, keep_hi, x_max, g_max, tab_hi, tab_cls, t):
    ilo = np.empty(3, dtype=np.int64)
    ihi = np.empty(3, dtype=np.int64)
    icls = np.empty(3, dtype=np.int64)
    ilo[0] = keep_lo
    ihi[0] = keep_hi
    icls[0] = KEEP
    ilo[1] = 1
    ihi[1] = x_max
    icls[1] = CAT_X
    ilo[2] = 1
    ihi[2] = g_max
    icls[2] = CAT_G
    return build_table(ilo, ihi, icls, 3, CAT_Y, tab_hi, tab_cls, t)


@njit(cache=True, inline="always")
def lookup(tab_hi, tab_cls, t, label):
    j = 0
    while label > tab_hi[t, j]:
        j += 1
    return tab_cls[t, j]


def _table_from_classes(cls_of_label: np.ndarray):
    """Runs of a dense class array indexed by label (slot 0 ignored)."""
    vals = cls_of_label[1:]
    if vals.size == 0:
        return np.array([[BIG]], dtype=np.int64), np.array([[CAT_Y]], dtype=np.int64)
    change = np.flatnonzero(np.diff(vals)) + 1
    ends = np.append(change, vals.size)  # exclusive ends, 0-based
    hi = ends.astype(np.int64)  # inclusive label of each run's last element
    cls = vals[ends - 1].astype(np.int64)
    hi[-1] = BIG
    return hi[None, :].copy(), cls[None, :].copy()


# ---------------------------------------------------------------------- #
# Stack depth of a postorder scan


@njit(cache=True)
def stack_need(degree):
    """Largest number of pending subtrees during a postorder scan."""
    sp = 0
    best = 1
    for q in range(degree.shape[0]):
        sp = sp - degree[q] + 1
        if sp > best:
            best = sp
    return best


# ---------------------------------------------------------------------- #
# Binary contraction kernel


@njit(cache=True)
def contract_binary(arena, src, n_src, n_t, tab_hi, tab_cls, keep_x, out_base,
                    out_len, out_need, s_pos, s_a, s_b):
    """
    Contract the binary contraction at ``arena[:, src:src+n_src]`` into
    ``n_t`` targets at once.  Target t is written at ``out_base[t]``; its
    node count is returned in ``out_len[t]`` and the scan-stack depth it
    needs in ``out_need[t]``.  Returns 0, or 1 when some target keeps no
    leaf.
    """
    out_sp = np.zeros(n_t, dtype=np.int64)
    for t in range(n_t):
        out_len[t] = 0
        out_need[t] = 1
    sp = 0
    for q in range(src, src + n_src):
        lab = arena[B_LABEL, q]
        ots = arena[B_TS, q]
        ops = arena[B_PS, q]
        if lab > 0:
            for t in range(n_t):
                cls = lookup(tab_hi, tab_cls, t, lab)
                kx = keep_x[t]
                if cls == KEEP:
                    o = out_base[t] + out_len[t]
                    out_len[t] += 1
                    arena[B_LABEL, o] = lab
                    out_sp[t] += 1
                    if out_sp[t] > out_need[t]:
                        out_need[t] = out_sp[t]
                    s_pos[t, sp] = o
                    s_a[t, sp] = ots if kx else 0
                    s_b[t, sp] = ops if kx else 0
                else:
                    s_pos[t, sp] = -1
                    s_a[t, sp] = (1 if cls == CAT_X else 0) + (ots if kx else 0)
                    s_b[t, sp] = 0
            sp += 1
            continue
        i = sp - 2
        j = sp - 1
        for t in range(n_t):
            kx = keep_x[t]
            et = ots if kx else 0
            ep = ops if kx else 0
            pl = s_pos[t, i]
            pr = s_pos[t, j]
            if pl >= 0 and pr >= 0:
                arena[B_TS, pl] = s_a[t, i]
                arena[B_PS, pl] = s_b[t, i]
                arena[B_TS, pr] = s_a[t, j]
                arena[B_PS, pr] = s_b[t, j]
                o = out_base[t] + out_len[t]
                out_len[t] += 1
                arena[B_LABEL, o] = 0
                out_sp[t] -= 1
                s_pos[t, i] = o
                s_a[t, i] = et
                s_b[t, i] = ep
            elif pl >= 0:
                x = s_a[t, j]
                s_a[t, i] += x + et
                s_b[t, i] += x * (x - 1) // 2 + ep
            elif pr >= 0:
                x = s_a[t, i]
                s_pos[t, i] = pr
                s_a[t, i] = s_a[t, j] + x + et
                s_b[t, i] = s_b[t, j] + x * (x - 1) // 2 + ep
            else:
                s_a[t, i] = s_a[t, i] + s_a[t, j] + et
        sp -= 1
    status = 0
    for t in range(n_t):
        p = s_pos[t, 0]
        if p < 0:
            status = 1
            continue
        arena[B_TS, p] = s_a[t, 0]
        arena[B_PS, p] = s_b[t, 0]
    return status


# ---------------------------------------------------------------------- #
# General contraction kernel
#
# Per target the scan stack holds, for each finished subtree, either the
# output position of its surviving top node together with the pending
# edge segment above it (x, g, y, xg, xlg, xly), or -1 and the subtree's
# category totals (x, g, y) in the first three slots.


@njit(cache=True)
def contract_general(arena, src, n_src, n_t, tab_hi, tab_cls, keep_x, keep_g,
                     out_base, out_len, out_need, s_pos, s_v):
    out_sp = np.zeros(n_t, dtype=np.int64)
    for t in range(n_t):
        out_len[t] = 0
        out_need[t] = 1
    sp = 0
    for q in range(src, src + n_src):
        lab = arena[G_LABEL, q]
        deg = arena[G_DEG, q]
        first = sp - deg
        for t in range(n_t):
            kx = keep_x[t]
            kg = keep_g[t]
            # edge bundle above q, with categories remapped for this target
            bx = arena[G_BX, q]
            bg = arena[G_BG, q]
            by = arena[G_BY, q]
            bxg = arena[G_BXG, q]
            bxlg = arena[G_BXLG, q]
            bxly = arena[G_BXLY, q]
            if not kg:
                by += bg
                bxly += bxlg
                bg = 0
                bxlg = 0
                bxg = 0
            if not kx:
                by += bx
                bx = 0
                bxg = 0
                bxlg = 0
                bxly = 0
            if deg == 0:
                cls = lookup(tab_hi, tab_cls, t, lab)
                if cls == KEEP:
                    o = out_base[t] + out_len[t]
                    out_len[t] += 1
                    arena[G_LABEL, o] = lab
                    arena[G_DEG, o] = 0
                    out_sp[t] += 1
                    if out_sp[t] > out_need[t]:
                        out_need[t] = out_sp[t]
                    arena[G_AX, o] = 0
                    arena[G_AG, o] = 0
                    arena[G_AY, o] = 0
                    arena[G_AXG, o] = 0
                    s_pos[t, sp] = o
                    s_v[t, 0, sp] = bx
                    s_v[t, 1, sp] = bg
                    s_v[t, 2, sp] = by
                    s_v[t, 3, sp] = bxg
                    s_v[t, 4, sp] = bxlg
                    s_v[t, 5, sp] = bxly
                else:
                    s_pos[t, sp] = -1
                    s_v[t, 0, sp] = bx + (1 if cls == CAT_X else 0)
                    s_v[t, 1, sp] = bg + (1 if cls == CAT_G else 0)
                    s_v[t, 2, sp] = by + (1 if cls >= CAT_Y else 0)
                continue
            # removed material hanging directly at q: old A plus pruned children
            ax = arena[G_AX, q]
            ag = arena[G_AG, q]
            ay = arena[G_AY, q]
            axg = arena[G_AXG, q]
            if not kg:
                ay += ag
                ag = 0
                axg = 0
            if not kx:
                ay += ax
                ax = 0
                axg = 0
            alive = 0
            last = -1
            for c in range(first, sp):
                if s_pos[t, c] >= 0:
                    alive += 1
                    last = c
                else:
                    x = s_v[t, 0, c]
                    g = s_v[t, 1, c]
                    axg += ax * g + ag * x
                    ax += x
                    ag += g
                    ay += s_v[t, 2, c]
            if alive == 0:
                s_pos[t, first] = -1
                s_v[t, 0, first] = ax + bx
                s_v[t, 1, first] = ag + bg
                s_v[t, 2, first] = ay + by
            elif alive == 1:
                # q is spliced out: lower segment, then q itself, then the old edge
                lx = s_v[t, 0, last]
                lg = s_v[t, 1, last]
                ly = s_v[t, 2, last]
                lxg = s_v[t, 3, last]
                lxlg = s_v[t, 4, last] + lx * ag
                lxly = s_v[t, 5, last] + lx * ay
                lxg += axg
                lx += ax
                lg += ag
                ly += ay
                lxlg += bxlg + lx * bg
                lxly += bxly + lx * by
                s_pos[t, first] = s_pos[t, last]
                s_v[t, 0, first] = lx + bx
                s_v[t, 1, first] = lg + bg
                s_v[t, 2, first] = ly + by
                s_v[t, 3, first] = lxg + bxg
                s_v[t, 4, first] = lxlg
                s_v[t, 5, first] = lxly
            else:
                for c in range(first, sp):
                    p = s_pos[t, c]
                    if p >= 0:
                        arena[G_BX, p] = s_v[t, 0, c]
                        arena[G_BG, p] = s_v[t, 1, c]
                        arena[G_BY, p] = s_v[t, 2, c]
                        arena[G_BXG, p] = s_v[t, 3, c]
                        arena[G_BXLG, p] = s_v[t, 4, c]
                        arena[G_BXLY, p] = s_v[t, 5, c]
                o = out_base[t] + out_len[t]
                out_len[t] += 1
                arena[G_LABEL, o] = 0
                arena[G_DEG, o] = alive
                out_sp[t] -= alive - 1
                arena[G_AX, o] = ax
                arena[G_AG, o] = ag
                arena[G_AY, o] = ay
                arena[G_AXG, o] = axg
                s_pos[t, first] = o
                s_v[t, 0, first] = bx
                s_v[t, 1, first] = bg
                s_v[t, 2, first] = by
                s_v[t, 3, first] = bxg
                s_v[t, 4, first] = bxlg
                s_v[t, 5, first] = bxly
        if deg == 0:
            sp += 1
        else:
            sp = first + 1
    status = 0
    for t in range(n_t):
        p = s_pos[t, 0]
        if p < 0:
            status = 1
            continue
        arena[G_BX, p] = s_v[t, 0, 0]
        arena[G_BG, p] = s_v[t, 1, 0]
        arena[G_BY, p] = s_v[t, 2, 0]
        arena[G_BXG, p] = s_v[t, 3, 0]
        arena[G_BXLG, p] = s_v[t, 4, 0]
        arena[G_BXLY, p] = s_v[t, 5, 0]
    return status


# ---------------------------------------------------------------------- #
# Python-facing contraction objects


@dataclass(eq=False)
class ContractedTree:
    """
    A contraction in postorder.

    ``data`` has one row per arena field (see ``B_*`` / ``G_*``) and one
    column per node.  The counters stored on the root describe the removed
    material above the root.
    """

    mode: str
    data: np.ndarray
    stack_depth: int = field(default=0)

    def __post_init__(self):
        if self.mode not in ("binary", "general"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.stack_depth:
            self.stack_depth = int(stack_need(self.degree))

    @property
    def n_nodes(self) -> int:
        return int(self.data.shape[1])

    @property
    def label(self) -> np.ndarray:
        return self.data[0]

    @property
    def degree(self) -> np.ndarray:
        if self.mode == "general":
            return self.data[G_DEG]
        return np.where(self.data[B_LABEL] > 0, 0, 2).astype(np.int64)

    @property
    def layout(self) -> PostorderTree:
        deg = np.ascontiguousarray(self.degree)
        return PostorderTree(postorder_sizes(deg), self.label.copy(), deg)

    def leaves(self) -> np.ndarray:
        return self.label[self.label > 0]

    def column(self, name: str) -> np.ndarray:
        """Counter row by name, e.g. ``"ts"`` or ``"bxly"``."""
        names = _BINARY_NAMES if self.mode == "binary" else _GENERAL_NAMES
        return self.data[names.index(name)]

    @property
    def root_side(self):
        """Counters of the removed material above the root."""
        r = self.n_nodes - 1
        d = self.data[:, r]
        if self.mode == "binary":
            return BinaryEdgeCounters(ts=int(d[B_TS]), ps=int(d[B_PS]))
        return GeneralCounters(
            B_red=int(d[G_BX]), B_green=int(d[G_BG]), B_black=int(d[G_BY]),
            B_red_green=int(d[G_BXG]), B_red_black=int(d[G_BXLY]),
        )


_BINARY_NAMES = ["label", "ts", "ps"]
_GENERAL_NAMES = ["label", "degree", "ax", "ag", "ay", "axg",
                  "bx", "bg", "by", "bxg", "bxlg", "bxly"]


def initial_contraction(t2: PostorderTree, mode: str) -> ContractedTree:
    """The whole second tree as a contraction with every counter at zero."""
    if mode == "binary":
        if np.any((t2.degree != 0) & (t2.degree != 2)):
            raise ValueError("binary mode needs a binary tree")
        data = np.zeros((B_FIELDS, t2.n_nodes), dtype=np.int64)
    elif mode == "general":
        data = np.zeros((G_FIELDS, t2.n_nodes), dtype=np.int64)
        data[G_DEG] = t2.degree
    else:
        raise ValueError(f"unknown mode {mode!r}")
    data[0] = t2.label
    return ContractedTree(mode, data)


def contract(parent: ContractedTree, keep, pruned=None, *, keep_x: bool = True,
             keep_g: bool = True) -> ContractedTree:
    """
    Restrict ``parent`` to the leaves in ``keep``.

    Parameters
    ----------
    parent : ContractedTree
    keep : iterable of int or (lo, hi) tuple
        Labels that survive.
    pruned : mapping or callable, optional
        Category of each removed leaf: ``"x"`` (also ``"red"``), ``"g"``,
        ``"y"`` or None to forget it.  Binary mode only tracks ``"x"``.
        Default: every removed leaf is ``"y"``.
    keep_x, keep_g : bool
        Whether previously contracted X / G leaves keep their category.
        Otherwise they become Y (general mode) or are forgotten (binary).
    """
    labels = parent.leaves()
    if isinstance(keep, tuple) and len(keep) == 2:
        keep_set = set(range(keep[0], keep[1] + 1)) & set(labels.tolist())
    else:
        keep_set = {int(v) for v in keep}
    missing = keep_set - set(labels.tolist())
    if missing:
        raise ValueError(f"labels {sorted(missing)} are not leaves of the parent")
    if not keep_set:
        raise ValueError("a contraction must keep at least one leaf")
    top = int(labels.max())
    cls = np.full(top + 1, CAT_Y, dtype=np.int64)
    for lab in labels.tolist():
        if lab in keep_set:
            cls[lab] = KEEP
        elif pruned is not None:
            cat = pruned(lab) if callable(pruned) else pruned.get(lab, "y")
            cls[lab] = _CATEGORY[cat]
    if parent.mode == "binary":
        cls[cls == CAT_G] = DROP
        cls[cls == CAT_Y] = DROP
    tab_hi, tab_cls = _table_from_classes(cls)

    m = parent.n_nodes
    bound = 2 * len(keep_set) - 1
    arena = np.zeros((parent.data.shape[0], m + bound), dtype=np.int64)
    arena[:, :m] = parent.data
    depth = parent.stack_depth + 1
    out_base = np.array([m], dtype=np.int64)
    out_len = np.zeros(1, dtype=np.int64)
    out_need = np.zeros(1, dtype=np.int64)
    s_pos = np.empty((1, depth), dtype=np.int64)
    if parent.mode == "binary":
        s_a = np.empty((1, depth), dtype=np.int64)
        s_b = np.empty((1, depth), dtype=np.int64)
        contract_binary(arena, 0, m, 1, tab_hi, tab_cls,
                        np.array([keep_x]), out_base, out_len, out_need, s_pos, s_a, s_b)
    else:
        s_v = np.empty((1, 6, depth), dtype=np.int64)
        contract_general(arena, 0, m, 1, tab_hi, tab_cls, np.array([keep_x]),
                         np.array([keep_g]), out_base, out_len, out_need, s_pos, s_v)
    k = int(out_len[0])
    return ContractedTree(parent.mode, arena[:, m:m + k].copy(), int(out_need[0]))


class ContractionStack:
    """
    Array-backed LIFO of contractions.

    All contractions share one arena of ``capacity`` node slots; pushing
    beyond it raises :class:`StackOverflow`.
    """

    def __init__(self, mode: str, capacity: int):
        self.mode = mode
        self.capacity = int(capacity)
        fields = B_FIELDS if mode == "binary" else G_FIELDS
        self.arena = np.zeros((fields, self.capacity), dtype=np.int64)
        self._tops: list[tuple[int, int, int]] = []
        self.occupancy = 0
        self.peak = 0

    def __len__(self) -> int:
        return len(self._tops)

    def push(self, c: ContractedTree) -> None:
        if c.mode != self.mode:
            raise ValueError("contraction mode does not match the stack")
        k = c.n_nodes
        if self.occupancy + k > self.capacity:
            raise StackOverflow(
                f"contraction of {k} nodes does not fit: {self.occupancy} of "
                f"{self.capacity} slots in use"
            )
        a = self.occupancy
        self.arena[:, a:a + k] = c.data
        self._tops.append((a, k, c.stack_depth))
        self.occupancy += k
        self.peak = max(self.peak, self.occupancy)

    def peek(self) -> ContractedTree:
        a, k, depth = self._tops[-1]
        return ContractedTree(self.mode, self.arena[:, a:a + k].copy(), depth)

    def pop(self) -> ContractedTree:
        if not self._tops:
            raise IndexError("pop from an empty contraction stack")
        c = self.peek()
        self._tops.pop()
        self.occupancy -= c.n_nodes
        return c
