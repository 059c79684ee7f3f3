"""
Reference implementations used to check the fast algorithms.

``naive_shared`` compares all C(n, 3) triples via LCA depths.  The two
quadratic versions anchor triplets in the first tree and scan the whole
second tree once per anchor.  None of them share code with the fast path
except the documented counting formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .count_general import ScanState, scan_update
from .newick import Tree, validate_pair

__all__ = [
    "Topology",
    "topology_of",
    "lca_depths",
    "triple_codes",
    "naive_shared",
    "naive_different",
    "quadratic_binary_shared",
    "quadratic_general_shared",
]


@dataclass(frozen=True)
class Topology:
    """``pair`` is the cherry (sorted) and ``out`` the outgroup; both None if unresolved."""

    labels: tuple[int, int, int]
    pair: tuple[int, int] | None
    out: int | None

    @property
    def resolved(self) -> bool:
        return self.pair is not None

    def __str__(self) -> str:
        sep = "" if max(self.labels) < 10 else ","
        if self.pair is None:
            return sep.join(map(str, self.labels))
        return f"{self.pair[0]}{sep}{self.pair[1]}|{self.out}"


def _leaf_spans(tree: Tree):
    """Leaf order and, per node, its first leaf index and leaf count."""
    deg = tree.degree
    is_leaf = deg == 0
    order = tree.label[is_leaf]
    before = np.concatenate(([0], np.cumsum(is_leaf)[:-1]))
    # leaves in the subtree of p: positions p .. p+size-1
    cum = np.concatenate(([0], np.cumsum(is_leaf)))
    p = np.arange(tree.n_nodes)
    count = cum[p + tree.size] - cum[p]
    return order, before, count


def _depths(tree: Tree) -> np.ndarray:
    from .layout import preorder_depths

    return preorder_depths(tree.size, tree.degree)


def lca_depths(tree: Tree) -> np.ndarray:
    """``D[a-1, b-1]`` = depth of the LCA of leaves a and b (leaf depth on the diagonal)."""
    n = tree.n_leaves
    order, first, count = _leaf_spans(tree)
    depth = _depths(tree)
    pos = np.empty(n, dtype=np.int64)
    pos[order - 1] = np.arange(n)
    D = np.zeros((n, n), dtype=np.int32)
    # preorder: deeper nodes overwrite their ancestors
    for p in np.flatnonzero(tree.degree > 0):
        a = first[p]
        b = a + count[p]
        idx = order[a:b] - 1
        D[np.ix_(idx, idx)] = depth[p]
    D[np.arange(n), np.arange(n)] = depth[tree.degree == 0][pos]
    return D


@lru_cache(maxsize=8)
def _triples(n: int):
    flat = np.fromiter(
        (v for tri in combinations(range(n), 3) for v in tri),
        dtype=np.int32,
        count=3 * (n * (n - 1) * (n - 2) // 6),
    )
    tri = flat.reshape(-1, 3)
    return tri[:, 0].copy(), tri[:, 1].copy(), tri[:, 2].copy()


def triple_codes(tree: Tree) -> np.ndarray:
    """
    Topology code of every triple i<j<k (0-based labels, lexicographic):
    0 = ij|k, 1 = ik|j, 2 = jk|i, 3 = unresolved.
    """
    n = tree.n_leaves
    if n < 3:
        return np.zeros(0, dtype=np.int8)
    D = lca_depths(tree)
    i, j, k = _triples(n)
    dij = D[i, j]
    dik = D[i, k]
    djk = D[j, k]
    code = np.full(i.shape[0], 3, dtype=np.int8)
    code[djk > dij] = 2
    code[dik > dij] = 1
    code[dij > dik] = 0
    return code


def topology_of(tree: Tree, x: int, y: int, z: int) -> Topology:
    labels = tree.leaves()
    present = set(labels.tolist())
    for v in (x, y, z):
        if v not in present:
            raise KeyError(f"unknown label {v}")
    if len({x, y, z}) != 3:
        raise ValueError("labels must be distinct")
    n = tree.n_leaves
    # work on a relabelled copy so lca_depths can index by label
    remap = np.zeros(int(labels.max()) + 1, dtype=np.int64)
    remap[labels] = np.arange(1, n + 1)
    t = Tree(tree.size, tree.degree, np.where(tree.label > 0, remap[tree.label], 0))
    D = lca_depths(t)
    a, b, c = (int(remap[v]) - 1 for v in (x, y, z))
    dab, dac, dbc = D[a, b], D[a, c], D[b, c]
    if dab > dac:
        return Topology((x, y, z), tuple(sorted((x, y))), z)
    if dac > dab:
        return Topology((x, y, z), tuple(sorted((x, z))), y)
    if dbc > dab:
        return Topology((x, y, z), tuple(sorted((y, z))), x)
    return Topology((x, y, z), None, None)


def naive_shared(t1: Tree, t2: Tree) -> int:
    validate_pair(t1, t2)
    if t1.n_leaves < 3:
        return 0
    return int(np.count_nonzero(triple_codes(t1) == triple_codes(t2)))


def naive_different(t1: Tree, t2: Tree) -> int:
    validate_pair(t1, t2)
    if t1.n_leaves < 3:
        return 0
    return int(np.count_nonzero(triple_codes(t1) != triple_codes(t2)))


def _color_sums(t2: Tree, member: np.ndarray):
    """Per node of ``t2``: number of leaves whose label is flagged in ``member``."""
    order, first, count = _leaf_spans(t2)
    cs = np.concatenate(([0], np.cumsum(member[order].astype(np.int64))))
    return cs[first + count] - cs[first]


def _children_matrix(t: Tree):
    """Rows: internal nodes; columns: child positions, padded with index n (a dummy)."""
    internal = np.flatnonzero(t.degree > 0)
    k = int(t.degree.max()) if internal.size else 0
    mat = np.full((internal.size, k), t.n_nodes, dtype=np.int64)
    for row, p in enumerate(internal):
        c = p + 1
        for i in range(int(t.degree[p])):
            mat[row, i] = c
            c += int(t.size[c])
    return internal, mat


def quadratic_binary_shared(t1: Tree, t2: Tree) -> int:
    """Per internal node u of ``t1``: color its two sides, scan ``t2`` with the node formula."""
    validate_pair(t1, t2)
    if not (t1.is_binary and t2.is_binary):
        raise ValueError("quadratic_binary_shared needs two binary trees")
    n = t1.n_leaves
    if n < 3:
        return 0
    order1, first1, count1 = _leaf_spans(t1)
    internal2, kids = _children_matrix(t2)
    left2, right2 = kids[:, 0], kids[:, 1]
    total = 0
    for u in np.flatnonzero(t1.degree > 0):
        lc = u + 1
        rc = lc + int(t1.size[lc])
        red = np.zeros(n + 1, dtype=bool)
        blue = np.zeros(n + 1, dtype=bool)
        red[order1[first1[lc]:first1[lc] + count1[lc]]] = True
        blue[order1[first1[rc]:first1[rc] + count1[rc]]] = True
        r = _color_sums(t2, red)
        b = _color_sums(t2, blue)
        lr, lb, rr, rb = r[left2], b[left2], r[right2], b[right2]
        val = (
            lr * (lr - 1) // 2 * rb
            + lb * (lb - 1) // 2 * rr
            + rr * (rr - 1) // 2 * lb
            + rb * (rb - 1) // 2 * lr
        )
        total += int(val.sum())
    return total


def quadratic_general_shared(t1: Tree, t2: Tree) -> int:
    """
    Per edge (w, c) of ``t1`` with c not the first child: children of w left
    of c are red, c is blue, the ones right of c green, the rest black; then
    one children scan of every node of ``t2``.
    """
    validate_pair(t1, t2)
    n = t1.n_leaves
    if n < 3:
        return 0
    order1, first1, count1 = _leaf_spans(t1)
    internal2, kids = _children_matrix(t2)
    total = 0
    for w in np.flatnonzero(t1.degree > 0):
        children = []
        c = w + 1
        for _ in range(int(t1.degree[w])):
            children.append(c)
            c += int(t1.size[c])
        span_lo = first1[w]
        span_hi = span_lo + count1[w]
        inside = np.zeros(n + 1, dtype=bool)
        inside[order1[span_lo:span_hi]] = True
        n_black = n - int(count1[w])
        for j in range(1, len(children)):
            cj = children[j]
            a = first1[cj]
            red = np.zeros(n + 1, dtype=bool)
            blue = np.zeros(n + 1, dtype=bool)
            red[order1[span_lo:a]] = True
            blue[order1[a:a + count1[cj]]] = True
            green = inside & ~red & ~blue
            black = ~inside
            black[0] = False
            cols = []
            for flag in (red, blue, green, black):
                s = _color_sums(t2, flag)
                cols.append(np.append(s, 0))  # dummy child slot
            r, b, g, k = cols
            st = ScanState(*(np.zeros(internal2.size, dtype=np.int64) for _ in range(7)))
            for i in range(kids.shape[1]):
                ch = kids[:, i]
                st = scan_update(st, r[ch], b[ch], g[ch])
            black_out = n_black - k[internal2]
            total += int((st.p_red_blue * black_out).sum() + st.t_red_blue_green.sum())
    return total
