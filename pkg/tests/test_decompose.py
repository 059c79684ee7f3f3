import math
from collections import Counter

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from tripletdist.decompose import (
    Component,
    child_plans,
    find_centroid,
    find_split_node,
    mcd_stats,
    mcd_traverse,
    split,
    split_colors,
)
from tripletdist.layout import to_postorder, to_preorder
from tripletdist.newick import parse_newick
from tripletdist.preprocess import prepare_first
from tripletdist.treegen import gen_alpha, gen_random


def _bt(tree):
    return prepare_first(to_preorder(tree), to_postorder(tree))[0]


def _hole_components(bt):
    """Every (root, hole) pair whose hole is a left child on the root's leftmost path."""
    out = []
    for r in range(bt.n_nodes):
        w = r
        while bt.size[w] > 1:
            y = w + 1
            out.append(Component(bt, r, y))
            w = y
    return out


def _ancestors_on_path(bt, c, v):
    return [w for w in range(c.root, c.hole) if w <= v < w + bt.size[w]]


def test_single_node_component():
    bt = _bt(parse_newick("((1,2),3);"))
    leaf = int(np.flatnonzero(bt.size == 1)[0])
    c = Component(bt, leaf)
    assert find_centroid(c) == leaf
    assert split(c, leaf) == (None, None, None)
    assert c.part_sizes(leaf) == (0, 0, 0)


def test_centroid_balanced_seven_nodes():
    bt = _bt(parse_newick("((1,2),(3,4));"))
    c = Component(bt, 0)
    assert find_centroid(c) == 0
    assert c.part_sizes(0) == (3, 3, 0)
    best = min(max(c.part_sizes(w)) for w in c.nodes())
    assert max(c.part_sizes(0)) == best


def test_centroid_caterpillar_seven_nodes():
    bt = _bt(parse_newick("(((1,2),3),4);"))
    c = Component(bt, 0)
    assert find_centroid(c) == 1
    assert c.part_sizes(1) == (3, 1, 2)
    # exhaustive: no other node keeps every part within half of 7
    assert [w for w in c.nodes() if 2 * max(c.part_sizes(w)) <= 7] == [1]


@given(n=st.integers(2, 100), p=st.sampled_from([0.0, 0.4, 0.9]), seed=st.integers(0, 10**9))
def test_centroid_is_optimal(n, p, seed):
    bt = _bt(gen_random(n, p, seed))
    for c in [Component(bt, 0)] + _hole_components(bt)[:40]:
        if c.size > 200:
            continue
        cen = find_centroid(c)
        assert 2 * max(c.part_sizes(cen)) <= c.size
        assert max(c.part_sizes(cen)) == min(max(c.part_sizes(w)) for w in c.nodes())


def test_split_node_without_hole_is_centroid():
    bt = _bt(gen_random(40, 0.0, 2))
    for r in range(bt.n_nodes):
        c = Component(bt, r)
        assert find_split_node(c) == find_centroid(c)


def test_split_node_with_hole_fifteen_nodes():
    # 8 leaves, 15 nodes: a long left path so that both cases occur
    bt = _bt(parse_newick("((((((1,2),3),4),5),(6,7)),8);"))
    assert bt.n_nodes == 15
    seen = set()
    for c in _hole_components(bt):
        x = c.hole - 1
        cen = find_centroid(c)
        u = find_split_node(c)
        # lowest common ancestor of x and the centroid, found on the path
        assert u == max(_ancestors_on_path(bt, c, cen) + [c.root])
        assert x >= u
        seen.add("centroid" if u == cen else "path")
    assert seen == {"centroid", "path"}


def test_split_sizes_and_boundaries():
    for seed in range(20):
        bt = _bt(gen_random(60, (0.0, 0.5)[seed % 2], seed))
        for c, u, _ in mcd_traverse(bt):
            cl, cr, cp = c.part_sizes(u)
            assert cl + cr + cp == c.size - 1
            parts = split(c, u)
            for part, k in zip(parts, (cl, cr, cp)):
                if part is not None:
                    assert part.size == k
            if c.hole < 0:
                assert 2 * max(cl, cr, cp) <= c.size
            elif u == find_centroid(c):
                assert 2 * max(cl, cr, cp) <= c.size
            else:
                assert 2 * (cl + cp) <= c.size
            if parts[1] is not None:
                assert parts[1].hole < 0
            for part in parts:
                if part is not None and part.hole >= 0:
                    # the hole always hangs off the leftmost path
                    assert part.hole - 1 in part.leftmost_path()


def test_two_level_halving():
    for seed in range(10):
        bt = _bt(gen_alpha(200, 0.1 * seed, (0.0, 0.5)[seed % 2], seed))
        size_of = {}
        parent = {}
        for c, u, _ in mcd_traverse(bt):
            key = (c.root, c.hole)
            size_of[key] = c.size
            for part in split(c, u):
                if part is not None:
                    parent[(part.root, part.hole)] = key
        for key, par in parent.items():
            if par in parent:
                assert 2 * size_of[key] <= size_of[parent[par]]


def test_n2_tree_has_one_component():
    bt = _bt(parse_newick("(1,2);"))
    steps = list(mcd_traverse(bt))
    assert len(steps) == 1
    assert steps[0][1] == 0 and steps[0][2] == 1


def test_every_internal_node_is_split_once():
    for t in (gen_random(1000, 0.0, 11), gen_random(1000, 0.6, 12)):
        bt = _bt(t)
        splits = [u for _, u, _ in mcd_traverse(bt)]
        internal = np.flatnonzero(bt.size > 1).tolist()
        assert Counter(splits) == Counter(internal)
        stats = mcd_stats(bt, record=True)
        assert sorted(stats.order.tolist()) == internal
        assert stats.n_splits == len(internal)


def test_depth_bound_n1024():
    bt = _bt(gen_random(1024, 0.0, 4))
    stats = mcd_stats(bt)
    assert stats.max_depth <= 2 + 2 * math.log2(1024)
    assert stats.max_depth == max(d for _, _, d in mcd_traverse(bt))


def test_colors_partition_component_leaves():
    for seed in range(10):
        t = gen_random(40, 0.5, seed)
        bt = _bt(t)
        for c, u, _ in mcd_traverse(bt):
            col = split_colors(c, u)
            lo, hi = c.leaf_interval
            labels = range(lo, hi + 1)
            kinds = Counter(col.classify(v) for v in labels)
            assert kinds["red"] == col.red[1] - col.red[0] + 1
            assert kinds["blue"] == col.blue[1] - col.blue[0] + 1
            assert col.red[1] < col.blue[0]
            assert col.total_black >= 0


def test_child_plans_keep_intervals():
    bt = _bt(gen_random(50, 0.3, 9))
    for c, u, _ in mcd_traverse(bt):
        for plan, part in zip(child_plans(c, u), split(c, u)):
            assert (plan is None) == (part is None)
            if plan is not None:
                assert plan.keep == plan.component.leaf_interval
