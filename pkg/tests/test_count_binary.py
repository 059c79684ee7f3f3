from itertools import combinations

import pytest

from tripletdist.contract import BinaryEdgeCounters, initial_contraction
from tripletdist.count_binary import count_component_binary, shared_at_node, shared_on_edge
from tripletdist.decompose import Colors
from tripletdist.distance import compute, reference_steps
from tripletdist.layout import postorder_to_tree, to_postorder, to_preorder
from tripletdist.newick import parse_newick
from tripletdist.oracle import lca_depths, naive_shared
from tripletdist.preprocess import prepare_first
from tripletdist.treegen import gen_random


def test_shared_at_node_examples():
    assert shared_at_node(BinaryEdgeCounters(), BinaryEdgeCounters()) == 0
    assert shared_at_node(BinaryEdgeCounters(red=2, blue=1), BinaryEdgeCounters(red=3)) == 3
    # T1 = T2 = ((1,2),3) at the root: the shared triplet 12|3
    assert shared_at_node(BinaryEdgeCounters(red=2), BinaryEdgeCounters(blue=1)) == 1


def test_shared_on_edge_examples():
    assert shared_on_edge(BinaryEdgeCounters(blue=0, ts=5, ps=3)) == 0
    assert shared_on_edge(BinaryEdgeCounters(blue=3, ts=2, ps=1)) == 9
    assert shared_on_edge(BinaryEdgeCounters(blue=2, ts=1, ps=0)) == 1


def test_colorless_component_counts_zero():
    c = initial_contraction(to_postorder(gen_random(20, 0.0, 1)), "binary")
    nothing = Colors((1, 0), (1, 0), (1, 0), False, 0)
    assert count_component_binary(c, nothing) == 0


def _anchored_brute(bt, t2r, u):
    """Shared triplets anchored at u, straight from LCA depths of the relabelled second tree."""
    left = u + 1
    right = left + int(bt.size[left])
    red = range(int(bt.lo[left]), int(bt.hi[left]) + 1)
    blue = range(int(bt.lo[right]), int(bt.hi[right]) + 1)
    D = lca_depths(postorder_to_tree(t2r))
    total = 0
    for same, other in ((red, blue), (blue, red)):
        for a, b in combinations(same, 2):
            for c in other:
                if D[a - 1, b - 1] > D[a - 1, c - 1]:
                    total += 1
    return total


def test_identical_five_leaf_trees_first_split():
    t = parse_newick("(((1,2),3),(4,5));")
    steps = list(reference_steps(t, t, "binary"))
    bt, t2r, _ = prepare_first(to_preorder(t), to_postorder(t))
    first = steps[0]
    assert first.count == _anchored_brute(bt, t2r, first.split)
    assert sum(s.count for s in steps) == 10


@pytest.mark.parametrize("seed", range(12))
def test_each_split_matches_brute_force(seed):
    n = 5 + 3 * seed
    t1, t2 = gen_random(n, 0.0, seed), gen_random(n, 0.0, seed + 50)
    bt, t2r, _ = prepare_first(to_preorder(t1), to_postorder(t2))
    steps = list(reference_steps(t1, t2, "binary"))
    for s in steps:
        assert s.count == _anchored_brute(bt, t2r, s.split)
    assert sum(s.count for s in steps) == naive_shared(t1, t2)


@pytest.mark.parametrize("seed", range(40))
def test_fast_binary_equals_oracle(seed):
    n = 3 + seed + (seed * 13) % 20
    t1, t2 = gen_random(n, 0.0, seed), gen_random(n, 0.0, 1000 + seed)
    assert compute(t1, t2, "binary_fast").shared == naive_shared(t1, t2)


def test_compiled_trace_matches_reference():
    t1, t2 = gen_random(45, 0.0, 3), gen_random(45, 0.0, 4)
    stats = compute(t1, t2, "binary_fast", trace=True).stats
    rows, counts = stats.trace
    ref = list(reference_steps(t1, t2, "binary"))
    assert [int(r[2]) for r in rows] == [s.split for s in ref]
    assert counts == [s.count for s in ref]
    assert [int(r[4]) for r in rows] == [s.contraction.n_nodes for s in ref]


def test_wide_products_agree():
    t1, t2 = gen_random(80, 0.0, 5), gen_random(80, 0.0, 6)
    assert compute(t1, t2, "binary_fast", wide=True).shared == compute(t1, t2, "binary_fast").shared
