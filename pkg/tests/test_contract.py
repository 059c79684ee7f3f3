import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import restrict
from tripletdist.contract import (
    ContractionStack,
    StackOverflow,
    contract,
    initial_contraction,
)
from tripletdist.distance import compute
from tripletdist.layout import postorder_to_tree, to_postorder
from tripletdist.newick import canonical_form, parse_newick
from tripletdist.treegen import gen_random


def _as_tree(c):
    return postorder_to_tree(c.layout)


def _edge_groups(nested, keep, is_x):
    """
    Sizes of the X groups hanging off each spliced node, computed directly
    on the nested tree.  Returns the list of group sizes.
    """
    groups = []

    def walk(node):
        # returns (has kept leaf, X leaves in the subtree)
        if isinstance(node, int):
            return node in keep, int(node not in keep and is_x(node))
        res = [walk(c) for c in node]
        kept = [r for r in res if r[0]]
        x = sum(r[1] for r in res)
        if len(kept) == 1:
            groups.append(sum(r[1] for r in res if not r[0]))
        return bool(kept), x

    walk(nested)
    return [g for g in groups if g]


def test_initial_contraction_binary():
    t = gen_random(30, 0.0, 1)
    post = to_postorder(t)
    c = initial_contraction(post, "binary")
    assert c.n_nodes == t.n_nodes
    assert np.array_equal(c.label, post.label)
    assert not c.column("ts").any() and not c.column("ps").any()
    assert canonical_form(_as_tree(c)) == canonical_form(t)


def test_initial_contraction_general():
    t = gen_random(30, 0.6, 2)
    c = initial_contraction(to_postorder(t), "general")
    assert np.array_equal(c.degree, to_postorder(t).degree)
    assert not c.data[2:].any()
    with pytest.raises(ValueError):
        initial_contraction(to_postorder(t), "binary")


def test_keep_everything_is_identity():
    t = gen_random(25, 0.0, 3)
    c = initial_contraction(to_postorder(t), "binary")
    c = contract(c, range(1, 26), lambda v: "x")
    again = contract(c, range(1, 26))
    assert np.array_equal(again.data, c.data)


def test_hand_example_root_side():
    parent = initial_contraction(to_postorder(parse_newick("((1,2),(3,4));")), "binary")
    out = contract(parent, {1, 2}, {3: "x", 4: None})
    assert out.n_nodes == 3
    assert _as_tree(out).to_nested() == (1, 2)
    side = out.root_side
    assert (side.ts, side.ps) == (1, 0)


def test_hand_example_caterpillar_edge():
    parent = initial_contraction(to_postorder(parse_newick("(((1,2),3),4);")), "binary")
    out = contract(parent, {1, 4}, {2: "x", 3: "x"})
    assert _as_tree(out).to_nested() == (1, 4)
    leaf1 = int(np.flatnonzero(out.label == 1)[0])
    assert out.column("ts")[leaf1] == 2
    assert out.column("ps")[leaf1] == 0
    assert out.root_side.ts == 0


def test_same_spliced_node_pairs():
    # 2 and 3 hang from one spliced node as a cherry: one pair
    parent = initial_contraction(to_postorder(parse_newick("((1,(2,3)),4);")), "binary")
    out = contract(parent, {1, 4}, lambda v: "x")
    leaf1 = int(np.flatnonzero(out.label == 1)[0])
    assert (out.column("ts")[leaf1], out.column("ps")[leaf1]) == (2, 1)


def test_empty_keep_is_rejected():
    parent = initial_contraction(to_postorder(parse_newick("((1,2),3);")), "binary")
    with pytest.raises(ValueError):
        contract(parent, set())
    with pytest.raises(ValueError):
        contract(parent, {9})


@given(
    n=st.integers(2, 60),
    seed=st.integers(0, 10**9),
    frac=st.floats(0.05, 1.0),
)
def test_binary_contraction_properties(n, seed, frac):
    t = gen_random(n, 0.0, seed)
    rng = np.random.default_rng(seed)
    k = max(1, int(frac * n))
    keep = set(rng.choice(np.arange(1, n + 1), size=k, replace=False).tolist())
    xs = {v for v in range(1, n + 1) if v not in keep and rng.random() < 0.5}
    c = contract(initial_contraction(to_postorder(t), "binary"), keep, lambda v: "x" if v in xs else None)
    assert c.n_nodes <= 2 * len(keep) - 1
    assert sorted(c.leaves().tolist()) == sorted(keep)
    assert canonical_form(_as_tree(c)) == canonical_form(restrict(t, keep))
    groups = _edge_groups(t.to_nested(), keep, lambda v: v in xs)
    assert int(c.column("ts").sum()) == sum(groups) == len(xs)
    assert int(c.column("ps").sum()) == sum(g * (g - 1) // 2 for g in groups)


@given(n=st.integers(2, 60), seed=st.integers(0, 10**9), p=st.sampled_from([0.2, 0.5, 0.95]))
def test_general_contraction_conserves_categories(n, seed, p):
    t = gen_random(n, p, seed)
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n + 1))
    keep = set(rng.choice(np.arange(1, n + 1), size=k, replace=False).tolist())
    cat = {v: str(rng.choice(["x", "g", "y"])) for v in range(1, n + 1) if v not in keep}
    c = contract(initial_contraction(to_postorder(t), "general"), keep, cat.get)
    assert c.n_nodes <= 2 * len(keep) - 1
    assert canonical_form(_as_tree(c)) == canonical_form(restrict(t, keep))
    for a, b, name in (("ax", "bx", "x"), ("ag", "bg", "g"), ("ay", "by", "y")):
        total = int(c.column(a).sum() + c.column(b).sum())
        assert total == sum(1 for v in cat.values() if v == name)
    # pair counters never exceed the products they are drawn from
    assert np.all(c.column("axg") <= c.column("ax") * c.column("ag"))
    assert np.all(c.column("bxly") <= c.column("bx") * c.column("by"))


def test_nested_contraction_keeps_topology():
    t = gen_random(50, 0.3, 7)
    c = initial_contraction(to_postorder(t), "general")
    keep = set(range(1, 51))
    rng = np.random.default_rng(0)
    while len(keep) > 3:
        keep = set(rng.choice(sorted(keep), size=len(keep) * 2 // 3, replace=False).tolist())
        c = contract(c, keep, lambda v: "x")
        assert canonical_form(_as_tree(c)) == canonical_form(restrict(t, keep))
    assert int(c.column("ax").sum() + c.column("bx").sum()) == 50 - len(keep)


def test_stack_push_pop_round_trip():
    t = gen_random(20, 0.0, 1)
    c = initial_contraction(to_postorder(t), "binary")
    d = contract(c, range(1, 11), lambda v: "x")
    s = ContractionStack("binary", 24 * 20)
    s.push(c)
    s.push(d)
    assert s.occupancy == c.n_nodes + d.n_nodes
    got = s.pop()
    assert np.array_equal(got.data, d.data)
    assert np.array_equal(s.pop().data, c.data)
    assert s.occupancy == 0 and len(s) == 0
    assert s.peak == c.n_nodes + d.n_nodes
    with pytest.raises(IndexError):
        s.pop()


def test_stack_overflow_is_reported():
    c = initial_contraction(to_postorder(gen_random(10, 0.0, 1)), "binary")
    s = ContractionStack("binary", 25)
    s.push(c)
    with pytest.raises(StackOverflow):
        s.push(c)


def test_peak_occupancy_n1e5():
    t1 = gen_random(100_000, 0.0, 1)
    t2 = gen_random(100_000, 0.0, 2)
    stats = compute(t1, t2, "binary_fast").stats
    assert stats.peak_stack_nodes <= 24 * 100_000
