from math import comb

import numpy as np
import pytest

from tripletdist import distance as dist
from tripletdist.distance import (
    InvariantError,
    compute,
    reference_steps,
    shared_triplets,
    triplet_distance,
)
from tripletdist.newick import LabelError, parse_newick
from tripletdist.oracle import naive_shared
from tripletdist.treegen import gen_alpha, gen_random, shuffle_labels

# shared counts fixed by the O(n^3) enumeration
FROZEN = [
    ("random", 30, 0.0, 0.0, 1, 1216),
    ("random", 50, 0.5, 0.5, 2, 4896),
    ("random", 64, 0.95, 0.2, 3, 6766),
    ("alpha", 40, 0.0, 0.3, 4, 2686),
    ("random", 100, 0.2, 0.0, 5, 41540),
]


def _pair(model, n, p1, p2, seed):
    if model == "random":
        return gen_random(n, p1, seed), gen_random(n, p2, seed + 1)
    return gen_alpha(n, 0.25, p1, seed), gen_alpha(n, 0.6, p2, seed + 1)


@pytest.mark.parametrize("model, n, p1, p2, seed, shared", FROZEN)
def test_frozen_values(model, n, p1, p2, seed, shared):
    t1, t2 = _pair(model, n, p1, p2, seed)
    for algo in ("auto", "general_fast", "quadratic", "naive"):
        assert shared_triplets(t1, t2, algo) == shared
    assert triplet_distance(t1, t2) == comb(n, 3) - shared


def test_identical_five_leaves():
    t = parse_newick("(((1,2),3),(4,5));")
    assert shared_triplets(t, t) == 10
    assert triplet_distance(t, t) == 0


def test_resolved_versus_star():
    t1, t2 = parse_newick("((1,2),3);"), parse_newick("(1,2,3);")
    assert shared_triplets(t1, t2) == 0
    assert triplet_distance(t1, t2) == 1
    assert compute(t1, t2).algorithm == "general_fast"


def test_swap_example():
    t1, t2 = parse_newick("((1,2),(3,4));"), parse_newick("((1,3),(2,4));")
    assert triplet_distance(t1, t2) == 4
    assert compute(t1, t2).algorithm == "binary_fast"


def test_random_n100_all_algorithms_agree():
    t1, t2 = gen_random(100, 0.0, 8), gen_random(100, 0.0, 9)
    values = {shared_triplets(t1, t2, a) for a in dist.ALGORITHMS}
    values.add(shared_triplets(t1, t2, "general_fast"))
    assert len(values) == 1


def test_degenerate_sizes():
    for text in ("1;", "(1,2);"):
        t = parse_newick(text)
        r = compute(t, t)
        assert (r.shared, r.distance) == (0, 0)


def test_errors():
    t = parse_newick("((1,2),3);")
    with pytest.raises(ValueError, match="unknown algorithm"):
        compute(t, t, "fastest")
    with pytest.raises(ValueError, match="binary_fast"):
        compute(parse_newick("(1,2,3);"), t, "binary_fast")
    with pytest.raises(LabelError):
        compute(t, parse_newick("((1,2),4);"))


def test_identity_and_symmetry(small_pairs):
    for t1, t2 in small_pairs:
        n = t1.n_leaves
        a, b = compute(t1, t2), compute(t2, t1)
        assert a.distance == b.distance
        assert a.shared + a.distance == comb(n, 3)
        assert compute(t1, t1).distance == 0


def test_label_shuffle_changes_nothing_on_identical_input():
    t = gen_random(300, 0.3, 2)
    u = shuffle_labels(t, 5)
    assert triplet_distance(u, u) == 0


def test_stats_fields():
    n = 2000
    r = compute(gen_random(n, 0.0, 1), gen_random(n, 0.0, 2), debug=True)
    s = r.stats
    assert s.n == n and not s.wide
    assert s.n_splits == n - 1
    assert 1 <= s.max_depth <= 2 + 2 * np.log2(n)
    assert 2 * n - 1 <= s.max_path_nodes <= 8 * n
    assert 2 * n - 1 <= s.peak_stack_nodes <= 24 * n


def test_capacity_violation_raises(monkeypatch):
    monkeypatch.setattr(dist, "STACK_FACTOR", 2)
    t1, t2 = gen_random(200, 0.0, 1), gen_random(200, 0.0, 2)
    with pytest.raises(InvariantError, match="capacity"):
        compute(t1, t2)


def test_path_bound_violation_raises(monkeypatch):
    monkeypatch.setattr(dist, "PATH_FACTOR", 1)
    t1, t2 = gen_random(200, 0.0, 1), gen_random(200, 0.0, 2)
    with pytest.raises(InvariantError):
        compute(t1, t2, debug=True)
    # without debug the bound is not checked
    assert compute(t1, t2, debug=False).shared == shared_triplets(t1, t2, "quadratic")


def test_debug_env_variable(monkeypatch):
    monkeypatch.setenv("TRIPLETDIST_DEBUG_ASSERT", "1")
    assert dist.debug_enabled()
    monkeypatch.setenv("TRIPLETDIST_DEBUG_ASSERT", "0")
    assert not dist.debug_enabled()


def test_reference_steps_sum_to_shared():
    for mode, p in (("binary", 0.0), ("general", 0.5)):
        t1, t2 = gen_random(30, p, 1), gen_random(30, p, 2)
        steps = list(reference_steps(t1, t2, mode))
        assert sum(s.count for s in steps) == naive_shared(t1, t2)
        assert len({s.split for s in steps}) == len(steps) == 29
        assert steps[0].label_map.n == 30
