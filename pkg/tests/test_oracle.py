from itertools import combinations
from math import comb

import numpy as np
import pytest

from tripletdist.newick import Tree, parse_newick
from tripletdist.oracle import (
    lca_depths,
    naive_different,
    naive_shared,
    quadratic_binary_shared,
    quadratic_general_shared,
    topology_of,
    triple_codes,
)
from tripletdist.treegen import gen_alpha, gen_random


def test_topology_examples():
    assert str(topology_of(parse_newick("((1,2),3);"), 1, 2, 3)) == "12|3"
    star = topology_of(parse_newick("(1,2,3);"), 1, 2, 3)
    assert not star.resolved and str(star) == "123"
    assert str(topology_of(parse_newick("((1,3),2);"), 1, 2, 3)) == "13|2"


def test_topology_errors():
    t = parse_newick("((1,2),3);")
    with pytest.raises(KeyError):
        topology_of(t, 1, 2, 9)
    with pytest.raises(ValueError):
        topology_of(t, 1, 1, 2)


def test_topology_ignores_child_order():
    a = parse_newick("(((1,2),(3,4)),(5,6,7));")
    b = parse_newick("((7,6,5),((4,3),(2,1)));")
    for x, y, z in combinations(range(1, 8), 3):
        assert topology_of(a, x, y, z) == topology_of(b, x, y, z)


def test_lca_depths_small():
    D = lca_depths(parse_newick("((1,2),3);"))
    assert D.tolist() == [[2, 1, 0], [1, 2, 0], [0, 0, 1]]


def test_triple_codes_match_topology_of():
    t = gen_random(12, 0.4, 3)
    codes = triple_codes(t)
    for code, (i, j, k) in zip(codes, combinations(range(1, 13), 3)):
        top = topology_of(t, i, j, k)
        expect = {None: 3, (i, j): 0, (i, k): 1, (j, k): 2}[top.pair]
        assert code == expect


def test_naive_examples():
    t = parse_newick("((1,2),(3,4));")
    assert naive_shared(t, t) == 4
    assert naive_shared(t, parse_newick("((1,3),(2,4));")) == 0
    for seed in range(10):
        a, b = gen_random(15, 0.3, seed), gen_random(15, 0.6, seed + 9)
        assert naive_shared(a, b) + naive_different(a, b) == comb(15, 3)


def test_small_trees():
    one = parse_newick("1;")
    assert naive_shared(one, one) == 0
    two = parse_newick("(1,2);")
    assert quadratic_general_shared(two, two) == 0


def test_quadratic_binary_against_naive():
    rng = np.random.default_rng(0)
    for seed in range(200):
        n = int(rng.integers(3, 101))
        a, b = gen_random(n, 0.0, seed), gen_alpha(n, float(rng.random()), 0.0, seed + 1)
        assert quadratic_binary_shared(a, b) == naive_shared(a, b)


def test_quadratic_binary_examples():
    cat = Tree.from_nested(((((((((((1, 2), 3), 4), 5), 6), 7), 8), 9), 10)))
    assert quadratic_binary_shared(cat, cat) == comb(10, 3) == 120
    shapes = [parse_newick(s) for s in ("((1,2),3);", "((1,3),2);", "((2,3),1);")]
    for a in shapes:
        for b in shapes:
            same = str(topology_of(a, 1, 2, 3)) == str(topology_of(b, 1, 2, 3))
            assert quadratic_binary_shared(a, b) == int(same)
    with pytest.raises(ValueError):
        quadratic_binary_shared(parse_newick("(1,2,3);"), parse_newick("(1,2,3);"))


def test_quadratic_general_against_naive():
    rng = np.random.default_rng(1)
    ps = [0.2, 0.5, 0.95]
    for seed in range(200):
        n = int(rng.integers(3, 101))
        p = ps[seed % 3]
        a, b = gen_random(n, p, seed), gen_random(n, ps[(seed + 1) % 3], seed + 1)
        assert quadratic_general_shared(a, b) == naive_shared(a, b)


def test_quadratic_general_examples():
    star = parse_newick("(1,2,3,4,5);")
    assert quadratic_general_shared(star, star) == 10
    for seed in range(20):
        a, b = gen_random(30, 0.0, seed), gen_random(30, 0.0, seed + 3)
        assert quadratic_general_shared(a, b) == quadratic_binary_shared(a, b)
