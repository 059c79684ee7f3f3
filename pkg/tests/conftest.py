import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tripletdist.newick import Tree, parse_newick
from tripletdist.treegen import gen_alpha, gen_random

# compiled kernels make the first example slow; never let that count
settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def nwk(text: str) -> Tree:
    return parse_newick(text)


def random_pair(seed: int, n: int, p1: float = 0.0, p2: float = 0.0, model: str = "random"):
    """Two independent trees over the same n labels."""
    if model == "alpha":
        rng = np.random.default_rng(seed)
        a1, a2 = rng.random(2)
        return gen_alpha(n, a1, p1, seed), gen_alpha(n, a2, p2, seed + 1)
    return gen_random(n, p1, seed), gen_random(n, p2, seed + 1)


def restrict(tree: Tree, keep) -> Tree:
    """Induced subtree on the labels in ``keep`` (pruning plus unary splicing)."""
    keep = set(keep)

    def walk(node):
        if isinstance(node, int):
            return node if node in keep else None
        kids = [k for k in (walk(c) for c in node) if k is not None]
        if not kids:
            return None
        return kids[0] if len(kids) == 1 else tuple(kids)

    return Tree.from_nested(walk(tree.to_nested()))


def compact_labels(tree: Tree) -> Tree:
    """Rename leaf labels to 1..k preserving their order."""
    labels = np.sort(tree.leaves())
    rank = {int(v): i + 1 for i, v in enumerate(labels)}
    new = np.array([rank[int(v)] if v > 0 else 0 for v in tree.label], dtype=np.int64)
    return Tree(tree.size.copy(), tree.degree.copy(), new)


@pytest.fixture
def small_pairs():
    """A fixed mix of binary and general pairs with n up to 40."""
    out = []
    for s in range(30):
        n = 3 + (s * 7) % 38
        p = (0.0, 0.2, 0.5, 0.95)[s % 4]
        out.append(random_pair(1000 + s, n, p, (0.0, 0.5)[s % 2]))
    return out
