"""
Command-line interface.

Exit codes: 0 success, 1 bad input or parameters, 2 internal invariant
violated, 3 verification found a disagreement.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from . import distance as _distance
from .distance import InvariantError, compute
from .newick import LabelError, NewickError, read_newick, write_newick
from .oracle import naive_shared
from .treegen import gen_alpha, gen_random

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2
EXIT_DISAGREE = 3

_ALGO = {
    "auto": "auto",
    "binary": "binary_fast",
    "general": "general_fast",
    "quadratic": "quadratic",
    "naive": "naive",
}

BENCH_HEADER = ["model", "n", "param", "algorithm", "rep", "seconds", "peak_stack_nodes"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be at least 1")
    return v


def _n_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n-list {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("n-list needs positive integers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tripletdist", description="Rooted triplet distance between two trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="distance between two Newick files")
    d.add_argument("t1")
    d.add_argument("t2")
    d.add_argument("--algorithm", choices=list(_ALGO), default="auto")
    d.add_argument("--print-shared", action="store_true", help='print "D=<d> S=<s>"')

    g = sub.add_parser("gen", help="generate a random tree")
    gsub = g.add_subparsers(dest="model", required=True, parser_class=_Parser)
    gr = gsub.add_parser("random", help="random model")
    ga = gsub.add_parser("alpha", help="alpha model")
    for q in (gr, ga):
        q.add_argument("--n", type=_positive, required=True)
        q.add_argument("--p", type=_probability, default=0.0)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--out", required=True)
    ga.add_argument("--alpha", type=_probability, required=True)

    v = sub.add_parser("verify", help="cross-check fast, quadratic and naive algorithms")
    v.add_argument("--n-max", type=int, default=100)
    v.add_argument("--iters", type=_positive, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--start", type=int, default=0, help="first iteration index")

    b = sub.add_parser("bench", help="time the distance computation, CSV on stdout")
    b.add_argument("--model", choices=["random", "alpha"], default="random")
    b.add_argument("--n-list", type=_n_list, required=True)
    b.add_argument("--p", type=_probability, default=0.0)
    b.add_argument("--alpha", type=_probability, default=0.5)
    b.add_argument("--reps", type=_positive, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algorithm", choices=list(_ALGO), default="auto")
    return p


# ---------------------------------------------------------------------- #


def cmd_dist(args) -> int:
    t1 = read_newick(args.t1)
    t2 = read_newick(args.t2)
    res = compute(t1, t2, _ALGO[args.algorithm])
    if args.print_shared:
        print(f"D={res.distance} S={res.shared}")
    else:
        print(res.distance)
    return EXIT_OK


def _generate(model, n, p, alpha, seed):
    if model == "random":
        return gen_random(n, p, seed)
    return gen_alpha(n, alpha, p, seed)


def cmd_gen(args) -> int:
    tree = _generate(args.model, args.n, args.p, getattr(args, "alpha", 0.5), args.seed)
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(write_newick(tree) + "\n")
    return EXIT_OK


_P_CHOICES = (0.0, 0.2, 0.5, 0.95, 1.0)


def sample_case(seed: int, i: int, n_max: int):
    """Pair of trees for verification iteration ``i``."""
    rng = np.random.default_rng([seed, i])
    n = int(rng.integers(min(3, n_max), n_max + 1)) if n_max >= 1 else 1
    trees = []
    for k in range(2):
        p = float(rng.choice(_P_CHOICES))
        s = int(rng.integers(0, 2**63))
        if rng.random() < 0.5:
            trees.append(gen_random(n, p, s))
        else:
            trees.append(gen_alpha(n, float(rng.random()), p, s))
    return trees[0], trees[1]


def cmd_verify(args) -> int:
    if args.n_max < 1:
        raise ValueError("--n-max must be at least 1")
    passed = 0
    first_fail = None
    for i in range(args.start, args.start + args.iters):
        t1, t2 = sample_case(args.seed, i, args.n_max)
        fast = _distance.shared_triplets(t1, t2, "auto")
        quad = _distance.shared_triplets(t1, t2, "quadratic")
        naive = naive_shared(t1, t2)
        if fast == quad == naive:
            passed += 1
        elif first_fail is None:
            first_fail = (i, t1.n_leaves, fast, quad, naive)
    if first_fail is None:
        print(f"PASS {passed}/{args.iters}")
        return EXIT_OK
    i, n, fast, quad, naive = first_fail
    print(f"FAIL {passed}/{args.iters}")
    print(f"first failure: seed={args.seed} iteration={i} n={n} "
          f"fast={fast} quadratic={quad} naive={naive}")
    print(f"reproduce: tripletdist verify --seed {args.seed} --start {i} --iters 1 "
          f"--n-max {args.n_max}")
    return EXIT_DISAGREE


def cmd_bench(args) -> int:
    algo = _ALGO[args.algorithm]
    param = args.p if args.model == "random" else args.alpha
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(BENCH_HEADER)
    # load the compiled kernels before the clock starts
    warm = _generate(args.model, 8, args.p, args.alpha, args.seed)
    compute(warm, warm, algo)
    for n in args.n_list:
        t1 = _generate(args.model, n, args.p, args.alpha, args.seed)
        t2 = _generate(args.model, n, args.p, args.alpha, args.seed + 1)
        for rep in range(args.reps):
            start = time.perf_counter()
            res = compute(t1, t2, algo)
            seconds = time.perf_counter() - start
            peak = res.stats.peak_stack_nodes if res.stats is not None else 0
            out.writerow([args.model, n, param, res.algorithm, rep, f"{seconds:.6f}", peak])
        sys.stdout.flush()
    return EXIT_OK


_COMMANDS = {"dist": cmd_dist, "gen": cmd_gen, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (NewickError, LabelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
