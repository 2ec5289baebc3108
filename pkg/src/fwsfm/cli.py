"""Command-line front end: ``fwsfm {solve,bench-er,bench-scaling,verify,plot}``."""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager

from . import bench
from .functions import CutOracle
from .io import DimacsError, InstanceError, load_instance, write_record
from .oracle import MAX_MEMBERSHIP_N, verify_membership
from .plot import PlotError, plot_csv
from .sfm import minimize, telescoping_sum
from .verify import brute_min, check_submodular
from .wolfe import write_trace_csv

EXIT_OK, EXIT_ERROR, EXIT_CAP = 0, 1, 2
MEMBERSHIP_LIMIT = 20


def _int_list(text: str) -> list:
    """``"10 20 30"``-style lists arrive as separate tokens; ``"a:b:step"`` is a range."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        a, b, step = parts
        return list(range(a, b + 1, step))
    return [int(text)]


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _load(path):
    try:
        return load_instance(path)
    except (DimacsError, InstanceError, ValueError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return None


def _elements(oracle, S) -> list:
    """Ground-set elements as users know them: DIMACS node ids for cuts."""
    if isinstance(oracle, CutOracle):
        return [int(oracle.nodes[i]) + 1 for i in S]
    return [int(i) for i in S]


def cmd_solve(args) -> int:
    oracle = _load(args.path)
    if oracle is None:
        return EXIT_ERROR
    res = minimize(oracle, args.epsilon, args.max_iter)
    if args.trace_csv and res.wolfe is not None:
        with open(args.trace_csv, "w") as fh:
            write_trace_csv(res.wolfe, fh)
    extra = {"instance": str(args.path), "n": oracle.n, "elements": _elements(oracle, res.min_set)}
    if isinstance(oracle, CutOracle):
        extra["mincut"] = res.min_value + oracle.offset
        extra["source_side"] = [v + 1 for v in oracle.source_side(res.min_set)]
    if args.format == "jsonl":
        write_record(res.to_record(**extra), sys.stdout)
    else:
        elems = ", ".join(map(str, extra["elements"]))
        print(f"instance:     {args.path} ({oracle.name}, n={oracle.n})")
        print(f"set:          {{{elems}}}")
        print(f"value:        {res.min_value:.12g}")
        if "mincut" in extra:
            print(f"mincut:       {extra['mincut']:.12g}")
        print(f"lower bound:  {res.lower_bound:.12g}")
        print(f"gap:          {res.gap:.6g} (bound 2n*eps = {2 * oracle.n * res.epsilon_used:.6g})")
        print(f"epsilon:      {res.epsilon_used:.6g}")
        if oracle.integer_valued:
            print(f"exact:        {'certified' if res.certified_exact else 'not certified'}")
        print(f"terminated:   {res.terminated} (delta {res.delta:.3g})")
        print(f"iterations:   {res.iterations} ({res.major_cycles} major, {res.minor_cycles} minor)")
        print(f"eo calls:     {res.eo_calls}")
    return EXIT_CAP if res.terminated == "iteration_cap" else EXIT_OK


def _emit(records, args, header: str) -> None:
    with _output(args.out) as fh:
        if args.format == "jsonl":
            bench.write_jsonl(records, fh)
        else:
            bench.write_csv(records, fh, header)


def cmd_bench_er(args) -> int:
    nodes = [v for tok in args.n for v in _int_list(tok)]
    records = bench.run_er_suite(nodes, args.p, args.trials, args.seed, args.max_capacity,
                                 args.epsilon, args.max_iter, timing=not args.no_timing)
    header = (f"suite=er p={args.p} trials={args.trials} seed={args.seed} "
              f"max_capacity={args.max_capacity}; node and trial counts are desk-scale "
              f"choices for minutes-scale runtimes")
    _emit(records, args, header)
    bad = [r for r in records if r.check.endswith("MISMATCH")]
    return EXIT_ERROR if bad else EXIT_OK


def cmd_bench_scaling(args) -> int:
    scales = [v for tok in args.scales for v in _int_list(tok)]
    try:
        records = bench.run_scaling_suite(args.path_n, scales, args.epsilon, args.max_iter,
                                          timing=not args.no_timing)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    header = f"suite=scaling path_n={args.path_n} scales={' '.join(map(str, scales))}"
    _emit(records, args, header)
    return EXIT_OK


def cmd_verify(args) -> int:
    oracle = _load(args.path)
    if oracle is None:
        return EXIT_ERROR
    n = oracle.n
    if n > args.n_limit:
        print(f"error: n={n} exceeds the enumeration limit {args.n_limit}", file=sys.stderr)
        return EXIT_ERROR
    results = []

    def report(name, ok, detail=""):
        results.append(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f": {detail}" if detail else ""))

    sub = check_submodular(oracle, limit=args.n_limit)
    report("submodular", sub.ok, "" if sub.ok else f"violated at {sub.violation}")
    res = minimize(oracle)
    bf = brute_min(oracle, limit=args.n_limit)
    report("brute-force minimum", abs(res.min_value - bf.min_value) <= 1e-9,
           f"solver {res.min_value:.12g}, enumeration {bf.min_value:.12g}")
    report("lower bound <= minimum <= f(set)",
           res.lower_bound <= bf.min_value + 1e-9 and bf.min_value <= res.min_value + 1e-9,
           f"{res.lower_bound:.12g} <= {bf.min_value:.12g} <= {res.min_value:.12g}")
    if n <= min(MEMBERSHIP_LIMIT, MAX_MEMBERSHIP_N):
        report("x in base polytope", verify_membership(oracle, res.x_final, tol=1e-7))
    tele = telescoping_sum(res.x_final, oracle)
    eps2 = res.epsilon_used ** 2
    if res.terminated == "normal":
        report("telescoping sum <= eps^2", tele <= eps2 + 1e-9 * max(1.0, float(res.x_final @ res.x_final)),
               f"{tele:.3g} vs {eps2:.3g}")
    else:
        print(f"SKIP  telescoping sum: run ended with {res.terminated}")
    return EXIT_OK if all(results) else EXIT_ERROR


def cmd_plot(args) -> int:
    try:
        plot_csv(args.csv, args.kind, args.out)
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fwsfm", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def solver_opts(sp):
        sp.add_argument("--epsilon", type=float, default=None)
        sp.add_argument("--max-iter", type=int, default=None)

    sp = sub.add_parser("solve", help="minimize one instance (DIMACS graph or .json function)")
    sp.add_argument("path")
    solver_opts(sp)
    sp.add_argument("--format", choices=["text", "jsonl"], default="text")
    sp.add_argument("--trace-csv", default=None, help="write the iteration trace here")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("bench-er", help="cut benchmark on seeded Erdos-Renyi graphs")
    sp.add_argument("--n", nargs="+", default=["10:40:10"],
                    help="node counts, as a list or a:b:step ranges")
    sp.add_argument("--p", type=float, default=0.8)
    sp.add_argument("--trials", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-capacity", type=int, default=10)
    solver_opts(sp)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    sp.add_argument("--no-timing", action="store_true", help="write 0 for wall time")
    sp.set_defaults(func=cmd_bench_er)

    sp = sub.add_parser("bench-scaling", help="path-graph iterations across capacity scales")
    sp.add_argument("--path-n", type=int, default=10)
    sp.add_argument("--scales", nargs="+", default=[str(s) for s in bench.DEFAULT_SCALES])
    solver_opts(sp)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    sp.add_argument("--no-timing", action="store_true", help="write 0 for wall time")
    sp.set_defaults(func=cmd_bench_scaling)

    sp = sub.add_parser("verify", help="exhaustive checks on a small instance")
    sp.add_argument("path")
    sp.add_argument("--n-limit", type=int, default=10)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("plot", help="render a benchmark CSV as SVG")
    sp.add_argument("csv")
    sp.add_argument("--kind", choices=sorted(("runtime", "iterations")), required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
