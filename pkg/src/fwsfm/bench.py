"""Seeded benchmark suites and their CSV / line-record output."""

from __future__ import annotations

import csv
import dataclasses
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence

import networkx as nx
import numpy as np

from .functions import cut_oracle, iwata_oracle, path_instance, random_cut_instance
from .io import write_record
from .oracle import compute_F
from .sfm import minimize

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
WORKERS_ENV = "FWSFM_WORKERS"
DEFAULT_SCALES = tuple(10**k for k in range(7))
CROSS_CHECK_NODES = 12
ENVELOPE_CONSTANT = 64


@dataclass
class BenchRecord:
    instance: str
    family: str
    n: int
    nodes: Optional[int]
    F: float
    epsilon: float
    major: int
    minor: int
    total: int
    eo_calls: int
    wall_time: float
    min_value: float
    lower_bound: float
    gap: float
    terminated: str
    delta: float
    envelope_ratio: float
    check: str = ""

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in dataclasses.fields(cls)]


def envelope(n: int, F: float, epsilon: float) -> float:
    """Iteration bound 64 n Q^2 / eps^2 with Q^2 = n F^2."""
    return ENVELOPE_CONSTANT * n * (n * F * F) / (epsilon * epsilon)


def max_flow_value(graph) -> float:
    G = nx.DiGraph()
    G.add_nodes_from(range(graph.num_vertices))
    for u, v, c in graph.edges:
        pairs = [(u, v)] if graph.directed else [(u, v), (v, u)]
        for a, b in pairs:
            if G.has_edge(a, b):
                G[a][b]["capacity"] += c
            else:
                G.add_edge(a, b, capacity=c)
    return float(nx.maximum_flow_value(G, graph.s, graph.t))


def _solve(instance: str, family: str, oracle, nodes, epsilon, max_iter, timing, graph=None):
    F = compute_F(oracle)
    t0 = time.perf_counter()
    res = minimize(oracle, epsilon, max_iter)
    wall = time.perf_counter() - t0 if timing else 0.0
    check = ""
    if graph is not None and graph.num_vertices <= CROSS_CHECK_NODES:
        ok = abs(res.min_value + oracle.offset - max_flow_value(graph)) <= 1e-9
        check = "maxflow-ok" if ok else "maxflow-MISMATCH"
    n = oracle.n
    bound = envelope(n, F, res.epsilon_used) if F > 0 else float("inf")
    return BenchRecord(
        instance=instance, family=family, n=n, nodes=nodes, F=F, epsilon=res.epsilon_used,
        major=res.major_cycles, minor=res.minor_cycles, total=res.iterations,
        eo_calls=res.eo_calls, wall_time=wall, min_value=res.min_value,
        lower_bound=res.lower_bound, gap=res.gap, terminated=res.terminated,
        delta=res.delta, envelope_ratio=res.iterations / bound, check=check)


def trial_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


def _er_task(args):
    nodes, trial, p, seed, max_capacity, epsilon, max_iter, timing = args
    graph = random_cut_instance(nodes, p, max_capacity, trial_seed(seed, nodes, trial))
    return _solve(f"er-n{nodes}-t{trial}", "cut", cut_oracle(graph), nodes, epsilon,
                  max_iter, timing, graph)


def _scaling_task(args):
    path_n, scale, epsilon, max_iter, timing = args
    graph = path_instance(path_n, scale)
    return _solve(f"path-n{path_n}-s{scale}", "path", cut_oracle(graph), path_n + 2,
                  epsilon, max_iter, timing, graph)


def _iwata_task(args):
    n, epsilon, max_iter, timing = args
    return _solve(f"iwata-n{n}", "iwata", iwata_oracle(n), None, epsilon, max_iter, timing)


def worker_count(workers: Optional[int] = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, workers)


def _map(fn, tasks: list, workers: Optional[int]) -> list:
    workers = worker_count(workers)
    if workers == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, so rows stay ordered by trial
        return list(pool.map(fn, tasks))


def run_er_suite(node_counts: Iterable[int], p: float = 0.8, trials: int = 3, seed: int = 0,
                 max_capacity: int = 10, epsilon=None, max_iter=None, workers=None,
                 timing: bool = True) -> list:
    """Cut minimization on seeded G(n, p) graphs, ``trials`` per node count."""
    tasks = [(nodes, t, p, seed, max_capacity, epsilon, max_iter, timing)
             for nodes in node_counts for t in range(trials)]
    return _map(_er_task, tasks, workers)


def run_scaling_suite(path_n: int = 10, scales: Sequence[int] = DEFAULT_SCALES, epsilon=None,
                      max_iter=None, workers=None, timing: bool = True) -> list:
    """Path graph with capacities multiplied by each scale in turn."""
    if any(s < 1 for s in scales):
        raise ValueError("scales must be positive integers")
    tasks = [(path_n, int(s), epsilon, max_iter, timing) for s in scales]
    return _map(_scaling_task, tasks, workers)


def run_iwata_suite(sizes: Iterable[int], epsilon=None, max_iter=None, workers=None,
                    timing: bool = True) -> list:
    return _map(_iwata_task, [(n, epsilon, max_iter, timing) for n in sizes], workers)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(records: Sequence[BenchRecord], fh: IO[str], header: str = "") -> None:
    """CSV with a leading ``#`` line carrying the schema version and ``header``."""
    fh.write(f"# fwsfm-bench schema={SCHEMA_VERSION}" + (f" {header}" if header else "") + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BenchRecord.columns())
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in BenchRecord.columns()])


def write_jsonl(records: Sequence[BenchRecord], fh: IO[str]) -> None:
    for r in records:
        write_record(dataclasses.asdict(r), fh)
