"""Submodular test functions and instance generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .oracle import SubmodularOracle


def _is_integral(values) -> bool:
    arr = np.asarray(values, dtype=float)
    return bool(np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)))


def modular_oracle(weights: Sequence[float]) -> SubmodularOracle:
    """f(S) = sum of w_i over S."""
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")

    def f(S):
        return float(w[list(S)].sum()) if S else 0.0

    return SubmodularOracle(len(w), f, integer_valued=_is_integral(w), name="modular")


@dataclass
class WeightedGraph:
    """Capacitated graph on vertices ``0..num_vertices-1``."""

    num_vertices: int
    edges: list = field(default_factory=list)
    directed: bool = False
    s: Optional[int] = None
    t: Optional[int] = None

    def __post_init__(self):
        V = self.num_vertices
        if V < 0:
            raise ValueError("vertex count must be nonnegative")
        clean = []
        for k, (u, v, c) in enumerate(self.edges):
            u, v, c = int(u), int(v), float(c)
            if not (0 <= u < V and 0 <= v < V):
                raise ValueError(f"edge {k}: endpoint out of range 0..{V - 1}")
            if u == v:
                raise ValueError(f"edge {k}: self-loop at vertex {u}")
            if not (math.isfinite(c) and c >= 0):
                raise ValueError(f"edge {k}: capacity must be finite and nonnegative")
            clean.append((u, v, c))
        self.edges = clean
        for name in ("s", "t"):
            val = getattr(self, name)
            if val is not None and not 0 <= val < V:
                raise ValueError(f"{name}={val} out of range")
        if self.s is not None and self.s == self.t:
            raise ValueError("s and t must differ")

    def cut_capacity(self, side) -> float:
        """Capacity leaving the vertex set ``side`` (both directions if undirected)."""
        mask = np.zeros(self.num_vertices, dtype=bool)
        mask[list(side)] = True
        total = 0.0
        for u, v, c in self.edges:
            if mask[u] and not mask[v]:
                total += c
            elif not self.directed and mask[v] and not mask[u]:
                total += c
        return total


class CutOracle(SubmodularOracle):
    """Normalized s-t cut function.

    The ground set is the vertices other than ``s`` and ``t`` (in increasing
    order, see ``nodes``). ``f(S) = c(out(S + s)) - c(out({s}))``; the
    subtracted constant is ``offset``, so ``min f + offset`` is the minimum
    s-t cut capacity.
    """

    def __init__(self, graph: WeightedGraph):
        if graph.s is None or graph.t is None:
            raise ValueError("cut oracle needs both s and t")
        self.graph = graph
        self.nodes = np.array([v for v in range(graph.num_vertices) if v not in (graph.s, graph.t)],
                              dtype=int)
        E = graph.edges
        self._u = np.array([e[0] for e in E], dtype=int)
        self._v = np.array([e[1] for e in E], dtype=int)
        self._c = np.array([e[2] for e in E], dtype=float)
        self._side = np.zeros(graph.num_vertices, dtype=bool)
        super().__init__(len(self.nodes), self._cut, integer_valued=_is_integral(self._c),
                         name="cut")

    def _cut(self, S) -> float:
        side = self._side.copy()
        side[self.graph.s] = True
        if S:
            side[self.nodes[list(S)]] = True
        su, sv = side[self._u], side[self._v]
        crossing = (su & ~sv) if self.graph.directed else (su != sv)
        return float(self._c[crossing].sum())

    def source_side(self, S) -> list:
        """Graph vertices on the s side for ground-set subset ``S``."""
        return sorted([int(self.graph.s)] + [int(self.nodes[i]) for i in S])


def cut_oracle(graph: WeightedGraph) -> CutOracle:
    return CutOracle(graph)


def iwata_oracle(n: int) -> SubmodularOracle:
    """Iwata's test function f(S) = |S| |V - S| - sum_{j in S} (5j - 2n), j 1-based."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = 5.0 * np.arange(1, n + 1) - 2.0 * n

    def f(S):
        k = len(S)
        return k * (n - k) - (float(w[list(S)].sum()) if S else 0.0)

    return SubmodularOracle(n, f, integer_valued=True, name="iwata")


def concave_cardinality_oracle(g: Sequence[float], weights: Sequence[float]) -> SubmodularOracle:
    """f(S) = g(|S|) + sum of w_i over S, for a concave table g with g(0) = 0."""
    g = np.asarray(g, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = len(w)
    if len(g) != n + 1:
        raise ValueError(f"g must have n+1 = {n + 1} entries, got {len(g)}")
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(w))):
        raise ValueError("g and weights must be finite")
    if g[0] != 0:
        raise ValueError("g(0) must be 0")
    inc = np.diff(g)
    if np.any(inc[1:] > inc[:-1] + 1e-12 * max(1.0, np.abs(inc).max(initial=0.0))):
        raise ValueError("g is not concave: increments must be nonincreasing")

    def f(S):
        return float(g[len(S)]) + (float(w[list(S)].sum()) if S else 0.0)

    return SubmodularOracle(n, f, integer_valued=_is_integral(g) and _is_integral(w),
                            name="concave")


def random_concave_instance(n: int, seed: int, max_step: int = 6, max_weight: int = 6):
    """Integer concave-of-cardinality plus modular oracle from a seed."""
    rng = np.random.default_rng(seed)
    steps = np.sort(rng.integers(-max_step, max_step + 1, size=n))[::-1]
    g = np.concatenate([[0], np.cumsum(steps)])
    w = rng.integers(-max_weight, max_weight + 1, size=n)
    return concave_cardinality_oracle(g, w)


def random_cut_instance(n: int, p: float, max_capacity: int = 10, seed: int = 0) -> WeightedGraph:
    """Seeded undirected Erdos-Renyi graph on ``n`` vertices with random s and t.

    Each of the ``n(n-1)/2`` pairs is an edge with probability ``p`` and gets
    an integer capacity uniform in ``[1, max_capacity]``.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    if n < 2:
        raise ValueError("need at least two vertices for s and t")
    if max_capacity < 1:
        raise ValueError("max_capacity must be at least 1")
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v, int(rng.integers(1, max_capacity + 1))))
    s, t = (int(a) for a in rng.choice(n, size=2, replace=False))
    return WeightedGraph(n, edges, directed=False, s=s, t=t)


def path_capacities(n: int) -> list:
    """Fixed base capacities for the n+1 edges of the path instance."""
    return [1 + (7 * i + 3) % 10 for i in range(n + 1)]


def path_instance(n: int, scale: int = 1, base: Optional[Sequence[int]] = None) -> WeightedGraph:
    """Path s - v1 - ... - vn - t with capacities ``scale * base``.

    Vertex 0 is s, vertices 1..n are the ground set, vertex n+1 is t.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if scale < 1:
        raise ValueError("scale must be at least 1")
    base = path_capacities(n) if base is None else list(base)
    if len(base) != n + 1:
        raise ValueError(f"need {n + 1} base capacities")
    edges = [(i, i + 1, scale * c) for i, c in enumerate(base)]
    return WeightedGraph(n + 2, edges, directed=False, s=0, t=n + 1)


def table_oracle(values: Sequence[float], n: int) -> SubmodularOracle:
    """Function given by its value on every bitmask (bit i = element i).

    No submodularity check is made; used to feed arbitrary set functions to
    the verification tools.
    """
    vals = np.asarray(values, dtype=float)
    if len(vals) != 1 << n:
        raise ValueError(f"need 2**{n} values, got {len(vals)}")

    def f(S):
        return float(vals[sum(1 << i for i in S)])

    return SubmodularOracle(n, f, integer_valued=_is_integral(vals), name="table")
