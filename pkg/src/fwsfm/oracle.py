"""Evaluation oracles, linear optimization oracles and the base polytope.

Ground sets are ``{0, ..., n-1}``. Subsets are passed around as any iterable of
ints and converted to ``frozenset`` at the oracle boundary.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Protocol, Sequence

import numpy as np

MAX_MEMBERSHIP_N = 25


class LinearOracle(Protocol):
    """Anything Wolfe's algorithm can run on.

    ``minimize(d)`` must return a vertex ``v`` of the polytope with
    ``d @ v <= d @ w`` for every vertex ``w``. ``norm_bound`` is an upper bound
    on the Euclidean norm of every vertex.
    """

    dimension: int

    def minimize(self, direction: np.ndarray) -> np.ndarray: ...

    @property
    def norm_bound(self) -> float: ...


class SubmodularOracle:
    """Normalized, counting wrapper around a set function.

    The wrapped callable receives a ``frozenset`` of ground-set indices. Values
    are shifted so that ``f(empty) == 0``; the shift is kept in ``offset``.
    Every evaluation of a non-empty set is one call to the raw function and
    bumps ``eo_count`` by one. The empty set is answered from the stored shift
    and is not counted.
    """

    def __init__(
        self,
        n: int,
        fn: Callable[[frozenset], float],
        *,
        integer_valued: bool = False,
        name: str = "",
    ):
        if n < 0:
            raise ValueError(f"ground set size must be nonnegative, got {n}")
        self.n = int(n)
        self._fn = fn
        self.integer_valued = integer_valued
        self.name = name or getattr(fn, "__name__", "f")
        self.offset = float(fn(frozenset()))
        if not math.isfinite(self.offset):
            raise ValueError("f(empty set) is not finite")
        self.eo_count = 0
        self._lock = threading.Lock()
        self._F: Optional[float] = None

    def __call__(self, S: Iterable[int]) -> float:
        return self.eval(S)

    def eval(self, S: Iterable[int]) -> float:
        S = frozenset(S)
        if not S:
            return 0.0
        with self._lock:
            self.eo_count += 1
        return float(self._fn(S)) - self.offset

    def raw(self, S: Iterable[int]) -> float:
        """Un-normalized value ``f(S) + offset``."""
        return self.eval(S) + self.offset

    @property
    def F(self) -> float:
        return compute_F(self)

    def __repr__(self) -> str:
        return f"SubmodularOracle(n={self.n}, name={self.name!r})"


@dataclass(frozen=True)
class Vertex:
    coords: np.ndarray
    order: Optional[tuple] = None


def _as_direction(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("direction has non-finite entries")
    return x


def greedy_lo(oracle: SubmodularOracle, x) -> Vertex:
    """Edmonds' greedy vertex of the base polytope minimizing ``x @ q``.

    Coordinates are visited in ascending order of ``x`` (ties by index) and
    each gets its marginal value along that order.
    """
    n = oracle.n
    x = _as_direction(x, n)
    order = np.lexsort((np.arange(n), x))
    q = np.empty(n)
    prefix: list[int] = []
    prev = 0.0
    for i in order:
        prefix.append(int(i))
        val = oracle.eval(prefix)
        q[i] = val - prev
        prev = val
    return Vertex(q, tuple(int(i) for i in order))


def compute_F(oracle: SubmodularOracle) -> float:
    """max over i of |f({i})| and |f(V) - f(V - i)|; cached on the oracle."""
    if oracle._F is not None:
        return oracle._F
    n = oracle.n
    if n == 0:
        oracle._F = 0.0
        return 0.0
    full = range(n)
    f_full = oracle.eval(full)
    best = 0.0
    for i in range(n):
        single = abs(oracle.eval([i]))
        rest = abs(f_full - oracle.eval(j for j in full if j != i))
        best = max(best, single, rest)
    oracle._F = best
    return best


def subset_sums(x: np.ndarray) -> np.ndarray:
    """``out[mask] = sum(x[i] for bits i of mask)`` for all 2**n masks."""
    n = len(x)
    out = np.zeros(1 << n)
    for i in range(n):
        out[1 << i : 1 << (i + 1)] = out[: 1 << i] + x[i]
    return out


def evaluate_all(oracle: SubmodularOracle, limit: int = MAX_MEMBERSHIP_N) -> np.ndarray:
    """Table of f over all subsets, indexed by bitmask (bit i = element i)."""
    n = oracle.n
    if n > limit:
        raise ValueError(f"refusing to enumerate 2**{n} subsets (limit n <= {limit})")
    table = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        table[mask] = oracle.eval(i for i in range(n) if mask >> i & 1)
    return table


def verify_membership(oracle: SubmodularOracle, x, tol: float = 1e-9, table=None) -> bool:
    """Exhaustive check that ``x`` lies in the base polytope of ``oracle``.

    ``table`` may carry a precomputed ``evaluate_all`` result.
    """
    n = oracle.n
    if n > MAX_MEMBERSHIP_N:
        raise ValueError(f"membership check needs n <= {MAX_MEMBERSHIP_N}, got {n}")
    x = _as_direction(x, n)
    if table is None:
        table = evaluate_all(oracle)
    sums = subset_sums(x)
    if abs(sums[-1] - table[-1]) > tol:
        return False
    return bool(np.all(sums <= table + tol))


class BasePolytope:
    """Linear optimization oracle for the base polytope of a submodular function."""

    def __init__(self, oracle: SubmodularOracle):
        self.oracle = oracle
        self.dimension = oracle.n
        self.last_vertex: Optional[Vertex] = None

    def minimize(self, direction) -> np.ndarray:
        self.last_vertex = greedy_lo(self.oracle, direction)
        return self.last_vertex.coords

    @property
    def norm_bound(self) -> float:
        # every greedy coordinate lies in [-F, F]
        return math.sqrt(self.dimension) * compute_F(self.oracle)


class VertexPolytope:
    """Convex hull of an explicit point list, for testing on arbitrary polytopes."""

    def __init__(self, points: Sequence):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.size == 0:
            raise ValueError("need at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        self.points = pts
        self.dimension = pts.shape[1]

    def minimize(self, direction) -> np.ndarray:
        d = _as_direction(direction, self.dimension)
        # first index wins ties, so the answer is deterministic
        return self.points[int(np.argmin(self.points @ d))].copy()

    @property
    def norm_bound(self) -> float:
        return float(np.max(np.linalg.norm(self.points, axis=1)))
