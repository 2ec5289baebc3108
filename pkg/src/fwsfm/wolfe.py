"""Wolfe's minimum-norm-point algorithm over a polytope given by a linear oracle.

A run alternates major cycles (query the oracle at the current point, add the
returned vertex to the active set) with minor cycles (line search back into
the convex hull when the affine minimizer leaves it, dropping vertices whose
weight hits zero). Every x update is recorded so the structural properties of
the method can be checked after the fact with :func:`trace_violations`.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

from .affine import (AffineSolution, DegenerateSetError, IncrementalAffine, affine_minimizer,
                     spread_scale)
from .oracle import LinearOracle

log = logging.getLogger(__name__)

ALPHA_TOL = 1e-12
LAMBDA_TOL = 1e-12
NOISE_RTOL = 1e-12
# strict-decrease checks allow this much rounding, relative to |x| * (largest vertex norm)
DECREASE_SLACK = 1e-14
REFRESH_EVERY = 50


class StallError(RuntimeError):
    """The method cannot make progress although the termination test failed."""


class NumericalBreakdown(RuntimeError):
    """A minor cycle produced a step size or deletion pattern the method forbids."""


@dataclass
class IterationRecord:
    kind: str
    norm_sq_before: float
    norm_sq_after: float
    active_size_before: int
    active_size_after: int
    delta_x_q: float = math.nan
    theta: float = math.nan
    minor_cycles: int = 0
    added_id: int = -1
    active_ids: tuple = ()
    vertex: Optional[np.ndarray] = field(default=None, repr=False)


class ActiveSet:
    """Vertices with convex weights ``lam`` and the point ``x = lam @ vertices``."""

    def __init__(self, dimension: int, scale: Optional[float] = None, incremental: bool = True):
        self.dimension = dimension
        self.scale = scale
        self.center = None  # factorization shift, fixed at the first vertex
        self.incremental = incremental
        self._aff = IncrementalAffine(dimension, scale) if incremental else None
        self.vertices = np.empty((0, dimension))
        self.ids: list[int] = []
        self.lam = np.empty(0)
        self.x = np.zeros(dimension)
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_vertex(cls, q, scale=None, incremental=True) -> "ActiveSet":
        q = np.asarray(q, dtype=float)
        state = cls(len(q), scale, incremental)
        state.add(q)
        state.lam = np.array([1.0])
        state.x = q.copy()
        return state

    def add(self, q) -> int:
        """Append ``q`` with zero weight; returns its id."""
        q = np.asarray(q, dtype=float)
        if self._aff is not None:
            self._aff.add(q)
            self.center, self.scale = self._aff.center, self._aff.scale
        elif self.center is None:
            self.center = q.copy()
        else:
            # from-scratch mode picks the same shift and scale, and still
            # refuses dependent points up front
            scale = self.scale or spread_scale(q, self.center)
            affine_minimizer(np.vstack([self.vertices, q]), scale, self.center)
            self.scale = scale
        self.vertices = np.vstack([self.vertices, q])
        self.lam = np.append(self.lam, 0.0)
        self.ids.append(self._next_id)
        self._next_id += 1
        return self.ids[-1]

    def contains(self, q) -> bool:
        return bool(np.any(np.all(self.vertices == q, axis=1)))

    def affine(self) -> AffineSolution:
        if self._aff is not None:
            return self._aff.solve()
        return affine_minimizer(self.vertices, self.scale, self.center)

    def drop(self, mask: np.ndarray) -> None:
        """Delete the vertices flagged in ``mask`` and renormalize the weights."""
        for j in sorted(np.flatnonzero(mask), reverse=True):
            if self._aff is not None:
                self._aff.remove(int(j))
        keep = ~mask
        self.vertices = self.vertices[keep]
        self.ids = [i for i, k in zip(self.ids, keep) if k]
        self.lam = self.lam[keep]
        self.lam = self.lam / self.lam.sum()
        self.x = self.lam @ self.vertices

    def refresh(self) -> None:
        """Recompute x from the weights and rebuild the factorization."""
        self.lam = self.lam / self.lam.sum()
        self.x = self.lam @ self.vertices
        if self._aff is not None:
            self._aff.refactor()


@dataclass
class WolfeResult:
    x: np.ndarray
    delta_certificate: float
    iterations: list
    terminated: str
    major_cycles: int
    minor_cycles: int
    epsilon: float
    vertices: np.ndarray = field(repr=False, default=None)
    lam: np.ndarray = field(repr=False, default=None)
    last_q: np.ndarray = field(repr=False, default=None)
    vertex_norm_max: float = 0.0

    @property
    def total_iterations(self) -> int:
        return self.major_cycles + self.minor_cycles

    @property
    def converged(self) -> bool:
        return self.terminated == "normal"


def norm_sq(x: np.ndarray) -> float:
    return float(x @ x)


def major_step(state: ActiveSet, lo: LinearOracle, epsilon: float):
    """One linear-oracle query at ``state.x``.

    Returns ``(status, q, delta)`` with ``delta = |x|^2 - x.q``. On
    ``"continue"`` the vertex has been appended to the active set. Raises
    :class:`StallError` when the step cannot be taken: ``q`` is already in
    S, is affinely dependent on S, or ``delta`` is below floating-point
    resolution of ``|x|^2`` and ``x.q``.
    """
    x = state.x
    q = np.asarray(lo.minimize(x), dtype=float)
    xx = norm_sq(x)
    delta = xx - float(x @ q)
    if delta <= epsilon * epsilon:
        return "terminate", q, delta
    nx = np.sqrt(xx)
    if delta <= NOISE_RTOL * nx * max(nx, float(np.linalg.norm(q))):
        raise StallError(f"delta={delta:.3e} is at rounding level")
    if state.contains(q):
        raise StallError(f"oracle returned a vertex already in S (delta={delta:.3e})")
    try:
        state.add(q)
    except DegenerateSetError as exc:
        raise StallError(f"new vertex is affinely dependent on S (delta={delta:.3e})") from exc
    return "continue", q, delta


def minor_loop(state: ActiveSet) -> list:
    """Run minor cycles until the affine minimizer lies in the convex hull.

    Each line-search step is returned as a ``"minor"`` record. On exit
    ``state.x`` is the affine minimizer of the surviving vertices.
    """
    records = []
    while True:
        sol = state.affine()
        alpha = sol.alpha
        neg = alpha < -ALPHA_TOL
        if not neg.any():
            state.lam = alpha
            tiny = alpha <= LAMBDA_TOL
            if tiny.any():
                state.drop(tiny)
            else:
                state.x = sol.y
            return records

        lam = state.lam
        idx = np.flatnonzero(neg)
        ratios = lam[idx] / (lam[idx] - alpha[idx])
        j = idx[int(np.argmin(ratios))]
        theta = float(ratios.min())
        if not 0.0 <= theta < 1.0:
            raise NumericalBreakdown(f"theta={theta!r} outside [0, 1)")

        before, size_before = norm_sq(state.x), len(state)
        state.lam = theta * alpha + (1.0 - theta) * lam
        state.lam[j] = 0.0
        dead = state.lam <= LAMBDA_TOL
        if not dead.any():
            raise NumericalBreakdown("minor cycle deleted no vertex")
        state.drop(dead)
        records.append(IterationRecord(
            "minor", before, norm_sq(state.x), size_before, len(state), theta=theta,
            active_ids=tuple(state.ids)))


def certificate(x: np.ndarray, lo: LinearOracle):
    """``(delta, q)`` with ``delta = |x|^2 - min_q x.q`` from one oracle call."""
    q = np.asarray(lo.minimize(x), dtype=float)
    return norm_sq(x) - float(x @ q), q


def run(
    lo: LinearOracle,
    epsilon: float,
    max_iterations: int = 100_000,
    start=None,
    *,
    incremental: bool = True,
    keep_vertices: bool = False,
) -> WolfeResult:
    """Approximate minimum-norm point of the polytope behind ``lo``.

    Stops when ``|x|^2 <= x.q + epsilon**2`` for ``q = lo.minimize(x)``.
    ``max_iterations`` caps major plus minor cycles; a capped or stalled run
    still reports its certificate ``delta`` from a final oracle call.
    """
    if epsilon < 0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite and nonnegative, got {epsilon}")
    n = lo.dimension
    if start is None:
        start = lo.minimize(np.ones(n))
    state = ActiveSet.from_vertex(start, incremental=incremental)
    qmax = float(np.linalg.norm(state.x))

    trace: list[IterationRecord] = []
    majors = minors = 0
    since_refresh = 0
    status = "normal"
    while True:
        if majors + minors >= max_iterations:
            delta, q = certificate(state.x, lo)
            status = "normal" if delta <= epsilon * epsilon else "iteration_cap"
            break
        before, size_before = norm_sq(state.x), len(state)
        try:
            kind, q, delta = major_step(state, lo, epsilon)
        except StallError as exc:
            log.info("stopping: %s", exc)
            delta, q = certificate(state.x, lo)
            status = "stall"
            break
        if kind == "terminate":
            break
        qmax = max(qmax, float(np.linalg.norm(q)))
        rec = IterationRecord("major", before, math.nan, size_before, 0,
                              delta_x_q=delta, added_id=state.ids[-1],
                              vertex=q.copy() if keep_vertices else None)
        trace.append(rec)
        try:
            steps = minor_loop(state)
        except DegenerateSetError as exc:
            log.info("stopping: %s", exc)
            delta, q = certificate(state.x, lo)
            status = "stall"
            break
        trace.extend(steps)
        rec.norm_sq_after = norm_sq(state.x)
        rec.active_size_after = len(state)
        rec.minor_cycles = len(steps)
        rec.active_ids = tuple(state.ids)
        majors += 1
        minors += len(steps)

        since_refresh += 1 + len(steps)
        if since_refresh >= REFRESH_EVERY:
            since_refresh = 0
            state.refresh()

    return WolfeResult(
        x=state.x.copy(), delta_certificate=delta, iterations=trace, terminated=status,
        major_cycles=majors, minor_cycles=minors, epsilon=epsilon,
        vertices=state.vertices.copy(), lam=state.lam.copy(), last_q=q,
        vertex_norm_max=max(qmax, float(np.linalg.norm(q))))


def trace_violations(result: WolfeResult, n: int) -> list:
    """Structural properties every trace must satisfy; returns human-readable violations.

    Checks strict norm decrease per record and along the chain of recorded
    points, at least one deletion per minor cycle, ``|S| <= n``, survival of
    each newly added vertex to the next major cycle, and that every window of
    ``3n + 1`` iterations holds a major cycle with at most one minor cycle.
    """
    out = []
    recs = result.iterations
    rtol = 1e-12

    def same(a, b):
        return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))

    qmax = result.vertex_norm_max

    def decreased(before, after):
        return after < before + DECREASE_SLACK * max(before, np.sqrt(max(before, 0.0)) * qmax)

    for i, r in enumerate(recs):
        if not decreased(r.norm_sq_before, r.norm_sq_after):
            out.append(f"iter {i}: norm did not decrease ({r.norm_sq_before!r} -> {r.norm_sq_after!r})")
        if max(r.active_size_before, r.active_size_after) > n:
            out.append(f"iter {i}: active set larger than n={n}")
        if r.kind == "minor":
            if not r.active_size_after < r.active_size_before:
                out.append(f"iter {i}: minor cycle deleted nothing")
            if not 0.0 <= r.theta < 1.0:
                out.append(f"iter {i}: theta={r.theta!r} outside [0, 1)")

    # group into cycles: a major record followed by its minor records
    starts = [i for i, r in enumerate(recs) if r.kind == "major"]
    if recs and (not starts or starts[0] != 0):
        out.append("iter 0: trace does not begin with a major cycle")
    prev = None
    for c, i in enumerate(starts):
        major = recs[i]
        stop = starts[c + 1] if c + 1 < len(starts) else len(recs)
        if prev is not None:
            if not same(major.norm_sq_before, prev.norm_sq_after):
                out.append(f"iter {i}: major cycle does not start where the previous ended")
            if not decreased(prev.norm_sq_before, major.norm_sq_before):
                out.append(f"iter {i}: major-cycle start norms not strictly decreasing")
        if major.added_id not in major.active_ids:
            out.append(f"iter {i}: vertex added in this major cycle did not survive it")
        if major.minor_cycles != stop - i - 1:
            out.append(f"iter {i}: minor-cycle count does not match the trace")
        point = major.norm_sq_before
        for j in range(i + 1, stop):
            if not same(recs[j].norm_sq_before, point):
                out.append(f"iter {j}: minor cycle does not start at the current point")
            point = recs[j].norm_sq_after
        if not decreased(point, major.norm_sq_after):
            out.append(f"iter {i}: closing affine step increased the norm")
        prev = major

    width = 3 * n + 1
    good = np.array([r.kind == "major" and r.minor_cycles <= 1 for r in recs], dtype=int)
    if len(recs) >= width:
        counts = np.convolve(good, np.ones(width, dtype=int), mode="valid")
        for start in np.flatnonzero(counts == 0):
            out.append(f"iters {start}..{start + width - 1}: no major cycle with <= 1 minor cycle")
    return out


def write_trace_csv(result: WolfeResult, fh: IO[str]) -> None:
    """Trace export, one row per iteration."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["iter", "kind", "norm_sq", "active_size", "delta", "theta"])
    for i, r in enumerate(result.iterations):
        w.writerow([i, r.kind, repr(r.norm_sq_after), r.active_size_after,
                    "" if math.isnan(r.delta_x_q) else repr(r.delta_x_q),
                    "" if math.isnan(r.theta) else repr(r.theta)])
