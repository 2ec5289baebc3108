"""Minimum-norm point of the affine hull of a finite point set.

For points ``p_1..p_m`` (columns of ``B``) the affine minimizer is ``y = B a``
with ``a = G^-1 1 / (1^T G^-1 1)``, ``G = B^T B``. ``G`` is singular whenever
the origin lies in the affine hull, and badly conditioned when the points sit
far from the origin compared with their spread. Shifting by a reference
point ``c`` and scaling by ``s`` avoids both: with ``d_i = (p_i - c) / s`` we
factor ``M = D D^T + 1 1^T``, which is positive definite exactly when the
points are affinely independent. Minimizing ``|c / s + D^T a|`` subject to
``sum(a) = 1`` gives ``M a = lam 1 - D c / s``, so ``a = lam u - w`` with
``M u = 1`` and ``M w = D c / s``, and ``lam`` is fixed by the constraint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

PIVOT_RTOL = 1e-12


class DegenerateSetError(ValueError):
    """Raised when a point is (numerically) in the affine hull of the earlier ones."""

    def __init__(self, index: int, pivot: float):
        super().__init__(f"point {index} is affinely dependent on points 0..{index - 1} "
                         f"(relative pivot {pivot:.3e})")
        self.index = index
        self.pivot = pivot


@dataclass
class AffineSolution:
    y: np.ndarray
    alpha: np.ndarray


def _default_scale(P: np.ndarray, center: np.ndarray) -> float:
    s = float(np.max(np.linalg.norm(P - center, axis=1))) if len(P) else 0.0
    return s if s > 0 else 1.0


def spread_scale(p: np.ndarray, center: np.ndarray) -> float:
    """Scale set from the second point of a growing set: its distance to the first."""
    return float(np.linalg.norm(p - center)) or 1.0


def _cholesky_upper(M: np.ndarray) -> np.ndarray:
    """Column-by-column upper Cholesky ``R^T R = M`` with a relative pivot test."""
    m = len(M)
    R = np.zeros_like(M)
    for k in range(m):
        r = solve_triangular(R[:k, :k], M[:k, k], trans="T") if k else np.empty(0)
        d2 = M[k, k] - r @ r
        if d2 <= PIVOT_RTOL * M[k, k]:
            raise DegenerateSetError(k, d2 / M[k, k])
        R[:k, k] = r
        R[k, k] = np.sqrt(d2)
    return R


def _factor(M: np.ndarray) -> np.ndarray:
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        L = None
    if L is not None and np.all(np.diag(L) ** 2 > PIVOT_RTOL * np.diag(M)):
        return L.T
    # slow path locates the first dependent point
    return _cholesky_upper(M)


def _solve_coefficients(R: np.ndarray, M: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Affine coefficients from the factor of ``M`` and ``b = D c / s``."""

    def solve(rhs):
        x = solve_triangular(R, solve_triangular(R, rhs, trans="T"))
        # one step of iterative refinement
        return x + solve_triangular(R, solve_triangular(R, rhs - M @ x, trans="T"))

    u = solve(np.ones(len(M)))
    if not np.any(b):
        return u / u.sum()
    w = solve(b)
    a = (1.0 + w.sum()) / u.sum() * u - w
    return a / a.sum()


def affine_minimizer(points: Sequence, scale: Optional[float] = None,
                     center=None) -> AffineSolution:
    """Affine minimizer of ``points`` (an ``m x n`` array, one point per row).

    ``center`` defaults to the centroid and ``scale`` to the largest distance
    from it. Raises :class:`DegenerateSetError` naming the first point that
    is affinely dependent on its predecessors.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) == 0:
        raise ValueError("need at least one point")
    if not np.all(np.isfinite(P)):
        raise ValueError("points must be finite")
    c = P.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    if scale is None:
        scale = _default_scale(P, c)
    D = (P - c) / scale
    M = D @ D.T + 1.0
    R = _factor(M)
    alpha = _solve_coefficients(R, M, D @ (c / scale))
    return AffineSolution(alpha @ P, alpha)


class IncrementalAffine:
    """Affine minimizer under single-point insertion and deletion.

    Keeps the upper Cholesky factor of the shifted augmented Gram matrix.
    The shift ``center`` defaults to the first point added and ``scale`` to
    the distance of the second point from it; both then stay fixed.
    Insertion appends a column in ``O(m^2 + mn)``; deletion restores
    triangularity with Givens rotations in ``O(m^2)``.
    """

    def __init__(self, dimension: int, scale: Optional[float] = None, center=None):
        if scale is not None and scale <= 0:
            raise ValueError("scale must be positive")
        self.dimension = dimension
        self.scale = None if scale is None else float(scale)
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.P = np.empty((0, dimension))
        self.D = np.empty((0, dimension))
        self.M = np.empty((0, 0))
        self.R = np.empty((0, 0))

    def __len__(self) -> int:
        return len(self.P)

    def add(self, point) -> None:
        p = np.asarray(point, dtype=float)
        center = p.copy() if self.center is None else self.center
        m = len(self.P)
        scale = self.scale
        if scale is None and np.any(p != center):
            scale = spread_scale(p, center)
        # without a scale p equals the center and its row is zero
        d = (p - center) / (scale or 1.0)
        col = self.D @ d + 1.0
        diag = d @ d + 1.0
        r = solve_triangular(self.R, col, trans="T") if m else np.empty(0)
        d2 = diag - r @ r
        if d2 <= PIVOT_RTOL * diag:
            raise DegenerateSetError(m, d2 / diag)
        R = np.zeros((m + 1, m + 1))
        R[:m, :m] = self.R
        R[:m, m] = r
        R[m, m] = np.sqrt(d2)
        M = np.empty((m + 1, m + 1))
        M[:m, :m] = self.M
        M[:m, m] = M[m, :m] = col
        M[m, m] = diag
        self.P = np.vstack([self.P, p])
        self.D = np.vstack([self.D, d])
        self.M, self.R = M, R
        self.center, self.scale = center, scale

    def remove(self, index: int) -> None:
        m = len(self.P)
        if not 0 <= index < m:
            raise IndexError(index)
        keep = [j for j in range(m) if j != index]
        H = self.R[:, keep]
        # H is upper Hessenberg from column `index` on; rotate rows back to triangular
        for j in range(index, m - 1):
            a, b = H[j, j], H[j + 1, j]
            h = np.hypot(a, b)
            if h == 0.0:
                continue
            c, s = a / h, b / h
            rows = H[[j, j + 1], j:]
            H[j, j:] = c * rows[0] + s * rows[1]
            H[j + 1, j:] = -s * rows[0] + c * rows[1]
            H[j + 1, j] = 0.0
        self.R = H[: m - 1]
        self.M = self.M[np.ix_(keep, keep)]
        self.P = self.P[keep]
        self.D = self.D[keep]

    def refactor(self) -> None:
        """Rebuild the factorization from the stored points."""
        self.M = self.D @ self.D.T + 1.0
        self.R = _factor(self.M) if len(self.P) else np.empty((0, 0))

    def solve(self) -> AffineSolution:
        if len(self.P) == 0:
            raise ValueError("empty point set")
        # before a scale exists every row of D is zero
        alpha = _solve_coefficients(self.R, self.M, self.D @ (self.center / (self.scale or 1.0)))
        return AffineSolution(alpha @ self.P, alpha)
