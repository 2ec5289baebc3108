"""Brute-force ground truth for small instances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .functions import concave_cardinality_oracle, modular_oracle, table_oracle
from .oracle import SubmodularOracle, evaluate_all

BRUTE_LIMIT = 22
SUBMODULAR_LIMIT = 10


def mask_to_set(mask: int) -> tuple:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


@dataclass
class BruteForceResult:
    min_value: float
    minimizers: list
    evaluations: int


def brute_min(oracle: SubmodularOracle, limit: int = BRUTE_LIMIT) -> BruteForceResult:
    """Minimum over all 2**n subsets, enumerated in plain binary order."""
    if oracle.n > limit:
        raise ValueError(f"refusing brute force for n={oracle.n} > {limit}")
    table = evaluate_all(oracle, limit)
    best = float(table.min())
    masks = np.flatnonzero(table == best)
    return BruteForceResult(best, [mask_to_set(int(m)) for m in masks], len(table))


@dataclass
class Violation:
    S: tuple
    T: tuple
    i: int
    f_S: float
    f_Si: float
    f_T: float
    f_Ti: float

    def __str__(self) -> str:
        return (f"S={set(self.S) or '{}'} T={set(self.T) or '{}'} i={self.i}: "
                f"f(S+i)-f(S) = {self.f_Si - self.f_S:g} < {self.f_Ti - self.f_T:g} = f(T+i)-f(T)")


@dataclass
class SubmodularityCheck:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


def check_submodular(oracle: SubmodularOracle, tol: float = 1e-9,
                     limit: int = SUBMODULAR_LIMIT) -> SubmodularityCheck:
    """Test diminishing returns on every triple S <= T, i not in T.

    Triples are scanned by T, then i, then S in ascending bitmask order; the
    first violation found is reported with all four function values.
    """
    n = oracle.n
    if n > limit:
        raise ValueError(f"refusing exhaustive submodularity check for n={n} > {limit}")
    table = evaluate_all(oracle, limit)
    masks = np.arange(1 << n)
    for T in range(1 << n):
        subs = masks[(masks & ~T) == 0]
        for i in range(n):
            bit = 1 << i
            if T & bit:
                continue
            rhs = table[T | bit] - table[T]
            lhs = table[subs | bit] - table[subs]
            bad = np.flatnonzero(lhs < rhs - tol)
            if len(bad):
                S = int(subs[bad[0]])
                return SubmodularityCheck(False, Violation(
                    mask_to_set(S), mask_to_set(T), i,
                    float(table[S]), float(table[S | bit]), float(table[T]), float(table[T | bit])))
    return SubmodularityCheck(True)


def known_minnorm_cases() -> list:
    """Fixtures ``(name, oracle, x_star)`` whose minimum-norm base is known exactly."""
    cases = []
    pair = [0, 1, 1, 0]
    cases.append(("two-element symmetric", table_oracle(pair, 2), np.zeros(2)))
    for w in ([3, -1, 2], [0, 0, 0, 0], [-2, 5, 1, -4, 0]):
        cases.append((f"modular {w}", modular_oracle(w), np.array(w, dtype=float)))
    # symmetric f(S) = g(|S|) with concave g: x* = g(n)/n on every coordinate
    for n in (3, 5, 8):
        g = [k * (n - k) for k in range(n + 1)]
        cases.append((f"k(n-k), n={n}", concave_cardinality_oracle(g, np.zeros(n)), np.zeros(n)))
    for n, cap in ((4, 2), (6, 3), (7, 2)):
        g = [min(k, cap) for k in range(n + 1)]
        cases.append((f"min(k,{cap}), n={n}", concave_cardinality_oracle(g, np.zeros(n)),
                      np.full(n, cap / n)))
    return cases
