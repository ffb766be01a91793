"""Von Mangoldt mass per binary digit class Omega_k = {x : popcount(x) = k}."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import DEFAULT_SEGMENT, ArithTable, Kind, SieveWindow, popcount, stream_windows
from .boolfn import BooleanFunctionSpec, class_average

MAX_MOMENT_ORDER = 8


@dataclass(frozen=True)
class DigitClassSums:
    n: int
    s: np.ndarray
    psi: float

    @classmethod
    def from_sums(cls, n: int, s) -> "DigitClassSums":
        s = np.asarray(s, dtype=np.float64)
        if s.shape != (n + 1,):
            raise ValueError(f"expected {n + 1} class sums, got shape {s.shape}")
        return cls(n, s, math.fsum(s))


@dataclass(frozen=True)
class TailReport:
    delta: float
    mass: float
    normalized: float


def _bucket(n: int, values: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return np.bincount(popcount(xs), weights=values, minlength=n + 1)


def digit_class_sums(
    n: int,
    kind: Kind | str = Kind.VON_MANGOLDT,
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
) -> DigitClassSums:
    """s_k for k = 0..n, bucketed by digit sum while streaming the sieve.

    Per-window buckets are combined with a compensated sum in window order.
    """
    def visit(w: SieveWindow) -> np.ndarray:
        idx = np.flatnonzero(w.values)
        return _bucket(n, w.values[idx], idx + w.lo)

    s = stream_windows(n, kind, min(segment_size, 1 << n), visit, workers=workers)
    return DigitClassSums.from_sums(n, s)


def digit_class_sums_from_table(table: ArithTable) -> DigitClassSums:
    idx = np.flatnonzero(table.values)
    idx = idx[idx >= 1]
    return DigitClassSums.from_sums(table.n, _bucket(table.n, table.values[idx], idx))


def symmetrized_value(sums: DigitClassSums, k: int) -> float:
    """Constant value of the symmetrised function on Omega_k."""
    if not 0 <= k <= sums.n:
        raise ValueError(f"k={k} out of range for n={sums.n}")
    return float(sums.s[k]) / math.comb(sums.n, k)


def symmetrized_inner_product(sums: DigitClassSums, spec: BooleanFunctionSpec) -> float:
    if spec.n != sums.n:
        raise ValueError(f"spec has n={spec.n}, sums have n={sums.n}")
    return math.fsum(float(sums.s[k]) * class_average(spec, k) for k in range(sums.n + 1))


def central_moment(sums: DigitClassSums, R: int) -> float:
    """sum_k s_k |n/2 - k|**(2R)."""
    if not 0 <= R <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order R must lie in [0, {MAX_MOMENT_ORDER}], got {R}")
    half = sums.n / 2
    return math.fsum(float(sums.s[k]) * abs(half - k) ** (2 * R) for k in range(sums.n + 1))


def tail_mass(sums: DigitClassSums, delta: float) -> TailReport:
    """Mass of the classes with |k - n/2| >= delta * sqrt(n)."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    cut = delta * math.sqrt(sums.n)
    k = np.arange(sums.n + 1)
    mass = math.fsum(sums.s[np.abs(k - sums.n / 2) >= cut])
    return TailReport(float(delta), mass, mass / (1 << sums.n))


def max_central_class(sums: DigitClassSums, delta_window: float) -> float:
    """max over |k - n/2| <= delta_window * sqrt(n) of s_k / 2**n."""
    if delta_window <= 0:
        raise ValueError("delta_window must be positive")
    k = np.arange(sums.n + 1)
    sel = sums.s[np.abs(k - sums.n / 2) <= delta_window * math.sqrt(sums.n)]
    return float(sel.max()) / (1 << sums.n) if sel.size else 0.0
