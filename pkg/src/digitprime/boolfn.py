"""Symmetric and character-type Boolean functions on n binary digits.

``majority``, ``threshold`` and ``dictator`` take values in {0, 1};
``parity`` and ``walsh`` characters take values in {-1, +1}.  Keeping the
codomain attached to the variant avoids silent factor-of-two slips between
the two conventions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import DEFAULT_SEGMENT, ArithTable, Kind, SieveWindow, popcount, stream_windows
from .walsh import SpectrumVector

VARIANTS = ("majority", "parity", "dictator", "threshold", "walsh")
SYMMETRIC = ("majority", "parity", "threshold")


class NotSymmetricError(ValueError):
    pass


@dataclass(frozen=True)
class BooleanFunctionSpec:
    variant: str
    n: int
    param: int = 0  # dictator index, threshold level, or Walsh mask

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.variant == "majority" and self.n % 2 == 0:
            raise ValueError("majority requires odd n")
        if self.variant == "dictator" and not 0 <= self.param < self.n:
            raise ValueError(f"dictator index {self.param} out of range")
        if self.variant == "threshold" and not 0 <= self.param <= self.n:
            raise ValueError(f"threshold {self.param} out of range")
        if self.variant == "walsh" and not 0 <= self.param < (1 << self.n):
            raise ValueError(f"Walsh mask {self.param} out of range")

    @classmethod
    def majority(cls, n: int) -> "BooleanFunctionSpec":
        return cls("majority", n)

    @classmethod
    def parity(cls, n: int) -> "BooleanFunctionSpec":
        return cls("parity", n)

    @classmethod
    def dictator(cls, n: int, j: int) -> "BooleanFunctionSpec":
        return cls("dictator", n, j)

    @classmethod
    def threshold(cls, n: int, t: int) -> "BooleanFunctionSpec":
        """1 iff the digit sum is at least ``t``; ``t = 0`` is the constant 1."""
        return cls("threshold", n, t)

    @classmethod
    def walsh(cls, n: int, mask: int) -> "BooleanFunctionSpec":
        return cls("walsh", n, mask)

    @property
    def signed(self) -> bool:
        return self.variant in ("parity", "walsh")

    @property
    def symmetric(self) -> bool:
        return self.variant in SYMMETRIC


def evaluate_array(spec: BooleanFunctionSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if spec.variant == "dictator":
        return (x >> spec.param) & 1
    if spec.variant == "walsh":
        return 1 - 2 * (popcount(x & spec.param) & 1)
    s = popcount(x)
    if spec.variant == "majority":
        return (2 * s > spec.n).astype(np.int64)
    if spec.variant == "threshold":
        return (s >= spec.param).astype(np.int64)
    return 1 - 2 * (s & 1)


def evaluate(spec: BooleanFunctionSpec, x: int) -> int:
    if not 0 <= x < (1 << spec.n):
        raise ValueError(f"x={x} is not an {spec.n}-bit input")
    return int(evaluate_array(spec, np.array([x]))[0])


def class_average(spec: BooleanFunctionSpec, k: int) -> float:
    """Mean of the function over the digit class Omega_k."""
    if not spec.symmetric:
        raise NotSymmetricError(f"{spec.variant} is not symmetric under digit permutations")
    if not 0 <= k <= spec.n:
        raise ValueError(f"k={k} out of range for n={spec.n}")
    if spec.variant == "majority":
        return 1.0 if 2 * k > spec.n else 0.0
    if spec.variant == "threshold":
        return 1.0 if k >= spec.param else 0.0
    return -1.0 if k & 1 else 1.0


def correlate(table: ArithTable, spec: BooleanFunctionSpec) -> float:
    """sum_{1 <= x < 2**n} table(x) * f(x) for a dense table."""
    if table.n != spec.n:
        raise ValueError(f"table has n={table.n} but spec has n={spec.n}")
    idx = np.flatnonzero(table.values)
    idx = idx[idx >= 1]
    return math.fsum(table.values[idx] * evaluate_array(spec, idx))


def correlate_streaming(
    n: int,
    kind: Kind | str,
    spec: BooleanFunctionSpec,
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
) -> float:
    """Same sum as :func:`correlate`, sieving window by window."""
    if n != spec.n:
        raise ValueError(f"n={n} but spec has n={spec.n}")

    def visit(w: SieveWindow) -> float:
        idx = np.flatnonzero(w.values)
        return math.fsum(w.values[idx] * evaluate_array(spec, idx + w.lo))

    return stream_windows(n, kind, min(segment_size, 1 << n), visit, workers=workers)


def apply_noise(spectrum: SpectrumVector, rho: float) -> SpectrumVector:
    """T_rho: scale each level-k coefficient by rho**k."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"noise parameter must lie in [0, 1], got {rho}")
    levels = popcount(np.arange(spectrum.coeffs.shape[0]))
    factors = np.power(float(rho), np.arange(spectrum.n + 1))
    return SpectrumVector(spectrum.n, spectrum.coeffs * factors[levels], spectrum.normalization)
