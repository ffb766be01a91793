"""Walsh-Hadamard spectra on {0,1}^n and the exact spectrum of majority.

Coefficients use the uniform-measure normalisation

    g_hat(S) = 2**-n * sum_x g(x) w_S(x),   w_S(x) = (-1)**popcount(x & S),

with bit j of the mask S standing for binary digit x_j.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import DEFAULT_SEGMENT, Kind, SieveWindow, popcount, stream_windows
from .budget import check_alloc

NORMALIZATION = "uniform-measure"


@dataclass(frozen=True)
class SpectrumVector:
    n: int
    coeffs: np.ndarray
    normalization: str = NORMALIZATION

    def __getitem__(self, mask):
        return self.coeffs[mask]

    def total_power(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))


@dataclass(frozen=True)
class LevelWeights:
    """W[k] = squared coefficient mass on level k; ``tail[k]`` is mass above k."""

    n: int
    W: np.ndarray
    tail: np.ndarray | None = field(default=None)

    def total(self) -> float:
        return math.fsum(self.W)


def _log2_exact(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise ValueError(f"length {length} is not a power of two")
    return length.bit_length() - 1


def _butterfly(a: np.ndarray) -> np.ndarray:
    """Unnormalised in-place Hadamard transform of a 1-D float array."""
    N = a.shape[0]
    h = 1
    while h < N:
        v = a.reshape(-1, 2, h)
        top = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        top -= v[:, 1, :]
        v[:, 1, :] = top
        h *= 2
    return a


def fwht(values, max_mem: int | None = None) -> SpectrumVector:
    values = np.asarray(values)
    n = _log2_exact(values.shape[0])
    check_alloc(16 * values.shape[0], max_mem, "FWHT buffer")
    a = np.array(values, dtype=np.float64, copy=True)
    _butterfly(a)
    a /= a.shape[0]
    return SpectrumVector(n, a)


def inverse_fwht(spectrum: SpectrumVector) -> np.ndarray:
    """Recover g(x) = sum_S g_hat(S) w_S(x)."""
    return _butterfly(np.array(spectrum.coeffs, dtype=np.float64, copy=True))


def walsh_character(mask: int, x):
    """w_S(x) as +-1; works on scalars and integer arrays."""
    if np.isscalar(x):
        return -1 if (int(x) & mask).bit_count() & 1 else 1
    return 1 - 2 * (popcount(np.asarray(x, dtype=np.int64) & mask) & 1)


def walsh_coefficient_streaming(
    n: int,
    kind: Kind | str,
    mask: int,
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
) -> float:
    """Lambda_hat(S) (or mu_hat(S)) accumulated window by window."""
    if not 0 <= mask < (1 << n):
        raise ValueError(f"mask {mask} out of range for n={n}")

    def visit(w: SieveWindow) -> float:
        idx = np.flatnonzero(w.values)
        x = idx + w.lo
        return math.fsum(w.values[idx] * walsh_character(mask, x))

    total = stream_windows(n, kind, min(segment_size, 1 << n), visit, workers=workers)
    return total / (1 << n)


def low_level_coefficients(
    n: int,
    kind: Kind | str = Kind.VON_MANGOLDT,
    level_max: int = 3,
    segment_size: int = DEFAULT_SEGMENT,
) -> dict[int, float]:
    """Every coefficient with 1 <= |S| <= level_max in one streaming pass.

    Per window the sign matrix E[x, j] = 1 - 2 x_j is contracted against the
    function values, giving all first, second and third order moments at once.
    """
    if not 1 <= level_max <= 3:
        raise ValueError("level_max must be 1, 2 or 3")
    if level_max > n:
        level_max = n
    bits = np.arange(n, dtype=np.int64)

    def visit(w: SieveWindow) -> np.ndarray:
        idx = np.flatnonzero(w.values)
        v = w.values[idx]
        E = 1.0 - 2.0 * (((idx + w.lo)[:, None] >> bits) & 1)
        out = np.zeros((n + 1,) * 3)
        out[n, n, :n] = E.T @ v
        if level_max >= 2:
            out[n, :n, :n] = (E * v[:, None]).T @ E
        if level_max >= 3:
            for j in range(n):
                out[j, :n, :n] = (E * (v * E[:, j])[:, None]).T @ E
        return out

    moments = stream_windows(n, kind, min(segment_size, 1 << n), visit)
    moments /= 1 << n
    result: dict[int, float] = {}
    for level in range(1, level_max + 1):
        for combo in itertools.combinations(range(n), level):
            pad = (n,) * (3 - level) + combo
            result[sum(1 << j for j in combo)] = float(moments[pad])
    return result


def level_weights(spectrum: SpectrumVector) -> LevelWeights:
    levels = popcount(np.arange(spectrum.coeffs.shape[0]))
    W = np.bincount(levels, weights=spectrum.coeffs ** 2, minlength=spectrum.n + 1)
    return LevelWeights(spectrum.n, W)


def krawtchouk_class_sum(n: int, k: int, j: int) -> int:
    """Sum of w_S over the digit class Omega_j for any |S| = k (exact integer).

    Python integers are unbounded, so the result never wraps.
    """
    if not (0 <= k <= n and 0 <= j <= n):
        raise ValueError(f"need 0 <= k, j <= n, got n={n}, k={k}, j={j}")
    return sum((-1) ** i * math.comb(k, i) * math.comb(n - k, j - i)
               for i in range(max(0, j - (n - k)), min(k, j) + 1))


def _require_odd(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"majority needs an odd bit-length, got n={n}")


def majority_level_coefficient_exact(n: int, k: int) -> Fraction:
    _require_odd(n)
    if not 0 <= k <= n:
        raise ValueError(f"level k={k} out of range for n={n}")
    total = sum(krawtchouk_class_sum(n, k, j) for j in range((n + 1) // 2, n + 1))
    return Fraction(total, 1 << n)


def majority_level_coefficient(n: int, k: int) -> float:
    """f_hat(S) for any |S| = k, f the 0/1 majority on n (odd) digits."""
    return float(majority_level_coefficient_exact(n, k))


def majority_spectrum_profile(n: int, k_max: int | None = None) -> LevelWeights:
    """Level weights C(n,k) f_hat(k)**2 for k <= k_max, with exact tails.

    All levels are evaluated in rational arithmetic, so the tail
    ``T_k = sum_{k' > k} W_k'`` is exact for every n.
    """
    _require_odd(n)
    k_max = n if k_max is None else min(k_max, n)
    exact = [math.comb(n, k) * majority_level_coefficient_exact(n, k) ** 2 for k in range(n + 1)]
    tails, acc = [Fraction(0)] * (n + 1), Fraction(0)
    for k in range(n, -1, -1):
        tails[k] = acc
        acc += exact[k]
    W = np.array([float(w) for w in exact[: k_max + 1]])
    T = np.array([float(t) for t in tails[: k_max + 1]])
    return LevelWeights(n, W, T)
