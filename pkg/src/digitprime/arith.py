"""Segmented sieves for the von Mangoldt and Moebius functions on [0, 2**n)."""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from .budget import BudgetExceeded, check_alloc

N_MAX_DENSE = 26
N_MAX_STREAM = 34
DEFAULT_SEGMENT = 1 << 20


class Kind(str, enum.Enum):
    VON_MANGOLDT = "vonMangoldt"
    MOEBIUS = "moebius"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, Kind):
            return value
        key = str(value).replace("_", "").replace("-", "").lower()
        aliases = {"vonmangoldt": cls.VON_MANGOLDT, "lambda": cls.VON_MANGOLDT,
                   "vm": cls.VON_MANGOLDT, "moebius": cls.MOEBIUS,
                   "mobius": cls.MOEBIUS, "mu": cls.MOEBIUS}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown arithmetic function {value!r}") from None


@dataclass(frozen=True)
class ArithTable:
    """Dense values of an arithmetic function on [0, 2**n); ``values[0] == 0``."""

    n: int
    kind: Kind
    values: np.ndarray

    def __getitem__(self, x):
        return self.values[x]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SieveWindow:
    lo: int
    hi: int
    values: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)


def popcount(x: np.ndarray) -> np.ndarray:
    """Vectorised binary digit sum."""
    return np.bitwise_count(np.asarray(x, dtype=np.uint64)).astype(np.int64)


def digit_sum(x: int) -> int:
    if x < 0:
        raise ValueError("digit_sum is defined for x >= 0")
    return int(x).bit_count()


def base_primes(limit: int) -> np.ndarray:
    """All primes p <= limit (plain Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def _check_n(n: int, n_max: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"bit-length must be a positive integer, got {n!r}")
    if n > n_max:
        raise BudgetExceeded(f"n={n} exceeds the configured limit n_max={n_max}")


def prime_mask(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """Boolean primality of every x in [lo, hi); ``primes`` must cover sqrt(hi)."""
    mask = np.ones(hi - lo, dtype=bool)
    mask[: max(0, min(2, hi) - lo)] = False
    for p in primes.tolist():
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, -(-lo // p) * p)
        mask[start - lo::p] = False
    return mask


def _von_mangoldt_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    mask = prime_mask(lo, hi, primes)
    vals = np.zeros(hi - lo, dtype=np.float64)
    idx = np.flatnonzero(mask)
    vals[idx] = np.log((idx + lo).astype(np.float64))
    # higher prime powers p**m, m >= 2, are sparse: place them directly
    for p in primes.tolist():
        q = p * p
        if q >= hi:
            break
        lnp = math.log(p)
        while q < hi:
            if q >= lo:
                vals[q - lo] = lnp
            q *= p
    return vals


def _moebius_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    mu = np.ones(hi - lo, dtype=np.int8)
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes.tolist():
        if p * p >= hi:
            break
        start = -(-lo // p) * p
        mu[start - lo::p] *= -1
        rem[start - lo::p] //= p
        pp = p * p
        start = -(-lo // pp) * pp
        mu[start - lo::pp] = 0
    # what is left above 1 is a single prime factor larger than sqrt(hi)
    mu[rem > 1] *= -1
    if lo == 0:
        mu[0] = 0
    return mu.astype(np.float64)


def sieve_segment(lo: int, hi: int, kind: Kind | str, primes: np.ndarray | None = None) -> SieveWindow:
    kind = Kind.parse(kind)
    if primes is None:
        primes = base_primes(math.isqrt(max(hi - 1, 1)))
    if kind is Kind.VON_MANGOLDT:
        vals = _von_mangoldt_segment(lo, hi, primes)
    else:
        vals = _moebius_segment(lo, hi, primes)
    return SieveWindow(lo, hi, vals)


def window_bounds(n: int, segment_size: int) -> list[tuple[int, int]]:
    """Tiling of [1, 2**n) into windows aligned to multiples of ``segment_size``.

    The first window starts at 1 so x = 0 never appears in a window.
    """
    N = 1 << n
    if segment_size < 1 or segment_size & (segment_size - 1):
        raise ValueError("segment_size must be a power of two")
    if segment_size > N:
        raise ValueError("segment_size must not exceed 2**n")
    return [(max(lo, 1), lo + segment_size) for lo in range(0, N, segment_size)]


def _sum_partials(partials: Sequence[Any]) -> Any:
    """Order-fixed, compensated reduction of scalars or equal-shape arrays."""
    if not partials:
        return 0.0
    first = partials[0]
    if isinstance(first, np.ndarray):
        stack = np.stack(partials)
        if np.iscomplexobj(stack):
            return _fsum_cols(stack.real) + 1j * _fsum_cols(stack.imag)
        return _fsum_cols(stack)
    if isinstance(first, complex):
        return complex(math.fsum(p.real for p in partials), math.fsum(p.imag for p in partials))
    if isinstance(first, (int, np.integer)) and not isinstance(first, bool):
        return int(sum(int(p) for p in partials))
    return math.fsum(partials)


def _fsum_cols(stack: np.ndarray) -> np.ndarray:
    flat = stack.reshape(stack.shape[0], -1)
    out = np.array([math.fsum(col) for col in flat.T], dtype=np.float64)
    return out.reshape(stack.shape[1:])


def stream_windows(
    n: int,
    kind: Kind | str,
    segment_size: int,
    visitor: Callable[[SieveWindow], Any],
    reduce: Callable[[Sequence[Any]], Any] | None = None,
    workers: int = 1,
    max_mem: int | None = None,
) -> Any:
    """Sieve [1, 2**n) window by window and fold ``visitor`` results.

    Partial results are reduced in ascending window order whatever the
    number of workers, so the aggregate is reproducible.
    """
    kind = Kind.parse(kind)
    _check_n(n, N_MAX_STREAM)
    check_alloc(24 * segment_size * max(1, workers), max_mem, "sieve window")
    bounds = window_bounds(n, segment_size)
    primes = base_primes(math.isqrt((1 << n) - 1))

    def job(b: tuple[int, int]) -> Any:
        return visitor(sieve_segment(b[0], b[1], kind, primes))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(job, bounds))
    else:
        partials = [job(b) for b in bounds]
    return (reduce or _sum_partials)(partials)


def iter_windows(n: int, kind: Kind | str, segment_size: int = DEFAULT_SEGMENT) -> Iterator[SieveWindow]:
    kind = Kind.parse(kind)
    _check_n(n, N_MAX_STREAM)
    segment_size = min(segment_size, 1 << n)
    primes = base_primes(math.isqrt((1 << n) - 1))
    for lo, hi in window_bounds(n, segment_size):
        yield sieve_segment(lo, hi, kind, primes)


def iter_prime_windows(n: int, segment_size: int = DEFAULT_SEGMENT) -> Iterator[np.ndarray]:
    """Yield the primes below 2**n, one ascending array per window."""
    _check_n(n, N_MAX_STREAM)
    segment_size = min(segment_size, 1 << n)
    primes = base_primes(math.isqrt((1 << n) - 1))
    for lo, hi in window_bounds(n, segment_size):
        yield np.flatnonzero(prime_mask(lo, hi, primes)) + lo


def sieve_table(
    n: int,
    kind: Kind | str,
    max_mem: int | None = None,
    n_max: int = N_MAX_DENSE,
    segment_size: int = DEFAULT_SEGMENT,
) -> ArithTable:
    """Dense table of Lambda or mu on [0, 2**n)."""
    kind = Kind.parse(kind)
    _check_n(n, n_max)
    N = 1 << n
    check_alloc(8 * N, max_mem, f"dense {kind.value} table for n={n}")
    values = np.zeros(N, dtype=np.float64)
    for w in iter_windows(n, kind, segment_size):
        values[w.lo:w.hi] = w.values
    values.setflags(write=False)
    return ArithTable(n, kind, values)


def _segment_for(n: int, segment_size: int | None) -> int:
    return min(segment_size or DEFAULT_SEGMENT, 1 << n)


def chebyshev_psi(n: int, segment_size: int | None = None, workers: int = 1) -> float:
    """psi = sum of Lambda(x) over 1 <= x < 2**n."""
    return stream_windows(n, Kind.VON_MANGOLDT, _segment_for(n, segment_size),
                          lambda w: math.fsum(w.values[w.values != 0]), workers=workers)


def prime_count(n: int, segment_size: int | None = None) -> int:
    """Number of primes below 2**n."""
    return sum(len(p) for p in iter_prime_windows(n, _segment_for(n, segment_size)))
