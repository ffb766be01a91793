"""Exponential sums weighted by exp(i * lam * digit_sum(x)).

U_lam(x) = exp(i lam popcount(x)).  Everything here is evaluated exactly
from digit-class sums or from closed digit products; no smoothing kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import DEFAULT_SEGMENT, Kind, SieveWindow, popcount, sieve_segment, stream_windows
from .budget import check_alloc
from .digitclass import DigitClassSums, digit_class_sums

_CHUNK = 1 << 18


@dataclass(frozen=True)
class ExpSumSeries:
    n: int
    grid: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class RationalApprox:
    m: int
    r: int
    a: int
    q: int
    theta: float

    @property
    def theta_exact(self) -> Fraction:
        return Fraction(self.r, 1 << self.m) - Fraction(self.a, self.q)


@dataclass(frozen=True)
class UFourierMax:
    n: int
    lam: float
    max_magnitude: float
    argmax: int
    exhaustive: bool
    samples: int


@dataclass(frozen=True)
class BilinearSumConfig:
    n: int
    m1: int
    mode: str = "typeI"
    a: np.ndarray | None = None
    b: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in ("typeI", "typeII"):
            raise ValueError(f"mode must be typeI or typeII, got {self.mode!r}")
        if not 0 <= self.m1 <= self.m2:
            raise ValueError(f"need 0 <= m1 <= m2, got m1={self.m1}, m2={self.m2}")
        if self.mode == "typeII":
            if self.a is None or self.b is None:
                raise ValueError("typeII sums need both coefficient sequences")
            if len(self.a) != self.M1 or len(self.b) != self.M2:
                raise ValueError("coefficient lengths must be M1 and M2")
            if np.max(np.abs(self.a)) > 1 + 1e-12 or np.max(np.abs(self.b)) > 1 + 1e-12:
                raise ValueError("coefficients must be bounded by 1 in modulus")

    @property
    def m2(self) -> int:
        return self.n - self.m1

    @property
    def M1(self) -> int:
        return 1 << self.m1

    @property
    def M2(self) -> int:
        return 1 << self.m2


@dataclass(frozen=True)
class BilinearResult:
    raw: float
    normalized: float


def _check_lambda(lam: float) -> None:
    if not -math.pi - 1e-12 <= lam <= math.pi + 1e-12:
        raise ValueError(f"lambda must lie in [-pi, pi], got {lam}")


def exp_sum(n: int, lam: float, sums: DigitClassSums | None = None) -> complex:
    """S(lam) = sum_k s_k exp(i lam k), built from the digit-class sums."""
    _check_lambda(lam)
    if sums is None:
        sums = digit_class_sums(n)
    k = np.arange(sums.n + 1)
    terms = sums.s * np.exp(1j * lam * k)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def exp_sum_series(sums: DigitClassSums, grid) -> ExpSumSeries:
    grid = np.asarray(grid, dtype=np.float64)
    vals = np.array([exp_sum(sums.n, float(l), sums) for l in grid])
    return ExpSumSeries(sums.n, grid, vals)


def exp_sum_direct(n: int, lam: float, segment_size: int = DEFAULT_SEGMENT) -> complex:
    """Second, independent path: stream Lambda(x) exp(i lam popcount(x))."""
    _check_lambda(lam)

    def visit(w: SieveWindow) -> complex:
        idx = np.flatnonzero(w.values)
        z = w.values[idx] * np.exp(1j * lam * popcount(idx + w.lo))
        return complex(math.fsum(z.real), math.fsum(z.imag))

    return stream_windows(n, Kind.VON_MANGOLDT, min(segment_size, 1 << n), visit)


def inversion_grid(n: int) -> np.ndarray:
    """lam_t = 2 pi t / (n + 1), wrapped into [-pi, pi]."""
    t = np.arange(n + 1)
    lam = 2 * np.pi * t / (n + 1)
    return np.where(lam > np.pi, lam - 2 * np.pi, lam)


def class_sums_from_series(series: ExpSumSeries) -> np.ndarray:
    """Finite Fourier inversion s_k = (1/(n+1)) sum_t S(lam_t) exp(-i lam_t k).

    Exact because digit sums of x < 2**n lie in [0, n].
    """
    n = series.n
    if series.grid.shape != (n + 1,) or not np.allclose(series.grid, inversion_grid(n)):
        raise ValueError("series must be sampled on inversion_grid(n)")
    k = np.arange(n + 1)
    kernel = np.exp(-1j * np.outer(k, series.grid))
    return (kernel @ series.values).real / (n + 1)


def u_fourier_coefficients(n: int, lam: float, xi) -> np.ndarray:
    """U_lam_hat(xi) = prod_j (1 + e^{i lam} e^{-2 pi i 2^j xi / 2^n}) / 2.

    Phases are reduced modulo 2**n in integer arithmetic before scaling.
    """
    full = (1 << n) - 1
    phase_int = np.asarray(xi, dtype=np.int64) & full
    out = np.ones(phase_int.shape, dtype=np.complex128)
    e = complex(math.cos(lam), math.sin(lam))
    scale = 2 * math.pi / (1 << n)
    for _ in range(n):
        out *= (1 + e * np.exp(-1j * phase_int.astype(np.float64) * scale)) / 2
        phase_int = (phase_int << 1) & full
    return out


def u_fourier_coefficient(n: int, lam: float, xi: int) -> complex:
    return complex(u_fourier_coefficients(n, lam, np.array([xi]))[0])


def _stratified_sample(n: int, budget: int) -> np.ndarray:
    N = 1 << n
    stride = N // budget
    i = np.arange(budget, dtype=np.int64)
    offsets = (i * 2654435761) % stride
    return i * stride + offsets


def u_fourier_max(n: int, lam: float, sample_budget: int = 1 << 20) -> UFourierMax:
    """max over xi of |U_lam_hat(xi)|, exhaustive when 2**n <= sample_budget."""
    if sample_budget < (1 << 12):
        raise ValueError("sample_budget must be at least 2**12")
    N = 1 << n
    exhaustive = N <= sample_budget
    best, arg = -1.0, 0
    if exhaustive:
        chunks = (np.arange(lo, min(lo + _CHUNK, N), dtype=np.int64) for lo in range(0, N, _CHUNK))
        samples = N
    else:
        pts = _stratified_sample(n, 1 << (sample_budget.bit_length() - 1))
        chunks = (pts[i:i + _CHUNK] for i in range(0, len(pts), _CHUNK))
        samples = len(pts)
    for xs in chunks:
        mag = np.abs(u_fourier_coefficients(n, lam, xs))
        i = int(np.argmax(mag))
        if mag[i] > best:
            best, arg = float(mag[i]), int(xs[i])
    return UFourierMax(n, float(lam), best, arg, exhaustive, samples)


def walsh_char_fourier(m: int, mask: int, r: int) -> complex:
    """2**-m sum_y w_S(y) e(r y / 2**m) as a product over digits."""
    if not 0 <= r < (1 << m):
        raise ValueError(f"r={r} out of range for m={m}")
    if mask >> m:
        raise ValueError(f"mask {mask:#x} has digits beyond m={m}")
    out = complex(1.0)
    for j in range(m):
        z = np.exp(2j * math.pi * (((r << j) % (1 << m)) / (1 << m)))
        out *= (1 - z) / 2 if (mask >> j) & 1 else (1 + z) / 2
    return out


def walsh_char_fourier_magnitude(m: int, mask: int, r: int) -> float:
    """prod_{j not in S} |cos(pi 2^j phi)| * prod_{j in S} |sin(pi 2^j phi)|, phi = r / 2**m."""
    if not 0 <= r < (1 << m):
        raise ValueError(f"r={r} out of range for m={m}")
    if mask >> m:
        raise ValueError(f"mask {mask:#x} has digits beyond m={m}")
    out = 1.0
    for j in range(m):
        t = math.pi * (((r << j) % (1 << m)) / (1 << m))
        out *= abs(math.sin(t)) if (mask >> j) & 1 else abs(math.cos(t))
    return out


def convergents(num: int, den: int):
    """Continued-fraction convergents (p, q) of num / den, in order."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    while den:
        a, (num, den) = num // den, (den, num % den)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


def rational_scan(m: int, r: int, Q: int) -> RationalApprox:
    """Last convergent a/q of r / 2**m with q <= Q.

    This minimises |q * r / 2**m - a| over 1 <= q <= Q (smallest q on ties)
    and guarantees |theta| < 1 / (q (Q + 1)).
    """
    if Q < 1:
        raise ValueError("Q must be at least 1")
    if not 0 <= r < (1 << m):
        raise ValueError(f"r={r} out of range for m={m}")
    a, q = 0, 1
    for pk, qk in convergents(r, 1 << m):
        if qk > Q:
            break
        a, q = pk, qk
    theta = Fraction(r, 1 << m) - Fraction(a, q)
    return RationalApprox(m, r, a, q, float(theta))


def _phase_table(lam: float, max_bits: int) -> np.ndarray:
    return np.exp(1j * lam * np.arange(max_bits + 1))


def bilinear_sum(config: BilinearSumConfig, lam: float, max_mem: int | None = None) -> BilinearResult:
    """Type-I: sum_{x1} |sum_{x2} U(x1 x2)|; Type-II: |sum a_{x1} b_{x2} U(x1 x2)|.

    x1 runs over [M1, 2 M1) and x2 over [M2, 2 M2).
    """
    _check_lambda(lam)
    M1, M2 = config.M1, config.M2
    rows = max(1, min(M1, _CHUNK // M2 or 1))
    check_alloc(32 * rows * M2, max_mem, "bilinear block")
    table = _phase_table(lam, config.n + 2)
    x1 = np.arange(M1, 2 * M1, dtype=np.int64)
    x2 = np.arange(M2, 2 * M2, dtype=np.int64)
    b = None if config.mode == "typeI" else np.asarray(config.b, dtype=np.complex128)
    a = None if config.mode == "typeI" else np.asarray(config.a, dtype=np.complex128)
    partial_abs: list[float] = []
    partial_re: list[float] = []
    partial_im: list[float] = []
    for i in range(0, M1, rows):
        U = table[popcount(np.outer(x1[i:i + rows], x2))]
        if b is None:
            partial_abs.extend(np.abs(U.sum(axis=1)).tolist())
        else:
            inner = (U @ b) * a[i:i + rows]
            partial_re.extend(inner.real.tolist())
            partial_im.extend(inner.imag.tolist())
    if b is None:
        raw = math.fsum(partial_abs)
    else:
        raw = abs(complex(math.fsum(partial_re), math.fsum(partial_im)))
    return BilinearResult(raw, raw / (1 << config.n))


def coefficient_preset(config_n: int, m1: int, preset: str) -> tuple[np.ndarray, np.ndarray]:
    """Bounded Type-II coefficients on [M1, 2M1) x [M2, 2M2).

    ``ones``: a = b = 1.  ``mu-lambda``: a = mu, b = Lambda / ln(2 M2) so
    that |b| <= 1.
    """
    M1, M2 = 1 << m1, 1 << (config_n - m1)
    if preset == "ones":
        return np.ones(M1), np.ones(M2)
    if preset == "mu-lambda":
        a = sieve_segment(M1, 2 * M1, Kind.MOEBIUS).values
        b = sieve_segment(M2, 2 * M2, Kind.VON_MANGOLDT).values / math.log(2 * M2)
        return a, b
    raise ValueError(f"unknown coefficient preset {preset!r}")
