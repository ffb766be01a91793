"""Decay-law fits and the experiment drivers behind the CLI."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.stats import spearmanr

from . import __version__
from .arith import DEFAULT_SEGMENT, iter_prime_windows, popcount
from .boolfn import BooleanFunctionSpec, correlate_streaming
from .digitclass import (DigitClassSums, digit_class_sums, max_central_class,
                         symmetrized_inner_product, tail_mass)
from .expsum import u_fourier_max
from .walsh import low_level_coefficients, majority_spectrum_profile, walsh_coefficient_streaming

MODELS = ("powerLaw", "expLaw")


@dataclass(frozen=True)
class DecayFit:
    """y = A x**-exponent (powerLaw) or y = A exp(-exponent x) (expLaw)."""

    model: str
    A: float
    exponent: float
    r2: float
    points: tuple[tuple[float, float], ...]

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.model == "powerLaw":
            return self.A * x ** (-self.exponent)
        return self.A * np.exp(-self.exponent * x)

    def to_dict(self) -> dict[str, Any]:
        return {"model": self.model, "A": self.A, "exponent": self.exponent,
                "r2": self.r2, "points": [list(p) for p in self.points]}


@dataclass
class ExperimentRecord:
    experiment: str
    params: dict[str, Any]
    results: dict[str, Any]
    wall_time: float = 0.0
    version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return {"experiment": self.experiment, **self.params, **self.results,
                "wall_time": self.wall_time, "version": self.version}


def fit_decay(points: Iterable[tuple[float, float]], model: str) -> DecayFit:
    """Least squares on (x or log x, log y)."""
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    pts = tuple(sorted((float(x), float(y)) for x, y in points))
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("all y values must be positive and finite")
    if model == "powerLaw":
        if np.any(x <= 0):
            raise ValueError("power-law fit needs x > 0")
        x = np.log(x)
    if np.ptp(x) == 0:
        raise ValueError("degenerate fit: all x values are equal")
    ly = np.log(y)
    slope, intercept = np.polyfit(x, ly, 1)
    ss_res = float(np.sum((ly - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return DecayFit(model, float(math.exp(intercept)), float(-slope), r2, pts)


def trend_decreasing(values: Sequence[float]) -> bool:
    """Last below first, and the median successive step is not positive."""
    if len(values) < 2:
        return False
    return values[-1] < values[0] and float(np.median(np.diff(values))) <= 0


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def theorem1_scan(
    n_list: Sequence[int],
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
) -> tuple[list[ExperimentRecord], DecayFit | None]:
    """Correlation of Lambda with majority, one record per odd n."""
    records = []
    for n in n_list:
        if n % 2 == 0:
            raise ValueError(f"theorem1 needs odd n, got {n}")
        t0 = time.perf_counter()
        spec = BooleanFunctionSpec.majority(n)
        corr = correlate_streaming(n, "vonMangoldt", spec, segment_size, workers)
        sums = digit_class_sums(n, segment_size=segment_size, workers=workers)
        N = 1 << n
        records.append(ExperimentRecord("theorem1", {"n": n}, {
            "correlation": corr,
            "psi": sums.psi,
            "ratio": corr / sums.psi,
            "ratio_deviation": abs(corr / sums.psi - 0.5),
            "deviation": abs(corr / N - 0.5),
            "symmetrized": symmetrized_inner_product(sums, spec),
        }, time.perf_counter() - t0))
    pts = [(r.params["n"], r.results["deviation"]) for r in records]
    fit = fit_decay(pts, "powerLaw") if len(pts) >= 3 and all(p[1] > 0 for p in pts) else None
    return records, fit


def theorem2_scan(n: int, r: int, segment_size: int = DEFAULT_SEGMENT,
                  min_viable: int = 30) -> ExperimentRecord:
    """Primes with prescribed low digits and their digit-sum bias.

    Omega_1: x_0 = ... = x_{r-1} = 1, biased when digit sum > n/2 + r/3.
    Omega_0: x_1 = ... = x_{r-1} = 0, biased when digit sum < n/2 - r/3.
    """
    if not 1 <= r <= n / 3:
        raise ValueError(f"need 1 <= r <= n/3, got r={r}, n={n}")
    t0 = time.perf_counter()
    low = (1 << r) - 1
    mid = (1 << (r - 1)) - 1
    hi_cut, lo_cut = n / 2 + r / 3, n / 2 - r / 3
    total = c1 = b1 = c0 = b0 = 0
    for p in iter_prime_windows(n, min(segment_size, 1 << n)):
        s = popcount(p)
        total += len(p)
        in1 = (p & low) == low
        in0 = ((p >> 1) & mid) == 0
        c1 += int(in1.sum())
        b1 += int((in1 & (s > hi_cut)).sum())
        c0 += int(in0.sum())
        b0 += int((in0 & (s < lo_cut)).sum())
    expected = total / (1 << (r - 1))
    return ExperimentRecord("theorem2", {"n": n, "r": r}, {
        "prime_count": total,
        "expected_count": expected,
        "omega1_count": c1,
        "omega1_biased": b1,
        "omega1_fraction": b1 / c1 if c1 else 0.0,
        "omega1_ratio": c1 / expected,
        "omega0_count": c0,
        "omega0_biased": b0,
        "omega0_fraction": b0 / c0 if c0 else 0.0,
        "omega0_ratio": c0 / expected,
        "viable": min(c1, c0) >= min_viable,
    }, time.perf_counter() - t0)


def spectral_decay_scan(
    n_list: Sequence[int],
    level_max: int = 3,
    segment_size: int = DEFAULT_SEGMENT,
) -> tuple[list[ExperimentRecord], DecayFit | None]:
    """Largest low-level |Lambda_hat(S)| with S != {0}; fit log M(n) against sqrt n."""
    records = []
    for n in n_list:
        t0 = time.perf_counter()
        coeffs = low_level_coefficients(n, "vonMangoldt", level_max, segment_size)
        lam0 = coeffs.pop(1)
        mask, val = max(coeffs.items(), key=lambda kv: (abs(kv[1]), -kv[0]))
        records.append(ExperimentRecord("decay", {"n": n, "level_max": level_max}, {
            "max_abs_coeff": abs(val),
            "argmax_mask": mask,
            "argmax_level": mask.bit_count(),
            "coeff_digit0": lam0,
            "sqrt_n": math.sqrt(n),
            "masks_scanned": len(coeffs),
        }, time.perf_counter() - t0))
    pts = [(r.results["sqrt_n"], r.results["max_abs_coeff"]) for r in records]
    fit = fit_decay(pts, "expLaw") if len(pts) >= 3 else None
    return records, fit


def tails_scan(sums: DigitClassSums, deltas: Sequence[float]) -> tuple[list[ExperimentRecord], DecayFit | None]:
    """Tail mass beyond delta * sqrt(n); fit log(tail / N) against delta**2."""
    records = []
    for d in deltas:
        rep = tail_mass(sums, d)
        records.append(ExperimentRecord("tails", {"n": sums.n, "delta": float(d)}, {
            "delta_sq": float(d) ** 2,
            "mass": rep.mass,
            "normalized": rep.normalized,
            "log_normalized": math.log(rep.normalized) if rep.normalized > 0 else None,
        }))
    pts = [(r.results["delta_sq"], r.results["normalized"]) for r in records]
    try:
        fit = fit_decay(pts, "expLaw")
    except ValueError:
        fit = None
    return records, fit


def central_class_scan(n_list: Sequence[int], delta_window: float = 3.0,
                       segment_size: int = DEFAULT_SEGMENT) -> list[ExperimentRecord]:
    records = []
    for n in n_list:
        sums, dt = _timed(digit_class_sums, n, segment_size=segment_size)
        v = max_central_class(sums, delta_window)
        records.append(ExperimentRecord("central", {"n": n, "delta_window": delta_window}, {
            "max_class": v,
            "scaled": v * math.sqrt(n),
            "argmax_k": int(np.argmax(sums.s)),
        }, dt))
    return records


def majority_levels(n: int, k_max: int | None = None) -> list[ExperimentRecord]:
    prof = majority_spectrum_profile(n, k_max)
    return [ExperimentRecord("levels", {"n": n, "k": k}, {
        "weight": float(prof.W[k]),
        "scaled": float(prof.W[k]) * k ** 1.5,
        "tail": float(prof.tail[k]),
    }) for k in range(len(prof.W))]


def fourier_decay_scan(n: int, lambdas: Sequence[float], sample_budget: int = 1 << 20
                       ) -> tuple[list[ExperimentRecord], float]:
    """max |U_lam_hat| over the grid; also the Spearman rho of log max vs lam**2."""
    records = []
    for lam in lambdas:
        res, dt = _timed(u_fourier_max, n, lam, sample_budget)
        records.append(ExperimentRecord("ufourier", {"n": n, "lambda": float(lam)}, {
            "max_magnitude": res.max_magnitude,
            "argmax_xi": res.argmax,
            "exhaustive": res.exhaustive,
            "samples": res.samples,
        }, dt))
    lam2 = [r.params["lambda"] ** 2 for r in records]
    logs = [math.log(r.results["max_magnitude"]) for r in records]
    rho = float(spearmanr(lam2, logs).statistic) if len(records) >= 2 else float("nan")
    return records, rho


def digit0_coefficient(n: int, segment_size: int = DEFAULT_SEGMENT) -> float:
    return walsh_coefficient_streaming(n, "vonMangoldt", 1, segment_size)
