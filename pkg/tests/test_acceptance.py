"""Exit criteria, one test each, with tolerances pinned here.

Each test records a one-line PASS/FAIL verdict that is printed in the
terminal summary (see conftest.py) before asserting.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from digitprime.arith import chebyshev_psi, popcount, sieve_table
from digitprime.boolfn import BooleanFunctionSpec as B, correlate_streaming
from digitprime.digitclass import digit_class_sums, max_central_class, symmetrized_inner_product, tail_mass
from digitprime.expsum import (BilinearSumConfig, bilinear_sum, u_fourier_coefficients, walsh_char_fourier_magnitude)
from digitprime.fitlab import fit_decay, fourier_decay_scan, spectral_decay_scan, theorem1_scan, theorem2_scan
from digitprime.walsh import (fwht, inverse_fwht, krawtchouk_class_sum, majority_level_coefficient,
                              majority_level_coefficient_exact, majority_spectrum_profile, walsh_character,
                              walsh_coefficient_streaming)

RESULTS: list[str] = []
ODD_N = list(range(15, 26, 2))


def verdict(num: int, title: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def class_sums():
    return {n: digit_class_sums(n) for n in sorted(set(ODD_N) | {24})}


def rel_err(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_criterion_01_exact_identities():
    worst = 0.0
    for n in range(2, 22):
        s = digit_class_sums(n)
        worst = max(worst, rel_err(s.psi, chebyshev_psi(n)))
        if n % 2:
            worst = max(worst, rel_err(correlate_streaming(n, "vonMangoldt", B.majority(n)),
                                       symmetrized_inner_product(s, B.majority(n))))
    rng = np.random.default_rng(1)
    for n in range(1, 17):
        v = rng.normal(size=1 << n)
        spec = fwht(v)
        worst = max(worst, rel_err(spec.total_power(), float(np.mean(v * v))))
        back = inverse_fwht(spec)
        worst = max(worst, float(np.max(np.abs(back - v)) / np.max(np.abs(v))))
        twice = fwht(spec.coeffs).coeffs * (1 << n)
        worst = max(worst, float(np.max(np.abs(twice - v)) / np.max(np.abs(v))))
    verdict(1, "exact identities", worst <= 1e-9, f"max relative error {worst:.2e} (tol 1e-9)")


def test_criterion_02_oracle_equivalences():
    problems = []
    for n in range(1, 14):
        x = np.arange(1 << n)
        pc = popcount(x)
        for k in range(n + 1):
            brute = np.bincount(pc, weights=walsh_character((1 << k) - 1, x), minlength=n + 1)
            if [krawtchouk_class_sum(n, k, j) for j in range(n + 1)] != brute.astype(np.int64).tolist():
                problems.append(f"krawtchouk n={n} k={k}")
    maj_err = 0.0
    for n in range(1, 14, 2):
        spec = fwht((2 * popcount(np.arange(1 << n)) > n).astype(float))
        maj_err = max(maj_err, max(abs(majority_level_coefficient(n, k) - spec.coeffs[(1 << k) - 1])
                                   for k in range(n + 1)))
    if maj_err > 1e-12:
        problems.append(f"majority err {maj_err:.1e}")
    u_err = 0.0
    for lam in (0.3, 1.7, math.pi):
        oracle = np.fft.fft(np.exp(1j * lam * popcount(np.arange(1 << 12)))) / (1 << 12)
        u_err = max(u_err, float(np.max(np.abs(u_fourier_coefficients(12, lam, np.arange(1 << 12)) - oracle))))
    if u_err > 1e-9:
        problems.append(f"U_hat err {u_err:.1e}")
    w_err = 0.0
    for m in range(1, 13):
        y = np.arange(1 << m)
        for S in (0, 1, (1 << m) - 1, 0x555 & ((1 << m) - 1)):
            oracle = np.abs(np.fft.ifft(walsh_character(S, y).astype(float)))
            got = np.array([walsh_char_fourier_magnitude(m, S, r) for r in range(1 << m)])
            w_err = max(w_err, float(np.max(np.abs(got - oracle))))
    if w_err > 1e-9:
        problems.append(f"w_S hat err {w_err:.1e}")
    dense = fwht(sieve_table(14, "vonMangoldt").values)
    s_err = max(rel_err(walsh_coefficient_streaming(14, "vonMangoldt", S, 1 << 10), dense.coeffs[S])
                for S in (1, 2, 6, 0x11, 0x2A5, 0x3FFF))
    if s_err > 1e-9:
        problems.append(f"streaming err {s_err:.1e}")
    verdict(2, "oracle equivalences", not problems,
            "; ".join(problems) or f"majority {maj_err:.1e}, U_hat {u_err:.1e}, w_hat {w_err:.1e}, stream {s_err:.1e}")


def test_criterion_03_theorem1_endpoint():
    records, fit = theorem1_scan(ODD_N)
    ratio_dev = {r.params["n"]: r.results["ratio_deviation"] for r in records}
    D = {r.params["n"]: r.results["deviation"] for r in records}
    bad = [n for n, v in ratio_dev.items() if v > 0.10]
    ok = not bad and D[25] < D[15] and fit is not None and fit.exponent > 0
    detail = ("|corr/psi - 1/2| = " + ", ".join(f"n={n}:{v:.4f}" for n, v in ratio_dev.items())
              + f" (tol 0.10, over: {bad}); D(25)={D[25]:.4f} < D(15)={D[15]:.4f}; "
              f"fitted exponent {fit.exponent:.3f}")
    verdict(3, "Theorem 1 endpoint", ok, detail)


def test_criterion_04_spectral_decay():
    records, fit = spectral_decay_scan([16, 20, 24])
    M = [r.results["max_abs_coeff"] for r in records]
    lam0 = walsh_coefficient_streaming(20, "vonMangoldt", 1)
    ok = M[0] > M[1] > M[2] and fit.exponent > 0 and fit.r2 >= 0.8 and -1.05 <= lam0 <= -0.9
    verdict(4, "low-level spectral decay", ok,
            f"M = {', '.join(f'{m:.3e}' for m in M)}; c = {fit.exponent:.3f}, r2 = {fit.r2:.3f} (>= 0.8); "
            f"coefficient at {{0}}, n=20: {lam0:.4f}")


def test_criterion_05_majority_spectrum():
    n = 25
    prof = majority_spectrum_profile(n, 15)
    scaled = {k: prof.W[k] * k**1.5 for k in range(3, 16, 2)}
    even_zero = all(majority_level_coefficient_exact(n, k) == Fraction(0) for k in range(2, n + 1, 2))
    ok = all(0.1 <= v <= 10 for v in scaled.values()) and even_zero
    verdict(5, "majority level weights", ok,
            "W_k k^1.5 = " + ", ".join(f"{k}:{v:.3f}" for k, v in scaled.items())
            + f" (band [0.1, 10]); even levels exactly zero: {even_zero}")


def test_criterion_06_digit_class_tails(class_sums):
    sums = class_sums[24]
    deltas = [1.0, 1.5, 2.0, 2.5]
    tails = [tail_mass(sums, d).normalized for d in deltas]
    detail = "tail/N = " + ", ".join(f"D={d}:{t:.3e}" for d, t in zip(deltas, tails))
    try:
        fit = fit_decay(list(zip([d * d for d in deltas], tails)), "expLaw")
    except ValueError as exc:
        verdict(6, "digit-class tails", False,
                f"{detail}; no log-linear fit possible ({exc}); "
                f"delta*sqrt(n) = {2.5 * math.sqrt(24):.3f} exceeds the largest reachable |k - n/2| = 12")
    verdict(6, "digit-class tails", fit.exponent > 0 and fit.r2 >= 0.9,
            f"{detail}; slope {-fit.exponent:.3f}, r2 = {fit.r2:.3f} (>= 0.9)")


def test_criterion_07_central_class_bound(class_sums):
    vals = {n: max_central_class(class_sums[n], n) * math.sqrt(n) for n in ODD_N}
    ok = all(0.3 <= v <= 1.5 for v in vals.values())
    verdict(7, "central-class bound", ok,
            "max_k s_k/N * sqrt(n) = " + ", ".join(f"{n}:{v:.3f}" for n, v in vals.items()) + " (band [0.3, 1.5])")


def test_criterion_08_exponential_sum_fourier_decay():
    grid = [0.2, 0.5, 1.0, 2.0, math.pi]
    records, rho = fourier_decay_scan(20, grid)
    mx = [r.results["max_magnitude"] for r in records]
    ok = rho < 0 and all(r.results["exhaustive"] for r in records)
    verdict(8, "U_lambda Fourier decay", ok,
            "max|U_hat| = " + ", ".join(f"{l:.2f}:{m:.3e}" for l, m in zip(grid, mx))
            + f"; Spearman(log max, lambda^2) = {rho:.2f} (< 0)")


def test_criterion_09_theorem2():
    rec = theorem2_scan(24, 6).results
    ok = (1 / 3 <= rec["omega1_ratio"] <= 3 and 1 / 3 <= rec["omega0_ratio"] <= 3
          and rec["omega1_fraction"] >= 1 / 3 and rec["omega0_fraction"] >= 1 / 3)
    verdict(9, "Theorem 2 prescribed digits", ok,
            f"|Omega_1| = {rec['omega1_count']} ({rec['omega1_ratio']:.3f} x expected), biased {rec['omega1_fraction']:.3f}; "
            f"|Omega_0| = {rec['omega0_count']} ({rec['omega0_ratio']:.3f} x), biased {rec['omega0_fraction']:.3f}")


def test_criterion_10_type1_cancellation():
    cfg = BilinearSumConfig(20, 6)
    at_pi = bilinear_sum(cfg, math.pi).normalized
    at_small = bilinear_sum(cfg, 0.2).normalized
    ok = at_pi < 0.2 and at_pi < at_small / 2
    verdict(10, "Type-I cancellation", ok, f"normalized at pi {at_pi:.4f} (< 0.2), at 0.2 {at_small:.4f}")
