"""Digit-spectral statistics of the von Mangoldt function."""
__version__ = "0.1.0"

from .arith import ArithTable, Kind, SieveWindow, chebyshev_psi, digit_sum, sieve_table, stream_windows
from .boolfn import BooleanFunctionSpec, apply_noise, class_average, correlate, correlate_streaming, evaluate
from .budget import BudgetExceeded
from .digitclass import (DigitClassSums, TailReport, central_moment, digit_class_sums, max_central_class,
                         symmetrized_inner_product, symmetrized_value, tail_mass)
from .expsum import (BilinearSumConfig, RationalApprox, bilinear_sum, exp_sum, rational_scan,
                     u_fourier_coefficient, u_fourier_max, walsh_char_fourier_magnitude)
from .fitlab import DecayFit, ExperimentRecord, fit_decay, spectral_decay_scan, theorem1_scan, theorem2_scan
from .walsh import (LevelWeights, SpectrumVector, fwht, krawtchouk_class_sum, level_weights,
                    majority_level_coefficient, majority_spectrum_profile, walsh_coefficient_streaming)
