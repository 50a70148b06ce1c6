"""Closed-form violation ratios in the limit of infinitely many settings.

Formulas are evaluated in log space so that N in the hundreds does not
overflow the powers (d-1)^(N+1) or (2 sin(k pi/d)/k)^N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import ScenarioError, _check_d

REAL_UNBIASED = "real-unbiased"
COMPLEX_UNBIASED = "complex-unbiased"
BIASED_MOD_D = "biased-mod-d"


@dataclass(frozen=True)
class LimitResult:
    d: int
    n: int
    ratio: float
    formula: str


def _check(d, n, min_d=2):
    _check_d(d)
    if d < min_d:
        raise ScenarioError(f"formula needs d >= {min_d}, got {d}")
    if n < 2:
        raise ScenarioError(f"N must be >= 2, got {n}")


def _log_weighted_sine_sum(d, n, weights):
    """log sum_k w_k (2 sin(k pi/d) / k)^N over k = 1..d-1, skipping zero weights."""
    k = np.arange(1, d)
    w = np.asarray(weights, dtype=float)
    mask = w > 0
    logs = np.log(w[mask]) + n * np.log(2 * np.sin(k[mask] * np.pi / d) / k[mask])
    return float(np.logaddexp.reduce(logs))


def continuous_quantum_norm(d: int, n: int) -> float:
    """Integral of E_QM^2 over the N-torus of settings for the real-outcome strategy.

    Squaring 2 d^(-N-1) sum_j (d-j) cos(j alpha') and integrating leaves
    (2 pi)^N (2d-1)(d-1) / (3 d^(2N+1)).
    """
    _check(d, n)
    return math.exp(n * math.log(2 * math.pi) + math.log((2 * d - 1) * (d - 1) / 3) - (2 * n + 1) * math.log(d))


def log_limit_ratio_real_unbiased(d: int, n: int) -> float:
    _check(d, n)
    k = np.arange(1, d)
    return (
        n * math.log(2 * math.pi / d)
        + math.log((2 * d - 1) * (d - 1) / 6)
        - _log_weighted_sine_sum(d, n, d - k)
    )


def limit_ratio_real_unbiased(d: int, n: int) -> float:
    return math.exp(log_limit_ratio_real_unbiased(d, n))


def log_limit_ratio_complex(d: int, n: int) -> float:
    _check(d, n)
    # log(1 + (d-1)^(N+1)) without forming the power
    log_den = math.log(d) + float(np.logaddexp(0.0, (n + 1) * math.log(d - 1)))
    return (
        math.log((d - 1) ** 2 + 1)
        - log_den
        + n * math.log(math.pi * (d - 1) / (d * math.sin(math.pi / d)))
    )


def limit_ratio_complex(d: int, n: int) -> float:
    return math.exp(log_limit_ratio_complex(d, n))


def log_limit_ratio_biased(d: int, n: int) -> float:
    _check(d, n, min_d=3)
    k = np.arange(1, d)
    return (
        math.log((2 * d * d - 7 * d + 6) / 6)
        + n * math.log(2 * math.pi / d)
        - _log_weighted_sine_sum(d, n, d - k - 1)
    )


def limit_ratio_biased(d: int, n: int) -> float:
    return math.exp(log_limit_ratio_biased(d, n))


def growth_factor(d: int) -> float:
    """Large-N per-party factor of the real-outcome limit ratio, pi / (d sin(pi/d)).

    The k=1 term dominates the sine sum, so ratio(N+1)/ratio(N) tends to
    (2 pi/d) / (2 sin(pi/d)).
    """
    _check_d(d)
    return math.pi / (d * math.sin(math.pi / d))


def limit_result(formula: str, d: int, n: int) -> LimitResult:
    fn = {
        REAL_UNBIASED: limit_ratio_real_unbiased,
        COMPLEX_UNBIASED: limit_ratio_complex,
        BIASED_MOD_D: limit_ratio_biased,
    }[formula]
    return LimitResult(d, n, fn(d, n), formula)


def complex_violation_threshold(n: int) -> int:
    """Largest d >= 2 whose complex-outcome limit ratio exceeds 1.

    Scans d upward to the first failure, then checks that no d up to 4N
    violates again.
    """
    if n < 2:
        raise ScenarioError(f"N must be >= 2, got {n}")
    d = 2
    while log_limit_ratio_complex(d + 1, n) > 0:
        d += 1
    for later in range(d + 1, max(4 * n, d + 2) + 1):
        if log_limit_ratio_complex(later, n) > 0:
            raise ArithmeticError(f"complex limit ratio violates again at d={later} for N={n}")
    return d


def biased_surface(n_range=range(2, 16), d_range=range(3, 21)):
    """Rows (N, d, ln ratio) of the biased-state limit formula."""
    rows = []
    for n in n_range:
        for d in d_range:
            if d < 3 or n < 2:
                raise ScenarioError(f"surface point N={n}, d={d} outside N>=2, d>=3")
            rows.append((n, d, log_limit_ratio_biased(d, n)))
    return rows
