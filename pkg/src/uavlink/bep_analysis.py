"""Closed-form BEP machinery for imperfect CSI.

The central object is the Hamming-weighted union upper bound (UUB) on the
bit-error probability of the maximum-likelihood detector. Around it sit
the pairwise error probability, the Gray-mapping PSK approximation, the
CSI threshold inversion used by the rate schedule, and the maximum
feasible modulation order.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .channel import ChannelEstimate
from .constellation import (
    SUPPORTED_ORDERS,
    Constellation,
    constellation_for,
    hamming_matrix,
)
from .errors import InfeasibleRateError, MonotonicityError, SchemeError

__all__ = [
    "q_function",
    "q_inverse",
    "BepContext",
    "UubBound",
    "pep",
    "uub",
    "psk_bep_approx",
    "min_acf_for_rate",
    "max_modulation_order",
]

# bisection tolerances for the threshold inversion
_C_ABS_TOL = 1e-12
_BEP_REL_TOL = 1e-8


def q_function(x):
    """Upper-tail standard normal probability Q(x)."""
    return ndtr(-np.asarray(x, dtype=np.float64)) if np.ndim(x) else float(ndtr(-x))


def q_inverse(p: float) -> float:
    """Inverse of q_function on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"q_inverse domain is (0, 1), got {p}")
    return float(-ndtri(p))


@dataclass(frozen=True)
class BepContext:
    """Everything the closed-form BEP expressions need at one time instant."""

    estimate: ChannelEstimate
    acf_value: float
    snr_linear: float
    constellation: Constellation

    def __post_init__(self):
        if not 0.0 <= self.acf_value <= 1.0:
            raise ValueError("acf_value must lie in [0, 1]")
        if self.snr_linear <= 0:
            raise ValueError("snr_linear must be positive")


@dataclass(frozen=True)
class UubBound:
    """Union bound value, clamped to [0, 1], with the raw sum kept around.

    The raw double sum can exceed 1 at low SNR; that regime is flagged via
    is_loose so downstream code can tell a vacuous bound from a tight one.
    """

    value: float
    raw: float

    @property
    def is_loose(self) -> bool:
        return self.raw > 1.0

    def __float__(self) -> float:
        return self.value


def _pep_argument_sq(ctx: BepContext, d_sq, s_sq):
    """Squared Q-function argument of the pairwise error probability.

    numerator   gamma * C^2 * ||h||^2 * |s_m - s_mhat|^2
    denominator 2 * gamma * (1 - C^2) * |s_m|^2 + 2
    (|s_m|^2 is the transmitted symbol's energy.)
    """
    g, c = ctx.snr_linear, ctx.acf_value
    num = g * c * c * ctx.estimate.norm_sq * d_sq
    den = 2.0 * g * (1.0 - c * c) * s_sq + 2.0
    return num / den


def pep(m: int, m_hat: int, ctx: BepContext) -> float:
    """Pairwise error probability of deciding s_mhat when s_m was sent.

    Indices are 0-based positions in the constellation.
    """
    pts = ctx.constellation.points
    d_sq = abs(pts[m] - pts[m_hat]) ** 2
    s_sq = abs(pts[m]) ** 2
    return float(q_function(np.sqrt(_pep_argument_sq(ctx, d_sq, s_sq))))


def _uub_raw(ctx: BepContext) -> float:
    c = ctx.constellation
    pts = c.points
    d_sq = np.abs(pts[:, None] - pts[None, :]) ** 2
    s_sq = np.abs(pts) ** 2
    n_mat = hamming_matrix(c)
    arg_sq = _pep_argument_sq(ctx, d_sq, s_sq[:, None])
    total = np.sum(n_mat * q_function(np.sqrt(arg_sq)))
    return float(total / (c.order * c.bits_per_symbol))


def uub(ctx: BepContext) -> UubBound:
    """Union upper bound on the ML-detector BEP (Hamming-weighted PEP sum)."""
    raw = _uub_raw(ctx)
    return UubBound(min(raw, 1.0), raw)


def psk_bep_approx(order: int, estimate: ChannelEstimate, acf_value: float,
                   snr_linear: float) -> float:
    """Gray-mapping signal-space BEP approximation for M-PSK.

    BPSK keeps the exact two-point expression; for M > 2 only the two
    nearest neighbours of each point contribute, giving
    (2/log2 M) * Q(sqrt(||h C||^2 gamma (1 - cos(2 pi/M)) / (gamma(1-C^2)+1))).
    """
    if order not in SUPPORTED_ORDERS:
        raise SchemeError(f"unsupported PSK order {order}")
    g, c = snr_linear, acf_value
    hc_sq = estimate.norm_sq * c * c
    den = g * (1.0 - c * c) + 1.0
    if order == 2:
        return float(q_function(np.sqrt(2.0 * g * hc_sq / den)))
    bits = order.bit_length() - 1
    num = g * hc_sq * (1.0 - np.cos(2.0 * np.pi / order))
    return float(2.0 / bits * q_function(np.sqrt(num / den)))


def _assert_monotone_in_c(estimate, snr_linear, constellation,
                          n_grid: int = 33) -> None:
    """The threshold bisection needs the UUB non-increasing in C."""
    grid = np.linspace(0.0, 1.0, n_grid)
    vals = [_uub_raw(BepContext(estimate, c, snr_linear, constellation))
            for c in grid]
    diffs = np.diff(vals)
    # allow FP jitter at the flat ends of the curve
    if np.any(diffs > 1e-12 + 1e-9 * np.abs(vals[:-1])):
        raise MonotonicityError(
            f"UUB is not non-increasing in C for order "
            f"{constellation.order} at snr={snr_linear:.6g}")


def min_acf_for_rate(rate_n: int, estimate: ChannelEstimate,
                     snr_linear: float, scheme: str,
                     bep_threshold: float) -> float:
    """Smallest ACF value C_n at which rate n still meets the threshold.

    Solves uub(C) = bep_threshold by bisection on C in [0, 1] (the
    dichotomy method). Raises InfeasibleRateError when even perfect CSI
    (C = 1) violates the threshold.
    """
    if rate_n < 1:
        raise ValueError("rate_n must be at least 1")
    c = constellation_for(scheme, 2 ** rate_n)
    _assert_monotone_in_c(estimate, snr_linear, c)

    def f(acf: float) -> float:
        return _uub_raw(BepContext(estimate, acf, snr_linear, c)) - bep_threshold

    if f(1.0) > 0.0:
        raise InfeasibleRateError(
            f"rate {rate_n} ({scheme}) cannot meet {bep_threshold:g} even "
            "with perfect CSI")
    if f(0.0) <= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0  # f(lo) > 0 > f(hi)
    while hi - lo > _C_ABS_TOL:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = hi  # the feasible side of the bracket
    if abs(f(root)) > _BEP_REL_TOL * bep_threshold:
        raise MonotonicityError(
            f"threshold inversion did not converge for rate {rate_n}")
    return root


def max_modulation_order(estimate: ChannelEstimate, snr_linear: float,
                         scheme: str, bep_threshold: float) -> int:
    """Largest supported order whose perfect-CSI UUB meets the threshold.

    Returns 0 when no order is feasible. R_max is log2 of the result.
    """
    best = 0
    for order in SUPPORTED_ORDERS:
        c = constellation_for(scheme, order)
        ctx = BepContext(estimate, 1.0, snr_linear, c)
        if _uub_raw(ctx) <= bep_threshold:
            best = max(best, order)
    return best
