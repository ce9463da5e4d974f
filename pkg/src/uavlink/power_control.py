"""Minimum-power policy that holds the rate schedule at the BEP threshold.

PSK inverts its closed-form BEP approximation directly. QAM has no closed
inverse, so the union bound is driven to the threshold with the
multiplicative Newton-Raphson update gamma * (u_m/beta)^(u_m/v_m); when
that update misbehaves (it has no global convergence guarantee) a
bisection on ln(gamma) over a verified bracket finishes the job.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bep_analysis import q_function, q_inverse
from .channel import ChannelEstimate, WobbleParams, temporal_acf
from .constellation import Constellation, hamming_matrix, make_qam
from .errors import DivergenceError, InfeasibleCsiError, ScheduleError, SchemeError
from .rate_optimizer import RateSchedule
from .scenario import LinkScenario, noise_power_dbm, path_loss_db

__all__ = [
    "NewtonIterate",
    "QamRootInfo",
    "PowerSample",
    "PowerSchedule",
    "EnergySavings",
    "min_snr_psk",
    "evaluate_iterate",
    "newton_step",
    "min_snr_qam",
    "min_power_schedule",
    "energy_savings",
]

_LN_TOL = 1e-9  # convergence tolerance on ln(gamma)
_MAX_ITER = 100
_LN_GAMMA_LIMIT = math.log(1e15)  # leaving this range counts as divergence


@dataclass(frozen=True)
class NewtonIterate:
    """State of the QAM root search at one gamma.

    u_m and v_m are the union-bound value and its negated log-log slope at
    gamma_re; lam and psi are the pairwise numerator factors
    ||h C||^2 |s_m - s_mhat|^2 and the per-symbol denominator factors
    2 (1 - C^2) |s_m|^2 (gamma-independent).
    """

    gamma_re: float
    u_m: float
    v_m: float
    lam: np.ndarray
    psi: np.ndarray


class QamRootInfo(NamedTuple):
    gamma_min: float
    iterations: int
    method: str  # "newton" or "bisection"


def min_snr_psk(order: int, estimate: ChannelEstimate, acf_value: float,
                bep_threshold: float) -> float:
    """Closed-form minimum SNR for M-PSK at one ACF value.

    Inverts the signal-space BEP approximation. Raises InfeasibleCsiError
    when the denominator is non-positive: no finite power reaches the
    threshold at this CSI quality, so the schedule must have switched down
    already.
    """
    c, b = acf_value, bep_threshold
    hc_sq = estimate.norm_sq * c * c
    one_m_c2 = 1.0 - c * c
    if order == 2:
        alpha_sq = q_inverse(b) ** 2
        den = 2.0 * hc_sq - one_m_c2 * alpha_sq
    else:
        bits = order.bit_length() - 1
        alpha_sq = q_inverse(b * bits / 2.0) ** 2
        den = hc_sq * (1.0 - math.cos(2.0 * math.pi / order)) - one_m_c2 * alpha_sq
    if den <= 0.0:
        raise InfeasibleCsiError(
            f"{order}-PSK cannot reach {bep_threshold:g} at C={acf_value:.6f}")
    return alpha_sq / den


def _pairwise_factors(estimate: ChannelEstimate, acf_value: float,
                      c: Constellation):
    """lam (MxM), psi (M,), Hamming weights for the root equation."""
    pts = c.points
    hc_sq = estimate.norm_sq * acf_value * acf_value
    lam = hc_sq * np.abs(pts[:, None] - pts[None, :]) ** 2
    psi = 2.0 * (1.0 - acf_value * acf_value) * np.abs(pts) ** 2
    return lam, psi, hamming_matrix(c)


def _u_of(gamma: float, lam, psi, n_mat, order: int, bits: int) -> float:
    """Union-bound value u_m(gamma) from the pairwise factors."""
    arg_sq = lam * gamma / (psi[:, None] * gamma + 2.0)
    return float(np.sum(n_mat * q_function(np.sqrt(arg_sq)))
                 / (order * bits))


def _v_of(gamma: float, lam, psi, n_mat, order: int, bits: int) -> float:
    """Negated derivative of u_m w.r.t. ln(gamma), as a direct sum:

    v_m = sum N * Lam * sqrt(gamma) * exp(-Lam g / (2 psi g + 4))
          / (M log2 M * sqrt(2 pi * Lam * (g psi + 2)^3))

    Diagonal terms have Lam = 0 and zero Hamming weight; they are masked
    out rather than evaluated as 0/0.
    """
    den3 = (gamma * psi[:, None] + 2.0) ** 3
    with np.errstate(divide="ignore", invalid="ignore"):
        term = (lam * math.sqrt(gamma)
                * np.exp(-lam * gamma / (2.0 * psi[:, None] * gamma + 4.0))
                / np.sqrt(2.0 * math.pi * lam * den3))
    term = np.where(lam > 0.0, term, 0.0)
    return float(np.sum(n_mat * term) / (order * bits))


def evaluate_iterate(gamma: float, estimate: ChannelEstimate,
                     acf_value: float, c: Constellation) -> NewtonIterate:
    """NewtonIterate with u_m, v_m, lam, psi all evaluated at `gamma`."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    bits = c.order.bit_length() - 1
    lam, psi, n_mat = _pairwise_factors(estimate, acf_value, c)
    u = _u_of(gamma, lam, psi, n_mat, c.order, bits)
    v = _v_of(gamma, lam, psi, n_mat, c.order, bits)
    return NewtonIterate(gamma, u, v, lam, psi)


def newton_step(estimate: ChannelEstimate, acf_value: float,
                bep_threshold: float, iterate: NewtonIterate,
                c: Constellation) -> NewtonIterate:
    """One multiplicative update gamma * (u_m/beta)^(u_m/v_m).

    Computed in the log domain; a non-finite update raises DivergenceError.
    The returned iterate is re-evaluated at the new gamma, so u_m = beta
    is a fixed point.
    """
    it = iterate
    if not (math.isfinite(it.u_m) and math.isfinite(it.v_m)) \
            or it.u_m <= 0.0 or it.v_m <= 0.0:
        raise DivergenceError(
            f"Newton state degenerate at gamma={it.gamma_re:.6g} "
            f"(u={it.u_m:.3g}, v={it.v_m:.3g})")
    ln_next = (math.log(it.gamma_re)
               + it.u_m / it.v_m * (math.log(it.u_m) - math.log(bep_threshold)))
    if not math.isfinite(ln_next) or abs(ln_next) > _LN_GAMMA_LIMIT:
        raise DivergenceError(
            f"Newton update left the usable SNR range (ln gamma = {ln_next:.3g})")
    return evaluate_iterate(math.exp(ln_next), estimate, acf_value, c)


def _feasible_floor(estimate: ChannelEstimate, acf_value: float,
                    c: Constellation) -> float:
    """Infinite-power limit of the union bound at this ACF value."""
    bits = c.order.bit_length() - 1
    lam, psi, n_mat = _pairwise_factors(estimate, acf_value, c)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.sqrt(lam / psi[:, None])
    arg = np.where(psi[:, None] > 0.0, arg, np.inf)
    arg = np.where(lam > 0.0, arg, np.inf)  # diagonal: zero weight anyway
    return float(np.sum(n_mat * q_function(arg)) / (c.order * bits))


def min_snr_qam(order: int, estimate: ChannelEstimate, acf_value: float,
                bep_threshold: float, gamma_init: float = 1000.0,
                details: bool = False):
    """Minimum SNR driving the M-QAM union bound to the threshold.

    Newton-Raphson from `gamma_init` (default 30 dB); on divergence or
    non-convergence, bisection on ln(gamma) over a bracket grown around
    the target. Raises InfeasibleCsiError when even infinite power cannot
    meet the threshold (the bound's C-limited floor is too high).

    With details=True returns QamRootInfo(gamma_min, iterations, method).
    """
    if order == 2:
        raise SchemeError("order-2 QAM is BPSK; use min_snr_psk(2, ...)")
    c = make_qam(order)
    bits = c.order.bit_length() - 1
    if _feasible_floor(estimate, acf_value, c) >= bep_threshold:
        raise InfeasibleCsiError(
            f"{order}-QAM cannot reach {bep_threshold:g} at C={acf_value:.6f} "
            "for any power")

    it = evaluate_iterate(gamma_init, estimate, acf_value, c)
    iterations = 0
    try:
        while iterations < _MAX_ITER:
            nxt = newton_step(estimate, acf_value, bep_threshold, it, c)
            iterations += 1
            if abs(math.log(nxt.gamma_re) - math.log(it.gamma_re)) <= _LN_TOL:
                if details:
                    return QamRootInfo(nxt.gamma_re, iterations, "newton")
                return nxt.gamma_re
            it = nxt
    except DivergenceError:
        pass  # fall through to bisection

    lam, psi, n_mat = _pairwise_factors(estimate, acf_value, c)

    def u(gamma: float) -> float:
        return _u_of(gamma, lam, psi, n_mat, c.order, bits)

    # u is decreasing in gamma: bracket [lo, hi] with u(lo) > beta > u(hi)
    hi = max(gamma_init, 1.0)
    while u(hi) >= bep_threshold:
        hi *= 10.0
        if hi > 1e30:
            raise DivergenceError("no upper bracket for the QAM root")
    lo = min(gamma_init, 1e-9)
    while u(lo) <= bep_threshold:
        lo /= 10.0
        if lo < 1e-30:
            raise DivergenceError("no lower bracket for the QAM root")
    ln_lo, ln_hi = math.log(lo), math.log(hi)
    while ln_hi - ln_lo > _LN_TOL:
        mid = 0.5 * (ln_lo + ln_hi)
        iterations += 1
        if u(math.exp(mid)) > bep_threshold:
            ln_lo = mid
        else:
            ln_hi = mid
    gamma = math.exp(0.5 * (ln_lo + ln_hi))
    if details:
        return QamRootInfo(gamma, iterations, "bisection")
    return gamma


class PowerSample(NamedTuple):
    t: float
    rate: int
    order: int
    acf_value: float
    gamma_min_db: float
    p_min_dbm: float
    clamped: bool


@dataclass(frozen=True)
class PowerSchedule:
    """Per-instant minimum power along one rate schedule."""

    scheme: str
    samples: tuple[PowerSample, ...]
    sample_dt: float
    p_max_dbm: float


def _min_snr_for(scheme: str, order: int, estimate: ChannelEstimate,
                 acf_value: float, bep_threshold: float) -> float:
    if scheme == "psk" or order == 2:
        return min_snr_psk(order, estimate, acf_value, bep_threshold)
    return min_snr_qam(order, estimate, acf_value, bep_threshold)


def min_power_schedule(schedule: RateSchedule, estimate: ChannelEstimate,
                       scenario: LinkScenario, wobble: WobbleParams,
                       sample_dt: float = 1e-5) -> PowerSchedule:
    """Minimum transmit power at each sample of the transmitting interval.

    P_min[dBm] = gamma_min[dB] + P_L[dB] + N_0[dBm], clamped to the power
    cap with a flag. The solvers cannot legitimately fail inside a region
    (the schedule guarantees feasibility up to each t_n), so an infeasible
    sample raises ScheduleError.
    """
    if sample_dt <= 0:
        raise ValueError("sample_dt must be positive")
    if schedule.is_empty:
        return PowerSchedule(schedule.scheme, (), sample_dt,
                             scenario.p_max_dbm)
    t_e = schedule.t_estimate
    pl = path_loss_db(scenario)
    n0 = noise_power_dbm(scenario)

    samples = []
    n_steps = int(math.floor((schedule.t_zero_rate - t_e) / sample_dt + 1e-9))
    for k in range(1, n_steps + 1):
        t = t_e + k * sample_dt
        rate = schedule.rate_at(t)
        if rate == 0:
            break
        order = 1 << rate
        acf_value = temporal_acf(wobble, t - t_e)
        try:
            gamma = _min_snr_for(schedule.scheme, order, estimate,
                                 acf_value, scenario.bep_threshold)
        except InfeasibleCsiError as exc:
            raise ScheduleError(
                f"power infeasible inside rate-{rate} region at t={t:.6f}; "
                "schedule and threshold disagree") from exc
        gamma_db = 10.0 * math.log10(gamma)
        p = gamma_db + pl + n0
        clamped = p > scenario.p_max_dbm
        samples.append(PowerSample(t, rate, order, acf_value, gamma_db,
                                   min(p, scenario.p_max_dbm), clamped))
    return PowerSchedule(schedule.scheme, tuple(samples), sample_dt,
                         scenario.p_max_dbm)


@dataclass(frozen=True)
class EnergySavings:
    """Trapezoid-averaged power over a window, versus a constant baseline."""

    savings_percent: float
    mean_power_dbm: float
    n_samples: int


def energy_savings(power: PowerSchedule, p_baseline_dbm: float,
                   window: tuple[float, float]) -> EnergySavings:
    """Fractional power saving over `window` = (t_a, t_b].

    Mean power is the trapezoid time average of the linear-watt trace;
    the reported mean_power_dbm is that average converted back to dBm.
    """
    t_a, t_b = window
    ts = np.array([s.t for s in power.samples])
    eps = 1e-9 * power.sample_dt
    mask = (ts > t_a + eps) & (ts <= t_b + eps)
    if mask.sum() < 2:
        raise ValueError("window must contain at least two power samples")
    p_dbm = np.array([s.p_min_dbm for s in power.samples])[mask]
    lin = 10.0 ** (p_dbm / 10.0)  # mW
    mean_lin = float((0.5 * (lin[0] + lin[-1]) + lin[1:-1].sum())
                     / (lin.size - 1))
    base_lin = 10.0 ** (p_baseline_dbm / 10.0)
    return EnergySavings(
        savings_percent=(1.0 - mean_lin / base_lin) * 100.0,
        mean_power_dbm=10.0 * math.log10(mean_lin),
        n_samples=int(mask.sum()),
    )
