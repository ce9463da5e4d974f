"""Adaptive-modulation rate schedule and the optimum transmission time.

The schedule maps each rate n (order 2^n) to the smallest ACF value C_n
that still meets the BEP threshold at full transmit power, then converts
C_n to a switch time t_n through the monotone wobble ACF. Within a frame
the rate is the piecewise-constant staircase R(t) = n on (t_{n+1}, t_n].

The average rate over a transmission period T_c has a constant-sign
derivative inside each staircase region, so the maximizer sits on a region
boundary; the optimizer evaluates the exact average at each candidate.
"""

from dataclasses import dataclass

import numpy as np

from .bep_analysis import max_modulation_order, min_acf_for_rate
from .channel import (
    ChannelEstimate,
    WobbleParams,
    acf_inverse,
    check_acf_monotone,
    temporal_acf,
)
from .errors import InfeasibleRateError, ScheduleError

__all__ = [
    "RateThreshold",
    "RateSchedule",
    "RateOptimum",
    "build_rate_schedule",
    "average_rate",
    "rate_derivative",
    "optimum_transmission_time",
    "sweep_rave_max",
]


@dataclass(frozen=True)
class RateThreshold:
    """Rate n is usable while the ACF stays at or above c_n, i.e. t <= t_n."""

    n: int
    c_n: float
    t_n: float


@dataclass(frozen=True)
class RateSchedule:
    """Piecewise-constant rate staircase for one estimated channel.

    thresholds[k] holds rate n = k+1; times t_n decrease as n grows and
    t_{r_max+1} = t_estimate by convention (C there is 1).
    """

    scheme: str
    r_max: int
    thresholds: tuple[RateThreshold, ...]
    t_estimate: float

    def __post_init__(self):
        if len(self.thresholds) != self.r_max:
            raise ScheduleError("thresholds must cover rates 1..r_max")
        for k, th in enumerate(self.thresholds):
            if th.n != k + 1:
                raise ScheduleError("thresholds must be ordered by rate")
        cs = [th.c_n for th in self.thresholds]
        ts = [th.t_n for th in self.thresholds]
        if any(b <= a for a, b in zip(cs, cs[1:])):
            raise ScheduleError("C_n must increase strictly with n")
        if any(b >= a for a, b in zip(ts, ts[1:])):
            raise ScheduleError("t_n must decrease strictly as n grows")
        if self.thresholds and ts[-1] <= self.t_estimate:
            raise ScheduleError("every t_n must exceed t_estimate")

    @property
    def is_empty(self) -> bool:
        return self.r_max == 0

    @property
    def t_zero_rate(self) -> float:
        """Time t_1 past which no rate is feasible (t_estimate if empty)."""
        return self.thresholds[0].t_n if self.thresholds else self.t_estimate

    def switch_time(self, n: int) -> float:
        """t_n for 1 <= n <= r_max; t_estimate for n = r_max + 1."""
        if n == self.r_max + 1:
            return self.t_estimate
        return self.thresholds[n - 1].t_n

    def rate_at(self, t: float) -> int:
        """Instantaneous rate: n on (t_{n+1}, t_n], 0 outside."""
        if t <= self.t_estimate or t > self.t_zero_rate:
            return 0
        for th in reversed(self.thresholds):  # highest rate first
            if t <= th.t_n:
                return th.n
        return 0


@dataclass(frozen=True)
class RateOptimum:
    """Solution of the rate-maximization problem."""

    t_max: float  # optimal transmission period T_c, seconds
    r_ave_max: float  # bits/symbol achieved at t_max
    r_op: int  # rate in force when transmission ends


def build_rate_schedule(estimate: ChannelEstimate, snr_linear: float,
                        scheme: str, bep_threshold: float,
                        wobble: WobbleParams,
                        t_estimate: float) -> RateSchedule:
    """Construct the rate staircase for one channel estimate.

    Infeasibility of every order yields an empty schedule (rate 0
    everywhere) rather than an error.
    """
    m_max = max_modulation_order(estimate, snr_linear, scheme, bep_threshold)
    if m_max == 0:
        return RateSchedule(scheme, 0, (), t_estimate)
    r_max = m_max.bit_length() - 1

    cs = []
    for n in range(1, r_max + 1):
        try:
            cs.append(min_acf_for_rate(n, estimate, snr_linear, scheme,
                                       bep_threshold))
        except InfeasibleRateError as exc:
            raise ScheduleError(
                f"rate {n} infeasible although rate {r_max} is feasible; "
                "UUB is not monotone across orders here") from exc

    # one dt_max spanning the slowest threshold; the inversion needs the
    # ACF verified monotone over the whole scheduling span
    dt_max = 0.05
    while temporal_acf(wobble, dt_max) > min(cs):
        dt_max *= 2.0
        if dt_max > 1e6:
            raise ScheduleError(
                "ACF never decays to the rate-1 threshold; no finite t_1")
    check_acf_monotone(wobble, dt_max)

    thresholds = tuple(
        RateThreshold(n, c_n, t_estimate + acf_inverse(wobble, c_n, dt_max))
        for n, c_n in enumerate(cs, start=1))
    return RateSchedule(scheme, r_max, thresholds, t_estimate)


def average_rate(schedule: RateSchedule, t_c: float) -> float:
    """Exact average rate over [T_e, T_e + T_c], normalized by T_e + T_c.

    Integrates the rate staircase in closed form; t_c = 0 gives 0.
    """
    if t_c < 0:
        raise ValueError("t_c must be non-negative")
    if t_c == 0.0 or schedule.is_empty:
        return 0.0
    t_e = schedule.t_estimate
    tau = t_e + t_c
    total = 0.0
    for th in schedule.thresholds:
        lo = schedule.switch_time(th.n + 1)
        hi = th.t_n
        a, b = max(lo, t_e), min(hi, tau)
        if b > a:
            total += th.n * (b - a)
    return total / tau


def rate_derivative(schedule: RateSchedule, t_c: float) -> float:
    """d(average rate)/dT_c of the region containing T_c.

    The derivative is constant-sign within each staircase region:
    -(sum_{j=n+1}^{R_max} t_j - R_max * T_e) / (T_e + T_c)^2 while rate n
    is active, and strictly negative past t_1. Exactly at a switch time
    the region to the right is used.
    """
    t_e = schedule.t_estimate
    tau = t_e + t_c
    if schedule.is_empty:
        return 0.0
    # right-continuous region: rate n while t_{n+1} <= tau < t_n
    n = 0
    for th in reversed(schedule.thresholds):
        if schedule.switch_time(th.n + 1) <= tau < th.t_n:
            n = th.n
            break
    tail = sum(th.t_n for th in schedule.thresholds if th.n >= n + 1)
    numerator = tail - schedule.r_max * t_e
    return -numerator / tau ** 2


def optimum_transmission_time(schedule: RateSchedule,
                              t_coherence: float | None = None) -> RateOptimum:
    """Transmission period maximizing the average rate.

    Within each region the average rate is monotone (constant-sign
    derivative), so the maximum lies at a region boundary t_n or at the
    coherence horizon; every candidate is evaluated exactly and ties go to
    the shortest period.
    """
    if schedule.is_empty:
        return RateOptimum(0.0, 0.0, 0)
    t_e = schedule.t_estimate
    horizon = (schedule.t_zero_rate if t_coherence is None else t_coherence)
    if horizon <= t_e:
        return RateOptimum(0.0, 0.0, 0)
    t_c_cap = horizon - t_e

    candidates = {min(th.t_n - t_e, t_c_cap) for th in schedule.thresholds
                  if th.t_n - t_e > 0}
    candidates.add(t_c_cap)
    best_tc, best_rate = 0.0, 0.0
    for t_c in sorted(candidates):
        r = average_rate(schedule, t_c)
        if r > best_rate:
            best_tc, best_rate = t_c, r
    r_op = schedule.rate_at(t_e + best_tc)
    return RateOptimum(best_tc, best_rate, r_op)


def sweep_rave_max(estimate: ChannelEstimate, snr_db_grid,
                   bep_threshold_grid, scheme: str, wobble: WobbleParams,
                   t_estimate: float) -> np.ndarray:
    """Maximum average rate on an SNR x threshold grid.

    Cell [i, j] is r_ave_max at snr_db_grid[i], bep_threshold_grid[j];
    infeasible cells are 0.
    """
    snr_db_grid = list(snr_db_grid)
    bep_threshold_grid = list(bep_threshold_grid)
    if not snr_db_grid or not bep_threshold_grid:
        raise ValueError("sweep grids must be non-empty")
    out = np.zeros((len(snr_db_grid), len(bep_threshold_grid)))
    for i, snr_db in enumerate(snr_db_grid):
        for j, beta in enumerate(bep_threshold_grid):
            schedule = build_rate_schedule(
                estimate, 10.0 ** (snr_db / 10.0), scheme, beta, wobble,
                t_estimate)
            out[i, j] = optimum_transmission_time(schedule).r_ave_max
    return out
