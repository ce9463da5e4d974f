"""Rate staircase construction and the average-rate maximization.

The threshold and switch-time pins below were frozen from this
implementation after cross-checking the thresholds against the BEP
inversion residuals and the optimum against a dense brute-force sweep.
All pins use the case1 channel at the 35 dBm transmit cap with a 1e-5
threshold unless stated otherwise.
"""

import numpy as np
import pytest

from uavlink import (
    RateOptimum,
    RateSchedule,
    RateThreshold,
    average_rate,
    build_rate_schedule,
    optimum_transmission_time,
    rate_derivative,
    sweep_rave_max,
    temporal_acf,
)
from uavlink.errors import ScheduleError
from uavlink.fixtures import load_fixture

GAMMA_MAX = 277.1359929049
BETA = 1e-5

# rate n -> (C_n, t_n - t_estimate shifted to absolute t_n with T_e = 1 ms)
PSK_C = [0.732172423852, 0.835978572882, 0.941010882791, 0.984344179202,
         0.997193242005]
PSK_T = [0.049940053675, 0.030828593181, 0.015770381153, 0.008040793123,
         0.003888755593]
QAM_C = PSK_C[:2] + [0.955140197791, 0.971457189776, 0.985644622796,
                     0.993999492520]
QAM_T = PSK_T[:2] + [0.013572573917, 0.010744018177, 0.007723942561,
                     0.005264142970]


@pytest.fixture(scope="module")
def fx():
    return load_fixture("case1")


@pytest.fixture(scope="module")
def psk_schedule(fx):
    return build_rate_schedule(fx.estimate, GAMMA_MAX, "psk", BETA,
                               fx.wobble, fx.scenario.t_estimate)


@pytest.fixture(scope="module")
def qam_schedule(fx):
    return build_rate_schedule(fx.estimate, GAMMA_MAX, "qam", BETA,
                               fx.wobble, fx.scenario.t_estimate)


class TestSchedulePins:
    def test_psk_thresholds(self, psk_schedule):
        assert psk_schedule.r_max == 5
        for th, c_n, t_n in zip(psk_schedule.thresholds, PSK_C, PSK_T):
            assert th.c_n == pytest.approx(c_n, abs=5e-12)
            assert th.t_n == pytest.approx(t_n, abs=5e-12)

    def test_qam_thresholds(self, qam_schedule):
        assert qam_schedule.r_max == 6
        for th, c_n, t_n in zip(qam_schedule.thresholds, QAM_C, QAM_T):
            assert th.c_n == pytest.approx(c_n, abs=5e-12)
            assert th.t_n == pytest.approx(t_n, abs=5e-12)

    def test_switch_time_convention(self, psk_schedule):
        assert psk_schedule.switch_time(psk_schedule.r_max + 1) == \
            psk_schedule.t_estimate
        assert psk_schedule.switch_time(1) == psk_schedule.t_zero_rate

    def test_threshold_times_invert_acf(self, fx, psk_schedule):
        for th in psk_schedule.thresholds:
            c_back = temporal_acf(fx.wobble, th.t_n - fx.scenario.t_estimate)
            assert c_back == pytest.approx(th.c_n, abs=1e-9)

    def test_qam_times_vs_psk(self, psk_schedule, qam_schedule):
        # the QAM staircase holds each rate at least as long except at
        # rate 3, where the unit-energy 8-QAM lattice is the tighter one
        for n in (1, 2, 4, 5):
            assert qam_schedule.switch_time(n) >= \
                psk_schedule.switch_time(n) - 1e-15
        assert qam_schedule.switch_time(3) < psk_schedule.switch_time(3)


class TestRateAt:
    def test_staircase_boundaries(self, psk_schedule):
        t_e = psk_schedule.t_estimate
        assert psk_schedule.rate_at(t_e) == 0
        for th in psk_schedule.thresholds:
            assert psk_schedule.rate_at(th.t_n) == th.n  # inclusive right end
            assert psk_schedule.rate_at(np.nextafter(th.t_n, np.inf)) == \
                (th.n - 1 if th.n > 1 else 0)
        assert psk_schedule.rate_at(np.nextafter(t_e, np.inf)) == \
            psk_schedule.r_max
        assert psk_schedule.rate_at(1.0) == 0

    def test_monotone_nonincreasing(self, qam_schedule):
        ts = np.linspace(qam_schedule.t_estimate + 1e-6, 0.06, 500)
        rates = [qam_schedule.rate_at(float(t)) for t in ts]
        assert all(a >= b for a, b in zip(rates, rates[1:]))


class TestAverageRate:
    def test_zero_cases(self, psk_schedule):
        assert average_rate(psk_schedule, 0.0) == 0.0
        with pytest.raises(ValueError):
            average_rate(psk_schedule, -1e-3)

    @pytest.mark.parametrize("t_c", [5e-4, 3e-3, 7.0407931e-3, 2e-2, 8e-2])
    def test_matches_step_quadrature(self, psk_schedule, t_c):
        # Riemann sum over the staircase converges to the closed form
        t_e = psk_schedule.t_estimate
        ts = np.linspace(t_e, t_e + t_c, 200001)
        mids = 0.5 * (ts[:-1] + ts[1:])
        approx = sum(psk_schedule.rate_at(float(t)) for t in mids) \
            * (ts[1] - ts[0]) / (t_e + t_c)
        assert average_rate(psk_schedule, t_c) == pytest.approx(
            approx, abs=2e-3)

    def test_far_horizon_dilutes(self, psk_schedule):
        # past t_1 the integral is fixed while tau keeps growing
        assert average_rate(psk_schedule, 1.0) < \
            average_rate(psk_schedule, 0.1)


class TestDerivative:
    def test_sign_pattern_around_optimum(self, psk_schedule):
        t_opt = 0.0070407931
        assert rate_derivative(psk_schedule, 0.8 * t_opt) > 0
        assert rate_derivative(psk_schedule, 1.2 * t_opt) < 0
        assert rate_derivative(psk_schedule, 1.0) < 0

    @pytest.mark.parametrize("t_c", [2e-3, 5e-3, 1e-2, 3e-2])
    def test_matches_finite_difference(self, qam_schedule, t_c):
        # central difference inside one region (step well below region width)
        eps = 1e-9
        fd = (average_rate(qam_schedule, t_c + eps)
              - average_rate(qam_schedule, t_c - eps)) / (2 * eps)
        assert rate_derivative(qam_schedule, t_c) == pytest.approx(
            fd, rel=1e-5, abs=1e-7)


class TestOptimum:
    def test_psk_optimum(self, psk_schedule):
        opt = optimum_transmission_time(psk_schedule)
        assert opt.t_max == pytest.approx(0.0070407931, abs=1e-9)
        assert opt.r_ave_max == pytest.approx(3.8617991547, abs=1e-9)
        assert opt.r_op == 4

    def test_qam_optimum(self, qam_schedule):
        opt = optimum_transmission_time(qam_schedule)
        assert opt.t_max == pytest.approx(0.0067239426, abs=1e-9)
        assert opt.r_ave_max == pytest.approx(4.9047303855, abs=1e-9)
        assert opt.r_op == 5

    @pytest.mark.parametrize("scheme", ["psk", "qam"])
    def test_beats_dense_sweep(self, fx, psk_schedule, qam_schedule, scheme):
        schedule = psk_schedule if scheme == "psk" else qam_schedule
        opt = optimum_transmission_time(schedule)
        for t_c in np.linspace(1e-5, 0.06, 4001):
            assert average_rate(schedule, float(t_c)) <= opt.r_ave_max + 1e-12

    def test_coherence_cap_binds(self, psk_schedule):
        # a horizon shorter than the unconstrained optimum moves T_max to it
        horizon = psk_schedule.t_estimate + 4e-3
        opt = optimum_transmission_time(psk_schedule, t_coherence=horizon)
        assert opt.t_max == pytest.approx(4e-3, rel=1e-12)
        assert opt.r_ave_max < 3.8617991547

    def test_coherence_cap_slack(self, psk_schedule):
        opt_free = optimum_transmission_time(psk_schedule)
        opt_cap = optimum_transmission_time(psk_schedule, t_coherence=0.5)
        assert opt_cap == opt_free

    def test_degenerate_horizon(self, psk_schedule):
        opt = optimum_transmission_time(
            psk_schedule, t_coherence=psk_schedule.t_estimate)
        assert opt == RateOptimum(0.0, 0.0, 0)


class TestEmptySchedule:
    def test_low_snr_yields_empty(self, fx):
        schedule = build_rate_schedule(fx.estimate, 0.5, "psk", BETA,
                                       fx.wobble, fx.scenario.t_estimate)
        assert schedule.is_empty
        assert schedule.r_max == 0
        assert schedule.rate_at(0.01) == 0
        assert average_rate(schedule, 0.01) == 0.0
        assert rate_derivative(schedule, 0.01) == 0.0
        assert optimum_transmission_time(schedule) == RateOptimum(0.0, 0.0, 0)


class TestValidation:
    def test_wrong_threshold_order(self):
        ths = (RateThreshold(2, 0.8, 0.05), RateThreshold(1, 0.7, 0.06))
        with pytest.raises(ScheduleError):
            RateSchedule("psk", 2, ths, 1e-3)

    def test_nonmonotone_c(self):
        ths = (RateThreshold(1, 0.9, 0.05), RateThreshold(2, 0.8, 0.03))
        with pytest.raises(ScheduleError):
            RateSchedule("psk", 2, ths, 1e-3)

    def test_nonmonotone_t(self):
        ths = (RateThreshold(1, 0.7, 0.03), RateThreshold(2, 0.8, 0.05))
        with pytest.raises(ScheduleError):
            RateSchedule("psk", 2, ths, 1e-3)

    def test_t_n_below_estimate(self):
        ths = (RateThreshold(1, 0.7, 0.05), RateThreshold(2, 0.8, 5e-4))
        with pytest.raises(ScheduleError):
            RateSchedule("psk", 2, ths, 1e-3)

    def test_threshold_count_mismatch(self):
        with pytest.raises(ScheduleError):
            RateSchedule("psk", 3, (RateThreshold(1, 0.7, 0.05),), 1e-3)


class TestSweep:
    def test_grid_shape_and_monotonicity(self, fx):
        snr_db = [12.0, 18.0, 24.0]
        betas = [1e-3, 1e-5]
        out = sweep_rave_max(fx.estimate, snr_db, betas, "qam", fx.wobble,
                             fx.scenario.t_estimate)
        assert out.shape == (3, 2)
        # more SNR helps, a stricter threshold never helps
        assert np.all(np.diff(out, axis=0) >= -1e-12)
        assert np.all(out[:, 0] >= out[:, 1] - 1e-12)

    def test_empty_grid_rejected(self, fx):
        with pytest.raises(ValueError):
            sweep_rave_max(fx.estimate, [], [1e-5], "psk", fx.wobble, 1e-3)


class TestSecondChannel:
    def test_case2_regression(self):
        fx2 = load_fixture("case2")
        for scheme, t_max, r_ave in [("psk", 4.059e-3, 4.100188),
                                     ("qam", 5.544e-3, 5.083119)]:
            schedule = build_rate_schedule(fx2.estimate, GAMMA_MAX, scheme,
                                           BETA, fx2.wobble,
                                           fx2.scenario.t_estimate)
            assert schedule.r_max == 6
            assert schedule.thresholds[0].t_n == pytest.approx(0.078368,
                                                               abs=5e-7)
            opt = optimum_transmission_time(schedule)
            assert opt.t_max == pytest.approx(t_max, abs=5e-7)
            assert opt.r_ave_max == pytest.approx(r_ave, abs=5e-7)
