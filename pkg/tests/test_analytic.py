"""Closed-form periods and inversions.

Expected numbers are recomputed here from first principles (plain float
arithmetic on the circuit constants) instead of being read back from the
library, so a transcription slip in either place shows up as a mismatch.
"""

import math

import numpy as np
import pytest

from relaxosc import (
    Effect,
    NonIdealityProfile,
    OpAmpModel,
    averaged_periods,
    conventional_period,
    estimate_compensated,
    estimate_ideal,
    gamma,
    gbw_only_periods,
    ideal_periods,
    integrator_slope,
    lookup,
    nonideal_periods,
    recover_config,
    reference_config,
    relative_error,
)
from relaxosc.analytic import gamma_value, ideal_averaged, profile_gbw_only
from relaxosc.errors import CrossOverError, NegativeEstimateError, NegativePeriodError, SlewLimitedError
from relaxosc.measure import single_cycle_average
from relaxosc.models import AveragedPeriods, Method, PeriodSet

from conftest import GRID, OPA177_A0W0

RC = 330e3 * 330e-12          # 108.9 us
G_OPA = OPA177_A0W0 * RC      # loop gain product at the reference point


def custom(**kw):
    base = dict(name="CUSTOM", gbw_hz=1e6, slew_rate=1e12, v_offset=0.0, i_bias=0.0,
                c_parasitic=0.0, delay_lh=0.0, delay_hl=0.0)
    base.update(kw)
    return OpAmpModel(**base)


class TestConventional:
    def test_value(self):
        assert conventional_period(330e3, 33e-12, 0.5) == pytest.approx(21.78e-6, rel=1e-12)

    def test_zero_alpha_is_degenerate(self):
        assert conventional_period(330e3, 33e-12, 0.0) == 0.0

    def test_linear_in_r_x(self):
        assert conventional_period(660e3, 33e-12, 0.5) == 2 * conventional_period(330e3, 33e-12, 0.5)

    @pytest.mark.parametrize("r,c", [(0, 1e-12), (1e3, 0), (-1, 1e-12)])
    def test_rejects_non_positive(self, r, c):
        with pytest.raises(ValueError):
            conventional_period(r, c, 0.5)


class TestIdeal:
    def test_reference_values(self, cfg):
        p = ideal_periods(cfg)
        assert p.tp1 == pytest.approx(32.67e-6, rel=1e-12)
        assert p.tp2 == pytest.approx(54.45e-6, rel=1e-12)
        assert p.tp3 == p.tp1 and p.tp4 == p.tp2
        assert p.total == pytest.approx(174.24e-6, rel=1e-12)

    def test_no_sensor_capacitance_gives_square_wave(self):
        p = ideal_periods(reference_config(330e3, 0.0))
        assert p.tp1 == p.tp2 == 0.5 * RC

    def test_total_identity(self):
        for rx, cx in GRID:
            cfg = reference_config(rx, cx)
            expected = 4 * rx * cfg.c_i * (cfg.alpha - cx / cfg.c_i)
            assert ideal_periods(cfg).total == pytest.approx(expected, rel=1e-14)

    def test_cross_over(self):
        with pytest.raises(CrossOverError):
            ideal_periods(reference_config(330e3, 100e-12))

    def test_averaged_is_the_same_for_ideal(self, cfg):
        a = ideal_averaged(cfg)
        assert (a.t1, a.t2, a.t_offset_skew) == (ideal_periods(cfg).tp1, ideal_periods(cfg).tp2, 0.0)


class TestGamma:
    def test_opa177_reference(self, cfg, opa177_gbw):
        x = 33 / 330
        expected = (1 + x + x * (1 + G_OPA)) * G_OPA / (1 + G_OPA) ** 2
        gb = gamma(cfg, opa177_gbw)
        assert gb.gamma == pytest.approx(expected, rel=1e-13)
        assert gb.gamma == pytest.approx(0.1024, abs=5e-5)
        assert gb.loop_gain_product == pytest.approx(410.5, abs=0.05)
        assert gb.slope_reduction == pytest.approx(1 + 1 / G_OPA, rel=1e-15)

    def test_vanishes_for_infinite_gbw_without_sensor_capacitance(self):
        cfg = reference_config(330e3, 0.0)
        values = [gamma_value(cfg.r_x, 0.0, cfg.c_i, 0.0, a) for a in (1e8, 1e10, 1e12, 1e14)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-10
        assert gamma(cfg, NonIdealityProfile.ideal()).gamma == 0.0

    def test_small_offset_is_inverse_loop_gain(self):
        cfg = reference_config(330e3, 0.0)
        prof = NonIdealityProfile.from_opamp(lookup("OPA177"), {Effect.GBW})
        g = gamma(cfg, prof).gamma
        assert g == pytest.approx(G_OPA / (1 + G_OPA) ** 2, rel=1e-13)
        assert g == pytest.approx(1 / G_OPA, rel=3 / G_OPA)

    def test_parasitic_capacitance_enters_only_with_gbw(self, cfg):
        op = lookup("LT1360")
        on = gamma(cfg, NonIdealityProfile.from_opamp(op, {Effect.GBW}))
        no_cp = gamma_value(cfg.r_x, cfg.c_x, cfg.c_i, 0.0, op.a0w0)
        assert on.gamma > no_cp


class TestSlope:
    def test_opa177_offsets_off(self, cfg, opa177_gbw):
        s = integrator_slope(cfg, opa177_gbw)
        expected = 5.0 / (RC * (1 + 1 / G_OPA))
        assert s.sl_plus == pytest.approx(expected, rel=1e-14)
        assert s.sl_plus * 1e-6 == pytest.approx(45.8e-3, abs=0.05e-3)   # V/us
        assert s.sl_plus == s.sl_minus
        assert not (s.plus_slew_limited or s.minus_slew_limited)

    def test_slew_branch(self, cfg):
        prof = NonIdealityProfile.from_opamp(custom(slew_rate=0.01e6), {Effect.SLEW})
        s = integrator_slope(cfg, prof)
        assert s.sl_plus == s.sl_minus == 0.01e6
        assert s.plus_slew_limited and s.minus_slew_limited

    def test_offset_splits_the_slopes(self, cfg):
        prof = NonIdealityProfile.from_opamp(custom(v_offset=10e-3), {Effect.OFFSET})
        s = integrator_slope(cfg, prof)
        assert s.sl_plus < s.sl_minus
        assert s.sl_plus == pytest.approx((5 - 10e-3) / RC, rel=1e-14)


class TestNonideal:
    def test_all_toggles_off_is_ideal(self):
        for op in [lookup(n) for n in ("AD741", "TL071", "LT1360")]:
            prof = NonIdealityProfile.from_opamp(op, ())
            for rx, cx in GRID:
                cfg = reference_config(rx, cx)
                assert nonideal_periods(cfg, prof) == ideal_periods(cfg)

    def test_opa177_gbw_only(self, cfg, opa177_gbw):
        ideal = ideal_periods(cfg)
        p = nonideal_periods(cfg, opa177_gbw)
        g = gamma(cfg, opa177_gbw).gamma
        tau = RC + 1 / OPA177_A0W0
        assert p.tp1 == pytest.approx(tau * (0.3 - g), rel=1e-13)
        assert p.tp2 == pytest.approx(tau * (0.5 + g), rel=1e-13)
        assert p.tp1 * 1e6 == pytest.approx(21.57, abs=0.005)
        assert p.tp2 * 1e6 == pytest.approx(65.76, abs=0.005)
        assert relative_error(p.tp1, ideal.tp1) == pytest.approx(-33.97, abs=0.02)
        assert relative_error(p.tp2, ideal.tp2) == pytest.approx(20.78, abs=0.02)

    def test_matches_gbw_only_closed_forms(self, cfg, opa177_gbw):
        raw, _ = gbw_only_periods(cfg, OPA177_A0W0)
        p = nonideal_periods(cfg, opa177_gbw)
        for a, b in zip(raw.as_tuple(), p.as_tuple()):
            assert a == pytest.approx(b, rel=1e-13)

    def test_offset_skews_tp1_and_tp3_oppositely(self, cfg):
        """First order in V_os': tp1 loses what tp3 gains, so (tp3 - tp1)/2 ~ RC(alpha-2X) V_os'/V_p."""
        base = nonideal_periods(cfg, NonIdealityProfile.from_opamp(custom(v_offset=0.0), {Effect.OFFSET}))
        h = 1e-6
        p = nonideal_periods(cfg, NonIdealityProfile.from_opamp(custom(v_offset=h), {Effect.OFFSET}))
        d1, d3 = p.tp1 - base.tp1, p.tp3 - base.tp3
        assert d1 < 0 < d3
        assert d1 == pytest.approx(-d3, rel=1e-5)
        skew = (p.tp3 - p.tp1) / 2
        assert skew == pytest.approx(RC * 0.3 * h / 5.0, rel=1e-5)

    def test_slew_branch_floor(self, cfg):
        prof = NonIdealityProfile.from_opamp(custom(slew_rate=0.01e6), {Effect.SLEW})
        p = nonideal_periods(cfg, prof)
        assert p.tp1 == p.tp2 == pytest.approx(0.3 * 5.0 / 0.01e6, rel=1e-14)

    def test_delay_pairings(self, cfg):
        op = custom(delay_lh=100e-9, delay_hl=300e-9)
        zcd = custom(name="Z", delay_lh=10e-9, delay_hl=30e-9)
        prof = NonIdealityProfile.from_opamp(op, {Effect.DELAYS}, zcd=zcd)
        p, i = nonideal_periods(cfg, prof), ideal_periods(cfg)
        assert p.tp1 - i.tp1 == pytest.approx((100e-9 + 10e-9) / 2, rel=1e-6)
        assert p.tp2 - i.tp2 == pytest.approx((300e-9 + 10e-9) / 2, rel=1e-6)
        assert p.tp3 - i.tp3 == pytest.approx((300e-9 + 30e-9) / 2, rel=1e-6)
        assert p.tp4 - i.tp4 == pytest.approx((30e-9 + 100e-9) / 2, rel=1e-6)

    def test_negative_bracket_names_the_term(self, cfg):
        prof = NonIdealityProfile.from_opamp(custom(v_offset=2.0), {Effect.ZCD_OFFSET})
        with pytest.raises(NegativePeriodError) as info:
            nonideal_periods(cfg, prof)
        assert "alpha - 2X - gamma - V_oz/V_p" in str(info.value)
        assert info.value.details["term"] == "alpha - 2X - gamma - V_oz/V_p"


class TestAveraged:
    @pytest.mark.parametrize("name", ["AD741", "TL071", "LTC1049"])
    def test_equals_mean_of_sub_periods_with_equal_delays(self, name):
        prof = NonIdealityProfile.from_opamp(lookup(name))
        for rx, cx in [(330e3, 33e-12), (1e6, 42e-12), (500e3, 10e-12)]:
            cfg = reference_config(rx, cx)
            p = nonideal_periods(cfg, prof)
            if max(p.as_tuple()) <= (cfg.alpha - 2 * cfg.x_ratio) * cfg.v_p / prof.slew_rate * 1.0001:
                continue
            direct = averaged_periods(cfg, prof)
            mean = single_cycle_average(p)
            assert direct.t1 == pytest.approx(mean.t1, rel=1e-12)
            assert direct.t2 == pytest.approx(mean.t2, rel=1e-12)
            assert direct.t_offset_skew == mean.t_offset_skew

    def test_gbw_only_averaged_error(self, cfg):
        raw, avg = gbw_only_periods(cfg, OPA177_A0W0)
        ideal = ideal_periods(cfg)
        expected = 100.0 / G_OPA
        assert relative_error(avg.t1, ideal.tp1) == pytest.approx(expected, rel=1e-10)
        assert relative_error(avg.t2, ideal.tp2) == pytest.approx(expected, rel=1e-10)
        assert expected == pytest.approx(0.244, abs=5e-4)

    def test_gbw_only_limit(self, cfg):
        """gamma keeps an X*(1+G)*G/(1+G)^2 share, so it tends to X, not 0, as A0w0 grows."""
        raw, avg = gbw_only_periods(cfg, 1e30)
        x = cfg.x_ratio
        assert raw.tp1 == pytest.approx(RC * (0.5 - 3 * x), rel=1e-12)
        assert raw.tp2 == pytest.approx(RC * (0.5 + x), rel=1e-12)
        ideal = ideal_periods(cfg)
        assert avg.t1 == pytest.approx(ideal.tp1, rel=1e-12)
        assert avg.t2 == pytest.approx(ideal.tp2, rel=1e-12)

    def test_gbw_effect_off_is_ideal(self, cfg):
        prof = NonIdealityProfile.from_opamp(lookup("OPA177"), ())
        assert nonideal_periods(cfg, prof) == ideal_periods(cfg)

    def test_gbw_only_error_ordering(self, cfg):
        ideal = ideal_periods(cfg)
        for a0w0 in np.geomspace(1e5, 1e11, 25):
            raw, avg = gbw_only_periods(cfg, a0w0)
            e1 = abs(relative_error(raw.tp1, ideal.tp1))
            e2 = abs(relative_error(raw.tp2, ideal.tp2))
            et = abs(relative_error(avg.t2, ideal.tp2))
            assert e1 > e2 > et

    def test_averaging_gain_below_five_percent(self, cfg, opa177_gbw):
        g = gamma(cfg, opa177_gbw).gamma
        ratio = (1 / G_OPA) / (g / 0.5 + 1 / G_OPA)
        raw, avg = gbw_only_periods(cfg, OPA177_A0W0)
        ideal = ideal_periods(cfg)
        measured = relative_error(avg.t2, ideal.tp2) / relative_error(raw.tp2, ideal.tp2)
        # the ratio is first order in 1/G
        assert measured == pytest.approx(ratio, rel=2 / G_OPA)
        assert measured < 0.05

    def test_gbw_only_rejects_non_positive(self, cfg):
        with pytest.raises(ValueError):
            gbw_only_periods(cfg, 0.0)


class TestRelativeError:
    def test_value(self):
        assert relative_error(65.76, 54.45) == pytest.approx(20.771, abs=1e-3)
        assert relative_error(3.0, 3.0) == 0.0

    def test_swap_flips_sign(self):
        a, b = 65.76, 54.45
        assert relative_error(b, a) == pytest.approx(-relative_error(a, b) * b / a, rel=1e-14)

    def test_zero_reference(self):
        with pytest.raises(ValueError):
            relative_error(1.0, 0.0)

    def test_arrays(self):
        out = relative_error(np.array([2.0, 3.0]), np.array([1.0, 3.0]))
        assert out.tolist() == [100.0, 0.0]


class TestEstimateIdeal:
    def test_reference_round_trip(self):
        est = estimate_ideal(32.67e-6, 54.45e-6, 0.5, 330e-12)
        assert est.r_x_est == pytest.approx(330e3, rel=1e-12)
        assert est.c_x_est == pytest.approx(33e-12, rel=1e-12)
        assert est.method is Method.IDEAL_INV

    def test_equal_periods(self):
        assert estimate_ideal(10e-6, 10e-6, 0.5, 330e-12).c_x_est == 0.0

    def test_scaling(self):
        a = estimate_ideal(32.67e-6, 54.45e-6, 0.5, 330e-12)
        b = estimate_ideal(3 * 32.67e-6, 3 * 54.45e-6, 0.5, 330e-12)
        assert b.c_x_est == pytest.approx(a.c_x_est, rel=1e-14)
        assert b.r_x_est == pytest.approx(3 * a.r_x_est, rel=1e-14)

    def test_negative_estimate(self):
        with pytest.raises(NegativeEstimateError):
            estimate_ideal(60e-6, 54.45e-6, 0.5, 330e-12)
        assert estimate_ideal(60e-6, 54.45e-6, 0.5, 330e-12, allow_negative=True).c_x_est < 0

    def test_zero_tp2(self):
        with pytest.raises(ValueError):
            estimate_ideal(1e-6, 0.0, 0.5, 330e-12)

    def test_averaged_tag(self):
        assert estimate_ideal(1e-6, 2e-6, 0.5, 330e-12, averaged=True).method is Method.IDEAL_INV_AVG


class TestEstimateCompensated:
    def test_opa177_gbw_only_round_trip(self, cfg, opa177_gbw):
        est = estimate_compensated(nonideal_periods(cfg, opa177_gbw), cfg, opa177_gbw)
        assert est.r_x_est == pytest.approx(330e3, rel=1e-3)
        assert est.c_x_est == pytest.approx(33e-12, rel=1e-3)
        assert est.method is Method.COMPENSATED

    def test_full_profile_round_trip_is_tight(self, cfg, opa177_full):
        est = estimate_compensated(nonideal_periods(cfg, opa177_full), cfg, opa177_full)
        assert est.r_x_est == pytest.approx(330e3, rel=1e-9)
        assert est.c_x_est == pytest.approx(33e-12, rel=1e-9)

    def test_averaged_round_trip(self, cfg, opa177_full):
        avg = averaged_periods(cfg, opa177_full)
        est = estimate_compensated(avg, cfg, opa177_full)
        assert est.method is Method.COMPENSATED_AVG
        assert est.r_x_est == pytest.approx(330e3, rel=1e-9)
        assert est.c_x_est == pytest.approx(33e-12, rel=1e-9)

    def test_ideal_profile_reduces_to_ideal_inversion(self, cfg):
        p = ideal_periods(cfg)
        a = estimate_compensated(p, cfg, NonIdealityProfile.ideal())
        b = estimate_ideal(p.tp1, p.tp2, cfg.alpha, cfg.c_i)
        assert (a.r_x_est, a.c_x_est) == (b.r_x_est, b.c_x_est)

    def test_uncompensated_r_x_error(self, cfg, opa177_gbw):
        p = nonideal_periods(cfg, opa177_gbw)
        est = estimate_ideal(p.tp1, p.tp2, cfg.alpha, cfg.c_i)
        assert relative_error(est.r_x_est, 330e3) == pytest.approx(20.8, abs=0.05)

    def test_printed_form_is_close_but_not_exact(self, cfg, opa177_gbw):
        est = estimate_compensated(nonideal_periods(cfg, opa177_gbw), cfg, opa177_gbw, form="printed")
        r_err = abs(relative_error(est.r_x_est, 330e3))
        c_err = abs(relative_error(est.c_x_est, 33e-12))
        assert 1e-3 < r_err < 0.2
        assert 0.1 < c_err < 2.0

    def test_printed_form_ideal_profile(self, cfg):
        p = ideal_periods(cfg)
        est = estimate_compensated(p, cfg, NonIdealityProfile.ideal(), form="printed")
        assert est.r_x_est == pytest.approx(330e3, rel=1e-12)
        assert est.c_x_est == pytest.approx(33e-12, rel=1e-12)

    def test_printed_form_refuses_averages(self, cfg):
        with pytest.raises(ValueError):
            estimate_compensated(AveragedPeriods(1e-5, 2e-5), cfg, NonIdealityProfile.ideal(), form="printed")

    def test_slew_limited_tp2(self, cfg):
        prof = NonIdealityProfile.from_opamp(custom(slew_rate=0.01e6), {Effect.SLEW})
        with pytest.raises(SlewLimitedError):
            estimate_compensated(nonideal_periods(cfg, prof), cfg, prof)

    def test_bad_form(self, cfg):
        with pytest.raises(ValueError):
            estimate_compensated(ideal_periods(cfg), cfg, NonIdealityProfile.ideal(), form="other")

    def test_periods_shorter_than_delays(self, cfg):
        prof = NonIdealityProfile.from_opamp(lookup("TL071"))
        with pytest.raises(NegativeEstimateError):
            estimate_compensated(PeriodSet(1e-9, 1e-9, 1e-9, 1e-9), cfg, prof)


class TestRecoverConfig:
    def test_hits_the_requested_pair(self):
        rec = recover_config(330e3, 33e-12, OPA177_A0W0)
        assert rec.tp1_err_pct == pytest.approx(-52.76, abs=1e-6)
        assert rec.tp2_err_pct == pytest.approx(26.74, abs=1e-6)
        assert 2 * 33e-12 / rec.c_i < rec.alpha < 1
        assert isinstance(rec.c_i, float)

    def test_averaged_errors_equal_inverse_loop_gain(self):
        rec = recover_config(330e3, 33e-12, OPA177_A0W0)
        expected = 100.0 / (OPA177_A0W0 * 330e3 * rec.c_i)
        assert rec.t1_err_pct == pytest.approx(expected, rel=1e-9)
        assert rec.t2_err_pct == pytest.approx(expected, rel=1e-9)


def test_profile_gbw_only_helpers(opa177_full):
    p = profile_gbw_only(opa177_full)
    assert p.enabled_effects == {Effect.GBW}
    q = profile_gbw_only(OPA177_A0W0)
    assert q.a0w0 == pytest.approx(OPA177_A0W0, rel=1e-15)
    assert math.isinf(q.slew_rate)
