import math
from dataclasses import replace

import pytest

from relaxosc import builtin_catalog, lookup
from relaxosc.design import (
    REPORT_COLUMNS,
    SR_FAIL,
    DesignRequirements,
    check_alpha,
    check_comparator,
    check_epsilon,
    check_slew,
    check_xor,
    epsilon_bound,
    evaluate_part,
    report_csv,
    report_text,
    select_components,
    slew_requirement,
    tau_bound,
)
from relaxosc.errors import EmptyCatalogError
from relaxosc.models import OpAmpModel

REQ = DesignRequirements()


class TestAlpha:
    def test_reference(self):
        r = check_alpha(REQ)
        assert r.bound == pytest.approx(2 * 42 / 330, rel=1e-15)
        assert r.bound == pytest.approx(0.2545, abs=1e-4)
        assert r.passed and r.slack == pytest.approx(0.2455, abs=1e-4)

    def test_boundary_is_strict(self):
        r = check_alpha(replace(REQ, alpha=2 * 42e-12 / 330e-12))
        assert not r.passed

    def test_no_sensor_capacitance(self):
        assert check_alpha(replace(REQ, cx_max=0.0, alpha=1e-6)).passed


class TestEpsilon:
    def test_opa177_offsets_off(self):
        b = epsilon_bound(REQ, lookup("OPA177"), include_offsets=False)
        assert b == pytest.approx(100 / (2 * math.pi * 0.6e6 * 100e3 * 330e-12), rel=1e-14)
        assert b == pytest.approx(0.804, abs=5e-4)

    def test_ideal_part(self):
        op = OpAmpModel("IDEAL", math.inf, math.inf, 0.0, 0.0, 0.0, 0.0, 0.0)
        assert epsilon_bound(REQ, op) == 0.0

    def test_lt1360_offset_dominates(self):
        op = lookup("LT1360")
        v = op.v_os_total(1e6)
        assert v == pytest.approx(0.2503, rel=1e-12)
        assert v / 5 == pytest.approx(0.05, abs=1e-4)
        gbw_part = 100 / (op.a0w0 * 100e3 * 330e-12)
        total = epsilon_bound(REQ, op)
        assert total - gbw_part > 10 * gbw_part

    def test_hz_reading_is_larger(self):
        op = lookup("OPA177")
        assert epsilon_bound(REQ, op, gbw_in_hz=True) > epsilon_bound(REQ, op)

    def test_check(self):
        assert check_epsilon(REQ, lookup("TL071")).passed
        assert not check_epsilon(REQ, lookup("AD741")).passed


class TestSlew:
    def test_requirement(self):
        assert slew_requirement(REQ) == pytest.approx(2 * 5 / (100e3 * 330e-12), rel=1e-15)
        assert slew_requirement(REQ) / 1e6 == pytest.approx(0.3030, abs=1e-4)

    def test_opa177_fails_by_one_percent(self):
        r = check_slew(REQ, lookup("OPA177"))
        assert not r.passed and r.margin == pytest.approx(-0.01, abs=1e-12)

    def test_lt1360_margin(self):
        r = check_slew(REQ, lookup("LT1360"))
        assert r.passed and r.margin == pytest.approx(2639, abs=1)

    def test_large_r_x_min(self):
        req = replace(REQ, rx_min=1e30, rx_max=1e30)
        assert all(check_slew(req, op).passed for op in builtin_catalog())


class TestTiming:
    def test_tau_bound(self):
        assert tau_bound(REQ) == pytest.approx(1.65e-6, abs=1e-15)

    def test_tl071_delay_passes(self):
        assert check_comparator(REQ, 310e-9, part="TL071").passed

    def test_offset_raises_the_bound(self):
        op = OpAmpModel("BIG", 1e6, 1e6, 4.9, 0.0, 0.0, 0.0, 0.0)
        assert tau_bound(REQ, op) > 20 * tau_bound(REQ)
        near = OpAmpModel("NEAR", 1e6, 1e6, 5.0 - 1e-9, 0.0, 0.0, 0.0, 0.0)
        assert tau_bound(REQ, near) > 1e3

    def test_xor_budget_adds_comparator_time(self):
        r = check_xor(REQ, 1.8e-6, comparator_tau=310e-9)
        assert r.bound == pytest.approx(1.96e-6, rel=1e-12) and r.passed
        assert not check_xor(REQ, 1.8e-6).passed


class TestSelection:
    def test_reference_ranking(self):
        rep = select_components(REQ, builtin_catalog())
        order = rep.ranking
        assert order.index("LTC1049") < order.index("OPA177")
        opa = next(p for p in rep.parts if p.part == "OPA177")
        assert opa.causes == (SR_FAIL,)
        assert {p.part for p in rep.passing} == {"TL071", "LTC1049"}

    def test_large_budget_clears_every_budget_check(self):
        rep = select_components(replace(REQ, epsilon_pct=100.0), builtin_catalog())
        for p in rep.parts:
            for c in p.checks:
                if c.criterion in ("epsilon", "comparator_tau", "xor_tau_p"):
                    assert c.passed
        # the slew requirement does not depend on the budget
        assert [p.part for p in rep.parts if not p.passed] == ["OPA177"]

    def test_single_failing_part(self):
        rep = select_components(REQ, [lookup("OPA177")])
        assert rep.passing == () and rep.parts[0].causes == (SR_FAIL,)

    def test_empty_catalog(self):
        with pytest.raises(EmptyCatalogError):
            select_components(REQ, [])

    def test_tie_break_on_name(self):
        a = lookup("TL071")
        cat = [replace(a, name="B"), replace(a, name="A")]
        assert select_components(REQ, cat).ranking == ("A", "B")

    def test_assumed_cells_are_listed(self):
        rep = evaluate_part(REQ, lookup("OPA177"))
        assert rep.assumed == ("OPA177.delay_lh", "OPA177.delay_hl")


class TestReports:
    def test_csv_header_and_rows(self):
        rep = select_components(REQ, builtin_catalog())
        lines = report_csv(rep).splitlines()
        assert lines[0] == ",".join(REPORT_COLUMNS) == "part,criterion,bound,actual,margin,verdict"
        assert len(lines) == 1 + 5 * 5

    def test_text(self):
        text = report_text(select_components(REQ, builtin_catalog()))
        assert "OPA177(SR_FAIL)" in text and "assumed zero" in text


def test_requirement_invariants():
    with pytest.raises(ValueError):
        DesignRequirements(rx_min=2e6, rx_max=1e6)
    with pytest.raises(ValueError):
        DesignRequirements(epsilon_pct=0.0)
