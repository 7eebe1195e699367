"""Component-selection criteria and a catalog search over them."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyCatalogError
from .models import OpAmpModel

ALPHA_FAIL = "ALPHA_FAIL"
EPSILON_FAIL = "EPSILON_FAIL"
SR_FAIL = "SR_FAIL"
TAU_FAIL = "TAU_FAIL"
XOR_FAIL = "XOR_FAIL"


@dataclass(frozen=True)
class DesignRequirements:
    """Sensor range, circuit constants and the error budget ``epsilon_pct`` (percent)."""

    rx_min: float = 100e3
    rx_max: float = 1e6
    cx_max: float = 42e-12
    c_i: float = 330e-12
    alpha: float = 0.5
    v_p: float = 5.0
    epsilon_pct: float = 1.0
    tau_p: float = 0.0

    def __post_init__(self):
        if not self.rx_min <= self.rx_max:
            raise ValueError("rx_min must be <= rx_max")
        if not self.epsilon_pct > 0:
            raise ValueError("epsilon_pct must be > 0")


@dataclass(frozen=True)
class CheckResult:
    part: str
    criterion: str
    bound: float
    actual: float
    slack: float
    margin: float       # slack / |bound|
    passed: bool

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _result(part, criterion, bound, actual, upper: bool) -> CheckResult:
    # upper=True: actual must stay below bound; otherwise it must exceed it
    slack = bound - actual if upper else actual - bound
    if bound != 0 and math.isfinite(bound):
        margin = slack / abs(bound)
    elif math.isinf(bound):
        margin = math.inf if upper else -math.inf
    else:
        margin = math.copysign(math.inf, slack) if slack != 0 else 0.0
    return CheckResult(part, criterion, bound, actual, slack, margin, slack > 0)


def _offset_ratio(req: DesignRequirements, opamp: OpAmpModel | None) -> float:
    if opamp is None:
        return 0.0
    return opamp.v_os_total(req.rx_max) / req.v_p


def check_alpha(req: DesignRequirements, part: str = "") -> CheckResult:
    return _result(part, "alpha", 2 * req.cx_max / req.c_i, req.alpha, upper=False)


def epsilon_bound(req: DesignRequirements, opamp: OpAmpModel, *, include_offsets: bool = True,
                  gbw_in_hz: bool = False) -> float:
    """Smallest admissible error budget (percent) for ``opamp``.

    ``100/(1-v^2) * [1/(GBW*R_x,min*C_i) + v*(1/(alpha*C_i/C_x,max - 2) + v)]``
    with ``v = V_os'/V_p`` evaluated at ``R_x,max``. GBW is ``A0w0`` in rad/s
    unless ``gbw_in_hz`` is set, which uses the datasheet Hz figure instead.
    """
    gbw = opamp.gbw_hz if gbw_in_hz else opamp.a0w0
    v = _offset_ratio(req, opamp) if include_offsets else 0.0
    term_gbw = 0.0 if math.isinf(gbw) else 1.0 / (gbw * req.rx_min * req.c_i)
    if req.cx_max > 0:
        term_cx = 1.0 / (req.alpha * req.c_i / req.cx_max - 2)
    else:
        term_cx = 0.0
    return 100.0 / (1 - v * v) * (term_gbw + v * (term_cx + v))


def check_epsilon(req: DesignRequirements, opamp: OpAmpModel, *, gbw_in_hz: bool = False) -> CheckResult:
    return _result(opamp.name, "epsilon", epsilon_bound(req, opamp, gbw_in_hz=gbw_in_hz), req.epsilon_pct, upper=False)


def slew_requirement(req: DesignRequirements) -> float:
    """Minimum slew rate ``2 V_p / (R_x,min C_i)`` in V/s."""
    return 2 * req.v_p / (req.rx_min * req.c_i)


def check_slew(req: DesignRequirements, opamp: OpAmpModel) -> CheckResult:
    return _result(opamp.name, "slew_rate", slew_requirement(req), opamp.slew_rate, upper=False)


def tau_bound(req: DesignRequirements, opamp: OpAmpModel | None = None) -> float:
    """Largest comparator response time ``eps*alpha*R_x,max*C_i / (100 (1 - v^2))``."""
    v = _offset_ratio(req, opamp)
    return req.epsilon_pct * req.alpha * req.rx_max * req.c_i / (100 * (1 - v * v))


def check_comparator(req: DesignRequirements, comparator_tau: float, opamp: OpAmpModel | None = None,
                     part: str = "") -> CheckResult:
    return _result(part or (opamp.name if opamp else ""), "comparator_tau", tau_bound(req, opamp),
                   comparator_tau, upper=True)


def check_xor(req: DesignRequirements, tau_p: float, comparator_tau: float = 0.0,
              opamp: OpAmpModel | None = None, part: str = "") -> CheckResult:
    return _result(part or (opamp.name if opamp else ""), "xor_tau_p", tau_bound(req, opamp) + comparator_tau,
                   tau_p, upper=True)


@dataclass(frozen=True)
class PartReport:
    part: str
    checks: tuple[CheckResult, ...]
    assumed: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def causes(self) -> tuple[str, ...]:
        names = {"alpha": ALPHA_FAIL, "epsilon": EPSILON_FAIL, "slew_rate": SR_FAIL,
                 "comparator_tau": TAU_FAIL, "xor_tau_p": XOR_FAIL}
        return tuple(names[c.criterion] for c in self.checks if not c.passed)

    @property
    def composite_margin(self) -> float:
        return min(c.margin for c in self.checks)


@dataclass(frozen=True)
class DesignReport:
    requirements: DesignRequirements
    parts: tuple[PartReport, ...] = field(default_factory=tuple)

    @property
    def passing(self) -> tuple[PartReport, ...]:
        return tuple(p for p in self.parts if p.passed)

    @property
    def ranking(self) -> tuple[str, ...]:
        return tuple(p.part for p in self.parts)


def evaluate_part(req: DesignRequirements, opamp: OpAmpModel, *, gbw_in_hz: bool = False) -> PartReport:
    """All criteria for one op-amp acting as integrator, Schmitt trigger and ZCD."""
    tau = max(opamp.delay_lh or 0.0, opamp.delay_hl or 0.0)
    assumed = tuple(f"{opamp.name}.{m}" for m in opamp.missing if m != "c_parasitic")
    checks = (
        check_alpha(req, opamp.name),
        check_epsilon(req, opamp, gbw_in_hz=gbw_in_hz),
        check_slew(req, opamp),
        check_comparator(req, tau, opamp),
        check_xor(req, req.tau_p, tau, opamp),
    )
    return PartReport(opamp.name, checks, assumed)


def select_components(req: DesignRequirements, catalog: Sequence[OpAmpModel], *,
                      gbw_in_hz: bool = False) -> DesignReport:
    """Evaluate every part; passing parts first by composite margin, then failing ones.

    The composite margin is the smallest normalised margin over all criteria.
    Ties break on the part name so the order depends on the inputs only.
    """
    if not catalog:
        raise EmptyCatalogError("catalog contains no parts")
    reports = [evaluate_part(req, op, gbw_in_hz=gbw_in_hz) for op in catalog]
    reports.sort(key=lambda r: (not r.passed, -r.composite_margin, r.part))
    return DesignReport(req, tuple(reports))


REPORT_COLUMNS = ["part", "criterion", "bound", "actual", "margin", "verdict"]


def report_rows(report: DesignReport) -> list[list]:
    return [[c.part, c.criterion, c.bound, c.actual, c.margin, c.verdict] for p in report.parts for c in p.checks]


def report_csv(report: DesignReport) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(REPORT_COLUMNS)
    for row in report_rows(report):
        wr.writerow([row[0], row[1], repr(float(row[2])), repr(float(row[3])), repr(float(row[4])), row[5]])
    return buf.getvalue()


def report_text(report: DesignReport) -> str:
    lines = [f"{'part':<10}{'criterion':<16}{'bound':>14}{'actual':>14}{'margin':>12}  verdict"]
    for p in report.parts:
        for c in p.checks:
            lines.append(f"{c.part:<10}{c.criterion:<16}{c.bound:>14.6g}{c.actual:>14.6g}{c.margin:>12.4g}  {c.verdict}")
    lines.append("")
    lines.append("ranking: " + ", ".join(
        f"{p.part}({'pass' if p.passed else '/'.join(p.causes)})" for p in report.parts))
    assumed = sorted({a for p in report.parts for a in p.assumed})
    if assumed:
        lines.append("assumed zero: " + ", ".join(assumed))
    return "\n".join(lines)
