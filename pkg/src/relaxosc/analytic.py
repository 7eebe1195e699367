"""Closed-form period expressions and the sensor inversion formulas.

Symbols used in comments: ``X = C_x/C_i``, ``G = A0w0*R_x*C_i`` (loop gain
product), ``v = V_os'/V_p`` with ``V_os' = V_os + i_b*R_x``, ``z = V_oz/V_p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import CrossOverError, NegativeEstimateError, NegativePeriodError, NoConvergenceError, SlewLimitedError
from .models import (
    AveragedPeriods,
    Effect,
    Method,
    NonIdealityProfile,
    OscillatorConfig,
    PeriodSet,
    SensorEstimate,
)


@dataclass(frozen=True)
class GammaBreakdown:
    gamma: float
    slope_reduction: float
    loop_gain_product: float


@dataclass(frozen=True)
class SlopeResult:
    """Integrator ramp slopes in V/s. ``sl_plus`` is the slope with the offset subtracted."""

    sl_plus: float
    sl_minus: float
    plus_slew_limited: bool
    minus_slew_limited: bool


def conventional_period(r_x: float, c_x: float, alpha: float) -> float:
    """Square-wave period of the classic integrator + Schmitt oscillator."""
    if r_x <= 0 or c_x <= 0:
        raise ValueError(f"r_x and c_x must be > 0, got r_x={r_x!r}, c_x={c_x!r}")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha!r}")
    return 4.0 * r_x * c_x * alpha


def ideal_periods(config: OscillatorConfig) -> PeriodSet:
    x = config.x_ratio
    if config.alpha <= 2 * x:
        raise CrossOverError(f"alpha={config.alpha:g} <= 2*C_x/C_i={2 * x:.6g}", alpha=config.alpha, x=x)
    rc = config.sensor.r_x * config.c_i
    tp1 = rc * (config.alpha - 2 * x)
    tp2 = rc * config.alpha
    return PeriodSet(tp1, tp2, tp1, tp2)


def ideal_averaged(config: OscillatorConfig) -> AveragedPeriods:
    p = ideal_periods(config)
    return AveragedPeriods(p.tp1, p.tp2, 0.0)


def gamma_value(r_x: float, c_x: float, c_i: float, c_p: float, a0w0: float) -> float:
    """Finite-GBW offset factor; zero for an infinite gain-bandwidth product."""
    if math.isinf(a0w0):
        return 0.0
    g = a0w0 * r_x * c_i
    return (1.0 + (c_x + c_p) / c_i + (c_x / c_i) * (1.0 + g)) * g / (1.0 + g) ** 2


def gamma(config: OscillatorConfig, profile: NonIdealityProfile) -> GammaBreakdown:
    a0w0 = profile.a0w0
    if math.isinf(a0w0):
        return GammaBreakdown(0.0, 1.0, math.inf)
    g = a0w0 * config.r_x * config.c_i
    value = gamma_value(config.r_x, config.c_x, config.c_i, profile.c_p, a0w0)
    return GammaBreakdown(value, 1.0 + 1.0 / g, g)


def _inv_gain(a0w0: float, r_x: float, c_i: float) -> float:
    return 0.0 if math.isinf(a0w0) else 1.0 / (a0w0 * r_x * c_i)


def integrator_slope(config: OscillatorConfig, profile: NonIdealityProfile) -> SlopeResult:
    """Ramp slopes including slope reduction, offsets and the slew-rate cap.

    The offset term is ``V_os' + i_b*R_x`` exactly as in the slope bound used
    for component selection; ``V_os'`` already contains one ``i_b*R_x``.
    """
    r_x, c_i = config.r_x, config.c_i
    denom = r_x * c_i * (1.0 + _inv_gain(profile.a0w0, r_x, c_i))
    off = profile.v_os_total(r_x) + profile.i_b * r_x
    sr = profile.slew_rate
    lin_plus = (config.v_p - off) / denom
    lin_minus = (config.v_p + off) / denom
    return SlopeResult(min(lin_plus, sr), min(lin_minus, sr), lin_plus > sr, lin_minus > sr)


@dataclass(frozen=True)
class _Terms:
    tau: float      # R_x C_i (1 + 1/G)
    x: float
    g: float        # gamma
    z: float
    v: float
    slew: float     # (alpha - 2X) V_p / SR
    d1: float
    d2: float
    d3: float
    d4: float


def _terms(r_x, c_x, config: OscillatorConfig, profile: NonIdealityProfile) -> _Terms:
    c_i = config.c_i
    a0w0 = profile.a0w0
    tau = r_x * c_i if math.isinf(a0w0) else r_x * c_i + 1.0 / a0w0
    x = c_x / c_i
    sr = profile.slew_rate
    slew = 0.0 if math.isinf(sr) else (config.alpha - 2 * x) * config.v_p / sr
    return _Terms(
        tau=tau,
        x=x,
        g=gamma_value(r_x, c_x, c_i, profile.c_p, a0w0),
        z=profile.v_oz / config.v_p,
        v=profile.v_os_total(r_x) / config.v_p,
        slew=slew,
        d1=(profile.tau_s_lh + profile.tau_z_lh) / 2,
        d2=(profile.tau_s_hl + profile.tau_z_lh) / 2,
        d3=(profile.tau_s_hl + profile.tau_z_hl) / 2,
        d4=(profile.tau_z_hl + profile.tau_s_lh) / 2,
    )


def nonideal_periods(config: OscillatorConfig, profile: NonIdealityProfile) -> PeriodSet:
    """All four sub-periods with GBW, slew, offsets and comparator delays.

    Each sub-period is ``max(ramp term, (alpha-2X)V_p/SR)`` plus half the sum of
    the Schmitt and ZCD delays that bound it. With every effect disabled the
    result equals :func:`ideal_periods`.
    """
    t = _terms(config.r_x, config.c_x, config, profile)
    a, x, gz = config.alpha, t.x, t.g + t.z
    if a <= 2 * x:
        raise CrossOverError(f"alpha={a:g} <= 2*C_x/C_i={2 * x:.6g}", alpha=a, x=x)
    brackets = {
        "alpha - 2X - gamma - V_oz/V_p": a - 2 * x - gz,
        "alpha + gamma + V_oz/V_p": a + gz,
        "alpha - 2X + gamma + V_oz/V_p": a - 2 * x + gz,
        "alpha - gamma - V_oz/V_p": a - gz,
        "1 + V_os'/V_p": 1 + t.v,
        "1 - V_os'/V_p": 1 - t.v,
    }
    for name, value in brackets.items():
        if not value > 0:
            raise NegativePeriodError(f"bracket {name} = {value:.6g} is not positive", term=name, value=value)
    r1 = t.tau * (a - 2 * x - gz) / (1 + t.v)
    r2 = t.tau * (a + gz) / (1 + t.v)
    r3 = t.tau * (a - 2 * x + gz) / (1 - t.v)
    r4 = t.tau * (a - gz) / (1 - t.v)
    return PeriodSet(
        max(r1, t.slew) + t.d1,
        max(r2, t.slew) + t.d2,
        max(r3, t.slew) + t.d3,
        max(r4, t.slew) + t.d4,
    )


def averaged_periods(config: OscillatorConfig, profile: NonIdealityProfile) -> AveragedPeriods:
    """Closed-form single-cycle averages ``T1 = (Tp1+Tp3)/2`` and ``T2 = (Tp2+Tp4)/2``.

    The delay term is the mean of the four LH/HL delays, which is
    ``(tau_S + tau_Z)/2`` when rising and falling delays are equal. The slew
    branch is ``2 V_p (alpha - X) / SR``.
    """
    t = _terms(config.r_x, config.c_x, config, profile)
    a, x, gz, v = config.alpha, t.x, t.g + t.z, t.v
    if a <= 2 * x:
        raise CrossOverError(f"alpha={a:g} <= 2*C_x/C_i={2 * x:.6g}", alpha=a, x=x)
    if not abs(v) < 1:
        raise NegativePeriodError(f"|V_os'/V_p| = {abs(v):.6g} >= 1", term="1 - (V_os'/V_p)^2", value=1 - v * v)
    sr = profile.slew_rate
    slew = 0.0 if math.isinf(sr) else 2 * config.v_p * (a - x) / sr
    d = (profile.tau_s_lh + profile.tau_s_hl + profile.tau_z_lh + profile.tau_z_hl) / 4
    den = 1 - v * v
    t1 = max(t.tau * (a - 2 * x + v * gz) / den, slew) + d
    t2 = max(t.tau * (a - v * gz) / den, slew) + d
    p = nonideal_periods(config, profile)
    return AveragedPeriods(t1, t2, (p.tp3 - p.tp1) / 2)


def gbw_only_periods(config: OscillatorConfig, a0w0: float, c_p: float = 0.0) -> tuple[PeriodSet, AveragedPeriods]:
    """Periods when the only non-ideality is a finite gain-bandwidth product (rad/s)."""
    if not a0w0 > 0:
        raise ValueError(f"a0w0 must be > 0, got {a0w0!r}")
    x = config.x_ratio
    a = config.alpha
    if a <= 2 * x:
        raise CrossOverError(f"alpha={a:g} <= 2*C_x/C_i={2 * x:.6g}", alpha=a, x=x)
    rc = config.r_x * config.c_i
    sr = 1.0 + _inv_gain(a0w0, config.r_x, config.c_i)
    g = gamma_value(config.r_x, config.c_x, config.c_i, c_p, a0w0)
    tp1 = rc * (a - 2 * x) * (1 - g / (a - 2 * x)) * sr
    tp2 = a * rc * (1 + g / a) * sr
    tp3 = rc * (a - 2 * x) * (1 + g / (a - 2 * x)) * sr
    tp4 = a * rc * (1 - g / a) * sr
    t1 = rc * (a - 2 * x) * sr
    t2 = a * rc * sr
    return PeriodSet(tp1, tp2, tp3, tp4), AveragedPeriods(t1, t2, (tp3 - tp1) / 2)


def relative_error(measured, reference):
    """Signed percentage error ``100*(measured - reference)/reference``."""
    ref = np.asarray(reference, dtype=float)
    if np.any(ref == 0):
        raise ValueError("reference must be non-zero")
    out = 100.0 * (np.asarray(measured, dtype=float) - ref) / ref
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------------ inversion

def estimate_ideal(tp1_like: float, tp2_like: float, alpha: float, c_i: float,
                   averaged: bool = False, allow_negative: bool = False) -> SensorEstimate:
    """Invert the ideal period expressions.

    ``R_x = Tp2/(alpha*C_i)`` and ``C_x = (alpha*C_i/2)(1 - Tp1/Tp2)``. Pass
    ``averaged=True`` when feeding ``T1, T2`` so the method tag says so.
    """
    if not tp2_like > 0:
        raise ValueError(f"tp2 must be > 0, got {tp2_like!r}")
    r_x = tp2_like / (alpha * c_i)
    c_x = (alpha * c_i / 2) * (1 - tp1_like / tp2_like)
    method = Method.IDEAL_INV_AVG if averaged else Method.IDEAL_INV
    if c_x < 0 and not allow_negative:
        raise NegativeEstimateError(f"C_x estimate {c_x:.6g} F < 0 (tp1 > tp2)", c_x=c_x, r_x=r_x)
    return SensorEstimate(r_x, c_x, method)


def _gamma_split(r_x: float, c_i: float, c_p: float, a0w0: float) -> tuple[float, float]:
    """gamma = g0 + k*X for fixed R_x; returns (g0, k)."""
    if math.isinf(a0w0):
        return 0.0, 0.0
    g = a0w0 * r_x * c_i
    s = g / (1.0 + g) ** 2
    return (1.0 + c_p / c_i) * s, (2.0 + g) * s


def estimate_compensated(periods, config: OscillatorConfig, profile: NonIdealityProfile, *,
                         tol: float = 1e-9, max_iter: int = 50, form: str = "exact",
                         allow_negative: bool = False) -> SensorEstimate:
    """Recover R_x and C_x with the non-idealities of ``profile`` taken into account.

    ``periods`` is a :class:`PeriodSet` (uses Tp1, Tp2) or an
    :class:`AveragedPeriods` (uses T1, T2). Only the circuit constants of
    ``config`` are used; its sensor values are ignored. R_x appears inside
    gamma and V_os', so both unknowns are refined by fixed-point iteration
    seeded with the ideal inversion.

    ``form="exact"`` rearranges the forward period model exactly (delays
    removed, slope-reduction kept, slew branch handled), so feeding it
    :func:`nonideal_periods` output returns the true sensor values.
    ``form="printed"`` evaluates the beta_1-form expressions literally,
    including the ``alpha/A0w0`` term inside the R_x bracket; it ignores delays
    and the slew branch and is only defined for raw periods.
    """
    averaged = isinstance(periods, AveragedPeriods)
    if form not in ("exact", "printed"):
        raise ValueError(f"form must be 'exact' or 'printed', got {form!r}")
    if form == "printed" and averaged:
        raise ValueError("the printed form is defined for raw Tp1/Tp2 only")
    method = Method.COMPENSATED_AVG if averaged else Method.COMPENSATED

    if averaged:
        pa, pb = periods.t1, periods.t2
        d = (profile.tau_s_lh + profile.tau_s_hl + profile.tau_z_lh + profile.tau_z_hl) / 4
        da = db = d
    else:
        pa, pb = periods.tp1, periods.tp2
        da = (profile.tau_s_lh + profile.tau_z_lh) / 2
        db = (profile.tau_s_hl + profile.tau_z_lh) / 2
    if form == "printed":
        da = db = 0.0
    qa, qb = pa - da, pb - db
    if not (qa > 0 and qb > 0):
        raise NegativeEstimateError("periods are not longer than the comparator delays", tp_a=pa, tp_b=pb)

    alpha, c_i, v_p = config.alpha, config.c_i, config.v_p
    a0w0, c_p, sr = profile.a0w0, profile.c_p, profile.slew_rate
    inv_a = 0.0 if math.isinf(a0w0) else 1.0 / a0w0
    z = profile.v_oz / v_p

    seed = estimate_ideal(qa, qb, alpha, c_i, allow_negative=True)
    r_x, c_x = seed.r_x_est, seed.c_x_est
    for it in range(1, max_iter + 1):
        x = c_x / c_i
        v = profile.v_os_total(r_x) / v_p
        g = gamma_value(r_x, max(c_x, 0.0), c_i, c_p, a0w0)
        if form == "printed":
            r_new, c_new = _printed_step(qa, qb, alpha, c_i, a0w0, g, z, v, r_x)
        elif averaged:
            slew_b = 0.0 if math.isinf(sr) else 2 * v_p * (alpha - x) / sr
            if qb <= slew_b * (1 + 1e-12):
                raise SlewLimitedError("T2 is on the slew-rate branch; R_x is not observable", t2=pb)
            r_new = qb * (1 - v * v) / (c_i * (alpha - v * (g + z))) - inv_a / c_i
            v = profile.v_os_total(r_new) / v_p
            g0, k = _gamma_split(r_new, c_i, c_p, a0w0)
            tau = r_new * c_i + inv_a
            m = qa * (1 - v * v) / tau
            x_ramp = (alpha + v * (g0 + z) - m) / (2 - v * k)
            x_slew = -math.inf if math.isinf(sr) else alpha - qa * sr / (2 * v_p)
            c_new = max(x_ramp, x_slew) * c_i
        else:
            slew_b = 0.0 if math.isinf(sr) else (alpha - 2 * x) * v_p / sr
            if qb <= slew_b * (1 + 1e-12):
                raise SlewLimitedError("Tp2 is on the slew-rate branch; R_x is not observable", tp2=pb)
            r_new = qb * (1 + v) / (c_i * (alpha + g + z)) - inv_a / c_i
            v = profile.v_os_total(r_new) / v_p
            g0, k = _gamma_split(r_new, c_i, c_p, a0w0)
            tau = r_new * c_i + inv_a
            x_ramp = (alpha - g0 - z - qa * (1 + v) / tau) / (2 + k)
            x_slew = -math.inf if math.isinf(sr) else (alpha - qa * sr / v_p) / 2
            c_new = max(x_ramp, x_slew) * c_i
        if not (math.isfinite(r_new) and math.isfinite(c_new)) or r_new <= 0:
            raise NoConvergenceError(f"iteration diverged at step {it}", r_x=r_new, c_x=c_new)
        done = abs(r_new - r_x) <= tol * abs(r_new) and abs(c_new - c_x) <= tol * alpha * c_i
        r_x, c_x = r_new, c_new
        if done:
            break
    else:
        raise NoConvergenceError(f"no convergence after {max_iter} iterations", r_x=r_x, c_x=c_x)
    if c_x < 0 and not allow_negative:
        raise NegativeEstimateError(f"C_x estimate {c_x:.6g} F < 0", c_x=c_x, r_x=r_x)
    return SensorEstimate(r_x, c_x, method, it)


def _printed_step(tp1, tp2, alpha, c_i, a0w0, g, z, v, r_x):
    inv_beta = (1 + v) / (1 + (g + z) / alpha)
    a_term = 0.0 if math.isinf(a0w0) else alpha / a0w0
    bracket = inv_beta - a_term
    r_new = tp2 / (alpha * c_i) * bracket
    if math.isinf(a0w0):
        q, slope = 0.0, 1.0      # GBW effect off: gamma and its X-share vanish
    else:
        gg = a0w0 * r_x * c_i
        q, slope = gg / (1 + gg), 1.0 / (1.0 + 1.0 / gg)
    c_new = alpha * c_i / (2 + q) * (1 - (tp1 / tp2) * ((1 + v) / bracket) * slope - z / alpha)
    return r_new, c_new


# ------------------------------------------------------------- config fitting

@dataclass(frozen=True)
class RecoveredConfig:
    c_i: float
    alpha: float
    tp1_err_pct: float
    tp2_err_pct: float
    t1_err_pct: float
    t2_err_pct: float


def recover_config(r_x: float, c_x: float, a0w0: float, tp1_err_pct: float = -52.76,
                   tp2_err_pct: float = 26.74, c_p: float = 0.0, v_p: float = 5.0) -> RecoveredConfig:
    """Find (C_i, alpha) for which the GBW-only Tp1/Tp2 errors hit the given percentages.

    Solves the two error equations with a 2-D root finder from several seeds
    and returns the first physically admissible root (C_i > 0, 2X < alpha < 1).
    """
    def errors(c_i, alpha):
        from .models import OscillatorConfig, SensorRC

        cfg = OscillatorConfig(c_i=c_i, alpha=alpha, v_p=v_p, sensor=SensorRC(r_x, c_x))
        raw, avg = gbw_only_periods(cfg, a0w0, c_p)
        ideal = ideal_periods(cfg)
        return (relative_error(raw.tp1, ideal.tp1), relative_error(raw.tp2, ideal.tp2),
                relative_error(avg.t1, ideal.tp1), relative_error(avg.t2, ideal.tp2))

    def residual(p):
        c_i, alpha = p[0] * 1e-12, p[1]
        if c_i <= 0 or not 2 * c_x / c_i < alpha < 1:
            return [1e3, 1e3]
        e1, e2, _, _ = errors(c_i, alpha)
        return [e1 - tp1_err_pct, e2 - tp2_err_pct]

    for seed in ((150.0, 0.9), (330.0, 0.5), (100.0, 0.7), (500.0, 0.95), (50.0, 0.8), (1000.0, 0.6)):
        sol = optimize.root(residual, seed, method="hybr", options={"xtol": 1e-13})
        if sol.success and max(abs(r) for r in residual(sol.x)) < 1e-8:
            c_i, alpha = float(sol.x[0]) * 1e-12, float(sol.x[1])
            return RecoveredConfig(c_i, alpha, *(float(e) for e in errors(c_i, alpha)))
    raise NoConvergenceError("no admissible (C_i, alpha) reproduces the requested error pair",
                             tp1_err_pct=tp1_err_pct, tp2_err_pct=tp2_err_pct)


def profile_gbw_only(profile_or_a0w0, c_p: float = 0.0) -> NonIdealityProfile:
    """A profile with only the GBW effect enabled, either from a profile or an A0w0 value."""
    if isinstance(profile_or_a0w0, NonIdealityProfile):
        return profile_or_a0w0.with_effects({Effect.GBW})
    from .models import OpAmpModel

    op = OpAmpModel("GBW", gbw_hz=profile_or_a0w0 / (2 * math.pi), slew_rate=math.inf, v_offset=0.0,
                    i_bias=0.0, c_parasitic=c_p, delay_lh=0.0, delay_hl=0.0)
    return NonIdealityProfile(op, op, enabled_effects={Effect.GBW})
