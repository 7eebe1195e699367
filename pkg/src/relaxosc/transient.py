"""Time-domain oracle for the integrator / Schmitt trigger / ZCD / XOR loop.

State variables are the integrator output ``V_R`` and the inverting-node
voltage ``e``. The op-amp is a single-pole integrator
``dV_R/dt = clamp(A0w0 * (V+ - e), -SR, SR)`` with its non-inverting input at
``V+ = -V_os`` and the bias current ``i_b`` flowing into the inverting node.
KCL at that node couples ``R_x`` and ``C_x`` (to ``V_x``), ``C_i`` (to ``V_R``)
and ``C_p`` (to ground), so with ``C_t = C_x + C_i + C_p``::

    C_t de/dt = (V_x - e)/R_x + i_b + C_i dV_R/dt

When ``V_x`` steps, charge conservation at the node moves ``e`` by
``C_x * dV_x / C_t`` while ``V_R`` stays continuous; the charge-transfer step
of ``V_R`` then follows from the op-amp's own dynamics.

The default ``method="exact"`` propagates the piecewise-linear system in
closed form: between events each op-amp mode (linear, slewing up, slewing
down) has an exponential solution, and threshold crossings are bracketed on
monotone pieces and refined with Brent's method. This stays accurate at
``A0w0 = 1e12`` rad/s where an explicit integrator would need picosecond
steps. ``method="radau"`` integrates the same equations with
``scipy.integrate.solve_ivp`` and is meant for cross-checking at moderate GBW.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import InsufficientCyclesError, MisorderedEdgesError, NoOscillationError, SolverFailureError
from .models import Effect, NonIdealityProfile, OscillatorConfig, PeriodSet

SCHMITT, ZCD, XOR = "SCHMITT", "ZCD", "XOR"
RISE, FALL = "RISE", "FALL"

_LINEAR, _SLEW_UP, _SLEW_DOWN = 0, 1, -1


@dataclass(frozen=True)
class SimOptions:
    """Solver settings. ``max_time=None`` picks a horizon from the expected period."""

    max_time: float | None = None
    max_step: float | None = None
    event_tolerance: float = 1e-12
    rel_tol: float = 1e-9
    abs_tol: float = 1e-6
    settle_cycles: int = 1
    cycles: int = 3
    method: str = "exact"
    ideal_gbw: float = 1e12        # A0w0 (rad/s) used when the GBW effect is off
    samples_per_segment: int = 8
    max_events: int = 1_000_000

    def __post_init__(self):
        if self.settle_cycles < 1:
            raise ValueError("settle_cycles must be >= 1")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if not self.event_tolerance > 0:
            raise ValueError("event_tolerance must be > 0")
        if self.method not in ("exact", "radau"):
            raise ValueError(f"method must be 'exact' or 'radau', got {self.method!r}")


@dataclass(frozen=True)
class EdgeEvent:
    """One output transition. For XOR edges ``cause`` names the input edge that produced it."""

    time: float
    source: str
    edge: str
    cause: tuple[str, str] | None = None


@dataclass(frozen=True)
class _Circuit:
    r_x: float
    c_x: float
    c_i: float
    c_t: float
    a: float        # A0w0 in rad/s
    sr: float
    v_plus: float
    i_b: float
    v_p: float
    alpha: float
    v_oz: float
    tau_s_lh: float
    tau_s_hl: float
    tau_z_lh: float
    tau_z_hl: float
    tau_p: float

    @classmethod
    def build(cls, config: OscillatorConfig, profile: NonIdealityProfile, options: SimOptions) -> "_Circuit":
        a = profile.a0w0 if profile.enabled(Effect.GBW) else options.ideal_gbw
        c_p = profile.c_p
        return cls(
            r_x=config.r_x, c_x=config.c_x, c_i=config.c_i, c_t=config.c_x + config.c_i + c_p,
            a=a, sr=profile.slew_rate, v_plus=-profile.v_os, i_b=profile.i_b,
            v_p=config.v_p, alpha=config.alpha, v_oz=profile.v_oz,
            tau_s_lh=profile.tau_s_lh, tau_s_hl=profile.tau_s_hl,
            tau_z_lh=profile.tau_z_lh, tau_z_hl=profile.tau_z_hl,
            tau_p=profile.xor_delay(config),
        )

    def e_linear_steady(self, vx: float) -> float:
        b_raw = 1.0 / self.r_x + self.c_i * self.a
        return self.v_plus - (self.v_plus / self.r_x - vx / self.r_x - self.i_b) / b_raw


# ------------------------------------------------------------- exact pieces

class _LinearPiece:
    """Op-amp in its linear region: e relaxes exponentially, V_R = integral of A(V+ - e)."""

    mode = _LINEAR

    def __init__(self, c: _Circuit, e0: float, vr0: float, vx: float):
        b_raw = 1.0 / c.r_x + c.c_i * c.a
        self.b = b_raw / c.c_t
        gap = (c.v_plus / c.r_x - vx / c.r_x - c.i_b) / b_raw    # V+ - e_inf
        self.e_inf = c.v_plus - gap
        self.rate_inf = c.a * gap
        self.d = e0 - self.e_inf          # transient amplitude in e
        self.k = c.a * self.d             # transient amplitude in rate
        self.vr0 = vr0
        self.c = c

    def e(self, t):
        return self.e_inf + self.d * np.exp(-self.b * t)

    def vr(self, t):
        return self.vr0 + self.rate_inf * t + (self.k / self.b) * np.expm1(-self.b * t)

    def rate(self, t):
        return self.rate_inf - self.k * np.exp(-self.b * t)

    def turning_points(self, horizon: float) -> list[float]:
        if self.k == 0 or self.rate_inf == 0:
            return []
        ratio = self.k / self.rate_inf
        if ratio <= 1:
            return []
        t = math.log(ratio) / self.b
        return [t] if 0 < t < horizon else []

    def exit_time(self) -> float:
        sr = self.c.sr
        if math.isinf(sr) or self.k == 0:
            return math.inf
        best = math.inf
        r0 = self.rate_inf - self.k
        for bound in (sr, -sr):
            # the rate moves monotonically from r0 to rate_inf; a bound it starts
            # on (just left slew) or never reaches is not an exit
            if abs(r0 - bound) <= 1e-9 * sr or (r0 - bound) * (self.rate_inf - bound) >= 0:
                continue
            ex = (self.rate_inf - bound) / self.k
            if 0 < ex < 1:
                best = min(best, -math.log(ex) / self.b)
        return best


class _SlewPiece:
    """Op-amp output slewing at ``s*SR``; e relaxes with time constant R_x C_t."""

    def __init__(self, c: _Circuit, e0: float, vr0: float, vx: float, s: int):
        self.mode = s
        self.s = s
        self.b = 1.0 / (c.r_x * c.c_t)
        self.e_inf = vx + c.r_x * (c.i_b + c.c_i * s * c.sr)
        self.d = e0 - self.e_inf
        self.vr0 = vr0
        self.slope = s * c.sr
        self.c = c

    def e(self, t):
        return self.e_inf + self.d * np.exp(-self.b * t)

    def vr(self, t):
        return self.vr0 + self.slope * np.asarray(t, dtype=float) if isinstance(t, np.ndarray) else self.vr0 + self.slope * t

    def rate(self, t):
        return self.slope + 0.0 * np.asarray(t, dtype=float) if isinstance(t, np.ndarray) else self.slope

    def turning_points(self, horizon: float) -> list[float]:
        return []

    def exit_time(self) -> float:
        # leaves slew when the demanded rate A(V+ - e) falls back to s*SR
        e_b = self.c.v_plus - self.s * self.c.sr / self.c.a
        num, den = self.d, e_b - self.e_inf
        if den == 0 or num == 0:
            return math.inf
        q = num / den
        if q <= 1:
            return math.inf
        return math.log(q) / self.b


def _make_piece(c: _Circuit, e0: float, vr0: float, vx: float):
    """Choose the op-amp mode consistent with the state and its trend."""
    if math.isinf(c.sr):
        return _LinearPiece(c, e0, vr0, vx)
    demand = c.a * (c.v_plus - e0)
    for s in (_SLEW_UP, _SLEW_DOWN):
        if s * demand > c.sr * (1 + 1e-12):
            return _SlewPiece(c, e0, vr0, vx, s)
        if s * demand >= c.sr * (1 - 1e-12):
            piece = _SlewPiece(c, e0, vr0, vx, s)
            # stays slewing iff e keeps moving deeper into the slew region
            if s * (piece.e_inf - e0) < 0:
                return piece
    return _LinearPiece(c, e0, vr0, vx)


# --------------------------------------------------------- radau propagator

class _RadauPiece:
    def __init__(self, sol, t0=0.0):
        self.sol = sol
        self.mode = None

    def e(self, t):
        return self.sol(t)[0]

    def vr(self, t):
        return self.sol(t)[1]


@dataclass
class _Segment:
    t0: float
    t1: float
    piece: object
    vx: float

    def state(self, t):
        return float(self.piece.e(t - self.t0)), float(self.piece.vr(t - self.t0))


@dataclass
class Waveforms:
    """Sampled node voltages and the edge log of one simulation run."""

    time: np.ndarray
    v_r: np.ndarray
    v_x: np.ndarray
    v_y: np.ndarray
    v_z: np.ndarray
    events: list[EdgeEvent]
    v_p: float
    c_x: float
    c_i: float
    _segments: list[_Segment] = field(default_factory=list, repr=False)

    def _segment_at(self, t: float) -> _Segment:
        starts = [s.t0 for s in self._segments]
        i = int(np.searchsorted(starts, t, side="right")) - 1
        return self._segments[max(i, 0)]

    def v_r_at(self, t: float) -> float:
        """Integrator output at an arbitrary time (exact, not interpolated from samples)."""
        return self._segment_at(t).state(t)[1]

    def edges(self, source: str) -> list[EdgeEvent]:
        return [ev for ev in self.events if ev.source == source]


# ------------------------------------------------------------------ driver

class _Watch:
    __slots__ = ("name", "threshold", "direction")

    def __init__(self, name, threshold, direction):
        self.name, self.threshold, self.direction = name, threshold, direction


def _first_crossing(piece, watch: _Watch, horizon: float, xtol: float, vtol: float) -> float | None:
    def g(t):
        return watch.direction * (float(piece.vr(t)) - watch.threshold)

    g0 = g(0.0)
    if g0 > vtol:
        return 0.0
    knots = [0.0, *piece.turning_points(horizon), horizon]
    for lo, hi in zip(knots[:-1], knots[1:]):
        glo = g0 if lo == 0.0 else g(lo)
        ghi = g(hi)
        if lo == 0.0 and abs(glo) <= vtol:
            # sitting on the threshold: only a crossing if heading the watched way
            if watch.direction * float(piece.rate(0.0)) > 0 and ghi > 0:
                probe = min(hi, xtol)
                if g(probe) > 0:
                    return 0.0
            if ghi > 0:
                return _root(g, lo, hi, xtol, glo_nonpos=True)
            continue
        if glo <= 0 < ghi:
            return _root(g, lo, hi, xtol)
    return None


def _root(g, lo, hi, xtol, glo_nonpos=False):
    if glo_nonpos and g(lo) > 0:
        return lo
    t = optimize.brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    # land on the far side so the flipped comparator does not see a re-crossing
    step = xtol
    while g(t) < 0 and t < hi:
        t = min(hi, t + step)
        step *= 2
    return t


class _Engine:
    def __init__(self, config: OscillatorConfig, profile: NonIdealityProfile, options: SimOptions):
        self.c = _Circuit.build(config, profile, options)
        self.opt = options
        self.config = config
        c = self.c
        self.t = 0.0
        self.vx = c.v_p
        self.vr = c.v_p * (c.alpha - 2 * config.x_ratio)
        self.e = c.e_linear_steady(self.vx)
        self.zcd_state = self.vr > c.v_oz       # decided comparator state
        self.vy = c.v_p if self.zcd_state else -c.v_p
        self.vy0_high = self.vy > 0
        self.vz = int((self.vx > 0) != (self.vy > 0))
        self.schmitt_pending = False
        self.pending: list = []
        self.seq = 0
        self.events: list[EdgeEvent] = []
        self._input_times: list[float] = []          # XOR input history for the transport delay
        self._input_states: list[int] = []
        self._cycle_starts = 0
        self.segments: list[_Segment] = []
        self.samples: list[tuple] = []
        self.vtol = 64 * np.finfo(float).eps * max(c.v_p, abs(c.v_oz), 1.0)
        self._record_sample(0.0, self.vr)

    # -- bookkeeping
    def _schedule(self, t, kind, payload):
        heapq.heappush(self.pending, (t, self.seq, kind, payload))
        self.seq += 1

    def _record_sample(self, t, vr):
        row = (t, vr, self.vx, self.vy, self.vz)
        if self.samples and t <= self.samples[-1][0]:
            self.samples[-1] = row
        else:
            self.samples.append(row)

    def _sample_piece(self, piece, t0, dt):
        n = self.opt.samples_per_segment
        if dt <= 0:
            return
        local = list(np.linspace(0.0, dt, n + 1)[1:]) if n > 0 else [dt]
        b = getattr(piece, "b", None)
        if b is not None and b * dt > 10:
            local += [k / b for k in (0.5, 1.0, 2.0, 4.0, 8.0) if k / b < dt]
        local.sort()
        vrs = np.asarray(piece.vr(np.asarray(local)), dtype=float)
        for tl, v in zip(local, vrs):
            self._record_sample(t0 + tl, float(v))

    # -- propagation
    def _watches(self):
        c = self.c
        out = []
        if not self.schmitt_pending:
            if self.vx > 0:
                out.append(_Watch(SCHMITT, -c.alpha * c.v_p, -1))
            else:
                out.append(_Watch(SCHMITT, c.alpha * c.v_p, +1))
        out.append(_Watch(ZCD, c.v_oz, -1 if self.zcd_state else +1))
        return out

    def _advance_exact(self, horizon):
        """Move forward by at most ``horizon``; return (elapsed, watch name or None)."""
        elapsed = 0.0
        for _ in range(64):
            piece = _make_piece(self.c, self.e, self.vr, self.vx)
            remaining = horizon - elapsed
            t_exit = piece.exit_time()
            span = min(remaining, t_exit)
            hit, t_hit = None, None
            for w in self._watches():
                tc = _first_crossing(piece, w, span, self.opt.event_tolerance, self.vtol)
                if tc is not None and (t_hit is None or tc < t_hit):
                    hit, t_hit = w.name, tc
            dt = t_hit if hit is not None else span
            self._commit(piece, dt)
            elapsed += dt
            if hit is not None:
                return elapsed, hit
            if span == remaining:
                return elapsed, None
        raise SolverFailureError("op-amp mode chattering: too many mode changes in one step", t=self.t)

    def _commit(self, piece, dt):
        t0 = self.t
        self._sample_piece(piece, t0, dt)
        self.segments.append(_Segment(t0, t0 + dt, piece, self.vx))
        self.e = float(piece.e(dt))
        self.vr = float(piece.vr(dt))
        self.t = t0 + dt

    def _advance_radau(self, horizon):
        c = self.c
        vx = self.vx
        a, sr = c.a, c.sr

        def rhs(_t, y):
            rate = a * (c.v_plus - y[0])
            if rate > sr:
                rate = sr
            elif rate < -sr:
                rate = -sr
            return [((vx - y[0]) / c.r_x + c.i_b + c.c_i * rate) / c.c_t, rate]

        watches = self._watches()
        funcs = []
        for w in watches:
            def ev(_t, y, w=w):
                return y[1] - w.threshold
            ev.terminal = True
            ev.direction = w.direction
            funcs.append(ev)
        sol = integrate.solve_ivp(
            rhs, (0.0, horizon), [self.e, self.vr], method="Radau", events=funcs,
            rtol=self.opt.rel_tol, atol=[self.opt.abs_tol * 1e-3, self.opt.abs_tol],
            max_step=self.opt.max_step or np.inf, dense_output=True,
        )
        if sol.status == -1:
            raise SolverFailureError(f"Radau integration failed: {sol.message}", t=self.t)
        hit, t_end = None, float(sol.t[-1])
        for w, te in zip(watches, sol.t_events):
            if len(te) and (hit is None or te[0] < t_end):
                hit, t_end = w.name, float(te[0])
        piece = _RadauPiece(sol.sol)
        for tl, vr in zip(sol.t[1:], sol.y[1, 1:]):
            if tl < t_end:
                self._record_sample(self.t + float(tl), float(vr))
        self.segments.append(_Segment(self.t, self.t + t_end, piece, self.vx))
        y = sol.sol(t_end)
        self.e, self.vr = float(y[0]), float(y[1])
        self.t += t_end
        return t_end, hit

    # -- events
    def _on_crossing(self, name):
        c = self.c
        if name == SCHMITT:
            going_high = self.vx < 0
            delay = c.tau_s_lh if going_high else c.tau_s_hl
            self.schmitt_pending = True
            self._schedule(self.t + delay, "vx", c.v_p if going_high else -c.v_p)
        else:
            self.zcd_state = not self.zcd_state
            delay = c.tau_z_lh if self.zcd_state else c.tau_z_hl
            self._schedule(self.t + delay, "vy", c.v_p if self.zcd_state else -c.v_p)

    def _on_pending(self, kind, payload):
        c = self.c
        if kind == "vx":
            dvx = payload - self.vx
            self.vx = payload
            self.e += c.c_x * dvx / c.c_t
            self.schmitt_pending = False
            edge = RISE if dvx > 0 else FALL
            self.events.append(EdgeEvent(self.t, SCHMITT, edge))
            self._log_inputs()
            self._schedule(self.t + c.tau_p, "vz", (SCHMITT, edge))
        elif kind == "vy":
            edge = RISE if payload > self.vy else FALL
            self.vy = payload
            self.events.append(EdgeEvent(self.t, ZCD, edge))
            self._log_inputs()
            self._schedule(self.t + c.tau_p, "vz", (ZCD, edge))
        else:
            # transport-delayed XOR: evaluates the inputs as they were tau_p ago
            new = self._xor_history(self.t - c.tau_p)
            if new != self.vz:
                self.vz = new
                self.events.append(EdgeEvent(self.t, XOR, RISE if new else FALL, payload))
                if payload == (SCHMITT, RISE):
                    self._cycle_starts += 1
        self._record_sample(self.t, self.vr)

    def _log_inputs(self):
        self._input_times.append(self.t)
        self._input_states.append(int((self.vx > 0) != (self.vy > 0)))

    def _xor_history(self, t):
        i = bisect.bisect_right(self._input_times, t)
        if i == 0:
            return int(True != self.vy0_high)
        return self._input_states[i - 1]

    def run(self, t_max, wanted_cycles):
        advance = self._advance_exact if self.opt.method == "exact" else self._advance_radau
        steps = 0
        while self.t < t_max:
            steps += 1
            if steps > self.opt.max_events:
                raise SolverFailureError("event budget exhausted", t=self.t, steps=steps)
            while self.pending and self.pending[0][0] <= self.t:
                _, _, kind, payload = heapq.heappop(self.pending)
                self._on_pending(kind, payload)
            if self._xor_cycle_starts() >= wanted_cycles:
                break
            next_due = self.pending[0][0] if self.pending else math.inf
            horizon = min(next_due, t_max) - self.t
            if horizon <= 0:
                if next_due <= self.t:
                    continue
                break
            _, hit = advance(horizon)
            if hit is not None:
                self._on_crossing(hit)
        return self

    def _xor_cycle_starts(self):
        return self._cycle_starts


def _auto_max_time(config: OscillatorConfig, profile: NonIdealityProfile, options: SimOptions) -> float:
    c_t_ratio = 1.0 + (config.c_x + profile.c_p) / config.c_i
    rc = config.r_x * config.c_i
    sr = profile.slew_rate
    ramp = 4 * rc * config.alpha * 1.5 / max(1e-3, 1 - abs(profile.v_os_total(config.r_x)) / config.v_p)
    slew = 0.0 if math.isinf(sr) else 8 * config.alpha * config.v_p / sr
    gbw = 0.0 if math.isinf(profile.a0w0) else 40 * c_t_ratio / profile.a0w0
    delays = 2 * (profile.tau_s_lh + profile.tau_s_hl + profile.tau_z_lh + profile.tau_z_hl) + 4 * profile.xor_delay(config)
    per_cycle = ramp + slew + gbw + delays
    return 2.0 * per_cycle * (options.settle_cycles + options.cycles + 2)


def simulate(config: OscillatorConfig, profile: NonIdealityProfile | None = None,
             options: SimOptions | None = None) -> Waveforms:
    """Run the loop from ``V_R = V_p(alpha - 2X)``, ``V_x = +V_p`` until enough cycles are logged."""
    from .models import ensure_valid

    profile = NonIdealityProfile.ideal() if profile is None else profile
    options = SimOptions() if options is None else options
    ensure_valid(config, profile)
    t_max = options.max_time if options.max_time is not None else _auto_max_time(config, profile, options)
    eng = _Engine(config, profile, options).run(t_max, options.settle_cycles + options.cycles + 1)
    if not any(ev.source == SCHMITT for ev in eng.events):
        raise NoOscillationError(f"no Schmitt edge within {t_max:.6g} s", max_time=t_max)
    arr = np.asarray(eng.samples, dtype=float)
    return Waveforms(
        time=arr[:, 0], v_r=arr[:, 1], v_x=arr[:, 2], v_y=arr[:, 3], v_z=arr[:, 4].astype(int),
        events=list(eng.events), v_p=config.v_p, c_x=config.c_x, c_i=config.c_i,
        _segments=eng.segments,
    )


_CYCLE_ORDER = [(SCHMITT, RISE), (ZCD, FALL), (SCHMITT, FALL), (ZCD, RISE)]


def extract_periods(w: Waveforms, options: SimOptions | None = None) -> list[PeriodSet]:
    """Split the XOR edge log into (tp1, tp2, tp3, tp4) per cycle.

    A cycle starts at the XOR edge caused by the rising ``V_x`` edge; its four
    segments must be caused by V_x rise, V_y fall, V_x fall and V_y rise in
    that order. The first ``settle_cycles`` complete cycles are dropped.
    """
    options = SimOptions() if options is None else options
    xs = [ev for ev in w.events if ev.source == XOR]
    starts = [i for i, ev in enumerate(xs) if ev.cause == (SCHMITT, RISE)]
    cycles: list[PeriodSet] = []
    for i in starts:
        if i + 4 >= len(xs):
            break
        chunk = xs[i:i + 5]
        causes = [ev.cause for ev in chunk[:4]]
        if causes != _CYCLE_ORDER or chunk[4].cause != (SCHMITT, RISE):
            raise MisorderedEdgesError(
                f"unexpected XOR edge order at t={chunk[0].time:.9g} s: {causes}", time=chunk[0].time)
        times = [ev.time for ev in chunk]
        cycles.append(PeriodSet(*(b - a for a, b in zip(times[:-1], times[1:]))))
    need = options.settle_cycles + 1
    if len(cycles) < need:
        raise InsufficientCyclesError(
            f"only {len(cycles)} complete cycles; at least {need} needed with settle_cycles={options.settle_cycles}",
            cycles=len(cycles))
    return cycles[options.settle_cycles:]


def simulate_periods(config: OscillatorConfig, profile: NonIdealityProfile | None = None,
                     options: SimOptions | None = None) -> list[PeriodSet]:
    options = SimOptions() if options is None else options
    return extract_periods(simulate(config, profile, options), options)


def charge_transfer_steps(w: Waveforms, settle: float | None = None) -> list[float]:
    """Magnitude of the V_R step caused by each V_x transition.

    ``V_R`` at the edge is compared with the ramp extrapolated back from
    ``settle`` seconds later, which removes the ramp's own contribution. The
    default ``settle`` is 1/1000 of the time to the next logged edge, ample at
    high GBW where the step completes in picoseconds.
    """
    out = []
    times = [ev.time for ev in w.events]
    for ev in w.edges(SCHMITT):
        seg_t = ev.time
        dt = settle
        if dt is None:
            later = [t for t in times if t > seg_t]
            if not later:
                break
            dt = 1e-3 * (later[0] - seg_t)
        before = w.v_r_at(seg_t)
        t1, t2 = seg_t + dt, seg_t + 2 * dt
        if t2 > w._segments[-1].t1:
            break
        v1, v2 = w.v_r_at(t1), w.v_r_at(t2)
        slope = (v2 - v1) / dt
        out.append(abs((v1 - slope * dt) - before))
    return out


def write_waveforms_csv(w: Waveforms, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["time_s", "v_r", "v_x", "v_y", "v_z"])
        for row in zip(w.time, w.v_r, w.v_x, w.v_y, w.v_z):
            wr.writerow([repr(float(row[0])), repr(float(row[1])), repr(float(row[2])),
                         repr(float(row[3])), int(row[4])])


def write_events_csv(events: Sequence[EdgeEvent], path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["time_s", "source", "edge"])
        for ev in events:
            wr.writerow([repr(ev.time), ev.source, ev.edge])
