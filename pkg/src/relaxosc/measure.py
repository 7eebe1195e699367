"""Readout emulation: timer capture, single-cycle averaging, estimation and statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .analytic import estimate_compensated, estimate_ideal
from .errors import InsufficientSamplesError, TimerOverflowError
from .models import AveragedPeriods, Method, NonIdealityProfile, OscillatorConfig, PeriodSet, SensorEstimate

DEFAULT_SERIES_LENGTH = 1000


@dataclass(frozen=True)
class TimerModel:
    """Free-running capture timer (default: 16 MHz, 16 bit)."""

    clock_hz: float = 16e6
    bit_width: int = 16
    capture_jitter_rms: float = 0.0

    def __post_init__(self):
        if not self.clock_hz > 0:
            raise ValueError("clock_hz must be > 0")
        if not 8 <= self.bit_width <= 64:
            raise ValueError("bit_width must be in [8, 64]")
        if self.capture_jitter_rms < 0:
            raise ValueError("capture_jitter_rms must be >= 0")

    @property
    def lsb(self) -> float:
        return 1.0 / self.clock_hz

    @property
    def max_count(self) -> int:
        return (1 << self.bit_width) - 1

    @property
    def max_period(self) -> float:
        return self.max_count / self.clock_hz


def _on_lattice(x: float) -> bool:
    # a period that is an exact multiple of the LSB may land one ulp off it
    return abs(x - round(x)) <= 1e-9 * max(1.0, abs(x))


def _counts(x: float) -> int:
    return int(round(x)) if _on_lattice(x) else math.floor(x)


def quantize(periods: Sequence[PeriodSet], timer: TimerModel | None = None, seed: int | None = None) -> list[PeriodSet]:
    """Replace each sub-period by ``floor(period*clock + jitter*clock)/clock``."""
    timer = TimerModel() if timer is None else timer
    rng = np.random.default_rng(seed)
    out = []
    for p in periods:
        vals = []
        for v in p.as_tuple():
            if v > timer.max_period + 0.5 * timer.lsb:
                raise TimerOverflowError(
                    f"period {v:.9g} s exceeds the timer range {timer.max_period:.9g} s",
                    period=v, max_period=timer.max_period)
            jitter = rng.normal(0.0, timer.capture_jitter_rms) if timer.capture_jitter_rms > 0 else 0.0
            x = v * timer.clock_hz + jitter * timer.clock_hz
            n = _counts(x)
            if n > timer.max_count:
                raise TimerOverflowError(
                    f"period {v:.9g} s needs {n} counts, more than {timer.max_count}",
                    period=v, max_period=timer.max_period)
            if jitter == 0.0 and _on_lattice(x):
                vals.append(v)          # a whole number of ticks is passed through untouched
            else:
                vals.append(max(n, 0) / timer.clock_hz)
        out.append(PeriodSet(*vals))
    return out


def single_cycle_average(p: PeriodSet) -> AveragedPeriods:
    return AveragedPeriods((p.tp1 + p.tp3) / 2, (p.tp2 + p.tp4) / 2, (p.tp3 - p.tp1) / 2)


def multi_cycle_mean(periods: Sequence[PeriodSet]) -> PeriodSet:
    """Mean sub-periods over several cycles. Reduces noise only; offset bias is untouched."""
    if not periods:
        raise InsufficientSamplesError("no cycles to average")
    arr = np.array([p.as_tuple() for p in periods])
    return PeriodSet(*(float(v) for v in arr.mean(axis=0)))


@dataclass(frozen=True)
class MeasurementSeries:
    samples: tuple[float, ...]
    unit: str = ""

    def __init__(self, samples: Iterable[float], unit: str = ""):
        object.__setattr__(self, "samples", tuple(float(s) for s in samples))
        object.__setattr__(self, "unit", unit)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class Statistics:
    mean: float
    sd: float
    snr_db: float
    zero_variance: bool


def statistics(series) -> Statistics:
    """Sample mean, SD with ``M-1`` normalisation and ``SNR = 10 log10(sum S^2 / sum (S - mean)^2)``.

    A constant series has no defined SNR; it is returned as ``inf`` with
    ``zero_variance`` set.
    """
    s = series.samples if isinstance(series, MeasurementSeries) else tuple(float(v) for v in series)
    m = len(s)
    if m < 2:
        raise InsufficientSamplesError(f"need at least 2 samples, got {m}", samples=m)
    mean = math.fsum(s) / m
    ss_dev = math.fsum((v - mean) ** 2 for v in s)
    sd = math.sqrt(ss_dev / (m - 1))
    if ss_dev == 0:
        return Statistics(mean, 0.0, math.inf, True)
    snr = 10.0 * math.log10(math.fsum(v * v for v in s) / ss_dev)
    return Statistics(mean, sd, snr, False)


@dataclass(frozen=True)
class PipelineResult:
    periods: tuple[PeriodSet, ...]          # after optional quantization
    averaged: tuple[AveragedPeriods, ...]
    estimates: tuple[SensorEstimate, ...]
    mode: Method

    @property
    def r_x_series(self) -> MeasurementSeries:
        return MeasurementSeries((e.r_x_est for e in self.estimates), "ohm")

    @property
    def c_x_series(self) -> MeasurementSeries:
        return MeasurementSeries((e.c_x_est for e in self.estimates), "F")


def estimate_pipeline(periods: Sequence[PeriodSet], config: OscillatorConfig, profile: NonIdealityProfile,
                      mode: Method | str = Method.IDEAL_INV_AVG, timer: TimerModel | None = None,
                      seed: int | None = None) -> PipelineResult:
    """Per cycle: optional quantization, optional single-cycle averaging, then inversion."""
    mode = Method(mode)
    if not periods:
        raise InsufficientSamplesError("no cycles supplied")
    used = quantize(periods, timer, seed) if timer is not None else list(periods)
    averaged = [single_cycle_average(p) for p in used]
    estimates = []
    for p, a in zip(used, averaged):
        if mode is Method.IDEAL_INV:
            est = estimate_ideal(p.tp1, p.tp2, config.alpha, config.c_i)
        elif mode is Method.IDEAL_INV_AVG:
            est = estimate_ideal(a.t1, a.t2, config.alpha, config.c_i, averaged=True)
        elif mode is Method.COMPENSATED:
            est = estimate_compensated(p, config, profile)
        else:
            est = estimate_compensated(a, config, profile)
        estimates.append(est)
    return PipelineResult(tuple(used), tuple(averaged), tuple(estimates), mode)


def repeated_cycles(period: PeriodSet, count: int = DEFAULT_SERIES_LENGTH) -> list[PeriodSet]:
    """A noiseless run of ``count`` identical cycles, to be quantized with jitter."""
    return [period] * count


SERIES_COLUMNS = ["cycle_index", "tp1_s", "tp2_s", "tp3_s", "tp4_s", "t1_s", "t2_s", "rx_est_ohm", "cx_est_f", "method"]


def series_rows(result: PipelineResult) -> list[list]:
    rows = []
    for i, (p, a, e) in enumerate(zip(result.periods, result.averaged, result.estimates)):
        rows.append([i, *p.as_tuple(), a.t1, a.t2, e.r_x_est, e.c_x_est, e.method.value])
    return rows


def write_series_csv(result: PipelineResult, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(SERIES_COLUMNS)
        for row in series_rows(result):
            wr.writerow([row[0], *(repr(float(v)) for v in row[1:9]), row[9]])
