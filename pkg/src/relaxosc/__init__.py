"""Models of a relaxation-oscillator readout for parallel R-C sensors.

Closed-form periods and inversions live in :mod:`relaxosc.analytic`, the
time-domain oracle in :mod:`relaxosc.transient`, readout emulation in
:mod:`relaxosc.measure` and component-selection checks in
:mod:`relaxosc.design`.
"""

from .analytic import (
    GammaBreakdown,
    SlopeResult,
    averaged_periods,
    conventional_period,
    estimate_compensated,
    estimate_ideal,
    gamma,
    gbw_only_periods,
    ideal_periods,
    integrator_slope,
    nonideal_periods,
    recover_config,
    relative_error,
)
from .design import DesignRequirements, select_components
from .errors import OscillatorError, ValidationError
from .measure import MeasurementSeries, Statistics, TimerModel, estimate_pipeline, quantize, single_cycle_average, statistics
from .models import (
    ALL_EFFECTS,
    AveragedPeriods,
    ComparatorModel,
    Effect,
    Method,
    NonIdealityProfile,
    OpAmpModel,
    OscillatorConfig,
    PeriodSet,
    SensorEstimate,
    SensorRC,
    builtin_catalog,
    lookup,
    reference_config,
    validate,
)
from .transient import SimOptions, Waveforms, extract_periods, simulate, simulate_periods

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
