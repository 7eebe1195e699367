"""Quantize periods with a 16 MHz timer, recover the sensor, then pick an op-amp."""

from relaxosc import (
    DesignRequirements,
    Method,
    NonIdealityProfile,
    TimerModel,
    builtin_catalog,
    estimate_pipeline,
    lookup,
    nonideal_periods,
    reference_config,
    select_components,
    statistics,
)
from relaxosc.design import report_text
from relaxosc.measure import repeated_cycles

cfg = reference_config()
prof = NonIdealityProfile.from_opamp(lookup("TL071"))
cycles = repeated_cycles(nonideal_periods(cfg, prof), 200)

timer = TimerModel(capture_jitter_rms=20e-9)
for mode in Method:
    res = estimate_pipeline(cycles, cfg, prof, mode, timer, seed=1)
    s = statistics(res.c_x_series)
    print(f"{mode.value:16s} C_x mean {s.mean * 1e12:7.3f} pF  sd {s.sd * 1e15:7.2f} fF  SNR {s.snr_db:6.1f} dB")

print()
print(report_text(select_components(DesignRequirements(), builtin_catalog())))
