"""Walk through the four sub-periods of the reference sensor and what a slow op-amp does to them.

Run with ``python tutorials/01_periods_and_gbw.py``.
"""

from relaxosc import (
    NonIdealityProfile,
    averaged_periods,
    estimate_ideal,
    ideal_periods,
    lookup,
    nonideal_periods,
    reference_config,
    relative_error,
)

cfg = reference_config()          # 330 kOhm || 33 pF, C_i = 330 pF, alpha = 0.5
ideal = ideal_periods(cfg)
print("ideal sub-periods (us):", [round(t * 1e6, 3) for t in ideal.as_tuple()])

# Only the gain-bandwidth product of the OPA177 switched on
gbw = NonIdealityProfile.from_opamp(lookup("OPA177"), {"GBW"})
raw = nonideal_periods(cfg, gbw)
for name, a, b in zip(("tp1", "tp2", "tp3", "tp4"), raw.as_tuple(), ideal.as_tuple()):
    print(f"{name}: {a * 1e6:8.3f} us  ({relative_error(a, b):+.2f} %)")

# the skew cancels in the two-half-cycle average
avg = averaged_periods(cfg, gbw)
print(f"T1 error {relative_error(avg.t1, ideal.tp1):+.3f} %, T2 error {relative_error(avg.t2, ideal.tp2):+.3f} %")

plain = estimate_ideal(raw.tp1, raw.tp2, cfg.alpha, cfg.c_i, allow_negative=True)
meaned = estimate_ideal(avg.t1, avg.t2, cfg.alpha, cfg.c_i, averaged=True)
print(f"C_x from one half-cycle: {plain.c_x_est * 1e12:.2f} pF")
print(f"C_x from the average:    {meaned.c_x_est * 1e12:.2f} pF")
