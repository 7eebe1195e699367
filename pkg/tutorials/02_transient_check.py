"""Simulate the loop in the time domain and line the edges up against the closed forms."""

from relaxosc import NonIdealityProfile, lookup, nonideal_periods, reference_config, simulate
from relaxosc.transient import extract_periods

cfg = reference_config()

w = simulate(cfg)    # ideal parts, GBW surrogate 1e12 rad/s
print("events logged:", len(w.events))
for p in extract_periods(w):
    print("cycle (us):", [round(t * 1e6, 5) for t in p.as_tuple()])

# With a real op-amp the simulated half-cycles stay equal, since the circuit has no preferred sign.
# The closed forms split them by gamma instead, and their mean also drops a small 1/G term.
prof = NonIdealityProfile.from_opamp(lookup("OPA177"), {"GBW"})
sim = extract_periods(simulate(cfg, prof))[0]
closed = nonideal_periods(cfg, prof)
print("simulated tp1, tp3 (us):", round(sim.tp1 * 1e6, 4), round(sim.tp3 * 1e6, 4))
print("closed-form tp1, tp3 (us):", round(closed.tp1 * 1e6, 4), round(closed.tp3 * 1e6, 4))
sim_mean, closed_mean = (sim.tp1 + sim.tp3) / 2, (closed.tp1 + closed.tp3) / 2
print(f"mean (us): simulated {sim_mean * 1e6:.4f}, closed form {closed_mean * 1e6:.4f}, "
      f"gap {100 * (closed_mean - sim_mean) / sim_mean:+.2f} %")
print("tp2 (us): simulated", round(sim.tp2 * 1e6, 4), "closed form", round((closed.tp2 + closed.tp4) / 2e-6, 4))
