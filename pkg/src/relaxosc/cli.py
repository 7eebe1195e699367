"""``relaxosc`` command-line front end.

Subcommands: ``periods``, ``transient``, ``sweep``, ``design``, ``catalog``,
``estimate``. Output is CSV (default) or JSON with SI units in the column
names; errors go to stderr as ``error:`` lines and give a nonzero exit code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import analytic, design, measure, transient
from .errors import OscillatorError, ValidationError
from .loader import LoadedConfig, SweepSpec, load, load_catalog, loads, reference_file
from .models import ALL_EFFECTS, AveragedPeriods, Effect, Method, NonIdealityProfile, ensure_valid, lookup
from .units import parse_quantity

EXIT_ERROR = 1


# ---------------------------------------------------------------- output

class Output:
    def __init__(self, fmt: str, out_dir: str | None):
        self.fmt = fmt
        self.out_dir = Path(out_dir) if out_dir else None
        if self.out_dir:
            self.out_dir.mkdir(parents=True, exist_ok=True)

    def table(self, name: str, header: list[str], rows: list[list]) -> None:
        """Write a table to ``<out>/<name>.<fmt>`` or to stdout."""
        text = _render(header, rows, self.fmt)
        if self.out_dir:
            path = self.out_dir / f"{name}.{self.fmt}"
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path}")
        else:
            sys.stdout.write(text)

    def note(self, text: str) -> None:
        print(text, file=sys.stderr)


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "value"):
        return v.value
    return "" if v is None else str(v)


def _render(header, rows, fmt) -> str:
    if fmt == "json":
        data = [{h: (v.value if hasattr(v, "value") else v) for h, v in zip(header, row)} for row in rows]
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([_cell(v) for v in row])
    return buf.getvalue()


# ------------------------------------------------------------- helpers

def _loaded(args) -> LoadedConfig:
    if args.config:
        return load(args.config)
    return loads(reference_file(), "reference.toml")


def _effects(args, loaded: LoadedConfig):
    if getattr(args, "effects", None) is None:
        return loaded.effects
    text = args.effects.strip()
    if text.upper() in ("ALL", ""):
        return ALL_EFFECTS if text else frozenset()
    if text.upper() == "NONE":
        return frozenset()
    try:
        return frozenset(Effect(e.strip().upper()) for e in text.split(","))
    except ValueError:
        raise ValueError(f"unknown effect in {text!r}; known: {', '.join(e.value for e in Effect)}") from None


def _profile(args, loaded: LoadedConfig) -> NonIdealityProfile:
    if getattr(args, "ideal", False) or getattr(args, "near_ideal", False):
        return NonIdealityProfile.ideal()
    name = args.opamp or loaded.opamp
    if name is None:
        return NonIdealityProfile.ideal()
    return loaded.profile(name, _effects(args, loaded))


def _pct(value, ref):
    return analytic.relative_error(value, ref)


# ------------------------------------------------------------- commands

def cmd_periods(args, out: Output) -> int:
    loaded = _loaded(args)
    cfg = loaded.config
    profile = _profile(args, loaded)
    ensure_valid(cfg, profile)

    if args.recover_config:
        op = lookup(args.opamp or loaded.opamp or "OPA177", loaded.catalog)
        rec = analytic.recover_config(cfg.r_x, cfg.c_x, op.a0w0, args.tp1_err, args.tp2_err, v_p=cfg.v_p)
        out.table("recovered_config", ["opamp", "c_i_f", "alpha", "tp1_err_pct", "tp2_err_pct", "t1_err_pct", "t2_err_pct"],
                  [[op.name, rec.c_i, rec.alpha, rec.tp1_err_pct, rec.tp2_err_pct, rec.t1_err_pct, rec.t2_err_pct]])
        return 0

    ideal = analytic.ideal_periods(cfg)
    raw = analytic.nonideal_periods(cfg, profile)
    avg = analytic.averaged_periods(cfg, profile)
    gb = analytic.gamma(cfg, profile)
    sl = analytic.integrator_slope(cfg, profile)
    rows = []
    for name, ref, val in (("tp1", ideal.tp1, raw.tp1), ("tp2", ideal.tp2, raw.tp2),
                           ("tp3", ideal.tp3, raw.tp3), ("tp4", ideal.tp4, raw.tp4),
                           ("t1", ideal.tp1, avg.t1), ("t2", ideal.tp2, avg.t2),
                           ("period", ideal.total, raw.total)):
        rows.append([name, "s", ref, val, _pct(val, ref)])
    rows.append(["t_offset_skew", "s", 0.0, avg.t_offset_skew, None])
    rows.append(["gamma", "", 0.0, gb.gamma, None])
    rows.append(["slope_reduction", "", 1.0, gb.slope_reduction, None])
    rows.append(["loop_gain_product", "", math.inf, gb.loop_gain_product, None])
    ideal_slope = cfg.v_p / cfg.time_constant
    rows.append(["sl_plus", "V/s", ideal_slope, sl.sl_plus, _pct(sl.sl_plus, ideal_slope)])
    rows.append(["sl_minus", "V/s", ideal_slope, sl.sl_minus, _pct(sl.sl_minus, ideal_slope)])
    out.table("periods", ["quantity", "unit", "ideal", "value", "error_pct"], rows)
    if profile.assumed:
        out.note("assumed zero: " + ", ".join(profile.assumed))
    return 0


def cmd_transient(args, out: Output) -> int:
    loaded = _loaded(args)
    cfg = loaded.config
    profile = _profile(args, loaded)
    opts = transient.SimOptions(cycles=args.cycles, method=args.method)
    w = transient.simulate(cfg, profile, opts)
    cycles = transient.extract_periods(w, opts)
    if args.dump_waveforms:
        target = out.out_dir or Path(".")
        transient.write_waveforms_csv(w, target / "waveforms.csv")
        transient.write_events_csv(w.events, target / "events.csv")
        out.note(f"wrote {target / 'waveforms.csv'} and {target / 'events.csv'}")
    out.table("transient_cycles", ["cycle_index", "tp1_s", "tp2_s", "tp3_s", "tp4_s"],
              [[i, *p.as_tuple()] for i, p in enumerate(cycles)])
    ref = analytic.nonideal_periods(cfg, profile)
    rows = []
    for k, name in enumerate(("tp1", "tp2", "tp3", "tp4")):
        a = ref.as_tuple()[k]
        worst = max(abs(p.as_tuple()[k] - a) / a for p in cycles)
        mean = sum(p.as_tuple()[k] for p in cycles) / len(cycles)
        rows.append([name, a, mean, 100.0 * worst])
    if not out.out_dir:
        sys.stdout.write("\n")
    out.table("transient_deltas", ["quantity", "analytic_s", "transient_mean_s", "max_delta_pct"], rows)
    return 0


SWEEP_COLUMNS = ["rx_ohm", "cx_f", "opamp", "mode", "rx_est_ohm", "cx_est_f", "rx_err_pct", "cx_err_pct",
                 "rx_err_transient_pct", "cx_err_transient_pct", "error"]
SUMMARY_COLUMNS = ["opamp", "mode", "worst_rx_err_pct", "worst_cx_err_pct", "failed_points"]


def _estimate(mode: Method, raw, cfg, profile, avg=None):
    avg = measure.single_cycle_average(raw) if avg is None else avg
    if mode is Method.IDEAL_INV:
        return analytic.estimate_ideal(raw.tp1, raw.tp2, cfg.alpha, cfg.c_i, allow_negative=True)
    if mode is Method.IDEAL_INV_AVG:
        return analytic.estimate_ideal(avg.t1, avg.t2, cfg.alpha, cfg.c_i, averaged=True, allow_negative=True)
    if mode is Method.COMPENSATED:
        return analytic.estimate_compensated(raw, cfg, profile, allow_negative=True)
    return analytic.estimate_compensated(avg, cfg, profile, allow_negative=True)


def _sweep_point(task):
    loaded, opamp, r_x, c_x, modes, quantize_on, with_transient = task
    cfg = loaded.config.with_sensor(r_x, c_x)
    rows = []
    try:
        profile = loaded.profile(opamp, loaded.effects)
        ensure_valid(cfg, profile)
        raw = analytic.nonideal_periods(cfg, profile)
        avg = analytic.averaged_periods(cfg, profile)
        if quantize_on:
            raw = measure.quantize([raw], loaded.timer)[0]
            avg = measure.single_cycle_average(raw)
        sim = None
        if with_transient:
            sim = transient.simulate_periods(cfg, profile, transient.SimOptions(cycles=1))[0]
    except (OscillatorError, ValueError) as exc:
        return [[r_x, c_x, opamp, m, None, None, None, None, None, None, _err_text(exc)] for m in modes]
    for mode in modes:
        try:
            est = _estimate(mode, raw, cfg, profile, avg)
            row = [r_x, c_x, opamp, mode, est.r_x_est, est.c_x_est,
                   _pct(est.r_x_est, r_x), _pct(est.c_x_est, c_x), None, None, ""]
            if sim is not None:
                st = _estimate(mode, sim, cfg, profile)
                row[8], row[9] = _pct(st.r_x_est, r_x), _pct(st.c_x_est, c_x)
        except (OscillatorError, ValueError) as exc:
            row = [r_x, c_x, opamp, mode, None, None, None, None, None, None, _err_text(exc)]
        rows.append(row)
    return rows


def _err_text(exc) -> str:
    return str(exc) if isinstance(exc, OscillatorError) else f"ERROR: {exc}"


def run_sweep(loaded: LoadedConfig, spec: SweepSpec, *, with_transient: bool = False, workers: int = 1):
    """Evaluate every (opamp, R_x, C_x) point; rows come back in grid order whatever ``workers`` is."""
    opamps = spec.opamps or tuple(op.name for op in loaded.catalog)
    if not opamps:
        from .errors import EmptyCatalogError

        raise EmptyCatalogError("no op-amps to sweep")
    tasks = [(loaded, op, rx, cx, spec.modes, spec.quantize, with_transient)
             for op in opamps for rx in spec.rx_values for cx in spec.cx_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        chunks = [_sweep_point(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    summary = []
    for op in opamps:
        for mode in spec.modes:
            sel = [r for r in rows if r[2] == op and r[3] == mode]
            ok = [r for r in sel if not r[10]]
            summary.append([op, mode,
                            max((abs(r[6]) for r in ok), default=None),
                            max((abs(r[7]) for r in ok), default=None),
                            len(sel) - len(ok)])
    return rows, summary


def cmd_sweep(args, out: Output) -> int:
    loaded = _loaded(args)
    spec = loaded.sweep
    if args.opamp:
        spec = replace(spec, opamps=tuple(args.opamp.split(",")))
    if args.quantize:
        spec = replace(spec, quantize=True)
    rows, summary = run_sweep(loaded, spec, with_transient=args.transient, workers=args.workers)
    out.table("sweep", SWEEP_COLUMNS, rows)
    if not out.out_dir:
        sys.stdout.write("\n")
    out.table("sweep_summary", SUMMARY_COLUMNS, summary)
    if args.plot:
        _plot_summary(summary, out)
    return 0


def _plot_summary(summary, out: Output) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        out.note("matplotlib not installed; skipping plot (pip install 'artifact[plot]')")
        return
    matplotlib.rcParams["svg.hashsalt"] = "relaxosc"
    opamps = list(dict.fromkeys(r[0] for r in summary))
    modes = list(dict.fromkeys(r[1] for r in summary))
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(1, len(modes))
    for j, mode in enumerate(modes):
        vals = [next((r[3] or 0.0) for r in summary if r[0] == op and r[1] == mode) for op in opamps]
        ax.bar([i + j * width for i in range(len(opamps))], vals, width, label=mode.value)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(opamps))], opamps)
    ax.set_ylabel("worst |C_x error| (%)")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    target = (out.out_dir or Path(".")) / "sweep_worst_cx.svg"
    fig.savefig(target, format="svg", metadata={"Date": None})
    plt.close(fig)
    out.note(f"wrote {target}")


def cmd_design(args, out: Output) -> int:
    loaded = _loaded(args)
    catalog = load_catalog(args.catalog) if args.catalog else loaded.catalog
    if args.opamp:
        catalog = tuple(lookup(n, catalog) for n in args.opamp.split(","))
    req = loaded.requirements
    if args.epsilon is not None:
        req = replace(req, epsilon_pct=args.epsilon)
    report = design.select_components(req, catalog, gbw_in_hz=args.gbw_hz)
    if args.gbw_hz:
        out.note("note: GBW read in Hz (non-default)")
    if out.fmt == "csv" and not out.out_dir and args.text:
        print(design.report_text(report))
        return 0
    out.table("design", design.REPORT_COLUMNS, design.report_rows(report))
    if not out.out_dir:
        sys.stdout.write("\n")
    out.table("design_ranking", ["rank", "part", "verdict", "composite_margin", "causes"],
              [[i + 1, p.part, "PASS" if p.passed else "FAIL", p.composite_margin, ";".join(p.causes)]
               for i, p in enumerate(report.parts)])
    return 0


def cmd_catalog(args, out: Output) -> int:
    loaded = _loaded(args)
    catalog = load_catalog(args.catalog) if getattr(args, "catalog", None) else loaded.catalog
    rows = [[op.name, op.gbw_hz, op.a0w0, op.slew_rate, op.v_offset, op.i_bias, op.c_parasitic,
             op.delay_lh, op.delay_hl, ";".join(op.missing)] for op in catalog]
    out.table("catalog", ["name", "gbw_hz", "a0w0_rad_s", "slew_rate_v_s", "v_offset_v", "i_bias_a",
                          "c_parasitic_f", "delay_lh_s", "delay_hl_s", "unspecified"], rows)
    return 0


def cmd_estimate(args, out: Output) -> int:
    loaded = _loaded(args)
    cfg = loaded.config
    profile = _profile(args, loaded)
    tp = [parse_quantity(v, "s") if v is not None else None for v in (args.tp1, args.tp2, args.tp3, args.tp4)]
    mode = Method(args.method.upper())
    from .models import PeriodSet

    if mode.averaged:
        if tp[2] is None or tp[3] is None:
            raise ValueError("averaged methods need --tp3 and --tp4")
        periods = PeriodSet(*tp)
    else:
        periods = PeriodSet(tp[0], tp[1], tp[2] if tp[2] is not None else tp[0], tp[3] if tp[3] is not None else tp[1])
    if args.timer:
        periods = measure.quantize([periods], loaded.timer, args.seed)[0]
    est = _estimate(mode, periods, cfg, profile)
    if est.c_x_est < 0:
        from .errors import NegativeEstimateError

        raise NegativeEstimateError(f"C_x estimate {est.c_x_est:.6g} F < 0", c_x=est.c_x_est)
    out.table("estimate", ["rx_est_ohm", "cx_est_f", "method", "iterations"],
              [[est.r_x_est, est.c_x_est, est.method, est.iterations]])
    return 0


# --------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="FILE", default=d, help="TOML or JSON configuration file")
    p.add_argument("--opamp", metavar="NAME", default=d, help="catalog op-amp (overrides [profile].opamp)")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0, help="RNG seed (jitter)")
    p.add_argument("--out", metavar="DIR", default=d, help="write tables into DIR instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS if suppress else "csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaxosc", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("periods", help="closed-form periods, errors vs ideal, gamma and slopes")
    _common(p, suppress=True)
    p.add_argument("--ideal", action="store_true", help="disable every non-ideality")
    p.add_argument("--effects", help="comma list of GBW,SLEW,OFFSET,BIAS,ZCD_OFFSET,DELAYS, or ALL/NONE")
    p.add_argument("--recover-config", action="store_true",
                   help="fit (C_i, alpha) so the GBW-only tp1/tp2 errors hit --tp1-err/--tp2-err")
    p.add_argument("--tp1-err", type=float, default=-52.76, help="target tp1 error in %% (default -52.76)")
    p.add_argument("--tp2-err", type=float, default=26.74, help="target tp2 error in %% (default 26.74)")
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("transient", help="time-domain simulation and comparison with the closed forms")
    _common(p, suppress=True)
    p.add_argument("--near-ideal", action="store_true", help="ideal profile (GBW surrogate 1e12 rad/s)")
    p.add_argument("--effects")
    p.add_argument("--cycles", type=int, default=3)
    p.add_argument("--method", choices=("exact", "radau"), default="exact")
    p.add_argument("--dump-waveforms", action="store_true", help="write waveforms.csv and events.csv")
    p.set_defaults(func=cmd_transient)

    p = sub.add_parser("sweep", help="estimation error over the R_x x C_x grid for each op-amp and mode")
    _common(p, suppress=True)
    p.add_argument("--transient", action="store_true", help="add errors from simulated periods")
    p.add_argument("--quantize", action="store_true", help="quantize periods with the [timer] model")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot", action="store_true", help="write a worst-case SVG bar chart (needs matplotlib)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("design", help="component-selection report")
    _common(p, suppress=True)
    p.add_argument("--catalog", metavar="FILE", help="catalog file replacing the configured catalog")
    p.add_argument("--epsilon", type=float, help="error budget in percent")
    p.add_argument("--gbw-hz", action="store_true", help="read GBW in Hz instead of rad/s (non-default)")
    p.add_argument("--text", action="store_true", help="human-readable table")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("catalog", help="list the op-amp catalog")
    _common(p, suppress=True)
    p.add_argument("--catalog", metavar="FILE")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("estimate", help="recover R_x and C_x from measured periods")
    _common(p, suppress=True)
    p.add_argument("--tp1", required=True)
    p.add_argument("--tp2", required=True)
    p.add_argument("--tp3")
    p.add_argument("--tp4")
    p.add_argument("--method", default="IDEAL_INV", choices=[m.value for m in Method] + [m.value.lower() for m in Method])
    p.add_argument("--effects")
    p.add_argument("--timer", action="store_true", help="quantize the periods with the [timer] model first")
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = Output(args.format, args.out)
        return args.func(args, out)
    except ValidationError as exc:
        for v in exc.violations:
            print(f"error: {v.code}: {v.field}={v.value!r}: {v.message}", file=sys.stderr)
        return EXIT_ERROR
    except OscillatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KeyError as exc:
        print(f"error: UNKNOWN_PART: {exc.args[0]}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: INVALID_ARGUMENT: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
