"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical
failure.  ``DONORQHO_OUTPUT_DIR`` sets the default directory for files
written by ``sweep`` and ``set-iv``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_scenario
from .device_coupling import coupled_sweep, crossing_voltages
from .hydrogenic import build_donor_model, build_ladder, isolation_check
from .materials import MaterialError, load_material_file, material_at
from .radial_oracle import ConvergenceError
from .set_orthodox import NumericalError, SetParams, bias_sweep, gate_sweep
from .trace_analysis import (
    CURRENT,
    DERIVATIVE,
    InsufficientDataError,
    TraceParseError,
    energy_to_frequency,
    export_trace,
    find_peaks,
    import_trace,
    spacing_stats,
    sweep_summary,
)
from .verification import REFERENCE_COMPOSITIONS, verify_all

OUTPUT_ENV = "DONORQHO_OUTPUT_DIR"

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def _output_dir(explicit: str | None) -> Path:
    path = Path(explicit or os.environ.get(OUTPUT_ENV, "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _material(args):
    if getattr(args, "material_file", None):
        return load_material_file(args.material_file)
    return material_at(args.x)


def cmd_material(args) -> int:
    mat = _material(args)
    _emit(
        args,
        mat.to_dict(),
        [
            f"material       {mat.label}",
            f"x              {mat.x:.4f}",
            f"eps_r          {mat.eps_r:.4f}",
            f"m*/m_e         {mat.m_eff_ratio:.5f}",
        ],
    )
    return EXIT_OK


def cmd_donor(args) -> int:
    mat = _material(args)
    model = build_donor_model(mat)
    iso = isolation_check(model, args.density)
    payload = model.to_dict()
    payload.update(
        {
            "sheet_density_cm-2": args.density,
            "mean_donor_spacing_nm": iso.mean_spacing,
            "isolated": iso.isolated,
            "dE_THz": energy_to_frequency(model.dE),
        }
    )
    _emit(
        args,
        payload,
        [
            f"material             {mat.label} (eps_r={mat.eps_r:.3f}, m*/m_e={mat.m_eff_ratio:.4f})",
            f"E1                   {model.E1:.3f} meV",
            f"R1                   {model.R1:.2f} nm",
            f"R_cloud              {model.R_cloud:.2f} nm",
            f"k                    {model.k_spring:.4e} N/m",
            f"omega0               {model.omega0:.4e} rad/s",
            f"dE                   {model.dE:.2f} meV",
            f"dE/h                 {energy_to_frequency(model.dE):.3f} THz",
            f"donor spacing        {iso.mean_spacing:.2f} nm at {args.density:.3g} cm^-2 "
            f"({'isolated' if iso.isolated else 'not isolated'}, 2*R1 = {2 * model.R1:.2f} nm)",
        ],
    )
    return EXIT_OK


def cmd_ladder(args) -> int:
    model = build_donor_model(_material(args))
    ladder = build_ladder(model, args.n_levels)
    lines = [f"dE = {ladder.dE:.3f} meV", "level  energy_meV"]
    lines += [f"{i:5d}  {e:10.3f}" for i, e in enumerate(ladder.levels)]
    _emit(args, ladder.to_dict(), lines)
    return EXIT_OK


def cmd_verify(args) -> int:
    xs = args.material or REFERENCE_COMPOSITIONS
    for x in xs:
        material_at(x)
    try:
        checks = verify_all(xs, args.grid_points)
    except ConvergenceError as exc:
        msg = f"convergence error: {exc}"
        if args.json:
            print(json.dumps({"passed": False, "error": msg}, indent=2))
        else:
            print(msg, file=sys.stderr)
        return EXIT_VERIFY
    ok = all(c.passed for c in checks)
    lines = [f"{'check':28s} {'x':>5s} {'value':>12s} {'expected':>12s} {'rel_err':>10s}  result"]
    for c in checks:
        lines.append(
            f"{c.name:28s} {c.x:5.2f} {c.value:12.5f} {c.expected:12.5f} "
            f"{c.rel_error:10.2e}  {'PASS' if c.passed else 'FAIL'}"
        )
    failed = [f"{c.name}@x={c.x}" for c in checks if not c.passed]
    lines.append("all checks passed" if ok else f"FAILED: {', '.join(failed)}")
    _emit(args, {"passed": ok, "checks": [c.to_dict() for c in checks]}, lines)
    return EXIT_OK if ok else EXIT_VERIFY


def _set_params_from_args(args) -> SetParams:
    if args.config:
        return load_scenario(args.config).set_params
    return SetParams.symmetric(args.c_total, args.c_gate, args.r_total, args.temperature)


def cmd_set_iv(args) -> int:
    params = _set_params_from_args(args)
    if args.gate_range:
        trace = gate_sweep(params, args.v_ds, tuple(args.gate_range), args.step)
        x_name = "v_g_mv"
    else:
        trace = bias_sweep(params, args.q0, tuple(args.bias_range), args.step)
        x_name = "v_ds_mv"
    out = _output_dir(args.out_dir) / args.out
    export_trace(trace, out, x_name=x_name)
    payload = {
        "trace_csv": str(out),
        "points": len(trace),
        "charging_energy_meV": params.charging_energy,
        "gate_period_mV": params.gate_period,
    }
    _emit(
        args,
        payload,
        [
            f"wrote {len(trace)} points to {out}",
            f"charging energy  {params.charging_energy:.4f} meV",
            f"gate period      {params.gate_period:.1f} mV",
        ],
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = load_scenario(args.config)
    if args.step:
        sc = replace(sc, step=args.step)
    if args.no_qho:
        trace = gate_sweep(sc.set_params, sc.v_ds, sc.v_g_range, sc.step)
    else:
        trace = coupled_sweep(sc.set_params, sc.ladder, sc.coupling, sc.v_ds, sc.v_g_range, sc.step)
    a = sc.analysis
    summary = sweep_summary(trace, a.min_prominence, a.min_separation, a.max_width, a.detrend_window)
    summary["scenario"] = sc.name
    summary["qho"] = not args.no_qho
    summary["expected"] = {
        "cb_period_mV": sc.set_params.gate_period,
        "crossings_mV": crossing_voltages(sc.ladder, sc.coupling).tolist(),
        "fast_period_mV": sc.ladder.dE / sc.coupling.lever_arm,
    }
    out_dir = _output_dir(args.out_dir or sc.output.get("dir"))
    suffix = "_noqho" if args.no_qho else ""
    trace_path = out_dir / sc.output.get("trace_csv", f"{sc.name}{suffix}_trace.csv")
    peaks_path = out_dir / sc.output.get("peaks_json", f"{sc.name}{suffix}_peaks.json")
    if args.no_qho:
        trace_path = trace_path.with_name(trace_path.stem + suffix + trace_path.suffix)
        peaks_path = peaks_path.with_name(peaks_path.stem + suffix + peaks_path.suffix)
    export_trace(trace, trace_path)
    peaks_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    summary["trace_csv"] = str(trace_path)
    summary["peaks_json"] = str(peaks_path)

    def fmt(v, unit, spec=".2f"):
        return "n/a" if v is None else f"{v:{spec}} {unit}"

    stats = summary["stats"] or {}
    _emit(
        args,
        summary,
        [
            f"scenario             {sc.name}{' (no QHO)' if args.no_qho else ''}",
            f"CB period            {fmt(summary['cb_period_mV'], 'mV', '.1f')} "
            f"(e/C_g = {sc.set_params.gate_period:.1f} mV)",
            f"fast features        {summary['fast_features_negative']} at V_g < 0, "
            f"{summary['fast_features_positive']} at V_g > 0",
            f"onset                {fmt(summary['onset_mV'], 'mV')}",
            f"fast period          {fmt(stats.get('mean_mV'), 'mV')}",
            f"first gap            {fmt(stats.get('first_gap_mV'), 'mV')}",
            f"first-gap ratio      {fmt(stats.get('ratio'), '', '.3f')}",
            f"trace                {trace_path}",
            f"peaks                {peaks_path}",
        ],
    )
    return EXIT_OK


def cmd_analyze(args) -> int:
    trace = import_trace(args.trace, x_scale=args.x_scale, y_scale=args.y_scale)
    peaks = find_peaks(trace, args.min_prominence, args.min_separation, args.signal, args.detrend)
    if args.max_width is not None:
        peaks = peaks.select(peaks.widths <= args.max_width)
    stats = spacing_stats(peaks)
    payload = {"peaks": peaks.to_dict(), "stats": stats.to_dict()}
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _emit(
        args,
        payload,
        [
            f"peaks            {len(peaks)}",
            "positions        " + ", ".join(f"{p:.2f} mV" for p in peaks.positions),
            f"first gap        {stats.first_gap:.2f} mV",
            f"mean spacing     {stats.mean:.2f} mV (std {stats.stddev:.2f} mV)",
            f"first-gap ratio  {stats.ratio:.3f}",
        ],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="donorqho",
        description="Hydrogenic donor oscillator model and SET readout simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    def material_opts(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--x", type=float, default=0.25, help="Al fraction (default 0.25)")
        g.add_argument("--material-file", help="JSON file with x, eps_r, m_eff_ratio")

    p = common(sub.add_parser("material", help="material parameters of Al(x)Ga(1-x)As"))
    material_opts(p)
    p.set_defaults(func=cmd_material)

    p = common(sub.add_parser("donor", help="hydrogenic donor and oscillator quantities"))
    material_opts(p)
    p.add_argument("--density", type=float, default=2.5e11, help="donor sheet density, cm^-2")
    p.set_defaults(func=cmd_donor)

    p = common(sub.add_parser("ladder", help="oscillator level ladder"))
    material_opts(p)
    p.add_argument("--n-levels", type=int, default=6)
    p.set_defaults(func=cmd_ladder)

    p = common(sub.add_parser("verify", help="finite-difference checks of the closed forms"))
    p.add_argument("--material", type=float, nargs="+", help="Al fractions to check")
    p.add_argument("--grid-points", type=int, help="override radial grid size")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("set-iv", help="SET bias or gate sweep to CSV"))
    p.add_argument("--config", help="scenario file or bundled name for SET parameters")
    p.add_argument("--c-total", type=float, default=890.0, help="aF")
    p.add_argument("--c-gate", type=float, default=0.364, help="aF")
    p.add_argument("--r-total", type=float, default=200.8, help="kOhm")
    p.add_argument("--temperature", type=float, default=0.3, help="K")
    p.add_argument("--q0", type=float, default=0.0, help="offset charge, e")
    p.add_argument("--bias-range", type=float, nargs=2, default=(-1.0, 1.0), metavar=("START", "STOP"))
    p.add_argument("--gate-range", type=float, nargs=2, metavar=("START", "STOP"),
                   help="sweep the gate instead of the bias (mV)")
    p.add_argument("--v-ds", type=float, default=0.2, help="bias for gate sweeps, mV")
    p.add_argument("--step", type=float, default=0.01, help="mV")
    p.add_argument("--out", default="set_iv.csv")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_set_iv)

    p = common(sub.add_parser("sweep", help="coupled donor-SET gate sweep from a scenario"))
    p.add_argument("config", help="scenario JSON path or bundled name (paper_fig3, paper_fig4)")
    p.add_argument("--no-qho", action="store_true", help="plain SET sweep without the donor")
    p.add_argument("--step", type=float, help="override sweep step, mV")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_sweep)

    p = common(sub.add_parser("analyze", help="peak spacing analysis of a CSV trace"))
    p.add_argument("trace")
    p.add_argument("--signal", choices=(DERIVATIVE, CURRENT), default=DERIVATIVE)
    p.add_argument("--min-prominence", type=float, default=0.05, help="fraction of signal range")
    p.add_argument("--min-separation", type=float, default=1.0, help="mV")
    p.add_argument("--max-width", type=float, help="keep peaks narrower than this, mV")
    p.add_argument("--detrend", type=float, help="moving-median window, mV")
    p.add_argument("--x-scale", type=float, help="multiply x column to get mV")
    p.add_argument("--y-scale", type=float, help="multiply y column to get pA")
    p.add_argument("--out", help="write PeakSet JSON here")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (MaterialError, ConfigError, TraceParseError, InsufficientDataError,
            InputError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ConvergenceError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
