"""CSV-driven command line interface.

Subcommands: ``fit``, ``envelope``, ``spectral``, ``characteristic`` and
``emd``.  Input is a two-column CSV with header ``x,y``; outputs are written
as CSV files into the chosen output directory, sampled on the extended grid
restricted to the original time range.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import BasisEnv
from .emd import EmdConfig, decompose
from .envelope import EnvelopeConfig, classic_upper_envelope, lower_envelope, upper_envelope_detailed
from .errors import SplinemdError
from .fitting import FitConfig, SampleSeries, extend_boundary, fit, lstsq_fit
from .operators import (
    ImfSoul,
    characteristic,
    extract_frequency,
    fit_unit_oscillation,
    leakage_cost,
)

__all__ = ["RunConfig", "read_csv", "write_csv", "main"]


@dataclass(frozen=True)
class RunConfig:
    """Defaults reproduce the (order, infill, basis, eps) = (4, 4, 180, 0.01) setup."""

    order: int = 4
    infill: int = 4
    nbasis: int = 180
    eps: float = 0.01
    extend_ratio: float = 0.0
    max_imfs: int = 8
    gamma: float = 0.0
    output_dir: Path = Path(".")


def read_csv(path):
    """Load a two-column ``x,y`` CSV into a sample series.

    Rows are sorted by time when needed (with a warning); duplicate
    timestamps are rejected.
    """
    times = []
    values = []
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        if header.strip().replace(" ", "") != "x,y":
            raise ValueError(f"{path}: expected header 'x,y', got {header.strip()!r}")
        for lineno, line in enumerate(handle, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two comma-separated values")
            try:
                times.append(float(parts[0]))
                values.append(float(parts[1]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not times:
        raise ValueError(f"{path}: no data rows")
    times = np.asarray(times)
    values = np.asarray(values)
    order = np.argsort(times, kind="stable")
    if not np.array_equal(order, np.arange(times.size)):
        warnings.warn(f"{path}: rows were not sorted by time; sorting", stacklevel=2)
        times, values = times[order], values[order]
    if np.any(np.diff(times) == 0):
        raise ValueError(f"{path}: duplicate timestamps")
    return SampleSeries(times, values)


def write_csv(path, grid, values):
    """Write paired columns under an ``x,y`` header; round-trips via read_csv."""
    grid = np.asarray(grid)
    values = np.asarray(values)
    if grid.shape != values.shape:
        raise ValueError("grid and values must have equal length")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("x,y\n")
        for x, y in zip(grid, values):
            handle.write(f"{x:.17g},{y:.17g}\n")


def _prepare(series, cfg):
    """Optional mirror extension, environment construction and signal fit."""
    t_lo, t_hi = series.times[0], series.times[-1]
    if cfg.extend_ratio > 0.0:
        series = extend_boundary(series, cfg.extend_ratio)
    env = BasisEnv.uniform(
        series.times[0], series.times[-1], order=cfg.order, nbasis=cfg.nbasis, infill=cfg.infill
    )
    spline = fit(series, env, FitConfig())
    out_grid = env.extgrid[(env.extgrid >= t_lo) & (env.extgrid <= t_hi)]
    return env, spline, out_grid


def _outdir(cfg):
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg.output_dir


def cmd_fit(series, cfg):
    _, spline, grid = _prepare(series, cfg)
    out = _outdir(cfg) / "fit.csv"
    write_csv(out, grid, spline.eval(grid))
    return [out]


def cmd_envelope(series, cfg, side="upper"):
    _, spline, grid = _prepare(series, cfg)
    if math.isinf(cfg.eps):
        env_spline = classic_upper_envelope(spline if side == "upper" else -spline)
        if side == "lower":
            env_spline = -env_spline
    else:
        ecfg = EnvelopeConfig(eps=cfg.eps)
        if side == "upper":
            res = upper_envelope_detailed(spline, ecfg)
            env_spline = res.spline
            if not res.converged:
                print("warning: envelope iteration did not converge", file=sys.stderr)
        else:
            env_spline = lower_envelope(spline, ecfg)
    out = _outdir(cfg) / "envelope.csv"
    write_csv(out, grid, env_spline.eval(grid))
    return [out]


def cmd_spectral(series, cfg, amplitude_path=None, unit_amplitude=False):
    env, spline, grid = _prepare(series, cfg)
    if not unit_amplitude:
        if amplitude_path is None:
            raise SplinemdError(
                "spectral extraction needs --unit-amplitude or --amplitude CSV to normalise"
            )
        amp = read_csv(amplitude_path)
        amp_spline = fit(amp, env, FitConfig())
        unit_vals = spline.grid_eval() / amp_spline.grid_eval()
    else:
        unit_vals = spline.grid_eval()
    unit = fit_unit_oscillation(env.extgrid, unit_vals, env)
    freq = extract_frequency(unit)
    out = _outdir(cfg) / "freq.csv"
    write_csv(out, grid, freq.eval(grid))
    return [out]


def cmd_characteristic(amplitude_path, frequency_path, cfg):
    amp_series = read_csv(amplitude_path)
    freq_series = read_csv(frequency_path)
    env = BasisEnv.uniform(
        amp_series.times[0],
        amp_series.times[-1],
        order=cfg.order,
        nbasis=cfg.nbasis,
        infill=cfg.infill,
    )
    mu = characteristic(fit(amp_series, env, FitConfig()), fit(freq_series, env, FitConfig()))
    print(f"mu0={mu.mu0:.6g} mu1={mu.mu1:.6g} mu2={mu.mu2:.6g}")
    written = []
    if cfg.output_dir != Path("."):
        out = _outdir(cfg) / "characteristic.csv"
        with open(out, "w", encoding="utf-8") as handle:
            handle.write("mu0,mu1,mu2\n")
            handle.write(f"{mu.mu0:.17g},{mu.mu1:.17g},{mu.mu2:.17g}\n")
        written.append(out)
    return written


def _leakage_diagnostic(env, step_input, comp, gamma):
    """Extraction cost of a component against its step input."""
    freq_vals = comp.freq.grid_eval()
    grid = env.extgrid
    phase_vals = np.concatenate(
        [[0.0], np.cumsum(0.5 * (freq_vals[1:] + freq_vals[:-1]) * np.diff(grid))]
    )
    soul = ImfSoul(comp.a, lstsq_fit(grid, phase_vals, env, FitConfig().smooth_weight))
    return leakage_cost(step_input, soul, gamma)


def cmd_emd(series, cfg):
    env, spline, grid = _prepare(series, cfg)
    dec = decompose(spline, EmdConfig(eps=cfg.eps, max_imfs=cfg.max_imfs))
    outdir = _outdir(cfg)
    written = []
    step_input = spline
    for i, comp in enumerate(dec.components):
        print(f"component {i}: envelope converged={dec.converged[i]}", file=sys.stderr)
        if cfg.gamma > 0.0 and comp.freq is not None:
            cost = _leakage_diagnostic(env, step_input, comp, cfg.gamma)
            print(f"component {i}: leakage cost={cost:.6g}", file=sys.stderr)
        step_input = step_input - comp.u
        for name, spl in (("imf", comp.u), ("a", comp.a), ("freq", comp.freq)):
            if spl is None:
                print(f"component {i}: frequency unavailable", file=sys.stderr)
                continue
            out = outdir / f"{name}-{i}.csv"
            write_csv(out, grid, spl.eval(grid))
            written.append(out)
        out = outdir / f"char-{i}.csv"
        with open(out, "w", encoding="utf-8") as handle:
            handle.write("mu0,mu1,mu2\n")
            if comp.char is not None:
                mu = comp.char
                handle.write(f"{mu.mu0:.17g},{mu.mu1:.17g},{mu.mu2:.17g}\n")
        written.append(out)
    out = outdir / "residual.csv"
    write_csv(out, grid, dec.residual.eval(grid))
    written.append(out)
    return written


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="splinemd",
        description="Signal decomposition toolkit: spline fitting, envelope "
        "estimation, instantaneous-frequency extraction and full EMD.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_input=True):
        if with_input:
            p.add_argument("input", type=Path, help="two-column x,y CSV")
        p.add_argument("--order", "-k", type=int, default=4, help="spline order (default 4)")
        p.add_argument("--infill", "-q", type=int, default=4, help="grid in-fill points per knot interval (default 4)")
        p.add_argument("--basis", "-n", type=int, default=180, help="number of basis functions (default 180)")
        p.add_argument("--eps", type=float, default=0.01, help="envelope tolerance; 'inf' selects the classic method")
        p.add_argument("--extend-ratio", type=float, default=0.0, help="mirror extension fraction in [0, 1)")
        p.add_argument("--max-imfs", type=int, default=8, help="cap on extraction steps (default 8)")
        p.add_argument("--gamma", type=float, default=0.0, help="leakage factor (diagnostics only)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    add_common(sub.add_parser("fit", help="fit a spline and emit its samples"))
    p_env = sub.add_parser("envelope", help="estimate an envelope")
    add_common(p_env)
    p_env.add_argument("--side", choices=("upper", "lower"), default="upper")
    p_spec = sub.add_parser("spectral", help="extract instantaneous frequency")
    add_common(p_spec)
    p_spec.add_argument("--unit-amplitude", action="store_true", help="input already has amplitude one")
    p_spec.add_argument("--amplitude", type=Path, help="amplitude CSV used to normalise the input")
    p_char = sub.add_parser("characteristic", help="characteristic of an amplitude/frequency pair")
    add_common(p_char, with_input=False)
    p_char.add_argument("--amplitude", type=Path, required=True)
    p_char.add_argument("--frequency", type=Path, required=True)
    add_common(sub.add_parser("emd", help="full decomposition"))
    return parser


def _run(args):
    cfg = RunConfig(
        order=args.order,
        infill=args.infill,
        nbasis=args.basis,
        eps=args.eps,
        extend_ratio=args.extend_ratio,
        max_imfs=args.max_imfs,
        gamma=args.gamma,
        output_dir=args.out,
    )
    if args.command == "characteristic":
        return cmd_characteristic(args.amplitude, args.frequency, cfg)
    series = read_csv(args.input)
    if args.command == "fit":
        return cmd_fit(series, cfg)
    if args.command == "envelope":
        return cmd_envelope(series, cfg, side=args.side)
    if args.command == "spectral":
        return cmd_spectral(
            series, cfg, amplitude_path=args.amplitude, unit_amplitude=args.unit_amplitude
        )
    if args.command == "emd":
        return cmd_emd(series, cfg)
    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        written = _run(args)
    except (SplinemdError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
