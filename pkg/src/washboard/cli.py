"""Command-line front end.

Subcommands: bloch, wigner, coeffs, dephasing, sweep, validate.
Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, coeffode, noise, observables, validate
from .config import RunConfig, load_config
from .errors import ConfigError, NumericalError, ParameterError, WashboardError
from .outputs import fmt, write_csv, write_wigner_csv
from .params import SystemParams

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _config_from(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None), getattr(args, "set", None) or [])
    for key in ("mode", "samples", "outdir"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    for key in ("t_max_t0", "t_max_ns", "t_t0", "t_ns", "jobs"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "deterministic", False):
        cfg.deterministic = True
    cfg.validate()
    return cfg


def _meta(cfg: RunConfig, params: SystemParams, extra: dict | None = None) -> dict:
    meta = {f"config_{k}": v for k, v in cfg.as_dict().items()}
    meta.update({
        "derived_t0_s": params.t0,
        "derived_nu": params.nu,
        "derived_mu": params.mu,
        "derived_omega_cross_rads": params.omega_cross,
        "derived_e_b_rads": params.e_b,
    })
    if extra:
        meta.update(extra)
    return meta


def cmd_bloch(args) -> int:
    cfg = _config_from(args)
    params = cfg.system()
    horizon = cfg.horizon_seconds(params)
    times = np.linspace(0.0, horizon, cfg.samples)
    t0 = params.t0
    for mode in cfg.modes():
        series = observables.bloch_series(params, mode, times, rtol=cfg.rtol, atol=cfg.atol)
        cols = [
            ("t_ns", times * 1e9),
            ("t_over_t0", times / t0 if math.isfinite(t0) else np.full_like(times, np.nan)),
            ("bloch", series.lengths),
            ("sx", series.sx),
            ("sy", series.sy),
        ]
        path = os.path.join(cfg.outdir, f"bloch_{mode}.csv")
        write_csv(path, cols, _meta(cfg, params, {"mode": mode}), cfg.deterministic)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_wigner(args) -> int:
    cfg = _config_from(args)
    params = cfg.system()
    t = cfg.snapshot_seconds(params)
    for mode in cfg.modes():
        spec = observables.auto_grid_spec(params, mode, t, num=cfg.grid_points, pad=cfg.grid_pad)
        grid = observables.assemble_ws(params, mode, t, grid_spec=spec,
                                       rtol=cfg.rtol, atol=cfg.atol)
        path = os.path.join(cfg.outdir, f"wigner_{mode}.csv")
        write_wigner_csv(path, grid, _meta(cfg, params, {"mode": mode}), cfg.deterministic)
        print(f"wrote {path} (integral = {fmt(grid.integral())})")
    return EXIT_OK


def cmd_coeffs(args) -> int:
    cfg = _config_from(args)
    params = cfg.system()
    horizon = cfg.horizon_seconds(params)
    times = np.linspace(0.0, horizon, cfg.samples)
    for mode in cfg.modes():
        traj = coeffode.integrate(params, mode, times, rtol=cfg.rtol, atol=cfg.atol)
        z = traj.sample(times)
        cols: list[tuple[str, np.ndarray]] = [("t_ns", times * 1e9)]
        for i, name in enumerate("abcdef"):
            cols.append((f"re_{name}", z[i].real))
            cols.append((f"im_{name}", z[i].imag))
        path = os.path.join(cfg.outdir, f"coeffs_{mode}.csv")
        write_csv(path, cols, _meta(cfg, params, {"mode": mode}), cfg.deterministic)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_dephasing(args) -> int:
    circuit = noise.CircuitNoise(
        r1=args.r1, r2=args.r2, temperature=args.temperature, bandwidth=args.bandwidth
    )
    s_i = noise.current_noise_spectrum(circuit)
    irms = noise.i_rms(circuit)
    g_noise = noise.gamma_noise(circuit)
    g_deph = noise.gamma_deph(circuit)
    rows = [
        ("S_I(0)", s_i, "A/sqrt(Hz)"),
        ("I_RMS", irms, "A"),
        ("gamma_noise", g_noise, "1/s"),
        ("gamma_deph", g_deph, "1/s"),
        ("ratio", g_noise / g_deph, "dimensionless"),
    ]
    print(f"# circuit: R1={args.r1} ohm, R2={args.r2} ohm, "
          f"T={args.temperature} K, B={args.bandwidth} Hz")
    print(f"{'quantity':<12} {'value':<24} unit")
    for name, value, unit in rows:
        print(f"{name:<12} {fmt(value):<24} {unit}")
    print("# rate interpretations (the formulas yield 1/s; both readings shown):")
    for name, value in (("gamma_noise", g_noise), ("gamma_deph", g_deph)):
        print(f"{name:<12} as ordinary frequency: {value / 1e9:.4f} GHz"
              f" | as angular frequency: {value / (2 * math.pi * 1e9):.4f} GHz")
    return EXIT_OK


def _parse_range(spec: str) -> tuple[str, np.ndarray]:
    try:
        key, rng = spec.split("=", 1)
        parts = rng.split(":")
        if len(parts) == 1:
            values = np.array([float(parts[0])])
        elif len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError("count must be >= 1")
            values = np.linspace(start, stop, count)
        else:
            raise ValueError("expected start:stop:count")
    except ValueError as exc:
        raise ConfigError(f"bad --param {spec!r}: {exc}") from exc
    return key.strip(), values


_SWEEPABLE = ("e_b_ratio", "e_j_factor", "pulse_t0")


def _sweep_point(payload) -> dict:
    cfg_dict, point = payload
    cfg = RunConfig(**cfg_dict)
    cfg.e_b_ratio = point.get("e_b_ratio", cfg.e_b_ratio)
    cfg.e_j_factor = point.get("e_j_factor", cfg.e_j_factor)
    pulse_t0 = point.get("pulse_t0", cfg.t_max_t0 if cfg.t_max_ns is None else None)
    params = cfg.system()
    horizon = pulse_t0 * params.t0 if pulse_t0 is not None else cfg.t_max_ns * 1e-9
    times = np.linspace(0.0, horizon, cfg.samples)
    series = observables.bloch_series(params, "irreversible", times,
                                      rtol=cfg.rtol, atol=cfg.atol)
    below = np.nonzero(series.lengths <= 0.5)[0]
    half_time = float(times[below[0]]) if below.size else float("nan")
    out = dict(point)
    out["half_time_ns"] = half_time * 1e9
    out["bloch_at_end"] = float(series.lengths[-1])
    out["pulse_ns"] = horizon * 1e9
    return out


def cmd_sweep(args) -> int:
    cfg = _config_from(args)
    ranges = [_parse_range(s) for s in args.param or []]
    if not ranges:
        raise ConfigError("sweep needs at least one --param key=start:stop:count")
    for key, _ in ranges:
        if key not in _SWEEPABLE:
            raise ConfigError(f"cannot sweep {key!r}; choose from {_SWEEPABLE}")
    grids = np.meshgrid(*[v for _, v in ranges], indexing="ij")
    points = [
        {key: float(g.ravel()[i]) for (key, _), g in zip(ranges, grids)}
        for i in range(grids[0].size)
    ]
    cap = args.max_points if args.max_points is not None else cfg.sweep_max_points
    if len(points) > cap:
        raise ConfigError(f"sweep has {len(points)} points, exceeding the cap {cap}")
    payloads = [(cfg.as_dict(), pt) for pt in points]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_sweep_point, payloads))
    else:
        results = [_sweep_point(p) for p in payloads]
    keys = [k for k, _ in ranges] + ["pulse_ns", "half_time_ns", "bloch_at_end"]
    cols = [(k, np.array([r[k] for r in results])) for k in keys]
    params = cfg.system()
    path = os.path.join(cfg.outdir, "sweep.csv")
    write_csv(path, cols, _meta(cfg, params), cfg.deterministic)
    print(f"wrote {path} ({len(results)} points)")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _config_from(args)
    checks, code = validate.run_suite(args.suite, outdir=cfg.outdir,
                                      deterministic=cfg.deterministic)
    for check in checks:
        print(check.line())
    n_fail = sum(not c.passed for c in checks)
    print(f"# {len(checks) - n_fail}/{len(checks)} checks passed")
    return EXIT_OK if code == 0 else EXIT_VALIDATION


def _add_common(sub: argparse.ArgumentParser, times: bool = True) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a config key (repeatable; last writer wins)")
    sub.add_argument("--mode", choices=["reversible", "irreversible", "both"])
    sub.add_argument("--outdir", help="output directory (default $WASHBOARD_OUTDIR or ./out)")
    sub.add_argument("--deterministic", action="store_true",
                     help="omit the wall-clock stamp so outputs are byte-identical")
    if times:
        sub.add_argument("--samples", type=int)
        sub.add_argument("--t-max-t0", type=float, dest="t_max_t0")
        sub.add_argument("--t-max-ns", type=float, dest="t_max_ns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="washboard",
        description="Decoherence of current-biased Josephson-junction qubit readout",
    )
    parser.add_argument("--version", action="version", version=f"washboard {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("bloch", help="Bloch-vector length time series")
    _add_common(p)
    p.set_defaults(func=cmd_bloch)

    p = subs.add_parser("wigner", help="assembled Wigner surface at one time")
    _add_common(p, times=False)
    p.add_argument("--t-ns", type=float, dest="t_ns")
    p.add_argument("--t-t0", type=float, dest="t_t0")
    p.set_defaults(func=cmd_wigner)

    p = subs.add_parser("coeffs", help="coherence-component coefficient time series")
    _add_common(p)
    p.set_defaults(func=cmd_coeffs)

    p = subs.add_parser("dephasing", help="thermal-noise dephasing budget")
    p.add_argument("--r1", type=float, default=50.0, help="source resistance, ohm")
    p.add_argument("--r2", type=float, default=3500.0, help="input resistance, ohm")
    p.add_argument("--temperature", "--T", type=float, default=4.2, dest="temperature")
    p.add_argument("--bandwidth", type=float, default=200e6, help="Hz")
    p.set_defaults(func=cmd_dephasing)

    p = subs.add_parser("sweep", help="parameter sweep of the dephasing half-time")
    _add_common(p)
    p.add_argument("--param", action="append", metavar="KEY=START:STOP:COUNT",
                   help=f"range over one of {_SWEEPABLE} (repeatable)")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--max-points", type=int, dest="max_points")
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("validate", help="run a validation suite")
    _add_common(p, times=False)
    p.add_argument("suite", choices=["oracle", "classical-limit", "pde-residual", "all"])
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except WashboardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
