"""``sg``: command-line front end.

Exit status: 0 success, 1 validation or I/O error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .bohm import integrate_trajectory
from .density import default_profile_grid, density_profile, local_maxima
from .ensemble import SamplingSpec, compare_to_density, impact_map, run_ensemble, sample_arrays
from .model import ConfigError, derive, load_config, screen_time
from .verify import run_checks

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2


class UsageError(Exception):
    pass


def _theta0(text: str):
    if text in ("uniform", "sine"):
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected radians, 'uniform' or 'sine', got {text!r}")
    if not 0.0 <= value <= math.pi:
        raise argparse.ArgumentTypeError(f"theta0 must lie in [0, pi], got {value}")
    return value


def _times(text: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    try:
        return [float(s) for s in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--times expects a comma list of lengths in m, got {text!r}")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file of experiment parameters (SI)")
    common.add_argument("--out", type=Path, default=Path("sg-out"), help="output directory")
    common.add_argument("--seed", type=_u64, default=0, help="64-bit RNG seed")

    p = argparse.ArgumentParser(prog="sg", description="Stern-Gerlach spinor and trajectory simulator")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common], help="print derived quantities")

    d = sub.add_parser("density", parents=[common], help="density profiles at beam positions y")
    d.add_argument("--times", type=_times, default=[0.0, 0.01, 0.11, 0.21],
                   help="comma list of beam positions y = v t in m (default 0,0.01,0.11,0.21)")
    d.add_argument("--points", type=int, default=1024, help="samples per profile")
    d.add_argument("--exact", action="store_true", help="use the spreading width sigma_t")

    t = sub.add_parser("trajectories", parents=[common], help="integrate a few atoms and plot them")
    t.add_argument("--n", type=int, default=10)
    t.add_argument("--theta0", type=_theta0, default=math.pi / 3)
    t.add_argument("--t-end", type=float, default=None, help="end time in s (default: screen)")

    e = sub.add_parser("ensemble", parents=[common], help="Monte Carlo screen statistics")
    e.add_argument("--n", type=int, default=10_000)
    e.add_argument("--theta0", type=_theta0, default="uniform")
    e.add_argument("--t-end", type=float, default=None, help="end time in s (default: screen)")
    e.add_argument("--bins", type=int, default=100)
    e.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("verify", parents=[common], help="run the PDE-oracle checks")
    v.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    return p


def _outdir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {path}: {exc.strerror}") from exc
    return path


def cmd_constants(args, config) -> int:
    d = derive(config)
    rows = [
        ("delta_t", d.delta_t, "s", "time in the magnet"),
        ("z_delta", d.z_delta, "m", "displacement at magnet exit"),
        ("u", d.u, "m/s", "transverse speed at exit"),
        ("t_s", d.t_s, "s", "separation time"),
        ("omega", d.omega, "rad/s", "coupling angular frequency"),
        ("omega/2pi", d.omega_hz, "1/s", "coupling frequency"),
        ("spread_ratio", d.spread_ratio, "-", "hbar delta_t / (2 m sigma0^2)"),
    ]
    for name, value, unit, what in rows:
        print(f"{name:>13} = {value:.6e} {unit:<6} {what}")
    return EXIT_OK


def cmd_density(args, config) -> int:
    if not args.times:
        raise UsageError("--times must list at least one beam position")
    if any(y < 0 for y in args.times):
        raise UsageError("beam positions must be >= 0")
    out = _outdir(args.out)
    manifest = io.RunManifest("density", config.to_dict(),
                              {"times_m": args.times, "points": args.points, "exact": args.exact})
    profiles = []
    for y in args.times:
        t = y / config.v
        prof = density_profile(t, default_profile_grid(t, config, args.points), config, args.exact)
        profiles.append(prof)
        path = out / f"density_y{y * 100:07.3f}cm.csv"
        io.write_profile_csv(path, prof)
        manifest.add(path)
        peaks = local_maxima(prof.grid_z, prof.values)
        shape = "bimodal" if len(peaks) >= 2 else "unimodal"
        where = ", ".join(f"{p:+.4e}" for p in peaks)
        print(f"y = {y * 100:6.2f} cm  t = {prof.t:.4e} s  {shape:9s} peaks [m]: {where}")
    svg = out / "density.svg"
    io.svg_density(profiles, svg)
    manifest.add(svg)
    manifest.write(out)
    return EXIT_OK


def cmd_trajectories(args, config) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    d = derive(config)
    t_end = args.t_end if args.t_end is not None else screen_time(config)
    if not t_end > 0:
        raise UsageError("--t-end must be positive")
    out = _outdir(args.out)
    # a fixed polarization also fixes phi0 = 0
    phi0 = "uniform" if isinstance(args.theta0, str) else 0.0
    spec = SamplingSpec(args.n, args.seed, args.theta0, phi0)
    atoms = sample_arrays(spec, config).atoms()
    trajs = [integrate_trajectory(a, t_end, None, config) for a in atoms]
    manifest = io.RunManifest("trajectories", config.to_dict(),
                              {"n": args.n, "theta0": args.theta0, "t_end_s": t_end}, args.seed)
    for i, tr in enumerate(trajs):
        path = out / f"trajectory_{i:04d}.csv"
        io.write_trajectory_csv(path, tr)
        manifest.add(path)
        print(f"atom {i:3d}: theta0={tr.atom.theta0:.4f} z0={tr.atom.z0:+.4e} m "
              f"-> z={tr.final_z:+.4e} m  {tr.outcome.name}")
    bundle = out / "trajectories.json"
    with open(bundle, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(io.trajectories_to_json(trajs), fh)
        fh.write("\n")
    manifest.add(bundle)
    svg = out / "trajectories.svg"
    arrow_every = d.t_s / 10 if math.isfinite(d.t_s) else d.delta_t
    io.svg_trajectories(trajs, config, svg, arrow_every)
    manifest.add(svg)
    manifest.write(out)
    return EXIT_OK


def cmd_ensemble(args, config) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    t_end = args.t_end if args.t_end is not None else screen_time(config)
    if not t_end > 0:
        raise UsageError("--t-end must be positive")
    out = _outdir(args.out)
    spec = SamplingSpec(args.n, args.seed, args.theta0)
    result = run_ensemble(sample_arrays(spec, config), t_end, config, workers=args.workers, spec=spec)
    imap = impact_map(result, args.bins)
    l1 = compare_to_density(result, None, args.bins, config) if isinstance(args.theta0, str) else None
    summary = io.ensemble_summary(result, imap, config, l1)
    manifest = io.RunManifest("ensemble", config.to_dict(),
                              {"n": args.n, "theta0": args.theta0, "t_end_s": t_end, "bins": args.bins},
                              args.seed)
    for name, writer, arg in (("ensemble.json", io.write_ensemble_json, summary),
                              ("atoms.csv", io.write_ensemble_csv, result),
                              ("histogram.csv", io.write_histogram_csv, imap)):
        writer(out / name, arg)
        manifest.add(out / name)
    manifest.write(out)
    print(f"n = {len(result)}  up_fraction = {result.up_fraction:.4f}  "
          f"unresolved = {len(result) - result.n_up - result.n_down}")
    print(f"spots: N+ at {imap.up_centroid:+.4e} m (mass {imap.up_mass:.4f}), "
          f"N- at {imap.down_centroid:+.4e} m (mass {imap.down_mass:.4f})")
    if l1 is not None:
        print(f"L1 distance to analytic density: {l1:.4f}")
    return EXIT_OK


def cmd_verify(args, config) -> int:
    start = time.perf_counter()
    checks = run_checks(args.level, config)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed "
          f"in {time.perf_counter() - start:.1f} s")
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "constants": cmd_constants,
    "density": cmd_density,
    "trajectories": cmd_trajectories,
    "ensemble": cmd_ensemble,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except ConfigError as exc:
        where = f" (field {exc.field})" if exc.field else ""
        print(f"sg: invalid config{where}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, ValueError, OSError) as exc:
        print(f"sg: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    np.seterr(all="ignore")
    sys.exit(main())


if __name__ == "__main__":
    entry()
