"""CSV / JSON / SVG writers and the run manifest.

Numbers are written with ``%.12e`` (locale-independent, dot decimal, '\\n'
line endings) so repeated runs give byte-identical files.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .bohm import Outcome, Trajectory
from .density import DensityProfile
from .ensemble import EnsembleResult, ImpactMap
from .model import ExperimentConfig

__all__ = [
    "fmt",
    "write_csv",
    "write_profile_csv",
    "read_profile_csv",
    "write_trajectory_csv",
    "trajectories_to_json",
    "write_ensemble_json",
    "write_ensemble_csv",
    "write_histogram_csv",
    "RunManifest",
    "svg_density",
    "svg_trajectories",
]


def fmt(x: float) -> str:
    return "%.12e" % x


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def write_profile_csv(path: Path, profile: DensityProfile):
    write_csv(path, ("z_m", "rho_per_m"), zip(profile.grid_z, profile.values),
              comments=(f"t_s={fmt(profile.t)}", f"y_m={fmt(profile.y)}"))


def read_profile_csv(path: Path) -> DensityProfile:
    meta = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = float(value)
            elif line.startswith("z_m"):
                continue
            elif line.strip():
                rows.append([float(v) for v in line.split(",")])
    arr = np.array(rows)
    return DensityProfile(arr[:, 0], arr[:, 1], meta["t_s"], meta["y_m"])


def write_trajectory_csv(path: Path, traj: Trajectory):
    write_csv(path, ("t_s", "z_m", "x_m", "cos_theta"),
              zip(traj.t, traj.z, traj.x, traj.cos_theta),
              comments=(f"theta0={fmt(traj.atom.theta0)}", f"phi0={fmt(traj.atom.phi0)}",
                        f"z0={fmt(traj.atom.z0)}", f"outcome={traj.outcome.name}"))


def trajectories_to_json(trajs: Sequence[Trajectory]) -> list[dict]:
    return [
        {
            "theta0": t.atom.theta0,
            "phi0": t.atom.phi0,
            "z0": t.atom.z0,
            "x0": t.atom.x0,
            "outcome": t.outcome.name,
            "t_s": t.t.tolist(),
            "z_m": t.z.tolist(),
            "x_m": t.x.tolist(),
            "cos_theta": t.cos_theta.tolist(),
        }
        for t in trajs
    ]


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def ensemble_summary(result: EnsembleResult, imap: ImpactMap, config: ExperimentConfig,
                     l1: float | None = None) -> dict:
    n = len(result)
    return {
        "config": config.to_dict(),
        "spec": result.spec.to_dict() if result.spec else None,
        "t_end_s": result.t_end,
        "n": n,
        "n_up": result.n_up,
        "n_down": result.n_down,
        "n_unresolved": n - result.n_up - result.n_down,
        "up_fraction": result.up_fraction,
        "spots": {
            "up_centroid_m": _finite_or_none(imap.up_centroid),
            "down_centroid_m": _finite_or_none(imap.down_centroid),
            "up_mass": imap.up_mass,
            "down_mass": imap.down_mass,
            "mass_ratio": _finite_or_none(imap.mass_ratio),
        },
        "divergence_l1": l1,
    }


def write_ensemble_json(path: Path, summary: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_ensemble_csv(path: Path, result: EnsembleResult):
    a = result.atoms
    rows = ((th, ph, z0, zi, Outcome(int(o)).name)
            for th, ph, z0, zi, o in zip(a.theta0, a.phi0, a.z0, result.z_impact, result.outcome))
    write_csv(path, ("theta0", "phi0", "z0_m", "z_impact_m", "outcome"), rows)


def write_histogram_csv(path: Path, imap: ImpactMap):
    write_csv(path, ("z_lo_m", "z_hi_m", "mass"), zip(imap.edges[:-1], imap.edges[1:], imap.mass))


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """What was run and what it produced; enough to replay the command."""

    command: str
    config: dict
    parameters: dict
    seed: int | None = None
    version: str = __version__
    outputs: dict[str, str] = field(default_factory=dict)

    def add(self, path: Path):
        self.outputs[Path(path).name] = sha256(path)

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / "manifest.json"
        body = {
            "command": self.command,
            "config": self.config,
            "parameters": self.parameters,
            "seed": self.seed,
            "tool_version": self.version,
            "outputs": dict(sorted(self.outputs.items())),
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(body, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path

    @classmethod
    def read(cls, path: Path) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            body = json.load(fh)
        return cls(body["command"], body["config"], body["parameters"], body["seed"],
                   body["tool_version"], body["outputs"])


# --- SVG -------------------------------------------------------------------

_W, _H, _PAD = 720, 420, 56
_COLORS = ("#1b6ca8", "#d1495b", "#2e8b57", "#edae49", "#6a4c93", "#00798c", "#8d6a9f", "#3d5a80")


class _Axes:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim

    def px(self, x):
        return _PAD + (x - self.x0) / (self.x1 - self.x0) * (_W - 2 * _PAD)

    def py(self, y):
        return _H - _PAD - (y - self.y0) / (self.y1 - self.y0) * (_H - 2 * _PAD)


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{escape(title)}</text>',
    ]


def _frame(ax: _Axes, xlabel: str, ylabel: str, xticks, yticks, xfmt, yfmt) -> list[str]:
    out = [f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
           'fill="none" stroke="black" stroke-width="1"/>']
    for t in xticks:
        x = ax.px(t)
        out.append(f'<line x1="{x:.2f}" y1="{_H - _PAD}" x2="{x:.2f}" y2="{_H - _PAD + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{_H - _PAD + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{xfmt(t)}</text>')
    for t in yticks:
        y = ax.py(t)
        out.append(f'<line x1="{_PAD - 5}" y1="{y:.2f}" x2="{_PAD}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{_PAD - 8}" y="{y + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{yfmt(t)}</text>')
    out.append(f'<text x="{_W / 2:.1f}" y="{_H - 12}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{_H / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 14 {_H / 2:.1f})">{escape(ylabel)}</text>')
    return out


def _polyline(ax: _Axes, xs, ys, color: str, width: float = 1.5) -> str:
    pts = " ".join(f"{ax.px(x):.2f},{ax.py(y):.2f}" for x, y in zip(xs, ys))
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>'


def svg_density(profiles: Sequence[DensityProfile], path: Path):
    """Overlay of density profiles rho(z), one curve per beam position y."""
    zmax = max(float(np.abs(p.grid_z).max()) for p in profiles)
    rmax = max(float(p.values.max()) for p in profiles)
    ax = _Axes((-zmax * 1e3, zmax * 1e3), (0.0, rmax * 1.08))
    lines = _svg_open("Atom density along z")
    zt = np.linspace(-zmax * 1e3, zmax * 1e3, 5)
    rt = np.linspace(0.0, rmax, 5)
    lines += _frame(ax, "z [mm]", "rho [1/m]", zt, rt, lambda v: f"{v:.2f}", lambda v: f"{v:.3g}")
    for i, p in enumerate(profiles):
        color = _COLORS[i % len(_COLORS)]
        lines.append(_polyline(ax, p.grid_z * 1e3, p.values, color))
        lines.append(f'<text x="{_W - _PAD - 8}" y="{_PAD + 18 + 16 * i}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="12" fill="{color}">y = {p.y * 100:.1f} cm</text>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def svg_trajectories(trajs: Sequence[Trajectory], config: ExperimentConfig, path: Path,
                     arrow_every: float, title: str = "Bohmian trajectories"):
    """Trajectories in the (y, z) plane with spin arrows every ``arrow_every`` seconds.

    An arrow makes the angle ``theta`` with the +z axis (``cos theta`` taken
    from the trajectory record).
    """
    ymax = max(float(t.t[-1]) for t in trajs) * config.v
    zext = max(float(np.abs(t.z).max()) for t in trajs) * 1.15 or config.sigma0
    ax = _Axes((0.0, ymax * 100), (-zext * 1e3, zext * 1e3))
    lines = _svg_open(title)
    lines += _frame(ax, "y = v t [cm]", "z [mm]", np.linspace(0, ymax * 100, 5),
                    np.linspace(-zext * 1e3, zext * 1e3, 5), lambda v: f"{v:.1f}", lambda v: f"{v:.3f}")
    magnet_end = ax.px(config.delta_l * 100)
    lines.append(f'<rect x="{_PAD}" y="{_PAD}" width="{magnet_end - _PAD:.2f}" height="{_H - 2 * _PAD}" '
                 'fill="#dddddd" fill-opacity="0.5"/>')
    arrow_px = 11.0
    for i, tr in enumerate(trajs):
        color = _COLORS[i % len(_COLORS)]
        lines.append(_polyline(ax, tr.t * config.v * 100, tr.z * 1e3, color, 1.2))
        if arrow_every > 0:
            marks = np.arange(0.0, tr.t[-1] + 0.5 * arrow_every, arrow_every)
            idx = np.unique(np.clip(np.searchsorted(tr.t, marks), 0, len(tr.t) - 1))
            for j in idx:
                x, y = ax.px(tr.t[j] * config.v * 100), ax.py(tr.z[j] * 1e3)
                c = float(np.clip(tr.cos_theta[j], -1.0, 1.0))
                s = math.sqrt(max(0.0, 1.0 - c * c))
                x2, y2 = x + arrow_px * s, y - arrow_px * c
                lines.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                             f'stroke="{color}" stroke-width="1"/>')
                lines.append(f'<circle cx="{x2:.2f}" cy="{y2:.2f}" r="1.6" fill="{color}"/>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
