"""Polarization-averaged atom density along z and the classical comparison paths.

Averaging ``|psi_+|^2 + |psi_-|^2`` over the initial polarization weights the
two packets by the mean of ``cos^2(theta0/2)`` and ``sin^2(theta0/2)``, which
is 1/2 each under a uniform law on ``[0, pi]`` (and also under the isotropic
``sin(theta0)`` law), so the density is the equal mixture of two Gaussians of
width ``sigma0`` centered on the classical paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec
from .model import ExperimentConfig, default_config, derive

__all__ = [
    "DensityProfile",
    "density_in_field",
    "density_after_field",
    "density_at",
    "packet_offset",
    "classical_paths",
    "separation_time",
    "density_profile",
    "default_profile_grid",
    "local_maxima",
]

_DEFAULT = default_config()


@dataclass(frozen=True)
class DensityProfile:
    grid_z: np.ndarray
    values: np.ndarray
    t: float
    y: float

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid_z))

    def peaks(self) -> np.ndarray:
        return local_maxima(self.grid_z, self.values)

    def is_bimodal(self) -> bool:
        return len(self.peaks()) >= 2


def _mixture(z, offset: float, sigma0: float):
    z = np.asarray(z, dtype=float)
    norm = (2.0 * math.pi * sigma0 * sigma0) ** -0.5
    # both terms built from |z| -+ offset so that rho(z) == rho(-z) bitwise
    az = np.abs(z)
    a = np.exp(-((az - offset) ** 2) / (2.0 * sigma0 * sigma0))
    b = np.exp(-((az + offset) ** 2) / (2.0 * sigma0 * sigma0))
    return norm * 0.5 * (a + b)


def _width(t: float, exact: bool, config: ExperimentConfig) -> float:
    s0 = config.sigma0
    if not exact:
        return s0
    return math.hypot(s0, config.hbar * t / (2.0 * config.m * s0))


def density_in_field(z, t: float, config: ExperimentConfig = _DEFAULT, exact: bool = False):
    """Averaged density at time ``t`` in ``[0, delta_t]`` inside the magnet [1/m].

    ``exact=True`` uses the spread width ``sigma_t`` instead of ``sigma0``.
    """
    d = derive(config)
    if not 0.0 <= t <= d.delta_t:
        raise ValueError(f"t={t!r} outside the magnet interval [0, {d.delta_t!r}]")
    return _mixture(z, config.force * t * t / (2.0 * config.m), _width(t, exact, config))


def density_after_field(z, t_post: float, config: ExperimentConfig = _DEFAULT, exact: bool = False):
    """Averaged density ``t_post`` seconds after magnet exit [1/m]."""
    if t_post < 0:
        raise ValueError(f"t_post must be >= 0, got {t_post!r}")
    d = derive(config)
    return _mixture(z, d.z_delta + d.u * t_post, _width(d.delta_t + t_post, exact, config))


def density_at(z, t: float, config: ExperimentConfig = _DEFAULT, exact: bool = False):
    """Averaged density at total time ``t`` since entry, either regime."""
    dt = derive(config).delta_t
    if t <= dt:
        return density_in_field(z, t, config, exact)
    return density_after_field(z, t - dt, config, exact)


def packet_offset(t: float, config: ExperimentConfig = _DEFAULT) -> float:
    """Distance of either packet center from the axis at total time ``t``."""
    d = derive(config)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    if t <= d.delta_t:
        return config.force * t * t / (2.0 * config.m)
    return d.z_delta + d.u * (t - d.delta_t)


def classical_paths(t: float, config: ExperimentConfig = _DEFAULT) -> tuple[float, float]:
    """``(z_plus, z_minus)`` of a pure up / pure down atom at total time ``t``.

    Uniform acceleration ``mu_B B0'/m`` in the magnet (parabola), then uniform
    motion at ``+-u``.
    """
    off = packet_offset(t, config)
    return off, -off


def separation_time(config: ExperimentConfig = _DEFAULT) -> float:
    """``3 sigma0 / u``: time after exit by which the spots are ~4 sigma0 apart."""
    return derive(config).t_s


def default_profile_grid(t: float, config: ExperimentConfig = _DEFAULT,
                         n_points: int = 1024) -> GridSpec:
    half = 10.0 * config.sigma0 + packet_offset(t, config)
    return GridSpec(-half, half, n_points)


def density_profile(t: float, grid: GridSpec | None = None,
                    config: ExperimentConfig = _DEFAULT, exact: bool = False) -> DensityProfile:
    """Sample the averaged density at total time ``t`` on ``grid``.

    The grid must extend at least 8 sigma0 beyond both packet centers;
    otherwise the profile would not integrate to one.
    """
    if grid is None:
        grid = default_profile_grid(t, config)
    off = packet_offset(t, config)
    need = off + 8.0 * config.sigma0
    if grid.z_min > -need * (1 - 1e-12) or grid.z_max < need * (1 - 1e-12):
        raise ValueError(
            f"grid [{grid.z_min:g}, {grid.z_max:g}] does not cover the packets "
            f"(need +-{need:g} m at t={t:g} s)"
        )
    z = grid.closed_nodes()
    return DensityProfile(z, density_at(z, t, config, exact), t, config.v * t)


def local_maxima(z, values, rel_floor: float = 1e-6) -> np.ndarray:
    """Positions of the interior local maxima of a sampled profile.

    Samples below ``rel_floor * max`` are ignored so underflowed tails do not
    register as plateaus. Each maximum is refined by a parabola through the
    three neighboring samples.
    """
    z = np.asarray(z, dtype=float)
    v = np.asarray(values, dtype=float)
    floor = rel_floor * v.max()
    mid = v[1:-1]
    idx = np.nonzero((mid > v[:-2]) & (mid >= v[2:]) & (mid > floor))[0] + 1
    out = []
    for i in idx:
        y0, y1, y2 = v[i - 1], v[i], v[i + 1]
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        out.append(z[i] + shift * (z[i + 1] - z[i]))
    return np.array(out)
