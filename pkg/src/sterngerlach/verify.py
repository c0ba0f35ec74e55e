"""Oracle check suites behind ``sg verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import packet_offset
from .grid import GridSpec
from .model import ExperimentConfig, default_config, derive
from .oracle import (
    analytic_on_grid,
    continuity_residual,
    evolve_linear_potential,
    first_moment,
    gaussian_on_grid,
    l2_error,
    oracle_grid,
)

__all__ = ["Check", "continuity_samples", "convergence_ratios", "run_checks"]

ORACLE_L2_TOL = 1e-3
APPROX_L2_TOL = 1e-2
CONTINUITY_TOL = 1e-3
RATIO_RANGE = (3.0, 5.0)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.4e} (tolerance {self.tolerance})"


def oracle_l2(K: float, n_points: int, steps: int, config: ExperimentConfig) -> float:
    d = derive(config)
    grid = oracle_grid(n_points, d.delta_t / steps, config=config)
    wf = evolve_linear_potential(gaussian_on_grid(grid, config), K, d.delta_t, config)
    return l2_error(wf, analytic_on_grid(grid, K, d.delta_t, True, config))


def approx_l2(config: ExperimentConfig, n_points: int = 4096) -> float:
    """L2 distance at magnet exit between the spreading and the frozen-width packet."""
    d = derive(config)
    grid = oracle_grid(n_points, config=config)
    K = -config.force
    a = analytic_on_grid(grid, K, d.delta_t, True, config)
    b = analytic_on_grid(grid, K, d.delta_t, False, config)
    return math.sqrt(float(np.sum(np.abs(a - b) ** 2)) * grid.spacing)


def convergence_ratios(K: float, config: ExperimentConfig, n_points: int = 4096,
                       steps=(1024, 2048, 4096, 8192)) -> list[float]:
    errs = [oracle_l2(K, n_points, s, config) for s in steps]
    return [a / b for a, b in zip(errs[:-1], errs[1:])]


def continuity_samples(config: ExperimentConfig, full: bool = True) -> list[tuple[float, float]]:
    """``(t, theta0)`` pairs spanning both regimes."""
    d = derive(config)
    t_screen = d.delta_t + config.D / config.v
    pairs = [
        (d.delta_t / 2, 0.0),
        (d.delta_t / 2, math.pi / 3),
        (d.delta_t, math.pi / 2),
        (d.delta_t + d.t_s / 2, math.pi / 3),
        (d.delta_t + d.t_s, math.pi / 2),
        (t_screen, 0.0),
    ]
    return pairs if full else [pairs[1], pairs[3]]


def continuity_grid(t: float, config: ExperimentConfig, n_points: int = 4096) -> GridSpec:
    return GridSpec.symmetric(packet_offset(t, config) + 10.0 * config.sigma0, n_points)


def run_checks(level: str = "quick", config: ExperimentConfig | None = None) -> list[Check]:
    """Run the oracle comparisons; ``level`` is ``"quick"`` or ``"full"``."""
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    config = config or default_config()
    d = derive(config)
    F = config.force
    full = level == "full"
    n_points = 4096 if full else 2048
    checks = []
    for label, K in (("up", -F), ("down", F)):
        err = oracle_l2(K, n_points, n_points, config)
        checks.append(Check(f"oracle L2 {label} at exit ({n_points} pts)", err,
                            f"< {ORACLE_L2_TOL:g}", err < ORACLE_L2_TOL))
    if full:
        for label, K in (("up", -F), ("down", F)):
            for i, r in enumerate(convergence_ratios(K, config)):
                ok = RATIO_RANGE[0] <= r <= RATIO_RANGE[1]
                checks.append(Check(f"dt-halving ratio {label} #{i + 1}", r,
                                    f"in [{RATIO_RANGE[0]:g}, {RATIO_RANGE[1]:g}]", ok))
        grid = oracle_grid(n_points, config=config)
        wf = evolve_linear_potential(gaussian_on_grid(grid, config), -F, d.delta_t, config)
        rel = abs(first_moment(wf) - d.z_delta) / d.z_delta
        checks.append(Check("Ehrenfest center at exit (rel)", rel, "< 1e-3", rel < 1e-3))
        drift = abs(wf.norm() - 1.0)
        checks.append(Check("discrete norm drift", drift, "< 1e-10", drift < 1e-10))
    for t, th in continuity_samples(config, full):
        r = continuity_residual(t, th, continuity_grid(t, config), config)
        checks.append(Check(f"continuity t={t:.3e}s theta0={th:.4f}", r,
                            f"< {CONTINUITY_TOL:g}", r < CONTINUITY_TOL))
    a = approx_l2(config, n_points)
    checks.append(Check("frozen-width approximation L2 at exit", a, f"< {APPROX_L2_TOL:g}", a < APPROX_L2_TOL))
    return checks
