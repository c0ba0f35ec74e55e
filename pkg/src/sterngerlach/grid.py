"""Uniform 1-D sampling grid shared by the density profiles and the PDE oracle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GridSpec"]


@dataclass(frozen=True)
class GridSpec:
    """``n_points`` nodes on ``[z_min, z_max)`` (periodic convention) plus a time step.

    ``dt`` is only used by time-stepping consumers; it may be left at ``None``.
    """

    z_min: float
    z_max: float
    n_points: int
    dt: float | None = None

    def __post_init__(self):
        if not self.z_max > self.z_min:
            raise ValueError(f"z_max ({self.z_max!r}) must exceed z_min ({self.z_min!r})")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")

    @classmethod
    def symmetric(cls, half_width: float, n_points: int, dt: float | None = None) -> "GridSpec":
        return cls(-half_width, half_width, n_points, dt)

    @property
    def spacing(self) -> float:
        return (self.z_max - self.z_min) / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        """Periodic nodes: ``z_max`` itself is identified with ``z_min`` and excluded."""
        return self.z_min + self.spacing * np.arange(self.n_points)

    def closed_nodes(self) -> np.ndarray:
        """Nodes including both endpoints, for sampled profiles."""
        return np.linspace(self.z_min, self.z_max, self.n_points)

    def is_power_of_two(self) -> bool:
        n = int(self.n_points)
        return n & (n - 1) == 0
