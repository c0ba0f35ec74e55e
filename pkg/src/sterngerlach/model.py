"""Apparatus configuration, physical constants and derived scalars.

All quantities are SI. The field model is fixed: ``B = (B0' x, 0, B0 - B0' z)``
over a magnet of length ``delta_l``, followed by free flight over ``D`` to the
screen.
"""
from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass
from os import PathLike
from typing import Any

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "ExperimentConfig",
    "DerivedQuantities",
    "ConfigError",
    "default_config",
    "derive",
    "load_config",
    "config_from_dict",
    "screen_time",
]


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34
    mu_B: float = 9.2740100783e-24
    electron_mass: float = 9.1093837015e-31
    elementary_charge: float = 1.602176634e-19

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be strictly positive")

    def bohr_magneton_consistency(self) -> float:
        """Relative mismatch between ``mu_B`` and ``e hbar / (2 m_e)``."""
        ref = self.elementary_charge * self.hbar / (2.0 * self.electron_mass)
        return abs(self.mu_B - ref) / ref


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ExperimentConfig:
    """Physical parameters of the magnet and of the (monochromatic) atom beam.

    Attributes
    ----------
    m : float
        Atom mass [kg].
    v : float
        Beam speed along y [m/s].
    sigma0 : float
        Initial packet standard deviation in x and z [m].
    B0 : float
        Field magnitude on axis [T]. Zero is allowed (no Larmor phase).
    B0_prime : float
        Field gradient [T/m]. Zero is allowed (free flight).
    delta_l : float
        Magnet length along the beam [m].
    D : float
        Magnet-to-screen distance [m].
    """

    m: float = 1.8e-25
    v: float = 500.0
    sigma0: float = 1e-4
    B0: float = 5.0
    B0_prime: float = 1e3
    delta_l: float = 0.01
    D: float = 0.20
    constants: PhysicalConstants = dataclasses.field(default=CONSTANTS, compare=True, repr=False)

    _non_negative = ("B0", "B0_prime")

    def __post_init__(self):
        for name in ("m", "v", "sigma0", "B0", "B0_prime", "delta_l", "D"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{name} must be a number, got {value!r}", name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}", name)
            if name in self._non_negative:
                if value < 0:
                    raise ConfigError(f"{name} must be >= 0, got {value!r}", name)
            elif value <= 0:
                raise ConfigError(f"{name} must be > 0, got {value!r}", name)
        if self.sigma0 > self.delta_l / 10:
            warnings.warn(
                f"sigma0={self.sigma0:g} m is not small against delta_l={self.delta_l:g} m",
                stacklevel=3,
            )

    @property
    def mu_B(self) -> float:
        return self.constants.mu_B

    @property
    def hbar(self) -> float:
        return self.constants.hbar

    @property
    def force(self) -> float:
        """Magnitude of the Stern-Gerlach force ``mu_B B0'`` [N]."""
        return self.constants.mu_B * self.B0_prime

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FIELD_NAMES}


FIELD_NAMES = ("m", "v", "sigma0", "B0", "B0_prime", "delta_l", "D")


@dataclass(frozen=True)
class DerivedQuantities:
    delta_t: float
    z_delta: float
    u: float
    t_s: float
    omega: float
    spread_ratio: float

    @property
    def omega_hz(self) -> float:
        """``omega / 2 pi`` in s^-1."""
        return self.omega / (2.0 * math.pi)


def default_config() -> ExperimentConfig:
    """Silver-atom apparatus: m=1.8e-25 kg, v=500 m/s, sigma0=0.1 mm,
    B0=5 T, B0'=1e3 T/m, 1 cm magnet, screen 20 cm downstream."""
    return ExperimentConfig()


def derive(config: ExperimentConfig) -> DerivedQuantities:
    """Closed-form scalars of the experiment.

    ``t_s`` is infinite when the gradient vanishes (the packets never part).
    """
    if not isinstance(config, ExperimentConfig):
        raise ConfigError(f"expected ExperimentConfig, got {type(config).__name__}")
    c = config.constants
    delta_t = config.delta_l / config.v
    accel = c.mu_B * config.B0_prime / config.m
    u = accel * delta_t
    z_delta = accel * delta_t**2 / 2.0
    t_s = 3.0 * config.sigma0 / u if u > 0 else math.inf
    omega = 2.0 * c.mu_B * config.B0 / c.hbar
    spread_ratio = c.hbar * delta_t / (2.0 * config.m * config.sigma0**2)
    return DerivedQuantities(delta_t, z_delta, u, t_s, omega, spread_ratio)


def screen_time(config: ExperimentConfig) -> float:
    """Total time from magnet entry to the screen, ``delta_l/v + D/v``."""
    return (config.delta_l + config.D) / config.v


def load_config(path: str | PathLike[str] | None) -> ExperimentConfig:
    """Read a JSON object of ExperimentConfig fields; absent fields keep defaults.

    Unknown keys and non-numeric values raise ConfigError naming the field.
    """
    if path is None:
        return default_config()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return config_from_dict(data)


def config_from_dict(data: Any) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"unknown config field {unknown[0]!r}", unknown[0])
    values = {}
    for name, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}", name)
        values[name] = float(value)
    return ExperimentConfig(**values)
