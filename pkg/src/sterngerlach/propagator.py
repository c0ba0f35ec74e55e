"""Closed-form Pauli spinor inside and after the Stern-Gerlach magnet.

The rapidly oscillating x-coupling is averaged out, so each spinor component
is a Gaussian packet in a linear potential ``V = K z`` (in the magnet) and a
free boosted Gaussian afterwards. Two evaluation modes are offered:

``exact=False`` (default)
    The packet width is frozen at ``sigma0``; this is the textbook form the
    trajectory laws are derived from.
``exact=True``
    Full Gaussian with spreading ``sigma_t``, the Gouy-type ``arctan`` phase and
    the quadratic chirp.

Every function accepts numpy arrays for the spatial arguments and broadcasts.
Phases are assembled as real numbers and exponentiated once, so no unwrapping
is ever needed; ``S = hbar * arg(psi)`` is only meaningful modulo ``2 pi hbar``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ExperimentConfig, default_config, derive

__all__ = [
    "PolarizedAtom",
    "SpinorValue",
    "PacketParams",
    "initial_spinor",
    "packet_params",
    "gaussian_packet_K",
    "free_packet",
    "spinor_in_field",
    "exit_phases",
    "spinor_after_field",
    "spinor_at",
    "phase_gradient_z",
]

_DEFAULT = default_config()


@dataclass(frozen=True)
class PolarizedAtom:
    """Initial polarization and initial (Bohmian) position of one atom."""

    theta0: float
    phi0: float = 0.0
    z0: float = 0.0
    x0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta0 <= math.pi:
            raise ValueError(f"theta0 must lie in [0, pi], got {self.theta0!r}")
        if not 0.0 <= self.phi0 < 2.0 * math.pi:
            raise ValueError(f"phi0 must lie in [0, 2 pi), got {self.phi0!r}")
        if not (math.isfinite(self.z0) and math.isfinite(self.x0)):
            raise ValueError("initial position must be finite")


@dataclass(frozen=True)
class SpinorValue:
    """The two spinor components at one or many spacetime points."""

    psi_plus: np.ndarray | complex
    psi_minus: np.ndarray | complex
    hbar: float = _DEFAULT.hbar

    @property
    def R_plus(self):
        return np.abs(self.psi_plus)

    @property
    def R_minus(self):
        return np.abs(self.psi_minus)

    @property
    def S_plus(self):
        # np.angle(0) == 0, which makes the accessor total
        return self.hbar * np.angle(self.psi_plus)

    @property
    def S_minus(self):
        return self.hbar * np.angle(self.psi_minus)

    @property
    def density(self):
        return np.abs(self.psi_plus) ** 2 + np.abs(self.psi_minus) ** 2


@dataclass(frozen=True)
class PacketParams:
    sigma_t: float
    center: float
    drift_speed: float


def _spread(t, config: ExperimentConfig):
    """Dimensionless spreading ``tau = hbar t / (2 m sigma0^2)`` and ``sigma_t^2``."""
    tau = config.hbar * t / (2.0 * config.m * config.sigma0**2)
    return tau, config.sigma0**2 * (1.0 + tau * tau)


def packet_params(K: float, t: float, config: ExperimentConfig = _DEFAULT) -> PacketParams:
    """Width, center and center speed of a packet under the force ``-K``."""
    _, var = _spread(t, config)
    return PacketParams(
        sigma_t=math.sqrt(var),
        center=-K * t * t / (2.0 * config.m),
        drift_speed=-K * t / config.m,
    )


def _gaussian(xi, t, exact: bool, config: ExperimentConfig):
    """Normalized free Gaussian envelope evaluated at offset ``xi``.

    Returns ``(modulus, phase)`` so callers can fold extra phase terms in
    before a single complex exponential.
    """
    xi = np.asarray(xi, dtype=float)
    s0 = config.sigma0
    if not exact:
        mod = (2.0 * math.pi * s0 * s0) ** -0.25 * np.exp(-xi * xi / (4.0 * s0 * s0))
        return mod, np.zeros_like(xi)
    tau, var = _spread(t, config)
    mod = (2.0 * math.pi * var) ** -0.25 * np.exp(-xi * xi / (4.0 * var))
    phase = -0.5 * math.atan(tau) + tau * xi * xi / (4.0 * var)
    return mod, phase


def free_packet(x, t: float, exact: bool = False, config: ExperimentConfig = _DEFAULT):
    """Free Gaussian in one transverse coordinate (the x factor of the spinor)."""
    mod, phase = _gaussian(x, t, exact, config)
    return mod * np.exp(1j * phase)


def gaussian_packet_K(z, t: float, K: float, exact: bool = False,
                      config: ExperimentConfig = _DEFAULT):
    """Gaussian packet evolved for time ``t`` in the potential ``V(z) = K z``.

    The center follows ``-K t^2 / (2m)`` and the packet picks up the phase
    ``(-K t z - K^2 t^3 / (6m)) / hbar``. With ``exact=True`` the width grows as
    ``sigma_t`` and the free-spreading phases are included.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    z = np.asarray(z, dtype=float)
    xi = z + K * t * t / (2.0 * config.m)
    mod, phase = _gaussian(xi, t, exact, config)
    phase = phase + (-K * t * z - K * K * t**3 / (6.0 * config.m)) / config.hbar
    return mod * np.exp(1j * phase)


def _weights(atom: PolarizedAtom):
    return math.cos(atom.theta0 / 2.0), math.sin(atom.theta0 / 2.0)


def initial_spinor(atom: PolarizedAtom, x, z, config: ExperimentConfig = _DEFAULT) -> SpinorValue:
    """Gaussian spinor at magnet entry, normalized over the (x, z) plane."""
    c, s = _weights(atom)
    s0 = config.sigma0
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    g = (2.0 * math.pi * s0 * s0) ** -0.5 * np.exp(-(z * z + x * x) / (4.0 * s0 * s0))
    half = atom.phi0 / 2.0
    return SpinorValue(
        c * np.exp(1j * half) * g,
        1j * s * np.exp(-1j * half) * g,
        config.hbar,
    )


def spinor_in_field(atom: PolarizedAtom, x, z, t: float, exact: bool = False,
                    config: ExperimentConfig = _DEFAULT) -> SpinorValue:
    """Spinor at time ``t`` in ``[0, delta_t]`` inside the magnet.

    The up component feels ``K = -mu_B B0'`` and is pushed towards +z; the down
    component feels ``K = +mu_B B0'``. The Larmor phase ``-+ mu_B B0 t / hbar``
    comes from undoing the rotating-frame transformation.
    """
    d = derive(config)
    if not 0.0 <= t <= d.delta_t:
        raise ValueError(f"t={t!r} outside the magnet interval [0, {d.delta_t!r}]")
    c, s = _weights(atom)
    F = config.force
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    xmod, xphase = _gaussian(x, t, exact, config)
    larmor = config.mu_B * config.B0 * t / config.hbar
    kin = F * F * t**3 / (6.0 * config.m * config.hbar)

    up_mod, up_phase = _gaussian(z - F * t * t / (2.0 * config.m), t, exact, config)
    up_phase = up_phase + (atom.phi0 / 2.0 - larmor) + (F * t * z / config.hbar - kin)

    dn_mod, dn_phase = _gaussian(z + F * t * t / (2.0 * config.m), t, exact, config)
    dn_phase = dn_phase + (-atom.phi0 / 2.0 + larmor) + (-F * t * z / config.hbar - kin)

    return SpinorValue(
        c * xmod * up_mod * np.exp(1j * (up_phase + xphase)),
        1j * s * xmod * dn_mod * np.exp(1j * (dn_phase + xphase)),
        config.hbar,
    )


def exit_phases(atom: PolarizedAtom, config: ExperimentConfig = _DEFAULT) -> tuple[float, float]:
    """Constant phases ``(phi_plus, phi_minus)`` carried by the components at magnet exit."""
    d = derive(config)
    larmor = config.mu_B * config.B0 * d.delta_t / config.hbar
    kin = config.force**2 * d.delta_t**3 / (6.0 * config.m * config.hbar)
    return atom.phi0 / 2.0 - larmor - kin, -atom.phi0 / 2.0 + larmor - kin


def spinor_after_field(atom: PolarizedAtom, x, z, t_post: float, exact: bool = False,
                       config: ExperimentConfig = _DEFAULT) -> SpinorValue:
    """Spinor ``t_post`` seconds after the atom has left the magnet.

    Each component is a free Gaussian boosted to ``+-u`` and centered on
    ``+-(z_delta + u t_post)``. The kinetic phase ``-m u^2 t_post / 2`` is kept.
    In exact mode the spreading continues from the exit state, i.e. uses the
    total elapsed time ``delta_t + t_post``.
    """
    if t_post < 0:
        raise ValueError(f"t_post must be >= 0, got {t_post!r}")
    d = derive(config)
    c, s = _weights(atom)
    phi_p, phi_m = exit_phases(atom, config)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    t_tot = d.delta_t + t_post
    shift = d.z_delta + d.u * t_post
    p = config.m * d.u
    kin = 0.5 * config.m * d.u**2 * t_post

    xmod, xphase = _gaussian(x, t_tot, exact, config)
    up_mod, up_phase = _gaussian(z - shift, t_tot, exact, config)
    dn_mod, dn_phase = _gaussian(z + shift, t_tot, exact, config)
    up_phase = up_phase + phi_p + (p * z - kin) / config.hbar
    dn_phase = dn_phase + phi_m + (-p * z - kin) / config.hbar
    return SpinorValue(
        c * xmod * up_mod * np.exp(1j * (up_phase + xphase)),
        1j * s * xmod * dn_mod * np.exp(1j * (dn_phase + xphase)),
        config.hbar,
    )


def spinor_at(atom: PolarizedAtom, x, z, t: float, exact: bool = False,
              config: ExperimentConfig = _DEFAULT) -> SpinorValue:
    """Spinor at total time ``t`` since magnet entry, either regime."""
    dt = derive(config).delta_t
    if t <= dt:
        return spinor_in_field(atom, x, z, t, exact, config)
    return spinor_after_field(atom, x, z, t - dt, exact, config)


def phase_gradient_z(sign: int, z, t: float, exact: bool = False,
                     config: ExperimentConfig = _DEFAULT):
    """Closed-form ``dS/dz`` of the up (``sign=+1``) or down (``sign=-1``) component.

    ``t`` is total time since magnet entry.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    z = np.asarray(z, dtype=float)
    d = derive(config)
    F = config.force
    if t <= d.delta_t:
        grad = sign * F * t + np.zeros_like(z)
        xi = z - sign * F * t * t / (2.0 * config.m)
    else:
        tp = t - d.delta_t
        grad = sign * config.m * d.u + np.zeros_like(z)
        xi = z - sign * (d.z_delta + d.u * tp)
    if exact:
        tau, var = _spread(t, config)
        grad = grad + config.hbar * tau * xi / (2.0 * var)
    return grad
