"""de Broglie-Bohm dynamics of the atom's transverse position.

The velocity field of the averaged spinor only depends on ``z``, ``t`` and
``theta0``. The half-angle law

    tan(theta/2) = tan(theta0/2) * exp(-w),   w = b(t) z

is evaluated as ``cos(theta) = tanh(w + ln cot(theta0/2))``, which is the same
function as ``(tanh w + cos theta0) / (1 + tanh w cos theta0)`` but neither
overflows for the large ``|w|`` reached downstream nor degenerates at
``theta0 in {0, pi}``.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .model import ExperimentConfig, default_config, derive
from .propagator import PolarizedAtom, spinor_at

__all__ = [
    "Outcome",
    "TrajectoryPoint",
    "Trajectory",
    "VelocitySample",
    "IntegrationError",
    "InvariantViolation",
    "UP_THRESHOLD",
    "spin_offset",
    "cos_theta_in_field",
    "cos_theta_after_field",
    "cos_theta_at",
    "velocity_in_field",
    "velocity_after_field",
    "velocity_at",
    "general_velocity",
    "threshold_z",
    "classify",
    "integrate_trajectory",
    "integrate_batch",
    "BatchResult",
]

_DEFAULT = default_config()

UP_THRESHOLD = 0.99


class Outcome(enum.IntEnum):
    DOWN = -1
    UNRESOLVED = 0
    UP = 1


class IntegrationError(RuntimeError):
    """Non-finite state during trajectory integration."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InvariantViolation(AssertionError):
    """A trajectory broke the velocity bound or crossed a neighbor."""


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    z: float
    x: float
    cos_theta: float


@dataclass(frozen=True)
class VelocitySample:
    v_x: np.ndarray | float
    v_z: np.ndarray | float


def spin_offset(theta0):
    """``ln cot(theta0/2)``; +inf at ``theta0 = 0`` and -inf at ``theta0 = pi``."""
    th = np.asarray(theta0, dtype=float)
    with np.errstate(divide="ignore"):
        lam = np.log(np.cos(th / 2.0)) - np.log(np.sin(th / 2.0))
    lam = np.where(th == 0.0, np.inf, lam)
    lam = np.where(th == math.pi, -np.inf, lam)
    return lam if lam.ndim else float(lam)


def _cos_theta(w, lam):
    return np.tanh(w + lam)


def _b_in_field(t: float, config: ExperimentConfig) -> float:
    return config.force * t * t / (2.0 * config.m * config.sigma0**2)


def _b_after_field(t_post: float, config: ExperimentConfig) -> float:
    d = derive(config)
    return (d.z_delta + d.u * t_post) / config.sigma0**2


def cos_theta_in_field(z, t: float, theta0, config: ExperimentConfig = _DEFAULT):
    """Spin projection on z along the velocity field inside the magnet."""
    if not 0.0 <= t <= derive(config).delta_t:
        raise ValueError(f"t={t!r} outside the magnet interval")
    return _cos_theta(_b_in_field(t, config) * np.asarray(z, dtype=float), spin_offset(theta0))


def cos_theta_after_field(z, t_post: float, theta0, config: ExperimentConfig = _DEFAULT):
    """Spin projection on z, ``t_post`` seconds after magnet exit."""
    if t_post < 0:
        raise ValueError(f"t_post must be >= 0, got {t_post!r}")
    return _cos_theta(_b_after_field(t_post, config) * np.asarray(z, dtype=float),
                      spin_offset(theta0))


def cos_theta_at(z, t: float, theta0, config: ExperimentConfig = _DEFAULT):
    dt = derive(config).delta_t
    if t <= dt:
        return cos_theta_in_field(z, t, theta0, config)
    return cos_theta_after_field(z, t - dt, theta0, config)


def velocity_in_field(z, t: float, theta0, config: ExperimentConfig = _DEFAULT):
    return config.force * t / config.m * cos_theta_in_field(z, t, theta0, config)


def velocity_after_field(z, t_post: float, theta0, config: ExperimentConfig = _DEFAULT):
    return derive(config).u * cos_theta_after_field(z, t_post, theta0, config)


def velocity_at(z, t: float, theta0, config: ExperimentConfig = _DEFAULT):
    dt = derive(config).delta_t
    if t <= dt:
        return velocity_in_field(z, t, theta0, config)
    return velocity_after_field(z, t - dt, theta0, config)


def _phase_step(a, b):
    """``arg(a) - arg(b)`` reduced to ``(-pi, pi]`` without forming either arg."""
    return np.angle(a * np.conj(b))


def general_velocity(atom: PolarizedAtom, x, z, t: float, exact: bool = False,
                     h: float = 1e-9, config: ExperimentConfig = _DEFAULT) -> VelocitySample:
    """Velocity from the phase gradients of the spinor itself.

    Implements ``v = (1/2m) [d(S+ + S-) + d(S+ - S-) cos(theta)]`` with
    ``tan(theta/2) = R-/R+``, the gradients taken by central differences of
    step ``h``. Each half-step phase increment is reduced separately, so the
    gradient is recovered even when ``2 h dS/dz`` exceeds ``pi hbar``. The
    spin-magnetization (Gordon) current is not included.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    mid = spinor_at(atom, x, z, t, exact, config)
    r2p = np.abs(mid.psi_plus) ** 2
    r2m = np.abs(mid.psi_minus) ** 2
    rho = r2p + r2m
    if np.any(rho == 0.0):
        raise ValueError("velocity undefined: both spinor components vanish at a sample point")
    cos_t = (r2p - r2m) / rho

    def grads(dx, dz):
        hi = spinor_at(atom, x + dx, z + dz, t, exact, config)
        lo = spinor_at(atom, x - dx, z - dz, t, exact, config)
        gp = (_phase_step(hi.psi_plus, mid.psi_plus) + _phase_step(mid.psi_plus, lo.psi_plus))
        gm = (_phase_step(hi.psi_minus, mid.psi_minus) + _phase_step(mid.psi_minus, lo.psi_minus))
        scale = config.hbar / (2.0 * h)
        return gp * scale, gm * scale

    def combine(gp, gm):
        # a vanishing component contributes no defined phase; weight it out
        gp = np.where(r2p > 0, gp, 0.0)
        gm = np.where(r2m > 0, gm, 0.0)
        return ((gp + gm) + (gp - gm) * cos_t) / (2.0 * config.m)

    vx = combine(*grads(h, 0.0))
    vz = combine(*grads(0.0, h))
    return VelocitySample(vx, vz)


def threshold_z(theta0, config: ExperimentConfig = _DEFAULT):
    """Initial height separating atoms that end up (above) from down (below).

    ``sigma0 * Phi^-1(sin^2(theta0/2))``; -inf at ``theta0 = 0`` and +inf at
    ``theta0 = pi``.
    """
    th = np.asarray(theta0, dtype=float)
    if np.any((th < 0) | (th > math.pi)):
        raise ValueError("theta0 must lie in [0, pi]")
    q = np.sin(th / 2.0) ** 2
    out = config.sigma0 * ndtri(q)
    out = np.where(th == 0.0, -np.inf, out)
    out = np.where(th == math.pi, np.inf, out)
    return out if out.ndim else float(out)


def classify(cos_theta, threshold: float = UP_THRESHOLD):
    c = np.asarray(cos_theta, dtype=float)
    out = np.where(c > threshold, Outcome.UP, np.where(c < -threshold, Outcome.DOWN, Outcome.UNRESOLVED))
    return out.astype(np.int8) if out.ndim else Outcome(int(out))


@dataclass(frozen=True)
class Trajectory:
    atom: PolarizedAtom
    t: np.ndarray
    z: np.ndarray
    x: np.ndarray
    cos_theta: np.ndarray
    outcome: Outcome

    @property
    def points(self) -> list[TrajectoryPoint]:
        return [TrajectoryPoint(float(a), float(b), float(c), float(d))
                for a, b, c, d in zip(self.t, self.z, self.x, self.cos_theta)]

    @property
    def final_z(self) -> float:
        return float(self.z[-1])


def _segments(t_end: float, config: ExperimentConfig, dt_max, stops: Sequence[float] = ()):
    """Yield ``(t_start, h, n_steps, in_field)`` with breakpoints at the magnet exit and ``stops``."""
    d = derive(config)
    if dt_max is None:
        dt_in, dt_post = d.delta_t / 2000.0, d.t_s / 2000.0
        if not math.isfinite(dt_post):
            dt_post = d.delta_t / 2000.0
    else:
        if not dt_max > 0:
            raise ValueError(f"dt_max must be positive, got {dt_max!r}")
        dt_in = dt_post = float(dt_max)
    marks = {0.0, float(t_end)}
    if d.delta_t < t_end:
        marks.add(d.delta_t)
    for s in stops:
        if not 0.0 < s <= t_end:
            raise ValueError(f"snapshot time {s!r} outside (0, {t_end!r}]")
        marks.add(float(s))
    marks = sorted(marks)
    for a, b in zip(marks[:-1], marks[1:]):
        in_field = b <= d.delta_t
        step = dt_in if in_field else dt_post
        n = max(1, math.ceil((b - a) / step - 1e-9))
        yield a, b, n, in_field


def _rk4_stream(z, x, lam, t_end, config, dt_max, stops=(), exact_x=False) -> Iterator:
    """Fixed-step RK4 on a vector of atoms; yields ``(t, h, z, x, cos_theta)`` after each step."""
    d = derive(config)
    accel = config.force / config.m
    s2 = config.sigma0**2

    def vz_in(t, zz):
        return accel * t * np.tanh(accel * t * t / (2.0 * s2) * zz + lam)

    def vz_post(t, zz):
        tp = t - d.delta_t
        return d.u * np.tanh((d.z_delta + d.u * tp) / s2 * zz + lam)

    for a, b, n, in_field in _segments(t_end, config, dt_max, stops):
        f = vz_in if in_field else vz_post
        h = (b - a) / n
        for k in range(n):
            t = a + k * h
            k1 = f(t, z)
            k2 = f(t + 0.5 * h, z + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, z + 0.5 * h * k2)
            k4 = f(t + h, z + h * k3)
            z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t_next = b if k == n - 1 else t + h
            if in_field:
                cos_t = np.tanh(accel * t_next * t_next / (2.0 * s2) * z + lam)
            else:
                cos_t = np.tanh((d.z_delta + d.u * (t_next - d.delta_t)) / s2 * z + lam)
            yield t_next, h, z, x, cos_t


def integrate_trajectory(atom: PolarizedAtom, t_end: float, dt_max: float | None = None,
                         config: ExperimentConfig = _DEFAULT) -> Trajectory:
    """Integrate one atom from magnet entry to ``t_end`` with classic RK4.

    Default steps are ``delta_t/2000`` in the magnet and ``t_s/2000`` after;
    an explicit ``dt_max`` is used in both regimes. The velocity law switches
    at the magnet exit, which is always a step boundary. The transverse x
    velocity of the averaged spinor is zero, so x stays at ``x0``.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end!r}")
    lam = spin_offset(atom.theta0)
    ts = [0.0]
    zs = [atom.z0]
    cs = [math.tanh(lam)]
    for t, _, z, _, c in _rk4_stream(atom.z0, atom.x0, lam, t_end, config, dt_max):
        if not math.isfinite(z):
            raise IntegrationError(f"non-finite position at t={t!r}")
        ts.append(t)
        zs.append(z)
        cs.append(float(c))
    t_arr = np.array(ts)
    cos_arr = np.array(cs)
    return Trajectory(atom, t_arr, np.array(zs), np.full_like(t_arr, atom.x0), cos_arr,
                      classify(cos_arr[-1]))


@dataclass(frozen=True)
class BatchResult:
    z: np.ndarray
    cos_theta: np.ndarray
    snapshots: dict[float, np.ndarray]
    steps: int


def integrate_batch(theta0, z0, t_end: float, dt_max: float | None = None,
                    snapshots: Sequence[float] = (), check_invariants: bool = True,
                    config: ExperimentConfig = _DEFAULT) -> BatchResult:
    """Vectorized RK4 over many atoms sharing the same step sequence.

    With ``check_invariants`` every step is checked for the speed bound
    ``|dz| <= u h`` and, among atoms with equal ``theta0``, for preserved
    ordering of positions. Violations raise :class:`InvariantViolation`.
    """
    theta0 = np.asarray(theta0, dtype=float)
    z = np.array(z0, dtype=float, copy=True)
    theta0 = np.broadcast_to(theta0, z.shape)
    lam = spin_offset(theta0)
    lam = np.asarray(lam, dtype=float)
    u = derive(config).u
    snaps = {float(s) for s in snapshots}
    out_snaps: dict[float, np.ndarray] = {}

    groups = []
    if check_invariants and z.size > 1:
        order = np.lexsort((z, theta0))
        th_sorted = theta0[order]
        z_sorted = z[order]
        same = (th_sorted[1:] == th_sorted[:-1]) & (z_sorted[1:] > z_sorted[:-1])
        if same.any():
            groups = (order[:-1][same], order[1:][same])

    prev = z
    steps = 0
    cos_t = np.tanh(lam + 0.0 * z)
    for t, h, z, _, cos_t in _rk4_stream(z, None, lam, t_end, config, dt_max, sorted(snaps)):
        steps += 1
        if not np.all(np.isfinite(z)):
            bad = int(np.flatnonzero(~np.isfinite(z))[0])
            raise IntegrationError(f"non-finite position for atom {bad} at t={t!r}", bad)
        if check_invariants:
            lim = u * h * (1.0 + 1e-9)
            if np.any(np.abs(z - prev) > lim):
                bad = int(np.argmax(np.abs(z - prev)))
                raise InvariantViolation(f"atom {bad} exceeded the speed bound at t={t!r}")
            if groups:
                lo, hi = groups
                if np.any(z[hi] <= z[lo]):
                    raise InvariantViolation(f"trajectories crossed at t={t!r}")
        prev = z
        if t in snaps:
            out_snaps[t] = z.copy()
    return BatchResult(z, np.asarray(cos_t), out_snaps, steps)
