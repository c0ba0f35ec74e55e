"""Monte Carlo ensembles of Bohmian atoms and their screen statistics.

Random numbers come from PCG64. Atom ``i`` of a run seeded with ``seed`` draws
from its own stream ``SeedSequence(seed, spawn_key=(i,))``, so an atom's
initial condition does not depend on how the batch is chunked or threaded.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .bohm import InvariantViolation, Outcome, classify, integrate_batch
from .density import packet_offset
from .model import ExperimentConfig, default_config
from .propagator import PolarizedAtom

__all__ = [
    "SamplingSpec",
    "AtomArrays",
    "EnsembleResult",
    "ImpactMap",
    "sample_atoms",
    "sample_arrays",
    "run_ensemble",
    "impact_map",
    "density_bin_masses",
    "compare_to_density",
    "l1_distance",
    "binomial_sigma",
]

_DEFAULT = default_config()
_TWO_PI_BELOW = math.nextafter(2.0 * math.pi, 0.0)


@dataclass(frozen=True)
class SamplingSpec:
    """Initial-condition laws of an ensemble.

    ``theta0`` is a fixed angle in radians, ``"uniform"`` (uniform on
    ``[0, pi]``, the default) or ``"sine"`` (isotropic, density
    ``sin(theta0)/2``). ``phi0`` is a fixed angle or ``"uniform"`` on
    ``[0, 2 pi)``. ``z0`` and ``x0`` are normal with standard deviation
    ``z0_sigma`` (``sigma0`` of the config when left ``None``).
    """

    n: int
    seed: int = 0
    theta0: float | str = "uniform"
    phi0: float | str = "uniform"
    z0_sigma: float | None = None

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if isinstance(self.theta0, str):
            if self.theta0 not in ("uniform", "sine"):
                raise ValueError(f"unknown theta0 law {self.theta0!r}")
        elif not 0.0 <= self.theta0 <= math.pi:
            raise ValueError(f"fixed theta0 must lie in [0, pi], got {self.theta0!r}")
        if isinstance(self.phi0, str):
            if self.phi0 != "uniform":
                raise ValueError(f"unknown phi0 law {self.phi0!r}")
        elif not 0.0 <= self.phi0 < 2.0 * math.pi:
            raise ValueError(f"fixed phi0 must lie in [0, 2 pi), got {self.phi0!r}")
        if self.z0_sigma is not None and not self.z0_sigma > 0:
            raise ValueError("z0_sigma must be positive")

    def to_dict(self) -> dict:
        return {"n": int(self.n), "seed": int(self.seed), "theta0": self.theta0,
                "phi0": self.phi0, "z0_sigma": self.z0_sigma}


@dataclass(frozen=True)
class AtomArrays:
    theta0: np.ndarray
    phi0: np.ndarray
    z0: np.ndarray
    x0: np.ndarray

    def __len__(self) -> int:
        return len(self.z0)

    def atoms(self) -> list[PolarizedAtom]:
        return [PolarizedAtom(float(a), float(b), float(c), float(d))
                for a, b, c, d in zip(self.theta0, self.phi0, self.z0, self.x0)]

    @classmethod
    def from_atoms(cls, atoms: Sequence[PolarizedAtom]) -> "AtomArrays":
        return cls(np.array([a.theta0 for a in atoms], dtype=float),
                   np.array([a.phi0 for a in atoms], dtype=float),
                   np.array([a.z0 for a in atoms], dtype=float),
                   np.array([a.x0 for a in atoms], dtype=float))


def atom_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def sample_arrays(spec: SamplingSpec, config: ExperimentConfig = _DEFAULT) -> AtomArrays:
    """Draw the initial conditions of ``spec.n`` atoms as arrays."""
    n = int(spec.n)
    draws = np.empty((n, 4))
    for i in range(n):
        g = atom_stream(spec.seed, i)
        draws[i, :2] = g.random(2)
        draws[i, 2:] = g.standard_normal(2)
    u_theta, u_phi, n_z, n_x = draws.T
    if spec.theta0 == "uniform":
        theta0 = math.pi * u_theta
    elif spec.theta0 == "sine":
        theta0 = np.arccos(np.clip(1.0 - 2.0 * u_theta, -1.0, 1.0))
    else:
        theta0 = np.full(n, float(spec.theta0))
    if spec.phi0 == "uniform":
        phi0 = np.minimum(2.0 * math.pi * u_phi, _TWO_PI_BELOW)
    else:
        phi0 = np.full(n, float(spec.phi0))
    sigma = config.sigma0 if spec.z0_sigma is None else spec.z0_sigma
    return AtomArrays(theta0, phi0, sigma * n_z, sigma * n_x)


def sample_atoms(spec: SamplingSpec, config: ExperimentConfig = _DEFAULT) -> list[PolarizedAtom]:
    """Deterministic (given ``spec.seed``) list of initial atom states."""
    return sample_arrays(spec, config).atoms()


@dataclass(frozen=True)
class EnsembleResult:
    atoms: AtomArrays
    z_impact: np.ndarray
    cos_theta: np.ndarray
    outcome: np.ndarray
    t_end: float
    snapshots: dict[float, np.ndarray] = field(default_factory=dict)
    spec: SamplingSpec | None = None

    def __len__(self) -> int:
        return len(self.z_impact)

    @property
    def impacts(self) -> list[tuple[float, Outcome]]:
        return [(float(z), Outcome(int(o))) for z, o in zip(self.z_impact, self.outcome)]

    @property
    def n_up(self) -> int:
        return int(np.count_nonzero(self.outcome == Outcome.UP))

    @property
    def n_down(self) -> int:
        return int(np.count_nonzero(self.outcome == Outcome.DOWN))

    @property
    def up_fraction(self) -> float:
        return self.n_up / len(self)

    def positions_at(self, t: float | None) -> np.ndarray:
        if t is None or t == self.t_end:
            return self.z_impact
        try:
            return self.snapshots[float(t)]
        except KeyError:
            raise KeyError(f"no snapshot recorded at t={t!r}; "
                           f"available: {sorted(self.snapshots)}") from None


def run_ensemble(atoms, t_end: float, config: ExperimentConfig = _DEFAULT,
                 snapshots: Sequence[float] = (), dt_max: float | None = None,
                 workers: int = 1, chunk_size: int | None = None,
                 check_invariants: bool = True, spec: SamplingSpec | None = None) -> EnsembleResult:
    """Integrate every atom to ``t_end`` and tally the screen statistics.

    ``atoms`` is a sequence of :class:`PolarizedAtom` or an :class:`AtomArrays`.
    Work is split into chunks of ``chunk_size`` atoms run on ``workers``
    threads; results do not depend on either. Invariant checks (speed bound,
    non-crossing among equal ``theta0``) apply within each chunk.
    """
    arrays = atoms if isinstance(atoms, AtomArrays) else AtomArrays.from_atoms(list(atoms))
    n = len(arrays)
    if n == 0:
        raise ValueError("empty ensemble")
    if chunk_size is None:
        chunk_size = n if workers <= 1 else math.ceil(n / workers)
    starts = list(range(0, n, chunk_size))

    def job(start):
        sl = slice(start, min(start + chunk_size, n))
        try:
            return integrate_batch(arrays.theta0[sl], arrays.z0[sl], t_end, dt_max,
                                   snapshots, check_invariants, config)
        except InvariantViolation as exc:
            raise InvariantViolation(f"chunk starting at atom {start}: {exc}") from exc
        except RuntimeError as exc:
            index = getattr(exc, "index", None)
            if index is not None:
                exc.index = start + index
                exc.args = (f"atom {start + index}: {exc.args[0]}",)
            raise

    if workers <= 1 or len(starts) == 1:
        parts = [job(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))

    z = np.concatenate([p.z for p in parts])
    cos_t = np.concatenate([np.broadcast_to(p.cos_theta, p.z.shape) for p in parts])
    snaps = {t: np.concatenate([p.snapshots[t] for p in parts]) for t in parts[0].snapshots}
    return EnsembleResult(arrays, z, cos_t, classify(cos_t), float(t_end), snaps, spec)


@dataclass(frozen=True)
class ImpactMap:
    edges: np.ndarray
    mass: np.ndarray
    up_centroid: float
    down_centroid: float
    up_mass: float
    down_mass: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def mass_ratio(self) -> float:
        return self.up_mass / self.down_mass if self.down_mass else math.inf


def impact_map(result: EnsembleResult, bins: int = 100, t: float | None = None) -> ImpactMap:
    """Normalized histogram of screen positions and the two spot summaries.

    The spots are split at ``z = 0``: ``N+`` above, ``N-`` below.
    """
    z = result.positions_at(t)
    if len(z) == 0:
        raise ValueError("empty ensemble")
    lo, hi = float(z.min()), float(z.max())
    if lo == hi:
        pad = max(abs(lo) * 1e-9, 1e-15)
        edges = np.array([lo - pad, hi + pad])
        mass = np.array([1.0])
    else:
        counts, edges = np.histogram(z, bins=bins, range=(lo, hi))
        mass = counts / len(z)
    up = z[z > 0]
    dn = z[z < 0]
    return ImpactMap(
        edges,
        mass,
        math.fsum(up) / len(up) if len(up) else math.nan,
        math.fsum(dn) / len(dn) if len(dn) else math.nan,
        len(up) / len(z),
        len(dn) / len(z),
    )


def density_bin_masses(edges, t: float, config: ExperimentConfig = _DEFAULT) -> np.ndarray:
    """Mass of the averaged analytic density in each bin, at total time ``t``."""
    edges = np.asarray(edges, dtype=float)
    c = packet_offset(t, config)
    s = config.sigma0
    cdf = 0.5 * (ndtr((edges - c) / s) + ndtr((edges + c) / s))
    return np.diff(cdf)


def l1_distance(p, q) -> float:
    return math.fsum(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)))


def compare_to_density(result: EnsembleResult, t: float | None = None, bins: int = 100,
                       config: ExperimentConfig = _DEFAULT) -> float:
    """L1 distance between the empirical and analytic bin masses at time ``t``.

    Bins span ``+-(offset + 6 sigma0)``; the mass outside that window on
    either side is compared as two extra cells. Only meaningful for
    polarization laws whose average weights are 1/2 (uniform or sine).
    """
    t = result.t_end if t is None else float(t)
    z = result.positions_at(t)
    half = packet_offset(t, config) + 6.0 * config.sigma0
    edges = np.linspace(-half, half, bins + 1)
    counts, _ = np.histogram(z, bins=edges)
    n = len(z)
    emp = np.concatenate([[np.count_nonzero(z < -half)], counts, [np.count_nonzero(z > half)]]) / n
    inner = density_bin_masses(edges, t, config)
    tail = 0.5 * (1.0 - inner.sum())
    ana = np.concatenate([[tail], inner, [tail]])
    return l1_distance(emp, ana)


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)
