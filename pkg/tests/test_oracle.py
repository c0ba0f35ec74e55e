import math

import numpy as np
import pytest

from sterngerlach.grid import GridSpec
from sterngerlach.oracle import (
    BoundaryError,
    GridMismatch,
    GridWavefunction,
    analytic_on_grid,
    continuity_residual,
    evolve_linear_potential,
    first_moment,
    gaussian_on_grid,
    l2_error,
    oracle_grid,
    with_dt,
)
from sterngerlach.verify import continuity_grid, convergence_ratios, oracle_l2


def test_grid_spec_basics():
    g = GridSpec.symmetric(1.0, 8, 0.1)
    assert g.spacing == 0.25
    assert g.nodes.tolist() == [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75]
    assert g.closed_nodes()[-1] == 1.0
    assert g.is_power_of_two()
    assert not GridSpec(0, 1, 12).is_power_of_two()


@pytest.mark.parametrize("kw", [dict(z_min=1, z_max=0, n_points=8), dict(z_min=0, z_max=1, n_points=1),
                                dict(z_min=0, z_max=1, n_points=8, dt=0.0)])
def test_grid_spec_validation(kw):
    with pytest.raises(ValueError):
        GridSpec(**kw)


def test_oracle_rejects_small_or_odd_grids(config):
    with pytest.raises(ValueError):
        gaussian_on_grid(GridSpec.symmetric(1e-3, 128, 1e-8), config)
    with pytest.raises(ValueError):
        gaussian_on_grid(GridSpec.symmetric(1e-3, 1000, 1e-8), config)


def test_initial_norm(config):
    wf = gaussian_on_grid(oracle_grid(1024, config=config), config)
    assert wf.norm() == pytest.approx(1.0, abs=1e-12)


def test_zero_time_is_identity(config):
    wf = gaussian_on_grid(oracle_grid(512, config=config), config)
    assert evolve_linear_potential(wf, 1e-20, 0.0, config) is wf


def test_requires_dt(config):
    wf = gaussian_on_grid(GridSpec.symmetric(1e-3, 512), config)
    with pytest.raises(ValueError, match="dt"):
        evolve_linear_potential(wf, 0.0, 1e-6, config)
    with pytest.raises(ValueError):
        evolve_linear_potential(wf, 0.0, -1.0, config)


def test_norm_conserved_every_step(config, derived):
    grid = oracle_grid(512, derived.delta_t / 64, config=config)
    wf = gaussian_on_grid(grid, config)
    for _ in range(64):
        wf = evolve_linear_potential(wf, -config.force, grid.dt, config)
        assert abs(wf.norm() - 1.0) < 1e-10


def test_stepping_in_pieces_matches_single_run(config, derived):
    grid = oracle_grid(512, derived.delta_t / 64, config=config)
    wf0 = gaussian_on_grid(grid, config)
    a = evolve_linear_potential(wf0, config.force, derived.delta_t, config)
    b = wf0
    for _ in range(4):
        b = evolve_linear_potential(b, config.force, derived.delta_t / 4, config)
    assert b.t == pytest.approx(a.t)
    assert np.abs(a.values - b.values).max() < 1e-8 * np.abs(a.values).max()


@pytest.mark.parametrize("sign", [-1, 1])
def test_matches_analytic_at_exit(config, derived, sign):
    assert oracle_l2(sign * config.force, 2048, 2048, config) < 1e-3


def test_free_evolution_matches_exact_free_packet(config, derived):
    # K = 0: only the kinetic step acts, which is exact for a band-limited packet
    grid = oracle_grid(1024, derived.delta_t / 16, config=config)
    wf = evolve_linear_potential(gaussian_on_grid(grid, config), 0.0, derived.delta_t, config)
    assert l2_error(wf, analytic_on_grid(grid, 0.0, derived.delta_t, True, config)) < 1e-12


def test_second_order_convergence(config):
    ratios = convergence_ratios(-config.force, config, n_points=1024, steps=(256, 512, 1024))
    assert all(3.0 <= r <= 5.0 for r in ratios)


def test_first_moment_follows_classical_center(config, derived):
    grid = oracle_grid(1024, derived.delta_t / 1024, config=config)
    wf = gaussian_on_grid(grid, config)
    K = -config.force
    t = 0.0
    for _ in range(8):
        wf = evolve_linear_potential(wf, K, derived.delta_t / 8, config)
        t += derived.delta_t / 8
        assert abs(first_moment(wf) - (-K * t * t / (2 * config.m))) < 1e-3 * derived.z_delta


def test_boundary_guard(config, derived):
    grid = oracle_grid(256, derived.delta_t / 16, half_width_sigmas=4.0, config=config)
    with pytest.raises(BoundaryError):
        evolve_linear_potential(gaussian_on_grid(grid, config), 0.0, derived.delta_t, config)
    out = evolve_linear_potential(gaussian_on_grid(grid, config), 0.0, derived.delta_t, config,
                                  check_boundary=False)
    assert out.boundary_mass() > 1e-10


def test_l2_error_checks_compatibility(config, derived):
    g1 = oracle_grid(256, 1e-7, config=config)
    g2 = oracle_grid(512, 1e-7, config=config)
    a = gaussian_on_grid(g1, config)
    with pytest.raises(GridMismatch):
        l2_error(a, gaussian_on_grid(g2, config))
    with pytest.raises(GridMismatch):
        l2_error(a, np.zeros(10))
    with pytest.raises(GridMismatch):
        l2_error(a, GridWavefunction(g1, a.envelope, t=1.0))
    assert l2_error(a, a) == 0.0
    assert l2_error(a, np.zeros(256)) == pytest.approx(1.0, abs=1e-12)


def test_carrier_is_physical_wavenumber(config, derived):
    grid = oracle_grid(1024, derived.delta_t / 64, config=config)
    wf = evolve_linear_potential(gaussian_on_grid(grid, config), -config.force, derived.delta_t, config)
    assert wf.carrier == pytest.approx(config.m * derived.u / config.hbar, rel=1e-14)


def test_with_dt(config):
    g = oracle_grid(256, config=config)
    assert with_dt(g, 3e-9).dt == 3e-9 and with_dt(g, 3e-9).n_points == 256


# --- continuity ---------------------------------------------------------------

def test_continuity_post_field(config, derived):
    t = derived.delta_t + derived.t_s / 2
    assert continuity_residual(t, math.pi / 3, continuity_grid(t, config, 2048), config) < 1e-3


def test_continuity_pure_state(config, derived):
    t = derived.delta_t / 2
    assert continuity_residual(t, 0.0, continuity_grid(t, config, 2048), config) < 1e-3


def test_continuity_static_free_packet(config):
    free = config.replace(B0_prime=0.0)
    t = 1e-4
    assert continuity_residual(t, 1.0, continuity_grid(t, free, 1024), free) < 1e-12


def test_continuity_detects_wrong_velocity(config, derived, monkeypatch):
    from sterngerlach import oracle

    monkeypatch.setattr(oracle, "velocity_at", lambda z, t, th, c: 0.5 * derived.u + 0 * z)
    t = derived.delta_t + derived.t_s
    assert continuity_residual(t, math.pi / 3, continuity_grid(t, config, 1024), config) > 1e-2


def test_continuity_needs_positive_time(config):
    with pytest.raises(ValueError):
        continuity_residual(0.0, 1.0, continuity_grid(0.0, config, 256), config)
