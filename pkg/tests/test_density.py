import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sterngerlach.density import (
    classical_paths,
    default_profile_grid,
    density_after_field,
    density_at,
    density_in_field,
    density_profile,
    local_maxima,
    packet_offset,
    separation_time,
)
from sterngerlach.grid import GridSpec
from sterngerlach.propagator import PolarizedAtom, free_packet, spinor_at


def gauss(z, c, s):
    return np.exp(-((z - c) ** 2) / (2 * s * s)) / math.sqrt(2 * math.pi * s * s)


def test_initial_density_is_single_gaussian(config):
    z = np.linspace(-5e-4, 5e-4, 101)
    np.testing.assert_allclose(density_in_field(z, 0.0, config), gauss(z, 0, config.sigma0), rtol=1e-14)


def test_density_matches_theta0_average_of_spinor(config, derived):
    # independent route: average |psi+|^2 + |psi-|^2 over theta0 by quadrature
    t = derived.delta_t + 0.7 * derived.t_s
    z = np.linspace(-8e-4, 8e-4, 161)
    th = np.linspace(0, math.pi, 401)
    px = abs(free_packet(0.0, t, False, config)) ** 2
    rows = [spinor_at(PolarizedAtom(a), 0.0, z, t, False, config).density / px for a in th]
    avg = np.trapezoid(np.array(rows), th, axis=0) / math.pi
    np.testing.assert_allclose(density_at(z, t, config), avg, rtol=1e-9, atol=1e-9 * avg.max())


def test_density_regimes_join(config, derived):
    z = np.linspace(-5e-4, 5e-4, 51)
    a = density_in_field(z, derived.delta_t, config)
    b = density_after_field(z, 0.0, config)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_density_rejects_bad_times(config, derived):
    with pytest.raises(ValueError):
        density_in_field(0.0, 2 * derived.delta_t, config)
    with pytest.raises(ValueError):
        density_after_field(0.0, -1.0, config)
    with pytest.raises(ValueError):
        packet_offset(-1.0, config)


def test_exact_mode_is_wider(config, derived):
    t = derived.delta_t + 50 * derived.t_s
    assert density_at(0.0, 0.0, config, exact=True) == density_at(0.0, 0.0, config)
    off = packet_offset(t, config)
    assert density_at(off, t, config, exact=True) < density_at(off, t, config)


@pytest.mark.parametrize("frac", [0.0, 0.3, 1.0, 1.7, 10.0])
def test_density_is_normalized(config, derived, frac):
    t = derived.delta_t * min(frac, 1.0) + derived.t_s * max(frac - 1.0, 0.0)
    p = density_profile(t, default_profile_grid(t, config, 4096), config)
    assert p.integral() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(t=st.floats(0.0, 1e-3), z=st.floats(-2e-3, 2e-3))
def test_density_symmetric_in_z(t, z):
    assert density_at(z, t) == density_at(-z, t)


def test_classical_paths(config, derived):
    assert classical_paths(derived.delta_t, config) == pytest.approx((derived.z_delta, -derived.z_delta))
    # half-way through the magnet: (1/2) a (dt/2)^2 = z_delta / 4
    zp, _ = classical_paths(derived.delta_t / 2, config)
    assert zp == pytest.approx(derived.z_delta / 4, rel=1e-14)
    zp, zm = classical_paths(derived.delta_t + 1e-4, config)
    assert zp == pytest.approx(derived.z_delta + derived.u * 1e-4, rel=1e-14)
    assert zm == -zp


def test_separation_time(config, derived):
    assert separation_time(config) == derived.t_s
    assert 2 * (packet_offset(derived.delta_t + derived.t_s, config)) > 6 * config.sigma0


def test_profile_grid_must_cover_packets(config):
    with pytest.raises(ValueError, match="does not cover"):
        density_profile(4e-4, GridSpec(-1e-4, 1e-4, 128), config)


def test_profile_metadata(config):
    p = density_profile(2.2e-4, None, config)
    assert p.y == pytest.approx(0.11)
    assert len(p.grid_z) == 1024
    assert p.grid_z[0] == -p.grid_z[-1]


@pytest.mark.parametrize("y, modes", [(0.0, 1), (0.01, 1), (0.11, 2), (0.21, 2)])
def test_profile_modality(config, y, modes):
    assert len(density_profile(y / config.v, None, config).peaks()) == modes


def test_bimodality_onset_matches_mixture_theory(config, derived):
    # an equal mixture of two Gaussians is bimodal iff the centers are > 2 sigma apart
    t_onset = derived.delta_t + (config.sigma0 - derived.z_delta) / derived.u
    assert not density_profile(t_onset * 0.98, None, config).is_bimodal()
    assert density_profile(t_onset * 1.02, None, config).is_bimodal()


def test_local_maxima_refines_parabola():
    z = np.linspace(-1, 1, 11)
    v = 1 - (z - 0.03) ** 2
    assert local_maxima(z, v) == pytest.approx([0.03], abs=1e-12)


def test_local_maxima_ignores_underflow_plateaus():
    z = np.linspace(-1, 1, 201)
    v = np.exp(-z * z / 0.01)
    v[:5] = 1e-300
    assert len(local_maxima(z, v)) == 1
