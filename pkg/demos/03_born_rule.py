"""
Quantization from deterministic paths
=====================================

Nothing random happens in the magnet: the outcome is fixed by theta0 and the
initial height. The Born rule appears because initial heights are
Gaussian-distributed. For a fixed theta0 the fraction of "up" atoms is
P(z0 > threshold) = cos^2(theta0 / 2).
"""
import math

from sterngerlach import SamplingSpec, default_config, run_ensemble
from sterngerlach.ensemble import binomial_sigma, compare_to_density, impact_map, sample_arrays
from sterngerlach.model import screen_time

config = default_config()
t_screen = screen_time(config)
n = 5000

for theta0 in (math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3):
    spec = SamplingSpec(n, seed=1, theta0=theta0, phi0=0.0)
    r = run_ensemble(sample_arrays(spec, config), t_screen, config)
    p = math.cos(theta0 / 2) ** 2
    print(f"theta0 = {theta0:.3f}: up fraction {r.up_fraction:.4f}, "
          f"Born {p:.4f} +- {binomial_sigma(p, n):.4f}")

# With theta0 uniform on [0, pi], half the atoms land in each spot and the
# screen histogram follows the averaged quantum density.
spec = SamplingSpec(n, seed=2)
r = run_ensemble(sample_arrays(spec, config), t_screen, config)
m = impact_map(r, bins=60)
print(f"uniform theta0: up fraction {r.up_fraction:.4f}; spots at "
      f"{m.up_centroid * 1e3:+.3f} mm and {m.down_centroid * 1e3:+.3f} mm")
print(f"L1 distance to the analytic density: {compare_to_density(r, None, 60, config):.4f}")
