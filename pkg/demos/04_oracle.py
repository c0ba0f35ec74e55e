"""
Checking the closed form against a PDE solver
=============================================

Each spinor component obeys a Schrodinger equation with a linear potential.
We integrate it with a split-operator FFT scheme and compare with the
closed-form packet at the magnet exit. Halving the time step should cut the
error by four (second order).
"""
from sterngerlach import default_config, derive
from sterngerlach.oracle import continuity_residual
from sterngerlach.verify import continuity_grid, continuity_samples, oracle_l2

config = default_config()
d = derive(config)
K_up = -config.force

prev = None
for steps in (512, 1024, 2048, 4096):
    err = oracle_l2(K_up, 4096, steps, config)
    ratio = "" if prev is None else f"   ratio {prev / err:.3f}"
    print(f"dt = delta_t/{steps:<5d} L2 error {err:.3e}{ratio}")
    prev = err

# The Bohmian velocity carries the density: d rho/dt + d(rho v)/dz = 0.
for t, theta0 in continuity_samples(config):
    r = continuity_residual(t, theta0, continuity_grid(t, config), config)
    print(f"t = {t:.3e} s, theta0 = {theta0:.3f}: continuity residual {r:.2e}")
