"""
Bohmian trajectories through the magnet
=======================================

Each atom has a definite position. Its velocity follows from the spinor
phases, and the local spin direction theta(z, t) is fixed by the ratio of the
two component amplitudes. We integrate a handful of atoms that share the
polarization theta0 = pi/3, starting at evenly spaced initial heights, and
watch them sort themselves into the two spots.
"""
import math
import sys
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from sterngerlach import PolarizedAtom, default_config, derive, integrate_trajectory, threshold_z
from sterngerlach.io import svg_trajectories
from sterngerlach.model import screen_time

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo-out")
out.mkdir(exist_ok=True)

config = default_config()
d = derive(config)
theta0 = math.pi / 3

# initial heights at the deciles of the initial Gaussian
z0 = config.sigma0 * ndtri(np.linspace(0.05, 0.95, 10))
trajs = [integrate_trajectory(PolarizedAtom(theta0, 0.0, z), screen_time(config), None, config)
         for z in z0]

# Atoms above the threshold end up; the rest end down. The 25% quantile sits
# right on the threshold for pi/3, so that atom rides the axis and is still
# unresolved when it reaches the screen.
zt = threshold_z(theta0, config)
print(f"threshold for theta0 = pi/3: z = {zt * 1e6:+.2f} um")
for tr in trajs:
    if abs(tr.atom.z0 - zt) < 0.02 * config.sigma0:
        side = "at"
    else:
        side = "above" if tr.atom.z0 > zt else "below"
    print(f"z0 = {tr.atom.z0 * 1e6:+8.2f} um ({side})  ->  "
          f"screen z = {tr.final_z * 1e3:+.3f} mm, final cos(theta) = {tr.cos_theta[-1]:+.4f}, {tr.outcome.name}")

# The spin is not flipped by a kick: it rotates continuously toward +-z.
tr = trajs[6]
for k in (0, 1000, 2000, 3000, len(tr.t) - 1):
    print(f"  t = {tr.t[k]:.2e} s  z = {tr.z[k] * 1e6:+8.2f} um  cos(theta) = {tr.cos_theta[k]:+.4f}")

svg_trajectories(trajs, config, out / "trajectories.svg", d.t_s / 10,
                 title="theta0 = pi/3, deciles of the initial packet")
