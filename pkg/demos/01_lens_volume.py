"""
Intersection volume of two balls
================================

Everything in the distance distributions comes back to one quantity: the
volume shared by a ball of radius r around the origin and a ball of radius
R around a point at distance d.
"""

import math

import numpy as np

from mcph.geometry import LensGeometry, lens_volume, lens_volume_derivative

# Far apart the balls do not meet, and when one sits inside the other the
# overlap is just the smaller ball.
print("disjoint        ", lens_volume(100.0, 30.0, 50.0))
print("r inside R      ", lens_volume(10.0, 30.0, 50.0), "=", 4 / 3 * math.pi * 30**3)

# In between, the overlap grows smoothly with r.
for r in (20.0, 40.0, 60.0):
    print(f"d=20 R=50 r={r:4.0f}  V={lens_volume(20.0, r, 50.0):12.2f}")

# The derivative in r is the area of the sphere of radius r inside the
# other ball, which is what turns the volume into a density.
g = LensGeometry(20.0, 40.0, 50.0)
h = 1e-4
fd = (lens_volume(20.0, 40.0 + h, 50.0) - lens_volume(20.0, 40.0 - h, 50.0)) / (2 * h)
print("derivative", g.volume_derivative(), "finite difference", fd)
print("as a multiple of pi:", lens_volume_derivative(20.0, 40.0, 50.0) / math.pi)

# A quick rejection estimate agrees with the closed form.
rng = np.random.default_rng(1)
pts = rng.uniform(-40, 40, size=(400_000, 3))
inside = (np.sum(pts**2, axis=1) <= 40**2) & (np.sum((pts - [20, 0, 0]) ** 2, axis=1) <= 50**2)
print("Monte Carlo", 80**3 * inside.mean(), "closed form", g.volume())
