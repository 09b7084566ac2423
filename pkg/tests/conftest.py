import math

import numpy as np
import pytest
from scipy.integrate import quad

from mcph.params import ProcessParams


def slice_volume(d, r, R):
    """Volume of b(o, r) ∩ b((d,0,0), R) by integrating cross-sectional disk areas along the axis."""

    def area(z):
        return math.pi * max(0.0, min(r * r - z * z, R * R - (z - d) ** 2))

    lo, hi = max(-r, d - R), min(r, d + R)
    if hi <= lo:
        return 0.0
    pts = None
    if d > 0:
        zc = (d * d + r * r - R * R) / (2 * d)
        if lo < zc < hi:
            pts = [zc]
    return quad(area, lo, hi, points=pts, epsabs=1e-9, epsrel=1e-13, limit=200)[0]


@pytest.fixture
def holed_params():
    """R = 50 m, r0 = 15 m, M2 = 20 at the lower parent intensity."""
    return ProcessParams.from_m2(1e-5, 50.0, 15.0, 20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
