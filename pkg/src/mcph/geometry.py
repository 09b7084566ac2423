"""Ball intersection volumes and uniform sampling in balls and shells.

All lengths are plain floats in metres. Points are numpy arrays whose last
axis holds ``(x, y, z)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

# separations below CONCENTRIC_TOL * radius are treated as exactly concentric
CONCENTRIC_TOL = 1e-9


class Point3(NamedTuple):
    x: float
    y: float
    z: float

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class LensGeometry:
    """Two balls: ``b(o, r)`` at the origin and ``b(x, R)`` with ``|x| = dist``."""

    dist: float
    r: float
    R: float

    def __post_init__(self):
        _check_lens_args(self.dist, self.r, self.R)

    def volume(self):
        return lens_volume(self.dist, self.r, self.R)

    def volume_derivative(self):
        return lens_volume_derivative(self.dist, self.r, self.R)


def _check_lens_args(dist, r, R):
    for name, val in (("dist", dist), ("r", r), ("R", R)):
        if not math.isfinite(val):
            raise DomainError(f"{name} must be finite, got {val!r}")
    if dist < 0 or r < 0:
        raise DomainError(f"negative length: dist={dist}, r={r}")
    if R <= 0:
        raise DomainError(f"R must be positive, got {R}")


def ball_volume(radius):
    return 4.0 / 3.0 * math.pi * radius**3


def lens_volume(dist, r, R):
    """Volume of ``b(o, r) ∩ b(x, R)`` where ``|x| = dist``.

    Covers all three regimes: disjoint balls (0), one ball inside the other
    (volume of the smaller ball), and a proper lens.
    """
    _check_lens_args(dist, r, R)
    if dist < CONCENTRIC_TOL * R or dist <= abs(R - r):
        return ball_volume(min(r, R))
    if r + R <= dist:
        return 0.0
    return (
        math.pi
        * (R + r - dist) ** 2
        * (dist**2 + 2 * dist * r - 3 * r**2 + 2 * dist * R + 6 * r * R - 3 * R**2)
        / (12.0 * dist)
    )


def lens_volume_derivative(dist, r, R):
    """d/dr of :func:`lens_volume` on the lens regime ``|R - dist| <= r <= R + dist``."""
    _check_lens_args(dist, r, R)
    if dist == 0:
        raise DomainError("dist = 0: use the concentric derivative 4*pi*r**2")
    slack = 1e-12 * (R + dist)
    if r < abs(R - dist) - slack or r > R + dist + slack:
        raise DomainError(
            f"r={r} outside lens regime [{abs(R - dist)}, {R + dist}]"
        )
    return math.pi * r * (R + r - dist) * (R - r + dist) / dist


def _resolve_rng(rng):
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    return rng


def random_directions(n, rng):
    """``n`` unit vectors uniform on the sphere (normalised Gaussian triples)."""
    v = rng.standard_normal((n, 3))
    norm = np.linalg.norm(v, axis=1)
    # a zero triple has probability zero but would divide by zero
    bad = norm == 0
    while np.any(bad):
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        norm[bad] = np.linalg.norm(v[bad], axis=1)
        bad = norm == 0
    return v / norm[:, None]


def sample_uniform_ball(center, R, rng=None, size=None):
    """Uniform draw(s) in ``b(center, R)``.

    Radius by inverse CDF ``R * U**(1/3)``, direction from normalised
    Gaussians; no rejection loop. Returns shape ``(3,)`` when ``size`` is None,
    otherwise ``(size, 3)``.
    """
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    return sample_uniform_shell(center, 0.0, R, rng, size)


def sample_uniform_shell(center, r0, R, rng=None, size=None):
    """Uniform draw(s) in the shell ``b(center, R) \\ b(center, r0)``.

    The radius is drawn by inverting ``(t**3 - r0**3) / (R**3 - r0**3)``.
    """
    if not 0 <= r0 < R:
        raise DomainError(f"need 0 <= r0 < R, got r0={r0}, R={R}")
    rng = _resolve_rng(rng)
    n = 1 if size is None else int(size)
    center = np.asarray(center, dtype=float)
    u = rng.random(n)
    if r0 == 0:
        radius = R * np.cbrt(u)
    else:
        radius = np.cbrt(r0**3 + u * (R**3 - r0**3))
    pts = center + radius[:, None] * random_directions(n, rng)
    return pts[0] if size is None else pts
