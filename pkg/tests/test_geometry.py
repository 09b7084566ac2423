import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcph.errors import DomainError
from mcph.geometry import (
    LensGeometry,
    ball_volume,
    lens_volume,
    lens_volume_derivative,
    sample_uniform_ball,
    sample_uniform_shell,
)

from conftest import slice_volume


@pytest.mark.parametrize(
    "dist, r, R, expected",
    [
        (10, 60, 50, 4 / 3 * math.pi * 50**3),
        (10, 40, 50, 4 / 3 * math.pi * 40**3),
        # equal-spheres lens pi (4R + d)(2R - d)^2 / 12; slice integral agrees
        (50, 50, 50, math.pi * 250 * 2500 / 12),
        (200, 10, 50, 0.0),
    ],
)
def test_lens_volume_examples(dist, r, R, expected):
    assert lens_volume(dist, r, R) == pytest.approx(expected, rel=1e-12, abs=1e-9)


def test_lens_geometry_wrapper():
    g = LensGeometry(50.0, 50.0, 50.0)
    assert g.volume() == pytest.approx(163624.6173744684, rel=1e-12)
    with pytest.raises(DomainError):
        LensGeometry(-1.0, 2.0, 3.0)


def test_lens_volume_rejects_negative():
    with pytest.raises(DomainError):
        lens_volume(1.0, -2.0, 3.0)
    with pytest.raises(DomainError):
        lens_volume(1.0, 2.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.0, 150.0),
    st.floats(0.0, 150.0),
    st.floats(0.5, 100.0),
)
def test_lens_volume_matches_slice_integral(dist, r, R):
    assert lens_volume(dist, r, R) == pytest.approx(slice_volume(dist, r, R), rel=1e-9, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 150.0), st.floats(0.5, 100.0), st.floats(0.5, 100.0))
def test_lens_volume_symmetric(dist, r, R):
    assert lens_volume(dist, r, R) == pytest.approx(lens_volume(dist, R, r), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("dist, R", [(10.0, 50.0), (20.0, 50.0), (70.0, 50.0), (5.0, 15.0)])
def test_lens_volume_continuous_at_regime_edges(dist, R):
    for edge in (abs(R - dist), R + dist):
        left = lens_volume(dist, edge * (1 - 1e-13), R)
        right = lens_volume(dist, edge * (1 + 1e-13), R)
        at = lens_volume(dist, edge, R)
        assert abs(left - right) <= 1e-9 * max(at, 1.0)


def test_lens_volume_nondecreasing_in_r():
    r = np.linspace(0, 130, 5001)
    v = np.array([lens_volume(30.0, t, 50.0) for t in r])
    assert np.all(np.diff(v) >= -1e-9 * v.max())


def test_concentric_limit():
    assert lens_volume(1e-12, 30.0, 50.0) == ball_volume(30.0)


@pytest.mark.parametrize(
    "dist, r, R, expected",
    [
        # frozen from centred finite differences of lens_volume (h = 1e-4)
        (20, 30, 50, 3600 * math.pi),
        (10, 60, 50, 0.0),
        (10, 40, 50, 6400 * math.pi),
    ],
)
def test_lens_volume_derivative_examples(dist, r, R, expected):
    assert lens_volume_derivative(dist, r, R) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("dist, R", [(20.0, 50.0), (60.0, 50.0), (5.0, 15.0), (30.0, 15.0)])
def test_lens_volume_derivative_finite_difference(dist, R):
    lo, hi = abs(R - dist), R + dist
    h = 1e-4
    for r in np.linspace(lo, hi, 13)[1:-1]:
        fd = (lens_volume(dist, r + h, R) - lens_volume(dist, r - h, R)) / (2 * h)
        assert lens_volume_derivative(dist, r, R) == pytest.approx(fd, rel=1e-6)


def test_lens_volume_derivative_domain():
    with pytest.raises(DomainError):
        lens_volume_derivative(0.0, 10.0, 50.0)
    with pytest.raises(DomainError):
        lens_volume_derivative(10.0, 5.0, 50.0)


def test_ball_sampling_support_and_moments(rng):
    pts = sample_uniform_ball(np.array([1.0, -2.0, 3.0]), 50.0, rng, size=10**6)
    d = np.linalg.norm(pts - [1.0, -2.0, 3.0], axis=1)
    assert d.min() >= 0 and d.max() <= 50.0
    # E[d] = 3R/4, sd of d is R*sqrt(3/80); 1e6 draws give SE 0.0097
    assert abs(d.mean() - 37.5) < 0.03
    assert abs(np.mean(d <= 25.0) - 0.125) < 0.001


def test_ball_sampling_single_point(rng):
    p = sample_uniform_ball(np.zeros(3), 2.0, rng)
    assert p.shape == (3,) and np.linalg.norm(p) <= 2.0
    with pytest.raises(DomainError):
        sample_uniform_ball(np.zeros(3), 0.0, rng)


def test_ball_sampling_is_isotropic(rng):
    pts = sample_uniform_ball(np.zeros(3), 1.0, rng, size=200_000)
    # each coordinate has mean 0 and variance R^2/5
    assert np.all(np.abs(pts.mean(axis=0)) < 0.006)
    assert np.allclose(pts.var(axis=0), 0.2, atol=0.003)


def test_shell_sampling(rng):
    pts = sample_uniform_shell(np.zeros(3), 15.0, 50.0, rng, size=10**6)
    d = np.linalg.norm(pts, axis=1)
    assert d.min() >= 15.0 and d.max() <= 50.0
    expected = (30**3 - 15**3) / (50**3 - 15**3)
    assert expected == pytest.approx(0.194245, abs=1e-6)
    assert abs(np.mean(d <= 30.0) - expected) < 0.001


def test_shell_without_hole_is_ball():
    a = sample_uniform_shell(np.zeros(3), 0.0, 5.0, np.random.default_rng(3), size=1000)
    b = sample_uniform_ball(np.zeros(3), 5.0, np.random.default_rng(3), size=1000)
    assert np.array_equal(a, b)


def test_shell_domain(rng):
    with pytest.raises(DomainError):
        sample_uniform_shell(np.zeros(3), 5.0, 5.0, rng)
