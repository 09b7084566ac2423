import math

import numpy as np
import pytest
from scipy.integrate import quad

from mcph.distributions import (
    breakpoints,
    case_edges,
    classify_case,
    distance_cdf,
    distance_pdf,
    hole_correction,
    mcp_distance_cdf,
    mcp_distance_pdf,
    mcph_distance_cdf_ub,
    mcph_distance_pdf_ub,
    pieces,
)
from mcph.errors import DomainError
from mcph.params import Process, ProcessParams
from mcph.sampling import make_rng
from mcph.validation import mc_conditional_distances

from conftest import slice_volume

R = 50.0
MCP = ProcessParams(1e-5, R, 0.0, 20.0, 20.0)
HOLED = ProcessParams(1e-5, R, 15.0, 20.0, 20.0)


def shell_cdf_oracle(r, x, R, r0):
    """P(|x + Y| <= r) for Y uniform in the shell, from slice-integrated volumes."""
    inside = slice_volume(x, r, R) - (slice_volume(x, r, r0) if r0 > 0 else 0.0)
    return inside / (4 / 3 * math.pi * (R**3 - r0**3))


def integral(params, process, x, upper):
    pts = [p for p in breakpoints(x, params, process) if p < upper]
    return quad(lambda r: distance_pdf(r, x, params, process).value, 0, upper,
                points=pts or None, epsabs=1e-14, epsrel=1e-13, limit=500)[0]


# ---------------------------------------------------------------- cases

def test_classify_examples():
    assert classify_case(10, HOLED, Process.MCPH).case_no == 1
    assert classify_case(50, MCP, Process.MCP).case_no == 2
    assert classify_case(49.99, MCP, Process.MCP).case_no == 1
    assert classify_case(60, HOLED, Process.MCPH).case_no == 6
    assert classify_case(20, HOLED, Process.MCPH).case_no == 4
    assert classify_case(16, HOLED, Process.MCPH).case_no == 3


@pytest.mark.parametrize(
    "r0, expected",
    [
        (10.0, {1, 3, 4, 5, 6}),        # r0 < R/3: case 2 empty
        (R / 3, {1, 4, 5, 6}),          # r0 = R/3: cases 2 and 3 empty
        (20.0, {1, 2, 4, 5, 6}),        # r0 > R/3: case 3 empty
    ],
)
def test_empty_cases_never_returned(r0, expected):
    p = ProcessParams(1e-5, R, r0, 20, 20)
    seen = {classify_case(x, p, "mcph").case_no for x in np.linspace(0, 80, 16001)}
    assert seen == expected


def test_case_edges_ordered():
    for r0 in (0.0, 5.0, 15.0, R / 3, 24.9, 40.0):
        edges = case_edges(ProcessParams(1e-5, R, r0, 20, 20), "mcph")
        assert all(a <= b for a, b in zip(edges, edges[1:]))


def test_partition_totality():
    rng = np.random.default_rng(5)
    for _ in range(300):
        r0 = rng.uniform(0, 45)
        p = ProcessParams(1e-5, R, r0, 20, 20)
        x = rng.uniform(0, 120)
        _, ps = pieces(x, p, "mcph")
        for r in rng.uniform(0, 200, 20):
            claims = [q for q in ps if q.lo <= r < q.hi]
            assert len(claims) == 1


def test_branch_reported_for_r():
    idx = classify_case(10, HOLED, "mcph", r=4)
    assert (idx.case_no, idx.branch_no) == (1, 1)
    assert classify_case(20, HOLED, "mcph", r=30).branch_no == 3


# ---------------------------------------------------------------- MCP

def test_mcp_pdf_examples():
    assert mcp_distance_pdf(25, 0, MCP).value == pytest.approx(0.015, rel=1e-14)
    # both printed branches at r = R - |x| = 30
    ball_branch = 3 * 30**2 / R**3
    lens_branch = 0.75 * 30 * (R - 20 + 30) * (R + 20 - 30) / (R**3 * 20)
    assert ball_branch == pytest.approx(0.0216, rel=1e-14)
    assert lens_branch == pytest.approx(0.0216, rel=1e-14)
    assert mcp_distance_pdf(30, 20, MCP).value == pytest.approx(0.0216, rel=1e-14)
    assert mcp_distance_pdf(75, 20, MCP).value == 0.0


def test_mcp_pdf_matches_histogram():
    cdf = mc_conditional_distances(20.0, MCP, "ball", 10**6, seed=11)
    d = cdf.sorted_samples
    for centre in (10.0, 30.0, 45.0, 60.0):
        h = 0.5
        frac = np.mean((d >= centre - h) & (d < centre + h)) / (2 * h)
        assert frac == pytest.approx(mcp_distance_pdf(centre, 20, MCP).value, rel=0.03)


def test_mcp_cdf_examples():
    assert mcp_distance_cdf(30, 20, MCP) == pytest.approx(0.216, rel=1e-14)
    assert mcp_distance_cdf(0, 20, MCP) == 0.0
    assert mcp_distance_cdf(70, 20, MCP) == 1.0


@pytest.mark.parametrize("x", [0.0, 5.0, 20.0, 49.9, 50.0, 75.0, 200.0])
def test_mcp_cdf_matches_volume_oracle(x):
    for r in np.linspace(0, x + R, 23)[1:]:
        assert mcp_distance_cdf(r, x, MCP) == pytest.approx(shell_cdf_oracle(r, x, R, 0.0), abs=1e-10)


# ---------------------------------------------------------------- MCP-H

def test_mcph_pdf_zero_inside_hole():
    ev = mcph_distance_pdf_ub(4, 10, HOLED)
    assert ev.value == 0.0
    assert (ev.case.case_no, ev.case.branch_no) == (1, 1)


def test_mcph_pdf_x20_r30_case4():
    ev = mcph_distance_pdf_ub(30, 20, HOLED)
    assert ev.case.case_no == 4
    c = R**3 - 15**3
    assert ev.value == pytest.approx(3 * 30 * (R**2 - 15**2) / (4 * 20 * c), rel=1e-14)
    # self-hole MC histogram oracle
    emp = mc_conditional_distances(20.0, HOLED, "shell", 10**6, seed=3).sorted_samples
    h = 0.5
    frac = np.mean((emp >= 30 - h) & (emp < 30 + h)) / (2 * h)
    assert frac == pytest.approx(ev.value, rel=0.03)


def test_mcph_cdf_endpoints():
    for x in (0.0, 10.0, 20.0, 40.0, 70.0):
        assert mcph_distance_cdf_ub(0, x, HOLED) == 0.0
        assert mcph_distance_cdf_ub(x + R, x, HOLED) == 1.0


def test_mcph_cdf_rejection_oracle():
    # fraction of shell points within 30 m of the origin, parent at 25 m
    rng = make_rng(99, 0)
    n = 10**6
    from mcph.geometry import sample_uniform_shell
    pts = sample_uniform_shell(np.array([25.0, 0, 0]), 15.0, R, rng, size=n)
    p_hat = np.mean(np.linalg.norm(pts, axis=1) <= 30.0)
    se = math.sqrt(p_hat * (1 - p_hat) / n)
    assert abs(mcph_distance_cdf_ub(30, 25, HOLED) - p_hat) < 3 * se


@pytest.mark.parametrize("r0", [5.0, 15.0, R / 3, 20.0, 24.9, 40.0])
def test_mcph_cdf_matches_volume_oracle(r0):
    p = ProcessParams(1e-5, R, r0, 20, 20)
    for x in np.linspace(0, 80, 33):
        for r in np.linspace(0, x + R, 17)[1:]:
            assert mcph_distance_cdf_ub(r, x, p) == pytest.approx(
                shell_cdf_oracle(r, x, R, r0), abs=1e-10
            ), (x, r)


def test_pdf_integrates_to_cdf():
    rng = np.random.default_rng(17)
    for _ in range(50):
        r0 = rng.choice([5.0, 15.0, 24.9])
        p = ProcessParams(1e-5, R, r0, 20, 20)
        x = rng.uniform(0, 80)
        r = rng.uniform(0, x + R)
        assert integral(p, "mcph", x, r) == pytest.approx(mcph_distance_cdf_ub(r, x, p), abs=1e-8)


def _x_grid_per_case(p):
    lo = 0.0
    xs = []
    for hi in case_edges(p, "mcph"):
        top = min(hi, 120.0)
        if top > lo:
            xs += list(np.linspace(lo, top, 4)[1:-1])
        lo = hi
    return xs


@pytest.mark.parametrize("r0", [5.0, 15.0, 24.9])
def test_mcph_normalization(r0):
    p = ProcessParams(1e-5, R, r0, 20, 20)
    for x in [0.0] + _x_grid_per_case(p):
        assert integral(p, "mcph", x, x + R) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("x", [0, 10, 25, 49.9, 50, 75, 200])
def test_mcp_normalization(x):
    assert integral(MCP, "mcp", x, x + R) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("r0", [0.0, 5.0, 15.0, R / 3, 24.9, 40.0])
def test_pdf_continuous_at_branch_boundaries(r0):
    p = ProcessParams(1e-5, R, r0, 20, 20)
    for process in ("mcp", "mcph") if r0 == 0 else ("mcph",):
        for x in np.linspace(0.5, 90, 60):
            for b in breakpoints(x, p, process):
                left = distance_pdf(b * (1 - 1e-12), x, p, process).value
                right = distance_pdf(b, x, p, process).value
                scale = 3 / R  # peak density order
                assert abs(left - right) <= 1e-9 * scale, (x, b)


@pytest.mark.parametrize("process, r0", [("mcp", 0.0), ("mcph", 15.0), ("mcph", 24.9)])
def test_cdf_monotone(process, r0):
    p = ProcessParams(1e-5, R, r0, 20, 20)
    r = np.linspace(0, 130, 10_000)
    for x in (0.0, 7.0, 16.0, 20.0, 35.0, 49.0, 60.0):
        F = np.array([distance_cdf(t, x, p, process) for t in r])
        assert np.all(np.diff(F) >= -1e-12)


def test_degenerate_hole_equals_mcp():
    p0 = ProcessParams(1e-5, R, 0.0, 20, 20)
    xs = np.linspace(0, 120, 100)
    rs = np.linspace(0, 170, 100)
    worst_pdf = worst_cdf = 0.0
    for x in xs:
        for r in rs:
            worst_pdf = max(worst_pdf, abs(mcph_distance_pdf_ub(r, x, p0).value - mcp_distance_pdf(r, x, p0).value))
            worst_cdf = max(worst_cdf, abs(mcph_distance_cdf_ub(r, x, p0) - mcp_distance_cdf(r, x, p0)))
    assert worst_pdf < 1e-12 and worst_cdf < 1e-12


def test_concentric_limits():
    assert mcph_distance_pdf_ub(20, 0.0, HOLED).value == pytest.approx(3 * 400 / (R**3 - 15**3))
    assert mcph_distance_pdf_ub(10, 0.0, HOLED).value == 0.0
    assert mcph_distance_pdf_ub(20, 1e-12, HOLED).value == mcph_distance_pdf_ub(20, 0.0, HOLED).value


@pytest.mark.parametrize("lam", [1e-5, 2e-5])
@pytest.mark.parametrize("x", [10.0, 30.0, 60.0])
def test_upper_bound_direction(lam, x):
    p = ProcessParams(lam, R, 15.0, 20, 20)
    emp = mc_conditional_distances(x, p, "exact", 100_000, seed=7)
    grid = np.linspace(0, x + R, 41)
    F = emp.evaluate(grid)
    se = emp.se(grid)
    ub = np.array([mcph_distance_cdf_ub(r, x, p) for r in grid])
    assert np.all(ub >= F - 3 * np.maximum(se, 1.0 / emp.n))


def test_hole_correction():
    assert hole_correction(0.0, 15.0) == 1.0
    assert hole_correction(2e-5, 15.0) == pytest.approx(1 - 4 / 3 * math.pi * 2e-5 * 3375)
    assert hole_correction(2e-5, 15.0) == pytest.approx(0.71726, abs=5e-6)
    assert hole_correction(1e-5, 15.0) == pytest.approx(0.85863, abs=5e-6)
    with pytest.raises(DomainError):
        hole_correction(1e-3, 15.0)


def test_overlap_correction_scales_pdf():
    p = ProcessParams(2e-5, R, 15.0, 20, 20)
    plain = mcph_distance_pdf_ub(30, 20, p).value
    scaled = mcph_distance_pdf_ub(30, 20, p, overlap_correction=True).value
    assert scaled == pytest.approx(plain * hole_correction(2e-5, 15.0))


def test_negative_inputs_rejected():
    with pytest.raises(DomainError):
        mcp_distance_pdf(-1, 10, MCP)
    with pytest.raises(DomainError):
        mcp_distance_cdf(1, -10, MCP)
