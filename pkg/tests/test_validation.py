import math
import warnings

import numpy as np
import pytest

from mcph.distributions import mcp_distance_cdf, mcph_distance_cdf_ub
from mcph.errors import DomainError
from mcph.params import ProcessParams, SamplerMode
from mcph.sampling import make_rng, sample_realization
from mcph.validation import (
    ComparisonReport,
    EmpiricalCdf,
    compare,
    mc_conditional_distances,
    mc_contact_distances,
    nearest_retained_distance,
)

R = 50.0


def test_empty_cdf():
    cdf = EmpiricalCdf(np.array([]))
    assert cdf.n == 0
    with pytest.raises(DomainError):
        cdf.evaluate(1.0)


def test_evaluate_matches_counting():
    rng = np.random.default_rng(0)
    x = rng.exponential(size=500)
    cdf = EmpiricalCdf(x)
    assert np.all(np.diff(cdf.sorted_samples) >= 0)
    q = np.r_[rng.uniform(-1, 6, 200), x[:20]]
    direct = np.array([np.mean(x <= t) for t in q])
    assert np.array_equal(cdf.evaluate(q), direct)
    grid = np.sort(q)
    assert np.all(np.diff(cdf.evaluate(grid)) >= 0)
    F = cdf.evaluate(1.0)
    assert cdf.se(1.0) == pytest.approx(math.sqrt(F * (1 - F) / 500))


def test_censored_entries_counted():
    cdf = EmpiricalCdf(np.array([1.0, math.inf, 2.0]))
    assert cdf.n_censored == 1
    assert cdf.evaluate(10.0) == pytest.approx(2 / 3)


def test_compare_self_consistent():
    x = np.random.default_rng(1).uniform(size=20_000)
    rep = compare(lambda t: min(max(t, 0.0), 1.0), EmpiricalCdf(x), np.linspace(0, 1, 21), 4.0)
    assert rep.violations == 0


def test_compare_constant_zero():
    x = np.random.default_rng(2).uniform(size=100)
    cdf = EmpiricalCdf(x)
    grid = np.linspace(0, 0.5, 11)
    rep = compare(lambda t: 0.0, cdf, grid)
    assert rep.sup_distance == pytest.approx(cdf.evaluate(grid).max())


def test_report_round_trip(tmp_path):
    x = np.random.default_rng(3).normal(size=1000)
    rep = compare(lambda t: 0.5 * (1 + math.erf(t / math.sqrt(2))), EmpiricalCdf(x),
                  np.linspace(-2, 2, 9), meta={"n_trials": 1000, "seed": 3})
    rep.write(tmp_path / "report")
    back = ComparisonReport.read(tmp_path / "report")
    for name in ("grid", "analytic", "empirical", "se"):
        assert np.array_equal(getattr(back, name), getattr(rep, name))
    assert back.sup_distance == rep.sup_distance
    assert back.violations == rep.violations
    assert back.meta == rep.meta
    assert back.csv_text() == rep.csv_text() and back.json_text() == rep.json_text()


@pytest.mark.parametrize("mode", list(SamplerMode))
def test_lazy_nearest_matches_full_realization(mode):
    p = ProcessParams.from_m2(2e-5, R, 15.0, 20.0)
    W = 120.0
    for i in range(25):
        fast = nearest_retained_distance(p, W, mode, 77, i)
        rz = sample_realization(p, W, mode, make_rng(77, i))
        d = np.linalg.norm(rz.retained, axis=1)
        d = d[d <= W]
        slow = d.min() if len(d) else math.inf
        assert fast == slow


def test_contact_sampling_worker_invariant():
    p = ProcessParams.from_m2(1e-5, R, 15.0, 20.0)
    a = mc_contact_distances(p, 200.0, "mcph_exact", 40, 5, workers=1)
    b = mc_contact_distances(p, 200.0, "mcph_exact", 40, 5, workers=3)
    assert np.array_equal(a.sorted_samples, b.sorted_samples)


def test_zero_trials():
    cdf = mc_contact_distances(ProcessParams(1e-5, R), 200.0, "mcp", 0, 1)
    with pytest.raises(DomainError):
        cdf.evaluate(1.0)


def test_censoring_reported():
    p = ProcessParams(1e-8, R, 0.0, 20.0, 20.0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cdf = mc_contact_distances(p, 60.0, "mcp", 50, 1, grid_max=100.0)
    assert cdf.n_censored > 0
    assert cdf.censoring_warning
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_conditional_ball_against_formula():
    p = ProcessParams(1e-5, R, 0.0, 20.0, 20.0)
    emp = mc_conditional_distances(20.0, p, "ball", 10**6, seed=1)
    grid = np.linspace(0, 70, 141)
    sup = max(abs(emp.evaluate(r) - mcp_distance_cdf(r, 20.0, p)) for r in grid)
    assert sup < 0.002


def test_conditional_shell_against_bound():
    p = ProcessParams(1e-5, R, 15.0, 20.0, 20.0)
    emp = mc_conditional_distances(30.0, p, "shell", 10**6, seed=2)
    grid = np.linspace(0, 80, 161)
    sup = max(abs(emp.evaluate(r) - mcph_distance_cdf_ub(r, 30.0, p)) for r in grid)
    assert sup < 0.002


def test_conditional_exact_matches_self_hole_law():
    # other parents thin every shell point with the same probability, so the
    # retained-offspring law is the shell law; batch=1 keeps draws independent
    p = ProcessParams(2e-5, R, 15.0, 20.0, 20.0)
    emp = mc_conditional_distances(25.0, p, "exact", 40_000, seed=3, batch=1)
    grid = np.linspace(0, 75, 76)
    F = emp.evaluate(grid)
    se = np.maximum(emp.se(grid), 1 / emp.n)
    ub = np.array([mcph_distance_cdf_ub(r, 25.0, p) for r in grid])
    assert np.all(np.abs(F - ub) <= 4 * se)


def test_conditional_mode_checked():
    with pytest.raises(DomainError):
        mc_conditional_distances(1.0, ProcessParams(1e-5, R), "cube", 10, 1)
