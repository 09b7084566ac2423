"""Monte Carlo oracles and analytic-versus-empirical comparison.

Every trial ``i`` draws from substream ``(master_seed, i)``, and results are
merged in trial order, so outputs do not depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError
from .geometry import sample_uniform_ball, sample_uniform_shell
from .params import ProcessParams, SamplerMode
from .sampling import draw_clusters, hole_mask, make_rng, sample_ppp_ball


@dataclass
class EmpiricalCdf:
    """Step-function CDF of a sample; ``+inf`` entries stand for censored trials."""

    sorted_samples: np.ndarray
    n_censored: int = 0
    censoring_warning: bool = False

    def __post_init__(self):
        self.sorted_samples = np.sort(np.asarray(self.sorted_samples, dtype=float))
        self.n_censored = int(np.isinf(self.sorted_samples).sum())

    @property
    def n(self):
        return len(self.sorted_samples)

    def evaluate(self, r):
        """Fraction of samples ``<= r`` (right-continuous)."""
        if self.n == 0:
            raise DomainError("empirical CDF of an empty sample is undefined")
        counts = np.searchsorted(self.sorted_samples, r, side="right")
        return counts / self.n

    def se(self, r):
        F = self.evaluate(r)
        return np.sqrt(F * (1.0 - F) / self.n)


@dataclass
class ComparisonReport:
    grid: np.ndarray
    analytic: np.ndarray
    empirical: np.ndarray
    se: np.ndarray
    sup_distance: float
    violations: int
    k_sigma: float
    meta: dict = field(default_factory=dict)

    def passed(self, threshold=math.inf):
        return self.violations == 0 and self.sup_distance <= threshold

    def csv_text(self):
        fh = io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "analytic", "empirical", "se"])
        for row in zip(self.grid, self.analytic, self.empirical, self.se):
            w.writerow([repr(float(v)) for v in row])
        return fh.getvalue()

    def json_text(self):
        summary = {
            "sup_distance": float(self.sup_distance),
            "violations": int(self.violations),
            "k_sigma": float(self.k_sigma),
            **self.meta,
        }
        return json.dumps(summary, indent=2, sort_keys=True) + "\n"

    def write(self, stem):
        """Write ``<stem>.csv`` and ``<stem>.json``."""
        with open(f"{stem}.csv", "w") as fh:
            fh.write(self.csv_text())
        with open(f"{stem}.json", "w") as fh:
            fh.write(self.json_text())

    @classmethod
    def from_text(cls, csv_text, json_text):
        rows = list(csv.DictReader(io.StringIO(csv_text)))
        cols = {k: np.array([float(r[k]) for r in rows]) for k in ("r", "analytic", "empirical", "se")}
        summary = json.loads(json_text)
        sup = summary.pop("sup_distance")
        violations = summary.pop("violations")
        k = summary.pop("k_sigma")
        return cls(cols["r"], cols["analytic"], cols["empirical"], cols["se"], sup, violations, k, summary)

    @classmethod
    def read(cls, stem):
        with open(f"{stem}.csv") as a, open(f"{stem}.json") as b:
            return cls.from_text(a.read(), b.read())


def compare(analytic_fn, empirical: EmpiricalCdf, grid, k_sigma=3.0, meta=None) -> ComparisonReport:
    """Tabulate an analytic CDF against an empirical one on ``grid``.

    A grid point is a violation when ``|analytic - empirical|`` exceeds
    ``k_sigma`` binomial standard errors. The band uses the larger of the
    errors implied by the empirical and the analytic value, so that a true
    probability of 1e-4 observed as 0 in 1e4 trials is not flagged merely
    because the empirical error is zero.
    """
    grid = np.asarray(grid, dtype=float)
    analytic = np.array([float(analytic_fn(r)) for r in grid])
    emp = empirical.evaluate(grid)
    se = empirical.se(grid)
    se_null = np.sqrt(np.clip(analytic * (1.0 - analytic), 0.0, None) / empirical.n)
    diff = np.abs(analytic - emp)
    violations = int(np.sum(diff > k_sigma * np.maximum(se, se_null)))
    sup = float(diff.max()) if len(diff) else 0.0
    return ComparisonReport(grid, analytic, emp, se, sup, violations, float(k_sigma), dict(meta or {}))


def _run_chunk(task):
    fn, args, start, stop = task
    return [fn(*args, i) for i in range(start, stop)]


def run_trials(fn, args, n_trials, workers=1):
    """``[fn(*args, i) for i in range(n_trials)]``, optionally over processes.

    ``fn`` must be a module-level function; chunks are merged in trial order.
    """
    if workers <= 1 or n_trials < 2:
        return [fn(*args, i) for i in range(n_trials)]
    n_chunks = min(n_trials, 4 * workers)
    bounds = np.linspace(0, n_trials, n_chunks + 1).astype(int)
    tasks = [(fn, args, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, tasks))
    return [x for part in parts for x in part]


def nearest_retained_distance(params, W, mode, master_seed, trial):
    """Distance from the origin to the nearest retained point of one realization.

    Same draws as :func:`sampling.sample_realization` for this substream; for
    the exact holed mode the hole test is applied lazily, nearest candidates
    first. Returns ``inf`` when no retained point lies in ``b(o, W)``.
    """
    mode = SamplerMode(mode)
    rng = make_rng(master_seed, trial)
    parents, offspring, _ = draw_clusters(params, W, mode, rng)
    if len(offspring) == 0:
        return math.inf
    d = np.linalg.norm(offspring, axis=1)
    if mode is not SamplerMode.MCPH_EXACT:
        best = float(d.min())
        return best if best <= W else math.inf
    tree = cKDTree(parents)
    order = np.argsort(d, kind="stable")
    chunk = 64
    for start in range(0, len(order), chunk):
        idx = order[start:start + chunk]
        if d[idx[0]] > W:
            break
        keep = ~hole_mask(parents, offspring[idx], params.r0, tree)
        if keep.any():
            best = float(d[idx[np.argmax(keep)]])
            return best if best <= W else math.inf
    return math.inf


def mc_contact_distances(params: ProcessParams, W, mode, n_trials, master_seed,
                         workers=1, grid_max=None) -> EmpiricalCdf:
    """Empirical contact distance distribution from ``n_trials`` realizations.

    Trials with no retained point inside ``b(o, W)`` enter as ``+inf``. When
    ``grid_max`` exceeds ``W - R`` and some trial's nearest point lies beyond
    ``W - R``, the result carries ``censoring_warning=True`` and a warning is
    emitted.
    """
    mode = SamplerMode(mode)
    if n_trials < 0:
        raise DomainError("n_trials must be >= 0")
    samples = run_trials(
        nearest_retained_distance, (params, float(W), mode, int(master_seed)),
        int(n_trials), workers,
    )
    cdf = EmpiricalCdf(np.array(samples, dtype=float))
    reliable = W - params.R
    if grid_max is not None and grid_max > reliable and cdf.n and cdf.sorted_samples[-1] > reliable:
        cdf.censoring_warning = True
        warnings.warn(
            f"grid reaches {grid_max} m but the window only guarantees {reliable} m",
            RuntimeWarning, stacklevel=2,
        )
    return cdf


def mc_conditional_distances(x_norm, params: ProcessParams, mode, n, seed,
                             batch=256) -> EmpiricalCdf:
    """Empirical law of ``|x + Y|`` for offspring ``Y`` of a parent at ``x = (x_norm, 0, 0)``.

    mode ``"ball"``: ``Y`` uniform in ``b(0, R)``; ``"shell"``: uniform in
    ``b(0, R) \\ b(0, r0)``; ``"exact"``: uniform candidates in ``b(0, R)``
    thinned by the own hole and by a fresh PPP of other parents (intensity
    ``lambda_p``) for every batch of ``batch`` candidates. Retained points
    are pooled across batches until ``n`` are collected.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    R, r0 = params.R, params.r0
    center = np.array([float(x_norm), 0.0, 0.0])
    rng = make_rng(seed, 0)
    if mode == "ball":
        pts = sample_uniform_ball(center, R, rng, size=n)
    elif mode == "shell":
        pts = sample_uniform_shell(center, r0, R, rng, size=n)
    elif mode == "exact":
        kept = []
        total = 0
        reach = R + r0  # only parents this close can thin the cluster
        while total < n:
            others = center + sample_ppp_ball(params.lambda_p, reach, rng)
            holes = np.vstack([center[None, :], others])
            cand = sample_uniform_ball(center, R, rng, size=batch)
            cand = cand[~hole_mask(holes, cand, r0)]
            kept.append(cand)
            total += len(cand)
        pts = np.vstack(kept)[:n]
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return EmpiricalCdf(np.linalg.norm(pts, axis=1))
