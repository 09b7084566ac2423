"""Acceptance checks for the analytic results and the Monte Carlo pipeline.

Each ``check_*`` function returns a :class:`CriterionResult`. Monte Carlo
comparisons are cached per configuration, so the bound, self-hole and
determinism checks can share runs.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .distributions import case_edges, breakpoints, distance_cdf, distance_pdf
from .functionals import contact_cdf, indicator_profile, pgf_count, pgfl, region_term
from .geometry import ball_volume, lens_volume
from .params import ProcessParams, SamplerMode
from .quadrature import QuadratureSpec, integrate
from .sampling import make_rng
from .validation import ComparisonReport, compare, mc_contact_distances


@dataclass(frozen=True)
class AcceptanceConfig:
    R: float = 50.0
    r0: float = 15.0
    M2: float = 20.0
    lambdas: tuple = (1e-5, 2e-5)
    mcp_lambda: float = 1e-5
    mcp_M1: float = 20.0
    W: float = 200.0
    grid_max: float = 100.0
    grid_step: float = 1.0
    n_trials: int = 10_000
    seed: int = 20240611
    workers: int = 1
    determinism_trials: int = 200
    determinism_workers: tuple = (1, 4, 8)

    def grid(self):
        n = int(round(self.grid_max / self.grid_step))
        return np.arange(n + 1) * self.grid_step

    def as_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "workers"}
        d["lambdas"] = list(self.lambdas)
        d["determinism_workers"] = list(self.determinism_workers)
        return d


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    reports: dict = field(default_factory=dict)

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def holed_params(lambda_p, cfg: AcceptanceConfig):
    return ProcessParams.from_m2(lambda_p, cfg.R, cfg.r0, cfg.M2)


def mcp_params(cfg: AcceptanceConfig):
    return ProcessParams(cfg.mcp_lambda, cfg.R, 0.0, cfg.mcp_M1, cfg.mcp_M1)


@functools.lru_cache(maxsize=None)
def _analytic_curve(params, process, grid):
    return tuple(contact_cdf(r, params, process) for r in grid)


def contact_report(params: ProcessParams, process, mode, cfg: AcceptanceConfig,
                   n_trials=None, workers=None) -> ComparisonReport:
    """Analytic contact CDF against ``n_trials`` simulated realizations."""
    n_trials = cfg.n_trials if n_trials is None else n_trials
    workers = cfg.workers if workers is None else workers
    return _contact_report(params, str(getattr(process, "value", process)), SamplerMode(mode).value,
                           float(cfg.W), tuple(cfg.grid()), int(n_trials), int(cfg.seed), int(workers))


@functools.lru_cache(maxsize=None)
def _contact_report(params, process, mode, W, grid, n_trials, seed, workers):
    curve = dict(zip(grid, _analytic_curve(params, process, grid)))
    emp = mc_contact_distances(params, W, mode, n_trials, seed, workers=workers, grid_max=grid[-1])
    meta = {
        "params": params.as_dict(),
        "process": process,
        "mode": mode,
        "W": W,
        "n_trials": n_trials,
        "seed": seed,
        "n_censored": emp.n_censored,
        "censoring_warning": emp.censoring_warning,
    }
    return compare(curve.__getitem__, emp, np.array(grid), 3.0, meta)


def _band(rep: ComparisonReport):
    n = rep.meta["n_trials"]
    se_null = np.sqrt(np.clip(rep.analytic * (1 - rep.analytic), 0, None) / n)
    return np.maximum(rep.se, se_null)


# ---------------------------------------------------------------- criteria

def check_holed_bound(cfg: AcceptanceConfig) -> CriterionResult:
    """Holed contact CDF against exact thinning: sup tolerance and bound direction."""
    limits = dict(zip(cfg.lambdas, (0.02, 0.04)))
    ok, parts, reports = True, [], {}
    for lam in cfg.lambdas:
        rep = contact_report(holed_params(lam, cfg), "mcph", "mcph_exact", cfg)
        below = int(np.sum(rep.analytic < rep.empirical - 3 * _band(rep)))
        good = rep.sup_distance <= limits[lam] and below == 0
        ok &= good
        parts.append(f"lambda_p={lam:g} sup={rep.sup_distance:.4f} (<= {limits[lam]}) bound_violations={below}")
        reports[f"exact_lambda_{lam:g}"] = rep
    return CriterionResult("AC1 holed bound vs exact thinning", ok, "; ".join(parts), reports)


def check_self_hole(cfg: AcceptanceConfig) -> CriterionResult:
    ok, parts, reports = True, [], {}
    for lam in cfg.lambdas:
        rep = contact_report(holed_params(lam, cfg), "mcph", "mcph_selfhole", cfg)
        good = rep.violations == 0 and rep.sup_distance <= 0.015
        ok &= good
        parts.append(f"lambda_p={lam:g} sup={rep.sup_distance:.4f} violations={rep.violations}")
        reports[f"selfhole_lambda_{lam:g}"] = rep
    return CriterionResult("AC2 self-hole exactness", ok, "; ".join(parts), reports)


def check_mcp(cfg: AcceptanceConfig) -> CriterionResult:
    rep = contact_report(mcp_params(cfg), "mcp", "mcp", cfg)
    ok = rep.sup_distance <= 0.01
    return CriterionResult("AC3 MCP exactness", ok,
                           f"sup={rep.sup_distance:.4f} violations={rep.violations}", {"mcp": rep})


def check_hole_count(cfg: AcceptanceConfig = None) -> CriterionResult:
    value = 2e-5 * ball_volume(50.0)
    ok = f"{value:.4g}" == "10.47" and f"{value:.3g}" == "10.5"
    return CriterionResult("AC4 hole count", ok, f"lambda_p*(4/3)*pi*R^3 = {value:.6f}")


def normalization_combos(R=50.0):
    combos = [("mcp", x, 0.0) for x in (0.0, 10.0, 30.0, R, 80.0)]
    for r0 in (5.0, 15.0, 20.0):
        p = ProcessParams(1e-5, R, r0)
        edges = [0.0] + [e for e in case_edges(p, "mcph") if e < math.inf] + [R + 30.0]
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi > lo:
                combos.append(("mcph", 0.5 * (lo + hi), r0))
        combos.append(("mcph", 0.0, r0))
    return combos


def check_normalization(cfg: AcceptanceConfig = None) -> CriterionResult:
    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13)
    worst, seen = 0.0, set()
    combos = normalization_combos()
    for process, x, r0 in combos:
        p = ProcessParams(1e-5, 50.0, r0)
        seen.add((process, distance_pdf(0.0, x, p, process).case.case_no))
        pts = breakpoints(x, p, process)
        total = integrate(lambda r: distance_pdf(r, x, p, process).value, 0.0, x + p.R, spec, pts)
        worst = max(worst, abs(total - 1.0))
    all_cases = {("mcp", 1), ("mcp", 2)} | {("mcph", k) for k in range(1, 7)}
    ok = worst <= 1e-9 and len(combos) >= 14 and seen == all_cases
    return CriterionResult("AC5 normalization", ok,
                           f"{len(combos)} combinations, cases covered={len(seen)}/8, max |int f - 1|={worst:.2e}")


def check_degeneration(cfg: AcceptanceConfig = None) -> CriterionResult:
    p0 = ProcessParams(1e-5, 50.0, 0.0, 20.0, 20.0)
    worst_pdf = worst_cdf = 0.0
    for x in np.linspace(0.0, 100.0, 100):
        for r in np.linspace(0.0, 110.0, 100):
            a, b = distance_pdf(r, x, p0, "mcph").value, distance_pdf(r, x, p0, "mcp").value
            worst_pdf = max(worst_pdf, abs(a - b))
            a, b = distance_cdf(r, x, p0, "mcph"), distance_cdf(r, x, p0, "mcp")
            worst_cdf = max(worst_cdf, abs(a - b))
    worst_contact = max(abs(contact_cdf(r, p0, "mcph") - contact_cdf(r, p0, "mcp"))
                        for r in np.linspace(0.0, 100.0, 100))
    ok = worst_pdf <= 1e-12 and worst_cdf <= 1e-12 and worst_contact <= 1e-9
    return CriterionResult("AC6 degeneration", ok,
                           f"pdf {worst_pdf:.1e}, cdf {worst_cdf:.1e}, contact {worst_contact:.1e}")


def lens_mc(d, r, R, n, rng):
    """Rejection estimate of the lens volume with its standard error."""
    small, big, c_small, c_big = (r, R, 0.0, d) if r <= R else (R, r, d, 0.0)
    pts = rng.uniform(-small, small, size=(n, 3))
    pts[:, 0] += c_small
    inside = (np.einsum("ij,ij->i", pts - [c_small, 0, 0], pts - [c_small, 0, 0]) <= small**2) & \
             (np.einsum("ij,ij->i", pts - [c_big, 0, 0], pts - [c_big, 0, 0]) <= big**2)
    box = (2 * small) ** 3
    p = inside.mean()
    return box * p, box * math.sqrt(p * (1 - p) / n)


def check_lens(cfg: AcceptanceConfig = None) -> CriterionResult:
    rng = make_rng(cfg.seed if cfg else 0, 7)
    worst_z = 0.0
    for _ in range(20):
        R = rng.uniform(10, 60)
        r = rng.uniform(5, 60)
        d = rng.uniform(abs(R - r), R + r)
        est, se = lens_mc(d, r, R, 10**6, rng)
        worst_z = max(worst_z, abs(est - lens_volume(d, r, R)) / se)
    tang = 0.0
    for r, R in ((10.0, 50.0), (30.0, 50.0), (50.0, 20.0), (7.5, 7.5)):
        tang = max(tang, abs(lens_volume(r + R, r, R)))
        inner = ball_volume(min(r, R))
        tang = max(tang, abs(lens_volume(abs(R - r), r, R) - inner) / inner)
        tang = max(tang, abs(lens_volume(0.0, r, R) - inner) / inner)
    ok = worst_z <= 3.0 and tang <= 1e-9
    return CriterionResult("AC7 lens volume", ok, f"max |z|={worst_z:.2f} over 20 geometries, tangency err={tang:.1e}")


def check_functionals(cfg: AcceptanceConfig = None) -> CriterionResult:
    p = ProcessParams.from_m2(1e-5, 50.0, 15.0, 20.0)
    g1 = max(abs(pgf_count(1.0, r, p, proc) - 1.0) for proc in ("mcp", "mcph") for r in (5.0, 30.0, 80.0))
    pairs = [(t, r) for t in (0.0, 0.25, 0.5, 0.9) for r in (10.0, 30.0, 60.0)]
    ind = max(abs(pgfl(indicator_profile(t, r), p, "mcph").value - pgf_count(t, r, p, "mcph")) for t, r in pairs)
    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12)
    reg, cases = 0.0, set()
    for r0 in (15.0, 20.0):
        q = ProcessParams(1e-5, 50.0, r0)
        edges = [0.0] + [e for e in case_edges(q, "mcph") if e < math.inf] + [90.0]
        for case_no, (lo, hi) in enumerate(zip(edges[:-1], edges[1:]), start=1):
            if hi <= lo:
                continue
            cases.add(case_no)
            v = 0.5 * (lo + hi)
            pts = breakpoints(v, q, "mcph")
            for r in np.linspace(0.0, v + 55.0, 12):
                direct = integrate(lambda u: distance_pdf(u, v, q, "mcph").value, 0.0, r, spec,
                                   [b for b in pts if b < r])
                reg = max(reg, abs(region_term(case_no, r, v, q) - direct))
    ok = g1 <= 1e-9 and ind <= 1e-6 and reg <= 1e-8 and cases == set(range(1, 7))
    return CriterionResult("AC8 functional identities", ok,
                           f"|G(1)-1|={g1:.1e}, pgfl vs pgf={ind:.1e} on {len(pairs)} pairs, "
                           f"region term={reg:.1e} on cases {sorted(cases)}")


def determinism_bytes(cfg: AcceptanceConfig, workers):
    """Report bytes of a reduced validation run with ``workers`` processes."""
    out = []
    small = replace(cfg, n_trials=cfg.determinism_trials)
    runs = [(holed_params(lam, cfg), "mcph", mode) for lam in cfg.lambdas
            for mode in ("mcph_exact", "mcph_selfhole")] + [(mcp_params(cfg), "mcp", "mcp")]
    for params, process, mode in runs:
        rep = contact_report(params, process, mode, small, workers=workers)
        out.append(rep.csv_text() + rep.json_text())
    return "".join(out).encode()


def check_determinism(cfg: AcceptanceConfig) -> CriterionResult:
    blobs = {w: determinism_bytes(cfg, w) for w in cfg.determinism_workers}
    first = blobs[cfg.determinism_workers[0]]
    ok = all(b == first for b in blobs.values())
    return CriterionResult("AC9 determinism", ok,
                           f"{cfg.determinism_trials} trials x 5 runs, workers {list(blobs)}: "
                           f"{'identical' if ok else 'differ'} ({len(first)} bytes)")


CRITERIA = {
    "AC1": check_holed_bound,
    "AC2": check_self_hole,
    "AC3": check_mcp,
    "AC4": check_hole_count,
    "AC5": check_normalization,
    "AC6": check_degeneration,
    "AC7": check_lens,
    "AC8": check_functionals,
    "AC9": check_determinism,
}


def run_acceptance(cfg: AcceptanceConfig = AcceptanceConfig(), only=None, out_dir=None, log=None):
    """Run the selected criteria; write comparison reports under ``out_dir``."""
    results = []
    for key, fn in CRITERIA.items():
        if only and key not in only:
            continue
        res = fn(cfg)
        results.append(res)
        if log:
            log(res.line())
        if out_dir is not None:
            for stem, rep in res.reports.items():
                rep.write(f"{out_dir}/{stem}")
    return results
