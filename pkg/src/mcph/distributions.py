"""Conditional distance distributions for a single cluster.

For a cluster whose parent sits at distance ``x_norm`` from the origin, these
functions give the density and CDF of the distance from the origin to one of
its offspring:

* MCP: offspring uniform in ``b(x, R)`` (exact).
* MCP-H: offspring uniform in the shell ``b(x, R) \\ b(x, r0)``. Only the
  cluster's own hole is removed, so for the full holed process this is an
  upper bound on the CDF.

Both are piecewise in ``r``. Each piece is tagged with a case number (which
interval of ``x_norm`` we are in) and a branch number (which printed formula
within that case applies) so that individual pieces can be audited.

Case intervals are closed on the left and open on the right. For the MCP the
split is at ``R``; for MCP-H the splits are at ``min(r0, (R - r0)/2)``, ``r0``,
``max(r0, (R - r0)/2)``, ``(R + r0)/2`` and ``R``. Empty intervals are never
returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .geometry import CONCENTRIC_TOL, ball_volume, lens_volume
from .params import Process, ProcessParams


@dataclass(frozen=True)
class CaseIndex:
    process: Process
    case_no: int
    branch_no: int | None = None


@dataclass(frozen=True)
class PdfEval:
    value: float
    case: CaseIndex

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class Piece:
    """One interval ``[lo, hi)`` in r with its density and CDF formulas."""

    lo: float
    hi: float
    branch_no: int
    pdf_kind: str
    cdf_kind: str


# Each row: (lo(x, R, r0), hi(x, R, r0), branch_no, pdf_kind, cdf_kind).
# Rows follow the printed tables; a branch listed on two r-intervals
# appears twice with the same branch number.
_INF = math.inf

_MCP_TABLE = {
    1: [
        (lambda x, R, a: 0.0, lambda x, R, a: R - x, 1, "ball", "ball"),
        (lambda x, R, a: R - x, lambda x, R, a: R + x, 2, "lens", "lens"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 3, "zero", "one"),
    ],
    2: [
        (lambda x, R, a: 0.0, lambda x, R, a: x - R, 2, "zero", "zero"),
        (lambda x, R, a: x - R, lambda x, R, a: R + x, 1, "lens", "lens"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 2, "zero", "one"),
    ],
}

_MCPH_TABLE = {
    1: [
        (lambda x, R, a: 0.0, lambda x, R, a: a - x, 1, "zero", "zero"),
        (lambda x, R, a: a - x, lambda x, R, a: a + x, 2, "ball_minus_hole_lens", "ball_minus_hole_lens"),
        (lambda x, R, a: a + x, lambda x, R, a: R - x, 3, "ball", "ball_minus_hole"),
        (lambda x, R, a: R - x, lambda x, R, a: R + x, 4, "lens", "lens_minus_hole"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 1, "zero", "one"),
    ],
    2: [
        (lambda x, R, a: 0.0, lambda x, R, a: a - x, 1, "zero", "zero"),
        (lambda x, R, a: a - x, lambda x, R, a: R - x, 2, "ball_minus_hole_lens", "ball_minus_hole_lens"),
        (lambda x, R, a: R - x, lambda x, R, a: a + x, 3, "both_lens", "lens_minus_lens"),
        (lambda x, R, a: a + x, lambda x, R, a: R + x, 4, "lens", "lens_minus_hole"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 1, "zero", "one"),
    ],
    3: [
        (lambda x, R, a: 0.0, lambda x, R, a: x - a, 1, "ball", "ball"),
        (lambda x, R, a: x - a, lambda x, R, a: x + a, 2, "ball_minus_hole_lens", "ball_minus_hole_lens"),
        (lambda x, R, a: x + a, lambda x, R, a: R - x, 1, "ball", "ball_minus_hole"),
        (lambda x, R, a: R - x, lambda x, R, a: R + x, 3, "lens", "lens_minus_hole"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 4, "zero", "one"),
    ],
    4: [
        (lambda x, R, a: 0.0, lambda x, R, a: x - a, 1, "ball", "ball"),
        (lambda x, R, a: x - a, lambda x, R, a: R - x, 2, "ball_minus_hole_lens", "ball_minus_hole_lens"),
        (lambda x, R, a: R - x, lambda x, R, a: x + a, 3, "both_lens", "lens_minus_lens"),
        (lambda x, R, a: x + a, lambda x, R, a: R + x, 4, "lens", "lens_minus_hole"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 5, "zero", "one"),
    ],
    5: [
        (lambda x, R, a: 0.0, lambda x, R, a: R - x, 1, "ball", "ball"),
        (lambda x, R, a: R - x, lambda x, R, a: x - a, 2, "lens", "lens"),
        (lambda x, R, a: x - a, lambda x, R, a: x + a, 3, "both_lens", "lens_minus_lens"),
        (lambda x, R, a: x + a, lambda x, R, a: R + x, 2, "lens", "lens_minus_hole"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 4, "zero", "one"),
    ],
    6: [
        (lambda x, R, a: 0.0, lambda x, R, a: x - R, 1, "zero", "zero"),
        (lambda x, R, a: x - R, lambda x, R, a: x - a, 2, "lens", "lens"),
        (lambda x, R, a: x - a, lambda x, R, a: x + a, 3, "both_lens", "lens_minus_lens"),
        (lambda x, R, a: x + a, lambda x, R, a: R + x, 2, "lens", "lens_minus_hole"),
        (lambda x, R, a: R + x, lambda x, R, a: _INF, 1, "zero", "one"),
    ],
}


def case_edges(params: ProcessParams, process) -> list[float]:
    """Right end points of the case intervals in ``x_norm``, in order."""
    R, r0 = params.R, params.r0
    if Process(process) is Process.MCP:
        return [R, _INF]
    half_gap = (R - r0) / 2
    return [min(r0, half_gap), r0, max(r0, half_gap), (R + r0) / 2, R, _INF]


def _effective_x(x_norm, params):
    if x_norm < 0 or not math.isfinite(x_norm):
        raise DomainError(f"x_norm must be finite and >= 0, got {x_norm}")
    return 0.0 if x_norm < CONCENTRIC_TOL * params.R else float(x_norm)


def _case_no(x, params, process):
    for i, edge in enumerate(case_edges(params, process), start=1):
        if x < edge:
            return i
    raise AssertionError("unreachable: last edge is infinite")


def pieces(x_norm, params: ProcessParams, process) -> tuple[int, list[Piece]]:
    """Case number and the ordered non-empty r-pieces for this ``x_norm``.

    The pieces partition ``[0, inf)``. A parameter combination whose printed
    intervals overlap raises :class:`DomainError` instead of being patched.
    """
    process = Process(process)
    x = _effective_x(x_norm, params)
    case_no = _case_no(x, params, process)
    table = _MCP_TABLE if process is Process.MCP else _MCPH_TABLE
    R, r0 = params.R, params.r0
    out = []
    for lo_fn, hi_fn, branch, pdf_kind, cdf_kind in table[case_no]:
        lo, hi = lo_fn(x, R, r0), hi_fn(x, R, r0)
        if hi > lo:
            out.append(Piece(lo, hi, branch, pdf_kind, cdf_kind))
    end = 0.0
    for p in out:
        if p.lo != end:
            raise DomainError(
                f"pieces do not tile [0, inf) for x_norm={x_norm}, {params}: {out}"
            )
        end = p.hi
    if end != _INF:
        raise DomainError(f"pieces stop at {end} for x_norm={x_norm}")
    return case_no, out


def breakpoints(x_norm, params, process) -> list[float]:
    """Finite r values where the density changes formula."""
    _, ps = pieces(x_norm, params, process)
    return [p.lo for p in ps[1:]]


def classify_case(x_norm, params: ProcessParams, process, r=None) -> CaseIndex:
    """Locate ``x_norm`` among the case intervals; with ``r`` also pick the branch."""
    process = Process(process)
    case_no, ps = pieces(x_norm, params, process)
    if r is None:
        return CaseIndex(process, case_no)
    return CaseIndex(process, case_no, _find_piece(r, ps).branch_no)


def _find_piece(r, ps):
    if r < 0 or math.isnan(r):
        raise DomainError(f"r must be >= 0, got {r}")
    for p in ps:
        if r < p.hi:
            return p
    return ps[-1]


def _normaliser(params, process):
    if process is Process.MCP:
        return params.R**3, 0.0
    return params.R**3 - params.r0**3, params.r0


def _pdf_value(kind, r, x, R, r0, c):
    if kind == "zero":
        return 0.0
    if kind == "ball":
        return 3 * r**2 / c
    if kind == "ball_minus_hole_lens":
        return (3 * r**2 - 3 * r / (4 * x) * (r0 - x + r) * (r0 + x - r)) / c
    if kind == "lens":
        return 3 * r * (R - x + r) * (R + x - r) / (4 * x * c)
    if kind == "both_lens":
        return 3 * r * (R**2 - r0**2) / (4 * x * c)
    raise ValueError(kind)


def _cdf_value(kind, r, x, R, r0, c):
    if kind == "zero":
        return 0.0
    if kind == "one":
        return 1.0
    if kind == "ball":
        return r**3 / c
    if kind == "ball_minus_hole":
        return (r**3 - r0**3) / c
    vol_c = 4.0 / 3.0 * math.pi * c
    if kind == "ball_minus_hole_lens":
        return (ball_volume(r) - lens_volume(x, r, r0)) / vol_c
    if kind == "lens":
        return lens_volume(x, r, R) / vol_c
    if kind == "lens_minus_hole":
        return (lens_volume(x, r, R) - ball_volume(r0)) / vol_c
    if kind == "lens_minus_lens":
        return (lens_volume(x, r, R) - lens_volume(x, r, r0)) / vol_c
    raise ValueError(kind)


def distance_pdf(r, x_norm, params: ProcessParams, process) -> PdfEval:
    process = Process(process)
    case_no, ps = pieces(x_norm, params, process)
    p = _find_piece(r, ps)
    c, r0 = _normaliser(params, process)
    x = _effective_x(x_norm, params)
    value = _pdf_value(p.pdf_kind, float(r), x, params.R, r0, c)
    return PdfEval(value, CaseIndex(process, case_no, p.branch_no))


def distance_cdf(r, x_norm, params: ProcessParams, process) -> float:
    process = Process(process)
    _, ps = pieces(x_norm, params, process)
    p = _find_piece(r, ps)
    c, r0 = _normaliser(params, process)
    x = _effective_x(x_norm, params)
    value = _cdf_value(p.cdf_kind, float(r), x, params.R, r0, c)
    # rounding in the lens formula can leave values a few ulp outside [0, 1]
    return min(1.0, max(0.0, value))


def mcp_distance_pdf(r, x_norm, params: ProcessParams) -> PdfEval:
    """Density of the offspring-to-origin distance for an MCP cluster at ``x_norm``."""
    return distance_pdf(r, x_norm, params, Process.MCP)


def mcp_distance_cdf(r, x_norm, params: ProcessParams) -> float:
    return distance_cdf(r, x_norm, params, Process.MCP)


def mcph_distance_pdf_ub(r, x_norm, params: ProcessParams, overlap_correction=False) -> PdfEval:
    """Density under the self-hole model (upper-bound CDF for the holed process).

    With ``overlap_correction`` the value is scaled by :func:`hole_correction`,
    a first-order allowance for holes of other clusters. It is off by default.
    """
    ev = distance_pdf(r, x_norm, params, Process.MCPH)
    if overlap_correction:
        ev = PdfEval(ev.value * hole_correction(params.lambda_p, params.r0), ev.case)
    return ev


def mcph_distance_cdf_ub(r, x_norm, params: ProcessParams) -> float:
    return distance_cdf(r, x_norm, params, Process.MCPH)


def hole_correction(lambda_p, r0) -> float:
    """``1 - lambda_p * (4/3) pi r0**3``: expected volume fraction lost to other holes."""
    factor = 1.0 - lambda_p * ball_volume(r0)
    if not factor > 0:
        raise DomainError(
            f"hole correction factor {factor} <= 0 for lambda_p={lambda_p}, r0={r0}"
        )
    return factor
