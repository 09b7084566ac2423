"""Count PGF, contact distance distribution and PGFL.

Every quantity here has the form

    exp(-4 pi lambda_p * integral_0^inf (1 - exp(-M * J(v))) v^2 dv)

where ``v`` is the distance of a parent from the origin and ``J(v)`` is the
expected "deficit" contributed by a single offspring of that parent. For the
count PGF on ``b(o, r)`` the deficit is ``(1 - theta) * P(d <= r | v)``, which
has a closed form; for a general PGFL it is an integral of ``1 - v(u)``
against the conditional distance density.

For the MCP these expressions are exact. For MCP-H they use the self-hole
distance law and therefore describe the self-hole model exactly and the full
holed process only approximately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import distributions as dist
from .errors import DomainError, UnsupportedInputError
from .geometry import CONCENTRIC_TOL
from .params import Process, ProcessParams
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate

__all__ = [
    "helper_P",
    "region_term",
    "mcp_region_term",
    "pgf_count",
    "contact_cdf",
    "Profile",
    "indicator_profile",
    "exp_power_profile",
    "isotropic_profile",
    "PgflResult",
    "pgfl",
]


def helper_P(a, b, c, d, r, v):
    """Integral of ``3u(d - v + u)(d + v - u) / (4 c v)`` over ``[min(r, b), min(r, a)]``.

    This is the mass a lens-type density piece (ball radius ``d``, normaliser
    ``c``) puts between the two clamped limits.
    """
    if not v > 0:
        raise DomainError(f"helper_P needs v > 0, got {v}")
    ma, mb = min(r, a), min(r, b)
    return (
        3.0
        / (4.0 * c * v)
        * (
            (d**2 - v**2) * (ma**2 - mb**2) / 2.0
            + 2.0 * v * (ma**3 - mb**3) / 3.0
            - (ma**4 - mb**4) / 4.0
        )
    )


def _concentric_mass(r, R, r0):
    """Limit of the region terms as the parent approaches the origin."""
    t = min(max(r, r0), R)
    return (t**3 - r0**3) / (R**3 - r0**3)


def _clip01(x):
    return min(1.0, max(0.0, x))


def mcp_region_term(r, v, R):
    """Closed-form ``P(d <= r | v)`` for the MCP."""
    if v < CONCENTRIC_TOL * R:
        return _clip01(min(r, R) ** 3 / R**3)
    c = R**3
    if v <= R:
        val = min(r, R - v) ** 3 / c + helper_P(R + v, R - v, c, R, r, v)
    else:
        val = helper_P(R + v, v - R, c, R, r, v)
    return _clip01(val)


def _case_interval(case_no, params):
    edges = [0.0] + dist.case_edges(params, Process.MCPH)
    return edges[case_no - 1], edges[case_no]


def region_term(case_no, r, v, params: ProcessParams):
    """Self-hole mass within distance ``r`` for a parent at distance ``v``.

    ``case_no`` (1-6) must match the interval containing ``v``; the six
    closed forms are the integrals of the matching density pieces.
    """
    if case_no not in range(1, 7):
        raise DomainError(f"case_no must be 1..6, got {case_no}")
    lo, hi = _case_interval(case_no, params)
    R, r0 = params.R, params.r0
    slack = 1e-12 * R
    if not (hi > lo and lo - slack <= v <= hi + slack):
        raise DomainError(f"v={v} is not in case {case_no} interval [{lo}, {hi})")
    if r <= 0:
        return 0.0
    if v < CONCENTRIC_TOL * R:
        return _concentric_mass(r, R, r0)

    c = R**3 - r0**3
    P = helper_P

    def cube(t):
        return min(r, t) ** 3 / c

    def both_lens(a, b):
        return 3.0 / 8.0 * (R**2 - r0**2) * (min(a, r) ** 2 - min(b, r) ** 2) / (c * v)

    if case_no == 1:
        val = (cube(R - v) - cube(r0 - v) - P(v + r0, r0 - v, c, r0, r, v)
               + P(R + v, R - v, c, R, r, v))
    elif case_no == 2:
        val = (cube(R - v) - cube(r0 - v) - P(R - v, r0 - v, c, r0, r, v)
               + P(R + v, v + r0, c, R, r, v) + both_lens(v + r0, R - v))
    elif case_no == 3:
        val = cube(R - v) - P(v + r0, v - r0, c, r0, r, v) + P(R + v, R - v, c, R, r, v)
    elif case_no == 4:
        val = (cube(R - v) - P(R - v, v - r0, c, r0, r, v)
               + P(R + v, v + r0, c, R, r, v) + both_lens(v + r0, R - v))
    elif case_no == 5:
        val = (cube(R - v) + P(v - r0, R - v, c, R, r, v)
               + P(R + v, v + r0, c, R, r, v) + both_lens(v + r0, v - r0))
    else:
        val = (P(v - r0, v - R, c, R, r, v) + P(R + v, v + r0, c, R, r, v)
               + both_lens(v + r0, v - r0))
    return _clip01(val)


def _outer_intervals(params, process, upper):
    """Parent-distance intervals on which the deficit has a single formula."""
    edges = [0.0] + dist.case_edges(params, process)
    out = []
    for case_no, (lo, hi) in enumerate(zip(edges[:-1], edges[1:]), start=1):
        hi = min(hi, upper)
        if hi > lo:
            out.append((case_no, lo, hi))
    return out


def _outer_kinks(radii, params):
    """Parent distances where some piece boundary of the density crosses a radius in ``radii``."""
    R, r0 = params.R, params.r0
    pts = set()
    for s in radii:
        pts.update((s - r0, r0 - s, s + r0, R - s, s - R, s + R))
    return sorted(p for p in pts if p > 0)


def _mass_fn(r, params, process, method):
    process = Process(process)
    if method == "generic":
        return lambda v: dist.distance_cdf(r, v, params, process)
    if method != "closed":
        raise DomainError(f"unknown method {method!r}")
    if process is Process.MCP:
        return lambda v: mcp_region_term(r, v, params.R)
    return None


def _void_exponent(theta, r, params, process, spec, method):
    """``4 pi lambda_p * integral (1 - exp(-M (1 - theta) J(v))) v^2 dv`` over ``[0, r + R]``."""
    process = Process(process)
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta must lie in [0, 1], got {theta}")
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    k = params.mean_count(process) * (1.0 - theta)
    if params.lambda_p == 0 or k == 0 or r == 0:
        return 0.0
    upper = r + params.R  # J(v) = 0 for v >= r + R
    kinks = _outer_kinks([r], params)
    mass = _mass_fn(r, params, process, method)
    total = 0.0
    for case_no, lo, hi in _outer_intervals(params, process, upper):
        if mass is None:
            def f(v, case_no=case_no):
                return -math.expm1(-k * region_term(case_no, r, v, params)) * v * v
        else:
            def f(v):
                return -math.expm1(-k * mass(v)) * v * v
        total += integrate(f, lo, hi, spec, points=kinks)
    return 4.0 * math.pi * params.lambda_p * total


def pgf_count(theta, r, params: ProcessParams, process, spec: QuadratureSpec = DEFAULT_SPEC,
              method="closed"):
    """``E[theta**N]`` for the number ``N`` of points in ``b(o, r)``.

    ``method="closed"`` uses the clamped closed forms for the per-parent mass;
    ``method="generic"`` uses the piecewise CDFs directly. The two should agree
    to quadrature accuracy.
    """
    return math.exp(-_void_exponent(theta, r, params, process, spec, method))


def contact_cdf(r, params: ProcessParams, process, spec: QuadratureSpec = DEFAULT_SPEC,
                method="closed"):
    """Probability that the nearest point to the origin lies within ``r``."""
    return -math.expm1(-_void_exponent(0.0, r, params, process, spec, method))


@dataclass(frozen=True)
class Profile:
    """A function ``v: R^3 -> [0, 1]`` for the PGFL.

    Only isotropic profiles, ``v(y) = v(|y|)``, are evaluated. ``one_minus``
    returns ``1 - v(u)`` directly so small deficits keep full precision.
    ``support`` is a radius beyond which ``1 - v`` vanishes (None if never),
    ``kinks`` are radii where ``v`` is not smooth.
    """

    name: str
    one_minus: Callable[[float], float]
    support: float | None = None
    kinks: tuple = ()
    isotropic: bool = True
    args: dict = field(default_factory=dict)

    def __call__(self, u):
        return 1.0 - self.one_minus(u)


def indicator_profile(theta, r):
    """``v(y) = theta`` inside ``b(o, r)`` and 1 outside."""
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta must lie in [0, 1], got {theta}")
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    deficit = 1.0 - theta
    return Profile(
        "indicator",
        lambda u: deficit if u < r else 0.0,
        support=float(r),
        kinks=(float(r),),
        args={"theta": theta, "r": r},
    )


def exp_power_profile(s, alpha):
    """``v(y) = exp(-s |y|**-alpha)``; ``alpha > 3`` keeps the PGFL nonzero."""
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    if not alpha > 3:
        raise DomainError(f"alpha must exceed 3 for a finite exponent, got {alpha}")

    def one_minus(u):
        if u == 0:
            return 1.0 if s > 0 else 0.0
        return -math.expm1(-s * u ** (-alpha))

    return Profile("exp-power", one_minus, args={"s": s, "alpha": alpha})


def isotropic_profile(v, support=None, kinks=(), name="custom"):
    """Wrap a radial function ``v(u)`` with values in [0, 1]."""
    return Profile(name, lambda u: 1.0 - v(u), support=support, kinks=tuple(kinks))


@dataclass(frozen=True)
class PgflResult:
    value: float
    truncation_radius: float
    exact: bool
    process: str
    profile: str
    profile_args: dict

    def as_dict(self):
        return {
            "value": self.value,
            "truncation_radius": self.truncation_radius,
            "exact": self.exact,
            "process": self.process,
            "profile": self.profile,
            "profile_args": dict(self.profile_args),
        }


def _inner_deficit(profile, w, params, process, spec, weight):
    """``J(w) = integral (1 - v(u)) f(u | w) du`` over the distance support."""
    R = params.R
    lo = max(0.0, w - R)
    hi = w + R
    if profile.support is not None:
        hi = min(hi, profile.support)
    if hi <= lo:
        return 0.0
    pts = list(dist.breakpoints(w, params, process)) + list(profile.kinks)
    inner_spec = QuadratureSpec(
        abs_tol=spec.abs_tol / max(1.0, weight),
        rel_tol=spec.rel_tol,
        max_subdivisions=spec.max_subdivisions,
    )

    def g(u):
        return profile.one_minus(u) * dist.distance_pdf(u, w, params, process).value

    return integrate(g, lo, hi, inner_spec, points=pts)


def pgfl(profile: Profile, params: ProcessParams, process,
         spec: QuadratureSpec = DEFAULT_SPEC) -> PgflResult:
    """``E[prod v(y)]`` over the process for an isotropic profile.

    Outer truncation: for a profile with finite support ``s`` the parent
    integral stops at ``s + R``, beyond which the deficit is identically zero.
    Otherwise the range ``[2R, inf)`` is covered by doubling segments
    ``[a, 2a]`` until one contributes less than ``abs_tol / 2`` to the
    exponent; for integrands decaying at least like ``v**-2`` the neglected
    tail is then below ``abs_tol``. The last segment end is reported as the
    truncation radius.
    """
    if not isinstance(profile, Profile):
        raise UnsupportedInputError(
            "pgfl takes a Profile; general 3D functions have no quadrature plan"
        )
    if not profile.isotropic:
        raise UnsupportedInputError("non-isotropic profiles are not supported")
    process = Process(process)
    exact = process is Process.MCP
    meta = dict(process=process.value, profile=profile.name, profile_args=dict(profile.args))
    lam = params.lambda_p
    M = params.mean_count(process)
    if lam == 0:
        return PgflResult(1.0, 0.0, exact, **meta)
    scale = 4.0 * math.pi * lam

    def f(w):
        weight = scale * M * max(w, 1.0) ** 3
        J = _inner_deficit(profile, w, params, process, spec, weight)
        return -math.expm1(-M * J) * w * w

    radii = list(profile.kinks)
    if profile.support is not None:
        radii.append(profile.support)
        upper = profile.support + params.R
    else:
        upper = 2.0 * params.R
    kinks = _outer_kinks(radii, params)
    total = 0.0
    for _, lo, hi in _outer_intervals(params, process, upper):
        total += scale * integrate(f, lo, hi, spec, points=kinks)

    if profile.support is None:
        a = upper
        while True:
            seg = scale * integrate(f, a, 2 * a, spec)
            total += seg
            a *= 2
            if seg < spec.abs_tol / 2:
                break
            if a > 1e15:
                raise DomainError("PGFL tail does not decay; profile too heavy")
        upper = a
    return PgflResult(math.exp(-total), upper, exact, **meta)
