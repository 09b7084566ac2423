"""Matérn cluster processes in 3D, with and without holes at cluster centres.

Analytic distance distributions, count generating functions, contact
distance and generating functional, a sampler, and Monte Carlo validation.
"""
from .distributions import (
    CaseIndex,
    PdfEval,
    classify_case,
    distance_cdf,
    distance_pdf,
    hole_correction,
    mcp_distance_cdf,
    mcp_distance_pdf,
    mcph_distance_cdf_ub,
    mcph_distance_pdf_ub,
)
from .errors import ConvergenceError, DomainError, UnsupportedInputError
from .functionals import (
    PgflResult,
    Profile,
    contact_cdf,
    exp_power_profile,
    indicator_profile,
    isotropic_profile,
    pgf_count,
    pgfl,
    region_term,
)
from .geometry import (
    LensGeometry,
    Point3,
    lens_volume,
    lens_volume_derivative,
    sample_uniform_ball,
    sample_uniform_shell,
)
from .params import Process, ProcessParams, SamplerMode
from .quadrature import QuadratureSpec, integrate
from .sampling import Realization, derive_m2, make_rng, sample_realization
from .validation import ComparisonReport, EmpiricalCdf, compare, mc_contact_distances

__version__ = "0.1.0"
