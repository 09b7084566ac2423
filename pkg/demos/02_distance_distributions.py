"""
Distance from the origin to an offspring point
==============================================

A cluster centred at distance ``x_norm`` from the origin puts its points
uniformly in a ball of radius R; with holes, uniformly in the shell between
r0 and R. The density of their distance to the origin is piecewise, and
which formula applies depends on where the parent sits.
"""

import numpy as np

from mcph import ProcessParams, classify_case, distance_cdf, distance_pdf
from mcph.geometry import sample_uniform_shell

params = ProcessParams(lambda_p=1e-5, R=50.0, r0=15.0)

# Parents at different distances fall in different cases.
for x in (10.0, 16.0, 20.0, 40.0, 60.0):
    print(f"x_norm={x:5.1f}  holed case {classify_case(x, params, 'mcph').case_no}"
          f"  plain case {classify_case(x, params, 'mcp').case_no}")

# Tabulate the holed density and distribution for a parent 20 m away.
print("\n  r     pdf        cdf    branch")
for r in np.arange(0.0, 75.0, 7.5):
    ev = distance_pdf(r, 20.0, params, "mcph")
    print(f"{r:5.1f}  {ev.value:.6f}  {distance_cdf(r, 20.0, params, 'mcph'):.6f}  {ev.case.branch_no}")

# Check against simulation: points uniform in the shell around (20, 0, 0).
rng = np.random.default_rng(3)
pts = sample_uniform_shell([20.0, 0.0, 0.0], 15.0, 50.0, rng, size=200_000)
d = np.linalg.norm(pts, axis=1)
for r in (10.0, 30.0, 50.0):
    print(f"P(d <= {r:.0f}): analytic {distance_cdf(r, 20.0, params, 'mcph'):.4f}  simulated {np.mean(d <= r):.4f}")
