"""
Contact distance
================

How far is the nearest point from a typical location? For the plain
process the formula is exact. For the holed process the own-hole model gives
an upper bound on the distribution function.
"""

import numpy as np

from mcph import ProcessParams, contact_cdf

plain = ProcessParams(1e-5, 50.0, 0.0, 20.0, 20.0)
holed = {lam: ProcessParams.from_m2(lam, 50.0, 15.0, 20.0) for lam in (1e-5, 2e-5)}

print("   r   plain     holed 1e-5  holed 2e-5")
for r in np.arange(0.0, 35.0, 2.5):
    row = [contact_cdf(r, plain, "mcp")] + [contact_cdf(r, p, "mcph") for p in holed.values()]
    print(f"{r:5.1f}  " + "  ".join(f"{v:.6f}" for v in row))

# More parents put a point nearby sooner: the curve for the larger
# intensity lies above the other one.
grid = np.linspace(0, 60, 31)
lo = [contact_cdf(r, holed[1e-5], "mcph") for r in grid]
hi = [contact_cdf(r, holed[2e-5], "mcph") for r in grid]
print("ordered:", all(b >= a for a, b in zip(lo, hi)))
