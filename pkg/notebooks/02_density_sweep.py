"""
Coverage versus density
=======================

With a single exponent the SIR does not depend on the density.  With two
exponents it does: it falls as the network densifies, and with noise the
SINR coverage peaks at a finite density.
"""

import numpy as np

from multislope import NetworkScenario, coverage, make_dual, make_standard, sir_coverage_standard

lams = np.logspace(-3, 4, 15)

flat = [coverage(NetworkScenario(lam, 0.0, make_standard(4.0)), 1.0).value for lam in lams]
print("single exponent 4, spread over the grid:", np.ptp(flat))

model = make_dual(3.0, 4.0, 1.0)
sir = [coverage(NetworkScenario(lam, 0.0, model), 1.0).value for lam in lams]
print("exponents (3, 4):")
for lam, p in zip(lams, sir):
    print("  %9.3g  %.4f" % (lam, p))
# sparse networks see only the far exponent, dense ones only the near one
print("limits:", sir_coverage_standard(4.0, 1.0), sir_coverage_standard(3.0, 1.0))

# noise-limited at low density, interference-limited at high density
model = make_dual(2.0, 4.0, 1.0)
grid = np.logspace(-3, 2, 26)
sinr = np.array([coverage(NetworkScenario(lam, 1.0, model), 1.0).value for lam in grid])
k = int(np.argmax(sinr))
print("two-ray SINR coverage peaks at density %.3g with %.4f" % (grid[k], sinr[k]))
