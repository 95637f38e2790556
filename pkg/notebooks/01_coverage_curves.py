"""
Coverage curves for the two-ray model
=====================================

Exponent 2 up to distance 1, exponent 4 beyond, unit noise.  The exact
curve, the closed-form lower bound and a Monte Carlo estimate side by side.
"""

import numpy as np

from multislope import NetworkScenario, SimConfig, db_to_linear, estimate_ccdf, make_dual
from multislope.analytic import coverage_dual, coverage_sinr_lower_bound_tworay

model = make_dual(2.0, 4.0, 1.0)
t_db = np.linspace(-20, 20, 9)
t = db_to_linear(t_db)

for lam in (0.1, 1.0, 10.0):
    net = NetworkScenario(lam, 1.0, model)
    exact = [coverage_dual(net, x).value for x in t]
    bound = [coverage_sinr_lower_bound_tworay(net, x).value for x in t]
    mc = estimate_ccdf(net, SimConfig(50_000, seed=1), t)
    print(f"density {lam}")
    print(" T[dB]   exact   bound      mc")
    for row in zip(t_db, exact, bound, mc.estimates):
        print("%6.1f  %.4f  %.4f  %.4f" % row)
    print()

# The bound is tight when few BSs compete: small threshold, sparse network.
net = NetworkScenario(0.1, 1.0, model)
for x in (1e-1, 1e-2, 1e-3):
    gap = coverage_dual(net, x).value - coverage_sinr_lower_bound_tworay(net, x).value
    print("T=%g  gap %.2e" % (x, gap))
