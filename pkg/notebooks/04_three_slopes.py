"""
Three slopes
============

Flat gain (exponent 0) up to distance 1, exponent 2 up to 267 and 4
beyond, with a small noise power.  Coverage from the N-slope formula checked
against simulation.
"""

import numpy as np

from multislope import NetworkScenario, SimConfig, coverage, db_to_linear, estimate_ccdf, make_multislope

model = make_multislope([0.0, 2.0, 4.0], [1.0, 267.0])
print("continuity constants:", model.constants)

t_db = np.linspace(-20, 20, 9)
t = db_to_linear(t_db)
for lam in (1e-7, 1e-5, 1e-3):
    net = NetworkScenario(lam, 1e-8, model)
    exact = np.array([coverage(net, x).value for x in t])
    est = estimate_ccdf(net, SimConfig(30_000, seed=3), t)
    inside = est.contains(exact)
    print(f"density {lam:g}: {inside.sum()}/{len(t)} inside the 99% interval")
    print("  ", np.round(exact, 4))
    print("  ", np.round(est.estimates, 4))
