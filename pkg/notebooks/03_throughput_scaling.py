"""
Throughput scaling
==================

Potential throughput tau = log2(1+T) * density * coverage.  Its log-log
slope at high density depends on the near-field exponent alpha0: linear
growth above 2, growth at rate 2 - 2/alpha0 between 1 and 2, decay below 1.
"""

from multislope import phase_transition_report

rows = phase_transition_report([0.9, 1.0, 1.5, 1.8, 2.5, 3.0], alpha1=4.0, r_c=1.0, threshold=1.0)

print("alpha0  slope   predicted  tag")
for r in rows:
    predicted = min(1.0, 2.0 - 2.0 / r.alpha0)
    print("%5.1f  %6.3f  %6.3f     %s" % (r.alpha0, r.exponent, predicted, r.tag))

# the sublinear rates are approached slowly; the fit window ends at 1e5
sweep = rows[3].sweep
for lam, cov, mu, tau in sweep.rows[-5:]:
    print("%9.3g  %.4f  %10.3f" % (lam, cov, tau))
