"""
Empirical likelihood for a mean
===============================

Evaluate l(theta) on a small sample, compare it with the chi-square
calibration, and watch it become infinite once theta leaves the hull.
"""

import numpy as np

from elbounds.el import RegionSpec, chisq_radius, el_logratio, in_region, mean_estimating_function

y = np.array([0.3, -1.2, 0.8, 1.9, -0.4, 0.1])
region = RegionSpec.from_level(1, 0.95)
print(f"chi-square radius for 95%: {region.radius:.4f}")

for theta in (0.0, 0.25, 1.0, 1.5, 2.0):
    ev = el_logratio(mean_estimating_function(y, theta))
    inside = in_region(mean_estimating_function(y, theta), region)
    print(f"theta={theta:<5} l={ev.log_ratio:9.4f}  status={ev.status.value:<11} in region: {inside}")

# the weights at the optimum tilt the sample towards theta
ev = el_logratio(mean_estimating_function(y, 1.0))
print("weights at theta=1:", np.round(ev.weights, 4), " weighted mean:", ev.weights @ y)
print("k=2 radius at 90%:", chisq_radius(2, 0.90))
