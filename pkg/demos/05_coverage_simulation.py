"""
Coverage never beats the hull probability
=========================================

A Monte Carlo run of EL coverage for the mean of n = 5 normal draws.
Growing the radius raises coverage, but only up to the probability that
the truth is inside the data hull, which for symmetric data is b(1, 5).
A short scan in three dimensions then compares several laws with b(3, 8).
"""

import math

from elbounds.bounds import exact_bound
from elbounds.el import chisq_radius
from elbounds.geometry import ShiftedGaussian, UniformSphere
from elbounds.simulation import CoverageProblem, conjecture_scan, coverage_curve

problem = CoverageProblem(ShiftedGaussian.centered(1), n=5)
radii = [chisq_radius(1, 0.95), 5.0, 10.0, 20.0, 40.0, math.inf]
for r, rep in zip(radii, coverage_curve(problem, radii, N=20_000, seed=7)):
    print(f"r={r:>7.3f}  coverage={rep.estimate:.4f}  [{rep.wilson_lo:.4f}, {rep.wilson_hi:.4f}]")
print("b(1, 5) =", exact_bound(1, 5).value)

# in R^3 the claim that b(3, n) bounds every law is a conjecture; rows say so
specs = [UniformSphere(3), ShiftedGaussian((1.0, 0.0, 0.0)), ShiftedGaussian((0.25, 0.0, 0.0))]
for row in conjecture_scan(3, 8, specs, N=20_000, seed=3):
    print(f"{row.sampler}: {row.report.estimate:.4f}  gap={row.gap:+.4f}  "
          f"within bound: {row.within_bound}  conjectural: {row.conjecture_dependent}")
