"""
Symmetric laws are the worst case on the line and the circle
============================================================

For k = 1 and k = 2 the probability that n i.i.d. points surround the
origin is largest for symmetric laws.  Quadrature on the circle and a
Monte Carlo check make this concrete.
"""

from elbounds.circle import CircularDensity, circle_outside_prob, line_prob, symmetric_prob
from elbounds.geometry import CardioidCircle
from elbounds.simulation import estimate_hull_prob

# on the line: +1 with probability p, -1 otherwise
for p in (0.1, 0.3, 0.45, 0.5):
    print(f"p={p:<4}  P(0 in hull, n=6) = {line_prob(p, 6):.4f}")

# on the circle: a cardioid versus any symmetric density
card = CircularDensity.cardioid(1.0)
print(" n  cardioid  symmetric")
for n in range(3, 9):
    print(f"{n:>2}  {1 - circle_outside_prob(card, n):.5f}   {symmetric_prob(n):.5f}")

rep = estimate_hull_prob(CardioidCircle(1.0), 5, N=50_000, seed=1)
print(f"MC n=5: {rep.estimate:.4f} +/- {rep.std_error:.4f}")
