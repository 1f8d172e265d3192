"""
How much coverage can an EL region promise?
===========================================

With n observations and a k-dimensional estimating function, no empirical
likelihood region can cover the truth with probability above b(k, n).
This script computes b exactly, prints the familiar table, and shows how
quickly the bound collapses once n is only a small multiple of k.
"""

from elbounds import bounds

# b(k, n) is stored as an exact rational; the float view is derived from it
b = bounds.exact_bound(2, 6)
print("b(2, 6) =", b.as_fraction(), "=", b.value)

# the grid for k = 1, 2, 5 and n = 2k .. 8k, rounded half-up to 4 places
print(bounds.format_table_csv(), end="")

# a nominal 95% region with k = 2 and n = 4 is impossible: b(2, 4) = 1/2
for k, n in [(2, 4), (1, 8), (5, 15), (10, 30)]:
    v = bounds.check_level(k, n, 0.95)
    print(f"k={k:>2} n={n:>3}  bound={v.bound.value:.4f}  95% attainable: {v.achievable}")

# for fixed k / n the bound tends to 1 below one half and to 0 above it
for n in (20, 80, 320):
    lo = bounds.normal_approx_bound(0.25, n)
    hi = bounds.normal_approx_bound(0.25, n, upper=True)
    print(f"n={n:>3}  b([n/4], n)={lo.exact.value:.6f}  b([3n/4], n)={hi.exact.value:.3e}")
