"""
Weyl sums along a skew-shift
============================

The last coordinate of a skew-shift orbit is a polynomial in time, so
summing e(s_k) along the orbit gives a Weyl sum. We check a Gauss sum,
then watch how |W| grows with N for a quadratic and a cubic.
"""

from fractions import Fraction

import numpy as np

from nilweyl import dynamics, harness

# n^2/5: the classical Gauss sum has modulus sqrt(5)
alpha, s = dynamics.monomial_to_section(2, (Fraction(1, 5), 0))
sys = dynamics.skew_shift(2, alpha)
W = dynamics.weyl_sum_skew(sys, s, 1, 5)
print("Gauss sum", W, abs(W), np.sqrt(5))

# the same sum evaluated term by term
print("direct    ", dynamics.weyl_sum_direct((Fraction(1, 5), 0), 1, 5))

# quadratic with an irrational frequency: |W| ~ N^(1/2)
cfg = harness.SweepConfig(k=2, alpha=("1.4142135623730950488016887242097", 0),
                          schedule=tuple(harness.dyadic_schedule(8, 22)))
tab = harness.dyadic_weyl_sweep(cfg)
for n, w in zip(tab.N, tab.W):
    print(f"{n:>9d}  {abs(w):12.3f}")
print("quadratic slope", harness.slope_fit(tab).slope)

# cubic: compare with the power 1 - 1/6 for two random starting points
for seed in (1, 2):
    cfg = harness.SweepConfig(k=3, alpha=("0.4142135623730950488016887242097", 0, 0), seed=seed)
    rep = harness.bound_check(harness.dyadic_weyl_sweep(cfg), 3)
    print(f"seed {seed}: slope {rep.slope:.3f}  max ratio {rep.max_ratio:.4f}  {rep.verdict}")
