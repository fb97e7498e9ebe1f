"""
Skew-shift orbits: iteration, closed form, conjugacy
====================================================
"""

from fractions import Fraction

import numpy as np

from nilweyl import algebra, dynamics

alpha = [0.3819660112501051, 0.25, 0.1]
sys = dynamics.skew_shift(3, alpha)
s = [0.5, 0.0, 0.2]

# first few points
print(dynamics.orbit(sys, s, 5))

# N steps of the map against the binomial formula
for N in (10, 1000, 10**6):
    a = dynamics.iterate(sys, s, N)
    b = dynamics.iterate_closed_form(sys, s, N)
    print(N, a, np.abs(a - b).max())

# fixed-point mode is exact on the 2^-64 grid
fx = dynamics.skew_shift(3, [Fraction(3, 8), Fraction(1, 4), Fraction(1, 16)], "fixed64")
print(dynamics.iterate(fx, [0, 0, 0], 12345), dynamics.iterate_closed_form(fx, [0, 0, 0], 12345))

# two frequency vectors with the same leading entry are conjugate
alg = algebra.filiform(3)
beta = (alpha[0], 0.0, 0.0)
Y = algebra.conjugating_element(alg, alpha, beta)
t = [(Fraction(p) - q) % 1 for p, q in zip(s, Y)]
lhs = dynamics.iterate(dynamics.skew_shift(3, beta), t, 50)
rhs = dynamics.transport_point(dynamics.iterate(sys, s, 50).tolist(), Y)
print("conjugacy defect", np.abs(lhs - rhs).max())

# the section polynomial in ordinary monomials
P = dynamics.section_polynomial(sys, s)
print("leading coefficient", float(P.leading), "monomial form", [float(c) for c in P.monomial()])
