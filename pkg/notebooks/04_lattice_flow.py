"""
Injectivity radius along a diagonal orbit
=========================================

The lattice attached to alpha is pushed by diag(e^-t, e^(rho_i t)). For a
badly approximable frequency the shortest vector stays bounded below.
"""

import numpy as np

from nilweyl import diophantine, lattice

golden = diophantine.golden_ratio(60)
grid = np.arange(0, 25.0001, 0.25)

tr = lattice.inj_trajectory((golden, 0), (1, 0), grid)
print("delta_hat", tr.delta_hat, "C", tr.C)
print("floor", tr.floor, "at t =", tr.argmin)

# a rational frequency collapses like e^-t
tr_q = lattice.inj_trajectory((0.5, 0), (1, 0), np.arange(0, 10.01, 0.5))
print("rational delta_hat", tr_q.delta_hat)

# a single basis, reduced and enumerated
B = lattice.alpha_lattice_basis((golden, 0.3), (0.6, 0.4), 4.0)
sv = lattice.shortest_vector(B)
print("shortest", sv.length, sv.coeffs, "nodes", sv.nodes)

# I* from the sampled curve and the resulting width bound
I = np.minimum.accumulate(tr.inj)
istar = lattice.i_star(grid, I, 5.0)
print(istar, lattice.width_lower_bound(2, 5.0, istar=istar))
