"""
Invariant distributions in Schrodinger models
=============================================
"""

import math

import numpy as np

from nilweyl import harness, representation

# calibration against closed forms
print(representation.dist_norm_poly([0, 0, 1], 1), math.sqrt(math.pi))
form = representation.rep_form(2, (0, 1))
print(representation.dist_norm(form, 1), math.sqrt(math.pi / math.sqrt(2)))

# growth of the norm under the renormalization flow
for k in (2, 3, 4):
    f = representation.rep_form(k, (0,) * (k - 1) + (1,))
    fit = representation.scaling_check(f, 1, harness.optimal_rho(k), np.linspace(0, 6, 7))
    print(k, fit.rate, fit.expected)

# solving u' = f needs the invariant of f to vanish
x = np.linspace(-8, 8, 2**16 + 1)
sol = representation.green_apply(x, -2 * x * np.exp(-x * x))
print("residual", sol.residual)
try:
    representation.green_apply(x, np.exp(-x * x))
except representation.ObstructionError as exc:
    print("obstruction", exc.value)

print("Green bound", representation.green_norm_bound(form, 2))

# orbit normalization of an integral form
print(representation.normalize_orbit_form(representation.rep_form(2, (3, 2))))
