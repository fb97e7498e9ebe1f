"""
Filiform brackets in three bases
================================
"""

import json

from nilweyl import algebra

print(json.dumps(algebra.filiform(3).to_json()))

for row in algebra.vergne_matrix(5):
    print([str(v) for v in row])
print([algebra.check_vergne(k) for k in range(2, 9)])

# the quasi-Abelian cover and its quotient
qa = algebra.quasi_abelian(3)
print(qa.algebra.names, qa.verify_quotient())

# Ad(exp tX) on the eta coordinates is a binomial transform
print(algebra.h_map(4, 3, (1, 0, 0, 0)))
