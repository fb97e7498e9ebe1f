"""
Continued fractions and Diophantine exponents
=============================================
"""

import math
from fractions import Fraction

from nilweyl import diophantine

print(diophantine.continued_fraction("1.41421356237309504880168872420969807857", depth=12).quotients)

# a float only knows about 40 partial quotients of the golden ratio
cf = diophantine.continued_fraction((1 + math.sqrt(5)) / 2)
print(len(cf.quotients), cf.truncated, cf.reason)

golden = diophantine.golden_ratio(60)
liouville = Fraction(sum(10 ** (120 - math.factorial(j)) for j in range(1, 6)), 10**120)
for Q in (10**2, 10**4, 10**6, 10**8):
    print(Q, diophantine.diophantine_exponent_estimate(golden, Q),
          diophantine.diophantine_exponent_estimate(liouville, Q))

# small-denominator counts grow like 4 delta N for badly approximable numbers
x = float(golden - 1)
for N in (10**4, 10**5, 10**6):
    print(N, diophantine.count_small_denominators(x, N, 1e-3), 4e-3 * N)

# exponents of the Jarnik-type system at the optimal scaling for k = 3
print(diophantine.jarnik_exponents(3, (Fraction(2, 3), Fraction(1, 3), 0), Fraction(3, 2)))
