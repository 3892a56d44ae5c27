"""
Generating functions and the Dirichlet kernel
=============================================

A_i and B_i have rational generating functions.  Expanding their sum gives
1 + 2 sum cos(2 j theta_N), which the Dirichlet kernel turns into the
closed-form amplitude.
"""

import math

from pwpgrover import dirichlet_check, gf_pair, recurrence_AB, series_coeffs
from pwpgrover.grover import success_prob_closed, theta
from pwpgrover.series import gf_sum

n = 128
gf_a, gf_b = gf_pair(n)
print("denominator:", [str(x) for x in gf_a.den])
print("A_0..A_4   :", [str(x) for x in series_coeffs(gf_a, 5)])
print("recurrence :", [str(recurrence_AB(n, i)[0]) for i in range(5)])
print("sum        :", [str(x) for x in series_coeffs(gf_sum(n), 3)])

lhs, rhs = dirichlet_check(8, theta(n))
print(f"kernel sum {lhs:.12f}, sin ratio {rhs:.12f}")
print(f"squared over N {lhs**2 / n:.12f} vs closed form {success_prob_closed(n, 8):.12f}")
assert math.isclose(lhs, rhs, abs_tol=1e-12)
