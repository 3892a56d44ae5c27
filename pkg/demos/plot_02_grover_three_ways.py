"""
Grover's success probability, three ways
========================================

The search program is run through the wp engine and compared with the
exact A/B recurrence and the closed form sin^2((2C+1) theta_N).
"""

from pwpgrover import (
    GroverParams,
    build_grover_program,
    pretty,
    recurrence_AB,
    success_prob_closed,
    success_prob_recurrence,
    success_prob_wp,
)

print(pretty(build_grover_program(GroverParams(n=8, x0=4, c=1))))
print()

n = 128
print(" C   wp engine        recurrence       closed form")
for c in range(0, 13):
    print(f"{c:2d}   {success_prob_wp(n, c):.12f}   "
          f"{success_prob_recurrence(n, c):.12f}   {success_prob_closed(n, c):.12f}")

# the recurrence is exact; A_8 + B_8 is a rational number
a, b = recurrence_AB(n, 8)
print("A_8 + B_8 =", a + b)
