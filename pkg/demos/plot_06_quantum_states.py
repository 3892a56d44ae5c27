"""
The loop body as a matrix
=========================

One iteration flips the sign of the marked amplitude and then inverts every
amplitude about the mean.  As a matrix it is unitary, and repeated
application concentrates the amplitude on the marked state.
"""

import numpy as np

from pwpgrover import check_unitary, grover_step_matrix, measure_probs, uniform_state
from pwpgrover.quantum import apply

n, x0 = 8, 4
u = grover_step_matrix(n, x0)
print("unitary:", check_unitary(u))

s = uniform_state(n)
for c in range(4):
    print(c, np.round(measure_probs(s), 4))
    s = apply(u, s)
