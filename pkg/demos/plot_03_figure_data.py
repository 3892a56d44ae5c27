"""
Probability curve and optimum iteration counts
==============================================

Writes the data behind the two figures as CSV: success probability against
the iteration count for N = 128, and the optimum count against N.
Plot them with any tool; nothing here depends on a plotting library.
"""

from pwpgrover.cli import run_cli

# the probability peaks at C = 8 and then falls off again
run_cli(["grover", "sweep", "--n", "128", "--cmax", "20"])

# optimum counts grow like (pi/4) sqrt(N); for a few small N the best count
# in 0..ceil(2 sqrt N) sits on the second peak
run_cli(["grover", "optimal", "--nmax", "16"])
