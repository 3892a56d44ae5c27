"""
Seeded simulation of the measurement
====================================

Each run draws the measurement outcome at random.  Over many runs the hit
frequency approaches the success probability, and a fixed seed always
gives the same answer.
"""

from pwpgrover.grover import simulate, success_prob_closed

n, c = 128, 8
for seed in (1, 2, 3):
    hits, freq = simulate(n, c, runs=100_000, seed=seed)
    print(f"seed {seed}: {hits} hits, frequency {freq:.4f}")
print(f"exact: {success_prob_closed(n, c):.4f}")

assert simulate(n, c, 1000, 42) == simulate(n, c, 1000, 42)
