import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pwpgrover.expr import AmpVector
from pwpgrover.grover import (
    GroverParams,
    ab_sequence,
    build_grover_program,
    grover_env,
    nearest_whole_optimum,
    optimal_iterations,
    optimal_real,
    optimal_table,
    recurrence_AB,
    simulate,
    success_post,
    success_prob_backward,
    success_prob_closed,
    success_prob_recurrence,
    success_prob_wp,
    sweep,
    theta,
)
from pwpgrover.lang import parse, pretty
from pwpgrover.quantum import uniform_state
from pwpgrover.wp import final_distribution, wp


def scaled_amplitudes(n, c):
    """Independent exact oracle: amplitudes times sqrt(N) stay rational.
    Returns (marked, unmarked) after c iterations."""
    a, b = Fraction(1), Fraction(1)
    for _ in range(c):
        m = (-a + (n - 1) * b) / n
        a, b = 2 * m + a, 2 * m - b
    return a, b


def exact_prob(n, c):
    a, _ = scaled_amplitudes(n, c)
    return a * a / n


def matrix_power_ab(n, c):
    """(A_c, B_c) from the 2x2 transition matrix raised by squaring."""
    m = ((Fraction(1), Fraction(2)), (Fraction(-2, n), Fraction(n - 4, n)))

    def mul(x, y):
        return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(2)) for j in range(2))
                     for i in range(2))

    r = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    while c:
        if c & 1:
            r = mul(r, m)
        m = mul(m, m)
        c >>= 1
    return r[0][1], r[1][1]


def brute_force_argmax(n, tol=1e-12):
    cmax = math.ceil(2 * math.sqrt(n))
    ps = [success_prob_closed(n, c) for c in range(cmax + 1)]
    best = max(ps)
    return {c for c, p in enumerate(ps) if p >= best - tol}


# program construction


def test_init_leaf_is_uniform_state():
    from pwpgrover.lang import Program

    prog = build_grover_program(GroverParams(8, 4, 1))
    ((w, env),) = final_distribution(Program(prog.stmts[:1]))
    assert w == 1.0
    assert env["S"] == AmpVector(tuple(uniform_state(8).amplitudes))


def test_program_round_trips():
    prog = build_grover_program(GroverParams(8, 4, 1))
    assert parse(pretty(prog)) == prog


@pytest.mark.parametrize("n", [1, 2, 5, 8, 64])
def test_zero_iterations_give_one_over_n(n):
    assert success_prob_wp(n, 0) == pytest.approx(1 / n, abs=1e-12)
    assert success_prob_recurrence(n, 0) == pytest.approx(1 / n, abs=1e-15)
    assert success_prob_closed(n, 0) == pytest.approx(1 / n, abs=1e-15)


def test_parametric_program_with_env():
    from pwpgrover.grover import grover_source

    p = GroverParams(16, 5, 3)
    got = wp(parse(grover_source()), success_post(p), grover_env(p))
    assert got == pytest.approx(success_prob_closed(16, 3), abs=1e-12)


def test_invalid_params():
    for args in [(0, 0, 0), (4, 4, 0), (4, -1, 0), (4, 0, -1)]:
        with pytest.raises(ValueError):
            GroverParams(*args)


# recurrence


def test_recurrence_initial_values():
    assert recurrence_AB(7, 0) == (0, 1)
    for n in (1, 3, 4, 128):
        assert recurrence_AB(n, 1) == (2, Fraction(n - 4, n))


@pytest.mark.parametrize(
    "n, c, expected",
    [(4, 2, (2, -1)), (4, 1, (2, 0)), (8, 3, (Fraction(5, 2), Fraction(-7, 8)))],
)
def test_recurrence_frozen_values(n, c, expected):
    assert recurrence_AB(n, c) == expected


@given(st.integers(1, 300), st.integers(0, 60))
def test_recurrence_matches_matrix_power(n, c):
    assert recurrence_AB(n, c) == matrix_power_ab(n, c)


@given(st.integers(1, 300), st.integers(0, 40))
def test_recurrence_probability_is_exact(n, c):
    a, b = recurrence_AB(n, c)
    assert (a + b) ** 2 / n == exact_prob(n, c)
    # A + B is the scaled marked amplitude
    assert a + b == scaled_amplitudes(n, c)[0]


def test_ab_sequence_prefix():
    seq = ab_sequence(128, 30)
    assert len(seq) == 31
    assert all(seq[c] == recurrence_AB(128, c) for c in range(31))


def test_exact_probabilities():
    assert exact_prob(4, 1) == 1
    assert exact_prob(8, 1) == Fraction(25, 32)
    assert success_prob_recurrence(4, 1) == 1.0
    assert success_prob_recurrence(8, 1) == 25 / 32


def test_headline_value_n128_c8():
    assert abs(success_prob_recurrence(128, 8) - 0.996) < 1e-3
    assert abs(success_prob_closed(128, 8) - 0.9956) < 5e-4
    assert success_prob_recurrence(128, 8) == pytest.approx(float(exact_prob(128, 8)), abs=1e-15)
    assert float(exact_prob(128, 8)) == pytest.approx(0.9956198656943223, abs=1e-15)


# theta and the optimum


def test_theta():
    assert theta(1) == pytest.approx(math.pi / 2)
    assert theta(4) == pytest.approx(math.pi / 6)
    assert theta(128) == pytest.approx(0.08850384314401545, abs=1e-15)
    assert math.sin(theta(128)) ** 2 == pytest.approx(1 / 128)


def test_closed_form_values():
    assert success_prob_closed(4, 1) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n, h", [(1, 0.0), (4, 1.0), (128, 8.374170154616118)])
def test_optimal_real(n, h):
    assert optimal_real(n) == pytest.approx(h, abs=1e-12)


@pytest.mark.parametrize("n, c", [(1, 0), (4, 1), (128, 8), (2, 0), (3, 1)])
def test_optimal_iterations(n, c):
    assert optimal_iterations(n) == c


def test_optimality_exhaustive():
    for n in range(2, 4097):
        assert optimal_iterations(n) in brute_force_argmax(n), n


def test_window_reaches_second_peak_for_few_small_n():
    differ = [n for n in range(1, 4097) if optimal_iterations(n) != nearest_whole_optimum(n)]
    assert differ == [6, 7, 8, 13, 14, 17, 26]
    assert (nearest_whole_optimum(6), optimal_iterations(6)) == (1, 5)
    assert success_prob_closed(6, 5) > success_prob_closed(6, 1)


@pytest.mark.parametrize("n, c", [(1, 0), (2, 0), (4, 1), (128, 8), (10**6, 785)])
def test_nearest_whole_optimum(n, c):
    assert nearest_whole_optimum(n) == c


def test_every_count_ties_at_n2():
    # theta = pi/4, so sin^2((2C+1) pi/4) = 1/2 for every C
    assert brute_force_argmax(2) == set(range(4))


def test_asymptotic_growth():
    n = 10**6
    ratio = optimal_real(n) / math.sqrt(n)
    assert 0.99 * math.pi / 4 <= ratio <= 1.01 * math.pi / 4


def test_optimal_table():
    rows = optimal_table(130)
    assert [r.n for r in rows] == list(range(1, 131))
    assert rows[127].c_star == 8
    assert rows[127].p_at_c_star == pytest.approx(0.9956, abs=5e-4)
    assert rows[0] == optimal_table(1)[0]


# sweeps


def test_sweep_n128():
    rows = sweep(128, 20)
    assert [r.c for r in rows] == list(range(21))
    assert max(rows, key=lambda r: r.p_closed).c == 8
    assert all(abs(r.p_recurrence - r.p_closed) < 1e-9 for r in rows)
    ps = [r.p_closed for r in rows[8:13]]
    assert all(x > y for x, y in zip(ps, ps[1:]))


def test_sweep_n4_is_periodic():
    ps = [r.p_closed for r in sweep(4, 6)]
    assert ps[4] == pytest.approx(1.0, abs=1e-12)
    assert ps[1] == pytest.approx(1.0, abs=1e-12)
    assert [r.p_recurrence for r in sweep(4, 6)] == [0.25, 1.0, 0.25, 0.25, 1.0, 0.25, 0.25]


@given(st.integers(1, 2000))
def test_sweep_first_row(n):
    assert sweep(n, 0)[0].p_recurrence == pytest.approx(1 / n, abs=1e-15)


@given(st.integers(1, 500), st.integers(0, 80))
def test_probability_bounds_and_reality(n, c):
    a, b = recurrence_AB(n, c)
    assert isinstance(a + b, Fraction)
    for p in (success_prob_recurrence(n, c), success_prob_closed(n, c)):
        assert 0 <= p <= 1 + 1e-15


# the three routes


@pytest.mark.parametrize("n", [2, 4, 8, 16, 64, 128, 1024])
def test_three_way_agreement(n):
    for c in range(26):
        pw, pr, pc = success_prob_wp(n, c), success_prob_recurrence(n, c), success_prob_closed(n, c)
        assert abs(pw - pr) < 1e-9 and abs(pr - pc) < 1e-9 and abs(pw - pc) < 1e-9, (n, c)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 13, 16])
def test_x0_independence(n):
    for c in range(4):
        ps = [success_prob_wp(n, c, x0) for x0 in range(n)]
        assert max(ps) - min(ps) < 1e-12


def test_backward_route_small():
    assert success_prob_backward(8, 4) == pytest.approx(success_prob_closed(8, 4), abs=1e-9)
    assert success_prob_backward(4, 1, 2) == pytest.approx(1.0, abs=1e-12)


# simulation


def test_simulation_n4_always_hits():
    assert simulate(4, 1, 1000, 7) == (1000, 1.0)


def test_simulation_is_reproducible():
    assert simulate(16, 3, 2000, 11, 5) == simulate(16, 3, 2000, 11, 5)


def test_simulation_frequency_n128():
    hits, freq = simulate(128, 8, 100000, 7)
    assert abs(freq - 0.9956) < 0.003
    assert hits == 99560
