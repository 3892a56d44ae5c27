import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwpgrover.expr import AmpVector, evaluate
from pwpgrover.grover import oracle_lambda
from pwpgrover.lang import parse
from pwpgrover.quantum import (
    NormalizationError,
    QuantumState,
    apply,
    check_unitary,
    classical_state,
    grover_body,
    grover_evolve,
    grover_step_matrix,
    invert_about_mean,
    measure_probs,
    oracle_flip,
    state_mean,
    uniform_state,
)
from pwpgrover.wp import final_distribution

BODY = parse(
    "S := (lam i | 0 <= i < N . S(i) - 2 * f(i) * S(i));"
    "S := (lam i | 0 <= i < N . 2 * mean(S) - S(i))"
)


def test_uniform_state():
    assert np.array_equal(uniform_state(4).amplitudes, [0.5] * 4)
    assert np.array_equal(uniform_state(1).amplitudes, [1])
    assert uniform_state(128).norm2() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        uniform_state(0)


def test_states_are_read_only():
    s = uniform_state(3)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2


@pytest.mark.parametrize("i, n, expected", [(0, 2, [1, 0]), (3, 4, [0, 0, 0, 1])])
def test_classical_state(i, n, expected):
    assert np.array_equal(classical_state(i, n).amplitudes, expected)
    assert state_mean(classical_state(i, n)) == pytest.approx(1 / n)


def test_classical_state_out_of_range():
    with pytest.raises(IndexError):
        classical_state(4, 4)


def test_state_mean():
    assert state_mean(QuantumState([1, -1])) == 0
    assert state_mean(uniform_state(16)) == pytest.approx(0.25)
    flipped = oracle_flip(uniform_state(8), 4)
    assert state_mean(flipped) == pytest.approx(6 / 8 / np.sqrt(8), abs=1e-15)


def test_measure_probs():
    assert np.allclose(measure_probs(uniform_state(4)), [0.25] * 4)
    assert np.array_equal(measure_probs(classical_state(1, 2)), [0, 1])
    assert np.allclose(measure_probs(grover_evolve(4, 3, 1)), [0, 0, 0, 1], atol=1e-15)
    with pytest.raises(NormalizationError):
        measure_probs(QuantumState([1, 1]))


def test_measure_probs_tolerates_small_drift():
    s = QuantumState([1 + 1e-8, 0])
    assert measure_probs(s).sum() == pytest.approx(1, abs=1e-7)


@pytest.mark.parametrize(
    "u, ok",
    [
        (np.eye(3), True),
        (np.diag([-1, 1]), True),
        (np.ones((2, 2)), False),
        (np.array([[0, 1j], [1j, 0]]), True),
    ],
)
def test_check_unitary(u, ok):
    assert check_unitary(u, 1e-12) is ok


def test_check_unitary_needs_square():
    with pytest.raises(ValueError):
        check_unitary(np.ones((2, 3)))


def test_step_matrix_n2():
    # D = [[0,1],[1,0]] after O = diag(-1,1)
    assert np.array_equal(grover_step_matrix(2, 0), [[0, 1], [-1, 0]])


def test_step_matrix_on_uniform_n4():
    s = apply(grover_step_matrix(4, 3), uniform_state(4))
    assert np.allclose(s.amplitudes, [0, 0, 0, 1], atol=1e-15)


@pytest.mark.parametrize("n", [2, 4, 8, 64, 256])
def test_step_matrix_is_unitary(n):
    assert check_unitary(grover_step_matrix(n, n // 2), 1e-12)


def test_step_matrix_size_limit():
    with pytest.raises(ValueError):
        grover_step_matrix(2048, 0)


def test_no_silent_renormalization():
    bad = QuantumState([0.9, 0])
    with pytest.raises(NormalizationError):
        invert_about_mean(bad)
    with pytest.raises(NormalizationError):
        apply(np.eye(2), bad)


def _random_state(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    return QuantumState(a / np.linalg.norm(a))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 64))
def test_norm_preservation(seed, n):
    s = _random_state(seed, n)
    x0 = seed % n
    for t in (oracle_flip(s, x0), invert_about_mean(s), grover_body(s, x0),
              apply(grover_step_matrix(n, x0), s)):
        assert abs(t.norm2() - 1) < 1e-12
    assert abs(measure_probs(s).sum() - 1) < 1e-9


@pytest.mark.parametrize("n", [2, 4, 8, 64, 256, 4096])
def test_grover_dynamics_stay_real_and_normalized(n):
    s = uniform_state(n)
    for _ in range(25):
        s = oracle_flip(s, 1 % n)
        assert abs(s.norm2() - 1) < 1e-12
        s = invert_about_mean(s)
        assert abs(s.norm2() - 1) < 1e-12
        assert np.all(s.amplitudes.imag == 0)


@pytest.mark.parametrize("n, x0, c", [(1, 0, 3), (2, 1, 4), (4, 0, 3), (8, 4, 5), (16, 7, 6), (32, 31, 4)])
def test_matrix_path_matches_language_path(n, x0, c):
    u = grover_step_matrix(n, x0)
    env = {"N": n, "f": evaluate(oracle_lambda(n, x0))}
    s = uniform_state(n)
    lang = AmpVector(tuple(s.amplitudes))
    for _ in range(c):
        s = apply(u, s)
        ((w, out),) = final_distribution(BODY, {**env, "S": lang}).leaves
        assert w == 1.0
        lang = out["S"]
        assert np.allclose(s.amplitudes, list(lang), atol=1e-9, rtol=0)
    assert np.allclose(grover_evolve(n, x0, c).amplitudes, s.amplitudes, atol=1e-12, rtol=0)
