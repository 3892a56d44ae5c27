"""Dense state-vector model of an N-state quantum system.

States are immutable wrappers around complex128 numpy arrays.  Nothing
here renormalizes: a state that drifts off the unit sphere raises
``NormalizationError`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-9
MAX_MATRIX_N = 1024


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("a state needs a 1-d amplitude vector of length >= 1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    def norm2(self) -> float:
        """Total probability, the sum of square norms of the amplitudes."""
        a = self.amplitudes
        return float(np.sum(a.real**2 + a.imag**2))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm2() - 1.0) < tol

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return complex(self.amplitudes[i])


def uniform_state(n: int) -> QuantumState:
    """Equal superposition of all ``n`` basis states."""
    if n < 1:
        raise ValueError(f"state size must be positive, got {n}")
    return QuantumState(np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128))


def classical_state(i: int, n: int) -> QuantumState:
    if n < 1:
        raise ValueError(f"state size must be positive, got {n}")
    if not 0 <= i < n:
        raise IndexError(f"basis index {i} outside 0..{n - 1}")
    a = np.zeros(n, dtype=np.complex128)
    a[i] = 1.0
    return QuantumState(a)


def state_mean(s: QuantumState) -> complex:
    return complex(np.mean(s.amplitudes))


def measure_probs(s: QuantumState, tol: float = 1e-6) -> np.ndarray:
    """Probability of collapsing to each basis state."""
    if not s.is_normalized(tol):
        raise NormalizationError(f"state has total probability {s.norm2()!r}")
    a = s.amplitudes
    return a.real**2 + a.imag**2


def check_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    """True iff both U.U^dagger and U^dagger.U are within ``tol`` of I entrywise."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    eye = np.eye(u.shape[0])
    uh = u.conj().T
    return bool(
        np.max(np.abs(u @ uh - eye)) < tol and np.max(np.abs(uh @ u - eye)) < tol
    )


# ---------------------------------------------------------------------------
# Grover loop body


def _checked(a: np.ndarray, tol: float) -> QuantumState:
    s = QuantumState(a)
    if not s.is_normalized(tol):
        raise NormalizationError(f"evolution left total probability {s.norm2()!r}")
    return s


def oracle_flip(s: QuantumState, x0: int, tol: float = NORM_TOL) -> QuantumState:
    """Negate the amplitude of the marked state: S(i) - 2 f(i) S(i)."""
    if not 0 <= x0 < s.n:
        raise IndexError(f"marked index {x0} outside 0..{s.n - 1}")
    a = s.amplitudes.copy()
    a[x0] = -a[x0]
    return _checked(a, tol)


def invert_about_mean(s: QuantumState, tol: float = NORM_TOL) -> QuantumState:
    """S(i) -> 2 mean(S) - S(i)."""
    a = s.amplitudes
    return _checked(2 * np.mean(a) - a, tol)


def grover_body(s: QuantumState, x0: int, tol: float = NORM_TOL) -> QuantumState:
    """One loop-body iteration in O(N)."""
    return invert_about_mean(oracle_flip(s, x0, tol), tol)


def grover_evolve(n: int, x0: int, c: int) -> QuantumState:
    """Uniform state of size ``n`` after ``c`` loop-body iterations."""
    s = uniform_state(n)
    for _ in range(c):
        s = grover_body(s, x0)
    return s


def oracle_matrix(n: int, x0: int) -> np.ndarray:
    if not 0 <= x0 < n:
        raise IndexError(f"marked index {x0} outside 0..{n - 1}")
    o = np.eye(n, dtype=np.complex128)
    o[x0, x0] = -1
    return o


def diffusion_matrix(n: int) -> np.ndarray:
    return np.full((n, n), 2.0 / n, dtype=np.complex128) - np.eye(n)


def grover_step_matrix(n: int, x0: int) -> np.ndarray:
    """Matrix of one loop-body iteration: diffusion after oracle."""
    if n > MAX_MATRIX_N:
        raise ValueError(f"matrices are only built for N <= {MAX_MATRIX_N}")
    return diffusion_matrix(n) @ oracle_matrix(n, x0)


def apply(u: np.ndarray, s: QuantumState, tol: float = NORM_TOL) -> QuantumState:
    return _checked(u @ s.amplitudes, tol)
