"""Probabilistic weakest-precondition calculus for a small imperative
language, applied to the success probability of Grover's search."""

from .expr import (
    AmpVector,
    EvalError,
    Func,
    Sym,
    classical,
    evaluate,
    norm2,
    subst,
)
from .grover import (
    GroverParams,
    build_grover_program,
    nearest_whole_optimum,
    optimal_iterations,
    optimal_real,
    recurrence_AB,
    success_prob_closed,
    success_prob_recurrence,
    success_prob_wp,
    sweep,
    theta,
)
from .lang import ParseError, Program, StaticError, parse, parse_expr, pretty
from .quantum import (
    QuantumState,
    check_unitary,
    classical_state,
    grover_step_matrix,
    measure_probs,
    state_mean,
    uniform_state,
)
from .series import RationalFunction, dirichlet_check, gf_pair, series_coeffs
from .wp import (
    Distribution,
    WeightError,
    final_distribution,
    sample_run,
    sample_runs,
    wp,
    wp_subst,
)

__version__ = "0.1.0"
