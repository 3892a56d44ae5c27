"""Expectation-transformer semantics of programs.

Two independent routes compute ``wp(prog, post)``:

* ``wp`` runs the program forward into an explicit finite distribution of
  final environments and averages ``post`` over it.
* ``wp_subst`` transforms ``post`` backwards by substitution, producing a
  closed-form expectation that is then evaluated.

``sample_run``/``sample_runs`` execute programs with seeded random choices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .expr import (
    BinOp,
    Env,
    EvalError,
    Evaluator,
    Expr,
    Sum,
    Var,
    evaluate,
    fresh_name,
    is_number,
    subst,
)
from .lang import (
    Assign,
    DoTimes,
    IndexedProbAssign,
    ProbAssign,
    Program,
    Skip,
    StaticError,
    Stmt,
)

WEIGHT_TOL = 1e-9


class WeightError(EvalError):
    """Branch weights that are negative, non-real, or do not sum to 1."""


@dataclass(frozen=True)
class Distribution:
    """Finite-support distribution over final environments."""

    leaves: tuple  # of (weight, env)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.leaves)

    def __len__(self):
        return len(self.leaves)

    def total(self) -> float:
        return math.fsum(w for w, _ in self.leaves)

    def expectation(self, post: Expr) -> float:
        ev = Evaluator()
        total = 0.0
        for w, env in self.leaves:
            total += w * _real(ev.eval(post, env), "post-expectation")
        return total


def _real(v, what: str) -> float:
    if not is_number(v):
        raise EvalError(f"{what} must be a number, got {type(v).__name__}")
    if isinstance(v, complex):
        if v.imag != 0:
            raise EvalError(f"{what} must be real, got {v!r}")
        return v.real
    return float(v)


def _loop_count(count: Expr, env: Env, ev: Evaluator) -> int:
    c = ev.eval(count, env)
    if not isinstance(c, int) or isinstance(c, bool) or c < 0:
        raise EvalError(f"loop count must be a nonnegative integer, got {c!r}")
    return c


def _branches(s: Stmt, env: Env, ev: Evaluator) -> list[tuple[float, object]]:
    """(weight, value) pairs of a probabilistic assignment, evaluated in the
    pre-state, validated, zero weights dropped."""
    if isinstance(s, ProbAssign):
        raw = [(ev.eval(w, env), ev.eval(v, env)) for v, w in s.branches]
    else:
        lo = ev.eval(s.lo, env)
        hi = ev.eval(s.hi, env)
        if not (isinstance(lo, int) and isinstance(hi, int)):
            raise EvalError("index range bounds must be integers")
        raw = []
        for k in range(lo, hi):
            inner = {**env, s.index: k}
            raw.append((ev.eval(s.weight, inner), ev.eval(s.value, inner)))
    if not raw:
        raise WeightError("probabilistic assignment with no branches")
    out = []
    for w, v in raw:
        try:
            w = _real(w, "branch weight")
        except EvalError as exc:
            raise WeightError(str(exc)) from None
        if w < 0:
            raise WeightError(f"negative branch weight {w!r}")
        if w > 0:
            out.append((w, v))
    total = math.fsum(w for w, _ in out)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise WeightError(f"branch weights sum to {total!r}, not 1")
    return out


def _forward(p: Program, leaves: list) -> list:
    for s in p:
        nxt = []
        for w, env in leaves:
            ev = Evaluator()
            match s:
                case Skip():
                    nxt.append((w, env))
                case Assign(target, rhs):
                    nxt.append((w, {**env, target: ev.eval(rhs, env)}))
                case ProbAssign() | IndexedProbAssign():
                    for bw, v in _branches(s, env, ev):
                        nxt.append((w * bw, {**env, s.target: v}))
                case DoTimes(count, body):
                    sub = [(w, env)]
                    for _ in range(_loop_count(count, env, ev)):
                        sub = _forward(body, sub)
                    nxt.extend(sub)
                case _:
                    raise TypeError(f"not a statement: {s!r}")
        leaves = nxt
    return leaves


def final_distribution(p: Program, env: Env | None = None) -> Distribution:
    """Run ``p`` forward from ``env``, resolving every probabilistic choice
    into weighted leaves."""
    return Distribution(tuple(_forward(p, [(1.0, dict(env or {}))])))


def wp(p: Program, post: Expr, env: Env | None = None) -> float:
    """Pre-expectation of ``post`` under ``p`` at the state ``env``."""
    return final_distribution(p, env).expectation(post)


# ---------------------------------------------------------------------------
# backward route


def _weighted(w: Expr, e: Expr) -> Expr:
    return BinOp("*", w, e)


def _wp_stmt(s: Stmt, post: Expr) -> Expr:
    match s:
        case Skip():
            return post
        case Assign(target, rhs):
            return subst(post, target, rhs)
        case ProbAssign(target, branches):
            terms = [_weighted(w, subst(post, target, v)) for v, w in branches]
            out = terms[0]
            for t in terms[1:]:
                out = BinOp("+", out, t)
            return out
        case IndexedProbAssign(target, value, weight, index, lo, hi):
            if index in post.free_vars - {target}:
                new = fresh_name(index, post.free_vars | value.free_vars | weight.free_vars)
                value = subst(value, index, Var(new))
                weight = subst(weight, index, Var(new))
                index = new
            return Sum(index, lo, hi, _weighted(weight, subst(post, target, value)))
        case DoTimes(count, body):
            if count.free_vars:
                raise StaticError("loop count must be known to transform backwards")
            c = evaluate(count)
            if not isinstance(c, int) or c < 0:
                raise StaticError(f"loop count must be a nonnegative integer, got {c!r}")
            for _ in range(c):
                post = wp_subst(body, post)
            return post
    raise TypeError(f"not a statement: {s!r}")


def wp_subst(p: Program, post: Expr) -> Expr:
    """Backward transformer: the expectation that ``p`` establishes ``post``,
    built by substitution from the last statement to the first."""
    for s in reversed(p.stmts):
        post = _wp_stmt(s, post)
    return post


def wp_backward(p: Program, post: Expr, env: Env | None = None) -> float:
    """``wp_subst`` evaluated at ``env``."""
    return _real(evaluate(wp_subst(p, post), env or {}), "pre-expectation")


# ---------------------------------------------------------------------------
# seeded execution


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed & 0xFFFF_FFFF_FFFF_FFFF)


def _sample(p: Program, groups: list, rng: np.random.Generator) -> list:
    # groups: (env, array of run indices) sharing one environment
    for s in p:
        nxt = []
        for env, runs in groups:
            ev = Evaluator()
            match s:
                case Skip():
                    nxt.append((env, runs))
                case Assign(target, rhs):
                    nxt.append(({**env, target: ev.eval(rhs, env)}, runs))
                case ProbAssign() | IndexedProbAssign():
                    branches = _branches(s, env, ev)
                    cum = np.cumsum([w for w, _ in branches])
                    u = rng.random(len(runs)) * cum[-1]
                    pick = np.minimum(np.searchsorted(cum, u, side="right"), len(branches) - 1)
                    for b, (_, v) in enumerate(branches):
                        chosen = runs[pick == b]
                        if len(chosen):
                            nxt.append(({**env, s.target: v}, chosen))
                case DoTimes(count, body):
                    sub = [(env, runs)]
                    for _ in range(_loop_count(count, env, ev)):
                        sub = _sample(body, sub, rng)
                    nxt.extend(sub)
                case _:
                    raise TypeError(f"not a statement: {s!r}")
        groups = nxt
    return groups


def sample_runs(p: Program, env: Env | None, seed: int, runs: int) -> list[Env]:
    """Final environments of ``runs`` seeded executions of ``p``.

    Runs that have made the same choices so far share their environment, so
    deterministic statements are evaluated once per distinct state rather
    than once per run.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    groups = _sample(p, [(dict(env or {}), np.arange(runs))], _rng(seed))
    out: list = [None] * runs
    for final, idx in groups:
        for k in idx:
            out[k] = final
    return out


def sample_run(p: Program, env: Env | None, seed: int) -> Env:
    """One seeded execution of ``p``; the same seed gives the same result."""
    return sample_runs(p, env, seed, 1)[0]
