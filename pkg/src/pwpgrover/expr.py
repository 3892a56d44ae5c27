"""Expression language: runtime values, expression trees, evaluation and
capture-avoiding substitution.

Runtime values are plain Python objects where possible:

    int      arbitrary-precision integer
    float    real number
    complex  complex number
    Sym      symbolic constant such as ``'head``
    AmpVector  immutable amplitude vector indexed from 0
    Func     materialized function value produced by a lambda

Predicates evaluate to the reals 0.0 and 1.0; there is no boolean type.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Union


class EvalError(Exception):
    """Base class for evaluation failures."""


class UnboundVariable(EvalError):
    pass


class IndexOutOfRange(EvalError):
    pass


class TypeMismatch(EvalError):
    pass


class DivisionByZero(EvalError):
    pass


# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class Sym:
    """An atomic symbolic constant; equal only to a Sym of the same name."""

    name: str

    def __str__(self):
        return "'" + self.name


@dataclass(frozen=True, eq=False)
class AmpVector:
    """Immutable vector of complex amplitudes, indexed ``0 .. len-1``."""

    amps: tuple

    def __post_init__(self):
        if len(self.amps) < 1:
            raise ValueError("AmpVector must have at least one entry")
        object.__setattr__(self, "amps", tuple(complex(a) for a in self.amps))

    def __len__(self):
        return len(self.amps)

    def __iter__(self):
        return iter(self.amps)

    def __getitem__(self, k):
        return self.amps[k]

    def __eq__(self, other):
        return _vector_eq(self, other)

    def __hash__(self):
        return hash(self.amps)

    def __repr__(self):
        return f"AmpVector({list(self.amps)!r})"


@dataclass(frozen=True, eq=False)
class Func:
    """Function value of ``(lam param | lo <= param < hi . body)``.

    The table of results is computed once, when the lambda is evaluated,
    so applying the function never re-enters the body.
    """

    param: str
    lo: int
    hi: int
    body: "Expr"
    env: Mapping[str, Any] = field(repr=False)
    table: tuple = field(repr=False)

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty function domain {self.lo}..{self.hi}")

    def __len__(self):
        return self.hi - self.lo

    def __iter__(self):
        return iter(self.table)

    def __call__(self, k):
        if not self.lo <= k < self.hi:
            raise IndexOutOfRange(f"argument {k} outside {self.lo}..{self.hi - 1}")
        return self.table[k - self.lo]

    def __eq__(self, other):
        return _vector_eq(self, other)

    def __hash__(self):
        return hash((self.lo, self.table))


Value = Union[int, float, complex, Sym, AmpVector, Func]
Env = Mapping[str, Value]


def _lower_bound(v) -> int:
    return v.lo if isinstance(v, Func) else 0


def _vector_eq(a, b) -> bool:
    if not isinstance(b, (AmpVector, Func)):
        return NotImplemented
    if _lower_bound(a) != _lower_bound(b) or len(a) != len(b):
        return False
    # elementwise == on tuples agrees with values_equal for every value kind
    return tuple(a) == tuple(b)


def is_number(v) -> bool:
    return isinstance(v, (int, float, complex)) and not isinstance(v, bool)


def values_equal(a, b) -> bool:
    """Exact equality used by the ``=`` operator."""
    if is_number(a) and is_number(b):
        return a == b
    if isinstance(a, (AmpVector, Func)) and isinstance(b, (AmpVector, Func)):
        return _vector_eq(a, b)
    if isinstance(a, Sym) and isinstance(b, Sym):
        return a == b
    return False


def values_close(a, b, tol: float = 1e-9) -> bool:
    """Tolerance-based comparison; never used by the evaluator itself."""
    if is_number(a) and is_number(b):
        return abs(a - b) <= tol
    if isinstance(a, (AmpVector, Func)) and isinstance(b, (AmpVector, Func)):
        if _lower_bound(a) != _lower_bound(b) or len(a) != len(b):
            return False
        return all(values_close(x, y, tol) for x, y in zip(a, b))
    return values_equal(a, b)


# ---------------------------------------------------------------------------
# expressions


class Expr:
    """Base class of expression nodes."""

    @cached_property
    def free_vars(self) -> frozenset:
        return frozenset().union(*(c.free_vars for c in self.children()))

    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Lit(Expr):
    value: Any

    def __eq__(self, other):
        # 1 and 1.0 are different literals
        return (
            isinstance(other, Lit)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self):
        return hash((type(self.value), self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str

    @cached_property
    def free_vars(self):
        return frozenset([self.name])


@dataclass(frozen=True)
class Pi(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def children(self):
        return (self.operand,)


ARITH_OPS = ("+", "-", "*", "/", "^")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Cmp(Expr):
    op: str
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class App(Expr):
    """Application ``fn(arg)``; also covers indexing a vector."""

    fn: Expr
    arg: Expr

    def children(self):
        return (self.fn, self.arg)


@dataclass(frozen=True)
class Lam(Expr):
    """``(lam param | lo <= param < hi . body)``; param is bound in body only."""

    param: str
    lo: Expr
    hi: Expr
    body: Expr

    def children(self):
        return (self.lo, self.hi, self.body)

    @cached_property
    def free_vars(self):
        return self.lo.free_vars | self.hi.free_vars | (self.body.free_vars - {self.param})


@dataclass(frozen=True)
class Sum(Expr):
    """``sum(param, lo, hi, body)``: body summed over lo <= param < hi."""

    param: str
    lo: Expr
    hi: Expr
    body: Expr

    def children(self):
        return (self.lo, self.hi, self.body)

    @cached_property
    def free_vars(self):
        return self.lo.free_vars | self.hi.free_vars | (self.body.free_vars - {self.param})


@dataclass(frozen=True)
class Mean(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Norm2(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Classical(Expr):
    """``classical(index, size)``: the basis vector that is 1 at ``index``."""

    index: Expr
    size: Expr

    def children(self):
        return (self.index, self.size)


BINDERS = (Lam, Sum)


def free_vars(e: Expr) -> frozenset:
    return e.free_vars


# ---------------------------------------------------------------------------
# evaluation


def _as_index(v, what: str) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise TypeMismatch(f"{what} must be an integer, got {v!r}")


def _need_number(v, what: str):
    if not is_number(v):
        raise TypeMismatch(f"{what} expects a number, got {type(v).__name__}")
    return v


def _need_real(v, what: str):
    if isinstance(v, complex) or not is_number(v):
        raise TypeMismatch(f"{what} expects a real number, got {v!r}")
    return v


def _arith(op: str, a, b):
    _need_number(a, op)
    _need_number(b, op)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise DivisionByZero("division by zero")
        return a / b
    try:
        r = a ** b
    except ZeroDivisionError:
        raise DivisionByZero("zero raised to a negative power") from None
    except OverflowError as exc:
        raise EvalError(str(exc)) from None
    return r


def _compare(op: str, a, b) -> float:
    if op == "=":
        return 1.0 if values_equal(a, b) else 0.0
    if op == "!=":
        return 0.0 if values_equal(a, b) else 1.0
    _need_real(a, op)
    _need_real(b, op)
    if op == "<":
        ok = a < b
    elif op == "<=":
        ok = a <= b
    elif op == ">":
        ok = a > b
    else:
        ok = a >= b
    return 1.0 if ok else 0.0


def _apply(f, arg):
    k = _as_index(arg, "argument")
    if isinstance(f, AmpVector):
        if not 0 <= k < len(f):
            raise IndexOutOfRange(f"index {k} outside 0..{len(f) - 1}")
        return f[k]
    if isinstance(f, Func):
        return f(k)
    raise TypeMismatch(f"cannot apply a value of type {type(f).__name__}")


def _mean(v) -> complex:
    if not isinstance(v, (AmpVector, Func)):
        raise TypeMismatch(f"mean of a non-vector ({type(v).__name__})")
    if len(v) == 0:
        raise DivisionByZero("mean over an empty domain")
    total = 0j
    for x in v:
        total += _need_number(x, "mean")
    return total / len(v)


def norm2(z) -> float:
    """Square norm a^2 + b^2 of a + bj."""
    z = _need_number(z, "norm2")
    if isinstance(z, complex):
        return z.real * z.real + z.imag * z.imag
    return float(z * z)


def _sqrt(v):
    _need_number(v, "sqrt")
    if isinstance(v, complex) or v < 0:
        return cmath.sqrt(v)
    return math.sqrt(v)


def classical(i: int, n: int) -> AmpVector:
    if n < 1:
        raise IndexOutOfRange(f"classical state needs a positive size, got {n}")
    if not 0 <= i < n:
        raise IndexOutOfRange(f"classical index {i} outside 0..{n - 1}")
    zeros = (0j,) * n
    v = object.__new__(AmpVector)
    # entries are already complex; skip the converting constructor
    object.__setattr__(v, "amps", zeros[:i] + (1 + 0j,) + zeros[i + 1 :])
    return v


# node types whose results are cached per evaluator
_CACHED = (Lam, Sum, Mean, Classical)


class Evaluator:
    """Evaluates expressions, caching the results of vector-valued and
    summation nodes keyed on node identity and the identities of the values
    bound to their free variables.

    Expression trees produced by repeated substitution share subtrees, so
    this cache is what keeps evaluation of such trees linear in their
    number of distinct nodes.  A cache lives as long as its evaluator.
    """

    def __init__(self):
        self._cache: dict = {}

    def eval(self, e: Expr, env: Env):
        if isinstance(e, _CACHED):
            try:
                vals = tuple(env[v] for v in sorted(e.free_vars))
            except KeyError:
                return self._eval(e, env)
            key = (id(e),) + tuple(map(id, vals))
            hit = self._cache.get(key)
            if hit is not None:
                return hit[0]
            result = self._eval(e, env)
            # keep e and vals alive so their ids stay unique
            self._cache[key] = (result, e, vals)
            return result
        return self._eval(e, env)

    def _eval(self, e: Expr, env: Env):
        ev = self.eval
        match e:
            case Lit(value):
                return value
            case Var(name):
                try:
                    return env[name]
                except KeyError:
                    raise UnboundVariable(f"unbound variable {name!r}") from None
            case Pi():
                return math.pi
            case Neg(operand):
                return -_need_number(ev(operand, env), "negation")
            case BinOp(op, left, right):
                return _arith(op, ev(left, env), ev(right, env))
            case Cmp(op, left, right):
                return _compare(op, ev(left, env), ev(right, env))
            case App(fn, arg):
                return _apply(ev(fn, env), ev(arg, env))
            case Lam(param, lo, hi, body):
                lo_v = _as_index(ev(lo, env), "lambda lower bound")
                hi_v = _as_index(ev(hi, env), "lambda upper bound")
                if lo_v > hi_v:
                    raise EvalError(f"lambda bounds {lo_v} > {hi_v}")
                table = tuple(ev(body, {**env, param: k}) for k in range(lo_v, hi_v))
                return Func(param, lo_v, hi_v, body, dict(env), table)
            case Sum(param, lo, hi, body):
                lo_v = _as_index(ev(lo, env), "sum lower bound")
                hi_v = _as_index(ev(hi, env), "sum upper bound")
                total = 0
                for k in range(lo_v, hi_v):
                    total = total + _need_number(ev(body, {**env, param: k}), "sum")
                return total
            case Mean(arg):
                return _mean(ev(arg, env))
            case Norm2(arg):
                return norm2(ev(arg, env))
            case Sqrt(arg):
                return _sqrt(ev(arg, env))
            case Classical(index, size):
                return classical(
                    _as_index(ev(index, env), "classical index"),
                    _as_index(ev(size, env), "classical size"),
                )
        raise TypeError(f"not an expression: {e!r}")


def evaluate(e: Expr, env: Env | None = None):
    """Evaluate ``e`` in ``env`` with a fresh evaluator."""
    return Evaluator().eval(e, {} if env is None else env)


# ---------------------------------------------------------------------------
# substitution


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst(e: Expr, x: str, r: Expr) -> Expr:
    """Replace the free occurrences of ``x`` in ``e`` by ``r``.

    Bound variables that occur free in ``r`` are renamed first.  Subtrees
    shared in ``e`` stay shared in the result.
    """
    memo: dict[int, Expr] = {}
    r_free = r.free_vars

    def go(node: Expr) -> Expr:
        if x not in node.free_vars:
            return node
        key = id(node)
        done = memo.get(key)
        if done is not None:
            return done
        match node:
            case Var(_):
                out = r
            case Lam(param, lo, hi, body) | Sum(param, lo, hi, body):
                cls = type(node)
                if param == x:
                    out = cls(param, go(lo), go(hi), body)
                else:
                    if param in r_free:
                        new = fresh_name(param, body.free_vars | r_free | {x})
                        body = subst(body, param, Var(new))
                        param = new
                    out = cls(param, go(lo), go(hi), go(body))
            case Neg(operand):
                out = Neg(go(operand))
            case BinOp(op, left, right):
                out = BinOp(op, go(left), go(right))
            case Cmp(op, left, right):
                out = Cmp(op, go(left), go(right))
            case App(fn, arg):
                out = App(go(fn), go(arg))
            case Mean(arg):
                out = Mean(go(arg))
            case Norm2(arg):
                out = Norm2(go(arg))
            case Sqrt(arg):
                out = Sqrt(go(arg))
            case Classical(index, size):
                out = Classical(go(index), go(size))
            case _:
                raise TypeError(f"not an expression: {node!r}")
        memo[key] = out
        return out

    return go(e)


def count_nodes(e: Expr) -> int:
    """Number of distinct node objects reachable from ``e``."""
    seen: set[int] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        stack.extend(n.children())
    return len(seen)
