"""Statements, programs, and the concrete ``.pwp`` syntax.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    program  := stmt (";" stmt)*
    stmt     := "skip"
              | ident ":=" expr
              | ident ":=" expr "@" expr ("," expr "@" expr)*
              | ident ":=" expr "@" expr "for" ident "in" expr ".." expr
              | "do" expr "times" program "od"
    expr     := add (cmpop add)?           cmpop: = != < <= > >=
    add      := mul (("+" | "-") mul)*
    mul      := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := postfix ("^" unary)?
    postfix  := primary ("(" expr ")")*
    primary  := number | 'sym | ident | "pi" | "(" expr ")"
              | "(" "lam" ident "|" add "<=" ident "<" add "." expr ")"
              | mean(e) | norm2(e) | sqrt(e) | classical(e, e) | sum(i, lo, hi, e)

A minus sign directly in front of a number literal is part of the literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .expr import (
    App,
    BinOp,
    Classical,
    Cmp,
    EvalError,
    Expr,
    Lam,
    Lit,
    Mean,
    Neg,
    Norm2,
    Pi,
    Sqrt,
    Sum,
    Sym,
    Var,
    evaluate,
    fresh_name,
    subst,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        text = f"{line}:{col}: {message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(text)


class StaticError(ParseError):
    """Well-formed syntax that violates a static rule of the language."""


# ---------------------------------------------------------------------------
# statements


class Stmt:
    pass


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Assign(Stmt):
    target: str
    rhs: Expr


@dataclass(frozen=True)
class ProbAssign(Stmt):
    """``x := v1 @ w1, ..., vk @ wk``; branches are (value, weight) pairs."""

    target: str
    branches: tuple

    def __post_init__(self):
        if not self.branches:
            raise ValueError("ProbAssign needs at least one branch")


@dataclass(frozen=True)
class IndexedProbAssign(Stmt):
    """``x := value @ weight for index in lo .. hi`` (index ranges over lo..hi-1)."""

    target: str
    value: Expr
    weight: Expr
    index: str
    lo: Expr
    hi: Expr

    def expand(self, lo: int, hi: int) -> ProbAssign:
        """Plain ProbAssign with one branch per index value, in index order."""
        branches = tuple(
            (subst(self.value, self.index, Lit(k)), subst(self.weight, self.index, Lit(k)))
            for k in range(lo, hi)
        )
        return ProbAssign(self.target, branches)


@dataclass(frozen=True)
class DoTimes(Stmt):
    count: Expr
    body: "Program"


@dataclass(frozen=True)
class Program:
    stmts: tuple

    def __post_init__(self):
        if not self.stmts:
            raise ValueError("a program has at least one statement")
        object.__setattr__(self, "stmts", tuple(self.stmts))

    def __iter__(self) -> Iterator[Stmt]:
        return iter(self.stmts)

    def __len__(self):
        return len(self.stmts)

    def __getitem__(self, k):
        return self.stmts[k]

    def __str__(self):
        return pretty(self)


# ---------------------------------------------------------------------------
# lexer


KEYWORDS = {
    "skip", "do", "times", "od", "for", "in", "lam",
    "mean", "norm2", "sqrt", "classical", "sum", "pi",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?j?)
  | (?P<sym>'[A-Za-z_][A-Za-z0-9_']*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=|\.\.|<=|>=|!=|[-+*/^=<>@,;()|.])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # num, sym, ident, kw, op, eof
    text: str
    line: int
    col: int
    value: object = None


def _number(text: str):
    if text.endswith("j"):
        return complex(0, float(text[:-1]))
    if re.fullmatch(r"\d+", text):
        return int(text)
    return float(text)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "num":
            tokens.append(Token("num", s, line, col, _number(s)))
        elif kind == "sym":
            tokens.append(Token("sym", s, line, col, Sym(s[1:])))
        elif kind == "ident":
            tokens.append(Token("kw" if s in KEYWORDS else "ident", s, line, col))
        elif kind == "op":
            tokens.append(Token("op", s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "<end of input>", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# parser


_CMP = {"=", "!=", "<", "<=", ">", ">="}
_EXPR_START = {"number", "identifier", "symbol", "(", "-", "pi", "mean", "norm2",
               "sqrt", "classical", "sum"}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, expected, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(f"unexpected {t.text!r}", t.line, t.col, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail({text})
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail({"identifier"})
        return self.advance().text

    # statements

    def program(self, stop: str | None) -> Program:
        # stop is the keyword closing this block, None at top level
        stmts = [self.stmt()]
        while self.at(";"):
            self.advance()
            stmts.append(self.stmt())
        if stop is None and self.tok.kind != "eof":
            self.fail({";", "<end of input>"})
        if stop is not None and not self.at(stop):
            self.fail({";", stop})
        return Program(tuple(stmts))

    def stmt(self) -> Stmt:
        t = self.tok
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("do"):
            self.advance()
            count = self.expr()
            self.expect("times")
            body = self.program("od")
            self.expect("od")
            _check_count(count, t)
            return DoTimes(count, body)
        if t.kind == "ident":
            target = self.advance().text
            self.expect(":=")
            return self.rhs(target, t)
        self.fail({"skip", "do", "identifier"})

    def rhs(self, target: str, start: Token) -> Stmt:
        value = self.expr()
        if not self.at("@"):
            return Assign(target, value)
        self.advance()
        weight = self.expr()
        if self.at("for"):
            self.advance()
            index = self.ident()
            self.expect("in")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            _check_range(lo, hi, start)
            return IndexedProbAssign(target, value, weight, index, lo, hi)
        branches = [(value, weight)]
        while self.at(","):
            self.advance()
            v = self.expr()
            self.expect("@")
            branches.append((v, self.expr()))
        if len(branches) == 1:
            _check_single_weight(weight, start)
        return ProbAssign(target, tuple(branches))

    # expressions

    def expr(self) -> Expr:
        left = self.add()
        if self.tok.kind == "op" and self.tok.text in _CMP:
            op = self.advance().text
            left = Cmp(op, left, self.add())
        return left

    def add(self) -> Expr:
        left = self.mul()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            left = BinOp(op, left, self.mul())
        return left

    def mul(self) -> Expr:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            if self.peek().kind == "num":
                self.advance()
                base = Lit(-self.advance().value)
                return self.power_tail(self.postfix_tail(base))
            self.advance()
            return Neg(self.unary())
        return self.power_tail(self.postfix_tail(self.primary()))

    def power_tail(self, base: Expr) -> Expr:
        if self.at("^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def postfix_tail(self, e: Expr) -> Expr:
        while self.at("("):
            self.advance()
            arg = self.expr()
            self.expect(")")
            e = App(e, arg)
        return e

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num" or t.kind == "sym":
            self.advance()
            return Lit(t.value)
        if t.kind == "ident":
            self.advance()
            return Var(t.text)
        if self.at("pi"):
            self.advance()
            return Pi()
        if self.at("("):
            self.advance()
            if self.at("lam"):
                return self.lam()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "kw" and t.text in ("mean", "norm2", "sqrt"):
            self.advance()
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return {"mean": Mean, "norm2": Norm2, "sqrt": Sqrt}[t.text](arg)
        if self.at("classical"):
            self.advance()
            self.expect("(")
            i = self.expr()
            self.expect(",")
            n = self.expr()
            self.expect(")")
            return Classical(i, n)
        if self.at("sum"):
            self.advance()
            self.expect("(")
            param = self.ident()
            self.expect(",")
            lo = self.expr()
            self.expect(",")
            hi = self.expr()
            self.expect(",")
            body = self.expr()
            self.expect(")")
            return Sum(param, lo, hi, body)
        self.fail(_EXPR_START)

    def lam(self) -> Expr:
        self.expect("lam")
        param = self.ident()
        self.expect("|")
        lo = self.add()
        self.expect("<=")
        t = self.tok
        if self.ident() != param:
            raise ParseError(f"lambda bound variable must be {param!r}", t.line, t.col, {param})
        self.expect("<")
        hi = self.add()
        self.expect(".")
        body = self.expr()
        self.expect(")")
        return Lam(param, lo, hi, body)


def _closed_value(e: Expr):
    """Value of ``e`` when it is closed and evaluates cleanly, else None."""
    if e.free_vars:
        return None
    try:
        v = evaluate(e)
    except EvalError:
        return None
    return v


def _check_count(count: Expr, t: Token):
    v = _closed_value(count)
    if v is None:
        return
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise StaticError(f"loop count must be a nonnegative integer, got {v!r}", t.line, t.col)


def _check_range(lo: Expr, hi: Expr, t: Token):
    a, b = _closed_value(lo), _closed_value(hi)
    if a is None or b is None:
        return
    if not (isinstance(a, int) and isinstance(b, int)):
        raise StaticError("index range bounds must be integers", t.line, t.col)
    if b <= a:
        raise StaticError(f"probabilistic assignment over {a} .. {b} has no branches", t.line, t.col)


def _check_single_weight(w: Expr, t: Token):
    v = _closed_value(w)
    if v is not None and v != 1:
        raise StaticError(f"single-branch assignment must have weight 1, got {v!r}", t.line, t.col)


def parse(text: str) -> Program:
    """Parse ``.pwp`` source into a Program."""
    p = _Parser(text)
    return p.program(None)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail({"<end of input>"})
    return e


# ---------------------------------------------------------------------------
# pretty-printer

_ATOM = 5


def _level(e: Expr) -> int:
    if isinstance(e, Cmp):
        return 0
    if isinstance(e, BinOp):
        return {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[e.op]
    if isinstance(e, Neg):
        return 3
    return _ATOM


def _literal(v) -> str:
    if isinstance(v, Sym):
        return str(v)
    if isinstance(v, complex):
        if v.real == 0:
            return repr(v.imag) + "j"
        return f"({v.real!r} + {v.imag!r}j)"
    return repr(v)


def pretty_expr(e: Expr, min_level: int = 0) -> str:
    s = _show(e)
    if _level(e) < min_level:
        return "(" + s + ")"
    return s


def _show(e: Expr) -> str:
    p = pretty_expr
    match e:
        case Lit(v):
            return _literal(v)
        case Var(name):
            return name
        case Pi():
            return "pi"
        case Neg(operand):
            s = p(operand, 3)
            if s[0].isdigit() or s[0] == ".":
                s = "(" + s + ")"
            return "-" + s
        case Cmp(op, left, right):
            return f"{p(left, 1)} {op} {p(right, 1)}"
        case BinOp("^", left, right):
            return f"{p(left, _ATOM)} ^ {p(right, 3)}"
        case BinOp(op, left, right):
            lv = _level(e)
            return f"{p(left, lv)} {op} {p(right, lv + 1)}"
        case App(fn, arg):
            return f"{p(fn, _ATOM)}({p(arg)})"
        case Lam(param, lo, hi, body):
            return f"(lam {param} | {p(lo, 1)} <= {param} < {p(hi, 1)} . {p(body)})"
        case Sum(param, lo, hi, body):
            return f"sum({param}, {p(lo)}, {p(hi)}, {p(body)})"
        case Mean(arg):
            return f"mean({p(arg)})"
        case Norm2(arg):
            return f"norm2({p(arg)})"
        case Sqrt(arg):
            return f"sqrt({p(arg)})"
        case Classical(index, size):
            return f"classical({p(index)}, {p(size)})"
    raise TypeError(f"not an expression: {e!r}")


def _stmt_lines(s: Stmt, indent: str) -> list[str]:
    match s:
        case Skip():
            return [indent + "skip"]
        case Assign(target, rhs):
            return [f"{indent}{target} := {pretty_expr(rhs)}"]
        case ProbAssign(target, branches):
            parts = [f"{pretty_expr(v)} @ {pretty_expr(w)}" for v, w in branches]
            return [f"{indent}{target} := " + ", ".join(parts)]
        case IndexedProbAssign(target, value, weight, index, lo, hi):
            return [
                f"{indent}{target} := {pretty_expr(value)} @ {pretty_expr(weight)}"
                f" for {index} in {pretty_expr(lo)} .. {pretty_expr(hi)}"
            ]
        case DoTimes(count, body):
            return (
                [f"{indent}do {pretty_expr(count)} times"]
                + _program_lines(body, indent + "  ")
                + [indent + "od"]
            )
    raise TypeError(f"not a statement: {s!r}")


def _program_lines(p: Program, indent: str) -> list[str]:
    out: list[str] = []
    for k, s in enumerate(p):
        lines = _stmt_lines(s, indent)
        if k < len(p) - 1:
            lines[-1] += ";"
        out.extend(lines)
    return out


def pretty(p: Program) -> str:
    """Source text for ``p``; ``parse(pretty(p)) == p``."""
    return "\n".join(_program_lines(p, ""))


# ---------------------------------------------------------------------------
# program-level substitution


def _subst_stmt(s: Stmt, x: str, r: Expr) -> Stmt:
    match s:
        case Skip():
            return s
        case Assign(target, rhs):
            return Assign(target, subst(rhs, x, r))
        case ProbAssign(target, branches):
            return ProbAssign(target, tuple((subst(v, x, r), subst(w, x, r)) for v, w in branches))
        case IndexedProbAssign(target, value, weight, index, lo, hi):
            lo, hi = subst(lo, x, r), subst(hi, x, r)
            if index != x:
                if index in r.free_vars:
                    new = fresh_name(index, value.free_vars | weight.free_vars | r.free_vars | {x})
                    value = subst(value, index, Var(new))
                    weight = subst(weight, index, Var(new))
                    index = new
                value, weight = subst(value, x, r), subst(weight, x, r)
            return IndexedProbAssign(target, value, weight, index, lo, hi)
        case DoTimes(count, body):
            return DoTimes(subst(count, x, r), subst_program(body, x, r))
    raise TypeError(f"not a statement: {s!r}")


def _assigns(s: Stmt) -> set:
    match s:
        case Assign(target=t) | ProbAssign(target=t) | IndexedProbAssign(target=t):
            return {t}
        case DoTimes(_, body):
            return set().union(*(_assigns(b) for b in body))
    return set()


def subst_program(p: Program, x: str, r: Expr) -> Program:
    """Replace free occurrences of ``x`` in ``p`` by ``r``.

    Occurrences after an assignment to ``x`` refer to the new value and are
    left alone.
    """
    out = []
    live = True
    for s in p:
        if live:
            if isinstance(s, DoTimes) and x in _assigns(s):
                raise ValueError(f"cannot substitute for {x!r}: it is assigned inside a loop")
            out.append(_subst_stmt(s, x, r))
            if x in _assigns(s):
                live = False
        else:
            out.append(s)
    return Program(tuple(out))
