"""Command-line interface.

    pwpgrover wp run FILE --post EXPR [--bind NAME=EXPR ...]
    pwpgrover grover prob --n N --c C
    pwpgrover grover sweep --n N --cmax K [--out FILE]
    pwpgrover grover optimal --nmax M [--out FILE]
    pwpgrover grover simulate --n N --c C --runs R --seed S
    pwpgrover series check --n N --cmax K

Exit status: 0 on success, 1 when a check fails, 2 on usage, input or
evaluation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from typing import Sequence, TextIO

from . import grover, series
from .expr import EvalError, Evaluator
from .lang import ParseError, parse, parse_expr
from .wp import wp

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Reals at 12 significant digits; ints unchanged."""
    if isinstance(x, int):
        return str(x)
    return format(x, ".12g")


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {s}")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pwpgrover",
        description="Probabilistic wp calculus and Grover search analysis.",
    )
    sub = ap.add_subparsers(dest="group", required=True)

    wp_p = sub.add_parser("wp", help="evaluate pre-expectations of .pwp programs")
    wp_sub = wp_p.add_subparsers(dest="cmd", required=True)
    run = wp_sub.add_parser("run", help="wp of a program file for a post-expectation")
    run.add_argument("file")
    run.add_argument("--post", required=True, help="post-expectation expression")
    run.add_argument(
        "--bind", action="append", default=[], metavar="NAME=EXPR",
        help="bind a free variable; evaluated in order, may use earlier bindings",
    )

    gr = sub.add_parser("grover", help="Grover success probabilities")
    gr_sub = gr.add_subparsers(dest="cmd", required=True)
    prob = gr_sub.add_parser("prob", help="P(C, N) by recurrence and closed form")
    prob.add_argument("--n", type=_positive_int, required=True)
    prob.add_argument("--c", type=_nonneg_int, required=True)

    sw = gr_sub.add_parser("sweep", help="CSV of P over C = 0..cmax")
    sw.add_argument("--n", type=_positive_int, required=True)
    sw.add_argument("--cmax", type=_nonneg_int, required=True)
    sw.add_argument("--tol", type=_positive_float, default=1e-9)
    sw.add_argument("--out")

    opt = gr_sub.add_parser("optimal", help="CSV of optimum iteration counts for N = 1..nmax")
    opt.add_argument("--nmax", type=_positive_int, required=True)
    opt.add_argument("--out")

    sim = gr_sub.add_parser("simulate", help="seeded Monte-Carlo runs of the program")
    sim.add_argument("--n", type=_positive_int, required=True)
    sim.add_argument("--c", type=_nonneg_int, required=True)
    sim.add_argument("--runs", type=_positive_int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--x0", type=_nonneg_int, default=0)

    se = sub.add_parser("series", help="generating-function identities")
    se_sub = se.add_subparsers(dest="cmd", required=True)
    chk = se_sub.add_parser("check", help="coefficient and kernel identity checks")
    chk.add_argument("--n", type=_positive_int, required=True)
    chk.add_argument("--cmax", type=_nonneg_int, required=True)
    chk.add_argument("--tol", type=_positive_float, default=1e-9)
    return ap


def _write_csv(header, rows, out_path, stdout: TextIO):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _bindings(specs: Sequence[str]) -> dict:
    env: dict = {}
    ev = Evaluator()
    for item in specs:
        name, sep, src = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(f"--bind expects NAME=EXPR, got {item!r}")
        try:
            env[name] = ev.eval(parse_expr(src), env)
        except ParseError as exc:
            raise UsageError(f"--bind {name}: {exc}") from None
    return env


def _cmd_wp_run(a, out: TextIO) -> int:
    try:
        with open(a.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {a.file}: {exc.strerror}") from None
    try:
        prog = parse(text)
    except ParseError as exc:
        raise UsageError(f"{a.file}:{exc}") from None
    try:
        post = parse_expr(a.post)
    except ParseError as exc:
        raise UsageError(f"--post:{exc}") from None
    value = wp(prog, post, _bindings(a.bind))
    out.write(fmt(value) + "\n")
    return EXIT_OK


def _cmd_prob(a, out: TextIO) -> int:
    out.write(f"P_recurrence {fmt(grover.success_prob_recurrence(a.n, a.c))}\n")
    out.write(f"P_closed {fmt(grover.success_prob_closed(a.n, a.c))}\n")
    return EXIT_OK


def _cmd_sweep(a, out: TextIO, err: TextIO) -> int:
    rows = grover.sweep(a.n, a.cmax)
    _write_csv(
        ["C", "P_recurrence", "P_closed"],
        [(r.c, r.p_recurrence, r.p_closed) for r in rows],
        a.out, out,
    )
    bad = [r.c for r in rows if not abs(r.p_recurrence - r.p_closed) < a.tol]
    if bad:
        err.write(f"recurrence and closed form differ by >= {a.tol} at C = {bad}\n")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_optimal(a, out: TextIO) -> int:
    rows = grover.optimal_table(a.nmax)
    _write_csv(
        ["N", "H_real", "C_star", "P_at_C_star"],
        [(r.n, r.h_real, r.c_star, r.p_at_c_star) for r in rows],
        a.out, out,
    )
    return EXIT_OK


def _cmd_simulate(a, out: TextIO) -> int:
    if a.x0 >= a.n:
        raise UsageError(f"--x0 must be below --n ({a.n})")
    hits, freq = grover.simulate(a.n, a.c, a.runs, a.seed, a.x0)
    out.write(f"hits {hits}\nruns {a.runs}\nfrequency {freq:.6f}\n")
    return EXIT_OK


def series_checks(n: int, cmax: int, tol: float) -> list[tuple[str, bool]]:
    """Named pass/fail results of the generating-function identities."""
    gf_a, gf_b = series.gf_pair(n)
    ca, cb = gf_a.coeffs(cmax + 1), gf_b.coeffs(cmax + 1)
    ab = grover.ab_sequence(n, cmax)
    results = [
        (f"gf coefficients of A_i equal the recurrence for i <= {cmax}",
         all(ca[i] == ab[i][0] for i in range(cmax + 1))),
        (f"gf coefficients of B_i equal the recurrence for i <= {cmax}",
         all(cb[i] == ab[i][1] for i in range(cmax + 1))),
    ]
    th = grover.theta(n)
    lhs, rhs = series.kernel_sums(th, cmax)
    closed = [grover.success_prob_closed(n, c) for c in range(cmax + 1)]
    results += [
        (f"Dirichlet kernel identity for C <= {cmax}",
         bool(all(abs(lhs - rhs) < tol))),
        (f"A_C + B_C equals the kernel sum for C <= {cmax}",
         all(abs(float(ab[c][0] + ab[c][1]) - lhs[c]) < tol for c in range(cmax + 1))),
        (f"kernel sum squared over N equals the closed form for C <= {cmax}",
         all(abs(lhs[c] ** 2 / n - closed[c]) < tol for c in range(cmax + 1))),
    ]
    return results


def _cmd_series_check(a, out: TextIO) -> int:
    results = series_checks(a.n, a.cmax, a.tol)
    for name, ok in results:
        out.write(f"{'PASS' if ok else 'FAIL'} {name}\n")
    return EXIT_OK if all(ok for _, ok in results) else EXIT_CHECK_FAILED


def run_cli(argv: Sequence[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    ap = build_parser()
    try:
        old_err, sys.stderr = sys.stderr, err
        try:
            a = ap.parse_args(list(argv))
        finally:
            sys.stderr = old_err
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        match (a.group, a.cmd):
            case ("wp", "run"):
                return _cmd_wp_run(a, out)
            case ("grover", "prob"):
                return _cmd_prob(a, out)
            case ("grover", "sweep"):
                return _cmd_sweep(a, out, err)
            case ("grover", "optimal"):
                return _cmd_optimal(a, out)
            case ("grover", "simulate"):
                return _cmd_simulate(a, out)
            case ("series", "check"):
                return _cmd_series_check(a, out)
    except (UsageError, EvalError) as exc:
        err.write(f"pwpgrover: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"pwpgrover: error: {exc}\n")
        return EXIT_USAGE
    raise AssertionError(f"unhandled command {a.group} {a.cmd}")


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
