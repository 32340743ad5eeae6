"""Command-line entry point.

Exit codes: 0 success, 1 verification mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import analysis, automaton, oracle, series
from .fieldcore import Prime, is_prime

MAX_LIMIT = 10**8


class UsageError(Exception):
    pass


def _prime(value: str) -> Prime:
    try:
        return Prime(int(value))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _limit(value: int, name: str = "limit") -> int:
    if value < 0 or value > MAX_LIMIT:
        raise UsageError(f"--{name} must lie in [0, {MAX_LIMIT}]")
    return value


@contextmanager
def _timed(args, label: str):
    start = time.perf_counter()
    yield
    if args.timing:
        print(f"[timing] {label}: {time.perf_counter() - start:.3f}s", file=sys.stderr)


def _emit(args, row: dict) -> None:
    if args.format == "json":
        print(json.dumps(row, sort_keys=True))
    else:
        print("\t".join(f"{k}={v}" for k, v in row.items()))


def _load_or_build(args, p: Prime) -> automaton.Automaton:
    path = getattr(args, "automaton", None)
    if path:
        try:
            m = automaton.deserialize(Path(path).read_text())
        except (OSError, automaton.AutomatonFormatError) as exc:
            raise UsageError(f"cannot load automaton: {exc}") from exc
        if m.p != p:
            raise UsageError(f"automaton file is for p={m.p}, not {p}")
        return m
    with _timed(args, f"build p={p}"):
        return automaton.build(p)


# ---------------------------------------------------------------------------
# subcommands


def cmd_build(args) -> int:
    m = _load_or_build(args, _prime(args.prime))
    text = automaton.dumps(m)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {len(m)} states to {args.out}", file=sys.stderr)
    else:
        print(text)
    return 0


def cmd_eval(args) -> int:
    p = _prime(args.prime)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    m = _load_or_build(args, p)
    print(m.eval(args.n))
    return 0


def cmd_oracle(args) -> int:
    p = _prime(args.prime)
    limit = _limit(args.limit)
    with _timed(args, f"oracle p={p} n_max={limit}"):
        table = oracle.motzkin_table(p.value, limit, method=args.method)
    if args.out:
        oracle.write_table(table, args.out)
    else:
        for n, v in enumerate(table.values.tolist()):
            print(f"{n}\t{v}")
    return 0


def cmd_series(args) -> int:
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    for row in series.series_recurrence(max(args.n, 1))[: args.n + 1]:
        print(f"{row.n}\t{row.a}\t{row.b}\t{row.c}")
    return 0


def cmd_density(args) -> int:
    p = _prime(args.prime)
    limit = _limit(args.limit)
    if limit < 1:
        raise UsageError("--limit must be at least 1")
    if not 0 <= args.residue < p.value:
        raise UsageError(f"--residue must lie in [0, {p.value - 1}]")
    m = _load_or_build(args, p)
    with _timed(args, "density sweep"):
        report = analysis.empirical_density(p, m, args.residue, limit, threads=args.threads)
    _emit(args, report.as_dict())
    return 0


def _verify_oracle(args, p: Prime, limit: int) -> tuple[int, list[str]]:
    m = _load_or_build(args, p)
    with _timed(args, "oracle table"):
        expected = oracle.motzkin_table(p.value, limit).values.astype(np.int64)
    with _timed(args, "automaton sweep"):
        got = m.eval_range(0, limit + 1)
    bad = np.flatnonzero(got != expected)
    return limit + 1, [f"n={n}: automaton {got[n]} oracle {expected[n]}" for n in bad.tolist()]


def _verify_classical(args, modulus: int, limit: int) -> tuple[int, list[str]]:
    table = oracle.motzkin_exact_residues([modulus], limit)[modulus]
    out = []
    for n in range(limit + 1):
        pred = analysis.classical_predicate(modulus, n)
        truth = int(table[n]) if modulus == 3 else table[n] == 0
        if pred != truth:
            out.append(f"n={n}: predicate {pred} oracle {int(table[n])}")
    return limit + 1, out


def cmd_verify(args) -> int:
    limit = _limit(args.limit)
    if args.suite == "classical":
        modulus = int(args.prime)
        if modulus not in (2, 3, 5):
            raise UsageError("--suite classical supports --prime 2, 3 or 5")
        checked, problems = _verify_classical(args, modulus, limit)
        label = modulus
    else:
        p = _prime(args.prime)
        label = p.value
        if args.suite == "oracle":
            checked, problems = _verify_oracle(args, p, limit)
        elif args.suite == "tables":
            m = _load_or_build(args, p)
            problems = automaton.verify_tables(m)
            checked = len(m)
        else:
            m = _load_or_build(args, p)
            with _timed(args, "forms"):
                problems = analysis.verify_forms(p, m, limit, oracle_limit=min(limit, 10_000))
            checked = sum(f.count(limit) for f in analysis.table1_forms(p))
    status = "FAIL" if problems else "PASS"
    _emit(args, {"status": status, "suite": args.suite, "p": label, "limit": limit,
                 "checked": checked, "mismatches": len(problems)})
    for line in problems:
        print(line, file=sys.stderr)
    return 1 if problems else 0


def _criterion_row(p: Prime, with_automaton: bool) -> dict:
    row = {
        "p": p.value,
        "class6": p.class6,
        "cpd": analysis.cpd_table(p.value),
        "density_one_digit": analysis.density_one_criterion(p.value),
    }
    if with_automaton:
        rep = analysis.forbidden_residues(p, automaton.build(p), oracle_limit=-1)
        row["forbidden"] = sorted(rep.forbidden)
        row["generates_units"] = rep.generates_units
    else:
        row["generates_units"] = analysis.unit_subgroup_order(row["cpd"], p.value) == p.value - 1
    return row


def cmd_criterion(args) -> int:
    if args.scan:
        if args.max_prime is None:
            raise UsageError("--scan needs --max-prime")
        if args.max_prime >= 1 << 20:
            raise UsageError("--max-prime must be below 2**20")
        for q in range(5, args.max_prime + 1):
            if is_prime(q):
                row = _criterion_row(Prime(q), with_automaton=False)
                if args.format != "json":
                    row.pop("cpd")
                _emit(args, row)
        return 0
    if args.prime is None:
        raise UsageError("--prime or --scan is required")
    p = _prime(args.prime)
    row = _criterion_row(p, with_automaton=True)
    if args.format == "json":
        _emit(args, row)
    else:
        for d, c in enumerate(row.pop("cpd")):
            print(f"cpd\t{d}\t{c}")
        _emit(args, row)
    return 0


def cmd_export_dot(args) -> int:
    m = _load_or_build(args, _prime(args.prime))
    text = automaton.export_dot(m, collapse_constant_states=args.collapse)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--threads", type=int, default=1, help="sweep parallelism")
    common.add_argument("--timing", action="store_true", help="report timings on stderr")

    parser = argparse.ArgumentParser(prog="motzkin-automata", description="Motzkin numbers modulo primes via automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("build", parents=[common], help="build the automaton and print it as JSON")
    sp.add_argument("--prime", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("eval", parents=[common], help="M_n mod p by digit feeding")
    sp.add_argument("--prime", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--automaton", help="load a serialised machine instead of building")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("oracle", parents=[common], help="brute-force table of M_n mod p")
    sp.add_argument("--prime", required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--out", help="binary table file (MOTZ format)")
    sp.add_argument("--method", choices=("exact", "convolution"), default="exact")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("series", parents=[common], help="rows n, a_n, b_n, c_n")
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("density", parents=[common], help="empirical density of a residue class")
    sp.add_argument("--prime", required=True)
    sp.add_argument("--residue", type=int, required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--automaton")
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("verify", parents=[common], help="run a verification suite")
    sp.add_argument("--prime", required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--suite", choices=("oracle", "tables", "forms", "classical"), required=True)
    sp.add_argument("--automaton")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("criterion", parents=[common], help="cpd table, density-1 digit, forbidden residues")
    sp.add_argument("--prime")
    sp.add_argument("--scan", action="store_true")
    sp.add_argument("--max-prime", type=int)
    sp.set_defaults(func=cmd_criterion)

    sp = sub.add_parser("export-dot", parents=[common], help="Graphviz rendering of the machine")
    sp.add_argument("--prime", required=True)
    sp.add_argument("--collapse", action="store_true", help="fold constant states into one node")
    sp.add_argument("--automaton")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export_dot)
    return parser


def run(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
