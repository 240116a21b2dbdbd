"""Command-line interface: ``braidkl kl | tables | verify``.

Exit codes are 0 on success, 1 when a verification identity fails and 2 for
usage errors or arguments outside the supported ranges. Progress messages
go to standard error; standard output carries only the requested table or
report.

Graph input for ``kl --graph FILE`` is a text file with one edge per line,
``u v label``, vertices 0-indexed and labels forming ``0..m-1``. Blank
lines are skipped and ``#`` starts a comment. Loops and parallel edges are
allowed, but a loop makes the matroid non-loopless and is rejected.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from fractions import Fraction
from typing import Callable, Sequence

from .equivariant import verify_theorem_equivariant
from .exactmath import IntPolynomial
from .gfseries import (
    DEFAULT_ORDER,
    build_A,
    build_S,
    compositional_inverse_x,
    kl_poly_from_S,
    lagrange_inverse_x,
    phi_series,
    z_poly_from_A,
)
from .klcalc import KLValidationError, braid_kl, check_kl_axioms, kl_generic, kl_generic_braid, verify_theorem_main
from .matroid import from_graph, loops, parse_multigraph
from .spenum import (
    FAMILIES,
    JOBS_ENV,
    MAX_CACTUS,
    MAX_QSP,
    MAX_QSP_EXTENDED,
    MAX_SP,
    cactus_to_matroid,
    cacti_count_formula,
    count_table,
    default_jobs,
    e_sequence_readings,
    enum_simple_qsp,
    enum_triangular_cacti,
    matroid_to_cactus,
    relation_checks,
    tables_to_csv,
)

log = logging.getLogger("braidkl")

MAX_KL_N = 13
GENERIC_MAX_N = 9
GENERIC_AUTO_MAX_N = 8
ENGINES = ("generic", "stirling", "genfun")
SUITES = ("main", "equivariant", "genfun", "cacti", "relations")


class UsageError(Exception):
    """Arguments outside what the command supports (exit 2)."""


# --------------------------------------------------------------------------
# kl
# --------------------------------------------------------------------------


def _genfun_kl(n: int, order: int):
    a = build_A(order)
    s = build_S(order)
    return kl_poly_from_S(s, n - 1), z_poly_from_A(a, n - 1)


def run_kl(n: int | None, engine: str, order: int | None, graph: str | None) -> dict:
    if graph is not None:
        if n is not None:
            raise UsageError("--graph and --n are exclusive")
        try:
            with open(graph, encoding="utf-8") as fh:
                m = from_graph(parse_multigraph(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read {graph}: {exc}") from None
        if loops(m):
            raise UsageError("the graph has a loop edge; the matroid must be loopless")
        res = kl_generic(m)
        return {
            "graph": graph,
            "elements": m.n,
            "rank": res.rank,
            "p": res.p.to_list(),
            "z": res.z.to_list(),
            "engines": {"generic": {"p": res.p.to_list(), "z": res.z.to_list()}},
            "agree": True,
            "_p": res.p,
            "_z": res.z,
        }
    if n is None:
        raise UsageError("kl needs --n or --graph")
    if not 1 <= n <= MAX_KL_N:
        raise UsageError(f"--n must lie in 1..{MAX_KL_N}")
    if engine == "all":
        chosen = [e for e in ENGINES if e != "generic" or n <= GENERIC_AUTO_MAX_N]
    else:
        chosen = [engine]
    if "generic" in chosen and n > GENERIC_MAX_N:
        raise UsageError(f"the generic engine supports n <= {GENERIC_MAX_N}")
    if order is None:
        order = max(DEFAULT_ORDER, n - 1)
    if "genfun" in chosen and not n - 1 <= order:
        raise UsageError(f"--order {order} is below n - 1 = {n - 1}")

    results: dict[str, tuple[IntPolynomial, IntPolynomial]] = {}
    for name in chosen:
        start = time.perf_counter()
        if name == "generic":
            r = kl_generic_braid(n)
            results[name] = (r.p, r.z)
        elif name == "stirling":
            r = braid_kl(n)
            results[name] = (r.p, r.z)
        else:
            results[name] = _genfun_kl(n, order)
        log.info("engine %s finished in %.2fs", name, time.perf_counter() - start)
    p, z = results[chosen[0]]
    agree = all(res == (p, z) for res in results.values())
    return {
        "n": n,
        "rank": n - 1,
        "p": p.to_list(),
        "z": z.to_list(),
        "engines": {k: {"p": v[0].to_list(), "z": v[1].to_list()} for k, v in results.items()},
        "agree": agree,
        "_p": p,
        "_z": z,
    }


def format_kl(result: dict, fmt: str) -> str:
    public = {k: v for k, v in result.items() if not k.startswith("_")}
    if fmt == "json":
        return json.dumps(public, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "p", "z"])
        p, z = result["_p"], result["_z"]
        for i in range(result["rank"] + 1):
            w.writerow([i, p[i], z[i]])
        return buf.getvalue().rstrip("\n")
    status = "agree" if result["agree"] else "DISAGREE"
    line = f"P = {result['_p'].format()}; Z = {result['_z'].format()}"
    return f"{line}\nengines: {', '.join(result['engines'])} ({status})"


# --------------------------------------------------------------------------
# tables
# --------------------------------------------------------------------------


def run_tables(family: str, max_n: int, extended: bool) -> list:
    limit = MAX_SP if family == "sp" else MAX_QSP_EXTENDED
    plain_limit = MAX_SP - 1 if family == "sp" else MAX_QSP
    if not 1 <= max_n <= limit:
        raise UsageError(f"--max-n for {family} must lie in 1..{limit}")
    if max_n > plain_limit and not extended:
        raise UsageError(f"--max-n {max_n} for {family} needs --extended")
    tables = []
    for n in range(1, max_n + 1):
        start = time.perf_counter()
        tables.append(count_table(family, n, extended=extended))
        log.info("%s n=%d counted in %.2fs", family, n, time.perf_counter() - start)
    return tables


def format_tables(family: str, tables: list, fmt: str) -> str:
    if fmt == "csv":
        return tables_to_csv(tables).rstrip("\n")
    if fmt == "json":
        return json.dumps({"family": family, "columns": {str(t.n): list(t.counts) for t in tables}}, indent=2)
    top = max(t.n for t in tables)
    width = max(len(str(c)) for t in tables for c in t.counts) + 1
    width = max(width, 4)
    lines = ["k\\n".ljust(4) + "".join(str(t.n).rjust(width) for t in tables)]
    for k in range(top + 1):
        cells = "".join((str(t[k]) if k <= t.n else "").rjust(width) for t in tables)
        lines.append(str(k).ljust(4) + cells)
    return "\n".join(lines)


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, IntPolynomial):
        return v.to_list()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


class Report:
    def __init__(self):
        self.checks: list[dict] = []
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)

    def add(self, suite: str, identity: str, lhs, rhs, ok: bool | None = None) -> None:
        if ok is None:
            ok = lhs == rhs
        self.checks.append(
            {"suite": suite, "identity": identity, "lhs": _jsonable(lhs), "rhs": _jsonable(rhs), "ok": bool(ok)}
        )

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    @property
    def first_failure(self) -> str | None:
        return next((c["identity"] for c in self.checks if not c["ok"]), None)


def _suite_main(rep: Report, max_n: int | None, extended: bool, order: int) -> None:
    limit = MAX_QSP_EXTENDED + 1 if extended else MAX_QSP + 1
    top = 7 if max_n is None else max_n
    if not 1 <= top <= limit:
        raise UsageError(f"main suite needs --max-n in 1..{limit}" + ("" if extended else " (9 with --extended)"))
    for n in range(1, top + 1):
        simple = count_table("simple-qsp", n - 1, extended=extended).counts if n > 1 else (1,)
        every = count_table("qsp", n - 1, extended=extended).counts if n > 1 else (1,)
        res = verify_theorem_main(n, simple, every)
        for row in res["p_checks"]:
            rep.add("main", f"K_{n}: [t^{row['i']}]P = |S({n - 1},{n - 1 - row['i']})|", row["coefficient"], row["count"])
        for row in res["z_checks"]:
            rep.add("main", f"K_{n}: [t^{row['i']}]Z = |A({n - 1},{n - 1 - row['i']})|", row["coefficient"], row["count"])
        problems = check_kl_axioms(braid_kl(n))
        rep.add("main", f"K_{n}: KL axioms", problems, [])
        log.info("main suite n=%d done", n)


def _suite_equivariant(rep: Report, max_n: int | None) -> None:
    top = 6 if max_n is None else max_n
    if not 3 <= top <= 6:
        raise UsageError("equivariant suite needs --max-n in 3..6")
    for n in range(3, top + 1):
        res = verify_theorem_equivariant(n)
        for row in res["rows"]:
            family = "S" if row["poly"] == "P" else "A"
            rep.add(
                "equivariant",
                f"K_{n}: [t^{row['i']}]{row['poly']}^S_{n - 1} = fixed points on {family}({n - 1},{row['rank']})",
                row["equivariant"],
                row["permutation_character"],
                row["match"],
            )
        rep.add("equivariant", f"K_{n}: identity values = non-equivariant P, Z", res["dimensions_match"], True)
        log.info("equivariant suite n=%d done", n)


def _suite_genfun(rep: Report, order: int) -> None:
    if not 1 <= order <= MAX_KL_N - 1:
        raise UsageError(f"genfun suite needs --order in 1..{MAX_KL_N - 1}")
    phi = phi_series(order)
    rep.add("genfun", f"Newton inverse = Lagrange inverse of phi (order {order})",
            compositional_inverse_x(phi) == lagrange_inverse_x(phi), True)
    try:
        s = build_S(order)
        integral = True
    except ArithmeticError:
        integral = False
    rep.add("genfun", f"n! [x^n y^k] S integral for n <= {order}", integral, True)
    if not integral:
        return
    a = build_A(order)
    for n in range(1, order + 2):
        ref = braid_kl(n)
        rep.add("genfun", f"K_{n}: P from S = P from Stirling recursion", kl_poly_from_S(s, n - 1), ref.p)
        rep.add("genfun", f"K_{n}: Z from A = Z from Stirling recursion", z_poly_from_A(a, n - 1), ref.z)
        if n <= GENERIC_AUTO_MAX_N - 1:
            gen = kl_generic_braid(n)
            rep.add("genfun", f"K_{n}: P from flat recursion = P from S", gen.p, ref.p)
            rep.add("genfun", f"K_{n}: Z from flat recursion = Z from A", gen.z, ref.z)


def _suite_cacti(rep: Report, max_n: int | None, extended: bool) -> None:
    top_k = 4 if max_n is None else max_n
    limit = (MAX_CACTUS + 1) // 2
    if not 2 <= top_k <= limit:
        raise UsageError(f"cacti suite needs --max-n (largest k) in 2..{limit}")
    for k in range(2, top_k + 1):
        cacti = enum_triangular_cacti(2 * k - 1)
        rep.add("cacti", f"k={k}: #cacti on {2 * k - 1} vertices = (2k-3)!!(2k-1)^(k-2)",
                len(cacti), cacti_count_formula(k))
        if 2 * k - 1 <= MAX_QSP or extended:
            images = [cactus_to_matroid(c) for c in cacti]
            back = all(matroid_to_cactus(m) == c for m, c in zip(images, cacti))
            rep.add("cacti", f"k={k}: cactus -> matroid -> cactus roundtrip", back, True)
            simple = enum_simple_qsp(2 * k - 1)[k]
            forth = all(cactus_to_matroid(matroid_to_cactus(m)) == m for m in simple)
            rep.add("cacti", f"k={k}: matroid -> cactus -> matroid roundtrip", forth, True)
            rep.add("cacti", f"k={k}: #cacti = |S({2 * k - 1},{k})|", len(cacti), len(simple))
        log.info("cacti k=%d done", k)
    for row in e_sequence_readings(3):
        k = row["k"]
        rep.add("cacti", f"k={k}: odd-case formula with enumerated E_{k}={row['enumerated']} = |S({2 * k},{k + 1})|",
                row["formula_enumerated"], row["count"])
        rep.note(
            f"k={k}: listed sequence read from E_0 gives {row['formula_literal']}, "
            f"read from E_1 gives {row['formula_shifted']}; enumeration needs {row['count']}"
        )


def _suite_relations(rep: Report, max_n: int | None) -> None:
    top = MAX_QSP if max_n is None else max_n
    if not 0 <= top <= MAX_QSP:
        raise UsageError(f"relations suite needs --max-n in 0..{MAX_QSP}")
    res = relation_checks(top)
    for row in res["rows"]:
        n, k = row["n"], row["k"]
        rep.add("relations", f"|A({n},{k})| = sum_i C({n},i) |A_loopless(i,{k})|", row["all"], row["binomial_sum"])
        rep.add("relations", f"|A_loopless({n},{k})| = sum_i S({n},i) |S(i,{k})|", row["loopless"], row["stirling_sum"])
    for n in range(1, top + 1):
        counts = count_table("qsp", n).counts
        rep.add("relations", f"|A({n},k)| = |A({n},{n}-k)|", list(counts), list(counts[::-1]))


def run_verify(suite: str, max_n: int | None, order: int | None, extended: bool) -> Report:
    rep = Report()
    order = DEFAULT_ORDER if order is None else order
    suites = SUITES if suite == "all" else (suite,)
    runners: dict[str, Callable[[], None]] = {
        "main": lambda: _suite_main(rep, max_n, extended, order),
        "equivariant": lambda: _suite_equivariant(rep, max_n),
        "genfun": lambda: _suite_genfun(rep, order),
        "cacti": lambda: _suite_cacti(rep, max_n, extended),
        "relations": lambda: _suite_relations(rep, max_n),
    }
    for name in suites:
        start = time.perf_counter()
        runners[name]()
        log.info("suite %s finished in %.2fs", name, time.perf_counter() - start)
    return rep


def format_report(rep: Report, suite: str, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(
            {"suite": suite, "ok": rep.ok, "first_failure": rep.first_failure, "checks": rep.checks, "notes": rep.notes}, indent=2
        )
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "identity", "lhs", "rhs", "ok"])
        for c in rep.checks:
            w.writerow([c["suite"], c["identity"], json.dumps(c["lhs"]), json.dumps(c["rhs"]), c["ok"]])
        return buf.getvalue().rstrip("\n")
    lines = []
    for c in rep.checks:
        mark = "ok  " if c["ok"] else "FAIL"
        lines.append(f"{mark} {c['identity']}: {json.dumps(c['lhs'])} = {json.dumps(c['rhs'])}")
    lines.extend(f"note {n}" for n in rep.notes)
    lines.append("all checks passed" if rep.ok else f"first failure: {rep.first_failure}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "plain"), default=None,
                        help="output format (default: plain for kl, csv for tables, json for verify)")
    common.add_argument("--jobs", type=_positive, default=None,
                        help=f"worker processes for enumeration (default: ${JOBS_ENV} or 1)")
    common.add_argument("--extended", action="store_true",
                        help="allow the n = 8 enumerations (slower)")
    common.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")

    parser = argparse.ArgumentParser(prog="braidkl", description="Kazhdan-Lusztig polynomials of braid matroids.")
    sub = parser.add_subparsers(dest="command", required=True)

    kl = sub.add_parser("kl", parents=[common], help="P and Z of K_n or of a graph")
    kl.add_argument("--n", type=int, help=f"number of vertices, 1..{MAX_KL_N}")
    kl.add_argument("--engine", choices=(*ENGINES, "all"), default="all")
    kl.add_argument("--graph", metavar="FILE", help="multigraph file with 'u v label' lines")
    kl.add_argument("--order", type=int, default=None, help="series truncation order for the genfun engine")

    tables = sub.add_parser("tables", parents=[common], help="count tables by ground size and rank")
    tables.add_argument("--family", choices=FAMILIES, required=True)
    tables.add_argument("--max-n", type=int, default=7)

    verify = sub.add_parser("verify", parents=[common], help="run identity checks")
    verify.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    verify.add_argument("--max-n", type=int, default=None,
                        help="largest size checked (for cacti: largest k)")
    verify.add_argument("--order", type=int, default=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    jobs = args.jobs if args.jobs is not None else default_jobs()
    os.environ[JOBS_ENV] = str(jobs)
    try:
        if args.command == "kl":
            result = run_kl(args.n, args.engine, args.order, args.graph)
            print(format_kl(result, args.format or "plain"))
            if not result["agree"]:
                print("engines disagree", file=sys.stderr)
                return 1
            return 0
        if args.command == "tables":
            tables = run_tables(args.family, args.max_n, args.extended)
            print(format_tables(args.family, tables, args.format or "csv"))
            return 0
        rep = run_verify(args.suite, args.max_n, args.order, args.extended)
        print(format_report(rep, args.suite, args.format or "json"))
        if not rep.ok:
            print(f"mismatch: {rep.first_failure}", file=sys.stderr)
            return 1
        return 0
    except (UsageError, ValueError) as exc:
        print(f"braidkl: error: {exc}", file=sys.stderr)
        return 2
    except (KLValidationError, ArithmeticError) as exc:
        print(f"braidkl: verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
