"""Command-line front end: ``alcmod <command> ...``.

Exit codes: 0 on success, 1 for bad input, 2 when a time or node budget ran out.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

from .generate import family
from .locality import SignatureTooLarge, extract_star_module, sample_signature
from .module_builder import BuildConfig, BuildResult, build, oracle_rewrite_check
from .normalize import InvariantViolation, clausify, clauses_length
from .oracle import ResourceExceeded, TableauConfig, inseparable_sampled
from .parser_io import (
    ParseError,
    RunReport,
    emit_report,
    format_axiom,
    format_concept,
    parse_ontology,
    parse_signature,
    serialize_ontology,
    serialize_signature,
)
from .saturation import BudgetExceeded
from .syntax import Ontology, Signature, length

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2

_PIPELINES = {"gm": "gm", "gm-star": "gm*", "dm": "dm", "ui": "ui"}


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _ontology(path: str) -> Ontology:
    try:
        return parse_ontology(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _signature(path: str) -> Signature:
    try:
        return parse_signature(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _config(args) -> BuildConfig:
    check = oracle_rewrite_check(args.max_tableau_nodes) if getattr(args, "verify_rewrites", False) else None
    return BuildConfig(
        subsumption_budget_ms=args.subsumption_budget_ms,
        conflict_budget_ms=args.conflict_budget_ms,
        ui_budget_ms=args.conflict_budget_ms,
        rewrite_check=check,
    )


def _report(o: Ontology, result: Ontology, res: BuildResult | None, seconds: float) -> RunReport:
    lengths = [length(a) for a in result.axioms]
    rep = RunReport(
        input_length=length(o),
        result_length=sum(lengths),
        result_axioms=len(lengths),
        max_axiom_length=max(lengths, default=0),
        stage_times_ms={"total": seconds * 1000.0},
    )
    if res is not None:
        rep.cl_length = res.cl_length
        rep.ri_size = res.ri_size
        rep.stage_times_ms.update(res.stage_times_ms)
        rep.subsumption_budget_hit = res.subsumption_budget_hit
        rep.widened_signature = list(res.widened_signature)
        rep.ui_status = res.ui_status.value if res.ui_status is not None else None
    return rep


def _run_method(method: str, o: Ontology, sigma: Signature, cfg: BuildConfig) -> tuple[Ontology, BuildResult | None]:
    if method == "locality":
        return extract_star_module(o, sigma), None
    res = build(o, sigma, _PIPELINES[method], cfg)
    return res.ontology, res


# ---------------------------------------------------------------- commands


def cmd_normalize(args) -> int:
    o = _ontology(args.ontology)
    n = clausify(o)
    lines = [format_axiom(c.as_axiom()) for c in n.clauses]
    lines += [f"# {d.text} := {format_concept(c)}" for d, c in sorted(n.definers.defs.items())]
    _write(args.out, "".join(line + "\n" for line in lines))
    if args.report:
        rep = RunReport(input_length=length(o), cl_length=clauses_length(n.clauses))
        rep.extra["clauses"] = len(n.clauses)
        rep.extra["definers"] = len(n.definers)
        _write(args.report, emit_report(rep))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    o = _ontology(args.ontology)
    sigma = _signature(args.signature)
    t0 = time.perf_counter()
    result, res = _run_method(args.command, o, sigma, _config(args))
    spent = time.perf_counter() - t0
    _write(args.out, serialize_ontology(result))
    if args.report:
        _write(args.report, emit_report(_report(o, result, res, spent)))
    return EXIT_OK


def cmd_check(args) -> int:
    o1 = _ontology(args.ontology)
    o2 = _ontology(args.against)
    sigma = _signature(args.signature)
    cfg = TableauConfig(max_nodes=args.max_tableau_nodes)
    verdict = inseparable_sampled(o1, o2, sigma, args.samples, args.depth, args.seed, cfg)
    if verdict.inseparable:
        sys.stdout.write(f"inseparable ({verdict.checked} axioms checked)\n")
        return EXIT_OK
    side = "first" if verdict.entailed_by_first else "second"
    sys.stdout.write(f"separable: {format_axiom(verdict.counterexample)} is entailed only by the {side} ontology\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    o = _ontology(args.ontology)
    cfg = _config(args)
    rows = []
    failures = 0
    for i in range(args.sig_count):
        try:
            sigma = sample_signature(o, args.sig_size, args.seed + i)
        except SignatureTooLarge as exc:
            raise InputError(str(exc)) from exc
        t0 = time.perf_counter()
        try:
            result, _ = _run_method(args.method, o, sigma, cfg)
        except (BudgetExceeded, ResourceExceeded):
            failures += 1
            continue
        spent = (time.perf_counter() - t0) * 1000.0
        lengths = [length(a) for a in result.axioms]
        rows.append((i, len(sigma), sum(lengths), max(lengths, default=0), spent))
    out = ["request\t|sig|\tlength\tmax_axiom\ttime_ms"]
    out += [f"{i}\t{s}\t{n}\t{m}\t{t:.1f}" for i, s, n, m, t in rows]
    sys.stdout.write("\n".join(out) + "\n")
    totals = [r[2] for r in rows]
    rep = RunReport(
        input_length=length(o),
        result_length=max(totals, default=0),
        result_axioms=len(rows),
        max_axiom_length=max((r[3] for r in rows), default=0),
        stage_times_ms={"total": sum(r[4] for r in rows)},
    )
    rep.extra.update(
        method=args.method,
        requests=args.sig_count,
        succeeded=len(rows),
        failed=failures,
        length_max=max(totals, default=0),
        length_avg=round(statistics.fmean(totals), 3) if totals else 0.0,
        length_median=statistics.median(totals) if totals else 0,
        time_ms_avg=round(statistics.fmean(r[4] for r in rows), 3) if rows else 0.0,
    )
    if args.report:
        _write(args.report, emit_report(rep))
    return EXIT_OK


def cmd_family(args) -> int:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    o, sigma = family(args.n)
    out = Path(args.out)
    sig_out = Path(args.signature_out) if args.signature_out else out.with_suffix(".sig")
    out.write_text(serialize_ontology(o), encoding="utf-8")
    sig_out.write_text(serialize_signature(sigma), encoding="utf-8")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _budgets(p: argparse.ArgumentParser) -> None:
    p.add_argument("--subsumption-budget-ms", type=float, default=10_000.0)
    p.add_argument("--conflict-budget-ms", type=float, default=30_000.0)
    p.add_argument("--max-tableau-nodes", type=int, default=100_000)
    p.add_argument("--verify-rewrites", action="store_true", help="check every simplification with the tableau")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alcmod", description="Modules and uniform interpolants for ALC ontologies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="print the clausal normal form and the definer map")
    p.add_argument("--ontology", required=True)
    p.add_argument("--out")
    p.add_argument("--report")
    _budgets(p)
    p.set_defaults(func=cmd_normalize)

    helps = {
        "gm": "general module",
        "gm-star": "optimised general module",
        "dm": "deductive module (subset of the input)",
        "ui": "uniform interpolant, approximate if definers are cyclic",
        "locality": "syntactic ⊤⊥*-module",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--ontology", required=True)
        p.add_argument("--signature", required=True)
        p.add_argument("--out")
        p.add_argument("--report")
        _budgets(p)
        p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("check", help="sampled Σ-inseparability test of two ontologies")
    p.add_argument("--ontology", required=True)
    p.add_argument("--against", required=True)
    p.add_argument("--signature", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    _budgets(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="run one method on sampled signatures and summarise result sizes")
    p.add_argument("--ontology", required=True)
    p.add_argument("--sig-size", type=int, required=True)
    p.add_argument("--sig-count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["gm", "gm-star", "dm", "ui", "locality"], default="gm")
    p.add_argument("--report")
    _budgets(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("family", help="write the exponential family ontology O_n and its signature")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--signature-out")
    p.set_defaults(func=cmd_family)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ValueError, InvariantViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExceeded, ResourceExceeded) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
