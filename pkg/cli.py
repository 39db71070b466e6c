#!/usr/bin/env python3
"""ncrw: command-line front end.

Exit codes: 0 success or verified, 1 property failed, 2 input error, 3 limit exceeded.
Reports go to stdout (JSON by default), logs to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import config
from aon import aon_rules, aon_verify, basis_words
from ars import analyze_ars
from automaton import build_dfa, count_words, is_irreducible, minimize, to_dot
from core import AlphabetMismatch, FormatError, NcrwError, NoStrictMaximum, Polynomial, UnknownLetter
from formats import (
    alphabet_to_json,
    ars_from_json,
    ars_report_to_json,
    bimodule_to_json,
    completion_to_json,
    dfa_from_json,
    dfa_to_json,
    dumps,
    load_json,
    matrix_from_json,
    ordering_from_json,
    phi_from_json,
    polynomial_from_json,
    polynomial_to_json,
    save_json,
    system_from_json,
    system_to_json,
    trace_to_json,
    verify_report_to_json,
)
from homology import NotOrthogonal, SizeMismatch, UnsupportedSpectrum, ext_dims, hh_dims, k_values
from modext import graph_system, kernel_generators, split_system, verify_p_complete, verify_weak_complete
from ordering import LexOrderingRejected, syllable
from resolution import STAGES, StageMismatch, stage_kernel, stage_system, verify_stage
from rewrite import (
    NotDecreasing,
    RewriteSystem,
    StepLimitExceeded,
    VerifyReport,
    exhaustive_normal_forms,
    knuth_bendix,
    normal_form,
    verify_complete,
)
from suite import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3

INPUT_ERRORS = (
    FormatError,
    UnknownLetter,
    AlphabetMismatch,
    SizeMismatch,
    NotOrthogonal,
    UnsupportedSpectrum,
    StageMismatch,
    NotDecreasing,
    NoStrictMaximum,
    LexOrderingRejected,
)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _text_lines(data: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(data, dict):
        lines = []
        for key, value in data.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines += _text_lines(value, indent + 1)
            else:
                lines.append(f"{pad}{key}: {value}")
        return lines
    if isinstance(data, list):
        lines = []
        for item in data:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines += _text_lines(item, indent + 1)
            else:
                lines.append(f"{pad}- {item}")
        return lines
    return [f"{pad}{data}"]


def emit(args: argparse.Namespace, data: Any) -> None:
    if args.output == "text":
        print("\n".join(_text_lines(data)))
    else:
        print(dumps(data))


def _verdict(report: VerifyReport) -> int:
    if report.complete:
        return EXIT_OK
    if report.limit_failures == len(report.failures):
        return EXIT_LIMIT
    return EXIT_FAILED


def _load_system(path: str) -> tuple[RewriteSystem, dict[int, str], dict]:
    data = load_json(path)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a system object")
    system, classes = system_from_json(data)
    return system, classes, data


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_ars(args: argparse.Namespace) -> int:
    report = analyze_ars(ars_from_json(load_json(args.input)))
    emit(args, ars_report_to_json(report))
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    system, _, _ = _load_system(args.system)
    if args.poly:
        p = polynomial_from_json(system.alphabet, load_json(args.poly))
    else:
        p = Polynomial.parse(system.alphabet, args.expr)
    result, trace = normal_form(p, system, args.step_limit)
    out: dict[str, Any] = {"input": p.render(), "nf": polynomial_to_json(result), "text": result.render()}
    if args.trace:
        out["trace"] = trace_to_json(trace, system)
    code = EXIT_OK
    if args.all_strategies:
        forms = exhaustive_normal_forms(p, system)
        out["normal_forms"] = sorted(f.render() for f in forms)
        out["unique"] = len(forms) == 1
        if len(forms) != 1:
            code = EXIT_FAILED
    emit(args, out)
    return code


def cmd_verify(args: argparse.Namespace) -> int:
    system, classes, _ = _load_system(args.system)
    if classes:
        split = split_system(system, classes)
        check = verify_p_complete if args.strict else verify_weak_complete
        report = check(split, args.step_limit, args.parallel)
    else:
        report = verify_complete(system, args.step_limit, args.parallel)
    emit(args, verify_report_to_json(report, system))
    return _verdict(report)


def cmd_complete(args: argparse.Namespace) -> int:
    system, classes, _ = _load_system(args.system)
    result = knuth_bendix(system, args.max_rules, args.step_limit)
    if args.out:
        save_json(args.out, system_to_json(result.system, classes))
        logger.info("Wrote %d rules to %s", len(result.system), args.out)
    emit(args, completion_to_json(result))
    return EXIT_OK if result.completed else EXIT_LIMIT


def cmd_kernel(args: argparse.Namespace) -> int:
    algebra, classes, data = _load_system(args.algebra)
    if not classes:
        raise FormatError(f"{args.algebra}: no module letters carry a class")
    alphabet = algebra.alphabet
    if data.get("ordering") is None:
        ordering = syllable(alphabet, sorted(alphabet.module_positions() | set(classes)))
    else:
        ordering = ordering_from_json(alphabet, data["ordering"])
    images = phi_from_json(alphabet, load_json(args.phi))
    system = graph_system(images, RewriteSystem(alphabet, ordering, algebra.rules), ordering, classes)
    report = verify_weak_complete(system, args.step_limit, args.parallel)
    if not report.complete:
        emit(args, verify_report_to_json(report, system.base))
        return _verdict(report)
    generators = kernel_generators(system, report, args.step_limit)
    emit(args, {"generators": [bimodule_to_json(g) for g in generators]})
    return EXIT_OK


def cmd_aon(args: argparse.Namespace) -> int:
    if args.aon_command == "gen":
        system = aon_rules(args.n)
        if args.out:
            save_json(args.out, system_to_json(system))
        emit(args, {"n": args.n, "rules": len(system)} if args.out else system_to_json(system))
        return EXIT_OK
    if args.aon_command == "verify":
        report = aon_verify(args.n, args.step_limit, args.parallel)
        out = verify_report_to_json(report.overlaps, aon_rules(args.n))
        out.update(
            n=args.n,
            complete=report.complete,
            membership_failures=report.membership_failures,
            orientation_failures=report.orientation_failures,
        )
        emit(args, out)
        return EXIT_OK if report.complete else _verdict(report.overlaps) or EXIT_FAILED
    system = aon_rules(args.n)
    levels = basis_words(args.n, args.max_len, system)
    out = {"n": args.n, "counts": [len(level) for level in levels]}
    if not args.count_only:
        out["words"] = [[system.alphabet.render_word(w) for w in level] for level in levels]
    emit(args, out)
    return EXIT_OK


def cmd_automaton(args: argparse.Namespace) -> int:
    if args.automaton_command == "build":
        system, _, _ = _load_system(args.system)
        dfa = build_dfa([rule.lhs for rule in system.rules], system.alphabet)
        if args.minimize:
            dfa = minimize(dfa)
        if args.out:
            save_json(args.out, dfa_to_json(dfa))
        if args.dot:
            Path(args.dot).write_text(to_dot(dfa) + "\n")
        emit(args, {"states": dfa.states, "dead": dfa.dead, "alphabet": alphabet_to_json(dfa.alphabet)})
        return EXIT_OK
    dfa = dfa_from_json(load_json(args.dfa))
    if args.automaton_command == "count":
        emit(args, {"length": args.length, "count": count_words(dfa, args.length)})
        return EXIT_OK
    word = dfa.alphabet.parse_word(args.word)
    irreducible = is_irreducible(dfa, word)
    emit(args, {"word": dfa.alphabet.render_word(word), "irreducible": irreducible})
    return EXIT_OK if irreducible else EXIT_FAILED


def cmd_resolution(args: argparse.Namespace) -> int:
    if args.resolution_command == "gen":
        stage = stage_system(args.n, args.stage, args.allow_small)
        data = system_to_json(stage.system.base, stage.system.classes)
        if args.out:
            save_json(args.out, data)
            data = {"n": args.n, "stage": args.stage, "rules": len(stage.system.base)}
        emit(args, data)
        return EXIT_OK
    if args.resolution_command == "verify":
        report = verify_stage(args.n, args.stage, args.step_limit, args.parallel, args.allow_small)
        out = verify_report_to_json(report.report, stage_system(args.n, args.stage, args.allow_small).system.base)
        out.update(families=report.families, missing=report.missing, unexpected=report.unexpected)
        emit(args, out)
        if report.missing and report.complete:
            return EXIT_FAILED
        return _verdict(report.report)
    result = stage_kernel(args.n, args.stage, args.step_limit, allow_small=args.allow_small)
    emit(args, {
        "generators": [bimodule_to_json(g) for g in result.generators],
        "matches": [{"tag": m.tag, "generator": m.generator, "sign": m.sign} for m in result.matches],
    })
    return EXIT_OK


def cmd_homology(args: argparse.Namespace) -> int:
    lam = matrix_from_json(load_json(args.lam))
    omega = matrix_from_json(load_json(args.omega))
    dims = (ext_dims if args.ext else hh_dims)(lam, omega, args.phi3_sign)
    out = dims.to_dict()
    if args.blocks:
        blocks = load_json(args.blocks)
        if isinstance(blocks, dict):
            blocks = blocks.get("blocks")
        if not isinstance(blocks, list):
            raise FormatError(f"{args.blocks}: expected a list of block sizes")
        k_minus, k_lambda = k_values(omega @ lam.transpose(), blocks)
        out["k_values"] = {"k_minus1": k_minus, "k_lambda": k_lambda}
    emit(args, out)
    return EXIT_OK


def cmd_paper_suite(args: argparse.Namespace) -> int:
    results = run_suite(quick=args.quick)
    if args.output == "text":
        width = max(len(r.name) for r in results)
        for r in results:
            print(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<{width}}  {r.seconds:7.2f}s  {r.detail}")
        print(f"{sum(r.ok for r in results)}/{len(results)} checks passed")
    else:
        print(dumps([r.to_dict() for r in results]))
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAILED


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _n(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True)


def _stage(parser: argparse.ArgumentParser) -> None:
    _n(parser)
    parser.add_argument("--stage", type=int, choices=STAGES, required=True)
    parser.add_argument("--allow-small", action="store_true", help="permit n < 3 for stages 2 and 3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncrw", description="Noncommutative rewriting and Groebner machinery")
    parser.add_argument("--parallel", type=int, default=config.PARALLEL, help="worker processes for overlap checks")
    parser.add_argument("--step-limit", type=int, default=config.STEP_LIMIT)
    output = parser.add_mutually_exclusive_group()
    output.add_argument("--json", dest="output", action="store_const", const="json")
    output.add_argument("--text", dest="output", action="store_const", const="text")
    parser.set_defaults(output=config.OUTPUT_FORMAT)
    parser.add_argument("--log-level", default=config.LOG_LEVEL, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    ars = sub.add_parser("ars", help="abstract reduction systems")
    ars_sub = ars.add_subparsers(dest="ars_command", required=True)
    analyze = ars_sub.add_parser("analyze")
    analyze.add_argument("--input", required=True)
    ars.set_defaults(handler=cmd_ars)

    reduce = sub.add_parser("reduce", help="normal form of a polynomial")
    reduce.add_argument("--system", required=True)
    source = reduce.add_mutually_exclusive_group(required=True)
    source.add_argument("--poly", help="polynomial JSON file")
    source.add_argument("--expr", help="polynomial text, e.g. 'a[1,1]a[2,1] - 1'")
    reduce.add_argument("--trace", action="store_true")
    reduce.add_argument("--all-strategies", action="store_true", help="explore every redex choice")
    reduce.set_defaults(handler=cmd_reduce)

    verify = sub.add_parser("verify", help="check all overlaps of a system")
    verify.add_argument("--system", required=True)
    verify.add_argument("--strict", action="store_true", help="module systems: include urbild rules")
    verify.set_defaults(handler=cmd_verify)

    complete = sub.add_parser("complete", help="Knuth-Bendix completion")
    complete.add_argument("--system", required=True)
    complete.add_argument("--max-rules", type=int, default=config.MAX_RULES)
    complete.add_argument("--out")
    complete.set_defaults(handler=cmd_complete)

    kernel = sub.add_parser("kernel", help="kernel generators of a bimodule map")
    kernel.add_argument("--phi", required=True)
    kernel.add_argument("--algebra", required=True)
    kernel.set_defaults(handler=cmd_kernel)

    aon = sub.add_parser("aon", help="the algebra A_o(n)")
    aon_sub = aon.add_subparsers(dest="aon_command", required=True)
    gen = aon_sub.add_parser("gen")
    _n(gen)
    gen.add_argument("--out")
    _n(aon_sub.add_parser("verify"))
    basis = aon_sub.add_parser("basis")
    _n(basis)
    basis.add_argument("--max-len", type=int, required=True)
    basis.add_argument("--count-only", action="store_true")
    aon.set_defaults(handler=cmd_aon)

    automaton = sub.add_parser("automaton", help="factor automaton of irreducible words")
    automaton_sub = automaton.add_subparsers(dest="automaton_command", required=True)
    build = automaton_sub.add_parser("build")
    build.add_argument("--system", required=True)
    build.add_argument("--out")
    build.add_argument("--dot")
    build.add_argument("--minimize", action="store_true")
    count = automaton_sub.add_parser("count")
    count.add_argument("--dfa", required=True)
    count.add_argument("--length", type=int, required=True)
    check = automaton_sub.add_parser("check")
    check.add_argument("--dfa", required=True)
    check.add_argument("--word", required=True)
    automaton.set_defaults(handler=cmd_automaton)

    resolution = sub.add_parser("resolution", help="stages of the bimodule resolution")
    resolution_sub = resolution.add_subparsers(dest="resolution_command", required=True)
    stage_gen = resolution_sub.add_parser("gen")
    _stage(stage_gen)
    stage_gen.add_argument("--out")
    _stage(resolution_sub.add_parser("verify"))
    _stage(resolution_sub.add_parser("kernel"))
    resolution.set_defaults(handler=cmd_resolution)

    homology = sub.add_parser("homology", help="Hochschild (co)homology dimensions")
    homology.add_argument("--lambda", dest="lam", required=True)
    homology.add_argument("--omega", required=True)
    homology.add_argument("--ext", action="store_true", help="cohomology instead of homology")
    homology.add_argument("--blocks", help="JSON list of diagonal block sizes of Omega Lambda^t")
    homology.add_argument("--phi3-sign", choices=["minus", "plus"], default=None)
    homology.set_defaults(handler=cmd_homology)

    suite = sub.add_parser("paper-suite", help="run the acceptance battery")
    suite.add_argument("--quick", action="store_true")
    suite.set_defaults(handler=cmd_paper_suite)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
    )
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except StepLimitExceeded as e:
        logger.error("Step limit exceeded: %s", e)
        return EXIT_LIMIT
    except INPUT_ERRORS as e:
        logger.error("Input error: %s", e)
        return EXIT_INPUT
    except ValueError as e:
        logger.error("Invalid argument: %s", e)
        return EXIT_INPUT
    except NcrwError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
