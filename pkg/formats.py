"""JSON codecs for alphabets, polynomials, orderings, systems, ARS, automata, matrices and reports.

Files are written atomically; a malformed file raises FormatError naming the path.
"""
from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping

from ars import ARSReport, FiniteARS
from automaton import DFA
from core import Alphabet, FormatError, Letter, LetterKind, Polynomial
from homology import RationalMatrix
from modext import BimoduleElement, ModuleClass
from ordering import OrderingSpec, Variant, combined, kbweight, shape, syllable
from rewrite import CompletionResult, OverlapResult, ReductionTrace, RewriteSystem, Rule, VerifyReport
from tokens import format_rational, parse_letter_token, parse_rational

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------

def save_json(path: str | Path, data: Any) -> None:
    # Serialize next to the target, then rename over it: readers see the old or the new file.
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(json.dumps(data, indent=2) + "\n")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def load_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except (json.JSONDecodeError, OSError, UnicodeDecodeError) as e:
        logger.warning("Failed to load %s: %s", path, e)
        raise FormatError(f"{path}: {e}") from e


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2)


def _fail(what: str, exc: Exception) -> FormatError:
    return FormatError(f"malformed {what}: {exc}")


# ---------------------------------------------------------------------------
# Alphabets and polynomials
# ---------------------------------------------------------------------------

def alphabet_to_json(alphabet: Alphabet, classes: Mapping[int, str] | None = None) -> list:
    out: list = []
    for pos, letter in enumerate(alphabet):
        if letter.kind == LetterKind.MODULE or (classes and pos in classes):
            entry = {"letter": letter.token, "kind": LetterKind.MODULE}
            if classes and pos in classes:
                entry["class"] = classes[pos]
            out.append(entry)
        else:
            out.append(letter.token)
    return out


def alphabet_from_json(data: list) -> tuple[Alphabet, dict[int, str]]:
    """Letters greatest first; returns the alphabet and the module class of each classified letter."""
    try:
        letters: list[Letter] = []
        classes: dict[int, str] = {}
        for pos, entry in enumerate(data):
            if isinstance(entry, str):
                letters.append(Letter(*parse_letter_token(entry)))
                continue
            name, indices = parse_letter_token(entry["letter"])
            kind = entry.get("kind", LetterKind.ALGEBRA)
            if kind not in (LetterKind.ALGEBRA, LetterKind.MODULE):
                raise ValueError(f"unknown letter kind {kind!r}")
            letters.append(Letter(name, indices, kind))
            if "class" in entry:
                if entry["class"] not in (ModuleClass.URBILD, ModuleClass.BILD):
                    raise ValueError(f"unknown module class {entry['class']!r}")
                classes[pos] = entry["class"]
        return Alphabet(letters), classes
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("alphabet", e) from e


def polynomial_to_json(p: Polynomial) -> list[dict]:
    return [
        {"c": format_rational(c), "w": p.alphabet.tokens(w)}
        for w, c in sorted(p.terms.items(), key=lambda item: (-len(item[0]), item[0]))
    ]


def polynomial_from_json(alphabet: Alphabet, data: list | str) -> Polynomial:
    """Term list, or the text form `a[1,1]a[2,1] - 3/5*a[1,2] + 1`."""
    if isinstance(data, str):
        return Polynomial.parse(alphabet, data)
    try:
        return Polynomial.from_terms(
            alphabet, ((parse_rational(term["c"]), alphabet.word(term["w"])) for term in data)
        )
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("polynomial", e) from e


# ---------------------------------------------------------------------------
# Orderings
# ---------------------------------------------------------------------------

def ordering_to_json(ordering: OrderingSpec) -> dict:
    alphabet = ordering.alphabet
    v = ordering.variant
    if v == Variant.KBWEIGHT:
        return {"type": v, "weights": {alphabet[i].token: w for i, w in enumerate(ordering.weights)}}
    if v in (Variant.SYLLABLE, Variant.SHAPE):
        return {"type": v, "separators": [alphabet[s].token for s in sorted(ordering.separators)]}
    if v == Variant.COMBINED:
        return {"type": v, "parts": [ordering_to_json(p) for p in ordering.parts]}
    return {"type": v}


def ordering_from_json(alphabet: Alphabet, data: Mapping | None) -> OrderingSpec:
    if data is None:
        return OrderingSpec(Variant.CANONICAL, alphabet)
    try:
        v = data["type"]
        if v == Variant.KBWEIGHT:
            weights = data["weights"]
            if isinstance(weights, Mapping):
                return kbweight(alphabet, {k: int(w) for k, w in weights.items()}, int(data.get("default", 1)))
            return kbweight(alphabet, [int(w) for w in weights])
        if v == Variant.SYLLABLE:
            return syllable(alphabet, data["separators"])
        if v == Variant.SHAPE:
            return shape(alphabet, data["separators"])
        if v == Variant.COMBINED:
            return combined(*(ordering_from_json(alphabet, part) for part in data["parts"]))
        return OrderingSpec(v, alphabet)
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("ordering", e) from e


# ---------------------------------------------------------------------------
# Systems
# ---------------------------------------------------------------------------

def rule_to_json(rule: Rule) -> dict:
    entry = {"lhs": rule.alphabet.tokens(rule.lhs), "rhs": polynomial_to_json(rule.rhs)}
    if rule.tag:
        entry = {"tag": rule.tag, **entry}
    return entry


def system_to_json(system: RewriteSystem, classes: Mapping[int, str] | None = None) -> dict:
    return {
        "alphabet": alphabet_to_json(system.alphabet, classes),
        "ordering": ordering_to_json(system.ordering),
        "rules": [rule_to_json(r) for r in system.rules],
    }


def system_from_json(data: Mapping, *, check: bool = True) -> tuple[RewriteSystem, dict[int, str]]:
    try:
        alphabet, classes = alphabet_from_json(data["alphabet"])
        ordering = ordering_from_json(alphabet, data.get("ordering"))
        rules = [
            Rule(alphabet.word(r["lhs"]), polynomial_from_json(alphabet, r.get("rhs", [])), r.get("tag", ""))
            for r in data.get("rules", [])
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("system", e) from e
    return RewriteSystem(alphabet, ordering, rules, check=check), classes


def bimodule_to_json(element: BimoduleElement) -> list[dict]:
    alphabet = element.alphabet
    return [
        {
            "slot": alphabet[slot].token,
            "c": format_rational(c),
            "left": alphabet.tokens(left),
            "right": alphabet.tokens(right),
        }
        for (slot, left, right), c in sorted(element.terms.items())
    ]


def bimodule_from_json(alphabet: Alphabet, data: list) -> BimoduleElement:
    try:
        return BimoduleElement(alphabet, {
            (alphabet.index(t["slot"]), alphabet.word(t["left"]), alphabet.word(t["right"])): parse_rational(t["c"])
            for t in data
        })
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("bimodule element", e) from e


def phi_from_json(alphabet: Alphabet, data: Mapping) -> list[tuple[int, Polynomial]]:
    """`{"images": {"e[1,1]": <polynomial>, ...}}` into (generator position, image) pairs."""
    try:
        return [
            (alphabet.index(gen), polynomial_from_json(alphabet, image))
            for gen, image in data["images"].items()
        ]
    except (KeyError, TypeError, AttributeError) as e:
        raise _fail("map", e) from e


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _overlap_result_to_json(result: OverlapResult, system: RewriteSystem) -> dict:
    o = result.overlap
    rules = system.rules
    entry = {
        "word": system.alphabet.tokens(o.word),
        "rule_a": rules[o.rule_a].tag or o.rule_a,
        "rule_b": rules[o.rule_b].tag or o.rule_b,
        "kind": o.kind,
        "status": result.status,
    }
    if result.nf_a is not None:
        entry["nf_a"] = polynomial_to_json(result.nf_a)
        entry["nf_b"] = polynomial_to_json(result.nf_b)
    return entry


def verify_report_to_json(report: VerifyReport, system: RewriteSystem) -> dict:
    return {
        "complete": report.complete,
        "overlaps": report.overlaps_total,
        "joinable": report.joinable,
        "modulo_kernel": report.modulo_kernel,
        "failures": [_overlap_result_to_json(f, system) for f in report.failures],
    }


def trace_to_json(trace: ReductionTrace, system: RewriteSystem) -> list[dict]:
    return [
        {
            "rule": system.rules[step.rule].tag or step.rule,
            "position": step.position,
            "word": system.alphabet.tokens(step.word),
        }
        for step in trace.steps
    ]


def completion_to_json(result: CompletionResult) -> dict:
    out = {
        "status": result.status,
        "rounds": result.rounds,
        "rules": len(result.system),
        "system": system_to_json(result.system),
        "pending": len(result.pending),
    }
    if result.offending is not None:
        out["offending"] = polynomial_to_json(result.offending)
    return out


def ars_from_json(data: Mapping) -> FiniteARS:
    try:
        return FiniteARS.build(data.get("elements", []), [tuple(edge) for edge in data["edges"]])
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("ARS", e) from e


def ars_to_json(ars: FiniteARS) -> dict:
    return {"elements": list(ars.elements), "edges": sorted([list(e) for e in ars.edges], key=repr)}


def ars_report_to_json(report: ARSReport) -> dict:
    def listed(value):
        return list(value) if value is not None else None

    return {
        "noetherian": report.noetherian,
        "locally_confluent": report.locally_confluent,
        "totally_confluent": report.totally_confluent,
        "church_rosser": report.church_rosser,
        "unique_normal_forms": report.unique_normal_forms,
        "normal_forms": {str(k): sorted(map(str, v)) for k, v in report.normal_forms.items()},
        "local_witness": listed(report.local_witness),
        "total_witness": listed(report.total_witness),
        "church_rosser_witness": listed(report.church_rosser_witness),
        "cycle": list(report.cycle),
    }


# ---------------------------------------------------------------------------
# Automata and matrices
# ---------------------------------------------------------------------------

def dfa_to_json(dfa: DFA) -> dict:
    tokens = [letter.token for letter in dfa.alphabet]
    return {
        "alphabet": alphabet_to_json(dfa.alphabet),
        "states": dfa.states,
        "start": 0,
        "dead": dfa.dead,
        "transitions": {
            str(state): {tokens[letter]: target for letter, target in enumerate(row)}
            for state, row in enumerate(dfa.transitions)
        },
    }


def dfa_from_json(data: Mapping) -> DFA:
    try:
        alphabet, _ = alphabet_from_json(data["alphabet"])
        states = int(data["states"])
        dead = int(data["dead"])
        table = data["transitions"]
        transitions = []
        for state in range(states):
            row = table[str(state)]
            transitions.append(tuple(int(row[letter.token]) for letter in alphabet))
        if not 0 <= dead < states or any(not 0 <= t < states for row in transitions for t in row):
            raise ValueError("state number out of range")
        return DFA(alphabet, tuple(transitions), dead)
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("automaton", e) from e


def matrix_to_json(m: RationalMatrix) -> dict:
    return {"rows": [[format_rational(x) for x in row] for row in m.entries]}


def matrix_from_json(data: Mapping) -> RationalMatrix:
    try:
        return RationalMatrix.from_rows(data["rows"])
    except (KeyError, TypeError, ValueError) as e:
        raise _fail("matrix", e) from e


