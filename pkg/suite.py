"""The reproduction battery behind `ncrw paper-suite`: ten checks, each returning pass/fail with a detail line."""
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

from aon import aon_rules, aon_verify, basis_words
from ars import analyze_ars, looping_example, random_acyclic
from automaton import accepted_words, build_dfa, count_words, is_irreducible
from core import Alphabet, Letter, NcrwError, Polynomial, Word
from homology import (
    RationalMatrix,
    charpoly_identity_check,
    ext_dims,
    hh_dims,
    id_plus_d_rank,
    intertwine_check,
    k_values,
    random_invertible,
    random_jordan,
    random_matrix,
    random_orthogonal,
)
from ordering import canonical
from resolution import compose_zero, containment_check, graph_cross_check, stage_kernel, verify_stage
from rewrite import RewriteSystem, Rule, StepLimitExceeded, exhaustive_normal_forms, knuth_bendix, nf

logger = logging.getLogger(__name__)

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail, "seconds": round(self.seconds, 3)}


# ---------------------------------------------------------------------------
# Word problem example
# ---------------------------------------------------------------------------

def word_problem_system() -> RewriteSystem:
    """aba -> 1 and bb -> 1 over a < b."""
    alphabet = Alphabet([Letter("b"), Letter("a")])
    one = Polynomial.one(alphabet)
    rules = [Rule(alphabet.parse_word("aba"), one, "aba"), Rule(alphabet.parse_word("bb"), one, "bb")]
    return RewriteSystem(alphabet, canonical(alphabet), rules)


def _relation_moves(word: Word, relations: list[tuple[Word, Word]], max_len: int):
    for left, right in relations:
        for src, dst in ((left, right), (right, left)):
            size = len(src)
            for i in range(len(word) - size + 1):
                if word[i:i + size] == src:
                    nxt = word[:i] + dst + word[i + size:]
                    if len(nxt) <= max_len:
                        yield nxt


def bfs_connected(w1: Word, w2: Word, relations: list[tuple[Word, Word]], max_len: int, budget: int = 20_000) -> bool:
    """Search from both ends through relation applications, words capped at max_len.

    Grows the smaller frontier each round and stops once the two searches meet.
    """
    if w1 == w2:
        return True
    seen = [{w1}, {w2}]
    frontier = [{w1}, {w2}]
    while frontier[0] and frontier[1] and len(seen[0]) + len(seen[1]) < budget:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        grown = set()
        for word in frontier[side]:
            for nxt in _relation_moves(word, relations, max_len):
                if nxt in seen[1 - side]:
                    return True
                if nxt not in seen[side]:
                    seen[side].add(nxt)
                    grown.add(nxt)
        frontier[side] = grown
    return False


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def check_diamond(quick: bool) -> tuple[bool, str]:
    report = analyze_ars(looping_example())
    example_ok = report.locally_confluent and not report.totally_confluent and not report.noetherian
    rng = random.Random(SEED)
    disagreements = 0
    trials = 50 if quick else 200
    for _ in range(trials):
        r = analyze_ars(random_acyclic(rng, rng.randint(1, 30)))
        props = {r.locally_confluent, r.totally_confluent, r.church_rosser, r.unique_normal_forms}
        if len(props) != 1:
            disagreements += 1
    return example_ok and not disagreements, f"looping example ok={example_ok}, {disagreements}/{trials} random disagreements"


def check_aon(quick: bool) -> tuple[bool, str]:
    sizes = (1, 2, 3) if quick else (1, 2, 3, 4)
    parts = []
    ok = True
    for n in sizes:
        report = aon_verify(n)
        ok = ok and report.complete
        parts.append(f"n={n}: {report.overlaps.overlaps_total} overlaps, complete={report.complete}")
    return ok, "; ".join(parts)


def check_word_problem(quick: bool) -> tuple[bool, str]:
    system = word_problem_system()
    result = knuth_bendix(system)
    if not result.completed:
        return False, f"completion stopped: {result.status}"
    done = result.system
    alphabet = done.alphabet
    a2 = nf(Polynomial.monomial(alphabet, alphabet.parse_word("aa")), done)
    b = nf(Polynomial.monomial(alphabet, alphabet.parse_word("b")), done)
    rng = random.Random(SEED)
    relations = [(alphabet.parse_word("aba"), ()), (alphabet.parse_word("bb"), ())]
    wrong = 0
    pairs = 100 if quick else 500
    for _ in range(pairs):
        # words up to 5 letters reach their normal form through words of at most 10
        w1 = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 5)))
        w2 = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 5)))
        same = nf(Polynomial.monomial(alphabet, w1), done) == nf(Polynomial.monomial(alphabet, w2), done)
        if same != bfs_connected(w1, w2, relations, max_len=10):
            wrong += 1
    ok = a2 == b and not wrong
    return ok, f"{len(done)} rules after {result.rounds} rounds, NF(aa)={a2.render()}, {wrong} wrong of {pairs}"


def _factor_scan(word: Word, forbidden: list[Word]) -> bool:
    return not any(
        word[i:i + len(f)] == f for f in forbidden for i in range(len(word) - len(f) + 1)
    )


def check_basis(quick: bool) -> tuple[bool, str]:
    system = aon_rules(2)
    levels = basis_words(2, 3, system)
    counts = [len(levels[k]) for k in (1, 2, 3)]
    forbidden = [rule.lhs for rule in system.rules]
    dfa = build_dfa(forbidden, system.alphabet)
    max_len = 4 if quick else 6
    size = len(system.alphabet)
    mismatches = 0
    for length in range(max_len + 1):
        brute = 0
        for word in product(range(size), repeat=length):
            scanned = _factor_scan(word, forbidden)
            brute += scanned
            if scanned != is_irreducible(dfa, word):
                mismatches += 1
        if brute != count_words(dfa, length):
            mismatches += 1
    if set(accepted_words(dfa, 3)) != set(levels[3]):
        mismatches += 1
    ok = counts == [4, 9, 16] and not mismatches
    return ok, f"counts {counts}, {dfa.states} DFA states, {mismatches} mismatches up to length {max_len}"


def check_resolution(quick: bool) -> tuple[bool, str]:
    n = 3
    parts = []
    ok = True
    for i in (0, 1, 2):
        composed = compose_zero(n, i)
        ok = ok and composed.ok
        parts.append(f"compose{i}{i + 1}={composed.ok}")
    for stage in (1, 2, 3):
        contained = containment_check(n, stage)
        crossed = graph_cross_check(n, stage)
        ok = ok and contained.ok and crossed
        parts.append(f"stage{stage}: containment {contained.checked - len(contained.failures)}/{contained.checked}")
        if quick:
            continue
        report = verify_stage(n, stage)
        ok = ok and report.complete and not report.missing
        parts.append(f"stage{stage}: complete={report.complete}")
        if stage < 3:
            kernel = stage_kernel(n, stage, report=report.report)
            parts.append(f"stage{stage}: {len(kernel.matches)} kernel rules matched")
    return ok, "; ".join(parts)


ROTATION = RationalMatrix.rotation(Fraction(3, 5), Fraction(4, 5))

# (Omega, expected dims, expected ranks) with Lambda = 1 at n = 3
HOMOLOGY_TABLE = (
    (RationalMatrix.identity(3), (1, 3, 3, 1), (0, 6, 0)),
    (-RationalMatrix.identity(3), (0, 5, 5, 0), (1, 3, 1)),
    (RationalMatrix.block_diagonal([ROTATION, RationalMatrix.diagonal([-1])]), (0, 1, 1, 0), (1, 7, 1)),
    (RationalMatrix.block_diagonal([ROTATION, RationalMatrix.diagonal([1])]), (0, 0, 0, 0), (1, 8, 1)),
)


def check_homology_table(quick: bool) -> tuple[bool, str]:
    ident = RationalMatrix.identity(3)
    wrong = []
    for row, (omega, hh, ranks) in enumerate(HOMOLOGY_TABLE):
        dims = hh_dims(ident, omega)
        if dims.hh != hh or dims.ranks != ranks:
            wrong.append(f"row {row + 1}: {dims.hh} ranks {dims.ranks}")
    for n in (() if quick else (4, 5)):
        ident = RationalMatrix.identity(n)
        if hh_dims(ident, ident).hh != (1, (n * n - n) // 2, (n * n - n) // 2, 1):
            wrong.append(f"n={n}: Omega = 1")
        if hh_dims(ident, -ident).hh != (0, (n * n + n - 2) // 2, (n * n + n - 2) // 2, 0):
            wrong.append(f"n={n}: Omega = -1")
    k_minus, k_lambda = k_values(HOMOLOGY_TABLE[2][0], [2, 1])
    detail = "; ".join(wrong) or f"{len(HOMOLOGY_TABLE)} rows match, k-values of row 3: ({k_minus}, {k_lambda})"
    return not wrong, detail


def check_two_by_two(quick: bool) -> tuple[bool, str]:
    ranks = (
        id_plus_d_rank(ROTATION),
        id_plus_d_rank(RationalMatrix.rotation(-1, 0)),
        id_plus_d_rank(RationalMatrix.reflection(-1, 0)),
    )
    return ranks == (3, 1, 3), f"ranks {ranks}"


def check_spectral(quick: bool) -> tuple[bool, str]:
    rng = random.Random(SEED)
    trials = 5 if quick else 20
    charpoly_fail = sum(not charpoly_identity_check(random_jordan(rng.randint(2, 4), rng)) for _ in range(trials))
    intertwine_fail = 0
    for _ in range(trials):
        x = random_invertible(3, rng)
        m = random_matrix(3, rng)
        intertwine_fail += not intertwine_check(m, x.inverse() @ m @ x, x)
    return not charpoly_fail and not intertwine_fail, f"{charpoly_fail} charpoly and {intertwine_fail} intertwining failures of {trials}"


def check_ext(quick: bool) -> tuple[bool, str]:
    rng = random.Random(SEED)
    trials = 5 if quick else 20
    failures = 0
    for _ in range(trials):
        n = rng.randint(3, 4)
        lam, omega = random_orthogonal(n, rng), random_orthogonal(n, rng)
        if ext_dims(lam, omega) != hh_dims(lam, omega):
            failures += 1
    return not failures, f"{failures} of {trials} random pairs differ"


def check_confluence(quick: bool) -> tuple[bool, str]:
    system = aon_rules(2)
    rng = random.Random(SEED)
    trials = 50 if quick else 200
    size = len(system.alphabet)
    bad = over_budget = 0
    for _ in range(trials):
        word = tuple(rng.randrange(size) for _ in range(rng.randint(0, 6)))
        p = Polynomial.monomial(system.alphabet, word)
        try:
            forms = exhaustive_normal_forms(p, system, limit=200_000)
        except StepLimitExceeded:
            over_budget += 1
            continue
        if forms != {nf(p, system)}:
            bad += 1
    detail = f"{bad} of {trials} words without a unique normal form"
    if over_budget:
        detail += f", {over_budget} over the search budget"
    return not bad and not over_budget, detail


CHECKS: list[tuple[str, Callable[[bool], tuple[bool, str]]]] = [
    ("diamond lemma", check_diamond),
    ("A_o(n) completeness", check_aon),
    ("word problem", check_word_problem),
    ("basis and automaton", check_basis),
    ("resolution n=3", check_resolution),
    ("homology table", check_homology_table),
    ("2x2 ranks", check_two_by_two),
    ("spectral identities", check_spectral),
    ("Ext equals Tor", check_ext),
    ("confluence as property", check_confluence),
]


def run_suite(quick: bool = False) -> list[CheckResult]:
    results = []
    for name, check in CHECKS:
        started = time.perf_counter()
        try:
            ok, detail = check(quick)
        except StepLimitExceeded as e:
            ok, detail = False, f"step limit: {e}"
        except NcrwError as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        results.append(CheckResult(name, ok, detail, time.perf_counter() - started))
        logger.info("%s: %s (%s)", name, "PASS" if ok else "FAIL", detail)
    return results
