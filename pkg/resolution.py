"""The free bimodule resolution of A_o(n): maps, stage rule families, containment and kernels.

All stages share one alphabet:
    a[1,1] > ... > a[n,n] > e > e[n,n] > ... > e[1,1] > f[n,n] > ... > f[1,1] > f
Stage i has the domain of map i as urbild letters and the domain of map i-1 as bild letters.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from aon import AlgebraTerms, a_letter, aon_rule_list
from core import Alphabet, Letter, LetterKind, NcrwError, Polynomial
from modext import (
    BimoduleElement,
    ModuleClass,
    SplitSystem,
    graph_system,
    kernel_generators,
    split_system,
    verify_weak_complete,
    weak_overlaps,
)
from ordering import OrderingSpec, canonical, combined, kbweight, shape, syllable
from rewrite import NotDecreasing, RewriteSystem, Rule, VerifyReport, nf, orient_relation

logger = logging.getLogger(__name__)

STAGES = (1, 2, 3)


class StageMismatch(NcrwError):
    pass


class MatchFailure(NcrwError):
    def __init__(self, message: str, residue: Polynomial | None = None):
        self.residue = residue
        super().__init__(message)


E = Letter("e", (), LetterKind.MODULE)
F = Letter("f", (), LetterKind.MODULE)


def e_letter(p: int, q: int) -> Letter:
    return Letter("e", (p, q), LetterKind.MODULE)


def f_letter(p: int, q: int) -> Letter:
    return Letter("f", (p, q), LetterKind.MODULE)


def _pairs_desc(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n, 0, -1) for j in range(n, 0, -1)]


@lru_cache(maxsize=None)
def resolution_alphabet(n: int) -> Alphabet:
    letters = [a_letter(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    letters.append(E)
    letters += [e_letter(i, j) for i, j in _pairs_desc(n)]
    letters += [f_letter(i, j) for i, j in _pairs_desc(n)]
    letters.append(F)
    return Alphabet(letters)


@lru_cache(maxsize=None)
def algebra_system(n: int) -> RewriteSystem:
    """The A_o(n) rules over the resolution alphabet; module letters are inert."""
    alphabet = resolution_alphabet(n)
    return RewriteSystem(alphabet, canonical(alphabet), aon_rule_list(n, alphabet))


def phi_domain(n: int, i: int) -> list[Letter]:
    if i == 0:
        return [E]
    if i == 1:
        return [e_letter(p, q) for p in range(1, n + 1) for q in range(1, n + 1)]
    if i == 2:
        return [f_letter(p, q) for p in range(1, n + 1) for q in range(1, n + 1)]
    if i == 3:
        return [F]
    raise StageMismatch(f"no map with index {i}")


def stage_generators(n: int, stage: int) -> tuple[list[Letter], list[Letter]]:
    """(bild, urbild) letters of a stage."""
    if stage not in STAGES:
        raise StageMismatch(f"stage must be one of {STAGES}, got {stage}")
    return phi_domain(n, stage - 1), phi_domain(n, stage)


def _check_n(n: int, i: int, allow_small: bool) -> None:
    if n < 1:
        raise StageMismatch("n must be at least 1")
    if i >= 2 and n < 3 and not allow_small:
        raise StageMismatch(f"map {i} is only constructed for n >= 3 (got n={n})")


class ResolutionTerms(AlgebraTerms):
    """Module-letter shorthands on top of the algebra shorthands."""

    def E(self) -> Polynomial:
        return Polynomial.letter(self.alphabet, E)

    def F(self) -> Polynomial:
        return Polynomial.letter(self.alphabet, F)

    def e(self, p: int, q: int) -> Polynomial:
        return Polynomial.letter(self.alphabet, e_letter(p, q))

    def f(self, p: int, q: int) -> Polynomial:
        return Polynomial.letter(self.alphabet, f_letter(p, q))

    def span(self) -> range:
        return range(1, self.n + 1)

    def sandwich(self, c: int, skip: tuple[int, int] | None = None) -> Polynomial:
        """sum over (j, k) of a[j,c] f[j,k] a[k,c], optionally without one (j, k)."""
        return self.total(
            self.a(j, c) * self.f(j, k) * self.a(k, c)
            for j in self.span() for k in self.span() if (j, k) != skip
        )

    def trace_f(self) -> Polynomial:
        return self.total(self.f(i, i) for i in self.span())

    def Q(self) -> Polynomial:
        return self.total(self.sandwich(i) for i in range(3, self.n + 1)) - self.trace_f() - self.F()


def _terms(n: int) -> ResolutionTerms:
    return ResolutionTerms(n, resolution_alphabet(n))


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------

def phi_image(n: int, i: int, generator: Letter | str, allow_small: bool = False) -> Polynomial:
    _check_n(n, i, allow_small)
    t = _terms(n)
    letter = t.alphabet[t.alphabet.index(generator)] if isinstance(generator, str) else generator
    if letter not in phi_domain(n, i):
        raise StageMismatch(f"{letter.token} is not a generator of map {i}")
    if i == 0:
        return Polynomial.one(t.alphabet)
    if i == 1:
        p, q = letter.indices
        return t.a(p, q) * t.E() - t.E() * t.a(p, q)
    if i == 2:
        p, q = letter.indices
        return t.total(t.a(p, k) * t.e(q, k) + t.e(p, k) * t.a(q, k) for k in t.span())
    return t.trace_f() - t.total(t.sandwich(k) for k in t.span())


def substitute_phi(p: Polynomial, n: int, i: int, sign: int = 1, allow_small: bool = False) -> Polynomial:
    """Replace every generator of map i in p by sign times its image."""
    alphabet = resolution_alphabet(n)
    images = {alphabet.index(g): phi_image(n, i, g, allow_small).scale(sign) for g in phi_domain(n, i)}
    return p.substitute(images)


@dataclass
class ComposeResult:
    ok: bool
    witness: tuple[str, Polynomial] | None = None


def compose_zero(n: int, i: int, allow_small: bool = False) -> ComposeResult:
    """Map i after map i+1 vanishes on every generator, modulo the algebra relations."""
    if i not in (0, 1, 2):
        raise StageMismatch(f"composition index must be 0, 1 or 2, got {i}")
    _check_n(n, i + 1, allow_small)
    algebra = algebra_system(n)
    for g in phi_domain(n, i + 1):
        image = phi_image(n, i + 1, g, allow_small)
        residue = nf(substitute_phi(image, n, i, allow_small=allow_small), algebra)
        if residue:
            logger.warning("map %d after map %d is nonzero on %s", i, i + 1, g.token)
            return ComposeResult(False, (g.token, residue))
    return ComposeResult(True)


# ---------------------------------------------------------------------------
# Stage systems
# ---------------------------------------------------------------------------

def stage_ordering(n: int, stage: int) -> OrderingSpec:
    """Weight (bild letters 3, everything else 1), then separator shape, then syllables."""
    alphabet = resolution_alphabet(n)
    bild, urbild = stage_generators(n, stage)
    separators = [*bild, *urbild]
    weights = {letter: 3 for letter in bild}
    return combined(kbweight(alphabet, weights), shape(alphabet, separators), syllable(alphabet, separators))


def _families(n: int, stage: int) -> list[tuple[str, list[Letter], Polynomial]]:
    """(tag, expected lhs, lhs - rhs) for every module rule of a stage."""
    t = _terms(n)
    rng = t.span()
    a, e, f = a_letter, e_letter, f_letter
    out: list[tuple[str, list[Letter], Polynomial]] = []
    if stage == 1:
        for p in rng:
            for q in rng:
                out.append((f"V~[{p},{q}]", [a(p, q), E], t.a(p, q) * t.E() - t.E() * t.a(p, q) - t.e(p, q)))
        for p in rng:
            for q in rng:
                diff = t.total(t.a(p, i) * t.e(q, i) + t.e(p, i) * t.a(q, i) for i in rng)
                out.append((f"K~[{p},{q}]", [a(p, n), e(q, n)], diff))
        for p in rng:
            for q in rng:
                diff = t.total(t.a(i, p) * t.e(i, q) + t.e(i, p) * t.a(i, q) for i in rng)
                out.append((f"K~'[{p},{q}]", [a(n, p), e(n, q)], diff))
    elif stage == 2:
        for p in rng:
            for q in rng:
                diff = t.total(t.a(p, i) * t.e(q, i) + t.e(p, i) * t.a(q, i) for i in rng) - t.f(p, q)
                out.append((f"V~[{p},{q}]", [a(p, n), e(q, n)], diff))
        for p in rng:
            for q in rng:
                diff = t.total(t.a(j, p) * t.e(j, q) + t.e(j, p) * t.a(j, q) for j in rng) - t.total(
                    t.a(j, p) * t.f(j, k) * t.a(k, q) for j in rng for k in rng
                )
                out.append((f"W~[{p},{q}]", [a(n, p), e(n, q)], diff))
        diff = t.total(t.sandwich(i) for i in rng) - t.trace_f()
        out.append(("K~", [a(n, 1), f(n, n), a(n, 1)], diff))
    else:
        Q = t.Q()
        corner = (n, n)
        lhs_v = t.a(n, 1) * t.f(n, n) * t.a(n, 1)
        out.append(("V~", [a(n, 1), f(n, n), a(n, 1)], lhs_v + Q + t.sandwich(2) + t.sandwich(1, skip=corner)))
        for p in rng:
            lhs = t.a(p, 1) * t.a(n, 2) * t.f(n, n) * t.a(n, 2)
            left = t.total(t.Z(p, j) * t.f(j, k) * t.a(k, 1) for j in rng for k in rng)
            diff = lhs + left + t.a(p, 1) * (Q + t.sandwich(2, skip=corner))
            out.append((f"V~[{p}]", [a(p, 1), a(n, 2), f(n, n), a(n, 2)], diff))
        for p in rng:
            lhs = t.a(n, 1) * t.f(n, n) * t.a(n, 2) * t.a(p, 2)
            tail = t.total(t.a(n, l) * t.a(p, l) for l in range(3, n + 1)) - t.const(1 if n == p else 0)
            middle = t.total(
                t.a(j, 1) * t.f(j, k) * t.Z(k, p) for j in rng for k in rng if (j, k) != corner
            )
            diff = lhs + t.a(n, 1) * t.f(n, n) * tail - middle - (Q + t.sandwich(2)) * t.a(p, 1)
            out.append((f"W~[{p}]", [a(n, 1), f(n, n), a(n, 2), a(p, 2)], diff))
    return out


@dataclass
class ResolutionStage:
    n: int
    stage: int
    bild: tuple[int, ...]
    urbild: tuple[int, ...]
    system: SplitSystem
    # the stage rules realize the graph of graph_sign * map
    graph_sign: int
    families: dict[str, list[int]] = field(default_factory=dict)

    @property
    def alphabet(self) -> Alphabet:
        return self.system.alphabet

    def rule(self, tag: str) -> Rule:
        return self.system.base.rules[self.system.base.tags()[tag]]

    def difference(self, tag: str) -> Polynomial:
        return self.rule(tag).difference()


@lru_cache(maxsize=None)
def stage_system(n: int, stage: int, allow_small: bool = False) -> ResolutionStage:
    _check_n(n, stage, allow_small)
    alphabet = resolution_alphabet(n)
    ordering = stage_ordering(n, stage)
    module_rules: list[Rule] = []
    for tag, lhs_letters, diff in _families(n, stage):
        rule = orient_relation(diff, ordering, tag)
        expected = alphabet.word(lhs_letters)
        if rule.lhs != expected:
            raise NotDecreasing(
                f"{tag}: expected lhs {alphabet.render_word(expected)}, leading word is {alphabet.render_word(rule.lhs)}"
            )
        module_rules.append(rule)
    base = RewriteSystem(alphabet, ordering, [*aon_rule_list(n, alphabet), *module_rules])
    bild, urbild = stage_generators(n, stage)
    classes = {alphabet.index(g): ModuleClass.BILD for g in bild}
    classes.update({alphabet.index(g): ModuleClass.URBILD for g in urbild})
    system = split_system(base, classes)
    families: dict[str, list[int]] = {}
    for idx, rule in enumerate(base.rules):
        families.setdefault(rule.family, []).append(idx)
    logger.info(
        "Stage %d for n=%d: %d algebra, %d bild, %d urbild rules",
        stage, n, len(system.r_A), len(system.r_e), len(system.r_f),
    )
    return ResolutionStage(
        n, stage,
        tuple(alphabet.index(g) for g in bild),
        tuple(alphabet.index(g) for g in urbild),
        system,
        graph_sign=-1 if stage == 3 else 1,
        families=families,
    )


def rule_in_graph(stage: ResolutionStage, rule: Rule) -> Polynomial:
    """Residue after pushing urbild letters through the stage map; zero when the rule lies in the graph."""
    images = substitute_phi(rule.difference(), stage.n, stage.stage, stage.graph_sign, allow_small=True)
    return nf(images, algebra_system(stage.n))


def graph_cross_check(n: int, stage: int, allow_small: bool = False) -> bool:
    """Orienting the graph generators reproduces the stage's V~ rules."""
    st = stage_system(n, stage, allow_small)
    alphabet = st.alphabet
    ordering = stage_ordering(n, stage)
    r_A = RewriteSystem(alphabet, ordering, aon_rule_list(n, alphabet))
    images = [
        (alphabet.index(g), phi_image(n, stage, g, allow_small).scale(st.graph_sign))
        for g in phi_domain(n, stage)
    ]
    graph = graph_system(images, r_A, ordering, st.system.classes)
    produced = {(r.lhs, r.rhs) for r in graph.rules_of(graph.r_e)}
    expected = {
        (r.lhs, r.rhs) for r in st.system.rules_of(st.system.r_e)
        if r.tag == "V~" or r.tag.startswith("V~[") and r.tag.count(",") == 1
    }
    return produced == expected


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def _pair(first: str, second: str) -> str:
    return "*".join(sorted((first, second)))


EXPECTED_CONFLICTS: dict[int, frozenset[str]] = {
    1: frozenset(_pair(x, "V~pq") for x in ("Z~pq", "S~pq", "Z~pqr", "S~pqr")),
    2: frozenset([
        _pair("S~pq", "V~pq"), _pair("S~pqr", "V~pq"),
        _pair("Z~pq", "W~pq"), _pair("Z~pqr", "W~pq"),
        _pair("V~pq", "W~pq"),
    ]),
    3: frozenset([
        _pair("Z~pq", "V~"), _pair("Z~pqr", "V~"),
        _pair("Z~pq", "V~p"), _pair("S~pq", "V~p"), _pair("S~pqr", "V~p"),
        _pair("Z~pq", "W~p"), _pair("S~pq", "W~p"), _pair("S~pqr", "W~p"),
    ]),
}


@dataclass
class StageReport:
    n: int
    stage: int
    report: VerifyReport
    families: dict[str, int]
    missing: list[str]
    unexpected: list[str]

    @property
    def complete(self) -> bool:
        return self.report.complete


def verify_stage(
    n: int,
    stage: int,
    step_limit: int | None = None,
    parallel: int | None = None,
    allow_small: bool = False,
) -> StageReport:
    st = stage_system(n, stage, allow_small)
    system = st.system
    rules = system.base.rules
    bild_rules = set(system.r_e)
    families = Counter(
        _pair(rules[o.rule_a].family, rules[o.rule_b].family)
        for o in weak_overlaps(system)
        if o.rule_a in bild_rules or o.rule_b in bild_rules
    )
    report = verify_weak_complete(system, step_limit, parallel)
    expected = EXPECTED_CONFLICTS[stage]
    result = StageReport(
        n, stage, report, dict(sorted(families.items())),
        missing=sorted(expected - set(families)),
        unexpected=sorted(set(families) - expected),
    )
    if result.unexpected:
        logger.info("Stage %d: overlap families outside the conflict table: %s", stage, result.unexpected)
    return result


# ---------------------------------------------------------------------------
# Containment identities
# ---------------------------------------------------------------------------

@dataclass
class Identity:
    label: str
    combination: Polynomial
    target: Polynomial
    target_tag: str = ""
    sign: int = 1


@dataclass
class ContainmentResult:
    ok: bool
    checked: int
    failures: list[str] = field(default_factory=list)


def containment_identities(n: int, stage: int, allow_small: bool = False) -> list[Identity]:
    """Matrix manipulations that express kernel and extra rules through the graph rules."""
    st = stage_system(n, stage, allow_small)
    t = _terms(n)
    rng = t.span()
    d = st.difference
    out: list[Identity] = []
    if stage == 1:
        # G = E - (AE - EA) entrywise; G A^t + A G^t is the kernel matrix
        G = {(p, q): -d(f"V~[{p},{q}]") for p in rng for q in rng}
        for p in rng:
            for q in rng:
                comb = t.total(G[p, i] * t.a(q, i) + t.a(p, i) * G[q, i] for i in rng)
                out.append(Identity(f"GA^t+AG^t[{p},{q}]", comb, d(f"K~[{p},{q}]"), f"K~[{p},{q}]"))
        for p in rng:
            for q in rng:
                comb = t.total(t.a(j, p) * d(f"K~[{j},{k}]") * t.a(k, q) for j in rng for k in rng)
                out.append(Identity(f"A^tKA[{p},{q}]", comb, d(f"K~'[{p},{q}]"), f"K~'[{p},{q}]"))
    elif stage == 2:
        for p in rng:
            for q in rng:
                comb = t.total(t.a(j, p) * d(f"V~[{j},{k}]") * t.a(k, q) for j in rng for k in rng)
                out.append(Identity(f"A^tVA[{p},{q}]", comb, d(f"W~[{p},{q}]"), f"W~[{p},{q}]"))
        comb = t.total(d(f"V~[{p},{p}]") - d(f"W~[{p},{p}]") for p in rng)
        out.append(Identity("trace", comb, d("K~"), "K~"))
    else:
        for p in rng:
            out.append(Identity(f"a[{p},1]*V", t.a(p, 1) * d("V~"), d(f"V~[{p}]"), f"V~[{p}]"))
            out.append(Identity(f"V*a[{p},1]", d("V~") * t.a(p, 1), d(f"W~[{p}]"), f"W~[{p}]", sign=-1))
    return out


def containment_check(n: int, stage: int, allow_small: bool = False) -> ContainmentResult:
    algebra = algebra_system(n)
    identities = containment_identities(n, stage, allow_small)
    failures = [
        ident.label for ident in identities
        if nf(ident.combination - ident.target.scale(ident.sign), algebra)
    ]
    return ContainmentResult(not failures, len(identities), failures)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

@dataclass
class KernelMatch:
    tag: str
    # generator of the next map, or None when matched through a span identity
    generator: str | None
    sign: int


@dataclass
class KernelResult:
    generators: list[BimoduleElement]
    matches: list[KernelMatch]


def stage_kernel(
    n: int,
    stage: int,
    step_limit: int | None = None,
    report: VerifyReport | None = None,
    allow_small: bool = False,
) -> KernelResult:
    st = stage_system(n, stage, allow_small)
    system = st.system
    if report is None:
        report = verify_weak_complete(system, step_limit)
    generators = kernel_generators(system, report, step_limit)
    if not system.r_f:
        return KernelResult(generators, [])

    algebra = algebra_system(n)
    images: dict[tuple, tuple[str, int]] = {}
    for g in phi_domain(n, stage + 1):
        image = nf(phi_image(n, stage + 1, g, allow_small=True), algebra)
        images[frozenset(image.terms.items())] = (g.token, 1)
        images[frozenset((-image).terms.items())] = (g.token, -1)

    spanned = set()
    if stage == 1:
        check = containment_check(n, 1, allow_small)
        spanned = {
            ident.target_tag for ident in containment_identities(n, 1, allow_small)
            if ident.target_tag.startswith("K~'") and ident.label not in check.failures
        }

    matches: list[KernelMatch] = []
    for idx in system.r_f:
        rule = system.base.rules[idx]
        residue = nf(rule.difference(), algebra)
        hit = images.get(frozenset(residue.terms.items()))
        if hit is not None:
            matches.append(KernelMatch(rule.tag, hit[0], hit[1]))
        elif rule.tag in spanned:
            matches.append(KernelMatch(rule.tag, None, 1))
        else:
            raise MatchFailure(f"kernel rule {rule.tag} matches no image of map {stage + 1}", residue)
    return KernelResult(generators, matches)
