"""Rewriting with module generators: degrees, split systems, weak completeness, kernels."""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from core import Alphabet, Letter, LetterKind, NcrwError, Polynomial, Word
from ordering import OrderingSpec
from rewrite import (
    Overlap,
    OverlapResult,
    Resolution,
    RewriteSystem,
    Rule,
    VerifyReport,
    minimal_overlaps,
    nf,
    orient_relation,
    report_from,
    resolve_all,
)

logger = logging.getLogger(__name__)

# algebra letters allowed around an urbild relation when testing kernel membership
KERNEL_SPAN_DEPTH = 2


class ModuleClass:
    URBILD = "urbild"
    BILD = "bild"


class DegreeKind:
    DEG0 = "Deg0"
    DEG1 = "Deg1"
    MIXED = "Mixed"


class NotDegreeOne(NcrwError):
    pass


class WeakCompletenessNotVerified(NcrwError):
    pass


@dataclass(frozen=True)
class ModuleDegree:
    kind: str
    which: str | None = None

    @property
    def p_predicate(self) -> bool:
        return self.kind != DegreeKind.MIXED


def module_count(word: Word, classes: Mapping[int, str]) -> int:
    return sum(1 for pos in word if pos in classes)


def p_predicate(word: Word, classes: Mapping[int, str]) -> bool:
    return module_count(word, classes) <= 1


def module_degree(p: Polynomial, classes: Mapping[int, str]) -> ModuleDegree:
    """Deg0 when no support word has a module letter, Deg1 when each has exactly one of one class."""
    counts = set()
    which = set()
    for word in p.support():
        found = [classes[pos] for pos in word if pos in classes]
        counts.add(len(found))
        which.update(found)
    if not counts or counts == {0}:
        return ModuleDegree(DegreeKind.DEG0)
    if counts == {1} and len(which) == 1:
        return ModuleDegree(DegreeKind.DEG1, which.pop())
    return ModuleDegree(DegreeKind.MIXED)


# ---------------------------------------------------------------------------
# Bimodule elements
# ---------------------------------------------------------------------------

class BimoduleElement:
    """A sum of c * left ⊗ right placed at module generator slots, kept as free-algebra lifts."""

    __slots__ = ("alphabet", "_terms")

    def __init__(self, alphabet: Alphabet, terms: Mapping[tuple[int, Word, Word], Fraction] | None = None):
        self.alphabet = alphabet
        self._terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @property
    def terms(self) -> dict[tuple[int, Word, Word], Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BimoduleElement):
            return NotImplemented
        return self.alphabet == other.alphabet and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: BimoduleElement) -> BimoduleElement:
        acc = defaultdict(Fraction, self._terms)
        for key, value in other._terms.items():
            acc[key] += value
        return BimoduleElement(self.alphabet, acc)

    def __neg__(self) -> BimoduleElement:
        return BimoduleElement(self.alphabet, {k: -v for k, v in self._terms.items()})

    def slots(self) -> list[Letter]:
        return [self.alphabet[s] for s in sorted({k[0] for k in self._terms})]

    def entries(self) -> list[tuple[Letter, Polynomial, Polynomial]]:
        """(slot, c*left, right) per term, grouped by slot."""
        out = []
        for (slot, left, right), coeff in sorted(self._terms.items()):
            out.append((
                self.alphabet[slot],
                Polynomial.monomial(self.alphabet, left, coeff),
                Polynomial.monomial(self.alphabet, right),
            ))
        return out

    def lift(self) -> Polynomial:
        return Polynomial.from_terms(
            self.alphabet, ((c, left + (slot,) + right) for (slot, left, right), c in self._terms.items())
        )

    def reduced(self, algebra: RewriteSystem) -> BimoduleElement:
        """Canonical form: both tensor factors in normal form under the algebra system."""
        acc: dict[tuple[int, Word, Word], Fraction] = defaultdict(Fraction)
        for (slot, left, right), coeff in self._terms.items():
            nl = nf(Polynomial.monomial(self.alphabet, left), algebra)
            nr = nf(Polynomial.monomial(self.alphabet, right), algebra)
            for lw, lc in nl.terms.items():
                for rw, rc in nr.terms.items():
                    acc[(slot, lw, rw)] += coeff * lc * rc
        return BimoduleElement(self.alphabet, acc)


def pi1(p: Polynomial, classes: Mapping[int, str]) -> BimoduleElement:
    degree = module_degree(p, classes)
    if p and degree.kind != DegreeKind.DEG1:
        raise NotDegreeOne(f"{p.render()} is {degree.kind}")
    acc: dict[tuple[int, Word, Word], Fraction] = defaultdict(Fraction)
    for word, coeff in p.terms.items():
        pos = next(i for i, letter in enumerate(word) if letter in classes)
        acc[(word[pos], word[:pos], word[pos + 1:])] += coeff
    return BimoduleElement(p.alphabet, acc)


# ---------------------------------------------------------------------------
# Split systems
# ---------------------------------------------------------------------------

@dataclass
class SplitSystem:
    base: RewriteSystem
    classes: dict[int, str]
    r_A: tuple[int, ...]
    r_e: tuple[int, ...]
    r_f: tuple[int, ...]
    trivial: tuple[int, ...] = field(default_factory=tuple)

    @property
    def alphabet(self) -> Alphabet:
        return self.base.alphabet

    def algebra_system(self) -> RewriteSystem:
        return RewriteSystem(self.alphabet, self.base.ordering, [self.base.rules[i] for i in self.r_A], check=False)

    def rules_of(self, indices: Iterable[int]) -> list[Rule]:
        return [self.base.rules[i] for i in indices]


def split_system(base: RewriteSystem, classes: Mapping[int, str], trivial: Iterable[int] = ()) -> SplitSystem:
    classes = dict(classes)
    r_A, r_e, r_f = [], [], []
    for idx, rule in enumerate(base.rules):
        found = [classes[pos] for pos in rule.lhs if pos in classes]
        if not found:
            r_A.append(idx)
        elif len(found) == 1 and found[0] == ModuleClass.BILD:
            r_e.append(idx)
        elif len(found) == 1:
            degree = module_degree(rule.rhs, classes)
            if rule.rhs and degree != ModuleDegree(DegreeKind.DEG1, ModuleClass.URBILD):
                raise NotDegreeOne(f"urbild rule {rule.tag} has rhs of degree {degree.kind}")
            r_f.append(idx)
        else:
            raise ValueError(f"rule {rule.tag} has {len(found)} module letters in its lhs")
    return SplitSystem(base, classes, tuple(r_A), tuple(r_e), tuple(r_f), tuple(trivial))


def graph_system(
    phi_images: Iterable[tuple[int, Polynomial]],
    r_A: RewriteSystem,
    ordering: OrderingSpec,
    classes: Mapping[int, str],
    tags: Mapping[int, str] | None = None,
) -> SplitSystem:
    """Orient image(g) - g for every urbild generator g and join the result to the algebra rules."""
    rules: list[Rule] = []
    trivial: list[int] = []
    for gen, image in phi_images:
        difference = image - Polynomial.monomial(image.alphabet, (gen,))
        if difference.is_zero():
            trivial.append(gen)
            continue
        degree = module_degree(image, classes)
        if image and degree != ModuleDegree(DegreeKind.DEG1, ModuleClass.BILD):
            raise NotDegreeOne(f"image of {image.alphabet[gen].token} is not of degree one in bild letters")
        tag = (tags or {}).get(gen, f"graph[{image.alphabet[gen].token}]")
        rules.append(orient_relation(difference, ordering, tag))
    base = RewriteSystem(ordering.alphabet, ordering, [*r_A.rules, *rules])
    logger.info("Graph system: %d algebra rules, %d graph rules, %d trivial generators",
                len(r_A), len(rules), len(trivial))
    return split_system(base, classes, trivial)


def p_minimal_overlaps(system: SplitSystem) -> list[Overlap]:
    return [o for o in minimal_overlaps(system.base) if p_predicate(o.word, system.classes)]


def weak_overlaps(system: SplitSystem) -> list[Overlap]:
    allowed = set(system.r_A) | set(system.r_e)
    return [o for o in p_minimal_overlaps(system) if o.rule_a in allowed and o.rule_b in allowed]


def _algebra_words(system: SplitSystem, algebra: RewriteSystem, depth: int) -> list[Word]:
    """Algebra-irreducible words of length at most depth over the non-module letters."""
    alphabet = system.alphabet
    letters = [pos for pos in range(len(alphabet)) if alphabet[pos].kind != LetterKind.MODULE]
    level: list[Word] = [()]
    words = list(level)
    for _ in range(depth):
        level = [w + (pos,) for w in level for pos in letters if algebra.is_irreducible(w + (pos,))]
        words += level
    return words


class KernelSpan:
    """Row-echelon basis of the algebra normal forms of u * g * v.

    g runs over the urbild rule differences, u and v over algebra-irreducible
    words with |u| + |v| <= depth. Membership is therefore a sufficient test
    for lying in the submodule the urbild rules generate.
    """

    def __init__(self, system: SplitSystem, depth: int = KERNEL_SPAN_DEPTH):
        self._key = system.base.ordering.sort_key
        self._rows: list[tuple[Word, dict[Word, Fraction]]] = []
        alphabet = system.alphabet
        algebra = system.algebra_system()
        words = _algebra_words(system, algebra, depth)
        for idx in system.r_f:
            g = system.base.rules[idx].difference()
            for u in words:
                for v in words:
                    if len(u) + len(v) <= depth:
                        product = Polynomial.monomial(alphabet, u) * g * Polynomial.monomial(alphabet, v)
                        self._insert(nf(product, algebra).terms)
        logger.debug("Kernel span of depth %d: %d rows from %d urbild rules", depth, len(self._rows), len(system.r_f))

    def __len__(self) -> int:
        return len(self._rows)

    def _reduce(self, terms: Mapping[Word, Fraction]) -> dict[Word, Fraction]:
        vec = dict(terms)
        for pivot, row in self._rows:
            c = vec.get(pivot)
            if not c:
                continue
            for word, x in row.items():
                value = vec.get(word, 0) - c * x
                if value:
                    vec[word] = value
                else:
                    vec.pop(word, None)
        return vec

    def _insert(self, terms: Mapping[Word, Fraction]) -> None:
        vec = self._reduce(terms)
        if vec:
            pivot = max(vec, key=self._key)
            lead = vec[pivot]
            self._rows.append((pivot, {w: c / lead for w, c in vec.items()}))

    def contains(self, p: Polynomial) -> bool:
        return not self._reduce(p.terms)


def _join_modulo_kernel(system: SplitSystem, results: list[OverlapResult], depth: int) -> list[OverlapResult]:
    """Accept failures whose residue is urbild-only and lies in the span of the urbild rules."""
    urbild_only = ModuleDegree(DegreeKind.DEG1, ModuleClass.URBILD)
    span: KernelSpan | None = None
    out = []
    for result in results:
        if result.status == Resolution.NOT_JOINABLE and system.r_f:
            residue = result.nf_a - result.nf_b
            if module_degree(residue, system.classes) == urbild_only:
                if span is None:
                    span = KernelSpan(system, depth)
                if span.contains(residue):
                    result = OverlapResult(result.overlap, Resolution.KERNEL_JOINABLE, result.nf_a, result.nf_b)
        out.append(result)
    return out


def verify_weak_complete(
    system: SplitSystem,
    step_limit: int | None = None,
    parallel: int | None = None,
    kernel_depth: int = KERNEL_SPAN_DEPTH,
) -> VerifyReport:
    """Joinability of every P-minimal overlap between algebra and bild rules, under the full system.

    Two normal forms also join when they differ only by an urbild part that
    lies in the submodule generated by the urbild rules.
    """
    overlaps = weak_overlaps(system)
    results = resolve_all(system.base, overlaps, step_limit, parallel)
    report = report_from(_join_modulo_kernel(system, results, kernel_depth))
    logger.info(
        "Weak completeness: %d overlaps, %d failures, %d joined modulo the kernel",
        report.overlaps_total, len(report.failures), report.modulo_kernel,
    )
    return report


def verify_p_complete(system: SplitSystem, step_limit: int | None = None, parallel: int | None = None) -> VerifyReport:
    """The stricter check over every P-minimal overlap, urbild rules included."""
    overlaps = p_minimal_overlaps(system)
    return report_from(resolve_all(system.base, overlaps, step_limit, parallel))


def kernel_generators(
    system: SplitSystem,
    report: VerifyReport | None = None,
    step_limit: int | None = None,
) -> list[BimoduleElement]:
    if report is None:
        report = verify_weak_complete(system, step_limit)
    if not report.complete:
        raise WeakCompletenessNotVerified(f"{len(report.failures)} overlaps are not joinable")
    return [pi1(system.base.rules[i].difference(), system.classes) for i in system.r_f]
