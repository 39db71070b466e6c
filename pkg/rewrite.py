"""Word rewriting on the free algebra: rules, normal forms, overlaps, completion."""
from __future__ import annotations

import asyncio
import heapq
import logging
import re
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import config
from core import Alphabet, NcrwError, NoStrictMaximum, Polynomial, Word, leading_monomial
from ordering import OrderingSpec, Variant, LexOrderingRejected, is_strictly_decreasing

logger = logging.getLogger(__name__)


class NotDecreasing(NcrwError):
    pass


class StepLimitExceeded(NcrwError):
    """More elementary rewrites were needed than the step limit allows."""

    def __init__(self, limit: int, trace: "ReductionTrace | None" = None):
        self.limit = limit
        self.trace = trace
        super().__init__(f"step limit of {limit} rewrites exceeded")


class OverlapKind:
    PARTIAL = "Partial"
    TOTAL = "Total"


class Resolution:
    JOINABLE = "Joinable"
    # normal forms differ by an element of the submodule the urbild rules generate
    KERNEL_JOINABLE = "JoinableModuloKernel"
    NOT_JOINABLE = "NotJoinable"
    LIMIT = "Limit"


_TAG_INDICES = re.compile(r"^(.*?)\[\s*-?\d+(?:\s*,\s*-?\d+)*\s*\]$")


def family_label(tag: str) -> str:
    """`Z~[1,2,1]` -> `Z~pqr`, `K~'[2,3]` -> `K~'pq`; tags without indices are their own family."""
    m = _TAG_INDICES.match(tag)
    if not m:
        return tag
    count = tag.count(",") + 1
    return m.group(1) + "pqrs"[:count]


# ---------------------------------------------------------------------------
# Rules and systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: Polynomial
    tag: str = ""

    def __post_init__(self) -> None:
        if not self.lhs:
            raise ValueError("rule lhs must be a nonempty word")
        if self.rhs.coefficient(self.lhs):
            raise ValueError(f"rule lhs {self.rhs.alphabet.render_word(self.lhs)} occurs in its rhs")

    @property
    def alphabet(self) -> Alphabet:
        return self.rhs.alphabet

    @property
    def family(self) -> str:
        return family_label(self.tag)

    def difference(self) -> Polynomial:
        return Polynomial.monomial(self.alphabet, self.lhs) - self.rhs

    def render(self) -> str:
        return f"{self.alphabet.render_word(self.lhs)} -> {self.rhs.render()}"


class RewriteSystem:
    """An immutable rule sequence over an alphabet, with a certified ordering."""

    def __init__(self, alphabet: Alphabet, ordering: OrderingSpec, rules: Iterable[Rule], *, check: bool = True):
        self.alphabet = alphabet
        self.ordering = ordering
        self.rules: tuple[Rule, ...] = tuple(rules)
        if ordering.alphabet != alphabet:
            raise ValueError("ordering and system use different alphabets")
        if check:
            _require_certified(ordering)
            for rule in self.rules:
                if rule.alphabet != alphabet:
                    raise ValueError(f"rule {rule.tag or rule.render()} uses another alphabet")
                alphabet.check_word(rule.lhs)
                if not is_strictly_decreasing(rule.lhs, rule.rhs.support(), ordering):
                    raise NotDecreasing(f"rule {rule.tag or ''} {rule.render()} is not strictly decreasing")
        self._by_lhs: dict[Word, list[int]] = defaultdict(list)
        for idx, rule in enumerate(self.rules):
            self._by_lhs[rule.lhs].append(idx)
        self._lengths = sorted({len(lhs) for lhs in self._by_lhs})

    def __len__(self) -> int:
        return len(self.rules)

    def __getstate__(self) -> dict:
        return {"alphabet": self.alphabet, "ordering": self.ordering, "rules": self.rules}

    def __setstate__(self, state: dict) -> None:
        self.__init__(state["alphabet"], state["ordering"], state["rules"], check=False)

    def extended(self, rules: Iterable[Rule]) -> RewriteSystem:
        return RewriteSystem(self.alphabet, self.ordering, [*self.rules, *rules])

    def rules_with_lhs(self, lhs: Word) -> list[int]:
        return self._by_lhs.get(lhs, [])

    def find_redex(self, word: Word) -> tuple[int, int] | None:
        """Leftmost redex of `word` as (position, rule index), lowest rule index first."""
        size = len(word)
        for pos in range(size):
            best: int | None = None
            for length in self._lengths:
                if pos + length > size:
                    break
                hits = self._by_lhs.get(word[pos:pos + length])
                if hits and (best is None or hits[0] < best):
                    best = hits[0]
            if best is not None:
                return pos, best
        return None

    def is_irreducible(self, word: Word) -> bool:
        return self.find_redex(word) is None

    def tags(self) -> dict[str, int]:
        return {rule.tag: idx for idx, rule in enumerate(self.rules) if rule.tag}


def _require_certified(ordering: OrderingSpec) -> None:
    if ordering.variant == Variant.LEX or not ordering.noetherian:
        raise LexOrderingRejected(f"ordering {ordering.describe()} is not noetherian")
    if not ordering.multiplicative:
        raise LexOrderingRejected(f"ordering {ordering.describe()} is not multiplicative")


def orient_relation(p: Polynomial, ordering: OrderingSpec, tag: str = "") -> Rule:
    _require_certified(ordering)
    lead = leading_monomial(p, ordering)
    coeff = p.coefficient(lead)
    rhs = Polynomial.monomial(p.alphabet, lead) - p.scale(Fraction(1) / coeff)
    rule = Rule(lead, rhs, tag)
    if not is_strictly_decreasing(lead, rhs.support(), ordering):
        raise NotDecreasing(f"orientation of {p.render()} is not decreasing")
    return rule


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionStep:
    rule: int
    position: int
    word: Word


@dataclass
class ReductionTrace:
    steps: list[ReductionStep]
    result: Polynomial


class _Descending:
    """Heap entry that pops the greatest key first."""

    __slots__ = ("key",)

    def __init__(self, key: tuple):
        self.key = key

    def __lt__(self, other: _Descending) -> bool:
        return other.key < self.key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Descending) and self.key == other.key


def _heap_key(ordering: OrderingSpec, word: Word) -> _Descending:
    # raw positions break ties between Equivalent words deterministically
    return _Descending((ordering.sort_key(word), tuple(-pos for pos in word)))


def normal_form(
    p: Polynomial,
    system: RewriteSystem,
    step_limit: int | None = None,
    *,
    record: bool = True,
) -> tuple[Polynomial, ReductionTrace]:
    """Reduce `p` greatest word first, leftmost redex, lowest rule index."""
    if p.alphabet != system.alphabet:
        raise ValueError("polynomial and system use different alphabets")
    limit = config.STEP_LIMIT if step_limit is None else step_limit
    ordering = system.ordering
    work: dict[Word, Fraction] = dict(p.terms)
    heap = [(_heap_key(ordering, w), w) for w in work]
    heapq.heapify(heap)
    queued = set(work)
    done: dict[Word, Fraction] = {}
    steps: list[ReductionStep] = []
    count = 0
    while heap:
        _, word = heapq.heappop(heap)
        queued.discard(word)
        coeff = work.pop(word, None)
        if not coeff:
            continue
        redex = system.find_redex(word)
        if redex is None:
            done[word] = coeff
            continue
        count += 1
        if count > limit:
            work[word] = coeff
            partial = Polynomial(p.alphabet, {**done, **work})
            raise StepLimitExceeded(limit, ReductionTrace(steps, partial))
        pos, idx = redex
        rule = system.rules[idx]
        if record:
            steps.append(ReductionStep(idx, pos, word))
        prefix, suffix = word[:pos], word[pos + len(rule.lhs):]
        for rw, rc in rule.rhs.terms.items():
            new = prefix + rw + suffix
            value = work.get(new, Fraction(0)) + coeff * rc
            if value:
                work[new] = value
                if new not in queued:
                    queued.add(new)
                    heapq.heappush(heap, (_heap_key(ordering, new), new))
            else:
                work.pop(new, None)
    result = Polynomial(p.alphabet, done)
    return result, ReductionTrace(steps, result)


def nf(p: Polynomial, system: RewriteSystem, step_limit: int | None = None) -> Polynomial:
    return normal_form(p, system, step_limit, record=False)[0]


def replay(p: Polynomial, trace: ReductionTrace, system: RewriteSystem) -> Polynomial:
    """Re-apply the recorded steps to `p`; each step rewrites the whole coefficient of its word."""
    current = p
    for step in trace.steps:
        coeff = current.coefficient(step.word)
        rule = system.rules[step.rule]
        prefix, suffix = step.word[:step.position], step.word[step.position + len(rule.lhs):]
        image = Polynomial.from_terms(p.alphabet, ((rc, prefix + rw + suffix) for rw, rc in rule.rhs.terms.items()))
        current = current - Polynomial.monomial(p.alphabet, step.word, coeff) + image.scale(coeff)
    return current


def ideal_member(f: Polynomial, system: RewriteSystem, step_limit: int | None = None) -> bool:
    return nf(f, system, step_limit).is_zero()


def word_rewrites(word: Word, system: RewriteSystem) -> list[Polynomial]:
    """The image of `word` under every single rewrite at any redex."""
    alphabet = system.alphabet
    out: list[Polynomial] = []
    for pos in range(len(word)):
        for length in system._lengths:
            if pos + length > len(word):
                break
            for idx in system.rules_with_lhs(word[pos:pos + length]):
                rule = system.rules[idx]
                prefix, suffix = word[:pos], word[pos + length:]
                out.append(Polynomial.from_terms(alphabet, ((rc, prefix + rw + suffix) for rw, rc in rule.rhs.terms.items())))
    return out


def _linear_forms(p: Polynomial, forms_of, limit: int) -> set[Polynomial]:
    """Every sum of coefficient times a choice from each word's normal-form set."""
    results = {Polynomial.zero(p.alphabet)}
    for word, coeff in p.terms.items():
        choices = forms_of(word)
        results = {acc + f.scale(coeff) for acc in results for f in choices}
        if len(results) > limit:
            raise StepLimitExceeded(limit)
    return results


def exhaustive_normal_forms(p: Polynomial, system: RewriteSystem, limit: int = 100_000) -> set[Polynomial]:
    """All irreducible results over every choice of redex.

    Reduction acts on each word independently, so normal-form sets are
    memoized per word and combined linearly. `limit` bounds both the
    number of distinct words visited and the size of any combined set.
    """
    memo: dict[Word, set[Polynomial]] = {}

    def forms_of(word: Word) -> set[Polynomial]:
        if word in memo:
            return memo[word]
        if len(memo) >= limit:
            raise StepLimitExceeded(limit)
        images = word_rewrites(word, system)
        if not images:
            found = {Polynomial.monomial(system.alphabet, word)}
        else:
            found = set()
            for image in images:
                found |= _linear_forms(image, forms_of, limit)
                if len(found) > limit:
                    raise StepLimitExceeded(limit)
        memo[word] = found
        return found

    return _linear_forms(p, forms_of, limit)


# ---------------------------------------------------------------------------
# Overlaps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Overlap:
    word: Word
    rule_a: int
    rule_b: int
    kind: str
    # start of lhs_a and of lhs_b inside word
    offsets: tuple[int, int]


@dataclass
class OverlapResult:
    overlap: Overlap
    status: str
    nf_a: Polynomial | None = None
    nf_b: Polynomial | None = None


@dataclass
class VerifyReport:
    overlaps_total: int
    joinable: int
    failures: list[OverlapResult] = field(default_factory=list)
    modulo_kernel: int = 0

    @property
    def complete(self) -> bool:
        return not self.failures

    @property
    def limit_failures(self) -> int:
        return sum(1 for f in self.failures if f.status == Resolution.LIMIT)


def minimal_overlaps(system: RewriteSystem) -> list[Overlap]:
    rules = system.rules
    prefix_to_rules: dict[Word, list[int]] = defaultdict(list)
    for idx, rule in enumerate(rules):
        for i in range(1, len(rule.lhs)):
            prefix_to_rules[rule.lhs[:i]].append(idx)

    seen: set[tuple] = set()
    out: list[Overlap] = []

    def add(o: Overlap) -> None:
        key = (o.word, o.rule_a, o.rule_b, o.offsets)
        if key not in seen:
            seen.add(key)
            out.append(o)

    # lhs_b · tail == head · lhs_a, sharing k letters
    for b, rule_b in enumerate(rules):
        size = len(rule_b.lhs)
        for k in range(1, size):
            for a in prefix_to_rules.get(rule_b.lhs[size - k:], ()):
                word = rule_b.lhs + rules[a].lhs[k:]
                add(Overlap(word, a, b, OverlapKind.PARTIAL, (size - k, 0)))

    # lhs_a inside lhs_b
    for b, rule_b in enumerate(rules):
        size = len(rule_b.lhs)
        for i in range(size):
            for j in range(i + 1, size + 1):
                for a in system.rules_with_lhs(rule_b.lhs[i:j]):
                    if a == b or (j - i == size and a > b):
                        continue
                    add(Overlap(rule_b.lhs, a, b, OverlapKind.TOTAL, (i, 0)))
    logger.debug("%d minimal overlaps among %d rules", len(out), len(rules))
    return out


def _rewrite_at(word: Word, pos: int, rule: Rule) -> Polynomial:
    prefix, suffix = word[:pos], word[pos + len(rule.lhs):]
    return Polynomial.from_terms(rule.alphabet, ((rc, prefix + rw + suffix) for rw, rc in rule.rhs.terms.items()))


def resolve_overlap(o: Overlap, system: RewriteSystem, step_limit: int | None = None) -> OverlapResult:
    branch_a = _rewrite_at(o.word, o.offsets[0], system.rules[o.rule_a])
    branch_b = _rewrite_at(o.word, o.offsets[1], system.rules[o.rule_b])
    try:
        nf_a = nf(branch_a, system, step_limit)
        nf_b = nf(branch_b, system, step_limit)
    except StepLimitExceeded:
        return OverlapResult(o, Resolution.LIMIT)
    if nf_a == nf_b:
        return OverlapResult(o, Resolution.JOINABLE, nf_a, nf_b)
    return OverlapResult(o, Resolution.NOT_JOINABLE, nf_a, nf_b)


def _resolve_chunk(system: RewriteSystem, overlaps: list[Overlap], step_limit: int | None) -> list[OverlapResult]:
    return [resolve_overlap(o, system, step_limit) for o in overlaps]


async def _resolve_parallel(
    system: RewriteSystem, overlaps: list[Overlap], step_limit: int | None, workers: int
) -> list[OverlapResult]:
    loop = asyncio.get_running_loop()
    size = -(-len(overlaps) // workers)
    chunks = [overlaps[i:i + size] for i in range(0, len(overlaps), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [loop.run_in_executor(pool, _resolve_chunk, system, chunk, step_limit) for chunk in chunks]
        parts = await asyncio.gather(*futures)
    return [result for part in parts for result in part]


def resolve_all(
    system: RewriteSystem,
    overlaps: Sequence[Overlap],
    step_limit: int | None = None,
    parallel: int | None = None,
) -> list[OverlapResult]:
    """Resolve overlaps in order, optionally fanned out to worker processes."""
    workers = config.PARALLEL if parallel is None else parallel
    overlaps = list(overlaps)
    if workers <= 1 or len(overlaps) < 2 * workers:
        return _resolve_chunk(system, overlaps, step_limit)
    logger.info("Resolving %d overlaps on %d workers", len(overlaps), workers)
    return asyncio.run(_resolve_parallel(system, overlaps, step_limit, workers))


def report_from(results: Iterable[OverlapResult]) -> VerifyReport:
    results = list(results)
    joined = (Resolution.JOINABLE, Resolution.KERNEL_JOINABLE)
    failures = [r for r in results if r.status not in joined]
    modulo = sum(1 for r in results if r.status == Resolution.KERNEL_JOINABLE)
    return VerifyReport(len(results), len(results) - len(failures), failures, modulo)


def verify_complete(system: RewriteSystem, step_limit: int | None = None, parallel: int | None = None) -> VerifyReport:
    _require_certified(system.ordering)
    overlaps = minimal_overlaps(system)
    report = report_from(resolve_all(system, overlaps, step_limit, parallel))
    logger.info(
        "Checked %d overlaps of %d rules: %d joinable, %d failures",
        report.overlaps_total, len(system), report.joinable, len(report.failures),
    )
    return report


# ---------------------------------------------------------------------------
# Knuth-Bendix completion
# ---------------------------------------------------------------------------

class CompletionStatus:
    COMPLETED = "Completed"
    EXHAUSTED = "Exhausted"


@dataclass
class CompletionResult:
    status: str
    system: RewriteSystem
    pending: list[Overlap] = field(default_factory=list)
    rounds: int = 0
    offending: Polynomial | None = None

    @property
    def completed(self) -> bool:
        return self.status == CompletionStatus.COMPLETED


def _contains(word: Word, factor: Word) -> bool:
    size = len(factor)
    return any(word[i:i + size] == factor for i in range(len(word) - size + 1))


def interreduce(
    rules: list[Rule],
    alphabet: Alphabet,
    ordering: OrderingSpec,
    step_limit: int | None = None,
    unorientable: list[Polynomial] | None = None,
) -> list[Rule]:
    """Drop rules whose lhs another rule reduces (re-adding their reduced difference), then reduce every rhs.

    A residue without a strict maximum raises NoStrictMaximum, unless
    `unorientable` is given: then the residue is appended there and the
    rule is dropped.
    """
    rules = list(rules)
    changed = True
    while changed:
        changed = False
        for i, rule in enumerate(rules):
            if any(
                j != i and _contains(rule.lhs, other.lhs) and (other.lhs != rule.lhs or j < i)
                for j, other in enumerate(rules)
            ):
                rest = rules[:i] + rules[i + 1:]
                residue = nf(rule.difference(), RewriteSystem(alphabet, ordering, rest, check=False), step_limit)
                rules = rest
                if residue:
                    try:
                        rules.append(orient_relation(residue, ordering, rule.tag))
                    except NoStrictMaximum:
                        if unorientable is None:
                            raise
                        unorientable.append(residue)
                changed = True
                break
        if changed:
            continue
        system = RewriteSystem(alphabet, ordering, rules, check=False)
        for i, rule in enumerate(rules):
            rhs = nf(rule.rhs, system, step_limit)
            if rhs != rule.rhs:
                rules[i] = Rule(rule.lhs, rhs, rule.tag)
                changed = True
                break
    return rules


def knuth_bendix(
    system: RewriteSystem,
    max_rules: int | None = None,
    step_limit: int | None = None,
) -> CompletionResult:
    cap = config.MAX_RULES if max_rules is None else max_rules
    alphabet, ordering = system.alphabet, system.ordering
    _require_certified(ordering)
    stuck: list[Polynomial] = []
    rules = interreduce(list(system.rules), alphabet, ordering, step_limit, stuck)
    rounds = 0
    if stuck:
        logger.warning("Inter-reduction met an unorientable difference: %s", stuck[0].render())
        kept = RewriteSystem(alphabet, ordering, rules, check=False)
        return CompletionResult(CompletionStatus.EXHAUSTED, kept, [], rounds, stuck[0])
    added = 0
    while True:
        rounds += 1
        current = RewriteSystem(alphabet, ordering, rules)
        overlaps = minimal_overlaps(current)
        working = current
        new_rules: list[Rule] = []
        sources: list[Overlap] = []
        for pos, o in enumerate(overlaps):
            result = resolve_overlap(o, working, step_limit)
            if result.status == Resolution.JOINABLE:
                continue
            if result.status == Resolution.LIMIT:
                logger.warning("Completion stopped on a step limit in round %d", rounds)
                return CompletionResult(CompletionStatus.EXHAUSTED, working, overlaps[pos:], rounds)
            difference = result.nf_a - result.nf_b
            try:
                added += 1
                rule = orient_relation(difference, ordering, tag=f"kb{added}")
            except NoStrictMaximum:
                logger.warning("Completion met an unorientable difference: %s", difference.render())
                return CompletionResult(CompletionStatus.EXHAUSTED, working, [o], rounds, difference)
            new_rules.append(rule)
            sources.append(o)
            working = working.extended([rule])
            if len(working) > cap:
                logger.warning("Completion exceeded %d rules in round %d", cap, rounds)
                return CompletionResult(CompletionStatus.EXHAUSTED, working, overlaps[pos + 1:], rounds)
        logger.info("Completion round %d: %d overlaps, %d new rules", rounds, len(overlaps), len(new_rules))
        if not new_rules:
            return CompletionResult(CompletionStatus.COMPLETED, current, [], rounds)
        rules = interreduce(rules + new_rules, alphabet, ordering, step_limit, stuck)
        if stuck:
            logger.warning("Inter-reduction met an unorientable difference: %s", stuck[0].render())
            kept = RewriteSystem(alphabet, ordering, rules, check=False)
            return CompletionResult(CompletionStatus.EXHAUSTED, kept, sources, rounds, stuck[0])
