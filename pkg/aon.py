"""The orthogonal free quantum group algebra A_o(n): relations and its complete rewriting system."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from core import Alphabet, Letter, LetterKind, Polynomial, Word, poly_sum
from ordering import OrderingSpec, canonical
from rewrite import (
    RewriteSystem,
    Rule,
    VerifyReport,
    nf,
    orient_relation,
    verify_complete,
)

logger = logging.getLogger(__name__)


def a_letter(i: int, j: int) -> Letter:
    return Letter("a", (i, j), LetterKind.ALGEBRA)


def aon_alphabet(n: int) -> Alphabet:
    """a[1,1] > a[1,2] > ... > a[1,n] > a[2,1] > ... > a[n,n]."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Alphabet(a_letter(i, j) for i in range(1, n + 1) for j in range(1, n + 1))


def _delta(i: int, j: int) -> int:
    return 1 if i == j else 0


class AlgebraTerms:
    """Polynomial shorthands over one alphabet containing the a[i,j] letters."""

    def __init__(self, n: int, alphabet: Alphabet):
        self.n = n
        self.alphabet = alphabet

    def a(self, i: int, j: int) -> Polynomial:
        return Polynomial.letter(self.alphabet, a_letter(i, j))

    def const(self, value: int | Fraction) -> Polynomial:
        return Polynomial.one(self.alphabet).scale(value)

    def total(self, parts) -> Polynomial:
        return poly_sum(self.alphabet, parts)

    def Z(self, p: int, q: int) -> Polynomial:
        return self.total(-(self.a(p, i) * self.a(q, i)) for i in range(2, self.n + 1)) + self.const(_delta(p, q))

    def S(self, p: int, q: int) -> Polynomial:
        return self.total(-(self.a(i, p) * self.a(i, q)) for i in range(2, self.n + 1)) + self.const(_delta(p, q))

    def Z3(self, p: int, q: int, r: int) -> Polynomial:
        tail = self.total(-(self.a(q, i) * self.a(r, i)) for i in range(3, self.n + 1)) + self.const(_delta(q, r))
        return self.a(p, 1) * tail

    def S3(self, p: int, q: int, r: int) -> Polynomial:
        tail = self.total(-(self.a(i, q) * self.a(i, r)) for i in range(3, self.n + 1)) + self.const(_delta(q, r))
        return self.a(1, p) * tail

    def row(self, i: int, j: int) -> Polynomial:
        return self.total(self.a(i, p) * self.a(j, p) for p in range(1, self.n + 1)) - self.const(_delta(i, j))

    def column(self, i: int, j: int) -> Polynomial:
        return self.total(self.a(p, i) * self.a(p, j) for p in range(1, self.n + 1)) - self.const(_delta(i, j))


def aon_relations(n: int, alphabet: Alphabet | None = None) -> list[Polynomial]:
    """Row relations AA^t = 1 then column relations A^tA = 1, indexed (i, j) row-major."""
    b = AlgebraTerms(n, alphabet or aon_alphabet(n))
    idx = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    return [b.row(i, j) for i, j in idx] + [b.column(i, j) for i, j in idx]


def aon_rule_list(n: int, alphabet: Alphabet | None = None) -> list[Rule]:
    b = AlgebraTerms(n, alphabet or aon_alphabet(n))
    rng = range(1, n + 1)
    rules: list[Rule] = []
    for p in rng:
        for q in rng:
            rules.append(Rule((b.alphabet.index(a_letter(p, 1)), b.alphabet.index(a_letter(q, 1))), b.Z(p, q), f"Z~[{p},{q}]"))
    for p in rng:
        for q in rng:
            rules.append(Rule((b.alphabet.index(a_letter(1, p)), b.alphabet.index(a_letter(1, q))), b.S(p, q), f"S~[{p},{q}]"))
    if n < 2:
        return rules
    for p in rng:
        for q in rng:
            for r in rng:
                lhs = b.alphabet.word([a_letter(p, 1), a_letter(q, 2), a_letter(r, 2)])
                rules.append(Rule(lhs, b.Z3(p, q, r) - b.Z(p, q) * b.a(r, 1), f"Z~[{p},{q},{r}]"))
    for p in rng:
        for q in rng:
            for r in rng:
                lhs = b.alphabet.word([a_letter(1, p), a_letter(2, q), a_letter(2, r)])
                rules.append(Rule(lhs, b.S3(p, q, r) - b.S(p, q) * b.a(1, r), f"S~[{p},{q},{r}]"))
    return rules


def aon_rules(n: int, alphabet: Alphabet | None = None, ordering: OrderingSpec | None = None) -> RewriteSystem:
    """Z~[p,q], S~[p,q], Z~[p,q,r], S~[p,q,r] in that order; 2n^2 + 2n^3 rules for n >= 2."""
    alphabet = alphabet or aon_alphabet(n)
    ordering = ordering or canonical(alphabet)
    system = RewriteSystem(alphabet, ordering, aon_rule_list(n, alphabet))
    logger.debug("A_o(%d): %d rules", n, len(system))
    return system


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class AonReport:
    n: int
    overlaps: VerifyReport
    membership_failures: list[str] = field(default_factory=list)
    orientation_failures: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.overlaps.complete and not self.membership_failures and not self.orientation_failures


def membership_failures(n: int, system: RewriteSystem) -> list[str]:
    """Tags whose rule difference is not the expected combination of relations."""
    b = AlgebraTerms(n, system.alphabet)
    failures = []
    for rule in system.rules:
        indices = tuple(int(x) for x in rule.tag[rule.tag.index("[") + 1:-1].split(","))
        family = rule.tag[0]
        if len(indices) == 2:
            expected = b.row(*indices) if family == "Z" else b.column(*indices)
        elif family == "Z":
            p, q, r = indices
            expected = b.a(p, 1) * b.row(q, r) - b.row(p, q) * b.a(r, 1)
        else:
            p, q, r = indices
            expected = b.a(1, p) * b.column(q, r) - b.column(p, q) * b.a(1, r)
        if rule.difference() != expected:
            failures.append(rule.tag)
    return failures


def orientation_failures(n: int, system: RewriteSystem) -> list[str]:
    """Orienting each relation must reproduce the matching two-letter rule."""
    failures = []
    by_tag = {rule.tag: rule for rule in system.rules}
    idx = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    tags = [f"Z~[{i},{j}]" for i, j in idx] + [f"S~[{i},{j}]" for i, j in idx]
    for tag, relation in zip(tags, aon_relations(n, system.alphabet)):
        oriented = orient_relation(relation, system.ordering)
        rule = by_tag[tag]
        if oriented.lhs != rule.lhs or oriented.rhs != rule.rhs:
            failures.append(tag)
    return failures


def aon_verify(n: int, step_limit: int | None = None, parallel: int | None = None) -> AonReport:
    system = aon_rules(n)
    report = AonReport(
        n,
        verify_complete(system, step_limit, parallel),
        membership_failures(n, system),
        orientation_failures(n, system),
    )
    logger.info("A_o(%d): %d overlaps, complete=%s", n, report.overlaps.overlaps_total, report.complete)
    return report


def triple_identity_holds(n: int, p: int, q: int, r: int, system: RewriteSystem | None = None) -> bool:
    """NF(Z_{p,q} a_{r,1}) == NF(a_{p,1} Z_{q,r}) and likewise for the column abbreviations."""
    system = system or aon_rules(n)
    b = AlgebraTerms(n, system.alphabet)
    rows = nf(b.Z(p, q) * b.a(r, 1), system) == nf(b.a(p, 1) * b.Z(q, r), system)
    cols = nf(b.S(p, q) * b.a(1, r), system) == nf(b.a(1, p) * b.S(q, r), system)
    return rows and cols


def idempotents(system: RewriteSystem) -> tuple[Polynomial, Polynomial]:
    """For n = 1: (1 + a)/2 and (1 - a)/2, orthogonal and summing to 1."""
    if len(system.alphabet) != 1:
        raise ValueError("idempotent decomposition needs the one-letter algebra")
    a = Polynomial.letter(system.alphabet, system.alphabet[0])
    one = Polynomial.one(system.alphabet)
    half = Fraction(1, 2)
    return (one + a).scale(half), (one - a).scale(half)


# ---------------------------------------------------------------------------
# Basis
# ---------------------------------------------------------------------------

def basis_words(n: int, max_len: int, system: RewriteSystem | None = None) -> list[list[Word]]:
    """Irreducible words per length 0..max_len, in lexicographic order of letter positions."""
    system = system or aon_rules(n)
    lhs_set = {rule.lhs for rule in system.rules}
    longest = max((len(lhs) for lhs in lhs_set), default=0)
    size = len(system.alphabet)
    levels: list[list[Word]] = [[()]]
    for _ in range(max_len):
        nxt = []
        for word in levels[-1]:
            for letter in range(size):
                candidate = word + (letter,)
                # prefix is already irreducible, so only new suffixes can match
                if any(candidate[len(candidate) - k:] in lhs_set for k in range(1, min(longest, len(candidate)) + 1)):
                    continue
                nxt.append(candidate)
        levels.append(nxt)
    return levels
