import pytest

from core import Alphabet, Letter, NoStrictMaximum, Polynomial
from ordering import LexOrderingRejected, canonical, kbweight, lex
from rewrite import (
    CompletionStatus,
    NotDecreasing,
    OverlapKind,
    Resolution,
    RewriteSystem,
    Rule,
    StepLimitExceeded,
    exhaustive_normal_forms,
    family_label,
    ideal_member,
    interreduce,
    knuth_bendix,
    minimal_overlaps,
    nf,
    normal_form,
    orient_relation,
    replay,
    verify_complete,
)


@pytest.fixture
def ab():
    return Alphabet([Letter("a"), Letter("b")])


def P(alphabet, text):
    return Polynomial.parse(alphabet, text)


def rule(alphabet, lhs, rhs, tag=""):
    return Rule(alphabet.parse_word(lhs), P(alphabet, rhs), tag)


def system(alphabet, *rules):
    return RewriteSystem(alphabet, canonical(alphabet), rules)


# ---------------------------------------------------------------------------
# Rules and orientation
# ---------------------------------------------------------------------------

class TestRules:
    def test_lhs_must_be_nonempty(self, ab):
        with pytest.raises(ValueError):
            Rule((), P(ab, "a"))

    def test_lhs_may_not_occur_in_rhs(self, ab):
        with pytest.raises(ValueError):
            rule(ab, "ab", "ab + b")

    def test_system_checks_decrease(self, ab):
        with pytest.raises(NotDecreasing):
            system(ab, rule(ab, "b", "a"))

    def test_lex_is_rejected(self, ab):
        with pytest.raises(LexOrderingRejected):
            RewriteSystem(ab, lex(ab), [])

    def test_orient_relation_normalizes_leading_coefficient(self, ab):
        r = orient_relation(P(ab, "2ab - ba + 1"), canonical(ab), "r")
        assert r.lhs == ab.parse_word("ab")
        assert r.rhs == P(ab, "1/2*ba - 1/2")
        assert r.difference() == P(ab, "ab - 1/2*ba + 1/2")

    def test_family_label(self):
        assert family_label("Z~[1,2,1]") == "Z~pqr"
        assert family_label("K~'[2,3]") == "K~'pq"
        assert family_label("kb3") == "kb3"


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

class TestNormalForm:
    def test_commutation_sorts_letters(self, ab):
        s = system(ab, rule(ab, "ab", "ba"))
        assert nf(P(ab, "bab"), s) == P(ab, "bba")

    def test_trace_replays_to_the_result(self, ab):
        s = system(ab, rule(ab, "ab", "ba"), rule(ab, "bb", "1"))
        p = P(ab, "abb + 3bab")
        result, trace = normal_form(p, s)
        assert result == P(ab, "4a")
        assert trace.steps
        assert replay(p, trace, s) == result

    def test_step_limit_carries_partial_trace(self, ab):
        s = system(ab, rule(ab, "ab", "ba"))
        with pytest.raises(StepLimitExceeded) as excinfo:
            normal_form(P(ab, "aaabbb"), s, step_limit=2)
        assert excinfo.value.limit == 2
        assert len(excinfo.value.trace.steps) == 2

    def test_ideal_member(self, ab):
        s = system(ab, rule(ab, "bb", "1"))
        assert ideal_member(P(ab, "abba - aa"), s)
        assert not ideal_member(P(ab, "b"), s)

    def test_exhaustive_normal_forms_expose_non_confluence(self, ab):
        s = system(ab, rule(ab, "ab", "a"), rule(ab, "ab", "b"))
        assert exhaustive_normal_forms(P(ab, "ab"), s) == {P(ab, "a"), P(ab, "b")}

    def test_exhaustive_combines_word_forms_linearly(self, ab):
        s = system(ab, rule(ab, "ab", "a"), rule(ab, "ab", "b"))
        forms = exhaustive_normal_forms(P(ab, "ab - b"), s)
        assert forms == {P(ab, "a - b"), Polynomial.zero(ab)}

    def test_exhaustive_agrees_with_strategy_when_confluent(self, ab):
        s = system(ab, rule(ab, "ab", "ba"))
        p = P(ab, "abb - ab")
        assert exhaustive_normal_forms(p, s) == {nf(p, s)}

    def test_exhaustive_limit(self, ab):
        s = system(ab, rule(ab, "ab", "ba"))
        with pytest.raises(StepLimitExceeded):
            exhaustive_normal_forms(P(ab, "aaaabbbb"), s, limit=3)


# ---------------------------------------------------------------------------
# Overlaps and completeness
# ---------------------------------------------------------------------------

class TestOverlaps:
    def test_partial_overlap(self, ab):
        s = system(ab, rule(ab, "aba", "1"))
        overlaps = minimal_overlaps(s)
        assert [o.word for o in overlaps] == [ab.parse_word("ababa")]
        assert overlaps[0].kind == OverlapKind.PARTIAL

    def test_total_overlap_for_shared_lhs(self, ab):
        s = system(ab, rule(ab, "ab", "a"), rule(ab, "ab", "b"))
        kinds = {o.kind for o in minimal_overlaps(s)}
        assert OverlapKind.TOTAL in kinds

    def test_verify_reports_witness(self, ab):
        s = system(ab, rule(ab, "ab", "a"), rule(ab, "ab", "b"))
        report = verify_complete(s)
        assert not report.complete
        failure = report.failures[0]
        assert failure.status == Resolution.NOT_JOINABLE
        assert {failure.nf_a, failure.nf_b} == {P(ab, "a"), P(ab, "b")}

    def test_complete_system(self, ab):
        s = system(ab, rule(ab, "aa", "b"), rule(ab, "bb", "1"), rule(ab, "ab", "ba"))
        report = verify_complete(s)
        assert report.complete
        assert report.overlaps_total == report.joinable > 0

    def test_limit_failures_are_counted(self, ab):
        s = system(ab, rule(ab, "aa", "b"), rule(ab, "bb", "1"), rule(ab, "ab", "ba"))
        report = verify_complete(s, step_limit=0)
        assert not report.complete
        assert report.limit_failures > 0


# ---------------------------------------------------------------------------
# Completion
# ---------------------------------------------------------------------------

class TestCompletion:
    def test_word_problem_completes(self, ab):
        s = system(ab, rule(ab, "aba", "1"), rule(ab, "bb", "1"))
        result = knuth_bendix(s)
        assert result.status == CompletionStatus.COMPLETED
        lhs = {ab.render_word(r.lhs): r.rhs for r in result.system.rules}
        assert lhs == {"aa": P(ab, "b"), "bb": P(ab, "1"), "ab": P(ab, "ba")}
        assert verify_complete(result.system).complete
        assert nf(P(ab, "aa"), result.system) == nf(P(ab, "b"), result.system)

    def test_rule_cap_exhausts(self, ab):
        s = system(ab, rule(ab, "aba", "1"), rule(ab, "bb", "1"))
        result = knuth_bendix(s, max_rules=1)
        assert result.status == CompletionStatus.EXHAUSTED
        assert not result.completed

    def test_interreduce_drops_redundant_rules(self, ab):
        rules = [rule(ab, "ab", "1"), rule(ab, "aab", "a")]
        reduced = interreduce(rules, ab, canonical(ab))
        assert [ab.render_word(r.lhs) for r in reduced] == ["ab"]

    def test_interreduce_raises_on_tied_residue(self):
        abcd = Alphabet([Letter(x) for x in "abcd"])
        flat = kbweight(abcd, [1, 1, 1, 1])
        rules = [rule(abcd, "ab", "c"), rule(abcd, "ab", "d")]
        with pytest.raises(NoStrictMaximum):
            interreduce(rules, abcd, flat)
        stuck = []
        reduced = interreduce(rules, abcd, flat, unorientable=stuck)
        assert [abcd.render_word(r.lhs) for r in reduced] == ["ab"]
        assert stuck == [P(abcd, "c - d")]

    def test_tied_residue_exhausts_completion(self):
        abcd = Alphabet([Letter(x) for x in "abcd"])
        s = RewriteSystem(abcd, kbweight(abcd, [1, 1, 1, 1]), [rule(abcd, "ab", "c"), rule(abcd, "ab", "d")])
        result = knuth_bendix(s)
        assert result.status == CompletionStatus.EXHAUSTED
        assert result.offending == P(abcd, "c - d")
        assert len(result.system) == 1
