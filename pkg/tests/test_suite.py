from core import Alphabet, Letter
from ordering import CompareResult
from suite import (
    CHECKS,
    bfs_connected,
    check_confluence,
    check_diamond,
    check_two_by_two,
    check_word_problem,
    run_suite,
    word_problem_system,
)

AB = Alphabet([Letter("a"), Letter("b")])


def w(text):
    return AB.parse_word(text)


def test_word_problem_letters_put_a_below_b():
    system = word_problem_system()
    a, b = system.alphabet.parse_word("a"), system.alphabet.parse_word("b")
    assert system.ordering.compare(b, a) == CompareResult.GREATER


def test_bfs_finds_relation_path():
    relations = [(w("aba"), ()), (w("bb"), ())]
    assert bfs_connected(w("abab"), w("b"), relations, max_len=6)
    assert not bfs_connected(w("a"), w("b"), relations, max_len=5, budget=2_000)


def test_bfs_meets_from_both_ends():
    relations = [(w("aba"), ()), (w("bb"), ())]
    # aa and b are equal only through longer words
    assert bfs_connected(w("aa"), w("b"), relations, max_len=10)
    assert bfs_connected(w("b"), w("aa"), relations, max_len=10)
    assert not bfs_connected(w("aa"), w("a"), relations, max_len=10)
    assert bfs_connected((), (), relations, max_len=0)


def test_two_by_two():
    ok, detail = check_two_by_two(True)
    assert ok, detail


def test_diamond_quick():
    ok, detail = check_diamond(True)
    assert ok, detail


def test_word_problem_quick():
    ok, detail = check_word_problem(True)
    assert ok, detail


def test_failures_are_recorded_not_raised(monkeypatch):
    import suite
    from rewrite import StepLimitExceeded

    def exploding(quick):
        raise StepLimitExceeded("too many steps")

    monkeypatch.setattr(suite, "CHECKS", [("boom", exploding), ("two_by_two", check_two_by_two)])
    results = run_suite(quick=True)
    assert [r.name for r in results] == ["boom", "two_by_two"]
    assert not results[0].ok
    assert "step limit" in results[0].detail
    assert results[1].ok
    assert results[1].to_dict()["ok"] is True


def test_every_check_is_named():
    names = [name for name, _ in CHECKS]
    assert len(names) == len(set(names)) == 10


def test_confluence_quick():
    ok, detail = check_confluence(True)
    assert ok, detail
    assert "over the search budget" not in detail


def test_confluence_reports_budget_overruns_apart(monkeypatch):
    import suite
    from rewrite import StepLimitExceeded

    def over_budget(p, system, limit):
        raise StepLimitExceeded(limit)

    monkeypatch.setattr(suite, "exhaustive_normal_forms", over_budget)
    ok, detail = check_confluence(True)
    assert not ok
    assert detail.startswith("0 of 50 words without a unique normal form")
    assert "50 over the search budget" in detail
