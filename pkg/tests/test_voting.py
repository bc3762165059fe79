import pytest
from hypothesis import given, strategies as st

from byzline.line_model import Q
from byzline.voting import (Claim, ClaimKind, Found, Refuted, Unresolved, Vote, VoteLedger, VoteTally, resolve,
                            tally)

X = Q(1, 2)


def yes(robot, t=X):
    return Claim(robot, X, Q(t), Vote.YES, ClaimKind.BROADCAST)


def no(robot, t=X):
    return Claim(robot, X, Q(t), Vote.NO, ClaimKind.SILENT)


def test_tally_examples():
    ledger = VoteLedger()
    assert tally(ledger, X, 10) == (0, 0)
    ledger.record(yes(0))
    ledger.record(no(1))
    assert tally(ledger, X, 10) == (1, 1)
    assert tally(ledger, X, 10, {0}) == (0, 1)


def test_tally_ignores_later_claims():
    ledger = VoteLedger()
    ledger.record(yes(0, 1))
    ledger.record(no(1, 3))
    assert tally(ledger, X, 2) == (1, 0)


def test_first_claim_per_robot_wins():
    ledger = VoteLedger()
    assert ledger.record(no(0))
    assert not ledger.record(yes(0))
    assert tally(ledger, X, 10) == (0, 1)


def test_resolve_examples():
    assert resolve((2, 0), 1) == Found()
    tallied = VoteTally(X, frozenset({3}), frozenset({1, 2}))
    assert resolve(tallied, 1) == Refuted(frozenset({3}))
    assert resolve((1, 1), 1) == Unresolved()
    with pytest.raises(ValueError):
        resolve((0, 0), -1)


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_verdicts_are_exclusive_and_monotone(y, z, f):
    v = resolve((y, z), f)
    assert not (y > f and z > f and isinstance(v, Refuted))
    # one more vote never flips a decided verdict to the other decision
    for more in ((y + 1, z), (y, z + 1)):
        w = resolve(more, f)
        if isinstance(v, Found):
            assert isinstance(w, Found)
        if isinstance(v, Refuted) and more[0] == y:
            assert isinstance(w, Refuted)
