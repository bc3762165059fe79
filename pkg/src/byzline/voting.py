"""Claim ledger and majority resolution of target announcements."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from .line_model import Q, Rational


class Vote(str, Enum):
    YES = "yes"
    NO = "no"


class ClaimKind(str, Enum):
    BROADCAST = "explicit-broadcast"
    SILENT = "implicit-silent-visit"


@dataclass(frozen=True)
class Claim:
    robot: int
    position: Rational
    time: Rational
    value: Vote
    kind: ClaimKind


@dataclass(frozen=True)
class VoteTally:
    position: Rational
    yes_voters: FrozenSet[int]
    no_voters: FrozenSet[int]

    @property
    def counts(self) -> Tuple[int, int]:
        return len(self.yes_voters), len(self.no_voters)


class Found:
    def __eq__(self, other):
        return isinstance(other, Found)

    def __hash__(self):
        return hash("Found")

    def __repr__(self):
        return "Found()"


@dataclass(frozen=True)
class Refuted:
    newly_identified: FrozenSet[int]


class Unresolved:
    def __eq__(self, other):
        return isinstance(other, Unresolved)

    def __hash__(self):
        return hash("Unresolved")

    def __repr__(self):
        return "Unresolved()"


Verdict = object  # Found | Refuted | Unresolved


class VoteLedger:
    """Per-position claim history.

    Only the first claim of a robot about a position is ever counted; a robot's
    vote on a position is fixed the first time it is there.
    """

    def __init__(self):
        self._by_position: Dict[Rational, Dict[int, Claim]] = {}

    def record(self, claim: Claim) -> bool:
        votes = self._by_position.setdefault(claim.position, {})
        if claim.robot in votes:
            return False
        votes[claim.robot] = claim
        return True

    def has_vote(self, robot: int, position: Rational) -> bool:
        return robot in self._by_position.get(position, ())

    def claims_at(self, position: Rational) -> List[Claim]:
        return list(self._by_position.get(position, {}).values())

    def positions(self) -> List[Rational]:
        return sorted(self._by_position)

    def copy(self) -> "VoteLedger":
        other = VoteLedger.__new__(VoteLedger)
        other._by_position = {p: dict(v) for p, v in self._by_position.items()}
        return other

    def votes(self, x, t, disregarded: Iterable[int] = ()) -> VoteTally:
        x, t = Q(x), Q(t)
        skip = set(disregarded)
        yes: Set[int] = set()
        no: Set[int] = set()
        for claim in self._by_position.get(x, {}).values():
            if claim.time > t or claim.robot in skip:
                continue
            (yes if claim.value is Vote.YES else no).add(claim.robot)
        return VoteTally(x, frozenset(yes), frozenset(no))


def tally(ledger: VoteLedger, x, t, disregarded: Iterable[int] = ()) -> Tuple[int, int]:
    """Return ``(yes, no)`` counts about ``x`` from claims made at or before ``t``."""
    return ledger.votes(x, t, disregarded).counts


def resolve(votes, f_remaining: int):
    """Apply the majority rule to a tally.

    ``votes`` is a :class:`VoteTally` or a plain ``(yes, no)`` pair; with a pair
    the refuted set is unknown and reported empty.
    """
    if f_remaining < 0:
        raise ValueError("f_remaining must be non-negative")
    if isinstance(votes, VoteTally):
        y, z = votes.counts
        yes_voters = votes.yes_voters
    else:
        y, z = votes
        yes_voters = frozenset()
    if y > f_remaining:
        return Found()
    if z > f_remaining:
        return Refuted(frozenset(yes_voters))
    return Unresolved()
