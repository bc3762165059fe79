"""Deterministic event-driven simulation of Byzantine search on the line.

The simulation is a resumable state machine: :meth:`Simulation.advance` runs
until the run terminates or a faulty-robot decision is needed.  Decisions are
answered either by a fixed policy (:func:`simulate`) or by the exhaustive
adversary search, which clones the simulation at every decision point.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .line_model import Q, Rational, Target, Trajectory, format_rational
from .voting import (
    Claim,
    ClaimKind,
    Found,
    Unresolved,
    Vote,
    VoteLedger,
    resolve,
)

ZERO = Q(0)
ONE = Q(1)


class SimulationError(RuntimeError):
    pass


class TimeCapExceeded(SimulationError):
    pass


class StrategyInapplicable(ValueError):
    """The strategy's preconditions on (n, f) or its parameters do not hold."""


class EventKind(str, Enum):
    ARRIVAL = "Arrival"
    ANNOUNCEMENT = "Announcement"
    RESOLUTION = "Resolution"
    TERMINATION = "Termination"


_PRIORITY = {EventKind.ARRIVAL: 0, EventKind.ANNOUNCEMENT: 1, EventKind.RESOLUTION: 2, EventKind.TERMINATION: 3}


@dataclass(frozen=True)
class Event:
    time: Rational
    kind: EventKind
    position: Rational
    robot: Optional[int] = None
    value: str = ""

    def sort_key(self):
        return (self.time, _PRIORITY[self.kind], abs(self.position), self.position,
                -1 if self.robot is None else self.robot)

    def to_line(self) -> str:
        robot = "-" if self.robot is None else str(self.robot)
        parts = [format_rational(self.time), self.kind.value, robot, format_rational(self.position)]
        if self.value:
            parts.append(self.value)
        return " ".join(parts)


@dataclass(frozen=True)
class Transcript:
    events: Tuple[Event, ...]
    search_time: Rational
    identified_faulty: FrozenSet[int]
    sound: bool
    faulty: FrozenSet[int]
    paths: Tuple[Trajectory, ...]

    def to_text(self) -> str:
        return "\n".join(e.to_line() for e in self.events) + "\n"


def competitive_ratio(tr: Transcript, d) -> Rational:
    d = Q(d)
    if d <= 0:
        raise ValueError("distance must be positive")
    if not tr.sound:
        raise ValueError("competitive ratio is undefined for an unsound transcript")
    return tr.search_time / d


# --- orders -----------------------------------------------------------------
# A robot's orders are a list of legs.  ("to", q, speed) moves toward q and
# stops there (or continues with the next leg); ("vel", v) moves forever.

def goto(q, speed=ONE):
    return ("to", Q(q), Q(speed))


def ray(v):
    return ("vel", Q(v))


STOP = ("vel", ZERO)


@dataclass
class ClaimState:
    position: Rational
    raised: Rational
    status: str  # "active" | "withheld" | "closed"
    claimants: FrozenSet[int]


@dataclass
class Decision:
    """A batch of robots first visiting ``position`` at ``time``.

    ``kind`` is "claim" (fresh point, a lie is a false announcement), "target"
    (a lie is silence) or "vote" (arrival at a claimed point, a lie is the
    wrong vote).
    """

    kind: str
    position: Rational
    time: Rational
    robots: Tuple[int, ...]
    allowed_counts: Optional[Tuple[int, ...]] = None  # claim batches under pruning


class _Cons(tuple):
    """Persistent singly linked list node ``(head, tail)`` for cheap clones."""


def _cons_iter(node):
    out = []
    while node is not None:
        out.append(node[0])
        node = node[1]
    out.reverse()
    return out


class Simulation:
    def __init__(self, n: int, f: int, target: Target, strategy, *, faulty: Optional[Iterable[int]] = None,
                 claim_points: Iterable = (), time_cap=None, prune: bool = False):
        if n < 2 * f + 1:
            raise StrategyInapplicable(f"n = {n} < 2f+1 = {2 * f + 1}: search is unsolvable")
        self.n, self.f = n, f
        self.target = target
        self.target_pos = target.position
        self.faulty = None if faulty is None else frozenset(faulty)
        if self.faulty is not None and (len(self.faulty) > f or not self.faulty <= set(range(n))):
            raise ValueError("faulty set must be at most f robot ids")
        self.time_cap = Q(time_cap) if time_cap is not None else 20 * target.distance
        if self.time_cap <= 0:
            raise ValueError("time cap must be positive")
        self.prune = prune
        self.grid = tuple(sorted(set(Q(p) for p in claim_points) - {ZERO}))
        self.strategy = strategy

        self.time = ZERO
        self.pos = [ZERO] * n
        self.vel = [ZERO] * n
        self.legs: List[Tuple] = [()] * n
        self.lo = [ZERO] * n
        self.hi = [ZERO] * n
        self.paths = [((ZERO, ZERO), None)] * n
        self.active = [True] * n
        self.identified: FrozenSet[int] = frozenset()
        self.marked: FrozenSet[int] = frozenset()
        self.ledger = VoteLedger()
        self.claims: Dict[Rational, ClaimState] = {}
        self.active_claim: Optional[Rational] = None
        self.events = None
        self.pending: List[Decision] = []
        self.new_claims: List[Tuple[Rational, FrozenSet[int]]] = []
        self.voted_at: set = set()
        self.arrived: List[int] = []
        self.done = False
        self.search_time: Optional[Rational] = None
        self.final_position: Optional[Rational] = None
        self._poi_cache = None

        strategy.check(n, f)
        self._apply(strategy.start(self))

    # --- read-only helpers for strategies -----------------------------------
    @property
    def f_remaining(self) -> int:
        return self.f - len(self.identified)

    def active_robots(self) -> List[int]:
        return [i for i in range(self.n) if self.active[i]]

    def votes_at(self, x):
        return self.ledger.votes(x, self.time, self.identified)

    def visited(self, robot: int, x) -> bool:
        return self.lo[robot] <= x <= self.hi[robot]

    # --- cloning ------------------------------------------------------------
    def clone(self) -> "Simulation":
        other = Simulation.__new__(Simulation)
        other.__dict__.update(self.__dict__)
        other.pos = list(self.pos)
        other.vel = list(self.vel)
        other.legs = list(self.legs)
        other.lo = list(self.lo)
        other.hi = list(self.hi)
        other.paths = list(self.paths)
        other.active = list(self.active)
        other.ledger = self.ledger.copy()
        other.claims = {p: ClaimState(c.position, c.raised, c.status, c.claimants) for p, c in self.claims.items()}
        other.pending = list(self.pending)
        other.new_claims = list(self.new_claims)
        other.voted_at = set(self.voted_at)
        other.arrived = list(self.arrived)
        other.strategy = self.strategy.clone()
        return other

    # --- bookkeeping --------------------------------------------------------
    def _log(self, kind, position, robot=None, value=""):
        self.events = (Event(self.time, kind, Q(position), robot, value), self.events)

    def _set_velocity(self, i: int, v: Rational):
        if v != self.vel[i]:
            last = self.paths[i][0]
            if last[0] != self.time:
                self.paths[i] = ((self.time, self.pos[i]), self.paths[i])
            self.vel[i] = v

    def _start_leg(self, i: int):
        while self.legs[i]:
            leg = self.legs[i][0]
            if leg[0] == "vel":
                if abs(leg[1]) > 1:
                    raise SimulationError(f"ordered speed {leg[1]} exceeds 1")
                self._set_velocity(i, leg[1])
                return
            _, q, speed = leg
            if speed <= 0 or speed > 1:
                raise SimulationError(f"ordered speed {speed} outside (0, 1]")
            if q == self.pos[i]:
                self.legs[i] = self.legs[i][1:]
                continue
            self._set_velocity(i, speed if q > self.pos[i] else -speed)
            return
        self._set_velocity(i, ZERO)

    def _apply(self, orders):
        if not orders:
            return
        for i in sorted(orders):
            if not self.active[i]:
                continue
            self.legs[i] = tuple(orders[i])
            self._start_leg(i)

    def _freeze(self):
        for i in range(self.n):
            if self.active[i]:
                self.legs[i] = ()
                self._set_velocity(i, ZERO)

    def _poi(self) -> List[Rational]:
        if self._poi_cache is not None:
            return self._poi_cache
        pts = {self.target_pos}
        pts.update(p for p, c in self.claims.items() if c.status != "closed")
        if self.grid and self.active_claim is None and self._claims_possible():
            pts.update(self.grid)
        self._poi_cache = sorted(pts)
        return self._poi_cache

    def _claims_possible(self) -> bool:
        if not self.prune:
            return True
        budget = self.f - len(self.marked)
        f_rem = self.f_remaining
        groups: Dict[Tuple[Rational, Rational], List[int]] = {}
        for i in range(self.n):
            if self.active[i] and self.vel[i] != 0:
                groups.setdefault((self.pos[i], self.vel[i]), []).append(i)
        for members in groups.values():
            free = sum(1 for i in members if i in self.marked)
            liars = min(len(members), free + budget)
            if liars >= 1 and len(members) - liars <= f_rem:
                return True
        return False

    # --- main loop ----------------------------------------------------------
    def advance(self) -> Optional[Decision]:
        """Run until a decision is pending (returned) or the run ends (None)."""
        while not self.done:
            if self.pending:
                return self.pending[0]
            if self.new_claims or self.voted_at or self.arrived:
                self._settle()
                continue
            self._step()
        return None

    def decide(self, liars: Iterable[int]):
        decision = self.pending.pop(0)
        liars = frozenset(liars)
        if not liars <= set(decision.robots):
            raise SimulationError("liars must be drawn from the deciding batch")
        if self.faulty is not None:
            if not liars <= self.faulty:
                raise SimulationError("only faulty robots may lie")
        elif len(self.marked | liars) > self.f:
            raise SimulationError("lie budget exceeded")
        self.marked = self.marked | liars
        x = decision.position
        truth_here = x == self.target_pos
        if decision.kind == "vote":
            for i in decision.robots:
                says_yes = truth_here != (i in liars)
                self._record(i, x, Vote.YES if says_yes else Vote.NO,
                             ClaimKind.BROADCAST if says_yes else ClaimKind.SILENT)
            self.voted_at.add(x)
        else:
            if decision.kind == "target":
                announcers = frozenset(i for i in decision.robots if i not in liars)
            else:
                announcers = liars
            if announcers:
                self.new_claims.append((x, announcers))
                for i in decision.robots:
                    if i not in announcers:
                        self._record(i, x, Vote.NO, ClaimKind.SILENT)
            self._poi_cache = None

    def _record(self, i, x, vote, kind, time=None):
        claim = Claim(i, x, self.time if time is None else time, vote, kind)
        if self.ledger.record(claim):
            self._log(EventKind.ANNOUNCEMENT, x, i, vote.value)

    def _step(self):
        poi = self._poi()
        best = None
        for i in range(self.n):
            v = self.vel[i]
            if not self.active[i] or v == 0:
                continue
            p = self.pos[i]
            if v > 0:
                k = bisect.bisect_right(poi, self.hi[i])
                stop = poi[k] if k < len(poi) else None
            else:
                k = bisect.bisect_left(poi, self.lo[i]) - 1
                stop = poi[k] if k >= 0 else None
            leg = self.legs[i][0] if self.legs[i] else None
            if leg is not None and leg[0] == "to":
                q = leg[1]
                if stop is None or (q < stop if v > 0 else q > stop):
                    stop = q
            if stop is None:
                continue
            dt = (stop - p) / v
            if best is None or dt < best:
                best = dt
        if best is None:
            if self.active_claim is not None:
                claim = self.claims[self.active_claim]
                orders = self.strategy.on_stall(self, claim)
                if not orders:
                    orders = self.strategy.escalate(self, claim)
                if not orders:
                    raise SimulationError(f"conflict at {claim.position} cannot be resolved")
                self._apply(orders)
                self._poi_cache = None
                return
            raise TimeCapExceeded("no robot is moving and no conflict is active")
        t_next = self.time + best
        if t_next > self.time_cap:
            raise TimeCapExceeded(f"search exceeded time cap {self.time_cap}")
        self.time = t_next
        visits: Dict[Rational, List[int]] = {}

        def is_poi(q):
            k = bisect.bisect_left(poi, q)
            return k < len(poi) and poi[k] == q
        for i in range(self.n):
            v = self.vel[i]
            if not self.active[i] or v == 0:
                continue
            p = self.pos[i] + v * best
            self.pos[i] = p
            if p > self.hi[i]:
                self.hi[i] = p
                if is_poi(p):
                    visits.setdefault(p, []).append(i)
            elif p < self.lo[i]:
                self.lo[i] = p
                if is_poi(p):
                    visits.setdefault(p, []).append(i)
            leg = self.legs[i][0] if self.legs[i] else None
            if leg is not None and leg[0] == "to" and leg[1] == p:
                self.legs[i] = self.legs[i][1:]
                self._start_leg(i)
                self.arrived.append(i)
                self._log(EventKind.ARRIVAL, p, i)
        for x in sorted(visits, key=lambda q: (abs(q), q)):
            robots = tuple(sorted(visits[x]))
            claim = self.claims.get(x)
            if claim is not None and claim.status != "closed":
                self.pending.append(Decision("vote", x, self.time, robots))
            elif x == self.target_pos:
                self.pending.append(Decision("target", x, self.time, robots))
            elif x in self.grid and self.active_claim is None:
                allowed = self._allowed_claim_counts(x, robots)
                if allowed != (0,):
                    self.pending.append(Decision("claim", x, self.time, robots, allowed))

    def _allowed_claim_counts(self, x, robots) -> Tuple[int, ...]:
        free = sum(1 for i in robots if i in self.marked)
        top = min(len(robots), free + self.f - len(self.marked))
        if not self.prune:
            return tuple(range(top + 1))
        earlier = sum(1 for i in self.active_robots() if i not in robots and self.visited(i, x))
        f_rem = self.f_remaining
        return (0,) + tuple(c for c in range(1, top + 1) if earlier + len(robots) - c <= f_rem)

    # --- announcements, tallies, resolutions --------------------------------
    def _settle(self):
        new = sorted(self.new_claims, key=lambda c: (abs(c[0]), c[0], min(c[1])))
        self.new_claims = []
        voted = self.voted_at
        self.voted_at = set()
        self.arrived = []
        for x, announcers in new:
            for i in sorted(announcers):
                self._record(i, x, Vote.YES, ClaimKind.BROADCAST)
            self._record_latent(x)
            if x in self.claims and self.claims[x].status != "closed":
                continue
            self.claims[x] = ClaimState(x, self.time, "withheld", announcers)
            self._poi_cache = None
        if self.active_claim is not None and self.active_claim in voted:
            self._check_active()
        if self.active_claim is None:
            self._raise_withheld()

    def _record_latent(self, x):
        for i in range(self.n):
            if self.active[i] and self.visited(i, x) and not self.ledger.has_vote(i, x):
                first = Trajectory.of(self.path_points(i), self.vel[i]).first_visit(x)
                self._record(i, x, Vote.NO, ClaimKind.SILENT, time=first if first is not None else self.time)

    def _check_active(self):
        x = self.active_claim
        verdict = resolve(self.votes_at(x), self.f_remaining)
        if isinstance(verdict, Unresolved):
            return
        self.active_claim = None
        self._conclude(x, verdict)

    def _raise_withheld(self):
        while not self.done and self.active_claim is None:
            waiting = [c for c in self.claims.values() if c.status == "withheld"]
            if not waiting:
                return
            claim = min(waiting, key=lambda c: (c.raised, abs(c.position), c.position, min(c.claimants)))
            x = claim.position
            if not (self.votes_at(x).yes_voters):
                claim.status = "closed"
                self._poi_cache = None
                continue
            verdict = resolve(self.votes_at(x), self.f_remaining)
            if isinstance(verdict, Unresolved):
                claim.status = "active"
                self.active_claim = x
                self._poi_cache = None
                self._freeze()
                self._apply(self.strategy.on_conflict(self, claim))
                return
            self._conclude(x, verdict)

    def _conclude(self, x, verdict):
        claim = self.claims[x]
        claim.status = "closed"
        self._poi_cache = None
        if isinstance(verdict, Found):
            self._log(EventKind.RESOLUTION, x, None, "found")
            self._log(EventKind.TERMINATION, x)
            self.done = True
            self.search_time = self.time
            self.final_position = x
            self._freeze()
            return
        newly = verdict.newly_identified
        self._log(EventKind.RESOLUTION, x, None, "refuted:" + ",".join(map(str, sorted(newly))))
        for i in newly:
            self.legs[i] = ()
            self._set_velocity(i, ZERO)
            self.active[i] = False
        self.identified = self.identified | newly
        self._apply(self.strategy.on_resolved(self, claim, verdict))

    # --- results ------------------------------------------------------------
    def path_points(self, i: int) -> List[Tuple[Rational, Rational]]:
        pts = _cons_iter(self.paths[i])
        if pts[-1][0] != self.time:
            pts.append((self.time, self.pos[i]))
        return pts

    def transcript(self) -> Transcript:
        if not self.done:
            raise SimulationError("simulation has not terminated")
        events = tuple(sorted(_cons_iter(self.events), key=Event.sort_key))
        faulty = self.faulty if self.faulty is not None else self.marked
        paths = tuple(Trajectory.of(self.path_points(i), 0) for i in range(self.n))
        return Transcript(events, self.search_time, self.identified,
                          self.final_position == self.target_pos, frozenset(faulty), paths)


@dataclass(frozen=True)
class Scenario:
    n: int
    f: int
    target: Target
    strategy: object
    adversary: object = None
    faulty: Optional[FrozenSet[int]] = None
    time_cap: Optional[Rational] = None

    def __post_init__(self):
        if self.n < 2 * self.f + 1:
            raise StrategyInapplicable(f"n = {self.n} < 2f+1: search is unsolvable")


def simulate(scenario: Scenario) -> Transcript:
    from .adversary import Honest

    adversary = scenario.adversary if scenario.adversary is not None else Honest()
    faulty = scenario.faulty if scenario.faulty is not None else adversary.faulty_robots()
    if len(faulty) > scenario.f:
        raise ValueError("more faulty robots than f")
    sim = Simulation(scenario.n, scenario.f, scenario.target, scenario.strategy.clone(),
                     faulty=faulty, claim_points=adversary.claim_points(scenario.target),
                     time_cap=scenario.time_cap)
    while True:
        decision = sim.advance()
        if decision is None:
            return sim.transcript()
        sim.decide(adversary.choose(sim, decision))
