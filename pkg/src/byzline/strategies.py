"""Search strategies as state machines reacting to conflicts and verdicts.

Roles are ``"L"``/``"R"`` (search groups), ``"C"`` (waits at the origin) and
``"M<j>"`` (middle group ``j``).  After every resolution the default resume
sends L robots left and R robots right at unit speed.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .engine import ONE, STOP, ZERO, StrategyInapplicable, goto, ray
from .line_model import Q, Rational


@dataclass(frozen=True)
class GroupPlan:
    groups: Tuple[Tuple[str, Tuple[int, ...], Rational], ...]  # (name, members, initial velocity)

    @classmethod
    def build(cls, sizes: Sequence[Tuple[str, int, Rational]]) -> "GroupPlan":
        groups, nxt = [], 0
        for name, size, velocity in sizes:
            groups.append((name, tuple(range(nxt, nxt + size)), Q(velocity)))
            nxt += size
        return cls(tuple(groups))

    @property
    def n(self) -> int:
        return sum(len(m) for _, m, _ in self.groups)

    def members(self, name: str) -> Tuple[int, ...]:
        for g, m, _ in self.groups:
            if g == name:
                return m
        return ()

    def sizes(self) -> Dict[str, int]:
        return {g: len(m) for g, m, _ in self.groups}


def _side_role(x) -> str:
    return "R" if x > 0 else "L"


def _opposite(role: str) -> str:
    return "L" if role == "R" else "R"


class Strategy:
    name = "base"

    def __init__(self, n: int, f: int, plan: GroupPlan):
        self.n, self.f, self.plan = n, f, plan
        self.roles: Dict[int, str] = {}
        for g, members, _ in plan.groups:
            for i in members:
                self.roles[i] = g[0] if g[0] in "LRC" else g
        self.phase = 0

    def check(self, n: int, f: int):
        if (n, f) != (self.n, self.f):
            raise StrategyInapplicable(f"{self.name} was built for (n, f) = ({self.n}, {self.f}), not ({n}, {f})")

    def clone(self) -> "Strategy":
        other = copy.copy(self)
        other.roles = dict(self.roles)
        return other

    def describe(self) -> str:
        return self.name

    # --- hooks --------------------------------------------------------------
    def start(self, sim):
        return {i: [ray(v)] for _, members, v in self.plan.groups for i in members if v != 0}

    def on_conflict(self, sim, claim):
        return self.escalate(sim, claim)

    def on_stall(self, sim, claim):
        return None

    def on_resolved(self, sim, claim, verdict):
        return self.resume(sim)

    # --- shared behaviour ---------------------------------------------------
    def resume(self, sim):
        self.rebalance(sim)
        orders = {}
        for i in sim.active_robots():
            role = self.roles[i]
            if role == "L":
                orders[i] = [ray(-1)]
            elif role == "R":
                orders[i] = [ray(1)]
            else:
                orders[i] = [STOP]
        return orders

    def rebalance(self, sim):
        """Top up any search side holding at most f_remaining robots.

        A side that small could meet the target with only faulty members and
        never hear an announcement.  Recruits come from the origin group first,
        then from the other side's surplus.
        """
        need = sim.f_remaining + 1
        for side in ("L", "R"):
            group = self.group_at(sim, side)
            if len(group) >= need:
                continue
            other = self.group_at(sim, _opposite(side))
            pool = sorted(self.group_at(sim, "C")) + sorted(other, reverse=True)[: max(0, len(other) - need)]
            for i in pool[: need - len(group)]:
                self.roles[i] = side

    def escalate(self, sim, claim):
        """Send every robot that has not yet voted on the claim to it."""
        x = claim.position
        orders = {}
        for i in sim.active_robots():
            if not sim.visited(i, x) and sim.vel[i] == 0:
                orders[i] = [goto(x)]
                self.roles[i] = _side_role(x)
        return orders

    def group_at(self, sim, role: str, position=None) -> List[int]:
        out = [i for i in sim.active_robots() if self.roles[i] == role]
        if position is not None:
            out = [i for i in out if sim.pos[i] == position]
        return out

    def front(self, sim, role: str):
        members = self.group_at(sim, role)
        if not members:
            return None
        positions = [sim.pos[i] for i in members]
        return max(positions) if role == "R" else min(positions)


class TwoGroup(Strategy):
    name = "two_group"

    def __init__(self, n: int, f: int):
        if n < 4 * f + 2:
            raise StrategyInapplicable(f"two_group needs n >= 4f+2 = {4 * f + 2}, got n = {n}")
        left = (n + 1) // 2
        super().__init__(n, f, GroupPlan.build([("L", left, -1), ("R", n - left, 1)]))


class ZigzagCohort(Strategy):
    """All robots travel together on the doubling zigzag with radii r0 * 2**k."""

    name = "zigzag"
    turns = 80

    def __init__(self, n: int, f: int, r0=ONE):
        if n <= 2 * f:
            raise StrategyInapplicable(f"zigzag needs n >= 2f+1, got (n, f) = ({n}, {f})")
        r0 = Q(r0)
        if r0 <= 0:
            raise StrategyInapplicable("zigzag initial radius must be positive")
        self.r0 = r0
        super().__init__(n, f, GroupPlan.build([("C", n, 0)]))

    def describe(self):
        return f"zigzag(r0={self.r0})"

    def radius(self, k: int) -> Rational:
        return self.r0 * 2 ** k * (1 if k % 2 == 0 else -1)

    def start(self, sim):
        legs = [goto(self.radius(k)) for k in range(self.turns)]
        return {i: list(legs) for i in range(self.n)}

    def resume(self, sim):
        # the cohort is never frozen for long: an unresolved vote cannot occur
        orders = {}
        for i in sim.active_robots():
            remaining = [leg for leg in sim.legs[i]]
            if not remaining:
                remaining = [goto(self.radius(k)) for k in range(self.turns) if abs(self.radius(k)) > abs(sim.pos[i])]
            orders[i] = remaining
        return orders


class Crossing(Strategy):
    """Two search groups; a conflict pulls robots from the opposite group (4,1)."""

    name = "p41"

    def __init__(self, n: int = 4, f: int = 1):
        if (n, f) != (4, 1):
            raise StrategyInapplicable(f"p41 is defined for (n, f) = (4, 1) only, got ({n}, {f})")
        super().__init__(n, f, GroupPlan.build([("L", 2, -1), ("R", 2, 1)]))

    def on_conflict(self, sim, claim):
        x = claim.position
        helpers = self.group_at(sim, _opposite(_side_role(x)))
        if not helpers:
            return self.escalate(sim, claim)
        a = helpers[0]
        self.roles[a] = _side_role(x)
        return {a: [goto(x)]}


class Spare(Strategy):
    """Search groups plus robots waiting at the origin that resolve conflicts."""

    name = "p51"

    def __init__(self, n: int = 5, f: int = 1):
        if (n, f) != (5, 1):
            raise StrategyInapplicable(f"p51 is defined for (n, f) = (5, 1) only, got ({n}, {f})")
        super().__init__(n, f, GroupPlan.build([("L", 2, -1), ("C", 1, 0), ("R", 2, 1)]))

    def on_conflict(self, sim, claim):
        return self.send_center(sim, claim)

    def send_center(self, sim, claim):
        x = claim.position
        center = self.group_at(sim, "C")
        if not center:
            return self.escalate(sim, claim)
        for i in center:
            self.roles[i] = _side_role(x)
        return {i: [goto(x)] for i in center}


class SixTwo(Spare):
    """(6, 2): redistribution after the first conflict, then the (5, 1) scheme."""

    name = "p62"

    def __init__(self, n: int = 6, f: int = 2):
        if (n, f) != (6, 2):
            raise StrategyInapplicable(f"p62 is defined for (n, f) = (6, 2) only, got ({n}, {f})")
        Strategy.__init__(self, n, f, GroupPlan.build([("L", 3, -1), ("R", 3, 1)]))

    def on_conflict(self, sim, claim):
        if self.phase > 0:
            return self.send_center(sim, claim)
        x = claim.position
        side = _side_role(x)
        here = self.group_at(sim, side, x)
        votes = sim.votes_at(x)
        helpers = self.group_at(sim, _opposite(side))
        if len(here) != 3 or len(helpers) < 2 or sim.f_remaining != 2:
            return self.escalate(sim, claim)
        other = sim.pos[helpers[0]]
        orders = {}
        for i in helpers[:2]:
            orders[i] = [goto(x)]
            self.roles[i] = side
        yes = sorted(i for i in here if i in votes.yes_voters)
        no = sorted(i for i in here if i in votes.no_voters)
        if len(yes) == 2:
            self.phase = 1
        else:
            # one no-voter waits at the origin, the other voters refill the far group
            self.phase = 2
            orders[no[0]] = [goto(ZERO)]
            self.roles[no[0]] = "C"
            for i in (yes[0], no[1]):
                orders[i] = [goto(other)]
                self.roles[i] = _opposite(side)
        return orders


class Thirds(Spare):
    """Center group of (2f+2)/3 robots relocates to the first real conflict."""

    name = "thirds"

    def __init__(self, f: int, n: Optional[int] = None):
        if f % 3 != 2:
            raise StrategyInapplicable(f"thirds needs f = 2 mod 3, got f = {f}")
        size = (10 * f + 4) // 3
        if n is not None and n != size:
            raise StrategyInapplicable(f"thirds with f = {f} needs n = (10f+4)/3 = {size}, got {n}")
        side = (4 * f + 1) // 3
        Strategy.__init__(self, size, f, GroupPlan.build([("L", side, -1), ("C", (2 * f + 2) // 3, 0), ("R", side, 1)]))


class Fifths(Strategy):
    """Exchange (3f+3)/5 robots across and (2f+2)/5 yes- plus no-voters back."""

    name = "fifths"

    def __init__(self, f: int, n: Optional[int] = None):
        if f % 5 != 4:
            raise StrategyInapplicable(f"fifths needs f = 4 mod 5, got f = {f}")
        size = (14 * f + 4) // 5
        if n is not None and n != size:
            raise StrategyInapplicable(f"fifths with f = {f} needs n = (14f+4)/5 = {size}, got {n}")
        side = (7 * f + 2) // 5
        super().__init__(size, f, GroupPlan.build([("L", side, -1), ("R", side, 1)]))
        self.base_f = f

    def on_conflict(self, sim, claim):
        if self.phase > 0:
            return self.escalate(sim, claim)
        self.phase = 1
        return exchange_fifths(self, sim, claim, self.base_f)


def exchange_fifths(strategy: Strategy, sim, claim, f: int):
    x = claim.position
    side = _side_role(x)
    here = strategy.group_at(sim, side, x)
    far = strategy.group_at(sim, _opposite(side))
    if not far:
        return strategy.escalate(sim, claim)
    dest = sim.pos[far[0]]
    votes = sim.votes_at(x)
    over = far[: (3 * f + 3) // 5]
    back_count = (2 * f + 2) // 5
    back = [i for i in here if i in votes.yes_voters][:back_count]
    back += [i for i in here if i in votes.no_voters][:back_count]
    orders = {}
    for i in over:
        orders[i] = [goto(x)]
        strategy.roles[i] = side
    for i in back:
        orders[i] = [goto(dest)]
        strategy.roles[i] = _opposite(side)
    return orders


def _check_rec_step(variant: str, f: int, k: int):
    if variant == "rec2":
        if k <= 0 or k % 2 or k > f:
            raise StrategyInapplicable(f"rec2 step needs even 0 < k <= f, got f = {f}, k = {k}")
    elif variant == "rec1":
        if k <= 0 or 4 * k < f:
            raise StrategyInapplicable(f"rec1 step needs k >= f/4, got f = {f}, k = {k}")
        if (f - k) % 3 or 4 * f < 10 * k:
            raise StrategyInapplicable(f"rec1 step needs 3 | f-k and 4f >= 10k, got f = {f}, k = {k}")
    else:
        raise StrategyInapplicable(f"unknown chain step {variant!r}")


class ExchangeChain(Strategy):
    """Chained exchange steps, each trading 2x of time for >= k identifications.

    ``schedule`` lists ``(variant, k)`` steps applied to successive real
    conflicts.  The terminal configuration is finished by the fifths exchange
    (rec2 chains) or by the center robots placed at the origin (rec1 chains).
    ``pad`` adds that many robots to each initial search group; the literal
    step counts only balance asymptotically, so small f may need a few.
    """

    name = "chain"

    def __init__(self, f: int, schedule: Sequence[Tuple[str, int]], pad: int = 0):
        if not schedule:
            raise StrategyInapplicable("chain schedule must not be empty")
        if pad < 0:
            raise StrategyInapplicable("chain padding must be non-negative")
        self.schedule = tuple((v, int(k)) for v, k in schedule)
        self.pad = pad
        stage_f, group = f, f + self.schedule[0][1]
        self.stage_f = []
        for variant, k in self.schedule:
            _check_rec_step(variant, stage_f, k)
            if group is None or group < stage_f + k:
                raise StrategyInapplicable(
                    f"{variant} step with f = {stage_f}, k = {k} needs groups of {stage_f + k}, have {group}")
            self.stage_f.append(stage_f)
            if variant == "rec2":
                group = stage_f + k // 2
            else:
                group = None
            stage_f -= k
        self.base_f = stage_f
        last = self.schedule[-1][0]
        if last == "rec2":
            if stage_f % 5 != 4 and stage_f > 0:
                raise StrategyInapplicable(f"terminal fifths stage needs f = 4 mod 5, got {stage_f}")
            if stage_f > 0 and group < (7 * stage_f + 2) // 5:
                raise StrategyInapplicable(f"terminal groups of {group} are smaller than (7f+2)/5")
        n = 2 * (f + self.schedule[0][1] + pad)
        super().__init__(n, f, GroupPlan.build([("L", n // 2, -1), ("R", n // 2, 1)]))

    def describe(self):
        steps = ",".join(f"{v}:{k}" for v, k in self.schedule)
        return f"chain({steps}{f';pad={self.pad}' if self.pad else ''})"

    def on_conflict(self, sim, claim):
        step = self.phase
        self.phase += 1
        if step < len(self.schedule):
            variant, k = self.schedule[step]
            if variant == "rec2":
                return self._rec2(sim, claim, self.stage_f[step], k)
            return self._rec1(sim, claim, self.stage_f[step], k)
        if step == len(self.schedule):
            if self.schedule[-1][0] == "rec2":
                return exchange_fifths(self, sim, claim, self.base_f)
            return Spare.send_center(self, sim, claim)
        return self.escalate(sim, claim)

    def _rec2(self, sim, claim, f, k):
        return self._exchange(sim, claim, rec2_moves, f, k)

    def _rec1(self, sim, claim, f, k):
        return self._exchange(sim, claim, rec1_moves, f, k)

    def _exchange(self, sim, claim, moves, f, k):
        x = claim.position
        side = _side_role(x)
        here = self.group_at(sim, side, x)
        far = self.group_at(sim, _opposite(side))
        if not far:
            return self.escalate(sim, claim)
        dest = sim.pos[far[0]]
        to_x, to_far, to_origin = moves(here, far, f, k)
        orders = {}
        for i in to_x:
            orders[i] = [goto(x)]
            self.roles[i] = side
        for i in to_far:
            orders[i] = [goto(dest)]
            self.roles[i] = _opposite(side)
        for i in to_origin:
            orders[i] = [goto(ZERO)]
            self.roles[i] = "C"
        return orders


def rec2_moves(here: Sequence[int], far: Sequence[int], f: int, k: int):
    """Everyone at the claim crosses over; f + k/2 of the far group come to the claim."""
    return list(far[: f + k // 2]), list(here), []


def rec1_moves(here: Sequence[int], far: Sequence[int], f: int, k: int):
    """f - k come to the claim; (4f - 10k)/3 leave for the far side and 2(f - k)/3 for the origin."""
    to_far = (4 * f - 10 * k) // 3
    to_origin = 2 * (f - k) // 3
    return list(far[: f - k]), list(here[:to_far]), list(here[to_far: to_far + to_origin])


class MiddleGroups(Strategy):
    """Search groups plus i middle groups kept at equal spacing between the fronts."""

    name = "middle"

    def __init__(self, f: int, i: int):
        if i < 3 or i % 2 == 0:
            raise StrategyInapplicable(f"middle groups need odd i >= 3, got i = {i}")
        if f <= 0 or f % (i + 1):
            raise StrategyInapplicable(f"middle groups need f = 0 mod {i + 1}, got f = {f}")
        self.i = i
        search = (i + 2) * f // (i + 1) + 1
        middle = f // (i + 1)
        sizes = [("L", search, -1)]
        sizes += [(f"M{j}", middle, Q(-1) + Q(2 * j, i + 1)) for j in range(1, i + 1)]
        sizes += [("R", search, 1)]
        plan = GroupPlan.build(sizes)
        super().__init__(plan.n, f, plan)

    def describe(self):
        return f"middle(i={self.i})"

    def on_conflict(self, sim, claim):
        x = claim.position
        orders = {}
        for i in sim.active_robots():
            if self.roles[i].startswith("M"):
                orders[i] = [goto(x)]
        if not orders:
            return self.escalate(sim, claim)
        return orders

    def on_resolved(self, sim, claim, verdict):
        x = claim.position
        for i in sim.active_robots():
            if self.roles[i].startswith("M") and sim.pos[i] == x and sim.visited(i, x):
                self.roles[i] = _side_role(x)
        orders = Strategy.resume(self, sim)
        left, right = self.front(sim, "L"), self.front(sim, "R")
        if left is None or right is None:
            return orders
        for r in sim.active_robots():
            role = self.roles[r]
            if not role.startswith("M"):
                continue
            j = int(role[1:])
            frac = Q(j, self.i + 1)
            station = left + frac * (right - left)
            speed = -1 + 2 * frac
            here = sim.pos[r]
            if here == station:
                orders[r] = [ray(speed)]
                continue
            s = 1 if station > here else -1
            tau = (station - here) / (s - speed)
            orders[r] = [goto(here + s * tau), ray(speed)]
        return orders


STRATEGY_NAMES = ("two_group", "zigzag", "p41", "p51", "p62", "thirds", "fifths", "chain", "middle")


def make_two_group(n: int, f: int) -> Strategy:
    return TwoGroup(n, f)


def make_zigzag_cohort(n: int, f: int, r0=ONE) -> Strategy:
    return ZigzagCohort(n, f, r0)


def make_4_1() -> Strategy:
    return Crossing(4, 1)


def make_5_1() -> Strategy:
    return Spare(5, 1)


def make_6_2() -> Strategy:
    return SixTwo(6, 2)


def make_thirds(f: int) -> Strategy:
    return Thirds(f)


def make_fifths(f: int) -> Strategy:
    return Fifths(f)


def make_exchange_chain(f: int, schedule, pad: int = 0) -> Strategy:
    return ExchangeChain(f, schedule, pad)


def make_middle_groups(f: int, i: int) -> Strategy:
    return MiddleGroups(f, i)


def make_strategy(name: str, n: Optional[int] = None, f: Optional[int] = None, **params) -> Strategy:
    """Build a strategy by its harness name, checking (n, f) where given."""
    if name == "two_group":
        s = TwoGroup(n if n is not None else 4 * f + 2, f)
    elif name == "zigzag":
        s = ZigzagCohort(n if n is not None else 2 * f + 1, f, params.get("r0", ONE))
    elif name == "p41":
        s = Crossing(n if n is not None else 4, f if f is not None else 1)
    elif name == "p51":
        s = Spare(n if n is not None else 5, f if f is not None else 1)
    elif name == "p62":
        s = SixTwo(n if n is not None else 6, f if f is not None else 2)
    elif name == "thirds":
        s = Thirds(f, n)
    elif name == "fifths":
        s = Fifths(f, n)
    elif name == "chain":
        s = ExchangeChain(f, params["schedule"], int(params.get("pad", 0)))
    elif name == "middle":
        s = MiddleGroups(f, int(params["i"]))
    else:
        raise StrategyInapplicable(f"unknown strategy {name!r}; choose from {', '.join(STRATEGY_NAMES)}")
    if n is not None and s.n != n:
        raise StrategyInapplicable(f"{name} with f = {s.f} uses n = {s.n}, not {n}")
    return s
