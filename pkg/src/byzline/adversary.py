"""Byzantine behaviour policies and the exhaustive worst-case search.

Every faulty choice happens when a robot first visits a position, so a run is
fully described by the set of ``(robot, position)`` pairs where a robot lied.
The exhaustive search assigns faultiness lazily: a robot becomes faulty the
first time the adversary makes it lie, within the global budget ``f``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .engine import Scenario, Simulation, Transcript, simulate
from .line_model import Q, Rational, Target, format_rational
from .strategies import GroupPlan


class AdversaryPolicy:
    def faulty_robots(self) -> FrozenSet[int]:
        return frozenset()

    def claim_points(self, target: Target) -> Tuple[Rational, ...]:
        return ()

    def choose(self, sim, decision) -> FrozenSet[int]:
        return frozenset()


class Honest(AdversaryPolicy):
    def __repr__(self):
        return "Honest()"


@dataclass(frozen=True)
class SilentAtTarget(AdversaryPolicy):
    which: FrozenSet[int]

    def faulty_robots(self):
        return frozenset(self.which)

    def choose(self, sim, decision):
        if decision.position != sim.target_pos:
            return frozenset()
        return frozenset(i for i in decision.robots if i in self.which)


@dataclass(frozen=True)
class FalseClaims(AdversaryPolicy):
    schedule: Tuple[Tuple[int, Rational], ...]

    def faulty_robots(self):
        return frozenset(r for r, _ in self.schedule)

    def claim_points(self, target):
        return tuple(sorted({Q(p) for _, p in self.schedule}))

    def choose(self, sim, decision):
        if decision.kind != "claim":
            return frozenset()
        wanted = {(r, Q(p)) for r, p in self.schedule}
        return frozenset(i for i in decision.robots if (i, decision.position) in wanted)


@dataclass(frozen=True)
class Scripted(AdversaryPolicy):
    """Robot ``r`` lies on its first visit to ``p`` for every ``(r, p)`` in ``lies``."""

    lies: Tuple[Tuple[int, Rational], ...]
    faulty: FrozenSet[int] = frozenset()

    def faulty_robots(self):
        return frozenset(self.faulty) | {r for r, _ in self.lies}

    def claim_points(self, target):
        return tuple(sorted({Q(p) for _, p in self.lies}))

    def choose(self, sim, decision):
        wanted = set(self.lies)
        return frozenset(i for i in decision.robots if (i, decision.position) in wanted)

    def describe(self) -> str:
        if not self.lies:
            return "honest"
        return ";".join(f"{r}@{format_rational(p)}" for r, p in self.lies)


@dataclass(frozen=True)
class GameTree(AdversaryPolicy):
    """Marker policy: decisions are branched by :func:`best_response`."""

    node_budget: int = 10 ** 7


@dataclass(frozen=True)
class Witness:
    faulty: Tuple[int, ...]
    policy: Scripted
    target: Target

    def key(self):
        return (self.faulty, self.policy.lies, self.target.side)

    def scenario(self, n: int, f: int, strategy) -> Scenario:
        return Scenario(n, f, self.target, strategy, self.policy, frozenset(self.faulty))


@dataclass
class WorstCaseReport:
    sup_ratio: Rational
    witness: Optional[Witness]
    m: int
    exhaustive: bool = True
    leaves: int = 0
    nodes: int = 0
    unsound: int = 0
    false_accusations: int = 0
    strategy: str = ""
    n: int = 0
    f: int = 0
    d: Rational = Q(1)

    def to_text(self) -> str:
        w = self.witness
        lines = [
            f"strategy {self.strategy}",
            f"n {self.n}",
            f"f {self.f}",
            f"d {format_rational(self.d)}",
            f"m {self.m}",
            f"sup_ratio {format_rational(self.sup_ratio)}",
            f"exhaustive {str(self.exhaustive).lower()}",
            f"leaves {self.leaves}",
            f"nodes {self.nodes}",
            f"unsound {self.unsound}",
        ]
        if w is not None:
            lines += [
                f"witness_target {w.target.side * w.target.distance}",
                f"witness_faulty {','.join(map(str, w.faulty)) or '-'}",
                f"witness_lies {w.policy.describe()}",
            ]
        return "\n".join(lines) + "\n"


def decision_options(sim: Simulation, decision) -> List[FrozenSet[int]]:
    """All liar sets for a batch, up to exchange of robots with identical history."""
    classes: Dict[tuple, List[int]] = {}
    for i in decision.robots:
        key = (i in sim.marked, sim.lo[i], sim.hi[i], sim.strategy.roles.get(i))
        classes.setdefault(key, []).append(i)
    groups = [sorted(v, reverse=True) for _, v in sorted(classes.items(), key=lambda kv: min(kv[1]))]
    budget = sim.f - len(sim.marked)
    allowed = set(decision.allowed_counts) if decision.allowed_counts is not None else None
    options = []
    for counts in itertools.product(*[range(len(g) + 1) for g in groups]):
        fresh = sum(c for c, g in zip(counts, groups) if g[0] not in sim.marked)
        if fresh > budget:
            continue
        if allowed is not None and sum(counts) not in allowed:
            continue
        options.append(frozenset(i for c, g in zip(counts, groups) for i in g[:c]))
    return options


class _Search:
    def __init__(self, d: Rational, node_budget: int):
        self.d = d
        self.budget = node_budget
        self.nodes = 0
        self.leaves = 0
        self.unsound = 0
        self.false_accusations = 0
        self.best: Optional[Rational] = None
        self.best_key = None
        self.best_witness: Optional[Witness] = None
        self.exhausted_budget = False
        self.leaf_hook = None

    def run(self, sim: Simulation, lies: Tuple):
        stack = [(sim, lies)]
        while stack:
            sim, lies = stack.pop()
            if self.nodes >= self.budget:
                self.exhausted_budget = True
                return
            self.nodes += 1
            decision = sim.advance()
            if decision is None:
                self._leaf(sim, lies)
                continue
            options = decision_options(sim, decision)
            children = []
            for k, liars in enumerate(options):
                child = sim if k == len(options) - 1 else sim.clone()
                child.decide(liars)
                extra = tuple((i, decision.position) for i in sorted(liars))
                children.append((child, lies + extra))
            stack.extend(reversed(children))

    def _leaf(self, sim: Simulation, lies):
        self.leaves += 1
        if sim.final_position != sim.target_pos:
            self.unsound += 1
            return
        if not sim.identified <= sim.marked:
            self.false_accusations += 1
        ratio = sim.search_time / self.d
        witness = Witness(tuple(sorted(sim.marked)), Scripted(tuple(sorted(lies))), sim.target)
        if self.leaf_hook is not None:
            self.leaf_hook(sim, witness)
        key = witness.key()
        if self.best is None or ratio > self.best or (ratio == self.best and key < self.best_key):
            self.best, self.best_key, self.best_witness = ratio, key, witness


def grid_points(d, m: int) -> Tuple[Rational, ...]:
    d = Q(d)
    pts = [d * j / m for j in range(1, m + 1)]
    return tuple(sorted(pts + [-p for p in pts]))


def best_response(strategy, n: int, f: int, m: int, d=1, *, node_budget: int = 10 ** 7,
                  prune: bool = True, sides: Sequence[int] = (1, -1), leaf_hook=None) -> WorstCaseReport:
    """Exact maximum competitive ratio over all lazy faulty behaviours on the claim grid.

    With ``prune`` the search skips false announcements that would be refuted
    the instant they are made; they cost no time and only expose the liars.
    """
    if m < 1:
        raise ValueError("grid resolution m must be at least 1")
    d = Q(d)
    strategy.check(n, f)
    search = _Search(d, node_budget)
    search.leaf_hook = leaf_hook
    for side in sides:
        target = Target(side, d)
        sim = Simulation(n, f, target, strategy.clone(), claim_points=grid_points(d, m), prune=prune)
        search.run(sim, ())
        if search.exhausted_budget:
            break
    return WorstCaseReport(
        sup_ratio=search.best if search.best is not None else Q(0),
        witness=search.best_witness,
        m=m,
        exhaustive=not search.exhausted_budget,
        leaves=search.leaves,
        nodes=search.nodes,
        unsound=search.unsound,
        false_accusations=search.false_accusations,
        strategy=strategy.describe(),
        n=n,
        f=f,
        d=d,
    )


def replay(report: WorstCaseReport, strategy) -> Transcript:
    return simulate(report.witness.scenario(report.n, report.f, strategy))


def _mirror_names(plan: GroupPlan) -> Dict[str, str]:
    names = [g for g, _, _ in plan.groups]
    out = {}
    for g, _, v in plan.groups:
        partner = [h for h, _, w in plan.groups if w == -v and len(plan.members(h)) == len(plan.members(g))]
        if g == "L" and "R" in names:
            out[g] = "R"
        elif g == "R" and "L" in names:
            out[g] = "L"
        elif v != 0 and partner:
            out[g] = partner[0]
        else:
            out[g] = g
    return out


def symmetry_prune(n: int, f: int, plan: GroupPlan) -> List[FrozenSet[int]]:
    """One faulty subset of size f per orbit under in-group permutation and mirroring."""
    if plan.n != n:
        raise ValueError("plan does not partition the n robots")
    names = [g for g, _, _ in plan.groups]
    sizes = [len(plan.members(g)) for g in names]
    mirror = _mirror_names(plan)
    seen = set()
    reps = []
    for counts in itertools.product(*[range(s + 1) for s in sizes]):
        if sum(counts) != f:
            continue
        by_name = dict(zip(names, counts))
        mirrored = tuple(by_name[mirror[g]] for g in names)
        canon = min(counts, mirrored)
        if canon in seen:
            continue
        seen.add(canon)
        reps.append(frozenset(i for g, c in zip(names, canon) for i in plan.members(g)[:c]))
    return reps
