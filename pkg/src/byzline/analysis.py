"""Feasibility classes, the density and small-instance tables, and the alpha bound."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .adversary import best_response
from .engine import StrategyInapplicable
from .line_model import Q, Rational, format_rational
from .strategies import make_fifths, make_middle_groups, make_strategy, make_thirds, make_two_group


class Feasibility(str, Enum):
    TRIVIAL_OPTIMAL = "TrivialOptimal"
    NONTRIVIAL = "Nontrivial"
    UNSOLVABLE = "Unsolvable"


def feasibility(n: int, f: int) -> Feasibility:
    if n < 1 or f < 0:
        raise ValueError(f"need n >= 1 and f >= 0, got (n, f) = ({n}, {f})")
    if n <= 2 * f:
        return Feasibility.UNSOLVABLE
    if n >= 4 * f + 2:
        return Feasibility.TRIVIAL_OPTIMAL
    return Feasibility.NONTRIVIAL


# Distance used whenever the zigzag cohort is measured: just past a turning
# point, where the doubling schedule is at its worst.
ZIGZAG_PROBE_D = Q(2 ** 6) + Q(1, 64)


@dataclass(frozen=True)
class Certification:
    """A concrete instance whose exhaustive worst case backs a table bound."""

    strategy: str
    n: int
    f: int
    params: Tuple[Tuple[str, object], ...] = ()
    d: Rational = Q(1)

    def build(self):
        return make_strategy(self.strategy, self.n, self.f, **dict(self.params))


@dataclass(frozen=True)
class DensityRow:
    beta_upper: Rational
    ub_ratio: int
    lb_ratio: int
    strategy: str
    certification: Optional[Certification] = None


_CHAIN13 = Certification("chain", 36, 13, (("schedule", (("rec1", 4),)), ("pad", 1)))
_CHAIN19 = Certification("chain", 58, 19, (("schedule", (("rec2", 10),)),))


def density_table() -> List[DensityRow]:
    return [
        DensityRow(Q(1, 4), 1, 1, "two_group", Certification("two_group", 6, 1)),
        DensityRow(Q(3, 10), 2, 2, "thirds", Certification("thirds", 8, 2)),
        DensityRow(Q(1, 3), 3, 2, "fifths", Certification("fifths", 12, 4)),
        DensityRow(Q(5, 14), 3, 3, "fifths", Certification("fifths", 12, 4)),
        DensityRow(Q(13, 34), 4, 3, "chain(rec1)+thirds", _CHAIN13),
        DensityRow(Q(19, 46), 5, 3, "chain(rec2)+fifths", _CHAIN19),
        DensityRow(Q(47, 110), 6, 3, "chain(rec1)"),
        DensityRow(Q(65, 146), 7, 3, "chain(rec2)"),
        DensityRow(Q(157, 396), 8, 3, "chain(rec1)"),
        DensityRow(Q(1, 2), 9, 3, "zigzag", Certification("zigzag", 3, 1, d=ZIGZAG_PROBE_D)),
    ]


@dataclass(frozen=True)
class SmallInstanceRow:
    n: int
    f: int
    strategy: str
    ub: str
    lb: str
    d: Rational = Q(1)
    note: str = ""


def table1_rows() -> List[SmallInstanceRow]:
    zz = "UB 9d, conjectured optimal"
    return [
        SmallInstanceRow(3, 1, "zigzag", "9", "3.93", ZIGZAG_PROBE_D, zz),
        SmallInstanceRow(4, 1, "p41", "3", "3"),
        SmallInstanceRow(5, 1, "p51", "2", "2"),
        SmallInstanceRow(6, 1, "two_group", "1", "1"),
        SmallInstanceRow(5, 2, "zigzag", "9", "3.57", ZIGZAG_PROBE_D, zz),
        SmallInstanceRow(6, 2, "p62", "4", "3"),
    ]


def _write_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def table1_csv(m: int, node_budget: int = 10 ** 7) -> str:
    rows = []
    for row in table1_rows():
        strategy = make_strategy(row.strategy, row.n, row.f)
        rep = best_response(strategy, row.n, row.f, m, row.d, node_budget=node_budget)
        ratio = rep.sup_ratio
        rows.append([row.n, row.f, row.strategy, format_rational(row.d), ratio.numerator, ratio.denominator,
                     row.ub, row.lb, str(rep.exhaustive).lower(), row.note])
    header = ["n", "f", "strategy", "d", "measured_ratio_num", "measured_ratio_den", "ub", "lb", "exhaustive", "note"]
    return _write_csv(header, rows)


def certify(row: DensityRow, m: int, node_budget: int = 10 ** 7):
    if row.certification is None:
        return None
    c = row.certification
    return best_response(c.build(), c.n, c.f, m, c.d, node_budget=node_budget)


def table2_csv(m: int, node_budget: int = 10 ** 7) -> str:
    rows = []
    for row in density_table():
        rep = certify(row, m, node_budget)
        cert = [row.certification.f, rep.sup_ratio.numerator, rep.sup_ratio.denominator] if rep else ["", "", ""]
        rows.append([row.beta_upper.numerator, row.beta_upper.denominator, row.ub_ratio, row.lb_ratio,
                     row.strategy] + cert)
    header = ["beta_num", "beta_den", "ub", "lb", "strategy", "certified_f", "measured_ratio_num",
              "measured_ratio_den"]
    return _write_csv(header, rows)


# --- finite-f sweeps ----------------------------------------------------------

_FAMILIES: Dict[str, Tuple[Callable[..., object], Callable[..., Rational]]] = {
    "two_group": (lambda f, **p: make_two_group(4 * f + 2, f), lambda **p: Q(1)),
    "thirds": (lambda f, **p: make_thirds(f), lambda **p: Q(2)),
    "fifths": (lambda f, **p: make_fifths(f), lambda **p: Q(3)),
    "middle": (lambda f, i=3, **p: make_middle_groups(f, i), lambda i=3, **p: 3 - Q(2, i + 1)),
}


@dataclass
class ProbeResult:
    family: str
    bound: Rational
    ratios: List[Tuple[int, int, Rational, bool]] = field(default_factory=list)  # (f, n, ratio, exhaustive)
    label: str = "empirical"

    @property
    def max_ratio(self) -> Rational:
        return max(r for _, _, r, _ in self.ratios)

    @property
    def within_bound(self) -> bool:
        return all(r <= self.bound for _, _, r, _ in self.ratios)


def asymptotic_probe(family: str, f_seq: Sequence[int], m: int, **params) -> ProbeResult:
    """Worst ratio of a strategy family at each f, checked against the family bound."""
    if family not in _FAMILIES:
        raise StrategyInapplicable(f"no probe family {family!r}; choose from {', '.join(_FAMILIES)}")
    build, bound = _FAMILIES[family]
    result = ProbeResult(family, bound(**params))
    for f in f_seq:
        strategy = build(f, **params)
        rep = best_response(strategy, strategy.n, f, m)
        result.ratios.append((f, strategy.n, rep.sup_ratio, rep.exhaustive))
    return result


# --- the (3, 1) lower-bound constant -------------------------------------------

def _bounds(alpha: Rational) -> Tuple[Rational, Rational]:
    return (alpha - 1) / 2, 2 / (alpha - 3)


def alpha_feasible(alpha) -> bool:
    """Is there x < y with a <= x, y <= b and a <= y/x <= b, for a = (alpha-1)/2, b = 2/(alpha-3)?

    Since a > 1 the ratio condition forces x < y, and the smallest reachable y
    is a * a, so on the closure the system is feasible exactly when a**2 <= b.
    """
    alpha = Q(alpha)
    if alpha <= 3:
        raise ValueError("alpha must exceed 3")
    a, b = _bounds(alpha)
    return a * a <= b


def alpha_grid_feasible(alpha, step=Q(1, 256)) -> bool:
    """Brute-force check of the same system with x and y restricted to multiples of ``step``."""
    alpha, step = Q(alpha), Q(step)
    if alpha <= 3:
        raise ValueError("alpha must exceed 3")
    a, b = _bounds(alpha)
    j = math.ceil(a / step)
    while j * step <= b:
        x = j * step
        lo, hi = max(a * x, x + step), min(b, b * x)
        if math.ceil(lo / step) <= math.floor(hi / step):
            return True
        j += 1
    return False


def alpha_max(tolerance) -> Rational:
    """Largest feasible alpha in (3, 5), to within ``tolerance`` from below."""
    tolerance = Q(tolerance)
    if not 0 < tolerance < 1:
        raise ValueError("tolerance must lie in (0, 1)")
    lo, hi = Q(3), Q(5)
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if alpha_feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo
