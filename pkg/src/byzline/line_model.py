"""Exact positions, times and piecewise-linear robot trajectories on the line.

Every continuous quantity is an exact ``gmpy2.mpq`` rational, so nothing here
can overflow or round.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from gmpy2 import mpq

Rational = type(mpq())


def Q(value, den=None) -> Rational:
    """Exact rational from an int, Fraction, mpq or ``num, den`` pair."""
    return mpq(value) if den is None else mpq(value, den)


RobotId = int
Number = Union[int, Rational]

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")


def parse_rational(text: str) -> Rational:
    """Parse ``"num/den"`` or an integer literal. Decimals are rejected."""
    match = _RATIONAL_RE.match(str(text))
    if not match:
        raise ValueError(f"not a rational of the form num/den: {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Q(int(num), int(den) if den is not None else 1)


def format_rational(value: Number) -> str:
    value = Q(value)
    return f"{value.numerator}/{value.denominator}"


class TrajectoryError(ValueError):
    """Base class for trajectory invariant violations."""


class BadStart(TrajectoryError):
    pass


class NonMonotoneTime(TrajectoryError):
    def __init__(self, segment: int):
        super().__init__(f"breakpoint times not strictly increasing at segment {segment}")
        self.segment = segment


class SpeedExceeded(TrajectoryError):
    def __init__(self, segment: int, speed: Rational):
        super().__init__(f"segment {segment} has speed {speed} > 1")
        self.segment = segment
        self.speed = speed


@dataclass(frozen=True)
class Target:
    side: int
    distance: Rational

    def __post_init__(self):
        if self.side not in (-1, 1):
            raise ValueError("target side must be -1 or +1")
        if Q(self.distance) <= 0:
            raise ValueError("target distance must be positive")
        object.__setattr__(self, "distance", Q(self.distance))

    @property
    def position(self) -> Rational:
        return self.side * self.distance


@dataclass(frozen=True)
class Trajectory:
    """Turning points ``(time, position)`` plus the velocity kept after the last one."""

    breakpoints: Tuple[Tuple[Rational, Rational], ...]
    terminal_velocity: Rational = Q(0)

    @classmethod
    def of(cls, points: Sequence[Tuple[Number, Number]], terminal_velocity: Number = 0) -> "Trajectory":
        pts = tuple((Q(t), Q(p)) for t, p in points)
        return cls(pts, Q(terminal_velocity))

    def position_at(self, t: Number) -> Rational:
        return position_at(self, t)

    def first_visit(self, x: Number, start: Number = 0) -> Optional[Rational]:
        return first_visit(self, x, start)


def position_at(traj: Trajectory, t: Number) -> Rational:
    t = Q(t)
    if t < 0:
        raise ValueError("time must be non-negative")
    pts = traj.breakpoints
    for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
        if t0 <= t <= t1:
            return p0 + (p1 - p0) * (t - t0) / (t1 - t0)
    t_last, p_last = pts[-1]
    return p_last + traj.terminal_velocity * (t - t_last)


def _segments(traj: Trajectory):
    pts = traj.breakpoints
    for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
        yield t0, p0, t1, (p1 - p0) / (t1 - t0)
    t_last, p_last = pts[-1]
    yield t_last, p_last, None, traj.terminal_velocity


def first_visit(traj: Trajectory, x: Number, start: Number = 0) -> Optional[Rational]:
    """Earliest time ``t >= start`` at which the trajectory is at ``x``, or None."""
    x, start = Q(x), Q(start)
    for t0, p0, t1, v in _segments(traj):
        if t1 is not None and t1 < start:
            continue
        lo = max(t0, start)
        p_lo = p0 + v * (lo - t0)
        if p_lo == x:
            return lo
        if v == 0:
            continue
        hit = t0 + (x - p0) / v
        if hit > lo and (t1 is None or hit <= t1):
            return hit
    return None


def validate(traj: Trajectory) -> None:
    """Raise the first violated invariant, or return None if the trajectory is valid."""
    pts = traj.breakpoints
    if not pts or pts[0] != (0, 0):
        raise BadStart("trajectory must start at the origin at time 0")
    for i, ((t0, p0), (t1, p1)) in enumerate(zip(pts, pts[1:])):
        if t1 <= t0:
            raise NonMonotoneTime(i)
        if abs(p1 - p0) > t1 - t0:
            raise SpeedExceeded(i, abs(p1 - p0) / (t1 - t0))
    if abs(traj.terminal_velocity) > 1:
        raise SpeedExceeded(len(pts) - 1, abs(traj.terminal_velocity))
