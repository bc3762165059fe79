import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from byzline.line_model import (BadStart, NonMonotoneTime, Q, SpeedExceeded, Target, Trajectory,
                                first_visit, format_rational, parse_rational, position_at, validate)

RAY = Trajectory.of([(0, 0)], 1)
ZIG = Trajectory.of([(0, 0), (1, 1), (4, -2)], 0)


def F(v):
    v = Q(v)
    return Fraction(int(v.numerator), int(v.denominator))


def _interp_oracle(points, tv, t):
    # independent: walk the segments with stdlib Fraction arithmetic
    pts = [(F(a), F(b)) for a, b in points]
    t = F(t)
    for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
        if t0 <= t <= t1:
            return p0 + (p1 - p0) * (t - t0) / (t1 - t0)
    return pts[-1][1] + F(tv) * (t - pts[-1][0])


def test_position_examples():
    assert position_at(RAY, 5) == 5
    assert position_at(ZIG, 2) == 0
    assert position_at(Trajectory.of([(0, 0), (1, 1)], -1), 3) == -1


def test_position_matches_oracle():
    for t in [Q(0), Q(1, 2), Q(1), Q(5, 2), Q(4), Q(9)]:
        assert F(position_at(ZIG, t)) == _interp_oracle([(0, 0), (1, 1), (4, -2)], 0, t)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        position_at(RAY, -1)


def test_first_visit_examples():
    assert first_visit(RAY, 7) == 7
    assert first_visit(ZIG, -1) == 3
    assert first_visit(RAY, -1) is None


def test_first_visit_respects_start():
    assert first_visit(ZIG, 0, 0) == 0
    assert first_visit(ZIG, 0, Q(1, 2)) == 2
    assert ZIG.first_visit(Q(1, 2), 2) is None


def test_validate_examples():
    validate(Trajectory.of([(0, 0), (1, 1)]))
    with pytest.raises(SpeedExceeded) as exc:
        validate(Trajectory.of([(0, 0), (1, 2)]))
    assert exc.value.segment == 0
    with pytest.raises(BadStart):
        validate(Trajectory.of([(0, 1), (1, 2)]))
    with pytest.raises(NonMonotoneTime):
        validate(Trajectory.of([(0, 0), (1, 1), (1, 1)]))
    with pytest.raises(SpeedExceeded):
        validate(Trajectory.of([(0, 0)], 2))


def test_rational_text_round_trip():
    assert parse_rational("3/6") == Q(1, 2)
    assert format_rational(Q(6, -4)) == "-3/2"
    assert format_rational(5) == "5/1"
    for bad in ["0.5", "1/0", "x", "1/-2", ""]:
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_target():
    assert Target(-1, 3).position == -3
    with pytest.raises(ValueError):
        Target(1, 0)
    with pytest.raises(ValueError):
        Target(0, 1)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=64).map(Q)


@st.composite
def trajectories(draw):
    n = draw(st.integers(0, 5))
    t, p, pts = Q(0), Q(0), [(Q(0), Q(0))]
    for _ in range(n):
        dt = draw(st.fractions(min_value=Fraction(1, 16), max_value=5, max_denominator=16).map(Q))
        v = draw(st.fractions(min_value=-1, max_value=1, max_denominator=8).map(Q))
        t, p = t + dt, p + v * dt
        pts.append((t, p))
    tv = draw(st.fractions(min_value=-1, max_value=1, max_denominator=8).map(Q))
    return Trajectory(tuple(pts), tv)


@given(trajectories(), st.lists(st.fractions(min_value=0, max_value=30, max_denominator=32), min_size=2, max_size=6))
def test_speed_bound_holds_on_samples(traj, times):
    validate(traj)
    samples = sorted({Q(t) for t in times} | {t for t, _ in traj.breakpoints})
    for a, b in zip(samples, samples[1:]):
        assert abs(position_at(traj, b) - position_at(traj, a)) <= b - a


@given(trajectories(), rationals, st.fractions(min_value=0, max_value=10, max_denominator=8).map(Q))
def test_first_visit_lands_on_target(traj, x, start):
    t = first_visit(traj, x, start)
    if t is not None:
        assert t >= start
        assert position_at(traj, t) == x


@given(rationals, rationals)
def test_rational_arithmetic_is_exact_and_canonical(a, b):
    assert (a + b) - b == a
    for got, want in ((a + b, F(a) + F(b)), (a - b, F(a) - F(b)), (a * b, F(a) * F(b))):
        assert F(got) == want
        assert got.denominator > 0
        assert math.gcd(int(got.numerator), int(got.denominator)) == 1
        assert parse_rational(format_rational(got)) == got
