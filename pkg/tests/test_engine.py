import pytest

from byzline.adversary import FalseClaims, Scripted, SilentAtTarget
from byzline.engine import (Event, EventKind, Scenario, Simulation, StrategyInapplicable, TimeCapExceeded,
                            Transcript, competitive_ratio, simulate)
from byzline.line_model import Q, Target, validate
from byzline.strategies import (make_4_1, make_5_1, make_6_2, make_fifths, make_middle_groups, make_thirds,
                                make_two_group, make_zigzag_cohort)


def run(strategy, target, adversary=None):
    return simulate(Scenario(strategy.n, strategy.f, target, strategy, adversary))


def test_two_group_honest_finds_in_d():
    tr = run(make_two_group(6, 1), Target(1, 7))
    assert tr.search_time == 7 and tr.sound
    assert competitive_ratio(tr, 7) == 1


def test_p41_silent_at_target_costs_3d():
    d = Q(2)
    tr = run(make_4_1(), Target(1, d), SilentAtTarget(frozenset({3})))
    assert tr.search_time == 3 * d and tr.sound
    # hand trace: partner announces at d, the silent robot's visit counts as no,
    # an L robot walks 2d to the target and confirms
    assert tr.to_text() == (
        "2/1 Announcement 2 2/1 yes\n"
        "2/1 Announcement 3 2/1 no\n"
        "6/1 Arrival 0 2/1\n"
        "6/1 Announcement 0 2/1 yes\n"
        "6/1 Resolution - 2/1 found\n"
        "6/1 Termination - 2/1\n")


def test_p41_false_claim_half_way():
    tr = run(make_4_1(), Target(1, 1), FalseClaims(((3, Q(1, 2)),)))
    assert tr.search_time == 2 and tr.sound
    assert tr.identified_faulty == {3}


def test_p51_false_claim_half_way():
    tr = run(make_5_1(), Target(1, 1), FalseClaims(((4, Q(1, 2)),)))
    assert competitive_ratio(tr, 1) == Q(3, 2)


def test_thirds_false_claim_half_way():
    s = make_thirds(2)
    tr = run(s, Target(1, 1), FalseClaims(((7, Q(1, 2)),)))
    assert tr.search_time == Q(3, 2)


def test_fifths_conflict_at_target_takes_3d():
    s = make_fifths(4)
    tr = run(s, Target(1, 1), SilentAtTarget(frozenset({8, 9, 10, 11})))
    assert tr.search_time == 3 and tr.sound


def test_fifths_honest_left():
    assert run(make_fifths(4), Target(-1, 5)).search_time == 5


def test_p62_case1_found_after_helpers_cross():
    tr = run(make_6_2(), Target(-1, 1), SilentAtTarget(frozenset({2})))
    assert tr.search_time == 3


def test_p62_case2_second_conflict():
    x, x2, d = Q(1, 2), Q(3, 4), Q(1)
    tr = run(make_6_2(), Target(1, d), Scripted(((1, x2), (3, x))))
    assert tr.search_time == 2 * x + x2 + d
    assert tr.identified_faulty == {1, 3}


def test_zigzag_first_sweep_and_far_side():
    s = make_zigzag_cohort(3, 1)
    assert run(s, Target(1, 1)).search_time == 1
    eps = Q(1, 64)
    d = 2 + eps
    tr = run(s, Target(-1, d))
    # out to 1, back to -2, out to 4, back to -(2 + eps)
    assert tr.search_time == 2 * (1 + 2 + 4) + d


def test_middle_groups_conflict_at_d():
    s = make_middle_groups(4, 3)
    right = [i for i, r in s.roles.items() if r == "R"]
    tr = run(s, Target(1, 1), SilentAtTarget(frozenset(right[:4])))
    assert tr.search_time <= Q(5, 2)


def test_competitive_ratio_errors():
    tr = Transcript((), Q(2), frozenset(), False, frozenset(), ())
    with pytest.raises(ValueError):
        competitive_ratio(tr, 1)
    ok = Transcript((), Q(3), frozenset(), True, frozenset(), ())
    assert competitive_ratio(ok, 2) == Q(3, 2)
    with pytest.raises(ValueError):
        competitive_ratio(ok, 0)


def test_scenario_needs_majority():
    with pytest.raises(StrategyInapplicable):
        Scenario(4, 2, Target(1, 1), make_4_1())


def test_strategy_checked_against_n_f():
    with pytest.raises(StrategyInapplicable):
        Simulation(5, 1, Target(1, 1), make_4_1())


def test_time_cap():
    sim = Simulation(4, 1, Target(1, 1), make_4_1(), time_cap=Q(1, 2))
    with pytest.raises(TimeCapExceeded):
        sim.advance()


def test_event_order():
    a = Event(Q(1), EventKind.ANNOUNCEMENT, Q(1), 0, "yes")
    b = Event(Q(1), EventKind.ARRIVAL, Q(2), 3)
    c = Event(Q(1), EventKind.RESOLUTION, Q(-1), None, "found")
    assert sorted([c, a, b], key=Event.sort_key) == [b, a, c]


def test_paths_are_valid_and_stop_at_termination():
    tr = run(make_6_2(), Target(1, 1), Scripted(((1, Q(3, 4)), (3, Q(1, 2)))))
    for path in tr.paths:
        validate(path)
        assert path.breakpoints[-1][0] == tr.search_time


def test_determinism():
    s = make_fifths(4)
    adv = Scripted(((8, Q(1, 2)), (9, Q(1, 2)), (0, Q(-3, 4))))
    first = run(s, Target(-1, 1), adv)
    second = run(s, Target(-1, 1), adv)
    assert first == second
    assert first.to_text() == second.to_text()
