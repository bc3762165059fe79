import pytest

from byzline.engine import StrategyInapplicable
from byzline.line_model import Q
from byzline.strategies import (STRATEGY_NAMES, make_exchange_chain, make_fifths, make_middle_groups,
                                make_strategy, make_thirds, make_two_group, make_zigzag_cohort, rec1_moves,
                                rec2_moves)


def test_two_group_sizes():
    assert make_two_group(6, 1).plan.sizes() == {"L": 3, "R": 3}
    assert make_two_group(11, 2).plan.sizes() == {"L": 6, "R": 5}
    with pytest.raises(StrategyInapplicable):
        make_two_group(5, 1)


def test_thirds_sizes():
    s = make_thirds(2)
    assert s.n == 8 and s.plan.sizes() == {"L": 3, "C": 2, "R": 3}
    assert make_thirds(8).n == 28
    with pytest.raises(StrategyInapplicable, match="2 mod 3"):
        make_thirds(3)


def test_fifths_sizes():
    s = make_fifths(4)
    assert s.n == 12 and s.plan.sizes() == {"L": 6, "R": 6}
    assert make_fifths(9).n == 26
    with pytest.raises(StrategyInapplicable):
        make_fifths(5)


def test_middle_group_sizes():
    s = make_middle_groups(4, 3)
    assert s.plan.sizes() == {"L": 6, "M1": 1, "M2": 1, "M3": 1, "R": 6}
    assert s.n == 15
    velocities = [v for _, _, v in s.plan.groups]
    assert velocities == [-1, Q(-1, 2), 0, Q(1, 2), 1]
    assert make_middle_groups(6, 5).n == 21
    for f, i in [(4, 2), (5, 3), (0, 3)]:
        with pytest.raises(StrategyInapplicable):
            make_middle_groups(f, i)


def test_zigzag_needs_majority():
    assert make_zigzag_cohort(5, 2).n == 5
    with pytest.raises(StrategyInapplicable):
        make_zigzag_cohort(4, 2)


def test_rec2_step_counts():
    here, far = list(range(6)), list(range(6, 12))
    to_x, to_far, to_origin = rec2_moves(here, far, 4, 2)
    assert len(to_far) == 6 and len(to_x) == 5 and not to_origin
    assert len(here) + len(to_x) == 2 * 4 + 3 * 2 // 2 == 11


def test_rec1_step_counts():
    f, k = 13, 4
    here, far = list(range(f + k)), list(range(f + k, 2 * (f + k)))
    to_x, to_far, to_origin = rec1_moves(here, far, f, k)
    assert (len(to_x), len(to_far), len(to_origin)) == (9, 4, 6)
    # per-position counts after the step add back up to n
    at_far = len(far) - len(to_x) + len(to_far)
    at_x = len(here) + len(to_x) - len(to_far) - len(to_origin)
    assert at_far == 4 * (f - k) // 3 and len(to_origin) == 2 * (f - k) // 3
    assert at_x == 4 * k
    assert at_far + at_x + len(to_origin) == 2 * (f + k)


def test_chain_preconditions():
    make_exchange_chain(4, [("rec1", 1)])
    with pytest.raises(StrategyInapplicable, match="k >= f/4"):
        make_exchange_chain(4, [("rec1", 0)])
    with pytest.raises(StrategyInapplicable, match="even"):
        make_exchange_chain(19, [("rec2", 9)])
    with pytest.raises(StrategyInapplicable, match="4 mod 5"):
        make_exchange_chain(4, [("rec2", 2)])
    with pytest.raises(StrategyInapplicable):
        make_exchange_chain(4, [])
    s = make_exchange_chain(19, [("rec2", 10)])
    assert s.n == 58


def test_chain_padding():
    assert make_exchange_chain(13, [("rec1", 4)], pad=1).n == 36
    with pytest.raises(StrategyInapplicable):
        make_exchange_chain(13, [("rec1", 4)], pad=-1)


def test_make_strategy_by_name():
    for name in STRATEGY_NAMES:
        params = {"chain": {"schedule": [("rec2", 10)]}, "middle": {"i": 3}}.get(name, {})
        f = {"two_group": 1, "zigzag": 1, "thirds": 2, "fifths": 4, "chain": 19, "middle": 4}.get(name)
        n = {"two_group": 6, "zigzag": 3}.get(name)
        s = make_strategy(name, n, f, **params)
        assert s.name == name
    with pytest.raises(StrategyInapplicable):
        make_strategy("spiral", 3, 1)
    with pytest.raises(StrategyInapplicable):
        make_strategy("thirds", 9, 2)
    with pytest.raises(StrategyInapplicable):
        make_strategy("p41", 5, 1)


def test_ordered_speeds_bounded():
    for s in [make_middle_groups(4, 3), make_middle_groups(6, 5), make_thirds(2)]:
        assert all(abs(v) <= 1 for _, _, v in s.plan.groups)


def test_make_strategy_derives_missing_n():
    assert make_strategy("two_group", f=2).n == 10
    assert make_strategy("zigzag", f=2).n == 5
