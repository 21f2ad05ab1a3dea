import logging

import numpy as np
import pytest

from tvauction.auction import ValueDistribution
from tvauction.common import ConfigError
from tvauction.environments import (Constant, Cyclic, Langevin, Sequence,
                                    TwoState, langevin_step, schedule_at)

H = 1e-3


def _walk(schedule, steps, seed=1):
    rng = np.random.default_rng(seed)
    schedule.reset(H)
    return [schedule_at(schedule, rng, k * H) for k in range(steps)]


def test_constant():
    schedule = Constant.build(state=[10, 20])
    assert set(_walk(schedule, 100)) == {ValueDistribution(10, 20)}
    assert schedule.switches == 0
    assert schedule.params() == {'state': [10, 20]}


def test_build_errors():
    with pytest.raises(ConfigError) as e:
        Constant.build(state=[20, 10])
    assert e.value.field == 'state'
    with pytest.raises(ConfigError) as e:
        Constant.build()
    assert e.value.field == 'state'
    with pytest.raises(ConfigError) as e:
        Constant.build(state=[10, 20], foo=1)
    assert e.value.field == 'foo'
    with pytest.raises(ConfigError):
        TwoState.build(states=[[10, 20], [10, 30]])
    with pytest.raises(ConfigError):
        TwoState.build(states=[[10, 20], [20, 40], [30, 50]])
    with pytest.raises(ConfigError) as e:
        TwoState.build(states=[[10, 20], [20, 40]], stay_range=[2, 1])
    assert e.value.field == 'stay_range'
    with pytest.raises(ConfigError) as e:
        Cyclic.build(states=[[10, 20], [20, 40]], cycle_order=[0, 2])
    assert e.value.field == 'cycle_order'
    with pytest.raises(ConfigError) as e:
        Sequence.build(states=[[10, 20]], sequence=[0, 0], durations=[1])
    assert e.value.field == 'durations'


def test_parse():
    schedule = TwoState.parse(['--states', '10,20', '20,40'])
    assert schedule.states == [ValueDistribution(10, 20),
                               ValueDistribution(20, 40)]
    assert tuple(schedule.stay_range) == (0.0, 2.0)


def test_two_state_alternates():
    schedule = TwoState.build(states=[[20, 40], [10, 20]])
    path = _walk(schedule, 20000)
    assert path[0] == ValueDistribution(20, 40)
    visits = [path[0]] + [b for a, b in zip(path, path[1:]) if a != b]
    assert all(a != b for a, b in zip(visits, visits[1:]))
    assert schedule.switches == len(visits) - 1
    # mean staying time 1 over t = 20
    assert 5 < schedule.switches < 40
    assert schedule.sorted_states == [ValueDistribution(10, 20),
                                      ValueDistribution(20, 40)]


def test_schedule_reproducible():
    a = _walk(TwoState.build(states=[[10, 20], [20, 40]]), 5000, seed=7)
    b = _walk(TwoState.build(states=[[10, 20], [20, 40]]), 5000, seed=7)
    assert a == b


def test_cyclic_order():
    states = [[10, 20], [10, 30], [20, 30]]
    schedule = Cyclic.build(states=states, cycle_order=[0, 2, 1],
                            stay_range=[0.0, H])
    path = _walk(schedule, 7)
    expected = [states[i] for i in (0, 2, 1, 0, 2, 1, 0)]
    assert path == [ValueDistribution(*s) for s in expected]
    assert not schedule.strictly_ordered


def test_sequence_dwell_rounding():
    states = [[10, 20], [20, 40], [10, 30]]
    schedule = Sequence.build(states=states, sequence=[0, 1, 2],
                              durations=[0.0025, 0.001, 1.0])
    path = _walk(schedule, 8)
    expected = [states[i] for i in (0, 0, 0, 1, 2, 2, 2, 2)]
    assert path == [ValueDistribution(*s) for s in expected]


def test_sequence_last_state_persists():
    schedule = Sequence.build(states=[[10, 20], [20, 40]], sequence=[1, 0],
                              durations=[0.002, 0.001])
    path = _walk(schedule, 50)
    assert path[:2] == [ValueDistribution(20, 40)] * 2
    assert set(path[2:]) == {ValueDistribution(10, 20)}
    assert schedule.switches == 1


def test_used_before_reset():
    with pytest.raises(RuntimeError):
        Constant.build(state=[10, 20]).at(np.random.default_rng(1), 0.0)


def test_langevin_shared_noise_keeps_width():
    schedule = Langevin.build(noise=[5, 5])
    path = _walk(schedule, 5000)
    assert path[0] == ValueDistribution(20, 40)
    # exact internally; v_M - v_m only rounds
    assert all(abs(d.width - 20.0) <= 1e-13 for d in path)
    assert len({d.v_m for d in path}) > 1000


def test_langevin_mean_reversion():
    schedule = Langevin.build(noise=[0, 0], initial=[30, 60])
    schedule.reset(H)
    d = langevin_step(schedule, np.random.default_rng(1), H)
    assert d.v_m == pytest.approx(30 - 10 * H)
    assert d.width == pytest.approx(30 - 10 * H)


def test_langevin_guard(caplog):
    schedule = Langevin.build(v_bar=[0.0, 0.1], noise=[0, 10])
    with caplog.at_level(logging.WARNING):
        path = _walk(schedule, 2000)
    assert schedule.guard_triggers > 0
    assert min(d.width for d in path) >= schedule.width_min
    assert 'clamped' in caplog.text


def test_langevin_reproducible():
    a = _walk(Langevin.build(noise=[5, 10]), 3000, seed=3)
    b = _walk(Langevin.build(noise=[5, 10]), 3000, seed=3)
    c = _walk(Langevin.build(noise=[5, 10]), 3000, seed=4)
    assert a == b
    assert a != c


def test_langevin_bad_noise():
    with pytest.raises(ConfigError) as e:
        Langevin.build(noise=[-1, 5])
    assert e.value.field == 'noise'
