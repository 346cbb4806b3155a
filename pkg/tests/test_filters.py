import numpy as np
import pytest

from evcorner import FilterConfig, InvalidParameter, SensorGeometry, refractory_filter, sp_filter
from evcorner.synth import random_stream

from conftest import make_stream
from oracles import brute_refractory, brute_sp


def test_refractory_keep_drop_keep(geometry):
    s = make_stream(geometry, [(0, 5, 5), (3000, 5, 5), (11000, 5, 5)])
    out = refractory_filter(s, 5000)
    assert [e.t for e in out] == [0, 11000]


def test_refractory_zero_period_is_identity(geometry):
    s = random_stream(geometry, 500, seed=1)
    out = refractory_filter(s, 0)
    assert out is s


def test_refractory_measures_against_last_retained(geometry):
    # 0 keep, 4000 drop, 8000 drop (8000 - 0 > 5000? no: vs retained 0 -> 8000-0=8000 > 5000 keep)
    s = make_stream(geometry, [(0, 1, 1), (4000, 1, 1), (8000, 1, 1)])
    out = refractory_filter(s, 5000)
    assert [e.t for e in out] == [0, 8000]


def test_refractory_matches_brute_force():
    g = SensorGeometry(48, 48)
    s = random_stream(g, 10_000, duration_us=400_000, seed=7)
    out = refractory_filter(s, 5000)
    keep = brute_refractory(s, 5000)
    assert np.array_equal(out.t, s.t[keep])
    assert np.array_equal(out.x, s.x[keep])


def test_refractory_idempotent():
    g = SensorGeometry(32, 32)
    s = random_stream(g, 5000, duration_us=200_000, seed=9)
    once = refractory_filter(s, 5000)
    twice = refractory_filter(once, 5000)
    assert np.array_equal(once.t, twice.t) and np.array_equal(once.x, twice.x)


def test_sp_lone_event_dropped(geometry):
    s = make_stream(geometry, [(1000, 10, 10)])
    assert len(sp_filter(s, 10_000, 1)) == 0


def test_sp_adjacent_pair_second_kept(geometry):
    s = make_stream(geometry, [(1000, 10, 10), (1100, 11, 10)])
    out = sp_filter(s, 10_000, 1)
    assert [e.t for e in out] == [1100]


def test_sp_far_apart_in_time_dropped(geometry):
    s = make_stream(geometry, [(1000, 10, 10), (50_000, 11, 10)])
    assert len(sp_filter(s, 10_000, 1)) == 0


def test_sp_matches_brute_force():
    g = SensorGeometry(48, 48)
    s = random_stream(g, 10_000, duration_us=300_000, seed=13)
    out = sp_filter(s, 10_000, 1)
    keep = brute_sp(s, 10_000, 1)
    assert np.array_equal(out.t, s.t[keep])
    assert np.array_equal(out.x, s.x[keep])


def test_sp_idempotent_on_all_noise_fixture(geometry):
    # widely separated events: everything is dropped, and an empty stream
    # is a fixed point
    events = [(100_000 * i + 1, (7 * i) % 60, (11 * i) % 60) for i in range(20)]
    s = make_stream(geometry, events)
    once = sp_filter(s, 10_000, 1)
    assert len(once) == 0
    twice = sp_filter(once, 10_000, 1)
    assert len(twice) == 0


def test_sp_second_pass_only_sheds_leading_support(geometry):
    # raw-event support means a cluster's opener is dropped while its
    # followers stay; re-filtering can therefore shed the new opener but
    # never add events
    events = [(1000 + 10 * i, 20 + (i % 2), 20) for i in range(50)]
    s = make_stream(geometry, events)
    once = sp_filter(s, 10_000, 1)
    twice = sp_filter(once, 10_000, 1)
    assert len(once) == 49
    assert len(twice) == 48
    assert np.array_equal(twice.t, once.t[1:])


def test_filters_output_subset_in_order():
    g = SensorGeometry(32, 32)
    s = random_stream(g, 3000, duration_us=100_000, seed=17)
    for out in (refractory_filter(s, 2000), sp_filter(s, 5000, 1)):
        assert len(out) <= len(s)
        assert np.all(np.diff(out.t.astype(np.int64)) >= 0)
        seen = set(zip(s.t.tolist(), s.x.tolist(), s.y.tolist()))
        assert all((int(t), int(x), int(y)) in seen
                   for t, x, y in zip(out.t, out.x, out.y))


def test_filter_config_validation():
    with pytest.raises(InvalidParameter):
        FilterConfig(refractory_us=-1)
    with pytest.raises(InvalidParameter):
        refractory_filter(random_stream(SensorGeometry(8, 8), 10), -5)
