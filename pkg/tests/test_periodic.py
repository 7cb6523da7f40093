import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camu.cesaro import EmpiricalCylinderMeasure, empirical_measure
from camu.core import TorusConfig, iterate_torus, rule_from_table
from camu.measures import bernoulli
from camu.periodic import (
    PeriodicPoint,
    canonical,
    density_check,
    find_periodic_points,
    orbit_table,
    primitive_root,
    torus_cycle,
)
from camu.rng import RandomStream
from camu.zoo import eca, gilman_fs, identity_rule, shift_rule


def test_torus_cycle_examples():
    info = torus_cycle(gilman_fs(), TorusConfig((0, 2)))
    assert (info.preperiod, info.period) == (0, 1)
    info = torus_cycle(eca(90), TorusConfig((0, 0, 0, 1)))
    assert (info.preperiod, info.period) == (2, 1)
    info = torus_cycle(gilman_fs(), TorusConfig((1,)))
    assert (info.preperiod, info.period) == (0, 1)


def test_torus_cycle_bound():
    assert torus_cycle(shift_rule(2), TorusConfig((1, 0, 0, 0, 0)), max_steps=3) is None


def test_orbit_table_matches_visited_map():
    rule = eca(30)
    table = orbit_table(rule, 8)
    words = list(itertools.product((0, 1), repeat=8))
    for code in (0, 1, 77, 200, 255):
        info = torus_cycle(rule, TorusConfig(words[code]))
        assert (table.preperiod[code], table.period[code]) == (info.preperiod, info.period)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=8, max_size=8), st.integers(1, 8))
def test_orbit_table_pp_plus_p(table, L):
    rule = rule_from_table(2, 1, table)
    tab = orbit_table(rule, L)
    assert (tab.preperiod + tab.period <= 2 ** L).all()
    words = list(itertools.product((0, 1), repeat=L))
    for code in range(0, 2 ** L, max(1, 2 ** L // 8)):
        pp, p = int(tab.preperiod[code]), int(tab.period[code])
        t = TorusConfig(words[code])
        assert iterate_torus(rule, t, pp + p) == iterate_torus(rule, t, pp)


def test_canonical_forms():
    assert primitive_root((0, 2, 0, 2)) == (0, 2)
    assert canonical((2, 0, 2, 0)) == (0, 2)
    assert canonical((1, 0, 0)) == (0, 0, 1)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=8), st.integers(0, 7))
def test_canonical_rotation_invariant(word, s):
    s %= len(word)
    assert canonical(word) == canonical(word[s:] + word[:s])


def test_fs_fixed_points_over_02():
    search = find_periodic_points(gilman_fs(), 6)
    assert not search.partial
    for L in range(1, 7):
        for w in itertools.product((0, 2), repeat=L):
            pt = search.lookup(w)
            assert pt is not None and pt.period == 1
    assert search.lookup((1,)).period == 1
    assert all(p.verify(gilman_fs()) for p in search)


def test_identity_all_fixed():
    search = find_periodic_points(identity_rule(2), 5)
    for w in itertools.product((0, 1), repeat=5):
        assert search.lookup(w).period == 1


def test_shift_points_period_divides_length():
    search = find_periodic_points(shift_rule(2), 4)
    for p in search:
        assert len(p.word) % p.period == 0 or p.period == len(p.word)


def test_no_duplicate_rotations():
    search = find_periodic_points(eca(110), 6)
    names = [p.word for p in search]
    assert len(names) == len(set(names))
    assert all(canonical(w) == w for w in names)


def test_density_fs_exact_support():
    search = find_periodic_points(gilman_fs(), 6)
    sup = EmpiricalCylinderMeasure.uniform_on(itertools.product((0, 2), repeat=4), k=3)
    report = density_check(gilman_fs(), search.points, sup, 0.0)
    assert report.coverage == 1.0


def test_density_identity_and_shift():
    mu = bernoulli([0.5, 0.5])
    emp = empirical_measure(shift_rule(2), mu, 3, 5, 2000, RandomStream(1))
    search = find_periodic_points(shift_rule(2), 4)
    assert density_check(shift_rule(2), search.points, emp, 0.0).coverage == 1.0
    search = find_periodic_points(identity_rule(2), 3)
    assert density_check(identity_rule(2), search.points, emp, 0.0).coverage == 1.0


def test_density_rejects_bogus_points():
    sup = EmpiricalCylinderMeasure.uniform_on([(1, 1)], k=3)
    fake = [PeriodicPoint((1, 2), 1)]  # 12 is not fixed under F_s
    report = density_check(gilman_fs(), fake, sup, 0.0)
    assert report.coverage == 0.0


def test_csv_formats():
    search = find_periodic_points(gilman_fs(), 2)
    lines = search.to_csv().splitlines()
    assert lines[0] == "L,word,preperiod,period"
    assert "1,0,0,1" in lines and "2,02,0,1" in lines


def test_sampled_search_flags_partial(monkeypatch):
    import camu.periodic as per
    monkeypatch.setattr(per, "STATE_CAP", 100)
    search = per.find_periodic_points(gilman_fs(), 5, budget=200, stream=RandomStream(1))
    assert search.partial
    assert all(p.verify(gilman_fs()) for p in search)
    assert np.all([len(p.word) <= 5 for p in search])
