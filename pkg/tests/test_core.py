import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camu.core import (
    CoverageError,
    NeighborhoodLengthError,
    SymbolRangeError,
    TableLengthError,
    TorusConfig,
    WindowConfig,
    WindowTooShortError,
    apply_local,
    evolve_column,
    iterate_torus,
    rule_from_table,
    step_lightcone,
    step_torus,
)
from camu.zoo import eca, gilman_fs, identity_rule, shift_rule

from conftest import g_fs, naive_step, naive_torus


def test_index_convention_leftmost_most_significant():
    # k=3, r=1: neighborhood (0,0,1) sits at index 1, (1,0,0) at 9
    rule = rule_from_table(3, 1, list(range(3)) * 9)
    assert rule.index((0, 0, 1)) == 1
    assert rule.index((1, 0, 0)) == 9
    assert rule.index((2, 2, 2)) == 26


def test_fs_rule_from_table_neighborhood_001():
    assert apply_local(gilman_fs(), (0, 0, 1)) == 1


def test_identity_r0():
    rule = rule_from_table(2, 0, [0, 1])
    assert apply_local(rule, (1,)) == 1
    assert apply_local(rule, (0,)) == 0


def test_rule_110_against_binary_expansion():
    bits = [int(b) for b in reversed(format(110, "08b"))]
    rule = rule_from_table(2, 1, bits)
    assert apply_local(rule, (1, 1, 1)) == 0
    assert apply_local(rule, (0, 0, 1)) == 1
    for v in range(8):
        nb = ((v >> 2) & 1, (v >> 1) & 1, v & 1)
        assert apply_local(rule, nb) == (110 >> v) & 1


def test_rule_errors_are_distinct():
    with pytest.raises(TableLengthError):
        rule_from_table(3, 1, [0] * 26)
    with pytest.raises(SymbolRangeError):
        rule_from_table(3, 1, [0] * 26 + [3])
    assert TableLengthError is not SymbolRangeError


@pytest.mark.parametrize("nb,expected", [((2, 2, 1), 0), ((0, 2, 2), 2)])
def test_apply_local_fs(nb, expected):
    assert apply_local(gilman_fs(), nb) == expected


def test_apply_local_errors():
    with pytest.raises(NeighborhoodLengthError):
        apply_local(gilman_fs(), (0, 1))
    with pytest.raises(SymbolRangeError):
        apply_local(gilman_fs(), (0, 3, 1))


def test_step_shift():
    out = step_lightcone(shift_rule(2), WindowConfig(0, (0, 1, 1, 0, 1)))
    assert out == WindowConfig(1, (1, 0, 1))


def test_step_identity_unchanged():
    w = WindowConfig(-4, (2, 0, 1, 1, 0))
    assert step_lightcone(identity_rule(3), w) == w


def test_step_fs_by_hand():
    out = step_lightcone(gilman_fs(), WindowConfig(-2, (0, 1, 2, 0, 0)))
    assert out.offset == -1
    assert out.cells == (g_fs(1, 2), g_fs(2, 0), g_fs(0, 0)) == (0, 2, 0)


def test_step_too_short():
    with pytest.raises(WindowTooShortError):
        step_lightcone(gilman_fs(), WindowConfig(0, (0, 1)))


def test_evolve_identity():
    w = WindowConfig(-3, (0, 1, 2, 2, 1, 0, 1))
    assert evolve_column(identity_rule(3), w, 2, 5) == [(1, 2, 2, 1, 0)] * 6


def test_evolve_shift_reads_to_the_right():
    x = dict(zip(range(-4, 5), (1, 0, 0, 1, 1, 0, 1, 0, 0)))
    w = WindowConfig(-4, tuple(x[i] for i in range(-4, 5)))
    words = evolve_column(shift_rule(2), w, 1, 3)
    assert words == [tuple(x[j] for j in range(i - 1, i + 2)) for i in range(4)]


def test_evolve_fs_by_hand():
    # x(-1, 1) = 012 with zeros around
    w = WindowConfig(-3, (0, 0, 0, 1, 2, 0, 0))
    assert evolve_column(gilman_fs(), w, 1, 2) == [(0, 1, 2), (1, 0, 2), (0, 0, 2)]
    # a 1 directly left of a 2 is annihilated together with it
    w = WindowConfig(-3, (0, 0, 1, 2, 0, 0, 0))
    assert evolve_column(gilman_fs(), w, 1, 2) == [(1, 2, 0), (0, 2, 0), (0, 2, 0)]


def test_evolve_coverage_error():
    with pytest.raises(CoverageError):
        evolve_column(gilman_fs(), WindowConfig(-2, (0,) * 5), 1, 2)


def test_step_torus_examples(rule90):
    fs = gilman_fs()
    assert step_torus(fs, TorusConfig((0, 2))) == TorusConfig((0, 2))
    assert step_torus(fs, TorusConfig((1,))) == TorusConfig((1,))
    assert step_torus(rule90, TorusConfig((0, 0, 0, 1))) == TorusConfig((1, 0, 1, 0))


rules = st.integers(2, 3).flatmap(
    lambda k: st.integers(0, 2).flatmap(
        lambda r: st.lists(st.integers(0, k - 1), min_size=k ** (2 * r + 1),
                           max_size=k ** (2 * r + 1)).map(lambda t: rule_from_table(k, r, t))
    )
)


@settings(max_examples=300, deadline=None)
@given(rules, st.data())
def test_step_matches_naive_reference(rule, data):
    n = data.draw(st.integers(2 * rule.r + 1, 30))
    cells = data.draw(st.lists(st.integers(0, rule.k - 1), min_size=n, max_size=n))
    w = WindowConfig(data.draw(st.integers(-50, 50)), tuple(cells))
    assert step_lightcone(rule, w) == naive_step(rule, w)
    t = TorusConfig(tuple(cells))
    assert step_torus(rule, t).cells == naive_torus(rule, t.cells)


@settings(max_examples=300, deadline=None)
@given(rules, st.data())
def test_shift_commutation(rule, data):
    n = data.draw(st.integers(2 * rule.r + 1, 30))
    cells = tuple(data.draw(st.lists(st.integers(0, rule.k - 1), min_size=n, max_size=n)))
    a = data.draw(st.integers(-40, 40))
    s = data.draw(st.integers(-40, 40))
    w = WindowConfig(a, cells)
    assert step_lightcone(rule, w.shifted(s)) == step_lightcone(rule, w).shifted(s)


@settings(max_examples=300, deadline=None)
@given(rules, st.data())
def test_torus_lightcone_agreement(rule, data):
    L = data.draw(st.integers(1, 20))
    cells = tuple(data.draw(st.lists(st.integers(0, rule.k - 1), min_size=L, max_size=L)))
    T = data.draw(st.integers(0, 6))
    if 2 * rule.r * T >= L:
        T = (L - 1) // (2 * rule.r) if rule.r else T
    t = TorusConfig(cells)
    w = t.unroll(-rule.r * T, L - 1 + rule.r * T)
    for _ in range(T):
        w = step_lightcone(rule, w)
    assert w.offset == 0
    assert w.cells == iterate_torus(rule, t, T).cells


def test_determinism_repeated_calls():
    rule = eca(110)
    w = WindowConfig(-100, tuple(np.random.default_rng(1).integers(0, 2, 200).tolist()))
    assert evolve_column(rule, w, 5, 50) == evolve_column(rule, w, 5, 50)
