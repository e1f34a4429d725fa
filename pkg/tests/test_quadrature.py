import math

import numpy as np
import pytest

from qes_sextic.errors import NumericalError
from qes_sextic.models.config import Settings
from qes_sextic.modules.quadrature import (
    build_rule,
    choose_half_width,
    position_rule,
    quartic_tail,
    sampled_tail,
    weight_moment,
)


def test_rule_is_mirror_symmetric():
    rule = build_rule(6.0, panels=32, order=8)
    assert np.array_equal(rule.nodes, -rule.nodes[::-1])
    assert np.array_equal(rule.weights, rule.weights[::-1])
    assert np.all(np.diff(rule.nodes) > 0)
    assert math.isclose(rule.weights.sum(), 12.0, rel_tol=1e-14)


def test_rule_reproduces_quartic_moments():
    rule = build_rule(8.0)
    for q in (0, 2, 4, 10, 20):
        value = rule.integrate(rule.nodes**q * np.exp(-0.5 * rule.nodes**4))
        assert math.isclose(value, weight_moment(q, 0.25), rel_tol=1e-12)


def test_weight_moment_recurrence():
    # M(q+4) = (q+1)/2 · M(q) for the exp(−x⁴/2) weight
    for q in (0, 2, 6):
        assert math.isclose(weight_moment(q + 4), 0.5 * (q + 1) * weight_moment(q), rel_tol=1e-14)


def test_weight_moment_rejects_bad_input():
    with pytest.raises(ValueError):
        weight_moment(3)
    with pytest.raises(ValueError):
        weight_moment(-2)
    with pytest.raises(ValueError):
        weight_moment(2, beta=0.0)


def test_build_rule_rejects_bad_input():
    with pytest.raises(ValueError):
        build_rule(0.0)
    with pytest.raises(ValueError):
        build_rule(float("inf"))
    with pytest.raises(ValueError):
        build_rule(5.0, panels=0)


def test_sampled_tail_matches_closed_form():
    exact = quartic_tail(0, 0.25)
    estimate = sampled_tail(lambda x: np.exp(-0.5 * x**4))
    assert math.isclose(estimate(2.0), exact(2.0), rel_tol=1e-8)


def test_choose_half_width_meets_tolerance():
    tail = quartic_tail(42, 0.25)
    L = choose_half_width(tail, 1e-16)
    assert tail(L) < 1e-16
    assert tail(0.99 * L) >= 1e-16


def test_choose_half_width_gives_up():
    with pytest.raises(NumericalError):
        choose_half_width(lambda L: 1.0, 1e-12, max_half_width=100.0)


def test_position_rule_respects_minimum_width():
    rule = position_rule(Settings(min_half_width=9.0))
    assert rule.half_width == 9.0
    assert rule.panels == 128 and rule.order == 16


def test_position_rule_follows_tail_tolerance():
    narrow = Settings(min_half_width=1.0)
    loose = position_rule(narrow, tol=1e-3)
    tight = position_rule(narrow)
    assert 1.0 < loose.half_width < tight.half_width < Settings().min_half_width
