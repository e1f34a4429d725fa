import math

from hypothesis import given
from hypothesis import strategies as st

from qes_sextic.models.config import ModelParams
from qes_sextic.modules.potential import (
    derivative,
    evaluate,
    geometry,
    minimum_asymptote,
    minimum_square,
    position_asymptote,
)

couplings = st.floats(min_value=-5.0, max_value=50.0, allow_nan=False)
positions = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False)


@given(couplings, positions)
def test_potential_is_even(lam, x):
    params = ModelParams(lam=lam)
    assert evaluate(params, x) == evaluate(params, -x)


def test_potential_values():
    params = ModelParams(lam=1.0)
    assert evaluate(params, 0.0) == 0.0
    # ½(1 + 2 − 6)
    assert evaluate(params, 1.0) == -1.5


def test_single_well_below_threshold():
    for lam in (-0.75, -0.5):
        geo = geometry(ModelParams(lam=lam))
        assert geo.is_double_well is False
        assert geo.minima_value == 0.0
        assert minimum_square(lam) == 0.0


def test_double_well_minimum_is_stationary():
    params = ModelParams(lam=1.0)
    geo = geometry(params)
    assert geo.is_double_well
    left, right = geo.minima_positions
    assert left == -right
    assert abs(derivative(params, right)) < 1e-12
    assert geo.minima_value < 0.0
    assert geo.barrier_height == -geo.minima_value


def test_minimum_square_just_above_threshold():
    # x₊² ≈ (2λ+1)/2 for a shallow double well
    lam = -0.5 + 1e-9
    assert math.isclose(minimum_square(lam), 1e-9, rel_tol=1e-6)


def test_large_coupling_asymptotes():
    lam = 1e6
    assert math.isclose(position_asymptote(lam), math.sqrt(minimum_square(lam)), rel_tol=1e-2)
    vmin = geometry(ModelParams(lam=lam)).minima_value
    assert math.isclose(minimum_asymptote(lam), vmin, rel_tol=1e-2)
