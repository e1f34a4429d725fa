import logging
import math
from types import SimpleNamespace

import numpy as np
import pytest

from qes_sextic.errors import NodeDensityError, ParityError, SeriesCancellationError
from qes_sextic.models.config import Settings
from qes_sextic.modules.momentum import (
    MomentSeries,
    left_mass,
    localized_momentum,
    localized_pair,
    momentum_limit,
    momentum_sample,
    required_panels,
    series_sample,
    transform,
    transform_quadrature,
    transform_series,
    uniform_grid,
)
from qes_sextic.modules.quadrature import build_rule, position_rule, weight_moment

GAUSSIAN = SimpleNamespace(amplitude=lambda x: math.pi**-0.25 * np.exp(-0.5 * np.asarray(x) ** 2))


def test_gaussian_transforms_to_gaussian():
    p = np.linspace(-5.0, 5.0, 41)
    phi = transform_quadrature(GAUSSIAN, p, build_rule(12.0))
    assert phi.space == "momentum"
    assert phi.weights is None
    assert np.allclose(phi.amplitude, GAUSSIAN.amplitude(p), atol=1e-12)


def test_node_density_guard():
    rule = build_rule(6.0, panels=8, order=16)
    assert momentum_limit(rule) < 20.0
    with pytest.raises(NodeDensityError) as info:
        transform_quadrature(GAUSSIAN, np.array([20.0]), rule)
    needed = info.value.required_panels
    assert needed == required_panels(rule, 20.0)
    assert momentum_limit(build_rule(6.0, panels=needed, order=16)) >= 20.0


def test_transform_enlarges_rule_when_needed():
    p = np.array([0.0, 150.0])
    phi = transform(GAUSSIAN, p)
    assert np.allclose(phi.amplitude, GAUSSIAN.amplitude(p), atol=1e-8)


@pytest.mark.parametrize("lam", [0.0, 1.0, 3.0, 6.0])
def test_momentum_properties_of_low_states(spectrum, lam):
    p = np.linspace(-6.0, 6.0, 25)
    for n in range(4):
        state = spectrum(lam).state(n)
        assert abs(momentum_sample(state).norm - 1.0) < 1e-9
        phi = transform_quadrature(state, p)
        if n % 2 == 0:
            assert np.max(np.abs(phi.amplitude.imag)) < 1e-10
        else:
            assert np.max(np.abs(phi.amplitude.real)) < 1e-10
            assert abs(phi.amplitude[12]) < 1e-13
        series = series_sample(state, p[12:], digits=40)
        assert np.max(np.abs(series.amplitude - phi.amplitude[12:])) < 1e-9, (lam, n)


def test_parity_of_momentum_amplitudes(spectrum):
    p = np.linspace(-4.0, 4.0, 17)
    even = transform_quadrature(spectrum(0.5).state(0), p)
    odd = transform_quadrature(spectrum(0.5).state(1), p)
    assert np.max(np.abs(even.amplitude.imag)) < 1e-10
    assert np.max(np.abs(odd.amplitude.real)) < 1e-10
    assert np.allclose(even.amplitude, even.amplitude[::-1])
    assert np.allclose(odd.amplitude, -odd.amplitude[::-1])


def test_series_matches_quadrature(spectrum):
    rule = position_rule()
    p = np.array([0.0, 0.5, 1.0, 2.0])
    for n in (0, 1):
        state = spectrum(0.0).state(n)
        reference = transform_quadrature(state, p, rule).amplitude
        series = [
            transform_series(state.coefficients, v, state.parity, state.norm_constant) for v in p
        ]
        assert np.allclose(series, reference, atol=1e-10)


def test_series_refuses_cancelling_sum(spectrum):
    state = spectrum(0.0).state(0)
    series = MomentSeries(state.coefficients, state.parity, state.norm_constant, digits=15)
    with pytest.raises(SeriesCancellationError) as info:
        series(12.0)
    assert info.value.lost_digits > 6


def test_extended_precision_series(spectrum):
    state = spectrum(0.0).state(0)
    p = np.array([0.0, 1.0, 3.0])
    reference = transform_quadrature(state, p).amplitude
    assert np.allclose(series_sample(state, p, digits=40).amplitude, reference, atol=1e-10)
    assert np.allclose(transform(state, p, "series", Settings(series_digits=40)).amplitude, reference, atol=1e-10)


def test_refused_series_falls_back_to_quadrature(spectrum, caplog):
    state = spectrum(0.0).state(0)
    p = np.array([12.0])
    with caplog.at_level(logging.WARNING):
        phi = transform(state, p, "series", Settings(series_digits=15))
    assert any("series refused" in record.getMessage() for record in caplog.records)
    assert np.allclose(phi.amplitude, transform_quadrature(state, p).amplitude, atol=1e-14)


def test_unknown_transform_method(spectrum):
    with pytest.raises(ValueError):
        transform(spectrum(0.0).state(0), np.array([0.0]), "fft")


def test_uniform_grid():
    grid = uniform_grid(1.0, 0.25)
    assert grid.size == 9
    assert grid[0] == -1.0 and grid[-1] == 1.0


def test_localized_pair_sits_in_one_well(spectrum, rule):
    result = spectrum(6.0)
    left, right = localized_pair(result.state(0), result.state(1), rule)
    assert left_mass(left) > 0.99
    assert left_mass(right) < 0.01
    assert abs(rule.integrate(left.amplitude * right.amplitude)) < 1e-10
    assert math.isclose(left.norm, 1.0, rel_tol=1e-10)
    assert np.allclose(left.density, right.density[::-1], atol=1e-10)


def test_localized_momentum_densities_coincide(spectrum):
    result = spectrum(6.0)
    p = np.linspace(-6.0, 6.0, 25)
    phi_left, phi_right = localized_momentum(result.state(0), result.state(1), p)
    assert phi_left.space == "momentum"
    assert np.allclose(phi_left.density, phi_right.density, atol=1e-12)
    assert np.allclose(phi_left.density, phi_left.density[::-1], atol=1e-12)


def test_odd_state_vanishes_at_zero_momentum(spectrum):
    phi = transform_quadrature(spectrum(1.0).state(1), np.array([0.0]))
    assert abs(phi.amplitude[0]) < 1e-13


def test_series_at_zero_momentum_is_moment_sum(spectrum):
    state = spectrum(1.0).state(0)
    value = transform_series(state.coefficients, 0.0, state.parity, state.norm_constant)
    moments = [weight_moment(int(m), 0.125) for m in state.exponents]
    expected = state.norm_constant * np.dot(state.coefficients, moments) / math.sqrt(2.0 * math.pi)
    assert value.imag == 0.0
    assert value.real > 0.0
    assert math.isclose(value.real, expected, rel_tol=1e-12)


def test_dual_method_agreement_at_lambda_one(spectrum):
    p = np.linspace(0.0, 6.0, 13)
    for n in (0, 1):
        state = spectrum(1.0).state(n)
        reference = transform_quadrature(state, p).amplitude
        assert np.max(np.abs(series_sample(state, p, digits=40).amplitude - reference)) < 1e-9


def test_localized_pair_needs_even_then_odd(spectrum, rule):
    result = spectrum(3.0)
    with pytest.raises(ParityError):
        localized_pair(result.state(1), result.state(0), rule)
    with pytest.raises(ParityError):
        localized_pair(result.state(0), result.state(3), rule)
