import math

import numpy as np
import pytest

from qes_sextic.errors import ConditioningError
from qes_sextic.models.config import ModelParams, ParitySector, Settings
from qes_sextic.modules.quadrature import position_rule
from qes_sextic.modules.reference import REPRODUCTION_TOL, load_rows, reproduction_excess
from qes_sextic.modules.variational import (
    evaluate_wavefunction,
    hamiltonian_and_overlap,
    hellmann_feynman_slope,
    overlap_condition,
    rayleigh_quotient,
    sector_spectrum,
    solve,
)


def test_exact_sector_energies_at_lambda_one(spectrum):
    result = spectrum(1.0)
    assert math.isclose(result.state(0).energy, 1.5 - math.sqrt(3.0), abs_tol=1e-8)
    assert math.isclose(result.state(2).energy, 1.5 + math.sqrt(3.0), abs_tol=1e-8)


def test_exact_sector_energy_at_lambda_three_halves(spectrum):
    assert math.isclose(spectrum(1.5).state(1).energy, 2.5 - math.sqrt(7.0), abs_tol=1e-8)


def test_states_alternate_parity(spectrum):
    for lam in (-0.75, 0.0, 2.0):
        result = spectrum(lam)
        energies = result.energies
        assert energies == sorted(energies)
        for n in range(4):
            expected = ParitySector.even if n % 2 == 0 else ParitySector.odd
            assert result.state(n).parity is expected


def test_energies_decrease_with_basis_size():
    params = ModelParams(lam=2.0)
    previous = math.inf
    for k in range(2, 11):
        energy = sector_spectrum(params, ParitySector.even, k)[0].energy
        assert energy <= previous + 1e-10 * max(1.0, abs(energy))
        previous = energy


def test_eigenvectors_are_normalized(spectrum, rule):
    result = spectrum(0.5)
    for n in range(4):
        state = result.state(n)
        assert state.coefficients[0] == 1.0
        assert math.isclose(rule.integrate(state.density(rule.nodes)), 1.0, rel_tol=1e-10)


def test_evaluate_wavefunction_on_rule(spectrum, rule):
    state = spectrum(2.0).state(1)
    sampled = evaluate_wavefunction(state, rule)
    assert sampled.method == "variational"
    assert math.isclose(sampled.norm, 1.0, rel_tol=1e-10)
    assert np.allclose(sampled.amplitude, -sampled.amplitude[::-1], atol=1e-12)


def test_rayleigh_quotient_of_eigenvector(spectrum):
    state = spectrum(-0.5).state(2)
    value = rayleigh_quotient(ModelParams(lam=-0.5), state.parity, state.coefficients)
    assert math.isclose(value, state.energy, rel_tol=1e-10, abs_tol=1e-10)


def test_rayleigh_quotient_rejects_empty_and_zero():
    params = ModelParams(lam=0.0)
    with pytest.raises(ValueError):
        rayleigh_quotient(params, ParitySector.even, [])
    with pytest.raises(ValueError):
        rayleigh_quotient(params, ParitySector.even, [0.0, 0.0])


def test_condition_limit_raises():
    with pytest.raises(ConditioningError):
        hamiltonian_and_overlap(ModelParams(lam=0.0), ParitySector.even, 12, condition_limit=10.0)


def test_conditioning_failure_reduces_basis(caplog):
    settings = Settings(k_even=30, k_odd=30, condition_limit=1e10)
    result = solve(ModelParams(lam=1.0), settings=settings)
    used_even, used_odd = result.basis_sizes
    assert settings.min_basis <= used_even < 30
    assert settings.min_basis <= used_odd < 30
    assert any("reduced" in record.getMessage() for record in caplog.records)
    _, overlap = hamiltonian_and_overlap(ModelParams(lam=1.0), ParitySector.even, used_even, 1e10)
    assert overlap_condition(overlap) <= 1e10


def test_conditioning_failure_below_minimum_basis():
    with pytest.raises(ConditioningError):
        solve(ModelParams(lam=1.0), settings=Settings(condition_limit=1.0))


def test_basis_size_must_be_positive():
    with pytest.raises(ValueError):
        solve(ModelParams(lam=1.0), k_even=0)


def test_hellmann_feynman_matches_finite_difference():
    lam, h = 1.0, 1e-4
    state = solve(ModelParams(lam=lam)).state(1)
    upper = solve(ModelParams(lam=lam + h)).state(1).energy
    lower = solve(ModelParams(lam=lam - h)).state(1).energy
    slope = (upper - lower) / (2.0 * h)
    assert math.isclose(hellmann_feynman_slope(state), slope, rel_tol=1e-5)


def test_amplitude_is_odd_for_odd_states(spectrum):
    state = spectrum(0.0).state(1)
    x = np.linspace(0.1, 3.0, 7)
    assert np.allclose(state.amplitude(-x), -state.amplitude(x), rtol=0, atol=1e-15)


def test_reference_coefficients_reproduce_energies(spectrum):
    rows = load_rows()
    assert len(rows) >= 25
    for row in rows:
        energy = spectrum(row.lam).state(row.n).energy
        excess = reproduction_excess(row, energy)
        assert excess < REPRODUCTION_TOL, (row.lam, row.n, excess)
        if row.n < 2:
            # the Ritz space contains the trial vector
            assert excess >= -1e-9, (row.lam, row.n, excess)


def test_reference_ground_state_at_lambda_zero():
    (row,) = [r for r in load_rows() if r.lam == 0.0 and r.n == 0]
    assert math.isclose(row.quotient(), 0.5, abs_tol=1e-7)


def test_suspect_reference_rows_carry_a_reason():
    suspect = [row for row in load_rows(include_suspect=True) if row.suspect]
    assert suspect
    assert all(row.reason for row in suspect)
    assert all(not row.reason for row in load_rows())


def test_duplicated_odd_rows_belong_to_lambda_three_halves(spectrum):
    rows = {(r.lam, r.n): r for r in load_rows(include_suspect=True)}
    for n in (1, 3):
        duplicate = rows[(2.0, n)]
        assert duplicate.suspect
        assert duplicate.coefficients == rows[(1.5, n)].coefficients
        assert 0.0 <= reproduction_excess(duplicate, spectrum(1.5).state(n).energy) < REPRODUCTION_TOL
        assert reproduction_excess(duplicate, spectrum(2.0).state(n).energy) > 1e-3


def test_ground_state_at_critical_coupling_is_zero(spectrum):
    assert abs(spectrum(0.7329531261).state(0).energy) < 1e-7


def test_position_rule_holds_the_basis():
    rule = position_rule()
    state = solve(ModelParams(lam=4.0)).state(3)
    edge = state.density(np.array([rule.half_width]))[0]
    assert edge < 1e-30


def test_default_solve_is_converged(spectrum):
    for lam in (-0.75, 0.0, 3.0):
        result = spectrum(lam)
        assert result.converged
        assert result.truncation_delta <= ModelParams(lam=lam).tol_energy


def test_short_basis_is_flagged_unconverged(caplog):
    result = solve(ModelParams(lam=-0.75), k_even=4, k_odd=4)
    assert not result.converged
    assert result.truncation_delta > result.params.tol_energy
    assert any("not converged" in record.getMessage() for record in caplog.records)


def test_energy_tolerance_is_configurable():
    result = solve(ModelParams(lam=-0.75, tol_energy=0.05), k_even=4, k_odd=4)
    assert result.converged
