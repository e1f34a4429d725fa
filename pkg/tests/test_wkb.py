import math

import pytest

from qes_sextic.errors import NotTrappedError
from qes_sextic.models.config import MeshConfig, ModelParams
from qes_sextic.modules import wkb
from qes_sextic.modules.lagrange_mesh import default_config, default_scale, mesh_solve


def test_rescaled_well():
    assert wkb.rescaled_potential(1.0) == -1.5
    assert math.isclose(wkb.well_bottom(), wkb.U_MIN, rel_tol=1e-14)
    assert wkb.well_bottom(100.0) > wkb.U_MIN


def test_turning_points_sit_on_the_level():
    for lam in (None, 400.0):
        y1, y2 = wkb.turning_points(-0.5, lam)
        assert 0.0 < y1 < y2
        assert math.isclose(wkb.rescaled_potential(y1, lam), -0.5, abs_tol=1e-12)
        assert math.isclose(wkb.rescaled_potential(y2, lam), -0.5, abs_tol=1e-12)


def test_energy_outside_band_is_rejected():
    with pytest.raises(ValueError):
        wkb.turning_points(0.1)
    with pytest.raises(ValueError):
        wkb.well_action(wkb.U_MIN - 0.1)


def test_action_at_barrier_top():
    assert math.isclose(wkb.well_action(-1e-12), 0.5 * math.pi, rel_tol=1e-5)


def test_actions_are_monotone():
    levels = [-1.2, -0.9, -0.6, -0.3]
    well = [wkb.well_action(e) for e in levels]
    barrier = [wkb.barrier_action(e) for e in levels]
    assert well == sorted(well)
    assert barrier == sorted(barrier, reverse=True)


def test_ground_level_is_harmonic_at_large_coupling():
    # ω = 4 at the bottom of U, so ε₀ ≈ U_min + ½ω ħ_eff
    lam = 1e4
    result = wkb.quantize(0, lam)
    assert math.isclose(result.epsilon_n, wkb.U_MIN + 2.0 / lam, abs_tol=1e-6)
    assert math.isclose(result.energy, lam**1.5 * result.epsilon_n)
    shift = result.epsilon_n - wkb.quantize(0, 1e6).epsilon_n
    assert math.isclose(shift, 2.0 / 1e4 - 2.0 / 1e6, rel_tol=1e-3)


def test_levels_rise_with_n():
    levels = [wkb.quantize(n, 1e3) for n in range(4)]
    eps = [level.epsilon_n for level in levels]
    assert eps == sorted(eps)
    splits = [level.splitting_estimate for level in levels]
    assert splits == sorted(splits)


def test_trapped_cutoff():
    lam = 10.0
    top = wkb.trapped_cutoff(lam)
    assert top == 4
    wkb.quantize(top, lam)
    with pytest.raises(NotTrappedError):
        wkb.quantize(top + 1, lam)


def test_quantize_rejects_bad_input():
    with pytest.raises(ValueError):
        wkb.quantize(-1, 100.0)
    with pytest.raises(ValueError):
        wkb.quantize(0, 5.0)


def test_splitting_estimate():
    action, estimate = wkb.splitting(-0.5, lam=50.0)
    assert action > 0.0
    assert math.isclose(estimate, math.exp(-50.0 * action))
    assert wkb.splitting(-0.5, lam=50.0, hbar_exponent=0.75)[1] > estimate


def test_harmonic_limit():
    assert wkb.harmonic_limit(0, -100.0) == 10.0
    assert wkb.harmonic_limit(2, -4.0) == 10.0
    with pytest.raises(ValueError):
        wkb.harmonic_limit(0, 1.0)
    with pytest.raises(ValueError):
        wkb.harmonic_limit(-1, -1.0)


def test_harmonic_limit_against_mesh():
    params = ModelParams(lam=-100.0)
    energy = mesh_solve(params, default_config(params), count=1).state(0).energy
    assert abs(energy - wkb.harmonic_limit(0, -100.0)) / energy < 0.03


@pytest.mark.slow
def test_corrected_levels_against_mesh():
    lam = 100.0
    config = MeshConfig(size=240, scale=default_scale(lam, 240))
    mesh = mesh_solve(ModelParams(lam=lam), config, count=2)
    for n in range(2):
        semiclassical = wkb.quantize(n, lam, corrections=True).energy
        reference = mesh.state(n).energy
        assert abs(semiclassical - reference) / abs(reference) < 0.05


def test_moderate_coupling_level_is_bound():
    result = wkb.quantize(0, 50.0)
    assert wkb.U_MIN < result.epsilon_n < 0.0
    assert result.energy < 0.0


def test_barrier_action_near_top_is_small():
    action, estimate = wkb.splitting(-1e-6)
    assert 0.0 <= action < 1e-3
    assert estimate > 0.99


def test_harmonic_limit_improves_with_depth():
    ratios = []
    for lam in (-10.0, -100.0, -1e3, -1e4):
        params = ModelParams(lam=lam)
        ratios.append(mesh_solve(params, default_config(params), count=1).state(0).energy / math.sqrt(-lam))
    assert all(abs(b - 1.0) < abs(a - 1.0) for a, b in zip(ratios, ratios[1:]))
    assert abs(ratios[-1] - 1.0) < 0.01
    params = ModelParams(lam=-1e4)
    energy = mesh_solve(params, default_config(params), count=2).state(1).energy
    assert abs(energy - wkb.harmonic_limit(1, -1e4)) / energy < 5e-3


@pytest.mark.slow
@pytest.mark.parametrize("lam, size", [(100.0, 240), (1e3, 600)])
def test_deep_well_ratio_lies_in_the_band(lam, size):
    mesh = mesh_solve(ModelParams(lam=lam), MeshConfig(size=size, scale=default_scale(lam, size)), count=1)
    ratio = mesh.state(0).energy / lam**1.5
    assert wkb.U_MIN < ratio < 0.0
