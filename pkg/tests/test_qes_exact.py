import math

import numpy as np
import pytest

from qes_sextic.errors import SectorError
from qes_sextic.models.config import ParitySector
from qes_sextic.modules.infotheory import kl_divergence
from qes_sextic.modules.qes_exact import (
    admissible,
    build_sector,
    exact_density,
    reflection_defect,
    reflection_spread,
    sector_state,
)
from qes_sextic.modules.sampling import sample


def test_admissible_couplings():
    assert admissible(-1.0) is None
    assert admissible(0.25) is None
    assert admissible(0.0) is ParitySector.even
    assert admissible(0.5) is ParitySector.odd
    assert admissible(1.0) is ParitySector.even
    assert admissible(2.5) is ParitySector.odd


def test_off_lattice_coupling_is_rejected():
    with pytest.raises(SectorError):
        build_sector(0.3)
    with pytest.raises(SectorError):
        build_sector(-1.0)


def test_sector_dimensions():
    assert build_sector(0.0).dimension == 1
    assert build_sector(3.0).dimension == 4
    assert build_sector(2.5).dimension == 3


def test_closed_form_eigenvalues():
    assert np.allclose(build_sector(1.0).eigenvalues, [1.5 - math.sqrt(3.0), 1.5 + math.sqrt(3.0)], atol=1e-12)
    assert np.allclose(build_sector(1.5).eigenvalues, [2.5 - math.sqrt(7.0), 2.5 + math.sqrt(7.0)], atol=1e-12)
    assert math.isclose(build_sector(0.0).eigenvalues[0], 0.5, rel_tol=1e-14)


def test_global_indices_follow_parity():
    even = build_sector(2.0)
    odd = build_sector(2.5)
    assert [even.global_index(i) for i in range(even.dimension)] == [0, 2, 4]
    assert [odd.global_index(i) for i in range(odd.dimension)] == [1, 3, 5]


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 3.0, 4.5, 6.0])
def test_reflection_against_partner_sector(lam):
    assert reflection_defect(lam) < 1e-10


def test_reflection_spread_is_non_negative():
    assert reflection_spread(build_sector(3.0)) >= 0.0
    assert reflection_spread(build_sector(0.0)) == 0.0


def test_sector_state_is_normalized(rule):
    sector = build_sector(2.0)
    for which in range(sector.dimension):
        state = sector_state(sector, which, rule)
        assert state.n == 2 * which
        assert math.isclose(rule.integrate(state.density(rule.nodes)), 1.0, rel_tol=1e-12)


def test_sector_state_rejects_bad_requests(rule):
    with pytest.raises(SectorError):
        sector_state(build_sector(1.0, reflected=True), 0, rule)
    with pytest.raises(IndexError):
        sector_state(build_sector(1.0), 2, rule)


def test_exact_density_agrees_with_variational(spectrum, rule):
    sector = build_sector(2.0)
    exact = exact_density(sector, 0, rule)
    variational = sample(spectrum(2.0).state(0).amplitude, rule)
    assert exact.method == "exact"
    assert kl_divergence(exact, variational) < 1e-6
