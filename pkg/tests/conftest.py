from functools import lru_cache

import pytest

from qes_sextic.models.config import ModelParams
from qes_sextic.modules.quadrature import position_rule
from qes_sextic.modules.variational import solve


@lru_cache(maxsize=None)
def cached_spectrum(lam: float):
    return solve(ModelParams(lam=lam))


@pytest.fixture
def spectrum():
    return cached_spectrum


@pytest.fixture
def rule():
    return position_rule()
