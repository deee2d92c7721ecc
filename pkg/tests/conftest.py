"""
Configuração global do pytest.
Fixtures compartilhadas: toro pequeno (Λ = 64π, N = 128), campos e geradores semeados.
"""

import math

import numpy as np
import pytest

from field_ensemble.services.field_service import FieldEnsembleService
from shared.rng.streams import DOMAIN_AUX, seed_stream

SMALL_TORUS = 64 * math.pi
SMALL_GRID = 128


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: testes de Monte Carlo mais longos")


@pytest.fixture
def rng():
    return seed_stream(20240601, 0, domain=DOMAIN_AUX)


@pytest.fixture
def field_service():
    return FieldEnsembleService(SMALL_TORUS, SMALL_GRID)


@pytest.fixture
def small_field(field_service):
    """Campo com ε = 0.3 no toro pequeno, sem corte de grandes escalas."""
    return field_service.sample_field(0.3, seed=7)


@pytest.fixture
def quiet_field(field_service):
    """ε = 0: b ≡ 0, útil para casos com resposta fechada."""
    return field_service.sample_field(0.0, seed=7)


@pytest.fixture
def probes():
    return np.array([[2.0, 0.0], [0.0, 2.0]])
