"""
Testes unitários da rede de Fourier, da quantização e do oráculo do círculo.
"""

import math

import numpy as np
import pytest

from field_ensemble.domain.circle import check_postulates, circle_tensor, measure_from_covariance
from field_ensemble.domain.spectral import (
    dealias_mask,
    half_plane_modes,
    quantize,
    scatter_to_grid,
    to_real_space,
    to_spectrum,
)
from sl2_core.domain.entities import CovarianceSpec

TORUS = 64 * math.pi


class TestHalfPlaneModes:
    def test_nenhum_modo_e_seu_oposto(self):
        modes = half_plane_modes(TORUS, 0.0, 1.0)
        as_set = {tuple(m) for m in modes}
        assert all((-mx, -my) not in as_set for mx, my in as_set)

    def test_banda_respeitada(self):
        modes = half_plane_modes(TORUS, 0.5, 1.0)
        norm = (2 * math.pi / TORUS) * np.hypot(modes[:, 0], modes[:, 1])
        assert np.all(norm >= 0.5 * (1 - 1e-12)) and np.all(norm <= 1.0 + 1e-12)

    def test_ordem_canonica(self):
        modes = half_plane_modes(TORUS, 0.0, 0.2)
        keys = modes[:, 1] * 10_000 + modes[:, 0]
        assert np.all(np.diff(keys) > 0)


class TestQuantize:
    def test_quantizacao_idempotente(self, rng):
        values = rng.standard_normal(100) + 1j * rng.standard_normal(100)
        once = quantize(values)
        assert np.array_equal(quantize(once), once)

    def test_produto_com_indice_pequeno_exato(self, rng):
        t = quantize(rng.standard_normal(100))
        m = rng.integers(-500, 500, size=100)
        n = rng.integers(-500, 500, size=100)
        assert np.array_equal(m * (n * t), n * (m * t))


class TestGrid:
    def test_espalhamento_gera_campo_real(self, rng):
        modes = half_plane_modes(TORUS, 0.0, 1.0)
        values = rng.standard_normal(len(modes)) + 1j * rng.standard_normal(len(modes))
        spectrum = scatter_to_grid(modes, values, 128)
        real = to_real_space(spectrum)
        assert np.allclose(to_spectrum(real), spectrum, atol=1e-12)
        assert np.max(np.abs(np.fft.ifft2(spectrum).imag)) <= 1e-12

    def test_mascara_de_dois_tercos(self):
        mask = dealias_mask(96)
        assert mask[0, 0] and mask[32, 0] and not mask[33, 0]


class TestCircleOracle:
    def test_covariancia_por_unidade_de_lnL(self):
        assert np.allclose(circle_tensor().per_unit_lnL_covariance(), np.diag([0.25, 0.25, 0.5]), atol=1e-12)

    def test_componente_de_traco_nula(self):
        assert circle_tensor().trace_component == pytest.approx(0.0, abs=1e-12)

    def test_media_de_kk(self):
        assert np.allclose(circle_tensor().kk_average, 0.5 * np.eye(2), atol=1e-12)

    def test_poucos_pontos_ja_exatos(self):
        assert np.allclose(circle_tensor(5).coefficients, circle_tensor(64).coefficients, atol=1e-12)

    def test_postulados_da_canonica(self):
        square, gram = check_postulates(CovarianceSpec.canonical())
        assert square <= 1e-12 and gram <= 1e-12

    def test_postulados_da_medida_do_circulo(self):
        square, gram = check_postulates(circle_tensor().measure())
        assert square <= 1e-12 and gram <= 1e-12

    def test_postulados_da_decomposicao_espectral(self):
        measure = measure_from_covariance(circle_tensor().per_unit_lnL_covariance())
        square, gram = check_postulates(measure)
        assert square <= 1e-12 and gram <= 1e-12

    def test_controle_negativo_viola_cancelamento(self):
        square, gram = check_postulates(CovarianceSpec(kappa_sym=0.5, kappa_skew=0.0))
        assert square == pytest.approx(math.sqrt(2.0))
        assert gram <= 1e-12
