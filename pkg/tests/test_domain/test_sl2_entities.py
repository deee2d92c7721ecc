"""
Testes unitários da álgebra sl(2), do passo renormalizado e da covariância de B.
"""

import numpy as np
import pytest

from shared.exceptions.domain_exceptions import InvalidInputError, StepTooLargeError
from sl2_core.domain.entities import AlgebraVector, CovarianceSpec, Sl2Matrix
from sl2_core.domain.stepping import (
    frobenius_ito_rate,
    frobenius_R,
    gram_top_eigenvalue,
    increments_from_normals,
    ito_stratonovich_correction,
    martingale_increment_mean,
    sample_increment,
    solve_canonical_parameters,
    step_ito,
    step_ito_batch,
)
from sl2_core.domain.value_objects import (
    E1,
    E2,
    E3,
    IDENTITY,
    check_trace_identity,
    coefficients_to_matrices,
    matrices_to_coefficients,
)
from scalar_processes.domain.transforms import S_of_R
from shared.stats.distribution import covariance_with_errors


class TestAlgebraBasis:
    def test_reflexoes_ao_quadrado_sao_identidade(self):
        assert np.array_equal(E1 @ E1, IDENTITY)
        assert np.array_equal(E2 @ E2, IDENTITY)

    def test_rotacao_ao_quadrado_eh_menos_identidade(self):
        assert np.array_equal(E3 @ E3, -IDENTITY)

    def test_coeficientes_de_matriz_sem_traco(self):
        matrix = np.array([[0.3, -1.2], [0.7, -0.3]])
        coeffs = matrices_to_coefficients(matrix)
        assert np.allclose(coefficients_to_matrices(coeffs), matrix, atol=1e-15)

    def test_algebra_vector_to_matrix(self):
        vector = AlgebraVector(1.0, 2.0, 3.0)
        assert np.allclose(vector.to_matrix(), E1 + 2.0 * E2 + 3.0 * E3)


class TestTraceIdentity:
    def test_identidade_vale_para_lote_simetrico(self, rng):
        A = rng.standard_normal((500, 2, 2))
        G = A + np.swapaxes(A, -1, -2)
        assert np.max(np.abs(check_trace_identity(G))) <= 1e-12

    def test_matriz_unica_devolve_float(self):
        assert check_trace_identity(np.array([[2.0, 1.0], [1.0, 3.0]])) == pytest.approx(0.0, abs=1e-12)

    def test_matriz_nao_simetrica_rejeitada(self):
        with pytest.raises(InvalidInputError):
            check_trace_identity(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestSl2Matrix:
    def test_identidade_valida(self):
        assert Sl2Matrix.identity().validate() == []

    def test_determinante_diferente_de_um(self):
        errors = Sl2Matrix((2.0, 0.0, 0.0, 1.0)).validate()
        assert any("determinante" in e.lower() for e in errors)

    def test_transposta(self):
        m = Sl2Matrix((1.0, 2.0, 0.0, 1.0))
        assert m.transpose.entries == (1.0, 0.0, 2.0, 1.0)


class TestCovarianceSpec:
    def test_canonica_resolve_os_dois_postulados(self):
        kappa_sym, kappa_skew = solve_canonical_parameters()
        canonical = CovarianceSpec.canonical()
        assert kappa_sym == pytest.approx(canonical.kappa_sym)
        assert kappa_skew == pytest.approx(canonical.kappa_skew)

    def test_covariancia_dos_coeficientes(self):
        cov = CovarianceSpec.canonical().coefficient_covariance()
        assert np.allclose(cov, np.diag([0.25, 0.25, 0.5]), atol=1e-15)

    def test_correcao_ito_stratonovich_nula_na_canonica(self):
        assert np.allclose(ito_stratonovich_correction(CovarianceSpec.canonical()), 0.0)

    def test_controle_negativo_tem_correcao(self):
        correction = ito_stratonovich_correction(CovarianceSpec(kappa_sym=0.5, kappa_skew=0.0))
        assert np.allclose(correction, 0.5 * IDENTITY)

    def test_taxa_de_ito_unitaria(self):
        assert frobenius_ito_rate(CovarianceSpec.canonical()) == pytest.approx(1.0)

    def test_medida_com_traco_rejeitada(self):
        spec = CovarianceSpec.from_measure([(1.0, IDENTITY)])
        assert any("traço" in e for e in spec.validate())

    def test_incremento_amostrado_tem_variancia_canonica(self, rng):
        samples = np.array(
            [sample_increment(0.1, CovarianceSpec.canonical(), rng).as_array() for _ in range(4000)]
        )
        variances = samples.var(axis=0)
        assert np.allclose(variances, [0.025, 0.025, 0.05], rtol=0.1)

    @pytest.mark.slow
    def test_covariancia_em_um_milhao_de_incrementos(self, rng):
        cov = CovarianceSpec.canonical()
        normals = rng.standard_normal((1_000_000, len(cov.as_measure())))
        estimate, se = covariance_with_errors(increments_from_normals(1.0, cov, normals))
        assert np.all(np.abs(estimate - np.diag([0.25, 0.25, 0.5])) <= 4.0 * se)


class TestStepIto:
    def test_passo_preserva_determinante(self, rng):
        F = Sl2Matrix.identity()
        for _ in range(200):
            F = step_ito(F, sample_increment(0.01, CovarianceSpec.canonical(), rng))
        assert abs(F.determinant - 1.0) <= 1e-12

    def test_passo_grande_demais_rejeitado(self):
        with pytest.raises(StepTooLargeError):
            step_ito_batch(IDENTITY[None], np.array([[-2.0, 0.0, 0.0]]))

    def test_entrada_fora_de_sl2_rejeitada(self):
        with pytest.raises(InvalidInputError):
            step_ito(Sl2Matrix((2.0, 0.0, 0.0, 2.0)), AlgebraVector())

    def test_incremento_sem_renormalizacao_tem_media_nula(self, rng):
        F = Sl2Matrix((1.5, 0.3, 0.2, (1.0 + 0.3 * 0.2) / 1.5))
        mean, se = martingale_increment_mean(F, 0.01, CovarianceSpec.canonical(), 20_000, rng)
        assert np.all(np.abs(mean) <= 4.0 * se)

    def test_autovalor_de_gram_coincide_com_S_de_R(self, rng):
        F = IDENTITY[None]
        dB = 0.1 * rng.standard_normal((50, 3))
        F = step_ito_batch(np.repeat(F, 50, axis=0), dB)
        assert np.allclose(gram_top_eigenvalue(F), S_of_R(frobenius_R(F)), rtol=1e-10)
