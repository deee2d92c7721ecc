"""
Testes unitários das funções fechadas e das entidades dos processos escalares.
"""

import math

import numpy as np
import pytest

from scalar_processes.domain.entities import ComparisonTriple, PathKind, ScalarPath
from scalar_processes.domain.transforms import R_of_S, S_of_R, gbm_exact, gbm_moment
from scalar_processes.services.scalar_service import (
    implicit_bessel_step,
    implicit_log_s_tilde_step,
    uniform_grid,
)
from shared.exceptions.domain_exceptions import InvalidInputError


class TestTransforms:
    def test_momentos_do_gbm(self):
        assert gbm_moment(1, 1.0) == pytest.approx(math.e)
        assert gbm_moment(2, 1.0) == pytest.approx(math.exp(3.0))

    def test_S_e_R_sao_inversas(self):
        R = np.array([1.0, 1.5, 10.0])
        assert np.allclose(R_of_S(S_of_R(R)), R, rtol=1e-13)

    def test_S_de_um_eh_um(self):
        assert S_of_R(1.0) == 1.0

    def test_argumento_menor_que_um_rejeitado(self):
        with pytest.raises(InvalidInputError):
            S_of_R(0.5)

    def test_gbm_com_tau_negativo_rejeitado(self):
        with pytest.raises(InvalidInputError):
            gbm_exact(-1.0, 0.0)


class TestSteppers:
    def test_grade_termina_em_tau_end(self):
        grid = uniform_grid(1.05, 0.1)
        assert grid[0] == 0.0 and grid[-1] == 1.05
        assert np.all(np.diff(grid) > 0)

    def test_passo_de_bessel_implicito_positivo(self, rng):
        X = np.abs(rng.standard_normal(1000))
        dw = rng.standard_normal(1000) * 0.5
        assert np.all(implicit_bessel_step(X, 0.01, dw) > 0)

    def test_passo_de_log_S_tilde_domina_bessel(self, rng):
        y = np.abs(rng.standard_normal(1000)) + 1e-3
        dw = rng.standard_normal(1000) * 0.1
        assert np.all(implicit_log_s_tilde_step(y, 0.01, dw) >= implicit_bessel_step(y, 0.01, dw))


class TestScalarPath:
    def test_caminho_valido(self):
        path = ScalarPath(np.array([0.0, 0.5, 1.0]), np.array([1.0, 1.2, 1.1]), np.array([0.1, -0.1]))
        assert path.validate() == []
        assert path.n_paths == 1
        assert np.allclose(path.driver, [0.0, 0.1, 0.0])

    def test_R_abaixo_de_um_invalido(self):
        path = ScalarPath(np.array([0.0, 1.0]), np.array([1.0, 0.9]), np.array([0.1]), kind=PathKind.R)
        assert any("domínio" in e for e in path.validate())

    def test_incrementos_com_tamanho_errado(self):
        path = ScalarPath(np.array([0.0, 1.0]), np.array([1.0, 1.1]), np.array([0.1, 0.2]))
        assert any("driver_increments" in e for e in path.validate())


class TestComparisonTriple:
    def _triple(self, s_tilde, s, x):
        grid = np.array([0.0, 0.1, 0.2])
        dw = np.array([0.05, -0.02])
        return ComparisonTriple(
            s_tilde=ScalarPath(grid, np.array(s_tilde), dw, kind=PathKind.S_TILDE),
            s=ScalarPath(grid, np.array(s), dw, kind=PathKind.S),
            x=ScalarPath(grid, np.array(x), dw, kind=PathKind.X),
        )

    def test_comparacoes_satisfeitas(self):
        triple = self._triple([1.0, 1.5, 2.0], [1.0, 1.2, 1.4], [0.0, 0.3, 0.5])
        assert triple.validate() == []
        assert all(v <= 0 for v in triple.comparison_violations().values())

    def test_violacao_de_S_tilde_contra_S(self):
        triple = self._triple([1.0, 1.5, 2.0], [1.0, 1.2, 5.0], [0.0, 0.3, 0.5])
        assert triple.comparison_violations(tolerance_factor=0.0)["s_tilde_vs_s"] > 0

    def test_incrementos_diferentes_invalidos(self):
        triple = self._triple([1.0, 1.5, 2.0], [1.0, 1.2, 1.4], [0.0, 0.3, 0.5])
        triple.x.driver_increments = np.array([0.0, 0.0])
        assert any("incremento" in e for e in triple.validate())
