"""
Testes do serviço dos processos escalares: quadraturas, momentos e comparações pathwise.
"""

import math

import numpy as np
import pytest

from scalar_processes.domain.transforms import gbm_moment
from scalar_processes.services.scalar_service import (
    ScalarProcessService,
    gbm_moment_mc,
    gbm_moment_quadrature,
    mass_concentration_mc,
    mass_concentration_quadrature,
    moment_domination,
    paths_at_one,
    sublinear_growth_fraction,
)
from shared.exceptions.domain_exceptions import InvalidInputError
from shared.stats.distribution import ks_rayleigh
from shared.stats.moments import RunningMoments, z_score


class TestQuadratures:
    @pytest.mark.parametrize("tau", [0.5, 1.0, 4.0])
    def test_concentracao_de_massa_vale_meio(self, tau):
        assert mass_concentration_quadrature(tau) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_momentos_do_gbm_por_quadratura(self, p):
        assert gbm_moment_quadrature(p, 1.0) == pytest.approx(gbm_moment(p, 1.0), rel=1e-10)

    def test_tau_nao_positivo_rejeitado(self):
        with pytest.raises(InvalidInputError):
            mass_concentration_quadrature(0.0)


class TestMonteCarlo:
    def test_concentracao_de_massa_mc(self, rng):
        moments = mass_concentration_mc(1.0, 200_000, rng)
        assert abs(z_score(moments.mean, 0.5, moments.std_error)) <= 4.0

    def test_momento_do_gbm_mc(self, rng):
        moments = gbm_moment_mc(2, 0.5, 200_000, rng)
        assert abs(z_score(moments.mean, gbm_moment(2, 0.5), moments.std_error)) <= 4.0

    def test_crescimento_sublinear_nao_bloqueia(self, rng):
        report = sublinear_growth_fraction(n=20_000, rng=rng)
        assert report.gating is False
        assert report.details["tau"] == 50.0 and report.details["alpha"] == 0.75
        assert report.mean > 0.9 and report.passed is True

    def test_dominacao_de_momentos(self, rng):
        # R = cosh(ln S) tem E R² bem abaixo de E S² = e³
        w = rng.standard_normal(20_000)
        S = np.exp(0.5 + w)
        R = 0.5 * (S + 1.0 / S)
        R_moments = RunningMoments()
        R_moments.update_batch(R**2)
        report_R, report_S = moment_domination(1.0, 2, R_moments, rng)
        assert report_R.passed is True
        assert report_S.analytic_reference == pytest.approx(math.exp(3.0))


class TestScalarProcessService:
    def test_media_de_R(self):
        service = ScalarProcessService(1e-3)
        path = service.simulate_R_scalar(1.0, seed=1, n_paths=20_000, keep_path=False)
        moments = RunningMoments()
        moments.update_batch(path.terminal)
        assert abs(z_score(moments.mean, math.e, moments.std_error)) <= 4.0
        assert np.all(path.terminal >= 1.0)

    def test_R_de_stratonovich_tem_a_mesma_media(self):
        service = ScalarProcessService(1e-3)
        path = service.simulate_R_stratonovich(0.5, seed=2, n_paths=20_000, keep_path=False)
        moments = RunningMoments()
        moments.update_batch(path.terminal)
        assert abs(z_score(moments.mean, math.exp(0.5), moments.std_error)) <= 4.0

    def test_primeiro_passo_de_bessel_eh_rayleigh(self):
        path = ScalarProcessService(0.01).simulate_bessel2d(0.01, seed=3, n_paths=5000)
        assert ks_rayleigh(path.terminal, math.sqrt(0.01)).passes(0.001)

    @pytest.mark.slow
    def test_primeiro_passo_rayleigh_em_cem_mil_caminhos(self):
        service = ScalarProcessService(1e-3)
        path = service.simulate_bessel2d(1e-3, seed=11, n_paths=100_000, keep_path=False)
        assert ks_rayleigh(path.terminal, math.sqrt(1e-3)).passes(0.01)

    def test_bessel_quadrado_medio(self):
        service = ScalarProcessService(1e-3)
        path = service.simulate_bessel2d(1.0, seed=4, n_paths=20_000, keep_path=False)
        moments = RunningMoments()
        moments.update_batch(path.terminal**2)
        assert abs(z_score(moments.mean, 2.0, moments.std_error)) <= 4.0

    def test_tripla_de_comparacao(self):
        triple = ScalarProcessService(1e-3).simulate_comparison_triple(1.0, seed=5, n_paths=64)
        assert triple.validate() == []
        assert all(v <= 0.0 for v in triple.comparison_violations(10.0).values())

    def test_R_nunca_vale_um_em_tau_meio(self):
        path = ScalarProcessService(1e-3).simulate_R_scalar(
            0.5, seed=7, n_paths=100_000, keep_path=False
        )
        assert np.count_nonzero(path.terminal == 1.0) == 0

    def test_caminhos_de_R_nao_grudam_em_um(self):
        path = ScalarProcessService(1e-3).simulate_R_scalar(2.0, seed=8, n_paths=2000)
        assert paths_at_one(path.tau_grid, path.values, 0.1) == 0
        assert np.all(path.values[:, 1:] > 1.0)

    def test_contagem_de_caminhos_em_um(self):
        taus = np.array([0.0, 0.1, 0.2])
        values = np.array([[1.0, 1.0, 1.5], [1.0, 1.2, 1.0], [1.0, 1.1, 1.3]])
        assert paths_at_one(taus, values, 0.1) == 2

    def test_concentracao_de_massa_de_R(self):
        moments = ScalarProcessService(1e-3).r_mass_concentration_mc(1.0, 20_000, seed=6)
        assert moments.mean >= 0.25 - 3.0 * moments.std_error

    def test_dt_invalido(self):
        with pytest.raises(InvalidInputError):
            ScalarProcessService(-1.0)
