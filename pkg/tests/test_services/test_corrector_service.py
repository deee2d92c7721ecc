"""
Testes do serviço do corretor proxy: cascas, recursão de F_L e ensemble.
"""

import math

import numpy as np
import pytest

from corrector_scales.domain.entities import CorrectorState
from corrector_scales.domain.scale_map import ScaleMap
from corrector_scales.services.corrector_service import CorrectorService, shell_increment
from shared.exceptions.domain_exceptions import (
    EmptyShellError,
    InvalidInputError,
    UnresolvedBandError,
)

SHELLS = 4


@pytest.fixture
def corrector(field_service):
    return CorrectorService(0.3, field_service)


class TestAdvanceCorrector:
    def test_L_seguinte_deve_crescer(self, corrector, small_field):
        with pytest.raises(InvalidInputError):
            corrector.advance_corrector(CorrectorState.initial(), small_field, 1.0)

    def test_banda_nao_resolvida(self, corrector, small_field):
        with pytest.raises(UnresolvedBandError):
            corrector.advance_corrector(CorrectorState.initial(), small_field, 40.0)

    def test_casca_vazia(self, corrector, small_field):
        # no toro 64π nenhum |m|² inteiro cai em [1003.62, 1003.82)
        state = CorrectorState.initial()
        state.L = 1.01
        with pytest.raises(EmptyShellError):
            corrector.advance_corrector(state, small_field, 1.0101)

    def test_casca_vazia_permitida(self, corrector, small_field):
        state = CorrectorState.initial()
        state.L = 1.01
        new = corrector.advance_corrector(state, small_field, 1.0101, allow_empty=True)
        assert new.empty_shells == 1 and new.L == 1.0101
        assert np.array_equal(new.F_L, state.F_L)
        assert np.array_equal(new.driver_increments[-1], np.zeros(3))

    def test_uma_casca(self, corrector, small_field):
        state = CorrectorState.initial()
        new = corrector.advance_corrector(state, small_field, 1.2)
        shell = shell_increment(small_field, 1.0, 1.2, 1.0, state.probes)
        assert np.allclose(new.F_L, np.eye(2) + shell.gradient[0])
        assert np.allclose(new.phi_tilde, shell.value)
        assert new.shells_done == 1

    def test_incremento_da_casca_tem_traco_nulo(self, small_field, probes):
        shell = shell_increment(small_field, 1.0, 2.0, 1.0, probes)
        assert np.allclose(np.trace(shell.gradient, axis1=1, axis2=2), 0.0, atol=1e-12)


class TestRunTo:
    def test_epsilon_zero_mantem_identidade(self, field_service, quiet_field):
        state = CorrectorService(0.0, field_service).run_to(quiet_field, 4.0, SHELLS)
        assert np.array_equal(state.F_L, np.eye(2))
        assert all(np.array_equal(d, np.zeros(3)) for d in state.driver_increments)

    def test_grade_concorda_com_as_sondas(self, corrector, small_field, probes):
        state = corrector.run_to(small_field, 4.0, SHELLS, probes=probes, track_grid=True)
        assert state.validate() == []
        assert np.allclose(state.phi[0], state.phi_grid[:, 0, 0], atol=1e-10)
        assert state.L == pytest.approx(4.0)

    def test_gradiente_do_proxy_na_origem(self, corrector, small_field, quiet_field):
        state = corrector.run_to(small_field, 2.0, SHELLS)
        gradient = corrector.proxy_gradient_at_zero(state)
        assert np.allclose(gradient, np.eye(2) + state.grad_phi_tilde[0])
        assert gradient.shape == (2, 2)
        quiet = CorrectorService(0.0, corrector.field_service).run_to(quiet_field, 2.0, SHELLS)
        assert np.array_equal(corrector.proxy_gradient_at_zero(quiet), np.eye(2))

    def test_determinante_proximo_de_um(self, corrector, small_field):
        state = corrector.run_to(small_field, 4.0, SHELLS)
        assert state.determinant_drift < 0.25


class TestFrobeniusEnsemble:
    def test_formas(self, corrector):
        ensemble = corrector.frobenius_ensemble(2.0, 4, seed=3, shells_per_efold=SHELLS)
        assert ensemble.F_L.shape == (4, 2, 2)
        assert ensemble.proxy_gradient.shape == (4, 2, 2)
        assert ensemble.driver_increments.shape == (4, len(ensemble.lnL_grid) - 1, 3)

    def test_resultado_independe_do_numero_de_workers(self, corrector):
        serial = corrector.frobenius_ensemble(2.0, 4, seed=3, shells_per_efold=SHELLS, workers=1)
        parallel = corrector.frobenius_ensemble(2.0, 4, seed=3, shells_per_efold=SHELLS, workers=2)
        assert np.array_equal(serial.F_L, parallel.F_L)

    def test_poucas_realizacoes(self, corrector):
        with pytest.raises(InvalidInputError):
            corrector.frobenius_ensemble(2.0, 1, seed=3)

    def test_relogio_exige_epsilon(self, field_service):
        ensemble = CorrectorService(0.0, field_service).frobenius_ensemble(
            2.0, 2, seed=3, shells_per_efold=SHELLS
        )
        with pytest.raises(InvalidInputError):
            ensemble.driver_covariance_per_tau(ScaleMap(0.0))

    @pytest.mark.slow
    def test_lei_de_F_L(self, field_service):
        service = CorrectorService(0.5, field_service)
        ensemble = service.frobenius_ensemble(math.e, 400, seed=17, shells_per_efold=8)
        reference = 2.0 * service.scale_map.tilde_lambda(math.e)
        assert abs(ensemble.frobenius_F().mean - reference) <= 0.05 * reference
