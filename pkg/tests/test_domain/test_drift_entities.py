"""
Testes unitários das entidades do solver de transporte.
"""

import numpy as np
import pytest

from drift_solver.domain.entities import ParticlePath, PdeSeries, PdeState, output_times


class TestOutputTimes:
    def test_comeca_em_zero_e_termina_em_T(self):
        times = output_times(10.0)
        assert times[0] == 0.0 and times[-1] == 10.0
        assert len(times) == 65
        assert times[1] == pytest.approx(0.1)

    def test_crescente(self):
        assert np.all(np.diff(output_times(64.0, n_log=16)) > 0)


class TestPdeSeries:
    def _series(self):
        probes = np.array([[0.0, 0.0], [2.0, 0.0]])
        states = [
            PdeState(0.0, np.zeros((2, 2))),
            PdeState(1.0, np.array([[0.1, 0.0], [0.2, -0.1]])),
        ]
        return PdeSeries(probes=probes, states=states)

    def test_valores_na_sonda(self):
        series = self._series()
        assert np.allclose(series.values_at(np.array([2.0, 0.0])), [[0.0, 0.0], [0.2, -0.1]])

    def test_ponto_fora_das_sondas(self):
        with pytest.raises(KeyError):
            self._series().values_at(np.array([1.0, 1.0]))

    def test_serie_valida(self):
        assert self._series().validate() == []

    def test_phi_inicial_nao_nulo_invalido(self):
        series = self._series()
        series.states[0].probe_values[0, 0] = 1.0
        assert any("t=0" in e for e in series.validate())

    def test_media_espacial(self):
        state = PdeState(0.0, np.zeros((1, 2)), phi=np.ones((2, 4, 4)))
        assert np.allclose(state.spatial_mean, [1.0, 1.0])


class TestParticlePath:
    def test_deslocamento(self):
        positions = np.array([[[0.0, 0.0]], [[1.0, 2.0]]])
        path = ParticlePath(t_grid=np.array([0.0, 1.0]), positions=positions, seed=0)
        assert np.array_equal(path.displacement, [[1.0, 2.0]])
        assert path.n_particles == 1

    def test_salto_grande_demais_invalido(self):
        positions = np.array([[[0.0, 0.0]], [[100.0, 0.0]]])
        path = ParticlePath(t_grid=np.array([0.0, 0.01]), positions=positions, seed=0)
        assert any("Salto" in e for e in path.validate(b_max=1.0))
