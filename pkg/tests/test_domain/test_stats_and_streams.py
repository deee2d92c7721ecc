"""
Testes unitários dos acumuladores, do relatório de momentos e dos fluxos aleatórios.
"""

import json
import math

import numpy as np
import pytest

from shared.exceptions.domain_exceptions import InvalidInputError
from shared.rng.streams import DOMAIN_FIELDS, chunk_layout, derive_seed, seed_stream
from shared.stats.distribution import covariance_with_errors, ks_rayleigh, ks_two_sample
from shared.stats.moments import MomentReport, RunningMoments, joint_z, mc_mean, tree_merge, z_score


class TestRunningMoments:
    def test_passagem_unica_igual_ao_lote(self, rng):
        values = rng.standard_normal(1000)
        single = RunningMoments()
        for v in values:
            single.update(float(v))
        batch = RunningMoments()
        batch.update_batch(values)
        assert single.mean == pytest.approx(batch.mean, abs=1e-12)
        assert single.variance == pytest.approx(batch.variance, rel=1e-12)

    def test_combinacao_em_arvore(self, rng):
        values = rng.standard_normal(10_000) * 3.0 + 1.0
        parts = []
        for start, size in chunk_layout(len(values), 700):
            m = RunningMoments()
            m.update_batch(values[start : start + size])
            parts.append(m)
        merged = tree_merge(parts)
        assert merged.n == len(values)
        assert merged.mean == pytest.approx(values.mean(), abs=1e-12)
        assert merged.variance == pytest.approx(values.var(ddof=1), rel=1e-10)

    def test_escala(self):
        m = RunningMoments()
        m.update_batch(np.array([1.0, 2.0, 3.0]))
        doubled = m.scaled(2.0)
        assert doubled.mean == 4.0 and doubled.variance == pytest.approx(4.0 * m.variance)

    def test_poucas_amostras_sem_erro_padrao(self):
        m = RunningMoments()
        m.update(1.0)
        assert m.std_error == 0.0

    def test_mc_mean_com_fluxo_curto(self):
        with pytest.raises(InvalidInputError):
            mc_mean(iter([np.ones(5)]), 10)

    def test_mc_mean_corta_no_n(self):
        report = mc_mean(iter([np.ones(5), np.zeros(5)]), 7)
        assert report.n_samples == 7 and report.mean == pytest.approx(5.0 / 7.0)

    def test_mc_mean_fluxo_constante(self):
        report = mc_mean(iter([2.5] * 10), 10)
        assert report.mean == 2.5 and report.std_error == 0.0

    def test_mc_mean_duas_amostras(self):
        report = mc_mean(iter([0.0, 2.0]), 2)
        assert report.mean == pytest.approx(1.0)
        assert report.std_error == pytest.approx(1.0)

    def test_mc_mean_normais(self):
        rng = seed_stream(2024, 0)
        blocks = (rng.standard_normal(100_000) for _ in range(10))
        report = mc_mean(blocks, 1_000_000, name="normal", reference=0.0)
        assert abs(report.mean) <= 3.0 / math.sqrt(1_000_000)
        assert report.name == "normal" and report.passed is True


class TestMomentReport:
    def test_gate_por_z(self):
        m = RunningMoments(n=100, mean=1.1, m2=99.0)
        report = MomentReport.from_moments("x", m, reference=1.0, z_gate=3.0)
        assert report.z_score == pytest.approx(1.0)
        assert report.passed is True

    def test_condicao_extra(self):
        m = RunningMoments(n=100, mean=1.1, m2=99.0)
        report = MomentReport.from_moments("x", m, reference=1.0).require(False, "viés")
        assert report.passed is False
        assert report.details["conditions"] == {"viés": False}

    def test_deterministico(self):
        assert MomentReport.deterministic("d", 1e-13, 0.0, atol=1e-12).passed is True
        assert MomentReport.deterministic("d", 1e-11, 0.0, atol=1e-12).passed is False

    def test_z_sem_erro_padrao(self):
        assert z_score(1.0, 1.0, 0.0) == 0.0
        assert z_score(2.0, 1.0, 0.0) == math.inf

    def test_dicionario_serializavel(self):
        report = MomentReport("x", 1, 1.0, 0.0, z_score=math.inf, details={"a": np.float64(2.0)})
        assert json.loads(json.dumps(report.to_dict()))["z_score"] == "inf"

    def test_z_conjunto(self):
        a = RunningMoments(n=100, mean=1.0, m2=99.0)
        b = RunningMoments(n=100, mean=1.0, m2=99.0)
        assert joint_z(a, b) == 0.0


class TestStreams:
    def test_mesmo_fluxo_reproduzivel(self):
        a = seed_stream(42, 3).standard_normal(5)
        b = seed_stream(42, 3).standard_normal(5)
        assert np.array_equal(a, b)

    def test_fluxos_e_dominios_distintos(self):
        a = seed_stream(42, 3).standard_normal(5)
        assert not np.array_equal(a, seed_stream(42, 4).standard_normal(5))
        assert not np.array_equal(a, seed_stream(42, 3, domain=DOMAIN_FIELDS).standard_normal(5))

    def test_layout_dos_blocos(self):
        assert chunk_layout(10, 4) == [(0, 4), (4, 4), (8, 2)]

    def test_semente_derivada(self):
        assert derive_seed(1, 2) == derive_seed(1, 2)
        assert derive_seed(1, 2) != derive_seed(1, 3)
        assert 0 <= derive_seed(1, 2) < 2**64

    def test_indice_negativo_rejeitado(self):
        with pytest.raises(ValueError):
            seed_stream(1, -1)


class TestDistribution:
    def test_ks_mesma_lei(self, rng):
        result = ks_two_sample(rng.standard_normal(2000), rng.standard_normal(2000))
        assert result.passes(0.001)

    def test_ks_leis_diferentes(self, rng):
        result = ks_two_sample(rng.standard_normal(2000), rng.standard_normal(2000) + 0.5)
        assert not result.passes(0.01)

    def test_ks_rayleigh(self, rng):
        samples = np.hypot(rng.standard_normal(2000), rng.standard_normal(2000))
        assert ks_rayleigh(samples, 1.0).passes(0.001)

    def test_covariancia_com_erros(self, rng):
        samples = rng.standard_normal((20_000, 2)) * np.array([1.0, 2.0])
        cov, se = covariance_with_errors(samples)
        assert np.all(np.abs(cov - np.diag([1.0, 4.0])) <= 4.0 * se)
