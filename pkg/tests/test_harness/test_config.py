"""
Testes da configuração de execução: defaults, flags e arquivo JSON.
"""

import json

import pytest

from core import settings
from harness.config import RunConfig, load_config
from shared.exceptions.domain_exceptions import ConfigurationError


class TestLoadConfig:
    def test_defaults(self):
        config = load_config()
        assert config.master_seed == settings.MASTER_SEED
        assert config.workers == settings.WORKERS
        assert config.accept.negative_control is False

    def test_tamanhos_do_conjunto_completo(self):
        config = load_config()
        assert config.accept.n_ks == 10_000
        assert config.accept.n_matrix == 100_000
        assert config.accept.n_gbm == 1_000_000

    def test_diagnosticos_no_regime_de_tempo_longo(self):
        diagnostics = load_config().diagnostics
        assert diagnostics.epsilon == 0.5
        assert diagnostics.T == 1000.0
        assert diagnostics.x == (4.0, 0.0)
        assert diagnostics.n_realizations == 32

    def test_chave_desconhecida(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"sl2_sim": {"tau": 1.0}}), encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_flags_sobrescrevem_o_arquivo(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"master_seed": 1, "sl2_sim": {"dt": 0.1}}), encoding="utf-8")
        config = load_config(path, command="sl2-sim", overrides={"seed": 2, "dt": 0.01, "out": None})
        assert config.master_seed == 2
        assert config.sl2_sim.dt == 0.01

    def test_flag_que_nao_se_aplica(self):
        with pytest.raises(ConfigurationError):
            load_config(command="sl2-sim", overrides={"eps": 0.3})

    def test_bloco_aninhado(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"accept": {"duality": {"T": 2.0}}}), encoding="utf-8")
        assert load_config(path).accept.duality.T == 2.0

    def test_json_invalido(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{nope", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_arquivo_que_nao_eh_objeto(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_valor_fora_do_intervalo(self):
        with pytest.raises(ConfigurationError):
            load_config(overrides={"workers": 0})

    def test_bloco_por_nome_do_comando(self):
        config = RunConfig()
        assert config.block("couple-check") is config.couple_check
