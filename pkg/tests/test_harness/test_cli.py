"""
Testes da CLI: exit codes, comandos pequenos de ponta a ponta e aceitação.
"""

import csv
import json
import math

from harness.commands import accept
from harness.config import load_config
from harness.repositories.report_repository import FileReportRepository
from harness.services.acceptance_service import AcceptanceService, failed_gates
from manage import build_parser, main
from shared.events.event_bus import DomainEvent, EventBus
from shared.exceptions.domain_exceptions import (
    ConfigurationError,
    GateFailure,
    NonFiniteStateError,
)
from shared.exceptions.handlers import exit_code_for


def _write_config(tmp_path, data):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestExitCodes:
    def test_mapeamento(self):
        assert exit_code_for(GateFailure(["x"])) == 1
        assert exit_code_for(ConfigurationError("x")) == 2
        assert exit_code_for(NonFiniteStateError(1.0)) == 3
        assert exit_code_for(RuntimeError("x")) == 3


class TestParser:
    def test_nome_do_dump_nao_colide_com_o_subcomando(self):
        options = vars(build_parser().parse_args(["field-sample", "--name", "b"]))
        assert options["command_name"] == "field-sample"
        assert options["name"] == "b"


class TestMain:
    def test_sl2_sim_grava_tabela(self, tmp_path):
        config = _write_config(
            tmp_path, {"sl2_sim": {"tau_end": 0.2, "dt": 0.01, "n_paths": 50, "n_records": 2}}
        )
        code = main(["sl2-sim", "--config", config, "--out", str(tmp_path)])
        assert code == 0
        with (tmp_path / "sl2_sim.csv").open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0][0] == "tau" and len(rows) == 3

    def test_campo_gravado_alimenta_a_edp(self, tmp_path):
        config = _write_config(
            tmp_path,
            {
                "field_sample": {"torus_side": 64 * math.pi, "grid_n": 128, "epsilon": 0.3},
                "pde_run": {"T": 1.0, "dt": 0.1, "probes": [[2.0, 0.0]]},
            },
        )
        out = str(tmp_path)
        assert main(["field-sample", "--config", config, "--out", out, "--name", "b"]) == 0
        dump = str(tmp_path / "b.field")
        assert main(["pde-run", "--config", config, "--out", out, "--field", dump]) == 0
        with (tmp_path / "pde_run.csv").open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["t", "probe_x", "probe_y", "phi_1", "phi_2"]
        assert len(rows) == 1 + 2 * 65

    def test_configuracao_invalida(self, tmp_path):
        config = _write_config(tmp_path, {"nao_existe": 1})
        assert main(["sl2-sim", "--config", config, "--out", str(tmp_path)]) == 2

    def test_aceitacao_deterministica(self, tmp_path):
        assert main(["accept", "--only", "1", "4", "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "acceptance_report.json").read_text(encoding="utf-8"))
        assert [r["name"] for r in report] == ["determinant_preservation", "trace_identity"]

    def test_controle_negativo_reprova(self, tmp_path):
        config = _write_config(tmp_path, {"accept": {"n_paths": 2000}})
        code = main(
            [
                "accept",
                "--negative-control",
                "--only",
                "2",
                "--dt",
                "0.01",
                "--config",
                config,
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 1

    def test_diagnosticos_nao_bloqueiam(self, tmp_path):
        config = _write_config(
            tmp_path,
            {"diagnostics": {"T": 4.0, "dt": 0.1, "n_realizations": 2, "powers": [1.0]}},
        )
        assert main(["diagnostics", "--config", config, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "diagnostics_report.json").read_text(encoding="utf-8"))
        names = [r["name"] for r in report]
        assert "increment_statistic" in names and "transport_energy_drift" in names
        assert all(r["gating"] is False for r in report)


class TestAcceptanceService:
    def test_eventos_por_criterio(self, tmp_path):
        bus = EventBus()
        seen = []
        bus.subscribe("criterion_evaluated", seen.append)
        config = load_config(overrides={"out": tmp_path})
        reports = AcceptanceService(config, FileReportRepository(tmp_path, bus), bus).run({1, 4})
        assert [e.data["criterion"] for e in seen] == [1, 4]
        assert failed_gates(reports) == []

    def test_positividade_estrita_nos_caminhos_de_R(self, tmp_path):
        config = load_config(overrides={"out": tmp_path})
        config.accept.n_paths = 512
        config.accept.n_matrix = 256
        reports = AcceptanceService(config).strict_positivity()
        assert [r.name for r in reports] == ["strict_positivity_scalar_R", "strict_positivity_matrix_R"]
        assert all(r.passed and r.mean == 0.0 for r in reports)


class TestProgressLog:
    def test_conta_criterios_e_gates_reprovados(self):
        bus = EventBus()
        progress = accept.ProgressLog()
        progress.register(bus)
        bus.publish("criterion_evaluated", DomainEvent(criterion=1, name="a", passed=True, gating=True))
        bus.publish("criterion_evaluated", DomainEvent(criterion=2, name="b", passed=False, gating=True))
        bus.publish("criterion_evaluated", DomainEvent(criterion=12, name="c", passed=False, gating=False))
        assert progress.evaluated == 3 and progress.failed == 1

    def test_accept_assina_o_barramento(self, tmp_path, monkeypatch):
        created = []

        class RecordingProgress(accept.ProgressLog):
            def __init__(self):
                super().__init__()
                created.append(self)

        monkeypatch.setattr(accept, "ProgressLog", RecordingProgress)
        assert main(["accept", "--only", "1", "4", "--out", str(tmp_path)]) == 0
        assert len(created) == 1 and created[0].evaluated == 2
