"""
Testes dos repositórios em arquivo: tabelas, relatórios e dump de campo.
"""

import csv

import numpy as np
import pytest

from harness.repositories.field_dump_repository import FieldDumpRepository
from harness.repositories.report_repository import FileReportRepository
from shared.events.event_bus import EventBus
from shared.exceptions.domain_exceptions import ConfigurationError
from shared.stats.moments import MomentReport


class TestFileReportRepository:
    def test_tabela_com_cabecalho(self, tmp_path):
        path = FileReportRepository(tmp_path).write_table("t", ("a", "b"), [[0.1, 2], [1.0 / 3.0, 3]])
        with path.open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["a", "b"]
        assert float(rows[2][0]) == 1.0 / 3.0

    def test_relatorios_relidos(self, tmp_path):
        repository = FileReportRepository(tmp_path)
        report = MomentReport.deterministic("d", 0.0, 0.0, atol=1e-12)
        repository.write_reports("r", [report])
        loaded = repository.read_reports("r")
        assert loaded[0]["name"] == "d" and loaded[0]["passed"] is True

    def test_evento_de_artefato(self, tmp_path):
        bus = EventBus()
        seen = []
        bus.subscribe("artifact_written", seen.append)
        FileReportRepository(tmp_path / "sub", bus).write_table("t", ("a",), [[1]])
        assert seen[0].data["kind"] == "csv"


class TestFieldDumpRepository:
    def test_releitura_bit_a_bit(self, tmp_path, small_field):
        repository = FieldDumpRepository(tmp_path)
        repository.save(small_field, "campo")
        loaded = repository.load("campo")
        assert np.array_equal(loaded.modes, small_field.modes)
        assert np.array_equal(loaded.coeffs, small_field.coeffs)
        assert np.array_equal(loaded.noise, small_field.noise)
        assert loaded.torus_side == small_field.torus_side
        assert loaded.validate() == []

    def test_arquivo_sem_assinatura(self, tmp_path):
        (tmp_path / "x.field").write_text("lixo\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            FieldDumpRepository(tmp_path).load("x")
