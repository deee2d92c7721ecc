"""
Interfaces abstratas dos repositórios de artefatos.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Sequence

from field_ensemble.domain.entities import SpectralField
from shared.stats.moments import MomentReport


class IReportRepository(ABC):
    """Interface dos artefatos tabulares e relatórios."""

    @abstractmethod
    def write_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
        """Grava uma tabela CSV com cabeçalho."""
        ...

    @abstractmethod
    def write_reports(self, name: str, reports: Sequence[MomentReport]) -> Path:
        """Grava um array JSON de MomentReport."""
        ...

    @abstractmethod
    def read_reports(self, name: str) -> list[dict]:
        """Relê um relatório gravado."""
        ...


class IFieldDumpRepository(ABC):
    """Interface do dump espectral de campos."""

    @abstractmethod
    def save(self, field: SpectralField, name: str) -> Path:
        ...

    @abstractmethod
    def load(self, name: str) -> SpectralField:
        ...
