"""
Implementação em arquivo dos relatórios: CSV com cabeçalho e JSON.
"""

import csv
import json
from pathlib import Path
from typing import Optional, Sequence

import structlog

from harness.repositories.interfaces import IReportRepository
from shared.events.event_bus import DomainEvent, EventBus
from shared.stats.moments import MomentReport

logger = structlog.get_logger(__name__)


class FileReportRepository(IReportRepository):
    def __init__(self, out_dir: Path, event_bus: Optional[EventBus] = None):
        self.out_dir = Path(out_dir)
        self.event_bus = event_bus or EventBus()

    def _path(self, name: str, suffix: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / f"{name}{suffix}"

    def _written(self, path: Path, kind: str):
        logger.info("artifact_written", path=str(path), kind=kind)
        self.event_bus.publish("artifact_written", DomainEvent(path=str(path), kind=kind))

    def write_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
        path = self._path(name, ".csv")
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            # repr mantém todos os dígitos do float
            writer.writerows([[repr(float(v)) if isinstance(v, float) else v for v in row] for row in rows])
        self._written(path, "csv")
        return path

    def write_reports(self, name: str, reports: Sequence[MomentReport]) -> Path:
        path = self._path(name, ".json")
        path.write_text(
            json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False),
            encoding="utf-8",
        )
        self._written(path, "json")
        return path

    def read_reports(self, name: str) -> list[dict]:
        return json.loads((self.out_dir / f"{name}.json").read_text(encoding="utf-8"))
