"""
Base dos comandos da CLI, no formato dos management commands:
`help`, `add_arguments(parser)` e `handle(...)`.
"""

import argparse
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional

import structlog

from harness.config import RunConfig, load_config
from harness.repositories.report_repository import FileReportRepository
from shared.events.event_bus import EventBus

logger = structlog.get_logger(__name__)


class BaseCommand(ABC):
    help = ""
    name = ""
    # flags de bloco aceitas por este comando
    block_flags: tuple[str, ...] = ()

    def __init__(self, event_bus: Optional[EventBus] = None):
        self.event_bus = event_bus or EventBus()

    def create_parser(self, subparsers) -> argparse.ArgumentParser:
        parser = subparsers.add_parser(self.name, help=self.help, description=self.help)
        parser.add_argument("--config", type=Path, default=None, help="Arquivo JSON de configuração.")
        parser.add_argument("--seed", type=int, default=None, help="Semente mestra.")
        parser.add_argument("--workers", type=int, default=None, help="Processos paralelos.")
        parser.add_argument("--out", type=Path, default=None, help="Diretório de saída.")
        if "dt" in self.block_flags:
            parser.add_argument("--dt", type=float, default=None, help="Passo de tempo.")
        if "eps" in self.block_flags:
            parser.add_argument("--eps", type=float, default=None, help="Intensidade ε do campo.")
        self.add_arguments(parser)
        parser.set_defaults(command=self)
        return parser

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Argumentos específicos do comando."""

    def load(self, options: dict[str, Any]) -> RunConfig:
        overrides = {key: options.get(key) for key in ("seed", "workers", "out", *self.block_flags)}
        return load_config(options.get("config"), command=self.name, overrides=overrides)

    def execute(self, options: dict[str, Any]) -> int:
        config = self.load(options)
        repository = FileReportRepository(config.out, self.event_bus)
        structlog.contextvars.bind_contextvars(command=self.name, master_seed=config.master_seed)
        logger.info("command_started", workers=config.workers, out=str(config.out))
        extra = {key: value for key, value in options.items() if key not in ("config", "command_name")}
        self.handle(config, repository, **extra)
        logger.info("command_completed")
        return 0

    @abstractmethod
    def handle(self, config: RunConfig, repository: FileReportRepository, **options):
        ...
