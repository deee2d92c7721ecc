"""
accept: roda os critérios de aceitação; qualquer gate reprovado vira exit code 1.
"""

import structlog

from harness.commands.base import BaseCommand
from harness.services.acceptance_service import AcceptanceService, failed_gates
from shared.events.event_bus import DomainEvent, EventBus
from shared.exceptions.domain_exceptions import GateFailure

logger = structlog.get_logger(__name__)


class ProgressLog:
    """Handlers que registram o andamento da aceitação a partir dos eventos."""

    def __init__(self):
        self.evaluated = 0
        self.failed = 0

    def register(self, event_bus: EventBus):
        event_bus.subscribe("criterion_evaluated", self.on_criterion)
        event_bus.subscribe("run_completed", self.on_run)
        event_bus.subscribe("artifact_written", self.on_artifact)

    def on_criterion(self, event: DomainEvent):
        self.evaluated += 1
        if event.data.get("gating", True) and event.data.get("passed") is False:
            self.failed += 1
        logger.info("acceptance_progress", evaluated=self.evaluated, failed=self.failed, **event.data)

    def on_run(self, event: DomainEvent):
        logger.debug("acceptance_run_step", **event.data)

    def on_artifact(self, event: DomainEvent):
        logger.info("acceptance_artifact", **event.data)


class Command(BaseCommand):
    name = "accept"
    help = "Executa o conjunto de aceitação e grava acceptance_report.json."
    block_flags = ("dt",)

    def add_arguments(self, parser):
        parser.add_argument(
            "--only",
            type=int,
            nargs="+",
            default=None,
            help="Números dos critérios a executar (1–12).",
        )
        parser.add_argument(
            "--negative-control",
            action="store_true",
            help="Troca a covariância por uma que viola o cancelamento de E².",
        )

    def handle(self, config, repository, **options):
        if options.get("negative_control"):
            config.accept.negative_control = True
        only = set(options["only"]) if options.get("only") else None
        progress = ProgressLog()
        progress.register(self.event_bus)
        reports = AcceptanceService(config, repository, self.event_bus).run(only)
        failed = failed_gates(reports)
        logger.info(
            "acceptance_summary",
            n_reports=len(reports),
            n_failed=len(failed),
            evaluated=progress.evaluated,
        )
        if failed:
            raise GateFailure(failed)
