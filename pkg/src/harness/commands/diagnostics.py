"""
diagnostics: relatórios não-gating (resíduo do fluxo acoplado, intermitência, transporte).
"""

from harness.commands.base import BaseCommand
from harness.services.diagnostics_service import DiagnosticsService


class Command(BaseCommand):
    name = "diagnostics"
    help = "Gera diagnostics_report.json; nunca altera o exit code."
    block_flags = ("dt", "eps")

    def handle(self, config, repository, **options):
        DiagnosticsService(
            config.diagnostics,
            config.master_seed,
            workers=config.workers,
            repository=repository,
            event_bus=self.event_bus,
        ).run()
