"""
field-sample: amostra um campo e grava o dump espectral bit a bit.
"""

import structlog

from field_ensemble.services.field_service import FieldEnsembleService
from harness.commands.base import BaseCommand
from harness.repositories.field_dump_repository import FieldDumpRepository
from shared.rng.streams import derive_seed

logger = structlog.get_logger(__name__)


class Command(BaseCommand):
    name = "field-sample"
    help = "Amostra um campo b de divergência nula e grava seus modos."
    block_flags = ("eps",)

    def add_arguments(self, parser):
        parser.add_argument("--name", default="field", help="Nome do arquivo de dump.")
        parser.add_argument("--stream", type=int, default=0, help="Índice do fluxo do campo.")

    def handle(self, config, repository, **options):
        cfg = config.field_sample
        service = FieldEnsembleService(cfg.torus_side, cfg.grid_n)
        field = service.sample_field(
            cfg.epsilon,
            derive_seed(config.master_seed, 0),
            L=cfg.L,
            stream_index=options.get("stream") or 0,
        )
        path = FieldDumpRepository(config.out).save(field, options.get("name") or "field")
        logger.info(
            "field_sampled",
            path=str(path),
            n_modes=field.n_modes,
            divergence_residual=field.divergence_residual(),
        )
