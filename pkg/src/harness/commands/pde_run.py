"""
pde-run: resolve a EDP do corretor para um campo e tabela φ nas sondas.
"""

from pathlib import Path

import numpy as np
import structlog

from drift_solver.services.pde_service import PdeService
from drift_solver.services.statistics_service import increment_statistic
from field_ensemble.services.field_service import FieldEnsembleService
from harness.commands.base import BaseCommand
from harness.repositories.field_dump_repository import FieldDumpRepository
from shared.rng.streams import derive_seed

logger = structlog.get_logger(__name__)

HEADER = ("t", "probe_x", "probe_y", "phi_1", "phi_2")


class Command(BaseCommand):
    name = "pde-run"
    help = "Integra ∂ₜφ − Δφ + b·∇φ = b e grava φ(x, t) nas sondas."
    block_flags = ("dt", "eps")

    def add_arguments(self, parser):
        parser.add_argument("--field", type=Path, default=None, help="Dump de campo a reutilizar.")

    def handle(self, config, repository, **options):
        cfg = config.pde_run
        dump = options.get("field")
        if dump is not None:
            field = FieldDumpRepository(Path(dump).parent).load(Path(dump).stem)
        else:
            field = FieldEnsembleService(cfg.torus_side, cfg.grid_n).sample_field(
                cfg.epsilon, derive_seed(config.master_seed, 0)
            )
        probes = np.vstack([np.zeros((1, 2)), np.array(cfg.probes, dtype=float)])
        series = PdeService().solve_phi_pde(field, cfg.T, cfg.dt, probes=probes)

        rows = [
            [state.t, float(x[0]), float(x[1]), float(value[0]), float(value[1])]
            for state in series.states
            for x, value in zip(series.probes, state.probe_values)
        ]
        repository.write_table("pde_run", HEADER, rows)
        for x in cfg.probes:
            logger.info("increment_statistic", x=list(x), value=increment_statistic(series, x, cfg.T))
