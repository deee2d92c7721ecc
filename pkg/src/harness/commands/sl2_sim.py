"""
sl2-sim: momentos de R = ½|F|² e |F|² ao longo de τ contra 2e^τ.
"""

import math

import numpy as np

from harness.commands.base import BaseCommand
from shared.rng.streams import derive_seed
from shared.stats.moments import RunningMoments, z_score
from sl2_core.domain.entities import CovarianceSpec
from sl2_core.services.diffusion_service import Sl2DiffusionService

HEADER = ("tau", "mean_R", "se_R", "mean_F2", "se_F2", "ref_2exp_tau", "z")


class Command(BaseCommand):
    name = "sl2-sim"
    help = "Simula a difusão F em SL(2) e tabela E|F_τ|² contra 2e^τ."
    block_flags = ("dt",)

    def handle(self, config, repository, **options):
        cfg = config.sl2_sim
        service = Sl2DiffusionService(CovarianceSpec.canonical(), cfg.dt, self.event_bus)
        taus = np.linspace(cfg.tau_end / cfg.n_records, cfg.tau_end, cfg.n_records)
        ensemble = service.simulate_F_batch(
            cfg.tau_end, cfg.n_paths, taus, derive_seed(config.master_seed, 0)
        )
        rows = []
        for tau, R in zip(ensemble.record_taus, ensemble.frobenius_R()):
            moments = RunningMoments()
            moments.update_batch(R)
            F2 = moments.scaled(2.0)
            reference = 2.0 * math.exp(tau)
            rows.append(
                [
                    float(tau),
                    moments.mean,
                    moments.std_error,
                    F2.mean,
                    F2.std_error,
                    reference,
                    z_score(F2.mean, reference, F2.std_error),
                ]
            )
        repository.write_table("sl2_sim", HEADER, rows)
