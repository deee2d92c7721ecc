"""
scalar-sim: R escalar (E R = e^τ) e Bessel 2D (E X² = 2τ) nos tempos de registro.
"""

import math

import numpy as np

from harness.commands.base import BaseCommand
from scalar_processes.services.scalar_service import ScalarProcessService
from shared.rng.streams import derive_seed
from shared.stats.moments import RunningMoments, z_score

HEADER = ("tau", "mean_R", "se_R", "ref_exp_tau", "z_R", "mean_X2", "se_X2", "ref_2tau", "z_X2")


def _moments(values: np.ndarray) -> RunningMoments:
    moments = RunningMoments()
    moments.update_batch(values)
    return moments


class Command(BaseCommand):
    name = "scalar-sim"
    help = "Simula R e o Bessel 2D e tabela os primeiros momentos."
    block_flags = ("dt",)

    def handle(self, config, repository, **options):
        cfg = config.scalar_sim
        service = ScalarProcessService(cfg.dt)
        seed = derive_seed(config.master_seed, 0)
        R = service.simulate_R_scalar(cfg.tau_end, seed, n_paths=cfg.n_paths)
        X = service.simulate_bessel2d(cfg.tau_end, seed, n_paths=cfg.n_paths, stream_index=1)

        grid = R.tau_grid
        wanted = np.linspace(cfg.tau_end / cfg.n_records, cfg.tau_end, cfg.n_records)
        indices = np.unique(np.clip(np.searchsorted(grid, wanted - 1e-12), 0, len(grid) - 1))
        rows = []
        for k in indices:
            tau = float(grid[k])
            r = _moments(np.atleast_2d(R.values)[:, k])
            x2 = _moments(np.atleast_2d(X.values)[:, k] ** 2)
            rows.append(
                [
                    tau,
                    r.mean,
                    r.std_error,
                    math.exp(tau),
                    z_score(r.mean, math.exp(tau), r.std_error),
                    x2.mean,
                    x2.std_error,
                    2.0 * tau,
                    z_score(x2.mean, 2.0 * tau, x2.std_error),
                ]
            )
        repository.write_table("scalar_sim", HEADER, rows)
