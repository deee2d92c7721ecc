"""
corrector-run: E|F_L|² do corretor multiescala contra 2λ(L² − 1).
"""

import math

import numpy as np

from corrector_scales.domain.scale_map import ScaleMap
from corrector_scales.services.corrector_service import CorrectorService
from field_ensemble.services.field_service import FieldEnsembleService
from harness.commands.base import BaseCommand
from shared.rng.streams import derive_seed

HEADER = (
    "L",
    "mean_F2",
    "se_F2",
    "ref_2lambda",
    "relative_error",
    "mean_proxy_trace",
    "se_proxy_trace",
    "mean_proxy_F2",
    "se_proxy_F2",
)


class Command(BaseCommand):
    name = "corrector-run"
    help = "Constrói o corretor casca a casca e tabela E|F_L|² por realização do campo."
    block_flags = ("eps",)

    def add_arguments(self, parser):
        parser.add_argument("--allow-empty", action="store_true", help="Pula cascas sem modos.")

    def handle(self, config, repository, **options):
        cfg = config.corrector_run
        field_service = FieldEnsembleService(cfg.torus_side, cfg.grid_n)
        service = CorrectorService(cfg.epsilon, field_service, self.event_bus)
        scale_map = ScaleMap(cfg.epsilon)
        # L = e^{j/2} até L_max
        n_levels = max(1, int(math.floor(2.0 * math.log(cfg.L_max) + 1e-9)))
        levels = sorted({*np.exp(0.5 * np.arange(1, n_levels + 1)).tolist(), cfg.L_max})
        rows = []
        for index, L in enumerate(levels):
            ensemble = service.frobenius_ensemble(
                L,
                cfg.n_realizations,
                derive_seed(config.master_seed, index),
                shells_per_efold=cfg.shells_per_efold,
                workers=config.workers,
                allow_empty=bool(options.get("allow_empty")),
            )
            F2 = ensemble.frobenius_F()
            trace = ensemble.proxy_trace()
            proxy = ensemble.frobenius_proxy()
            reference = 2.0 * scale_map.tilde_lambda(L)
            rows.append(
                [
                    float(L),
                    F2.mean,
                    F2.std_error,
                    reference,
                    F2.mean / reference - 1.0,
                    trace.mean,
                    trace.std_error,
                    proxy.mean,
                    proxy.std_error,
                ]
            )
        repository.write_table("corrector_run", HEADER, rows)
