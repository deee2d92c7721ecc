"""
couple-check: covariância de B_L sobre realizações do campo contra o oráculo do círculo.
"""

from harness.commands.base import BaseCommand
from harness.services.acceptance_service import coupling_reports, coupling_samples
from shared.exceptions.domain_exceptions import GateFailure
from shared.rng.streams import derive_seed

HEADER = ("i", "j", "estimate", "std_error", "reference", "z")


class Command(BaseCommand):
    name = "couple-check"
    help = "Confere Cov(B_L) = ln L·diag(¼, ¼, ½) e a independência entre cascas disjuntas."

    def handle(self, config, repository, **options):
        cfg = config.couple_check
        B, halves = coupling_samples(
            derive_seed(config.master_seed, 0),
            cfg.n_realizations,
            cfg.torus_side,
            cfg.grid_n,
            cfg.L,
            workers=config.workers,
        )
        reports = coupling_reports(B, halves, cfg.L)
        details = reports[0].details
        rows = []
        for i in range(3):
            for j in range(3):
                estimate = float(details["covariance"][i, j])
                se = float(details["std_error"][i, j])
                reference = float(details["reference"][i, j])
                rows.append([i, j, estimate, se, reference, (estimate - reference) / se if se > 0 else 0.0])
        repository.write_table("couple_check", HEADER, rows)
        repository.write_reports("couple_check_report", reports)
        failed = [r.name for r in reports if not r.passed]
        if failed:
            raise GateFailure(failed)
