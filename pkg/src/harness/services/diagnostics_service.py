"""
Diagnósticos não-gating: resíduo contra o fluxo acoplado, estatística de
incremento, momentos de intermitência, crescimento sublinear e aumento
de difusividade.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import structlog

from corrector_scales.domain.scale_map import ScaleMap
from drift_solver.services.particle_service import ParticleService
from drift_solver.services.pde_service import PdeService
from drift_solver.services.statistics_service import (
    enhancement_ratio,
    increment_statistic,
    intermittency_moment,
    theorem1_residual,
)
from field_ensemble.services.field_service import FieldEnsembleService
from harness.config import DiagnosticsConfig
from harness.repositories.interfaces import IReportRepository
from scalar_processes.services.scalar_service import sublinear_growth_fraction
from shared.events.event_bus import DomainEvent, EventBus
from shared.parallel.executor import run_work_items
from shared.rng.streams import DOMAIN_SCALAR, derive_seed, seed_stream
from shared.stats.moments import MomentReport, RunningMoments

logger = structlog.get_logger(__name__)

REPORT_NAME = "diagnostics_report"


@dataclass(frozen=True)
class RealizationTask:
    config: DiagnosticsConfig
    seed: int
    stream_index: int


def _realization(task: RealizationTask) -> tuple[float, float]:
    cfg = task.config
    field_service = FieldEnsembleService(cfg.torus_side, cfg.grid_n)
    field = field_service.sample_field(cfg.epsilon, task.seed, stream_index=task.stream_index)
    x = np.asarray(cfg.x, dtype=float)
    series = PdeService().solve_phi_pde(field, cfg.T, cfg.dt, probes=np.stack([np.zeros(2), x]))
    return increment_statistic(series, x, cfg.T), theorem1_residual(field, series, x, cfg.T)


class DiagnosticsService:
    """Use Cases dos diagnósticos (relatados, nunca bloqueantes)."""

    def __init__(
        self,
        config: DiagnosticsConfig,
        master_seed: int,
        workers: int = 1,
        repository: Optional[IReportRepository] = None,
        event_bus: Optional[EventBus] = None,
    ):
        self.config = config
        self.master_seed = master_seed
        self.workers = workers
        self.repository = repository
        self.event_bus = event_bus or EventBus()

    def field_statistics(self) -> list[MomentReport]:
        cfg = self.config
        seed = derive_seed(self.master_seed, 100)
        tasks = [RealizationTask(cfg, seed, i) for i in range(cfg.n_realizations)]
        results = run_work_items(_realization, tasks, workers=self.workers)
        statistics = np.array([r[0] for r in results])
        residuals = np.array([r[1] for r in results])

        increment = RunningMoments()
        increment.update_batch(statistics)
        residual = RunningMoments()
        residual.update_batch(residuals)

        x = np.asarray(cfg.x, dtype=float)
        reports = [
            MomentReport.from_moments("increment_statistic", increment, gating=False),
            MomentReport.from_moments("theorem1_residual", residual, gating=False),
        ]
        # E|F_{0,τ(T)}|² = 2λ(T): normaliza a constante observada
        scale_map = ScaleMap(cfg.epsilon)
        lam = scale_map.lambda_of(cfg.T)
        reports[1].details["observed_constant"] = residual.mean / (cfg.epsilon**2 * 2.0 * lam)
        reports[0].details["scale"] = max(1.0, lam / scale_map.lambda_of(float(x @ x)))
        for p in cfg.powers:
            reports.append(
                intermittency_moment(
                    statistics, x, cfg.T, p, cfg.epsilon, min_realizations=cfg.n_realizations
                )
            )
        return reports

    def scalar_growth(self) -> list[MomentReport]:
        rng = seed_stream(derive_seed(self.master_seed, 101), 0, domain=DOMAIN_SCALAR)
        return [sublinear_growth_fraction(n=100_000, rng=rng)]

    def transport(self) -> list[MomentReport]:
        cfg = self.config
        field = FieldEnsembleService(cfg.torus_side, cfg.grid_n).sample_field(
            cfg.epsilon, derive_seed(self.master_seed, 102)
        )
        particles = ParticleService()
        path = particles.simulate_particles(
            field, np.zeros((1, 2)), 2_000, t_end=cfg.T, dt=cfg.dt, seed=derive_seed(self.master_seed, 103)
        )
        characteristic = particles.characteristic_gradient(field, t_end=min(cfg.T, 10.0), dt=cfg.dt)
        drift = PdeService().transport_energy_drift(field, T=1.0, dt=cfg.dt)
        return [
            enhancement_ratio(path.displacement, cfg.T, cfg.epsilon),
            MomentReport.deterministic(
                "characteristic_det_defect", characteristic.max_det_defect, 0.0, atol=1e-8
            ),
            MomentReport.deterministic("transport_energy_drift", drift, 0.0, atol=1e-8),
        ]

    def run(self) -> list[MomentReport]:
        reports = self.field_statistics() + self.scalar_growth() + self.transport()
        for report in reports:
            report.gating = False
            self.event_bus.publish("criterion_evaluated", DomainEvent(name=report.name, passed=report.passed))
        if self.repository is not None:
            self.repository.write_reports(REPORT_NAME, reports)
        logger.info("diagnostics_completed", n_reports=len(reports))
        return reports
