"""
Serviço de aceitação: executa os critérios bloqueantes e grava o relatório.

Cada critério devolve um ou mais MomentReport. O build passa se todo
relatório com `gating=True` tiver `passed=True`.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import structlog

from core import settings
from corrector_scales.domain.scale_map import ScaleMap
from corrector_scales.services.corrector_service import CorrectorService
from drift_solver.services.particle_service import ParticleService
from drift_solver.services.pde_service import PdeService
from field_ensemble.domain.circle import check_postulates, circle_tensor, measure_from_covariance
from field_ensemble.services.field_service import FieldEnsembleService
from harness.config import RunConfig
from harness.repositories.interfaces import IReportRepository
from harness.services.diagnostics_service import REPORT_NAME as DIAGNOSTICS_REPORT
from harness.services.diagnostics_service import DiagnosticsService
from scalar_processes.domain.transforms import gbm_moment
from scalar_processes.services.scalar_service import (
    ScalarProcessService,
    gbm_moment_mc,
    gbm_moment_quadrature,
    mass_concentration_mc,
    mass_concentration_quadrature,
    moment_domination,
    paths_at_one,
)
from shared.events.event_bus import DomainEvent, EventBus
from shared.parallel.executor import run_work_items
from shared.rng.streams import DOMAIN_AUX, chunk_layout, derive_seed, seed_stream
from shared.stats.distribution import covariance_with_errors, ks_two_sample
from shared.stats.moments import MomentReport, RunningMoments
from sl2_core.domain.entities import CovarianceSpec
from sl2_core.domain.value_objects import check_trace_identity
from sl2_core.services.diffusion_service import Sl2DiffusionService

logger = structlog.get_logger(__name__)

REPORT_NAME = "acceptance_report"
NORMALIZATION_TAUS = (0.5, 1.0, 2.0)
TRIPLE_CHUNK = 256
POSITIVITY_TAU = 0.1
FIELD_CHUNK = 256
Z_GATE = settings.Z_GATE
Z_GATE_FIELD = settings.Z_GATE_FIELD


@dataclass(frozen=True)
class CouplingTask:
    seed: int
    first_stream: int
    n_fields: int
    torus_side: float
    grid_n: int
    L: float


def _coupling_chunk(task: CouplingTask) -> tuple[np.ndarray, np.ndarray]:
    """B_L (n, 3) e os incrementos nas duas metades de [0, ln L] (n, 2, 3)."""
    service = FieldEnsembleService(task.torus_side, task.grid_n)
    log_L = math.log(task.L)
    B, halves = [], []
    for i in range(task.n_fields):
        field = service.sample_field(1.0, task.seed, L=task.L, stream_index=task.first_stream + i)
        path = service.coupled_B_path(field, [0.0, 0.5 * log_L, log_L])
        B.append(path.values[-1])
        halves.append(path.increments)
    return np.array(B), np.array(halves)


def coupling_samples(
    seed: int, n_fields: int, torus_side: float, grid_n: int, L: float, workers: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Amostras de B_L e dos incrementos por metade, um campo por fluxo."""
    tasks = [
        CouplingTask(seed, first, size, torus_side, grid_n, L)
        for first, size in chunk_layout(n_fields, FIELD_CHUNK)
    ]
    parts = run_work_items(_coupling_chunk, tasks, workers=workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def coupling_reports(B: np.ndarray, halves: np.ndarray, L: float) -> list[MomentReport]:
    """
    Covariância de B_L contra ln L·C do círculo e covariância cruzada
    entre as duas metades contra zero, entrada a entrada com gate de 4 EP.
    """
    reference = math.log(L) * circle_tensor().per_unit_lnL_covariance()
    cov, se = covariance_with_errors(B)
    z = np.where(se > 0, (cov - reference) / np.where(se > 0, se, 1.0), 0.0)
    coupling = MomentReport(
        name="coupling_covariance",
        n_samples=len(B),
        mean=float(np.max(np.abs(cov - reference))),
        std_error=float(np.max(se)),
        analytic_reference=0.0,
        z_score=float(np.max(np.abs(z))),
        passed=bool(np.max(np.abs(z)) <= Z_GATE_FIELD),
        provenance="ln L·diag(¼, ¼, ½) pela quadratura no círculo",
        details={"covariance": cov, "std_error": se, "reference": reference, "L": L},
    )

    products = halves[:, 0, :, None] * halves[:, 1, None, :]
    cross = products.mean(axis=0)
    cross_se = products.std(axis=0, ddof=1) / math.sqrt(len(products))
    cross_z = float(np.max(np.abs(cross / np.where(cross_se > 0, cross_se, 1.0))))
    disjoint = MomentReport(
        name="disjoint_shells_uncorrelated",
        n_samples=len(products),
        mean=float(np.max(np.abs(cross))),
        std_error=float(np.max(cross_se)),
        analytic_reference=0.0,
        z_score=cross_z,
        passed=cross_z <= Z_GATE_FIELD,
        details={"cross_covariance": cross},
    )
    return [coupling, disjoint]


class AcceptanceService:
    """Use Cases da aceitação."""

    def __init__(
        self,
        config: RunConfig,
        repository: Optional[IReportRepository] = None,
        event_bus: Optional[EventBus] = None,
    ):
        self.config = config
        self.accept = config.accept
        self.repository = repository
        self.event_bus = event_bus or EventBus()
        if self.accept.negative_control:
            # controle negativo: E² não se cancela na média
            self.cov = CovarianceSpec(kappa_sym=0.5, kappa_skew=0.0)
        else:
            self.cov = CovarianceSpec.canonical()
        self._R_at_one: dict[int, RunningMoments] = {}

    def _seed(self, criterion: int, sub: int = 0) -> int:
        return derive_seed(self.config.master_seed, criterion, sub)

    def _rng(self, criterion: int, sub: int = 0) -> np.random.Generator:
        return seed_stream(self._seed(criterion, sub), 0, domain=DOMAIN_AUX)

    def _sl2(self, dt: Optional[float] = None) -> Sl2DiffusionService:
        return Sl2DiffusionService(self.cov, dt or self.accept.dt, self.event_bus)

    def _moments(self, tau: float, powers, dt: Optional[float] = None, sub: int = 0) -> dict:
        return self._sl2(dt).frobenius_moments(
            tau,
            self.accept.n_paths,
            self._seed(2, sub),
            powers=powers,
            workers=self.config.workers,
            chunk_size=self.config.chunk_size,
        )

    # 1
    def determinant_preservation(self) -> list[MomentReport]:
        path = self._sl2().simulate_F(0.0, 2.0, self._seed(1))
        return [
            MomentReport.deterministic(
                "determinant_preservation",
                path.determinant_defect(),
                0.0,
                atol=1e-12,
                provenance="det F = 1 por renormalização",
                n_samples=len(path.tau_grid),
            )
        ]

    # 2
    def normalization(self) -> list[MomentReport]:
        reports = []
        for i, tau in enumerate(NORMALIZATION_TAUS):
            powers = (1, 2, 3) if tau == 1.0 else (1,)
            coarse = self._moments(tau, powers, sub=2 * i)
            fine = self._moments(tau, (1,), dt=self.accept.dt / 2.0, sub=2 * i + 1)
            if tau == 1.0:
                self._R_at_one = coarse
            reference = 2.0 * math.exp(tau)
            F2, F2_fine = coarse[1].scaled(2.0), fine[1].scaled(2.0)
            report = MomentReport.from_moments(
                f"normalization_tau{tau:g}",
                F2,
                reference=reference,
                provenance="E|F_τ|² = 2e^τ",
                z_gate=Z_GATE,
            )
            bias = F2.mean / reference - 1.0
            bias_fine = F2_fine.mean / reference - 1.0
            slack = Z_GATE * math.hypot(F2.std_error, F2_fine.std_error) / reference
            report.details.update({"relative_bias": bias, "relative_bias_half_dt": bias_fine})
            report.require(abs(bias) <= 0.02, "viés relativo ≤ 2%")
            report.require(abs(bias_fine) <= abs(bias) + slack, "viés não cresce com dt/2")
            reports.append(report)
        return reports

    # 3
    def second_moment_R(self) -> list[MomentReport]:
        if not self._R_at_one:
            self._R_at_one = self._moments(1.0, (1, 2, 3), sub=2)
        return [
            MomentReport.from_moments(
                "second_moment_R",
                self._R_at_one[2],
                reference=(2.0 * math.exp(3.0) + 1.0) / 3.0,
                provenance="y′ = 3y − 1",
                z_gate=Z_GATE,
            )
        ]

    # 4
    def trace_identity(self) -> list[MomentReport]:
        rng = self._rng(4)
        A = rng.standard_normal((10_000, 2, 2))
        G = A + np.swapaxes(A, -1, -2)
        residual = float(np.max(np.abs(check_trace_identity(G))))
        return [MomentReport.deterministic("trace_identity", residual, 0.0, atol=1e-12, n_samples=len(G))]

    # 5
    def law_equivalence_R(self) -> list[MomentReport]:
        n = self.accept.n_ks
        scalar = ScalarProcessService(self.accept.dt).simulate_R_scalar(
            1.0, self._seed(5, 0), n_paths=n, keep_path=False
        )
        matrix = self._sl2().simulate_F_batch(1.0, n, [1.0], self._seed(5, 1))
        ks = ks_two_sample(scalar.terminal, matrix.frobenius_R()[-1])
        return [
            MomentReport(
                name="law_equivalence_R",
                n_samples=n,
                mean=ks.statistic,
                std_error=0.0,
                passed=ks.passes(0.01),
                provenance="KS de duas amostras, p > 0.01",
                details={"p_value": ks.p_value},
            )
        ]

    # 6
    def gbm_moments(self) -> list[MomentReport]:
        reports = []
        for p in (1, 2, 3):
            for tau in (0.5, 1.0):
                exact = gbm_moment(p, tau)
                error = abs(gbm_moment_quadrature(p, tau) / exact - 1.0)
                reports.append(
                    MomentReport.deterministic(f"gbm_quadrature_p{p}_tau{tau:g}", error, 0.0, atol=1e-10)
                )
        mc = gbm_moment_mc(2, 1.0, self.accept.n_gbm, self._rng(6, 0))
        reports.append(
            MomentReport.from_moments("gbm_moment_mc", mc, reference=gbm_moment(2, 1.0), z_gate=Z_GATE)
        )
        if not self._R_at_one:
            self._R_at_one = self._moments(1.0, (1, 2, 3), sub=2)
        for p in (2, 3):
            report_R, _ = moment_domination(1.0, p, self._R_at_one[p], self._rng(6, p), z_gate=Z_GATE)
            reports.append(report_R)
        return reports

    # 7
    def mass_concentration(self) -> list[MomentReport]:
        reports = []
        for tau in (1.0, 4.0):
            value = mass_concentration_quadrature(tau)
            reports.append(
                MomentReport.deterministic(
                    f"mass_concentration_quadrature_tau{tau:g}", value, 0.5, atol=1e-10
                )
            )
            mc = mass_concentration_mc(tau, self.accept.n_gbm, self._rng(7, int(tau)))
            reports.append(
                MomentReport.from_moments(
                    f"mass_concentration_mc_tau{tau:g}", mc, reference=0.5, z_gate=Z_GATE
                )
            )
        matrix = self._sl2().simulate_F_batch(2.0, self.accept.n_matrix, [2.0], self._seed(7, 10))
        moments = ScalarProcessService(self.accept.dt).r_mass_concentration_mc(
            2.0, self.accept.n_matrix, 0, R_samples=matrix.frobenius_R()[-1]
        )
        report = MomentReport.from_moments("matrix_mass_concentration", moments)
        reports.append(report.require(moments.mean >= 0.25 - Z_GATE * moments.std_error, "≥ ¼ − 3 EP"))
        return reports

    # 8
    def pathwise_comparisons(self) -> list[MomentReport]:
        service = ScalarProcessService(self.accept.triple_dt)
        worst = {"log_s_tilde_vs_x": -math.inf, "s_tilde_vs_s": -math.inf, "two_r_vs_s": -math.inf}
        seed = self._seed(8)
        for index, (_, size) in enumerate(chunk_layout(self.accept.n_triples, TRIPLE_CHUNK)):
            triple = service.simulate_comparison_triple(2.0, seed, n_paths=size, stream_index=index)
            for key, value in triple.comparison_violations(10.0).items():
                worst[key] = max(worst[key], value)
        violations = MomentReport(
            name="pathwise_comparisons",
            n_samples=self.accept.n_triples,
            mean=max(worst.values()),
            std_error=0.0,
            passed=all(v <= 0.0 for v in worst.values()),
            provenance="ln S̃ ≥ X − 10dt, S̃ ≥ S(1 − 10dt), 2R ≥ S(1 − 10dt)",
            details=worst,
        )
        return [violations] + self.strict_positivity()

    def strict_positivity(self, tau_min: float = POSITIVITY_TAU) -> list[MomentReport]:
        """Nenhum caminho de R (escalar ou ½|F|²) igual a 1 para τ ≥ tau_min."""
        scalar = ScalarProcessService(self.accept.dt)
        seed = self._seed(8, 1)
        at_one = 0
        for index, (_, size) in enumerate(chunk_layout(self.accept.n_paths, TRIPLE_CHUNK)):
            path = scalar.simulate_R_scalar(2.0, seed, n_paths=size, stream_index=index)
            at_one += paths_at_one(path.tau_grid, path.values, tau_min)
        record = [tau_min, 0.5, 1.0, 2.0]
        matrix = self._sl2().simulate_F_batch(2.0, self.accept.n_matrix, record, self._seed(8, 2))
        matrix_at_one = paths_at_one(matrix.record_taus, matrix.frobenius_R().T, tau_min)
        provenance = f"caminhos com R = 1 para τ ≥ {tau_min:g}"
        counts = (
            ("strict_positivity_scalar_R", at_one, self.accept.n_paths),
            ("strict_positivity_matrix_R", matrix_at_one, self.accept.n_matrix),
        )
        return [
            MomentReport.deterministic(name, count, 0, 0.0, provenance, n_samples=n)
            for name, count, n in counts
        ]

    # 9
    def coupling_covariance(self) -> list[MomentReport]:
        B, halves = coupling_samples(
            self._seed(9),
            self.accept.n_fields,
            self.accept.field_torus_side,
            self.accept.field_grid_n,
            L=math.e,
            workers=self.config.workers,
        )
        circle = circle_tensor()
        reports = coupling_reports(B, halves, math.e)
        reference = circle.per_unit_lnL_covariance()
        for name, cov_like in (
            ("postulates_canonical", self.cov),
            ("postulates_quadrature", measure_from_covariance(reference)),
        ):
            square, gram = check_postulates(cov_like)
            report = MomentReport.deterministic(name, max(square, gram), 0.0, atol=1e-12)
            report.details.update({"square_residual": square, "gram_residual": gram})
            reports.append(report)
        reports.append(
            MomentReport.deterministic(
                "circle_trace_component", circle.trace_component, 0.0, atol=1e-12
            )
        )
        reports.append(
            MomentReport.deterministic(
                "circle_kk_average",
                float(np.max(np.abs(circle.kk_average - 0.5 * np.eye(2)))),
                0.0,
                atol=1e-12,
            )
        )
        return reports

    # 10
    def corrector_law(self) -> list[MomentReport]:
        epsilon = 0.5
        field_service = FieldEnsembleService(self.accept.corrector_torus_side, self.accept.corrector_grid_n)
        service = CorrectorService(epsilon, field_service, self.event_bus)
        scale_map = ScaleMap(epsilon)
        reports = []
        for i, L in enumerate((math.e, math.e**2)):
            ensemble = service.frobenius_ensemble(
                L,
                self.accept.n_corrector,
                self._seed(10, i),
                workers=self.config.workers,
            )
            reference = 2.0 * scale_map.tilde_lambda(L)
            moments = ensemble.frobenius_F()
            report = MomentReport.from_moments(
                f"corrector_law_L{L:.4g}",
                moments,
                reference=reference,
                provenance="E|F_L|² = 2λ(L² − 1)",
            )
            relative = moments.mean / reference - 1.0
            report.passed = abs(relative) <= 0.05
            report.details["relative_error"] = relative
            reports.append(report)

            cov, cov_se = ensemble.driver_covariance_per_tau(scale_map)
            target = np.diag([0.25, 0.25, 0.5])
            z = float(np.max(np.abs((cov - target) / np.where(cov_se > 0, cov_se, 1.0))))
            reports.append(
                MomentReport(
                    name=f"driver_law_L{L:.4g}",
                    n_samples=self.accept.n_corrector,
                    mean=float(np.max(np.abs(cov - target))),
                    std_error=float(np.max(cov_se)),
                    analytic_reference=0.0,
                    z_score=z,
                    passed=z <= Z_GATE_FIELD,
                    gating=False,
                    details={"covariance": cov},
                )
            )
            trace = ensemble.proxy_trace()
            reports.append(
                MomentReport.from_moments(
                    f"proxy_trace_L{L:.4g}", trace, reference=2.0, z_gate=Z_GATE_FIELD, gating=False
                )
            )
        return reports

    # 11
    def pde_particle_duality(self) -> list[MomentReport]:
        cfg = self.accept.duality
        field = FieldEnsembleService(cfg.torus_side, cfg.grid_n).sample_field(cfg.epsilon, self._seed(11, 0))
        starts = np.array(cfg.probes, dtype=float)
        series = PdeService().solve_phi_pde(field, cfg.T, cfg.dt, probes=starts, times=[cfg.T])
        expected = starts + series.states[-1].probe_values
        n = self.accept.n_particles
        path = ParticleService().simulate_particles(
            field, starts, n, cfg.T, cfg.dt, self._seed(11, 1), workers=self.config.workers
        )
        final = path.positions[-1].reshape(len(starts), n, 2)
        mean = final.mean(axis=1)
        se = final.std(axis=1, ddof=1) / math.sqrt(n)
        budget = Z_GATE * se + 0.02 * np.abs(series.states[-1].probe_values)
        deviation = np.abs(mean - expected)
        ratio = float(np.max(deviation / budget))
        return [
            MomentReport(
                name="pde_particle_duality",
                n_samples=n * len(starts),
                mean=float(np.max(deviation)),
                std_error=float(np.max(se)),
                analytic_reference=0.0,
                passed=ratio <= 1.0,
                provenance="E X_t = x + φ(x, t), 3 EP + 2%",
                details={"expected": expected, "particle_mean": mean, "budget_ratio": ratio},
            )
        ]

    # 12
    def diagnostics_present(self) -> list[MomentReport]:
        diagnostics = DiagnosticsService(
            self.config.diagnostics,
            self.config.master_seed,
            workers=self.config.workers,
            repository=self.repository,
            event_bus=self.event_bus,
        ).run()
        names = {r.name for r in diagnostics}
        required = {"theorem1_residual", "increment_statistic"}
        present = required <= names and any(n.startswith("intermittency_moment") for n in names)
        if self.repository is not None:
            present = present and len(self.repository.read_reports(DIAGNOSTICS_REPORT)) == len(diagnostics)
        return [
            MomentReport(
                name="diagnostics_present",
                n_samples=len(diagnostics),
                mean=float(len(diagnostics)),
                std_error=0.0,
                passed=present,
                provenance="presença dos diagnósticos não-gating",
            )
        ]

    def criteria(self) -> list[Callable[[], list[MomentReport]]]:
        return [
            self.determinant_preservation,
            self.normalization,
            self.second_moment_R,
            self.trace_identity,
            self.law_equivalence_R,
            self.gbm_moments,
            self.mass_concentration,
            self.pathwise_comparisons,
            self.coupling_covariance,
            self.corrector_law,
            self.pde_particle_duality,
            self.diagnostics_present,
        ]

    def run(self, only: Optional[set[int]] = None) -> list[MomentReport]:
        """Executa os critérios (todos, ou os números em `only`) e grava o relatório."""
        reports: list[MomentReport] = []
        for number, criterion in enumerate(self.criteria(), start=1):
            if only is not None and number not in only:
                continue
            for report in criterion():
                report.details.setdefault("criterion", number)
                reports.append(report)
                self.event_bus.publish(
                    "criterion_evaluated",
                    DomainEvent(
                        criterion=number,
                        name=report.name,
                        passed=report.passed,
                        z_score=report.z_score,
                        gating=report.gating,
                    ),
                )
        if self.repository is not None:
            self.repository.write_reports(REPORT_NAME, reports)
        logger.info("acceptance_run_completed", n_reports=len(reports))
        return reports


def failed_gates(reports: list[MomentReport]) -> list[str]:
    return [r.name for r in reports if r.gating and r.passed is False]
