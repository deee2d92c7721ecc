"""
Serviço da difusão canônica em SL(2) (camada de aplicação).
Integra caminhos de F (únicos ou em lote), fluxos de dois pontos
F_{τ*,τ} acoplados e os momentos de R por blocos paralelos.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import structlog

from core import settings
from shared.events.event_bus import DomainEvent, EventBus
from shared.exceptions.domain_exceptions import InvalidInputError, StepTooLargeError
from shared.parallel.executor import run_work_items
from shared.rng.streams import chunk_layout
from shared.stats.moments import RunningMoments, tree_merge
from sl2_core.domain.entities import (
    CovarianceSpec,
    MatrixEnsemble,
    MatrixPath,
    Sl2Matrix,
)
from sl2_core.domain.stepping import identity_batch, step_ito_batch
from sl2_core.services.noise import NoiseSchedule

logger = structlog.get_logger(__name__)


def integrate_batch(
    schedule: NoiseSchedule,
    tau_start: float,
    tau_end: float,
    n_paths: int,
    record_taus: Optional[Sequence[float]] = None,
    initial: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """
    Integra n_paths caminhos de F em [tau_start, tau_end] pela agenda.

    Retorna (taus registrados, estados (len, n_paths, 2, 2), defeito máximo
    de determinante). Sem `record_taus`, registra todos os pontos da grade.
    """
    grid = schedule.grid(tau_start, tau_end)
    if record_taus is None:
        wanted = grid
    else:
        wanted = np.asarray(sorted(record_taus), dtype=float)
        if wanted.size and (wanted[0] < tau_start or wanted[-1] > tau_end + 1e-12):
            raise InvalidInputError("record_taus fora de [tau_start, tau_end].")

    F = identity_batch(n_paths, initial)
    recorded = np.empty((wanted.size, n_paths, 2, 2))
    next_record = 0
    max_defect = 0.0

    def record_until(tau: float):
        nonlocal next_record
        while next_record < wanted.size and wanted[next_record] <= tau + 1e-12:
            recorded[next_record] = F
            next_record += 1

    record_until(grid[0])
    for tau_a, tau_b in zip(grid[:-1], grid[1:]):
        dB = schedule.increments(tau_a, tau_b, n_paths)
        try:
            F = step_ito_batch(F, dB, tau=tau_a)
        except StepTooLargeError:
            logger.error("sl2_step_rejected", tau=tau_a, dt=schedule.dt)
            raise
        det = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
        max_defect = max(max_defect, float(np.max(np.abs(det - 1.0))))
        record_until(tau_b)

    return wanted, recorded, max_defect


@dataclass(frozen=True)
class ChunkTask:
    """Item de trabalho picklável: um bloco de caminhos com fluxo próprio."""

    seed: int
    stream_index: int
    dt: float
    cov: CovarianceSpec
    tau_start: float
    tau_end: float
    n_paths: int
    powers: tuple[int, ...] = (1, 2)


def _chunk_R_moments(task: ChunkTask) -> list[RunningMoments]:
    schedule = NoiseSchedule(task.seed, task.dt, task.cov, task.stream_index)
    _, states, _ = integrate_batch(
        schedule, task.tau_start, task.tau_end, task.n_paths, record_taus=[task.tau_end]
    )
    R = 0.5 * np.sum(states[-1] ** 2, axis=(-1, -2))
    parts = []
    for p in task.powers:
        moments = RunningMoments()
        moments.update_batch(R**p)
        parts.append(moments)
    return parts


class Sl2DiffusionService:
    """
    Use Cases da difusão F.
    A covariância e o passo vêm do construtor; o ruído vem da semente.
    """

    def __init__(
        self,
        cov: Optional[CovarianceSpec] = None,
        dt: float = settings.DEFAULT_DT,
        event_bus: Optional[EventBus] = None,
    ):
        self.cov = cov or CovarianceSpec.canonical()
        errors = self.cov.validate()
        if errors:
            raise InvalidInputError(" | ".join(errors))
        if dt <= 0:
            raise InvalidInputError(f"dt deve ser positivo (recebido {dt!r}).")
        self.dt = dt
        self.event_bus = event_bus or EventBus()

    def schedule(self, seed: int, stream_index: int = 0) -> NoiseSchedule:
        return NoiseSchedule(seed=seed, dt=self.dt, cov=self.cov, stream_index=stream_index)

    def simulate_F(
        self,
        tau_start: float,
        tau_end: float,
        seed: int,
        initial: Optional[Sl2Matrix] = None,
    ) -> MatrixPath:
        """
        Caminho a partir de `initial` (id por padrão).
        Se tau_end ≤ tau_start, o caminho é só o estado inicial.
        """
        if tau_start < 0:
            raise InvalidInputError("tau_start deve ser ≥ 0.")
        init = None if initial is None else initial.as_array()
        taus, states, _ = integrate_batch(
            self.schedule(seed), tau_start, tau_end, 1, initial=init
        )
        return MatrixPath(tau_grid=taus, states=states[:, 0], seed=seed)

    def simulate_F_batch(
        self,
        tau_end: float,
        n_paths: int,
        record_taus: Sequence[float],
        seed: int,
        stream_index: int = 0,
        tau_start: float = 0.0,
    ) -> MatrixEnsemble:
        if n_paths < 1:
            raise InvalidInputError("n_paths deve ser ≥ 1.")
        taus, states, defect = integrate_batch(
            self.schedule(seed, stream_index), tau_start, tau_end, n_paths, record_taus
        )
        logger.debug(
            "paths_simulated",
            n_paths=n_paths,
            tau_end=tau_end,
            dt=self.dt,
            stream_index=stream_index,
            max_det_defect=defect,
        )
        return MatrixEnsemble(
            record_taus=taus,
            states=states,
            stream_index=stream_index,
            max_det_defect=defect,
        )

    def two_point_F(
        self, tau_star: float, tau: float, seed: int, stream_index: int = 0
    ) -> Sl2Matrix:
        """F_{τ*,τ}; identidade para τ ≤ τ*."""
        batch = self.two_point_F_batch(tau_star, tau, 1, seed, stream_index)
        return Sl2Matrix.from_array(batch[0])

    def two_point_F_batch(
        self,
        tau_star: float,
        tau: float,
        n_paths: int,
        seed: int,
        stream_index: int = 0,
    ) -> np.ndarray:
        if tau_star < 0 or tau < 0:
            raise InvalidInputError("tau_star e tau devem ser ≥ 0.")
        if tau <= tau_star:
            return identity_batch(n_paths)
        _, states, _ = integrate_batch(
            self.schedule(seed, stream_index), tau_star, tau, n_paths, record_taus=[tau]
        )
        return states[-1]

    def frobenius_moments(
        self,
        tau_end: float,
        n_paths: int,
        seed: int,
        powers: tuple[int, ...] = (1, 2),
        tau_start: float = 0.0,
        workers: int = settings.WORKERS,
        chunk_size: int = settings.CHUNK_SIZE,
        first_stream: int = 0,
    ) -> dict[int, RunningMoments]:
        """
        Momentos E R^p de F_{τ_start, τ_end} sobre n_paths caminhos.
        Cada bloco de `chunk_size` caminhos tem fluxo fixo, portanto o
        resultado não depende de `workers`.
        """
        tasks = [
            ChunkTask(
                seed=seed,
                stream_index=first_stream + i,
                dt=self.dt,
                cov=self.cov,
                tau_start=tau_start,
                tau_end=tau_end,
                n_paths=size,
                powers=tuple(powers),
            )
            for i, (_, size) in enumerate(chunk_layout(n_paths, chunk_size))
        ]
        results = run_work_items(_chunk_R_moments, tasks, workers=workers)
        merged = {
            p: tree_merge([parts[k] for parts in results]) for k, p in enumerate(powers)
        }
        self.event_bus.publish(
            "run_completed",
            DomainEvent(
                what="frobenius_moments", n_paths=n_paths, tau_end=tau_end, dt=self.dt
            ),
        )
        logger.info(
            "frobenius_moments_computed",
            n_paths=n_paths,
            tau_end=tau_end,
            chunks=len(tasks),
            workers=workers,
        )
        return merged
