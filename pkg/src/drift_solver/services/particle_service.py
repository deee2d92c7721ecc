"""
Partículas dX = b(X)dt + √2 dW no toro e a característica sem difusão.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import structlog
from scipy import ndimage

from core import settings
from drift_solver.domain.entities import CharacteristicPath, ParticlePath
from field_ensemble.domain.entities import SpectralField
from field_ensemble.services.field_service import FieldEnsembleService
from shared.exceptions.domain_exceptions import CflViolationError, InvalidInputError
from shared.parallel.executor import run_work_items
from shared.rng.streams import DOMAIN_PARTICLES, chunk_layout, seed_stream

logger = structlog.get_logger(__name__)

SQRT2 = math.sqrt(2.0)
OVERSAMPLING = 2


class BicubicVelocity:
    """
    Interpolação bicúbica periódica de b numa grade sobreamostrada.
    Os coeficientes do spline são pré-filtrados uma vez.
    """

    def __init__(self, field: SpectralField, oversampling: int = OVERSAMPLING):
        service = FieldEnsembleService(field.torus_side, field.grid_n)
        realized = service.realize_field(field, grid_n=field.grid_n * oversampling)
        self.spacing = realized.spacing
        self.torus_side = field.torus_side
        self.b_max = realized.max_speed
        self.coefficients = np.stack(
            [ndimage.spline_filter(c, order=3, mode="grid-wrap") for c in realized.values]
        )

    def __call__(self, positions: np.ndarray) -> np.ndarray:
        coords = (np.mod(positions, self.torus_side) / self.spacing).T
        return np.stack(
            [
                ndimage.map_coordinates(c, coords, order=3, mode="grid-wrap", prefilter=False)
                for c in self.coefficients
            ],
            axis=1,
        )


def check_particle_cfl(dt: float, b_max: float, spacing: float):
    if dt * b_max > spacing:
        logger.error("particle_cfl_violation", dt=dt, b_max=b_max, spacing=spacing)
        raise CflViolationError(dt=dt, b_max=b_max, spacing=spacing)


def euler_maruyama(
    velocity: BicubicVelocity,
    starts: np.ndarray,
    t_end: float,
    dt: float,
    rng: np.random.Generator,
    record_times: Sequence[float],
) -> tuple[np.ndarray, np.ndarray]:
    """
    X += b(X)dt + √2 dW, com o último passo encurtado para cair em t_end.
    As posições não são reduzidas ao toro: o deslocamento já sai desembrulhado.
    """
    wanted = np.asarray(sorted(record_times), dtype=float)
    X = np.array(starts, dtype=float)
    recorded = np.empty((wanted.size,) + X.shape)
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    t = 0.0
    next_record = 0
    while next_record < wanted.size and wanted[next_record] <= 1e-12:
        recorded[next_record] = X
        next_record += 1
    for step in range(n_steps):
        t_next = min(dt * (step + 1), t_end)
        h = t_next - t
        dW = rng.standard_normal(X.shape) * math.sqrt(h)
        X = X + velocity(X) * h + SQRT2 * dW
        t = t_next
        while next_record < wanted.size and wanted[next_record] <= t + 1e-12:
            recorded[next_record] = X
            next_record += 1
    return wanted, recorded


@dataclass(frozen=True)
class ParticleTask:
    field: SpectralField
    starts: np.ndarray
    t_end: float
    dt: float
    seed: int
    stream_index: int
    record_times: tuple[float, ...]


def _particle_chunk(task: ParticleTask) -> np.ndarray:
    velocity = BicubicVelocity(task.field)
    rng = seed_stream(task.seed, task.stream_index, domain=DOMAIN_PARTICLES)
    _, recorded = euler_maruyama(velocity, task.starts, task.t_end, task.dt, rng, task.record_times)
    return recorded


class ParticleService:
    """Use Cases das partículas."""

    def simulate_particle(
        self, field: SpectralField, t_end: float, dt: float, seed: int, start: Optional[np.ndarray] = None
    ) -> ParticlePath:
        """Uma partícula, trajetória completa na grade de passos."""
        if t_end <= 0 or dt <= 0:
            raise InvalidInputError("t_end e dt devem ser positivos.")
        velocity = BicubicVelocity(field)
        check_particle_cfl(dt, velocity.b_max, field.spacing)
        n_steps = int(math.ceil(t_end / dt - 1e-9))
        grid = np.minimum(dt * np.arange(n_steps + 1), t_end)
        origin = np.zeros((1, 2)) if start is None else np.asarray(start, dtype=float).reshape(1, 2)
        rng = seed_stream(seed, 0, domain=DOMAIN_PARTICLES)
        times, recorded = euler_maruyama(velocity, origin, t_end, dt, rng, grid)
        return ParticlePath(t_grid=times, positions=recorded, seed=seed, starts=origin)

    def simulate_particles(
        self,
        field: SpectralField,
        starts: np.ndarray,
        n_per_start: int,
        t_end: float,
        dt: float,
        seed: int,
        record_times: Optional[Sequence[float]] = None,
        workers: int = settings.WORKERS,
        chunk_size: int = settings.CHUNK_SIZE,
    ) -> ParticlePath:
        """
        n_per_start partículas por ponto inicial, em blocos de fluxo fixo.
        Registra só os tempos pedidos (0 e t_end por padrão).
        """
        if n_per_start < 1:
            raise InvalidInputError("n_per_start deve ser ≥ 1.")
        if t_end <= 0 or dt <= 0:
            raise InvalidInputError("t_end e dt devem ser positivos.")
        velocity = BicubicVelocity(field)
        check_particle_cfl(dt, velocity.b_max, field.spacing)

        points = np.atleast_2d(np.asarray(starts, dtype=float))
        origins = np.repeat(points, n_per_start, axis=0)
        times = tuple(sorted(record_times)) if record_times is not None else (0.0, float(t_end))
        if times[0] < 0 or times[-1] > t_end + 1e-12:
            raise InvalidInputError("record_times fora de [0, t_end].")
        tasks = [
            ParticleTask(
                field=field,
                starts=origins[first : first + size],
                t_end=t_end,
                dt=dt,
                seed=seed,
                stream_index=i,
                record_times=times,
            )
            for i, (first, size) in enumerate(chunk_layout(len(origins), chunk_size))
        ]
        parts = run_work_items(_particle_chunk, tasks, workers=workers)
        logger.info(
            "particles_simulated",
            n_particles=len(origins),
            t_end=t_end,
            dt=dt,
            chunks=len(tasks),
        )
        return ParticlePath(
            t_grid=np.array(times),
            positions=np.concatenate(parts, axis=1),
            seed=seed,
            starts=origins,
        )

    def characteristic_gradient(
        self, field: SpectralField, t_end: float, dt: float, start: Optional[np.ndarray] = None
    ) -> CharacteristicPath:
        """
        RK4 para dX = b(X)dt e dG = G·∇b(X)dt, G(0) = id, com b e ∇b por
        soma de modos. det G ≡ 1 no contínuo porque tr ∇b = 0.
        """
        if t_end <= 0 or dt <= 0:
            raise InvalidInputError("t_end e dt devem ser positivos.")

        def rhs(X, G):
            b, grad = field.evaluate(X[None], with_gradient=True)
            return b[0], G @ grad[0]

        X = np.zeros(2) if start is None else np.asarray(start, dtype=float)
        G = np.eye(2)
        n_steps = int(math.ceil(t_end / dt - 1e-9))
        times, positions, gradients = [0.0], [X], [G]
        t = 0.0
        for _ in range(n_steps):
            h = min(dt, t_end - t)
            k1x, k1g = rhs(X, G)
            k2x, k2g = rhs(X + h * k1x / 2, G + h * k1g / 2)
            k3x, k3g = rhs(X + h * k2x / 2, G + h * k2g / 2)
            k4x, k4g = rhs(X + h * k3x, G + h * k3g)
            X = X + h * (k1x + 2 * k2x + 2 * k3x + k4x) / 6
            G = G + h * (k1g + 2 * k2g + 2 * k3g + k4g) / 6
            t += h
            times.append(t)
            positions.append(X)
            gradients.append(G)
        gradients = np.array(gradients)
        defect = float(np.max(np.abs(np.linalg.det(gradients) - 1.0)))
        logger.debug("characteristic_integrated", t_end=t_end, dt=dt, max_det_defect=defect)
        return CharacteristicPath(
            t_grid=np.array(times),
            positions=np.array(positions),
            gradients=gradients,
            max_det_defect=defect,
        )
