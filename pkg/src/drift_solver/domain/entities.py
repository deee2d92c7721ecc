"""
Entidades do lado físico: trajetórias de partículas e estados da EDP do corretor.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class ParticlePath:
    """
    Posições desembrulhadas (len(t_grid), n_particles, 2).
    `starts` guarda o ponto inicial de cada partícula.
    """

    t_grid: np.ndarray
    positions: np.ndarray
    seed: int
    starts: Optional[np.ndarray] = None

    @property
    def n_particles(self) -> int:
        return int(self.positions.shape[1])

    @property
    def displacement(self) -> np.ndarray:
        """X_t − X_0 no último tempo registrado, (n_particles, 2)."""
        return self.positions[-1] - self.positions[0]

    def max_step(self) -> float:
        if len(self.t_grid) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(np.diff(self.positions, axis=0), axis=-1)))

    def validate(self, b_max: float = 0.0) -> list[str]:
        errors = []
        if np.any(np.diff(self.t_grid) <= 0):
            errors.append("t_grid deve ser estritamente crescente.")
        if not np.all(np.isfinite(self.positions)):
            errors.append("Posições não finitas.")
        if len(self.t_grid) > 1:
            dt = float(np.max(np.diff(self.t_grid)))
            # 8 desvios do incremento térmico √2·dW por componente
            bound = b_max * dt + 8.0 * math.sqrt(2.0 * dt) * math.sqrt(2.0)
            if self.max_step() > bound:
                errors.append(f"Salto de {self.max_step():.3g} acima do limite {bound:.3g}.")
        return errors


@dataclass
class PdeState:
    """φ no tempo t: na grade (2, N, N), opcional, e nas sondas (P, 2)."""

    t: float
    probe_values: np.ndarray
    phi: Optional[np.ndarray] = None

    @property
    def spatial_mean(self) -> Optional[np.ndarray]:
        if self.phi is None:
            return None
        return self.phi.mean(axis=(-2, -1))


@dataclass
class PdeSeries:
    """Sequência de PdeState nos tempos de saída, com as sondas usadas."""

    probes: np.ndarray
    states: list[PdeState] = field(default_factory=list)
    torus_side: float = 0.0
    epsilon: float = 0.0
    seed: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def probe_index(self, x: np.ndarray) -> int:
        x = np.asarray(x, dtype=float)
        hits = np.flatnonzero(np.all(np.abs(self.probes - x[None]) <= 1e-12, axis=1))
        if hits.size == 0:
            raise KeyError(f"Ponto {x.tolist()} não está entre as sondas.")
        return int(hits[0])

    def values_at(self, x: np.ndarray) -> np.ndarray:
        """φ(x, t) em todos os tempos de saída, (len(times), 2)."""
        i = self.probe_index(x)
        return np.array([s.probe_values[i] for s in self.states])

    def validate(self) -> list[str]:
        errors = []
        if not self.states:
            return ["Série vazia."]
        if self.states[0].t != 0.0:
            errors.append("A série deve começar em t = 0.")
        elif np.any(self.states[0].probe_values != 0.0):
            errors.append("φ(t=0) deve ser nulo.")
        if np.any(np.diff(self.times) <= 0):
            errors.append("Tempos de saída devem ser estritamente crescentes.")
        return errors


@dataclass
class CharacteristicPath:
    """Característica sem difusão: X (n, 2), G = ∇X (n, 2, 2) e max |det G − 1|."""

    t_grid: np.ndarray
    positions: np.ndarray
    gradients: np.ndarray
    max_det_defect: float


def output_times(T: float, n_log: int = 64, t_min_fraction: float = 0.01) -> np.ndarray:
    """0 mais n_log tempos log-espaçados em [T·t_min_fraction, T]."""
    if T <= 0:
        return np.array([0.0])
    times = np.geomspace(T * t_min_fraction, T, n_log)
    times[-1] = T
    return np.concatenate([[0.0], times])
