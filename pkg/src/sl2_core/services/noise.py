"""
Agenda de ruído indexada por célula da grade em τ.

A célula j cobre [j·dt, (j+1)·dt]. O incremento de B numa célula depende só
de (seed, stream_index, j), então fluxos F_{τ*,τ} com τ* diferentes, mas a
mesma semente, são dirigidos pelo mesmo B.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from shared.exceptions.domain_exceptions import InvalidInputError
from shared.rng.streams import DOMAIN_PATHS
from sl2_core.domain.entities import CovarianceSpec
from sl2_core.domain.stepping import increments_from_normals

# Tolerância para decidir se um τ cai exatamente numa fronteira de célula.
GRID_SNAP = 1e-9


@dataclass(frozen=True)
class NoiseSchedule:
    seed: int
    dt: float
    cov: CovarianceSpec
    stream_index: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise InvalidInputError(f"dt deve ser positivo (recebido {self.dt!r}).")
        if self.seed < 0 or self.stream_index < 0:
            raise InvalidInputError("seed e stream_index devem ser não negativos.")

    @property
    def n_atoms(self) -> int:
        return len(self.cov.as_measure())

    def cell_normals(self, cell: int, n_paths: int) -> np.ndarray:
        sequence = np.random.SeedSequence(
            entropy=int(self.seed),
            spawn_key=(DOMAIN_PATHS, int(self.stream_index), int(cell)),
        )
        rng = np.random.Generator(np.random.Philox(sequence))
        return rng.standard_normal((n_paths, self.n_atoms))

    def cell_of(self, tau: float) -> int:
        return int(math.floor(tau / self.dt + GRID_SNAP))

    def grid(self, tau_start: float, tau_end: float) -> np.ndarray:
        """
        Pontos de [tau_start, tau_end] alinhados às fronteiras de célula,
        com os extremos incluídos.
        """
        if tau_end <= tau_start:
            return np.array([float(tau_start)])
        first = self.cell_of(tau_start) + 1
        last = int(math.ceil(tau_end / self.dt - GRID_SNAP))
        inner = [j * self.dt for j in range(first, last)]
        inner = [t for t in inner if tau_start + GRID_SNAP * self.dt < t < tau_end - GRID_SNAP * self.dt]
        return np.array([float(tau_start), *inner, float(tau_end)])

    def increments(
        self, tau_a: float, tau_b: float, n_paths: int, cell: Optional[int] = None
    ) -> np.ndarray:
        """
        Coeficientes (n_paths, 3) de B_{τ_b} − B_{τ_a} dentro de uma única célula.
        Um trecho parcial usa o ruído da célula escalado por √(dτ/dt).
        """
        d_tau = tau_b - tau_a
        if cell is None:
            cell = self.cell_of(tau_a)
        normals = self.cell_normals(cell, n_paths)
        return increments_from_normals(d_tau, self.cov, normals)
