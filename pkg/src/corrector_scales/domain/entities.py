"""
Estado do corretor proxy, avançado casca a casca em L.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


@dataclass
class CorrectorState:
    """
    Estado na escala L.

    Nos pontos de sonda (P, 2) guarda φ, φ̃ (P, 2) e ∇φ̃ (P, 2, 2) com
    (∇φ̃)_ij = ∂ᵢφ̃ʲ. `F_L` (2×2) segue dF = F·∇dφ(0) sem renormalização.
    Os campos na grade (2, N, N) são opcionais.
    `driver_increments` guarda, por casca, os coeficientes (3,) de
    (√2 λ̃/ε)·∇dφ(0), isto é, os incrementos do motor B.
    """

    L: float
    F_L: np.ndarray
    probes: np.ndarray
    phi: np.ndarray
    phi_tilde: np.ndarray
    grad_phi_tilde: np.ndarray
    phi_grid: Optional[np.ndarray] = None
    phi_tilde_grid: Optional[np.ndarray] = None
    shells_done: int = 0
    empty_shells: int = 0
    driver_increments: list = field(default_factory=list)

    @classmethod
    def initial(
        cls,
        probes: Optional[np.ndarray] = None,
        grid_n: Optional[int] = None,
    ) -> "CorrectorState":
        """L = 1: φ = φ̃ = 0 e F = id. A origem é sempre a primeira sonda."""
        points = np.zeros((1, 2)) if probes is None else np.asarray(probes, dtype=float)
        if not np.array_equal(points[0], np.zeros(2)):
            points = np.vstack([np.zeros((1, 2)), points])
        n = len(points)
        grid = None if grid_n is None else np.zeros((2, grid_n, grid_n))
        return cls(
            L=1.0,
            F_L=np.eye(2),
            probes=points,
            phi=np.zeros((n, 2)),
            phi_tilde=np.zeros((n, 2)),
            grad_phi_tilde=np.zeros((n, 2, 2)),
            phi_grid=grid,
            phi_tilde_grid=None if grid is None else grid.copy(),
        )

    def copy(self) -> "CorrectorState":
        return replace(
            self,
            F_L=self.F_L.copy(),
            phi=self.phi.copy(),
            phi_tilde=self.phi_tilde.copy(),
            grad_phi_tilde=self.grad_phi_tilde.copy(),
            phi_grid=None if self.phi_grid is None else self.phi_grid.copy(),
            phi_tilde_grid=None if self.phi_tilde_grid is None else self.phi_tilde_grid.copy(),
            driver_increments=list(self.driver_increments),
        )

    @property
    def determinant_drift(self) -> float:
        return float(abs(np.linalg.det(self.F_L) - 1.0))

    def validate(self) -> list[str]:
        errors = []
        if self.L < 1:
            errors.append("L deve ser ≥ 1.")
        if self.F_L.shape != (2, 2):
            errors.append("F_L deve ser 2×2.")
        for grid in (self.phi_grid, self.phi_tilde_grid):
            if grid is not None and np.max(np.abs(grid.mean(axis=(-2, -1)))) > 1e-10:
                errors.append("Campo do corretor com média espacial não nula.")
        return errors
