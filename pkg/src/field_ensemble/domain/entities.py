"""
Entidades do ensemble de campos de deriva.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from field_ensemble.domain.spectral import MAX_EXACT_INDEX, mode_spacing
from sl2_core.domain.value_objects import coefficients_to_matrices

# folga em ln(1/|k|), a mesma tolerância relativa do corte em half_plane_modes
BAND_TOLERANCE = 1e-12


@dataclass
class SpectralField:
    """
    Campo de deriva periódico de divergência nula, guardado pelos
    coeficientes de Fourier dos modos retidos (semiplano).

    `noise` guarda o gaussiano complexo padrão z_k de cada modo e
    `coeffs` as duas componentes de b̂_k = ε·√(Δk²/2π)·k̂⊥·z_k.
    """

    torus_side: float
    grid_n: int
    epsilon: float
    modes: np.ndarray
    noise: np.ndarray
    coeffs: np.ndarray
    inner_cutoff: float = 0.0
    outer_cutoff: float = 1.0
    seed: int = 0
    stream_index: int = 0

    @property
    def dk(self) -> float:
        return mode_spacing(self.torus_side)

    @property
    def spacing(self) -> float:
        return self.torus_side / self.grid_n

    @property
    def n_modes(self) -> int:
        return int(self.modes.shape[0])

    @property
    def wavevectors(self) -> np.ndarray:
        return self.dk * self.modes.astype(float)

    @property
    def k_norm(self) -> np.ndarray:
        return self.dk * np.hypot(self.modes[:, 0], self.modes[:, 1])

    @property
    def cell_weight(self) -> float:
        """Peso espectral de um modo: área da célula Δk² vezes (2π)⁻¹."""
        return self.dk**2 / (2.0 * math.pi)

    @property
    def log_inverse_k(self) -> np.ndarray:
        """ln(1/|k|) ≥ 0 de cada modo (|k| ≤ 1)."""
        return np.maximum(-np.log(self.k_norm), 0.0)

    @property
    def max_resolved_L(self) -> float:
        """Maior L com banda resolvida: 1/L ≥ max(corte interno, Δk)."""
        floor_k = max(self.inner_cutoff, self.dk)
        return 1.0 / floor_k

    def divergence_residual(self) -> float:
        """max_k |k·b̂(k)|, calculado na rede inteira e reescalado por Δk."""
        if self.n_modes == 0:
            return 0.0
        mx = self.modes[:, 0].astype(float)
        my = self.modes[:, 1].astype(float)
        div = mx * self.coeffs[:, 0] + my * self.coeffs[:, 1]
        return float(self.dk * np.max(np.abs(div)))

    def mode_covariance(self) -> np.ndarray:
        """E b̂_k b̂_k* por modo: ε²·peso·(I − k̂⊗k̂), forma (m, 2, 2)."""
        khat = self.wavevectors / self.k_norm[:, None]
        proj = np.eye(2)[None] - khat[:, :, None] * khat[:, None, :]
        return self.epsilon**2 * self.cell_weight * proj

    def evaluate(self, points: np.ndarray, with_gradient: bool = False):
        """
        b em pontos arbitrários (P, 2) por soma direta de modos.
        Com `with_gradient`, devolve também ∂ᵢbʲ em forma (P, 2, 2).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        k = self.wavevectors
        weighted = np.exp(1j * pts @ k.T)[:, :, None] * self.coeffs[None]
        values = 2.0 * np.real(weighted.sum(axis=1))
        if not with_gradient:
            return values
        gradient = 2.0 * np.real(1j * np.einsum("mi,pmj->pij", k, weighted))
        return values, gradient

    def band(self, L_left: float, L_right: float) -> np.ndarray:
        """
        Máscara da casca 1/L_right ≤ |k| < 1/L_left. A primeira casca
        (L_left = 1) também leva o anel |k| = 1, de modo que a união das
        cascas de 1 até L é a banda [1/L, 1] de `sample_field`.
        """
        log_k = self.log_inverse_k
        upper = log_k <= math.log(L_right) + BAND_TOLERANCE
        if L_left <= 1.0:
            return upper
        return upper & (log_k > math.log(L_left) + BAND_TOLERANCE)

    def validate(self) -> list[str]:
        errors = []
        if self.torus_side <= 0 or self.grid_n <= 0:
            errors.append("torus_side e grid_n devem ser positivos.")
        if self.epsilon < 0:
            errors.append("epsilon deve ser não negativo.")
        if self.n_modes:
            if np.max(np.abs(self.modes)) >= self.grid_n // 2:
                errors.append("Modo retido além da frequência de Nyquist da grade.")
            if np.max(np.abs(self.modes)) >= MAX_EXACT_INDEX:
                errors.append("Índice de modo grande demais para divergência exata.")
            if np.any(self.k_norm > self.outer_cutoff * (1 + 1e-12)):
                errors.append("Modo acima do corte externo |k| ≤ 1.")
            if self.inner_cutoff > 0 and np.any(self.k_norm < self.inner_cutoff * (1 - 1e-12)):
                errors.append("Modo abaixo do corte interno.")
            if self.divergence_residual() != 0.0:
                errors.append("Campo com divergência espectral não nula.")
        return errors


@dataclass
class RealizedField:
    """Campo b (2, N, N) nos pontos da grade; eixo 1 ↔ x, eixo 2 ↔ y."""

    values: np.ndarray
    torus_side: float
    gradient: Optional[np.ndarray] = None

    @property
    def grid_n(self) -> int:
        return int(self.values.shape[-1])

    @property
    def spacing(self) -> float:
        return self.torus_side / self.grid_n

    @property
    def max_speed(self) -> float:
        return float(np.max(np.hypot(self.values[0], self.values[1])))


@dataclass
class CoupledBPath:
    """
    Caminho lnL ↦ B_L em coeficientes (len(lnL_grid), 3).
    `values[0]` é nulo quando lnL_grid começa em 0.
    """

    lnL_grid: np.ndarray
    values: np.ndarray
    source_seed: int = 0
    mode_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    def matrices(self) -> np.ndarray:
        return coefficients_to_matrices(self.values)

    def validate(self) -> list[str]:
        errors = []
        if len(self.lnL_grid) and self.lnL_grid[0] != 0.0:
            errors.append("lnL_grid deve começar em 0.")
        if len(self.lnL_grid) > 1 and np.any(np.diff(self.lnL_grid) <= 0):
            errors.append("lnL_grid deve ser estritamente crescente.")
        if len(self.lnL_grid) and np.any(self.values[0] != 0.0):
            errors.append("B em L = 1 deve ser nulo.")
        return errors
