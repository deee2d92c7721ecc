"""
Entidades dos processos escalares (R, S, S̃, X).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class PathKind(str, Enum):
    """Tipo do processo escalar e a sua restrição de valores."""

    R = "R"
    S = "S"
    S_TILDE = "S_tilde"
    X = "X"

    def lower_bound_ok(self, values: np.ndarray) -> bool:
        if self in (PathKind.R, PathKind.S_TILDE):
            return bool(np.all(values >= 1.0))
        if self is PathKind.S:
            return bool(np.all(values > 0.0))
        return bool(np.all(values >= 0.0))


@dataclass
class ScalarPath:
    """
    Caminho(s) de um processo escalar dirigido por w.

    `values` tem forma (len(tau_grid),) para um caminho ou
    (n_paths, len(tau_grid)) para um lote; `driver_increments`
    tem uma coluna a menos.
    """

    tau_grid: np.ndarray
    values: np.ndarray
    driver_increments: np.ndarray
    seed: int = 0
    kind: PathKind = PathKind.R

    @property
    def n_paths(self) -> int:
        return 1 if self.values.ndim == 1 else int(self.values.shape[0])

    @property
    def terminal(self) -> np.ndarray:
        return self.values[..., -1]

    @property
    def driver(self) -> np.ndarray:
        """w nos pontos da grade (w₀ = 0)."""
        cumulative = np.cumsum(self.driver_increments, axis=-1)
        zeros = np.zeros(cumulative.shape[:-1] + (1,))
        return np.concatenate([zeros, cumulative], axis=-1)

    def validate(self) -> list[str]:
        errors = []
        if self.values.shape[-1] != len(self.tau_grid):
            errors.append("values e tau_grid com tamanhos diferentes.")
        if self.driver_increments.shape[-1] != len(self.tau_grid) - 1:
            errors.append("driver_increments deve ter len(tau_grid) − 1 entradas.")
        if len(self.tau_grid) > 1 and np.any(np.diff(self.tau_grid) <= 0):
            errors.append("tau_grid deve ser estritamente crescente.")
        if not self.kind.lower_bound_ok(self.values):
            errors.append(f"Valores fora do domínio do processo {self.kind.value}.")
        return errors


@dataclass
class ComparisonTriple:
    """S̃, S e X dirigidos pelo mesmo incremento de w."""

    s_tilde: ScalarPath
    s: ScalarPath
    x: ScalarPath

    def validate(self) -> list[str]:
        errors = []
        for path in (self.s_tilde, self.s, self.x):
            errors.extend(path.validate())
        if not (
            np.array_equal(self.s_tilde.tau_grid, self.s.tau_grid)
            and np.array_equal(self.s.tau_grid, self.x.tau_grid)
        ):
            errors.append("Os três caminhos devem compartilhar a grade.")
        if not (
            np.array_equal(self.s_tilde.driver_increments, self.s.driver_increments)
            and np.array_equal(self.s.driver_increments, self.x.driver_increments)
        ):
            errors.append("Os três caminhos devem compartilhar o incremento de w.")
        return errors

    def comparison_violations(self, tolerance_factor: float = 10.0) -> dict[str, float]:
        """
        Maior violação de ln S̃ ≥ X, S̃ ≥ S e 2R(S̃) ≥ S, já descontada a
        tolerância tolerance_factor·dt. Valores ≤ 0 significam que a
        comparação vale em todos os pontos.
        """
        dt = float(np.max(np.diff(self.s.tau_grid))) if len(self.s.tau_grid) > 1 else 0.0
        slack = tolerance_factor * dt
        s_tilde, s, x = self.s_tilde.values, self.s.values, self.x.values
        two_r = s_tilde + 1.0 / s_tilde
        return {
            "log_s_tilde_vs_x": float(np.max(x - np.log(s_tilde) - slack)),
            "s_tilde_vs_s": float(np.max(s - s_tilde - slack * s)),
            "two_r_vs_s": float(np.max(s - two_r - slack * s)),
        }
