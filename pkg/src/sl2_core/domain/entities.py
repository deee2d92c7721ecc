"""
Entidades de domínio da difusão F em SL(2).
Classes Python puras, sem I/O.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sl2_core.domain.value_objects import (
    E1,
    E2,
    E3,
    coefficients_to_matrices,
    matrices_to_coefficients,
)

DET_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Sl2Matrix:
    """
    Matriz real 2×2 de determinante 1 (estado F da difusão).
    As entradas ficam em ordem row-major.
    """

    entries: tuple[float, float, float, float]

    @classmethod
    def identity(cls) -> "Sl2Matrix":
        return cls((1.0, 0.0, 0.0, 1.0))

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Sl2Matrix":
        a = np.asarray(array, dtype=float).reshape(2, 2)
        return cls((float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1])))

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(2, 2)

    @property
    def determinant(self) -> float:
        a, b, c, d = self.entries
        return a * d - b * c

    @property
    def frobenius_sq(self) -> float:
        return float(sum(x * x for x in self.entries))

    @property
    def transpose(self) -> "Sl2Matrix":
        a, b, c, d = self.entries
        return Sl2Matrix((a, c, b, d))

    def validate(self, tolerance: float = DET_TOLERANCE) -> list[str]:
        errors = []
        if not all(np.isfinite(self.entries)):
            errors.append("Entradas não finitas.")
        elif abs(self.determinant - 1.0) > tolerance:
            errors.append(f"Determinante {self.determinant!r} difere de 1.")
        return errors


@dataclass(frozen=True)
class AlgebraVector:
    """Coeficientes (a₁, a₂, a₃) de um elemento sem traço na base E₁, E₂, E₃."""

    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "AlgebraVector":
        a1, a2, a3 = matrices_to_coefficients(np.asarray(matrix, dtype=float))
        return cls(float(a1), float(a2), float(a3))

    @classmethod
    def from_array(cls, coeffs: np.ndarray) -> "AlgebraVector":
        a1, a2, a3 = np.asarray(coeffs, dtype=float).reshape(3)
        return cls(float(a1), float(a2), float(a3))

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    def to_matrix(self) -> np.ndarray:
        return coefficients_to_matrices(self.as_array())


@dataclass
class CovarianceSpec:
    """
    Covariância de B: C = κ_sym(E₁⊗E₁ + E₂⊗E₂) + κ_skew E₃⊗E₃,
    ou, em geral, C = Σ wᵢ Eᵢ⊗Eᵢ para uma medida discreta μ.
    """

    kappa_sym: float = 0.25
    kappa_skew: float = 0.5
    measure: Optional[list[tuple[float, np.ndarray]]] = None

    @classmethod
    def canonical(cls) -> "CovarianceSpec":
        """2κ_skew = 4κ_sym = 1."""
        return cls(kappa_sym=0.25, kappa_skew=0.5)

    @classmethod
    def from_measure(cls, measure: list[tuple[float, np.ndarray]]) -> "CovarianceSpec":
        matrices = [np.asarray(m, dtype=float) for _, m in measure]
        weights = [float(w) for w, _ in measure]
        spec = cls(kappa_sym=0.0, kappa_skew=0.0, measure=list(zip(weights, matrices)))
        cov = spec.coefficient_covariance()
        spec.kappa_sym = float(0.5 * (cov[0, 0] + cov[1, 1]))
        spec.kappa_skew = float(cov[2, 2])
        return spec

    def as_measure(self) -> list[tuple[float, np.ndarray]]:
        if self.measure is not None:
            return [(float(w), np.asarray(m, dtype=float)) for w, m in self.measure]
        return [(self.kappa_sym, E1), (self.kappa_sym, E2), (self.kappa_skew, E3)]

    def weights_and_coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Pesos (m,) e coeficientes (m, 3) dos átomos da medida."""
        measure = self.as_measure()
        weights = np.array([w for w, _ in measure], dtype=float)
        coeffs = matrices_to_coefficients(np.stack([m for _, m in measure]))
        return weights, coeffs

    def coefficient_covariance(self) -> np.ndarray:
        """Covariância 3×3 dos coeficientes de B por unidade de τ."""
        weights, coeffs = self.weights_and_coefficients()
        return np.einsum("m,mi,mj->ij", weights, coeffs, coeffs)

    def validate(self) -> list[str]:
        errors = []
        if self.kappa_sym < 0 or self.kappa_skew < 0:
            errors.append("κ_sym e κ_skew devem ser não negativos.")
        if self.measure is not None:
            for weight, matrix in self.measure:
                matrix = np.asarray(matrix, dtype=float)
                if weight < 0:
                    errors.append(f"Peso negativo na medida: {weight!r}.")
                if matrix.shape != (2, 2):
                    errors.append("Átomos da medida devem ser matrizes 2×2.")
                elif abs(np.trace(matrix)) > 1e-12:
                    errors.append("Átomos da medida devem ter traço nulo.")
        return errors


@dataclass
class MatrixPath:
    """
    Caminho de F numa grade crescente de τ.
    `states` tem forma (len(tau_grid), 2, 2).
    """

    tau_grid: np.ndarray
    states: np.ndarray
    seed: int = 0

    def state(self, index: int) -> Sl2Matrix:
        return Sl2Matrix.from_array(self.states[index])

    @property
    def terminal(self) -> Sl2Matrix:
        return self.state(-1)

    def determinant_defect(self) -> float:
        s = self.states
        det = s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
        return float(np.max(np.abs(det - 1.0)))

    def validate(self) -> list[str]:
        errors = []
        if len(self.tau_grid) != len(self.states):
            errors.append("tau_grid e states com tamanhos diferentes.")
        if len(self.tau_grid) > 1 and np.any(np.diff(self.tau_grid) <= 0):
            errors.append("tau_grid deve ser estritamente crescente.")
        if self.determinant_defect() > DET_TOLERANCE:
            errors.append("Estado com determinante fora da tolerância.")
        return errors


@dataclass
class MatrixEnsemble:
    """
    Estados de n_paths caminhos registrados apenas em `record_taus`.
    `states` tem forma (len(record_taus), n_paths, 2, 2).
    """

    record_taus: np.ndarray
    states: np.ndarray
    stream_index: int = 0
    max_det_defect: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return int(self.states.shape[1])

    def frobenius_R(self) -> np.ndarray:
        """R = ½|F|² por tempo registrado, forma (len(record_taus), n_paths)."""
        return 0.5 * np.sum(self.states**2, axis=(-1, -2))
