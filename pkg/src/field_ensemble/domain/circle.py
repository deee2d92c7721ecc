"""
Média angular que dá a covariância de B por unidade de ln L,
e os dois postulados que a medida μ deve satisfazer.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from sl2_core.domain.entities import CovarianceSpec
from sl2_core.domain.value_objects import IDENTITY, coefficients_to_matrices

DEFAULT_CIRCLE_POINTS = 64


@dataclass(frozen=True)
class CircleTensor:
    """
    Resultado da média angular.

    `coefficients` (4×4) representa ⨍ Σᵢ(k⊗eᵢ)⊗(k⊗eᵢ) − (k⊗k)⊗(k⊗k)
    na base (id, E₁, E₂, E₃) ⊗ (id, E₁, E₂, E₃); `kk_average` é ⨍ k⊗k.
    """

    coefficients: np.ndarray
    kk_average: np.ndarray
    angles: np.ndarray

    @property
    def trace_component(self) -> float:
        return float(self.coefficients[0, 0])

    def per_unit_lnL_covariance(self) -> np.ndarray:
        """Covariância 3×3 dos coeficientes de B por unidade de ln L."""
        return 2.0 * self.coefficients[1:, 1:]

    def measure(self) -> list[tuple[float, np.ndarray]]:
        """Átomos E_θ = k̂ k̂⊥ᵀ com peso 2/M, um por ponto da quadratura."""
        weight = 2.0 / len(self.angles)
        return [(weight, _atom(theta)) for theta in self.angles]


def _atom(theta: float) -> np.ndarray:
    khat = np.array([np.cos(theta), np.sin(theta)])
    kperp = np.array([-khat[1], khat[0]])
    return np.outer(khat, kperp)


def circle_tensor(n_points: int = DEFAULT_CIRCLE_POINTS) -> CircleTensor:
    """
    Trapézio periódico com n_points ângulos uniformes. O integrando é um
    polinômio trigonométrico de grau 4, então n_points ≥ 5 já é exato.
    """
    angles = 2.0 * np.pi * np.arange(n_points) / n_points
    khat = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    eye = np.eye(2)

    tensor = np.zeros((2, 2, 2, 2))
    for k in khat:
        for e in eye:
            a = np.outer(k, e)
            tensor += np.einsum("ij,lm->ijlm", a, a)
        kk = np.outer(k, k)
        tensor -= np.einsum("ij,lm->ijlm", kk, kk)
    tensor /= n_points

    # Projeta cada fator na base (id, E₁, E₂, E₃) pelos funcionais duais.
    dual = _dual_basis()
    coefficients = np.einsum("ijlm,aij,blm->ab", tensor, dual, dual)

    kk_average = np.einsum("ni,nj->ij", khat, khat) / n_points
    return CircleTensor(coefficients=coefficients, kk_average=kk_average, angles=angles)


def _dual_basis() -> np.ndarray:
    """Funcionais coordenados da base (id, E₁, E₂, E₃) como matrizes (4, 2, 2)."""
    out = np.zeros((4, 2, 2))
    out[0] = 0.5 * IDENTITY
    out[1] = 0.5 * np.array([[1.0, 0.0], [0.0, -1.0]])
    out[2] = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]])
    out[3] = 0.5 * np.array([[0.0, -1.0], [1.0, 0.0]])
    return out


MeasureLike = Union[CovarianceSpec, list[tuple[float, np.ndarray]]]


def _as_measure(cov: MeasureLike) -> list[tuple[float, np.ndarray]]:
    if isinstance(cov, CovarianceSpec):
        return cov.as_measure()
    return [(float(w), np.asarray(m, dtype=float)) for w, m in cov]


def check_postulates(cov: MeasureLike) -> tuple[float, float]:
    """
    ‖∫μ E²‖ (Itô = Stratonovich) e ‖∫μ EE* − id‖ (normalização),
    em norma de Frobenius.
    """
    measure = _as_measure(cov)
    square = sum(w * (m @ m) for w, m in measure)
    gram = sum(w * (m @ m.T) for w, m in measure)
    return float(np.linalg.norm(square)), float(np.linalg.norm(gram - IDENTITY))


def measure_from_covariance(C: np.ndarray, atol: float = 1e-14) -> list[tuple[float, np.ndarray]]:
    """
    Decomposição espectral de uma covariância 3×3 dos coeficientes:
    C = Σ λᵢ vᵢvᵢᵀ vira a medida Σ λᵢ δ_{mat(vᵢ)}.
    """
    C = np.asarray(C, dtype=float)
    eigenvalues, vectors = np.linalg.eigh(0.5 * (C + C.T))
    return [
        (float(lam), coefficients_to_matrices(vectors[:, i]))
        for i, lam in enumerate(eigenvalues)
        if lam > atol
    ]
