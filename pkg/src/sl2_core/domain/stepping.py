"""
Passo de Itô em SL(2) e observáveis de F.

dF = F dB é integrado por Euler–Maruyama seguido de renormalização
exata do determinante: F' = (F + F·dB) / √det(F + F·dB).
"""

from typing import Optional

import numpy as np

from shared.exceptions.domain_exceptions import InvalidInputError, StepTooLargeError
from sl2_core.domain.entities import AlgebraVector, CovarianceSpec, Sl2Matrix
from sl2_core.domain.value_objects import IDENTITY, coefficients_to_matrices

INPUT_DET_TOLERANCE = 1e-9


def increments_from_normals(d_tau: float, cov: CovarianceSpec, normals: np.ndarray) -> np.ndarray:
    """
    Converte normais padrão (…, m), uma por átomo da medida, em
    coeficientes (…, 3) de dB = Σ √(wᵢ dτ) ξᵢ Eᵢ.
    """
    if d_tau <= 0:
        raise InvalidInputError(f"d_tau deve ser positivo (recebido {d_tau!r}).")
    weights, coeffs = cov.weights_and_coefficients()
    scale = np.sqrt(weights * d_tau)
    return (np.asarray(normals) * scale) @ coeffs


def sample_increment(
    d_tau: float, cov: CovarianceSpec, rng: np.random.Generator
) -> AlgebraVector:
    """
    Incremento gaussiano de B em τ ∈ [τ, τ + dτ].
    Para a covariância canônica, variâncias (dτ/4, dτ/4, dτ/2).
    """
    errors = cov.validate()
    if errors:
        raise InvalidInputError(" | ".join(errors))
    n_atoms = len(cov.as_measure())
    normals = rng.standard_normal(n_atoms)
    return AlgebraVector.from_array(increments_from_normals(d_tau, cov, normals))


def step_ito_batch(F: np.ndarray, dB: np.ndarray, tau: float = 0.0) -> np.ndarray:
    """
    Passo renormalizado para um lote: F (n, 2, 2), dB (n, 3).
    Rejeita o lote inteiro se algum det(F + F·dB) ≤ 0.
    """
    G = F + F @ coefficients_to_matrices(dB)
    det = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]
    worst = float(np.min(det)) if det.size else 1.0
    if not worst > 0.0:
        raise StepTooLargeError(tau=tau, determinant=worst)
    return G / np.sqrt(det)[..., None, None]


def step_ito(F: Sl2Matrix, dB: AlgebraVector, tau: float = 0.0) -> Sl2Matrix:
    """renormalize(F + F·mat(dB)); det do resultado = 1 a 1e-12."""
    if abs(F.determinant - 1.0) > INPUT_DET_TOLERANCE:
        raise InvalidInputError(
            f"step_ito exige det F = 1 (recebido {F.determinant!r})."
        )
    G = step_ito_batch(F.as_array()[None], dB.as_array()[None], tau=tau)
    return Sl2Matrix.from_array(G[0])


def frobenius_R(F) -> float:
    """R = ½|F|² ≥ 1 para det F = 1."""
    array = F.as_array() if isinstance(F, Sl2Matrix) else np.asarray(F, dtype=float)
    value = 0.5 * np.sum(array**2, axis=(-1, -2))
    return float(value) if np.ndim(value) == 0 else value


def gram_top_eigenvalue(F) -> float:
    """Maior autovalor de F*F; coincide com S(R) = exp arccosh R."""
    array = F.as_array() if isinstance(F, Sl2Matrix) else np.asarray(F, dtype=float)
    gram = np.swapaxes(array, -1, -2) @ array
    top = np.linalg.eigvalsh(gram)[..., -1]
    return float(top) if np.ndim(top) == 0 else top


def ito_stratonovich_correction(cov: CovarianceSpec) -> np.ndarray:
    """½∫μ(dE)E²; para a medida canônica, ½(2κ_sym − κ_skew)·id = 0."""
    return 0.5 * sum(w * (m @ m) for w, m in cov.as_measure())


def frobenius_ito_rate(cov: CovarianceSpec, atol: float = 1e-12) -> float:
    """
    Escalar c com ∫μ(dE)EE* = c·id, de modo que d E|F|² = c E|F|² dτ
    sob a forma de Itô. Para a canônica, 2κ_sym + κ_skew = 1.
    """
    gram = sum(w * (m @ m.T) for w, m in cov.as_measure())
    rate = 0.5 * float(np.trace(gram))
    if not np.allclose(gram, rate * IDENTITY, rtol=0.0, atol=atol):
        raise InvalidInputError("∫μ EE* não é múltiplo da identidade (medida não isotrópica).")
    return rate


def solve_canonical_parameters() -> tuple[float, float]:
    """
    Resolve 2κ_sym − κ_skew = 0 (Itô = Stratonovich) e
    2κ_sym + κ_skew = 1 (normalização E|F_τ|² = 2e^τ).
    """
    system = np.array([[2.0, -1.0], [2.0, 1.0]])
    rhs = np.array([0.0, 1.0])
    kappa_sym, kappa_skew = np.linalg.solve(system, rhs)
    return float(kappa_sym), float(kappa_skew)


def martingale_increment_mean(
    F: Sl2Matrix,
    d_tau: float,
    cov: CovarianceSpec,
    n: int,
    rng: np.random.Generator,
    renormalized: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Média e erro-padrão, entrada a entrada, de F_{τ+dτ} − F_τ.
    Sem renormalização o incremento é F·dB, de média nula.
    """
    n_atoms = len(cov.as_measure())
    dB = increments_from_normals(d_tau, cov, rng.standard_normal((n, n_atoms)))
    base = np.broadcast_to(F.as_array(), (n, 2, 2))
    if renormalized:
        increments = step_ito_batch(base, dB) - base
    else:
        increments = base @ coefficients_to_matrices(dB)
    mean = increments.mean(axis=0)
    se = increments.std(axis=0, ddof=1) / np.sqrt(n)
    return mean, se


def identity_batch(n: int, initial: Optional[np.ndarray] = None) -> np.ndarray:
    base = IDENTITY if initial is None else np.asarray(initial, dtype=float)
    return np.repeat(base[None], n, axis=0).copy()
