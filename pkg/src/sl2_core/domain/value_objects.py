"""
Value Objects da álgebra sl(2).
Base E₁, E₂, E₃ e identidades algébricas verificáveis.
"""

import numpy as np

from shared.exceptions.domain_exceptions import InvalidInputError

E1 = np.array([[1.0, 0.0], [0.0, -1.0]])
E2 = np.array([[0.0, 1.0], [1.0, 0.0]])
E3 = np.array([[0.0, -1.0], [1.0, 0.0]])
IDENTITY = np.eye(2)

# E₁, E₂ são reflexões (simétricas, E² = id); E₃ é a rotação por π/2 (E₃² = −id).
BASIS = np.stack([E1, E2, E3])


def algebra_basis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Retorna cópias de (E₁, E₂, E₃)."""
    return E1.copy(), E2.copy(), E3.copy()


def coefficients_to_matrices(coeffs: np.ndarray) -> np.ndarray:
    """(…, 3) coeficientes → (…, 2, 2) matrizes a₁E₁ + a₂E₂ + a₃E₃."""
    coeffs = np.asarray(coeffs, dtype=float)
    a1, a2, a3 = coeffs[..., 0], coeffs[..., 1], coeffs[..., 2]
    out = np.empty(coeffs.shape[:-1] + (2, 2))
    out[..., 0, 0] = a1
    out[..., 1, 1] = -a1
    out[..., 0, 1] = a2 - a3
    out[..., 1, 0] = a2 + a3
    return out


def matrices_to_coefficients(matrices: np.ndarray) -> np.ndarray:
    """
    (…, 2, 2) → (…, 3): projeção da parte sem traço na base (E₁, E₂, E₃).
    Para matrizes sem traço a reconstrução é exata.
    """
    m = np.asarray(matrices, dtype=float)
    out = np.empty(m.shape[:-2] + (3,))
    out[..., 0] = 0.5 * (m[..., 0, 0] - m[..., 1, 1])
    out[..., 1] = 0.5 * (m[..., 0, 1] + m[..., 1, 0])
    out[..., 2] = 0.5 * (m[..., 1, 0] - m[..., 0, 1])
    return out


def check_trace_identity(G: np.ndarray) -> float:
    """
    Resíduo de (tr GE₁)² + (tr GE₂)² − ((tr G)² − 4 det G) para G simétrica.
    Aceita lotes (…, 2, 2) e devolve o resíduo de cada matriz.
    """
    G = np.asarray(G, dtype=float)
    if not np.allclose(G, np.swapaxes(G, -1, -2), rtol=0.0, atol=1e-14):
        raise InvalidInputError("check_trace_identity exige G simétrica.")
    g11, g12, g22 = G[..., 0, 0], G[..., 0, 1], G[..., 1, 1]
    tr_e1 = g11 - g22
    tr_e2 = 2.0 * g12
    trace = g11 + g22
    det = g11 * g22 - g12 * g12
    residual = tr_e1**2 + tr_e2**2 - (trace**2 - 4.0 * det)
    return residual if np.ndim(residual) else float(residual)
