"""
Funções fechadas dos processos escalares: GBM, seus momentos e a
transformação S = exp arccosh R.
"""

import numpy as np

from shared.exceptions.domain_exceptions import InvalidInputError

ARGUMENT_TOLERANCE = 1e-12


def gbm_exact(tau, w):
    """S_τ = e^{τ/2 + w}."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise InvalidInputError("gbm_exact exige τ ≥ 0.")
    value = np.exp(0.5 * tau + np.asarray(w, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def gbm_moment(p: float, tau: float) -> float:
    """E S_τ^p = e^{p(p+1)τ/2}."""
    if tau < 0:
        raise InvalidInputError("gbm_moment exige τ ≥ 0.")
    return float(np.exp(0.5 * p * (p + 1.0) * tau))


def _check_at_least_one(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0 - ARGUMENT_TOLERANCE) or np.any(~np.isfinite(x)):
        raise InvalidInputError(f"{name} exige argumento ≥ 1.")
    return np.maximum(x, 1.0)


def S_of_R(R):
    """S(R) = exp(arccosh R) = R + √(R² − 1)."""
    R = _check_at_least_one(R, "S_of_R")
    # R + √((R−1)(R+1)) evita o cancelamento de R² − 1 perto de 1
    value = R + np.sqrt((R - 1.0) * (R + 1.0))
    return float(value) if np.ndim(value) == 0 else value


def R_of_S(S):
    """R(S) = (S + 1/S)/2."""
    S = _check_at_least_one(S, "R_of_S")
    value = 0.5 * (S + 1.0 / S)
    return float(value) if np.ndim(value) == 0 else value
