"""
Funções de escala λ(s), τ(s) e a mudança de variáveis L ↔ τ.
"""

import math
from dataclasses import dataclass

from shared.exceptions.domain_exceptions import InvalidInputError


@dataclass(frozen=True)
class ScaleMap:
    """λ(s) = √(1 + (ε²/2)·ln(1+s)) e τ(s) = ln λ(s), para ε fixo."""

    epsilon: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidInputError("epsilon deve ser não negativo.")

    def lambda_of(self, s: float) -> float:
        if s < 0:
            raise InvalidInputError(f"lambda_of exige s ≥ 0 (recebido {s!r}).")
        return math.sqrt(1.0 + 0.5 * self.epsilon**2 * math.log1p(s))

    def tau_of(self, s: float) -> float:
        if s < 0:
            raise InvalidInputError(f"tau_of exige s ≥ 0 (recebido {s!r}).")
        # ln λ = ½ ln(1 + (ε²/2) ln(1+s)), estável para s pequeno
        return 0.5 * math.log1p(0.5 * self.epsilon**2 * math.log1p(s))

    def tau_of_L(self, L: float) -> float:
        """τ na escala L: e^τ = λ(L² − 1)."""
        if L < 1:
            raise InvalidInputError("L deve ser ≥ 1.")
        return self.tau_of(L * L - 1.0)

    def L_of_tau(self, tau: float) -> float:
        """Inversa de tau_of_L (exige ε > 0)."""
        if self.epsilon == 0:
            raise InvalidInputError("L_of_tau não é definida para ε = 0.")
        log_one_plus_s = 2.0 * math.expm1(2.0 * tau) / self.epsilon**2
        return math.sqrt(math.exp(log_one_plus_s))

    def tilde_lambda(self, L: float) -> float:
        """λ̃ = λ(L² − 1), o coeficiente homogeneizado na escala L."""
        return self.lambda_of(L * L - 1.0)

    def tilde_lambda_schedule(self, T: float) -> tuple[float, float]:
        """(L, λ̃) = (√(T+1), λ(T))."""
        if T < 0:
            raise InvalidInputError("T deve ser ≥ 0.")
        return math.sqrt(T + 1.0), self.lambda_of(T)

    def driver_scale(self, L: float) -> float:
        """Fator ε/(√2 λ̃) que leva dB a ∇dφ(0) na escala L."""
        return self.epsilon / (math.sqrt(2.0) * self.tilde_lambda(L))
