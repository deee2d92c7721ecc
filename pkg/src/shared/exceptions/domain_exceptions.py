"""
Exceções customizadas do domínio.
"""


class DomainException(Exception):
    """Exceção base para erros de domínio."""

    def __init__(self, message: str, code: str = "domain_error"):
        self.message = message
        self.code = code
        super().__init__(self.message)


class InvalidInputError(DomainException):
    """Violação de pré-condição de uma operação."""

    def __init__(self, message: str):
        super().__init__(message=message, code="invalid_input")


class ConfigurationError(InvalidInputError):
    """Configuração de execução inválida (arquivo, flags ou ambiente)."""

    def __init__(self, message: str):
        super().__init__(message=message)
        self.code = "configuration_error"


class UnresolvedBandError(InvalidInputError):
    """Escala pedida fora da banda de Fourier resolvida pelo campo."""

    def __init__(self, requested_L: float, max_L: float):
        super().__init__(
            message=(
                f"Escala L={requested_L:.6g} fora da banda resolvida "
                f"(L máximo: {max_L:.6g})."
            )
        )
        self.code = "unresolved_band"
        self.requested_L = requested_L
        self.max_L = max_L


class NumericalFailure(DomainException):
    """Falha numérica durante uma integração."""

    def __init__(self, message: str, code: str = "numerical_failure"):
        super().__init__(message=message, code=code)


class StepTooLargeError(NumericalFailure):
    """det(F + F·dB) ≤ 0: passo grosseiro demais para a renormalização."""

    def __init__(self, tau: float, determinant: float):
        super().__init__(
            message=(
                f"Passo rejeitado em τ={tau:.6g}: det(F + F·dB)={determinant:.3g} ≤ 0. "
                f"Reduza dt."
            ),
            code="step_too_large",
        )
        self.tau = tau
        self.determinant = determinant


class CflViolationError(NumericalFailure):
    """Condição CFL advectiva violada."""

    def __init__(self, dt: float, b_max: float, spacing: float):
        super().__init__(
            message=(
                f"CFL violada: dt·|b|max = {dt * b_max:.3g} > espaçamento {spacing:.3g}."
            ),
            code="cfl_violation",
        )
        self.dt = dt
        self.b_max = b_max
        self.spacing = spacing


class NonFiniteStateError(NumericalFailure):
    """Estado com NaN/Inf; carrega o último tempo estável."""

    def __init__(self, last_stable_time: float):
        super().__init__(
            message=f"Estado não finito detectado. Último tempo estável: t={last_stable_time:.6g}.",
            code="non_finite_state",
        )
        self.last_stable_time = last_stable_time


class QuadratureError(NumericalFailure):
    """Quadratura sem convergência; carrega a estimativa de erro obtida."""

    def __init__(self, what: str, error_bound: float):
        super().__init__(
            message=f"Quadratura de '{what}' não convergiu (erro estimado {error_bound:.3g}).",
            code="quadrature_error",
        )
        self.error_bound = error_bound


class EmptyShellError(NumericalFailure):
    """Casca de Fourier sem modos: a malha em ln L é fina demais para o campo."""

    def __init__(self, L_left: float, L_right: float):
        super().__init__(
            message=(
                f"Casca vazia entre L={L_left:.6g} e L={L_right:.6g}: refine lnL grid "
                f"ou aumente o toro."
            ),
            code="empty_shell",
        )
        self.L_left = L_left
        self.L_right = L_right


class GateFailure(DomainException):
    """Um ou mais critérios de aceitação reprovados."""

    def __init__(self, failed: list[str]):
        super().__init__(
            message=f"Critérios reprovados: {', '.join(failed)}.",
            code="gate_failure",
        )
        self.failed = failed
