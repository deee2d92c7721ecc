"""
Handler de exceções da CLI.
Converte exceções de domínio em exit codes padronizados.
"""

import structlog

from shared.exceptions.domain_exceptions import (
    ConfigurationError,
    DomainException,
    GateFailure,
    InvalidInputError,
    NumericalFailure,
)

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_GATE_FAILURE = 1
EXIT_CONFIGURATION_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


def exit_code_for(exc: BaseException) -> int:
    """
    Mapeia uma exceção para o exit code da CLI,
    registrando o evento com o nível adequado.
    """
    if isinstance(exc, GateFailure):
        logger.warning("gate_failure", error=exc.message, failed=exc.failed)
        return EXIT_GATE_FAILURE

    if isinstance(exc, (ConfigurationError, InvalidInputError)):
        logger.warning("configuration_error", code=exc.code, error=exc.message)
        return EXIT_CONFIGURATION_ERROR

    if isinstance(exc, NumericalFailure):
        logger.error("numerical_failure", code=exc.code, error=exc.message)
        return EXIT_NUMERICAL_FAILURE

    if isinstance(exc, DomainException):
        logger.error("domain_error", code=exc.code, error=exc.message)
        return EXIT_NUMERICAL_FAILURE

    # Exceção inesperada
    logger.exception("unhandled_exception", error=str(exc))
    return EXIT_NUMERICAL_FAILURE
