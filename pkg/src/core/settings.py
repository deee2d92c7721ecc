"""
Configurações globais do laboratório.
Valores vêm de variáveis de ambiente (ou .env) via python-decouple.
"""

import logging
import logging.config
from pathlib import Path

import structlog
from decouple import config

# Build paths
BASE_DIR = Path(__file__).resolve().parent.parent

DEBUG = config("SL2LAB_DEBUG", default=False, cast=bool)
LOG_LEVEL = config("SL2LAB_LOG_LEVEL", default="INFO")

# Execução
MASTER_SEED = config("SL2LAB_MASTER_SEED", default=20240601, cast=int)
WORKERS = config("SL2LAB_WORKERS", default=1, cast=int)
# Tamanho fixo do bloco de caminhos por fluxo aleatório.
# Não depende do número de workers, senão os resultados mudariam com ele.
CHUNK_SIZE = config("SL2LAB_CHUNK_SIZE", default=4096, cast=int)
OUTPUT_DIR = Path(config("SL2LAB_OUTPUT_DIR", default="results"))

# Defaults numéricos
DEFAULT_DT = config("SL2LAB_DEFAULT_DT", default=1e-3, cast=float)
DEFAULT_EPSILON = config("SL2LAB_DEFAULT_EPSILON", default=0.5, cast=float)
DEFAULT_TORUS_SIDE = config("SL2LAB_TORUS_SIDE", default=256 * 3.141592653589793, cast=float)
DEFAULT_GRID_N = config("SL2LAB_GRID_N", default=512, cast=int)
DEFAULT_SHELLS_PER_EFOLD = config("SL2LAB_SHELLS_PER_EFOLD", default=32, cast=int)

# Gates
Z_GATE = 3.0
Z_GATE_FIELD = 4.0
DETERMINISTIC_ATOL = 1e-12

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "json": {
            "()": "structlog.stdlib.ProcessorFormatter",
            "processor": structlog.processors.JSONRenderer(),
        },
        "console": {
            "()": "structlog.stdlib.ProcessorFormatter",
            "processor": structlog.dev.ConsoleRenderer(),
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "json" if not DEBUG else "console",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": LOG_LEVEL,
    },
}

_configured = False


def configure_logging():
    """Logging estruturado (JSON) via structlog. Idempotente."""
    global _configured
    if _configured:
        return

    logging.config.dictConfig(LOGGING)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.UnicodeDecoder(),
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
    _configured = True
