"""
Configuração de execução: arquivo JSON opcional + flags da CLI + defaults.
Chaves desconhecidas são rejeitadas.
"""

import json
import math
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core import settings
from shared.exceptions.domain_exceptions import ConfigurationError


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Sl2SimConfig(_Block):
    tau_end: float = Field(2.0, gt=0)
    dt: float = Field(settings.DEFAULT_DT, gt=0)
    n_paths: int = Field(10_000, ge=2)
    n_records: int = Field(20, ge=1)


class ScalarSimConfig(_Block):
    tau_end: float = Field(2.0, gt=0)
    dt: float = Field(settings.DEFAULT_DT, gt=0)
    n_paths: int = Field(10_000, ge=2)
    n_records: int = Field(20, ge=1)


class FieldConfig(_Block):
    epsilon: float = Field(settings.DEFAULT_EPSILON, ge=0)
    torus_side: float = Field(settings.DEFAULT_TORUS_SIDE, gt=0)
    grid_n: int = Field(settings.DEFAULT_GRID_N, gt=0)
    L: Optional[float] = Field(None, ge=1)


class CoupleCheckConfig(_Block):
    torus_side: float = Field(64 * math.pi, gt=0)
    grid_n: int = Field(128, gt=0)
    L: float = Field(math.e, gt=1)
    n_realizations: int = Field(10_000, ge=2)


class CorrectorConfig(_Block):
    epsilon: float = Field(settings.DEFAULT_EPSILON, gt=0)
    torus_side: float = Field(settings.DEFAULT_TORUS_SIDE, gt=0)
    grid_n: int = Field(settings.DEFAULT_GRID_N, gt=0)
    L_max: float = Field(math.e**2, gt=1)
    shells_per_efold: int = Field(settings.DEFAULT_SHELLS_PER_EFOLD, ge=1)
    n_realizations: int = Field(10_000, ge=2)


class PdeConfig(_Block):
    epsilon: float = Field(0.3, ge=0)
    torus_side: float = Field(64 * math.pi, gt=0)
    grid_n: int = Field(128, gt=0)
    T: float = Field(10.0, gt=0)
    dt: float = Field(0.05, gt=0)
    probes: list[tuple[float, float]] = Field(
        default_factory=lambda: [(2.0, 0.0), (0.0, 2.0), (4.0, 0.0), (0.0, 4.0)]
    )


class AcceptanceConfig(_Block):
    """Tamanhos dos critérios; os defaults são os do conjunto completo."""

    n_paths: int = Field(100_000, ge=2)
    n_ks: int = Field(10_000, ge=2)
    n_matrix: int = Field(100_000, ge=2)
    n_gbm: int = Field(1_000_000, ge=2)
    n_triples: int = Field(10_000, ge=2)
    n_fields: int = Field(10_000, ge=2)
    n_corrector: int = Field(10_000, ge=2)
    n_particles: int = Field(10_000, ge=2)
    dt: float = Field(1e-3, gt=0)
    triple_dt: float = Field(1e-4, gt=0)
    field_torus_side: float = Field(64 * math.pi, gt=0)
    field_grid_n: int = Field(128, gt=0)
    corrector_torus_side: float = Field(settings.DEFAULT_TORUS_SIDE, gt=0)
    corrector_grid_n: int = Field(settings.DEFAULT_GRID_N, gt=0)
    duality: PdeConfig = Field(default_factory=PdeConfig)
    negative_control: bool = False


class DiagnosticsConfig(_Block):
    epsilon: float = Field(0.5, gt=0)
    torus_side: float = Field(64 * math.pi, gt=0)
    grid_n: int = Field(128, gt=0)
    T: float = Field(1000.0, gt=0)
    dt: float = Field(0.05, gt=0)
    x: tuple[float, float] = (4.0, 0.0)
    n_realizations: int = Field(32, ge=2)
    powers: list[float] = Field(default_factory=lambda: [1.0, 2.0])


class RunConfig(_Block):
    master_seed: int = Field(settings.MASTER_SEED, ge=0, lt=2**64)
    workers: int = Field(settings.WORKERS, ge=1)
    chunk_size: int = Field(settings.CHUNK_SIZE, ge=1)
    out: Path = settings.OUTPUT_DIR
    sl2_sim: Sl2SimConfig = Field(default_factory=Sl2SimConfig)
    scalar_sim: ScalarSimConfig = Field(default_factory=ScalarSimConfig)
    field_sample: FieldConfig = Field(default_factory=FieldConfig)
    couple_check: CoupleCheckConfig = Field(default_factory=CoupleCheckConfig)
    corrector_run: CorrectorConfig = Field(default_factory=CorrectorConfig)
    pde_run: PdeConfig = Field(default_factory=PdeConfig)
    accept: AcceptanceConfig = Field(default_factory=AcceptanceConfig)
    diagnostics: DiagnosticsConfig = Field(default_factory=DiagnosticsConfig)

    def block(self, command: str) -> _Block:
        return getattr(self, command.replace("-", "_"))


# flag da CLI → campo (global ou do bloco do comando)
GLOBAL_FLAGS = {"seed": "master_seed", "workers": "workers", "out": "out"}
BLOCK_FLAGS = {"dt": "dt", "eps": "epsilon"}


def load_config(
    path: Optional[Path] = None,
    command: Optional[str] = None,
    overrides: Optional[dict[str, Any]] = None,
) -> RunConfig:
    """
    Lê o JSON (se houver), aplica as flags não nulas e valida.
    Levanta ConfigurationError em qualquer problema.
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"Não foi possível ler {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError("O arquivo de configuração deve ser um objeto JSON.")

    for flag, value in (overrides or {}).items():
        if value is None:
            continue
        if flag in GLOBAL_FLAGS:
            data[GLOBAL_FLAGS[flag]] = value
        elif flag in BLOCK_FLAGS and command is not None:
            key = command.replace("-", "_")
            data.setdefault(key, {})[BLOCK_FLAGS[flag]] = value
        else:
            raise ConfigurationError(f"Flag {flag!r} não se aplica ao comando {command!r}.")

    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"Configuração inválida: {exc}") from exc
