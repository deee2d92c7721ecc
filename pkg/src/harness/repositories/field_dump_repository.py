"""
Dump espectral textual de um SpectralField.

Formato:
    linha 1: "# sl2lab-field v1"
    linha 2: cabeçalho JSON (torus_side, grid_n, epsilon, inner_cutoff,
             outer_cutoff, seed, stream_index, n_modes)
    demais:  "m_x m_y re(b̂₁) im(b̂₁) re(b̂₂) im(b̂₂) re(z) im(z)", um modo por
             linha, floats em float.hex para releitura bit a bit.
"""

import json
from pathlib import Path

import numpy as np
import structlog

from field_ensemble.domain.entities import SpectralField
from harness.repositories.interfaces import IFieldDumpRepository
from shared.exceptions.domain_exceptions import ConfigurationError

logger = structlog.get_logger(__name__)

MAGIC = "# sl2lab-field v1"


class FieldDumpRepository(IFieldDumpRepository):
    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)

    def save(self, field: SpectralField, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{name}.field"
        header = {
            "torus_side": float(field.torus_side).hex(),
            "grid_n": field.grid_n,
            "epsilon": float(field.epsilon).hex(),
            "inner_cutoff": float(field.inner_cutoff).hex(),
            "outer_cutoff": float(field.outer_cutoff).hex(),
            "seed": field.seed,
            "stream_index": field.stream_index,
            "n_modes": field.n_modes,
        }
        lines = [MAGIC, json.dumps(header)]
        for m, c, z in zip(field.modes, field.coeffs, field.noise):
            numbers = [c[0].real, c[0].imag, c[1].real, c[1].imag, z.real, z.imag]
            lines.append(" ".join([str(int(m[0])), str(int(m[1]))] + [float(v).hex() for v in numbers]))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info("field_dumped", path=str(path), n_modes=field.n_modes)
        return path

    def load(self, name: str) -> SpectralField:
        path = self.out_dir / f"{name}.field"
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != MAGIC:
            raise ConfigurationError(f"{path} não é um dump de campo.")
        header = json.loads(lines[1])
        records = [line.split() for line in lines[2:] if line.strip()]
        if len(records) != header["n_modes"]:
            raise ConfigurationError(f"{path}: esperados {header['n_modes']} modos, lidos {len(records)}.")
        modes = np.array([[int(r[0]), int(r[1])] for r in records], dtype=int).reshape(-1, 2)
        numbers = np.array([[float.fromhex(v) for v in r[2:]] for r in records]).reshape(-1, 6)
        coeffs = np.stack(
            [numbers[:, 0] + 1j * numbers[:, 1], numbers[:, 2] + 1j * numbers[:, 3]], axis=1
        )
        return SpectralField(
            torus_side=float.fromhex(header["torus_side"]),
            grid_n=int(header["grid_n"]),
            epsilon=float.fromhex(header["epsilon"]),
            modes=modes,
            noise=numbers[:, 4] + 1j * numbers[:, 5],
            coeffs=coeffs,
            inner_cutoff=float.fromhex(header["inner_cutoff"]),
            outer_cutoff=float.fromhex(header["outer_cutoff"]),
            seed=int(header["seed"]),
            stream_index=int(header["stream_index"]),
        )
