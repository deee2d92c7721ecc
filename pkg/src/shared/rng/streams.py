"""
Fluxos aleatórios baseados em contador (Philox).

Cada item de trabalho recebe um índice de fluxo fixo antes da execução;
o fluxo depende apenas de (master_seed, stream_index), nunca do worker
que o executa.
"""

import numpy as np

# Domínios de fluxo: separam, para a mesma semente, fluxos de naturezas
# diferentes (caminhos de F, campos, partículas...).
DOMAIN_PATHS = 0
DOMAIN_FIELDS = 1
DOMAIN_PARTICLES = 2
DOMAIN_SCALAR = 3
DOMAIN_AUX = 4


def seed_stream(master_seed: int, stream_index: int, domain: int = DOMAIN_PATHS) -> np.random.Generator:
    """
    Deriva o gerador do fluxo `stream_index`.

    A chave Philox vem de SeedSequence(master_seed, spawn_key=(domain, index)),
    portanto é bit a bit idêntica em qualquer plataforma.
    """
    if master_seed < 0 or stream_index < 0:
        raise ValueError("master_seed e stream_index devem ser não negativos.")
    sequence = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(int(domain), int(stream_index))
    )
    return np.random.Generator(np.random.Philox(sequence))


def chunk_layout(n_items: int, chunk_size: int) -> list[tuple[int, int]]:
    """
    Divide n_items em blocos contíguos [(início, tamanho), ...].
    O layout depende só de (n_items, chunk_size).
    """
    if chunk_size <= 0:
        raise ValueError("chunk_size deve ser positivo.")
    return [
        (start, min(chunk_size, n_items - start))
        for start in range(0, n_items, chunk_size)
    ]


def derive_seed(master_seed: int, *key: int) -> int:
    """Semente de 64 bits derivada de (master_seed, key), para sub-execuções."""
    sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(DOMAIN_AUX, *map(int, key)))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
