"""
Execução determinística de itens de trabalho.

A harness pré-atribui um índice de fluxo a cada item; os workers só
executam. Os resultados voltam na ordem dos itens, então qualquer
redução posterior é independente do número de workers.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

import structlog

logger = structlog.get_logger(__name__)

Item = TypeVar("Item")
Result = TypeVar("Result")


def run_work_items(
    fn: Callable[[Item], Result],
    items: Sequence[Item],
    workers: int = 1,
) -> list[Result]:
    """
    Executa fn em cada item. Com workers > 1 usa processos;
    fn precisa ser uma função de módulo (picklável).
    """
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug("parallel_run_started", workers=workers, items=len(items))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserva a ordem dos itens
        results = list(pool.map(fn, items))
    logger.debug("parallel_run_finished", workers=workers, items=len(items))
    return results
