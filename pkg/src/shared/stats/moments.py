"""
Estatística de Monte Carlo: média/variância em passagem única (Welford),
combinação de acumuladores (Chan) e o relatório MomentReport.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Optional

import numpy as np

from shared.exceptions.domain_exceptions import InvalidInputError


@dataclass
class RunningMoments:
    """
    Acumulador de média e soma de quadrados centrada (M2).
    Aceita amostras isoladas ou blocos numpy; blocos são combinados
    pela fórmula de Chan, que é a mesma usada para juntar workers.
    """

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def update(self, x: float):
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def update_batch(self, values: np.ndarray):
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return
        batch_mean = float(values.mean())
        batch = RunningMoments(
            n=int(values.size),
            mean=batch_mean,
            m2=float(np.sum((values - batch_mean) ** 2)),
        )
        merged = self.merge(batch)
        self.n, self.mean, self.m2 = merged.n, merged.mean, merged.m2

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if other.n == 0:
            return RunningMoments(self.n, self.mean, self.m2)
        if self.n == 0:
            return RunningMoments(other.n, other.mean, other.m2)
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return RunningMoments(n, mean, m2)

    def __add__(self, other: "RunningMoments") -> "RunningMoments":
        return self.merge(other)

    def scaled(self, factor: float) -> "RunningMoments":
        """Momentos de factor·X."""
        return RunningMoments(self.n, self.mean * factor, self.m2 * factor * factor)

    @property
    def variance(self) -> float:
        if self.n < 2:
            return 0.0
        return self.m2 / (self.n - 1)

    @property
    def std_error(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self.variance / self.n)


def tree_merge(parts: list[RunningMoments]) -> RunningMoments:
    """
    Redução em árvore binária com ordem fixa (pares adjacentes por nível).
    O resultado depende só da lista, não de quem produziu cada parte.
    """
    if not parts:
        return RunningMoments()
    level = list(parts)
    while len(level) > 1:
        nxt = [level[i].merge(level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


@dataclass
class MomentReport:
    """
    Estimativa de Monte Carlo (ou valor determinístico) e sua referência.

    `passed` segue |z| ≤ z_gate quando há referência estocástica,
    e |valor − referência| ≤ atol para identidades determinísticas.
    """

    name: str
    n_samples: int
    mean: float
    std_error: float
    analytic_reference: Optional[float] = None
    z_score: Optional[float] = None
    passed: Optional[bool] = None
    provenance: str = ""
    gating: bool = True
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_moments(
        cls,
        name: str,
        moments: RunningMoments,
        reference: Optional[float] = None,
        provenance: str = "",
        z_gate: float = 3.0,
        gating: bool = True,
    ) -> "MomentReport":
        report = cls(
            name=name,
            n_samples=moments.n,
            mean=moments.mean,
            std_error=moments.std_error,
            analytic_reference=reference,
            provenance=provenance,
            gating=gating,
        )
        if reference is not None:
            report.z_score = z_score(moments.mean, reference, moments.std_error)
            report.passed = abs(report.z_score) <= z_gate
        return report

    @classmethod
    def deterministic(
        cls,
        name: str,
        value: float,
        reference: float,
        atol: float,
        provenance: str = "",
        n_samples: int = 1,
    ) -> "MomentReport":
        return cls(
            name=name,
            n_samples=n_samples,
            mean=float(value),
            std_error=0.0,
            analytic_reference=float(reference),
            passed=bool(abs(value - reference) <= atol),
            provenance=provenance,
            details={"atol": atol, "abs_error": float(abs(value - reference))},
        )

    def require(self, condition: bool, reason: str) -> "MomentReport":
        """Acrescenta uma condição extra ao gate (ex.: viés relativo ≤ 2%)."""
        self.details.setdefault("conditions", {})[reason] = bool(condition)
        self.passed = bool(condition) and self.passed is not False
        return self

    def to_dict(self) -> dict[str, Any]:
        return _jsonable(asdict(self))


def z_score(mean: float, reference: float, std_error: float) -> float:
    diff = mean - reference
    if std_error == 0.0:
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return diff / std_error


def mc_mean(
    observable_stream: Iterable,
    n: int,
    name: str = "mc_mean",
    reference: Optional[float] = None,
    z_gate: float = 3.0,
) -> MomentReport:
    """
    Média/variância em passagem única dos primeiros n valores do fluxo.
    O fluxo pode produzir escalares ou blocos numpy.
    """
    if n < 2:
        raise InvalidInputError("mc_mean exige n ≥ 2.")
    moments = RunningMoments()
    for item in observable_stream:
        remaining = n - moments.n
        if remaining <= 0:
            break
        if np.ndim(item) == 0:
            moments.update(float(item))
        else:
            moments.update_batch(np.asarray(item, dtype=float).ravel()[:remaining])
    if moments.n < n:
        raise InvalidInputError(
            f"Fluxo esgotado com {moments.n} amostras (pedido: {n})."
        )
    return MomentReport.from_moments(name, moments, reference=reference, z_gate=z_gate)


def joint_z(a: RunningMoments, b: RunningMoments) -> float:
    """z da diferença entre duas médias independentes."""
    se = math.hypot(a.std_error, b.std_error)
    return z_score(a.mean, b.mean, se)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value
