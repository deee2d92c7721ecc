"""
Estatísticas de incremento de u = x + φ e o resíduo contra o fluxo F acoplado.
"""

import math
from typing import Optional, Sequence

import numpy as np
import structlog
from scipy.integrate import trapezoid

from core import settings
from corrector_scales.domain.scale_map import ScaleMap
from drift_solver.domain.entities import PdeSeries
from field_ensemble.domain.entities import SpectralField
from field_ensemble.services.field_service import FieldEnsembleService, lnL_grid
from shared.exceptions.domain_exceptions import InvalidInputError
from shared.stats.moments import MomentReport, RunningMoments
from sl2_core.domain.stepping import step_ito_batch

logger = structlog.get_logger(__name__)

MIN_REALIZATIONS = 32


def _time_average(series: PdeSeries, integrand: np.ndarray, T: float) -> float:
    times = series.times
    keep = times <= T * (1 + 1e-12)
    if times[0] != 0.0 or abs(times[keep][-1] - T) > 1e-9 * max(1.0, T):
        raise InvalidInputError("A série precisa cobrir [0, T] com t = 0 e t = T entre as saídas.")
    return float(trapezoid(integrand[keep], times[keep]) / T)


def _check_point(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (2,) or not np.any(x):
        raise InvalidInputError("x deve ser um ponto 2D não nulo.")
    return x


def increment_statistic(series: PdeSeries, x: Sequence[float], T: float) -> float:
    """(1/T)∫₀ᵀ |x + φ(x,t) − φ(0,t)|²/|x|² dt pela regra do trapézio nas saídas."""
    x = _check_point(x)
    diff = x[None] + series.values_at(x) - series.values_at(np.zeros(2))
    integrand = np.sum(diff**2, axis=1) / float(x @ x)
    return _time_average(series, integrand, T)


def coupled_flow(
    field: SpectralField,
    x: Sequence[float],
    T: float,
    shells_per_efold: int = settings.DEFAULT_SHELLS_PER_EFOLD,
) -> np.ndarray:
    """
    F_{τ(|x|²), τ(T)} dirigido pelo B acoplado do mesmo campo.

    Casca a casca em L com L² − 1 ≥ |x|², o incremento é
    (ε/(√2 λ(L²−1)))·ΔB, passo de Itô renormalizado.
    """
    x = _check_point(x)
    scale_map = ScaleMap(field.epsilon)
    s_start = float(x @ x)
    if s_start >= T or field.epsilon == 0:
        return np.eye(2)
    L_start, L_max = math.sqrt(s_start + 1.0), math.sqrt(T + 1.0)
    grid = np.union1d(lnL_grid(L_max, shells_per_efold), [math.log(L_start)])
    service = FieldEnsembleService(field.torus_side, field.grid_n)
    path = service.coupled_B_path(field, grid)

    F = np.eye(2)[None]
    first = int(np.searchsorted(grid, math.log(L_start) - 1e-12))
    for n in range(first, len(grid) - 1):
        L = math.exp(grid[n])
        dW = scale_map.driver_scale(L) * path.increments[n]
        F = step_ito_batch(F, dW[None], tau=scale_map.tau_of_L(L))
    return F[0]


def theorem1_residual(
    field: SpectralField,
    series: PdeSeries,
    x: Sequence[float],
    T: float,
    shells_per_efold: int = settings.DEFAULT_SHELLS_PER_EFOLD,
) -> float:
    """
    (1/T)∫₀ᵀ |u(x,t) − u(0,t) − Fᵀx|²/|x|² dt para uma realização, com
    u − x = φ vindo da EDP (já é a média térmica, sem partículas).
    """
    x = _check_point(x)
    F = coupled_flow(field, x, T, shells_per_efold)
    target = F.T @ x
    diff = x[None] + series.values_at(x) - series.values_at(np.zeros(2)) - target[None]
    integrand = np.sum(diff**2, axis=1) / float(x @ x)
    residual = _time_average(series, integrand, T)
    logger.debug("theorem1_residual", x=x.tolist(), T=T, residual=residual, F_frobenius2=float(np.sum(F**2)))
    return residual


def intermittency_moment(
    statistics: Sequence[float],
    x: Sequence[float],
    T: float,
    p: float,
    epsilon: float,
    min_realizations: int = MIN_REALIZATIONS,
) -> MomentReport:
    """
    Momento p da estatística de incremento sobre realizações do campo e a
    razão para max{1, λ(T)/λ(|x|²)}^{1 + 3(p−1)/2}. Não bloqueia.
    """
    x = _check_point(x)
    values = np.asarray(statistics, dtype=float)
    if values.size < max(2, min_realizations):
        raise InvalidInputError(
            f"intermittency_moment exige ≥ {max(2, min_realizations)} realizações "
            f"(recebido {values.size})."
        )
    if p < 1:
        raise InvalidInputError("p deve ser ≥ 1.")
    scale_map = ScaleMap(epsilon)
    base = max(1.0, scale_map.lambda_of(T) / scale_map.lambda_of(float(x @ x)))
    scale = base ** (1.0 + 1.5 * (p - 1.0))
    moments = RunningMoments()
    moments.update_batch(values**p)
    report = MomentReport.from_moments(
        f"intermittency_moment_p{p:g}",
        moments,
        provenance="escala max{1, λ(T)/λ(|x|²)}^{1+3(p−1)/2}",
        gating=False,
    )
    report.details.update({"scale": scale, "ratio": moments.mean / scale, "T": T, "x": x.tolist()})
    return report


def enhancement_ratio(displacements: np.ndarray, t: float, epsilon: Optional[float] = None) -> MomentReport:
    """E|X_t − X_0|²/(4t), com λ(t) como referência informativa."""
    moments = RunningMoments()
    moments.update_batch(np.sum(np.asarray(displacements) ** 2, axis=-1) / (4.0 * t))
    report = MomentReport.from_moments("diffusivity_enhancement", moments, gating=False)
    if epsilon is not None:
        report.details["lambda_t"] = ScaleMap(epsilon).lambda_of(t)
    return report.require(moments.mean + 3.0 * moments.std_error >= 1.0, "aumento ≥ 1")
