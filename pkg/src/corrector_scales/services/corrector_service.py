"""
Serviço do corretor proxy (camada de aplicação).

Avança φ, φ̃ e F_L casca a casca em L, com a convenção de Itô:
λ̃ e o termo de duas escalas são avaliados no extremo esquerdo da casca.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import structlog

from core import settings
from corrector_scales.domain.entities import CorrectorState
from corrector_scales.domain.scale_map import ScaleMap
from field_ensemble.domain.entities import SpectralField
from field_ensemble.domain.spectral import (
    dealias_mask,
    grid_wavenumbers,
    scatter_to_grid,
    to_real_space,
    to_spectrum,
)
from field_ensemble.services.field_service import FieldEnsembleService, lnL_grid
from shared.events.event_bus import DomainEvent, EventBus
from shared.exceptions.domain_exceptions import (
    EmptyShellError,
    InvalidInputError,
    UnresolvedBandError,
)
from shared.parallel.executor import run_work_items
from shared.stats.moments import RunningMoments, tree_merge
from sl2_core.domain.value_objects import matrices_to_coefficients

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ShellIncrement:
    """dφ numa casca, avaliado nas sondas: valor, gradiente e hessiana."""

    value: np.ndarray  # (P, j)
    gradient: np.ndarray  # (P, l, j) = ∂_l dφʲ
    hessian: np.ndarray  # (P, l, i, j) = ∂_l∂_i dφʲ
    spectrum: np.ndarray  # (m, j) coeficientes de dφ no semiplano
    mask: np.ndarray


def shell_increment(
    field: SpectralField, L: float, L_next: float, tilde_lambda: float, probes: np.ndarray
) -> ShellIncrement:
    """
    dφ̂ʲ = db̂ʲ/(λ̃|k|²) nos modos de `SpectralField.band(L, L_next)`, somado em
    k e −k: dφ(x) = 2 Re Σ dφ̂ e^{ik·x}.
    """
    mask = field.band(L, L_next)
    k = field.wavevectors[mask]
    spectrum = field.coeffs[mask] / (tilde_lambda * field.k_norm[mask] ** 2)[:, None]
    phase = np.exp(1j * probes @ k.T)  # (P, m)
    weighted = phase[:, :, None] * spectrum[None]  # (P, m, j)
    value = 2.0 * np.real(weighted.sum(axis=1))
    gradient = 2.0 * np.real(1j * np.einsum("ml,pmj->plj", k, weighted))
    hessian = -2.0 * np.real(np.einsum("ml,mi,pmj->plij", k, k, weighted))
    return ShellIncrement(value, gradient, hessian, spectrum, mask)


def _grid_derivatives(spectrum: np.ndarray, torus_side: float) -> np.ndarray:
    """∂ᵢ de um campo (j, N, N) dado pelo espectro: forma (i, j, N, N)."""
    KX, KY = grid_wavenumbers(torus_side, spectrum.shape[-1])
    return np.stack([to_real_space(1j * K[None] * spectrum) for K in (KX, KY)])


class CorrectorService:
    """Use Cases do corretor proxy φ̃_L e da recursão F_L."""

    def __init__(
        self,
        epsilon: float,
        field_service: Optional[FieldEnsembleService] = None,
        event_bus: Optional[EventBus] = None,
    ):
        self.scale_map = ScaleMap(epsilon)
        self.field_service = field_service or FieldEnsembleService()
        self.event_bus = event_bus or EventBus()

    @property
    def epsilon(self) -> float:
        return self.scale_map.epsilon

    def advance_corrector(
        self,
        state: CorrectorState,
        field: SpectralField,
        L_next: float,
        allow_empty: bool = False,
    ) -> CorrectorState:
        """
        Uma casca [L, L_next). Com a casca vazia levanta EmptyShellError,
        exceto com `allow_empty`, caso em que só L avança.
        """
        L = state.L
        if L_next <= L:
            raise InvalidInputError(f"L_next ({L_next}) deve ser maior que L ({L}).")
        if L_next > field.max_resolved_L * (1 + 1e-12):
            raise UnresolvedBandError(requested_L=L_next, max_L=field.max_resolved_L)

        tilde_lambda = self.scale_map.tilde_lambda(L)
        shell = shell_increment(field, L, L_next, tilde_lambda, state.probes)
        new = state.copy()
        new.L = L_next
        new.shells_done += 1

        if not np.any(shell.mask):
            if not allow_empty:
                logger.error("corrector_empty_shell", L=L, L_next=L_next)
                raise EmptyShellError(L_left=L, L_right=L_next)
            logger.warning("corrector_empty_shell_skipped", L=L, L_next=L_next)
            new.empty_shells += 1
            new.driver_increments.append(np.zeros(3))
            return new

        old_tilde = state.phi_tilde
        old_grad = state.grad_phi_tilde
        new.phi = state.phi + shell.value
        # φ̃ += dφ + φ̃ⁱ∂ᵢdφ com o φ̃ antigo (Itô)
        new.phi_tilde = old_tilde + shell.value + np.einsum("pi,pij->pj", old_tilde, shell.gradient)
        new.grad_phi_tilde = (
            old_grad
            + shell.gradient
            + np.einsum("pli,pij->plj", old_grad, shell.gradient)
            + np.einsum("pi,plij->plj", old_tilde, shell.hessian)
        )
        # a origem é sempre a sonda 0
        grad_at_zero = shell.gradient[0]
        new.F_L = state.F_L + state.F_L @ grad_at_zero
        if self.epsilon > 0:
            scale = math.sqrt(2.0) * tilde_lambda / self.epsilon
            new.driver_increments.append(matrices_to_coefficients(scale * grad_at_zero))
        else:
            new.driver_increments.append(np.zeros(3))

        if state.phi_grid is not None:
            self._advance_grid(new, state, field, shell)
        return new

    def _advance_grid(
        self,
        new: CorrectorState,
        old: CorrectorState,
        field: SpectralField,
        shell: ShellIncrement,
    ):
        n = old.phi_grid.shape[-1]
        d_spectrum = scatter_to_grid(field.modes[shell.mask], shell.spectrum, n)
        d_phi = to_real_space(d_spectrum)
        d_grad = _grid_derivatives(d_spectrum, field.torus_side)
        transport = np.einsum("ixy,ijxy->jxy", old.phi_tilde_grid, d_grad)
        # produto desaliasado e centrado (modo k = 0 zerado)
        spectrum = to_spectrum(transport) * dealias_mask(n)[None]
        spectrum[:, 0, 0] = 0.0
        new.phi_grid = old.phi_grid + d_phi
        new.phi_tilde_grid = old.phi_tilde_grid + d_phi + to_real_space(spectrum)

    def proxy_gradient_at_zero(self, state: CorrectorState) -> np.ndarray:
        """∇ũ_L(0) = id + ∇φ̃_L(0)."""
        return np.eye(2) + state.grad_phi_tilde[0]

    def run_to(
        self,
        field: SpectralField,
        L_max: float,
        shells_per_efold: int = settings.DEFAULT_SHELLS_PER_EFOLD,
        probes: Optional[np.ndarray] = None,
        track_grid: bool = False,
        allow_empty: bool = False,
    ) -> CorrectorState:
        """Integra de L = 1 até L_max pela grade geométrica em ln L."""
        grid = lnL_grid(L_max, shells_per_efold)
        state = CorrectorState.initial(probes, grid_n=field.grid_n if track_grid else None)
        for ln_next in grid[1:]:
            state = self.advance_corrector(state, field, math.exp(ln_next), allow_empty)
        logger.debug(
            "corrector_advanced",
            L=state.L,
            shells=state.shells_done,
            empty_shells=state.empty_shells,
            det_drift=state.determinant_drift,
        )
        return state

    def frobenius_ensemble(
        self,
        L_max: float,
        n_realizations: int,
        seed: int,
        shells_per_efold: int = settings.DEFAULT_SHELLS_PER_EFOLD,
        workers: int = settings.WORKERS,
        first_stream: int = 0,
        allow_empty: bool = False,
    ) -> "CorrectorEnsemble":
        """
        |F_L|², |∇ũ_L(0)|² e a trilha do motor sobre realizações
        independentes do campo (uma por fluxo).
        """
        if n_realizations < 2:
            raise InvalidInputError("n_realizations deve ser ≥ 2.")
        tasks = [
            CorrectorTask(
                seed=seed,
                stream_index=first_stream + i,
                epsilon=self.epsilon,
                torus_side=self.field_service.torus_side,
                grid_n=self.field_service.grid_n,
                L_max=L_max,
                shells_per_efold=shells_per_efold,
                allow_empty=allow_empty,
            )
            for i in range(n_realizations)
        ]
        results = run_work_items(_corrector_realization, tasks, workers=workers)
        ensemble = CorrectorEnsemble(
            F_L=np.stack([r[0] for r in results]),
            proxy_gradient=np.stack([r[1] for r in results]),
            driver_increments=np.stack([r[2] for r in results]),
            lnL_grid=lnL_grid(L_max, shells_per_efold),
        )
        self.event_bus.publish(
            "run_completed",
            DomainEvent(what="corrector_ensemble", n=n_realizations, L_max=L_max),
        )
        logger.info(
            "corrector_ensemble_computed",
            n_realizations=n_realizations,
            L_max=L_max,
            epsilon=self.epsilon,
        )
        return ensemble


@dataclass(frozen=True)
class CorrectorTask:
    seed: int
    stream_index: int
    epsilon: float
    torus_side: float
    grid_n: int
    L_max: float
    shells_per_efold: int
    allow_empty: bool = False


def _corrector_realization(task: CorrectorTask) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    field_service = FieldEnsembleService(task.torus_side, task.grid_n)
    field = field_service.sample_field(task.epsilon, task.seed, L=task.L_max, stream_index=task.stream_index)
    service = CorrectorService(task.epsilon, field_service)
    state = service.run_to(field, task.L_max, task.shells_per_efold, allow_empty=task.allow_empty)
    return state.F_L, service.proxy_gradient_at_zero(state), np.array(state.driver_increments)


@dataclass
class CorrectorEnsemble:
    """Resultados por realização: F_L (n, 2, 2), ∇ũ_L(0) (n, 2, 2), motor (n, shells, 3)."""

    F_L: np.ndarray
    proxy_gradient: np.ndarray
    driver_increments: np.ndarray
    lnL_grid: np.ndarray

    def frobenius_F(self) -> RunningMoments:
        return _moments(np.sum(self.F_L**2, axis=(-1, -2)))

    def frobenius_proxy(self) -> RunningMoments:
        return _moments(np.sum(self.proxy_gradient**2, axis=(-1, -2)))

    def proxy_trace(self) -> RunningMoments:
        return _moments(np.trace(self.proxy_gradient, axis1=-2, axis2=-1))

    def driver_covariance_per_tau(self, scale_map: ScaleMap) -> tuple[np.ndarray, np.ndarray]:
        """
        Covariância empírica por unidade de τ do motor no relógio τ.

        Cada casca contribui (ε/(√2 λ̃))·ΔB; o relógio discreto é
        Σ ε²/(2λ̃²)·d lnL, a variação quadrática esperada da soma.
        Devolve (média, erro-padrão), ambos 3×3.
        """
        if scale_map.epsilon == 0:
            raise InvalidInputError("A troca de relógio exige ε > 0.")
        L_left = np.exp(self.lnL_grid[:-1])
        scales = np.array([scale_map.driver_scale(L) for L in L_left])
        clock = float(np.sum(scales**2 * np.diff(self.lnL_grid)))
        total = np.einsum("n,rnc->rc", scales, self.driver_increments) / math.sqrt(clock)
        outer = total[:, :, None] * total[:, None, :]
        mean = outer.mean(axis=0)
        se = outer.std(axis=0, ddof=1) / math.sqrt(len(outer))
        return mean, se


def _moments(values: Sequence[float]) -> RunningMoments:
    parts = []
    for chunk in np.array_split(np.asarray(values, dtype=float), max(1, len(values) // settings.CHUNK_SIZE)):
        m = RunningMoments()
        m.update_batch(chunk)
        parts.append(m)
    return tree_merge(parts)
