"""
Solver pseudo-espectral da EDP do corretor ∂ₜφ = Δφ + b·∇φ + b no toro.

Fator integrante exato e^{−|k|²dt} para a difusão, transporte explícito
no espaço físico com a regra dos 2/3 e RK4 de Lawson no tempo.
"""

import math
from typing import Optional, Sequence

import numpy as np
import structlog

from drift_solver.domain.entities import PdeSeries, PdeState, output_times
from field_ensemble.domain.entities import SpectralField
from field_ensemble.domain.spectral import (
    dealias_mask,
    grid_wavenumbers,
    scatter_to_grid,
    to_real_space,
    to_spectrum,
)
from shared.exceptions.domain_exceptions import (
    CflViolationError,
    InvalidInputError,
    NonFiniteStateError,
)

logger = structlog.get_logger(__name__)


class SpectralOperator:
    """Operadores da grade N×N para um campo b fixo."""

    def __init__(self, field: SpectralField, diffusion: bool = True, forcing: bool = True):
        n = field.grid_n
        limit = n / 3.0
        if field.n_modes and np.max(np.hypot(field.modes[:, 0], field.modes[:, 1])) > limit:
            raise InvalidInputError(
                f"Modos do campo fora da máscara de desaliasing (|m| ≤ {limit:.1f}); aumente N."
            )
        self.field = field
        self.grid_n = n
        self.KX, self.KY = grid_wavenumbers(field.torus_side, n)
        self.k2 = self.KX**2 + self.KY**2 if diffusion else np.zeros((n, n))
        self.mask = dealias_mask(n)
        self.b_hat = scatter_to_grid(field.modes, field.coeffs, n)
        self.b = to_real_space(self.b_hat)
        self.forcing = self.b_hat if forcing else np.zeros_like(self.b_hat)
        self.b_max = float(np.max(np.hypot(self.b[0], self.b[1]))) if field.n_modes else 0.0

    def check_cfl(self, dt: float):
        if dt * self.b_max > self.field.spacing:
            logger.error("pde_cfl_violation", dt=dt, b_max=self.b_max, spacing=self.field.spacing)
            raise CflViolationError(dt=dt, b_max=self.b_max, spacing=self.field.spacing)

    def nonlinear(self, v: np.ndarray) -> np.ndarray:
        """Espectro de b·∇φ + b, desaliasado."""
        dx = to_real_space(1j * self.KX[None] * v)
        dy = to_real_space(1j * self.KY[None] * v)
        transport = self.b[0][None] * dx + self.b[1][None] * dy
        return to_spectrum(transport) * self.mask[None] + self.forcing

    def step(self, v: np.ndarray, h: float) -> np.ndarray:
        E = np.exp(-self.k2 * h)[None]
        E2 = np.exp(-self.k2 * h / 2.0)[None]
        a = h * self.nonlinear(v)
        b = h * self.nonlinear(E2 * (v + a / 2.0))
        c = h * self.nonlinear(E2 * v + b / 2.0)
        d = h * self.nonlinear(E * v + E2 * c)
        return E * v + (E * a + 2.0 * E2 * (b + c) + d) / 6.0

    def at_points(self, v: np.ndarray, points: np.ndarray) -> np.ndarray:
        """φ em pontos arbitrários (P, 2) por soma espectral exata."""
        phase = np.exp(
            1j * (points[:, 0, None, None] * self.KX[None] + points[:, 1, None, None] * self.KY[None])
        )
        return np.real(np.einsum("jxy,pxy->pj", v, phase))


def integrate_spectrum(
    op: SpectralOperator,
    v0: np.ndarray,
    times: np.ndarray,
    dt: float,
    on_output,
):
    """
    Avança v de times[0] até times[-1], encurtando passos para cair
    exatamente em cada tempo de saída; chama on_output(t, v) em cada um.
    """
    op.check_cfl(dt)
    v = v0
    t = float(times[0])
    on_output(t, v)
    for target in times[1:]:
        while t < target - 1e-12 * max(1.0, target):
            h = min(dt, target - t)
            candidate = op.step(v, h)
            if not np.all(np.isfinite(candidate)):
                logger.error("pde_non_finite", last_stable_time=t)
                raise NonFiniteStateError(last_stable_time=t)
            v = candidate
            t = t + h
        t = float(target)
        on_output(t, v)
    return v


class PdeService:
    """Use Cases da EDP do corretor."""

    def solve_phi_pde(
        self,
        field: SpectralField,
        T: float,
        dt: float,
        probes: Optional[np.ndarray] = None,
        times: Optional[Sequence[float]] = None,
        keep_fields: bool = False,
    ) -> PdeSeries:
        """
        φ(t = 0) = 0. Devolve φ nas sondas em cada tempo de saída (0 e 64
        tempos log-espaçados em [T/100, T] por padrão) e, com `keep_fields`,
        também na grade.
        """
        if T <= 0 or dt <= 0:
            raise InvalidInputError("T e dt devem ser positivos.")
        grid_times = output_times(T) if times is None else np.asarray(sorted(times), dtype=float)
        if grid_times[0] != 0.0:
            grid_times = np.concatenate([[0.0], grid_times])
        points = np.zeros((1, 2)) if probes is None else np.atleast_2d(np.asarray(probes, dtype=float))

        op = SpectralOperator(field)
        series = PdeSeries(probes=points, torus_side=field.torus_side, epsilon=field.epsilon, seed=field.seed)

        def record(t, v):
            phi = to_real_space(v) if keep_fields else None
            series.states.append(PdeState(t=t, probe_values=op.at_points(v, points), phi=phi))

        v0 = np.zeros((2, op.grid_n, op.grid_n), dtype=complex)
        integrate_spectrum(op, v0, grid_times, dt, record)
        logger.info(
            "pde_solved",
            T=T,
            dt=dt,
            grid_n=op.grid_n,
            outputs=len(series.states),
            b_max=op.b_max,
        )
        return series

    def transport_energy_drift(self, field: SpectralField, T: float, dt: float) -> float:
        """
        Sem difusão e sem forçamento, a partir de φ₀ = b: variação relativa
        de ‖φ‖² por unidade de tempo.
        """
        op = SpectralOperator(field, diffusion=False, forcing=False)
        v0 = op.b_hat * op.mask[None]
        initial = float(np.sum(np.abs(v0) ** 2))
        if initial == 0.0:
            return 0.0
        final = integrate_spectrum(op, v0, np.array([0.0, T]), dt, lambda t, v: None)
        drift = abs(float(np.sum(np.abs(final) ** 2)) - initial) / initial / T
        logger.debug("transport_energy_drift", T=T, dt=dt, drift=drift)
        return drift

    def spatial_mean_drift(self, series: PdeSeries) -> float:
        """max |média espacial de φ| sobre os estados com campo guardado."""
        means = [np.max(np.abs(s.spatial_mean)) for s in series.states if s.phi is not None]
        return float(max(means)) if means else math.nan
