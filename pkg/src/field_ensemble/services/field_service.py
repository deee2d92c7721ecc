"""
Serviço do ensemble de campos (camada de aplicação).
Amostra o campo gaussiano de divergência nula, realiza-o na grade,
calcula a função de corrente e o caminho acoplado B_L.
"""

import math
from typing import Optional, Sequence

import numpy as np
import structlog

from core import settings
from field_ensemble.domain.entities import BAND_TOLERANCE, CoupledBPath, RealizedField, SpectralField
from field_ensemble.domain.spectral import (
    MAX_EXACT_INDEX,
    grid_wavenumbers,
    half_plane_modes,
    mode_spacing,
    quantize,
    scatter_to_grid,
    to_real_space,
)
from shared.exceptions.domain_exceptions import InvalidInputError, UnresolvedBandError
from shared.rng.streams import DOMAIN_FIELDS, seed_stream
from sl2_core.domain.value_objects import matrices_to_coefficients

logger = structlog.get_logger(__name__)

SQRT2 = math.sqrt(2.0)


def check_grid(torus_side: float, grid_n: int, outer_cutoff: float = 1.0):
    """Rejeita grades que não resolvem |k| = 1 abaixo de Nyquist."""
    if torus_side <= 0 or grid_n <= 0:
        raise InvalidInputError("torus_side e grid_n devem ser positivos.")
    reach = int(math.floor(outer_cutoff / mode_spacing(torus_side) + 1e-9))
    if reach >= grid_n // 2:
        raise InvalidInputError(
            f"Grade N={grid_n} não resolve o corte externo: Nyquist "
            f"{math.pi * grid_n / torus_side:.4g} ≤ {outer_cutoff}."
        )
    if reach >= MAX_EXACT_INDEX:
        raise InvalidInputError("Toro grande demais para a representação exata dos modos.")


def unit_B_contributions(field: SpectralField) -> np.ndarray:
    """
    Contribuição (m, 3) de cada modo para B = (√2/ε)∇(−Δ)⁻¹b(0).

    Somando k e −k: ∂ᵢ(−Δ)⁻¹bʲ(0) = −2 kᵢ Im b̂ʲ/|k|². Com b̂ = ε√w k̂⊥ z,
    o fator ε cancela e B depende só do ruído z.
    """
    if field.n_modes == 0:
        return np.zeros((0, 3))
    khat = field.wavevectors / field.k_norm[:, None]
    kperp = np.stack([-khat[:, 1], khat[:, 0]], axis=1)
    amplitude = -2.0 * math.sqrt(field.cell_weight) * field.noise.imag / field.k_norm
    # M_ij = ∂_i vʲ: linha = derivada, coluna = componente.
    matrices = SQRT2 * amplitude[:, None, None] * khat[:, :, None] * kperp[:, None, :]
    return matrices_to_coefficients(matrices)


class FieldEnsembleService:
    """Use Cases do ensemble de campos."""

    def __init__(
        self,
        torus_side: float = settings.DEFAULT_TORUS_SIDE,
        grid_n: int = settings.DEFAULT_GRID_N,
    ):
        check_grid(torus_side, grid_n)
        self.torus_side = torus_side
        self.grid_n = grid_n

    def sample_field(
        self,
        epsilon: float,
        seed: int,
        L: Optional[float] = None,
        stream_index: int = 0,
    ) -> SpectralField:
        """
        Um gaussiano complexo padrão por modo retido, em ordem canônica.
        L=None deixa o campo sem corte de grandes escalas.
        """
        if epsilon < 0:
            raise InvalidInputError("epsilon deve ser não negativo.")
        inner = 0.0 if L is None else 1.0 / L
        if L is not None and L < 1.0:
            raise InvalidInputError("L deve ser ≥ 1.")
        modes = half_plane_modes(self.torus_side, inner, 1.0)
        rng = seed_stream(seed, stream_index, domain=DOMAIN_FIELDS)
        gauss = rng.standard_normal((modes.shape[0], 2))
        noise = (gauss[:, 0] + 1j * gauss[:, 1]) / SQRT2

        dk = mode_spacing(self.torus_side)
        norm = np.hypot(modes[:, 0], modes[:, 1])
        # b̂ = (−m_y, m_x)·t com t = ε√w z/|m|; t quantizado para divergência exata.
        t = quantize(epsilon * dk / math.sqrt(2.0 * math.pi) * noise / norm)
        coeffs = np.stack([-modes[:, 1] * t, modes[:, 0] * t], axis=1)

        field = SpectralField(
            torus_side=self.torus_side,
            grid_n=self.grid_n,
            epsilon=epsilon,
            modes=modes,
            noise=noise,
            coeffs=coeffs,
            inner_cutoff=inner,
            seed=seed,
            stream_index=stream_index,
        )
        logger.debug("field_sampled", n_modes=field.n_modes, epsilon=epsilon, seed=seed)
        return field

    def grid_spectrum(self, field: SpectralField) -> np.ndarray:
        """Espectro completo (2, N, N) de b."""
        return scatter_to_grid(field.modes, field.coeffs, field.grid_n)

    def realize_field(
        self,
        field: SpectralField,
        with_gradient: bool = False,
        grid_n: Optional[int] = None,
    ) -> RealizedField:
        """
        b nos pontos da grade N×N (ou numa grade mais fina `grid_n`).
        Com `with_gradient`, também ∂ᵢbʲ em forma (2, 2, N, N).
        """
        n = grid_n or field.grid_n
        if n != field.grid_n:
            check_grid(field.torus_side, n)
        spectrum = scatter_to_grid(field.modes, field.coeffs, n)
        values = to_real_space(spectrum)
        gradient = None
        if with_gradient:
            KX, KY = grid_wavenumbers(field.torus_side, n)
            gradient = np.stack(
                [to_real_space(1j * K[None] * spectrum) for K in (KX, KY)]
            )
        return RealizedField(values=values, torus_side=field.torus_side, gradient=gradient)

    def stream_function(self, field: SpectralField) -> np.ndarray:
        """
        ψ̂ por modo (semiplano), com b = ∇⊥ψ = (−∂₂ψ, ∂₁ψ):
        b̂ = i k⊥ ψ̂, logo ψ̂ = −i (k⊥·b̂)/|k|².
        """
        k = field.wavevectors
        kperp = np.stack([-k[:, 1], k[:, 0]], axis=1)
        return -1j * np.sum(kperp * field.coeffs, axis=1) / field.k_norm**2

    def stream_function_grid(self, field: SpectralField) -> np.ndarray:
        return to_real_space(scatter_to_grid(field.modes, self.stream_function(field), field.grid_n))

    def curl_of_stream(self, field: SpectralField, psi_hat: np.ndarray) -> np.ndarray:
        """∇⊥ψ por modo: (−i k_y ψ̂, i k_x ψ̂)."""
        k = field.wavevectors
        return np.stack([-1j * k[:, 1] * psi_hat, 1j * k[:, 0] * psi_hat], axis=1)

    def coupled_B_path(self, field: SpectralField, lnL_grid: Sequence[float]) -> CoupledBPath:
        """
        B_L para cada L = e^{lnL}: soma dos modos com 1/L ≤ |k| ≤ 1, a mesma
        banda de `sample_field(L)`. Em L = 1 o vetor é nulo; o anel |k| = 1
        entra com a primeira casca, como em `SpectralField.band`.
        """
        lnL = np.asarray(lnL_grid, dtype=float)
        if lnL.size == 0 or lnL[0] != 0.0 or np.any(np.diff(lnL) <= 0):
            raise InvalidInputError("lnL_grid deve começar em 0 e ser estritamente crescente.")
        L_max = math.exp(lnL[-1])
        if L_max > field.max_resolved_L * (1 + 1e-12):
            raise UnresolvedBandError(requested_L=L_max, max_L=field.max_resolved_L)

        contributions = unit_B_contributions(field)
        log_k = field.log_inverse_k
        order = np.argsort(log_k, kind="stable")
        cumulative = np.vstack([np.zeros((1, 3)), np.cumsum(contributions[order], axis=0)])
        counts = np.searchsorted(log_k[order], lnL + BAND_TOLERANCE, side="right")
        counts[lnL == 0.0] = 0
        return CoupledBPath(
            lnL_grid=lnL,
            values=cumulative[counts],
            source_seed=field.seed,
            mode_counts=counts,
        )


def field_covariance_at_lag0(field: SpectralField) -> np.ndarray:
    """
    c(0) discreto: Σ sobre todos os modos (k e −k) de ε²·peso·(I − k̂⊗k̂).
    Tende a ε²/4·id quando Λ → ∞ sem corte interno.
    """
    if field.n_modes == 0:
        return np.zeros((2, 2))
    return 2.0 * np.sum(field.mode_covariance(), axis=0)


def lnL_grid(L_max: float, shells_per_efold: int = settings.DEFAULT_SHELLS_PER_EFOLD) -> np.ndarray:
    """Grade geométrica em ln L de 0 até ln L_max, terminando exatamente em ln L_max."""
    if L_max < 1.0 or shells_per_efold < 1:
        raise InvalidInputError("L_max ≥ 1 e shells_per_efold ≥ 1 são obrigatórios.")
    top = math.log(L_max)
    n = max(1, int(math.ceil(top * shells_per_efold - 1e-9)))
    return np.linspace(0.0, top, n + 1) if top > 0 else np.array([0.0])
