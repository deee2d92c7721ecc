"""
Serviço dos processos escalares (camada de aplicação).

Integra R (Itô e Stratonovich), o Bessel 2D X e a tripla de comparação
(S̃, S, X); calcula as identidades de concentração de massa por
quadratura e por Monte Carlo.
"""

import math
from typing import Callable, Optional

import numpy as np
import structlog
from scipy import integrate

from shared.exceptions.domain_exceptions import InvalidInputError, QuadratureError
from shared.rng.streams import DOMAIN_SCALAR, seed_stream
from shared.stats.moments import MomentReport, RunningMoments
from scalar_processes.domain.entities import ComparisonTriple, PathKind, ScalarPath
from scalar_processes.domain.transforms import gbm_exact, gbm_moment

logger = structlog.get_logger(__name__)

QUADRATURE_TOLERANCE = 1e-10
NEWTON_MAX_ITER = 60
SUBLINEAR_TAU = 50.0
SUBLINEAR_ALPHA = 0.75

Stepper = Callable[[np.ndarray, float, np.ndarray], np.ndarray]


def uniform_grid(tau_end: float, dt: float) -> np.ndarray:
    """Grade 0, dt, 2dt, … com o último passo parcial terminando em tau_end."""
    if tau_end <= 0 or dt <= 0:
        raise InvalidInputError("tau_end e dt devem ser positivos.")
    n_full = int(math.floor(tau_end / dt + 1e-9))
    grid = np.arange(n_full + 1) * dt
    if tau_end - grid[-1] > 1e-9 * dt:
        grid = np.append(grid, tau_end)
    else:
        grid[-1] = tau_end
    return grid


def midpoint_R_step(R: np.ndarray, d_tau: float, dw: np.ndarray) -> np.ndarray:
    """Ponto médio para a forma de Stratonovich dR = ½R dτ + √(R² − 1)∘dw."""

    def drift_diffusion(x):
        return 0.5 * x * d_tau + np.sqrt((x - 1.0) * (x + 1.0)) * dw

    predictor = np.maximum(R + drift_diffusion(R), 1.0)
    midpoint = 0.5 * (R + predictor)
    return np.maximum(R + drift_diffusion(midpoint), 1.0)


def euler_bessel_step(X: np.ndarray, d_tau: float, dw: np.ndarray) -> np.ndarray:
    """dX = dτ/(2X) + dw, com reflexão em 0."""
    return np.abs(X + 0.5 * d_tau / X + dw)


def implicit_bessel_step(X: np.ndarray, d_tau: float, dw: np.ndarray) -> np.ndarray:
    """
    Drift implícito: X' = X + dw + dτ/(2X'), raiz positiva da quadrática.
    Sempre positivo e monótono em X + dw.
    """
    c = X + dw
    return 0.5 * (c + np.sqrt(c * c + 2.0 * d_tau))


def implicit_log_s_tilde_step(y: np.ndarray, d_tau: float, dw: np.ndarray) -> np.ndarray:
    """
    Drift implícito para d ln S̃ = ½ coth(ln S̃) dτ + dw.

    y' resolve g(u) = u − ½ coth(u) dτ − (y + dw) = 0. g é crescente e
    côncava em (0, ∞); Newton partindo da raiz do passo de Bessel
    (onde g ≤ 0, pois coth u ≥ 1/u) sobe monotonamente até a raiz.
    """
    c = y + dw
    u = implicit_bessel_step(np.zeros_like(c), d_tau, c)
    for _ in range(NEWTON_MAX_ITER):
        tanh_u = np.tanh(u)
        g = u - 0.5 * d_tau / tanh_u - c
        slope = 1.0 + 0.5 * d_tau * (1.0 - tanh_u**2) / tanh_u**2
        delta = g / slope
        u = u - delta
        if np.all(np.abs(delta) <= 1e-15 * np.maximum(1.0, u)):
            break
    return u


class ScalarProcessService:
    """Use Cases dos processos escalares."""

    def __init__(self, dt: float = 1e-3):
        if dt <= 0:
            raise InvalidInputError(f"dt deve ser positivo (recebido {dt!r}).")
        self.dt = dt

    def _rng(self, seed: int, stream_index: int) -> np.random.Generator:
        return seed_stream(seed, stream_index, domain=DOMAIN_SCALAR)

    def _integrate(
        self,
        step: Stepper,
        x0: np.ndarray,
        grid: np.ndarray,
        rng: np.random.Generator,
        keep_path: bool,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n_paths = x0.shape[0]
        x = x0.copy()
        if keep_path:
            values = np.empty((n_paths, len(grid)))
            values[:, 0] = x
            increments = np.empty((n_paths, len(grid) - 1))
        else:
            total_dw = np.zeros(n_paths)
        for k, d_tau in enumerate(np.diff(grid)):
            dw = rng.standard_normal(n_paths) * math.sqrt(d_tau)
            x = step(x, d_tau, dw)
            if keep_path:
                values[:, k + 1] = x
                increments[:, k] = dw
            else:
                total_dw += dw
        if keep_path:
            return grid, values, increments
        return (
            np.array([grid[0], grid[-1]]),
            np.stack([x0, x], axis=1),
            total_dw[:, None],
        )

    def _pack(self, taus, values, increments, seed, kind, n_paths) -> ScalarPath:
        if n_paths == 1:
            values, increments = values[0], increments[0]
        return ScalarPath(
            tau_grid=taus, values=values, driver_increments=increments, seed=seed, kind=kind
        )

    def simulate_R_scalar(
        self,
        tau_end: float,
        seed: int,
        n_paths: int = 1,
        stream_index: int = 0,
        keep_path: bool = True,
    ) -> ScalarPath:
        """
        dR = R dτ + √(R²−1) dw a partir de R = 1, integrado em y = arccosh R:
        pelo lema de Itô dy = ½ coth(y) dτ + dw, a mesma equação de ln S̃.
        Primeiro passo exato do Bessel, depois drift implícito; R = cosh y
        fica estritamente acima de 1 para τ > 0. Com keep_path=False guarda
        só os extremos.
        """
        grid = uniform_grid(tau_end, self.dt)
        taus, y, increments = self._from_first_step(
            implicit_log_s_tilde_step, grid, self._rng(seed, stream_index), n_paths, keep_path
        )
        values = np.maximum(np.cosh(y), 1.0)
        return self._pack(taus, values, increments, seed, PathKind.R, n_paths)

    def simulate_R_stratonovich(
        self,
        tau_end: float,
        seed: int,
        n_paths: int = 1,
        stream_index: int = 0,
        keep_path: bool = True,
    ) -> ScalarPath:
        grid = uniform_grid(tau_end, self.dt)
        taus, values, increments = self._integrate(
            midpoint_R_step, np.ones(n_paths), grid, self._rng(seed, stream_index), keep_path
        )
        return self._pack(taus, values, increments, seed, PathKind.R, n_paths)

    def _bessel_first_step(
        self, rng: np.random.Generator, n_paths: int, d_tau: float
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        X no primeiro passo: norma exata de um gaussiano 2D de variância
        d_tau por componente. O incremento de w é a primeira componente.
        """
        g = rng.standard_normal((n_paths, 2)) * math.sqrt(d_tau)
        return np.hypot(g[:, 0], g[:, 1]), g[:, 0]

    def _from_first_step(
        self,
        step: Stepper,
        grid: np.ndarray,
        rng: np.random.Generator,
        n_paths: int,
        keep_path: bool,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Caminho que parte de 0 pelo primeiro passo exato e segue com `step`."""
        x1, dw0 = self._bessel_first_step(rng, n_paths, grid[1] - grid[0])
        if len(grid) == 2:
            tail, increments = x1[:, None], np.zeros((n_paths, 0))
        else:
            _, tail, increments = self._integrate(step, x1, grid[1:], rng, keep_path)
        if keep_path:
            values = np.concatenate([np.zeros((n_paths, 1)), tail], axis=1)
            increments = np.concatenate([dw0[:, None], increments], axis=1)
            return grid, values, increments
        values = np.stack([np.zeros(n_paths), tail[:, -1]], axis=1)
        increments = (dw0 + increments.sum(axis=1))[:, None]
        return grid[[0, -1]], values, increments

    def simulate_bessel2d(
        self,
        tau_end: float,
        seed: int,
        n_paths: int = 1,
        stream_index: int = 0,
        keep_path: bool = True,
        implicit: bool = False,
    ) -> ScalarPath:
        """
        Bessel 2D: primeiro passo exato (lei de Rayleigh), depois
        Euler–Maruyama com reflexão em 0 (ou drift implícito).
        """
        grid = uniform_grid(tau_end, self.dt)
        step = implicit_bessel_step if implicit else euler_bessel_step
        taus, values, increments = self._from_first_step(
            step, grid, self._rng(seed, stream_index), n_paths, keep_path
        )
        return self._pack(taus, values, increments, seed, PathKind.X, n_paths)

    def simulate_comparison_triple(
        self, tau_end: float, seed: int, n_paths: int = 1, stream_index: int = 0
    ) -> ComparisonTriple:
        """
        S̃, S e X com o mesmo w.

        ln S̃ começa do primeiro passo exato de X (ln S̃ := X₁); depois S̃ e X
        usam drift implícito, que preserva ln S̃ ≥ X e S̃ ≥ S passo a passo.
        S integra exatamente: ln S = τ/2 + w.
        """
        grid = uniform_grid(tau_end, self.dt)
        rng = self._rng(seed, stream_index)
        n_steps = len(grid) - 1
        x = np.zeros((n_paths, n_steps + 1))
        y = np.zeros((n_paths, n_steps + 1))
        dws = np.empty((n_paths, n_steps))

        x[:, 1], dws[:, 0] = self._bessel_first_step(rng, n_paths, grid[1] - grid[0])
        y[:, 1] = x[:, 1]
        for k in range(1, n_steps):
            d_tau = grid[k + 1] - grid[k]
            dw = rng.standard_normal(n_paths) * math.sqrt(d_tau)
            dws[:, k] = dw
            x[:, k + 1] = implicit_bessel_step(x[:, k], d_tau, dw)
            y[:, k + 1] = implicit_log_s_tilde_step(y[:, k], d_tau, dw)

        w = np.concatenate([np.zeros((n_paths, 1)), np.cumsum(dws, axis=1)], axis=1)
        s = gbm_exact(np.broadcast_to(grid, w.shape), w)
        squeeze = (lambda a: a[0]) if n_paths == 1 else (lambda a: a)
        shared = squeeze(dws)
        logger.debug("comparison_triple_simulated", n_paths=n_paths, tau_end=tau_end)
        return ComparisonTriple(
            s_tilde=ScalarPath(grid, squeeze(np.exp(y)), shared, seed, PathKind.S_TILDE),
            s=ScalarPath(grid, squeeze(s), shared, seed, PathKind.S),
            x=ScalarPath(grid, squeeze(x), shared, seed, PathKind.X),
        )

    def r_mass_concentration_mc(
        self,
        tau: float,
        n_paths: int,
        seed: int,
        R_samples: Optional[np.ndarray] = None,
        stream_index: int = 0,
    ) -> RunningMoments:
        """
        Amostras de R·I(R ≥ ½(ER)^{3/2})/ER com ER = e^τ.
        Sem `R_samples`, usa caminhos escalares de R.
        """
        if tau <= 0:
            raise InvalidInputError("tau deve ser positivo.")
        if R_samples is None:
            R_samples = self.simulate_R_scalar(
                tau, seed, n_paths=n_paths, stream_index=stream_index, keep_path=False
            ).terminal
        mean_R = math.exp(tau)
        threshold = 0.5 * mean_R**1.5
        moments = RunningMoments()
        moments.update_batch(np.where(R_samples >= threshold, R_samples, 0.0) / mean_R)
        return moments


def paths_at_one(tau_grid, values, tau_min: float) -> int:
    """Quantos caminhos de R valem exatamente 1 em algum τ ≥ tau_min."""
    taus = np.asarray(tau_grid, dtype=float)
    window = np.atleast_2d(values)[:, taus >= tau_min]
    return int(np.count_nonzero(np.any(window == 1.0, axis=1)))


def mass_concentration_quadrature(tau: float) -> float:
    """
    E[S·I(S ≥ (ES)^{3/2})]/ES por quadratura da densidade lognormal.
    Vale ½ para todo τ.
    """
    if tau <= 0:
        raise InvalidInputError("tau deve ser positivo.")
    norm = math.sqrt(2.0 * math.pi * tau)

    def integrand(w):
        return math.exp(-0.5 * tau + w - w * w / (2.0 * tau)) / norm

    value, error = integrate.quad(integrand, tau, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    if error > QUADRATURE_TOLERANCE:
        logger.error("quadrature_failed", what="mass_concentration", error=error, tau=tau)
        raise QuadratureError("mass_concentration", error)
    return value


def gbm_moment_quadrature(p: float, tau: float) -> float:
    """
    E S_τ^p integrando e^{p(τ/2 + w)} contra N(0, τ), em variável
    centrada no pico do integrando.
    """
    if tau < 0:
        raise InvalidInputError("gbm_moment_quadrature exige τ ≥ 0.")
    if tau == 0:
        return 1.0
    root = math.sqrt(tau)

    def integrand(z):
        w = p * tau + root * z
        return math.exp(p * (0.5 * tau + w) - w * w / (2.0 * tau)) / math.sqrt(2.0 * math.pi)

    value, error = integrate.quad(integrand, -np.inf, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    if error > QUADRATURE_TOLERANCE * max(1.0, value):
        raise QuadratureError("gbm_moment", error)
    return value


def mass_concentration_mc(tau: float, n: int, rng: np.random.Generator) -> RunningMoments:
    """Contraparte Monte Carlo da concentração de massa com S lognormal exato."""
    w = rng.standard_normal(n) * math.sqrt(tau)
    S = gbm_exact(tau, w)
    mean_S = math.exp(tau)
    moments = RunningMoments()
    moments.update_batch(np.where(S >= mean_S**1.5, S, 0.0) / mean_S)
    return moments


def sublinear_growth_fraction(
    n: int,
    rng: np.random.Generator,
    tau: float = SUBLINEAR_TAU,
    alpha: float = SUBLINEAR_ALPHA,
    gate: float = 0.9,
) -> MomentReport:
    """Fração de caminhos com S_τ ≤ e^{ατ} (diagnóstico, não bloqueia)."""
    w = rng.standard_normal(n) * math.sqrt(tau)
    below = (gbm_exact(tau, w) <= math.exp(alpha * tau)).astype(float)
    moments = RunningMoments()
    moments.update_batch(below)
    report = MomentReport.from_moments(
        "sublinear_growth_fraction",
        moments,
        provenance="S_τ exato; comparação com e^{ατ}",
        gating=False,
    )
    report.details.update({"tau": tau, "alpha": alpha, "gate": gate})
    return report.require(moments.mean >= gate, f"fração ≥ {gate}")


def gbm_moment_mc(p: float, tau: float, n: int, rng: np.random.Generator) -> RunningMoments:
    w = rng.standard_normal(n) * math.sqrt(tau)
    moments = RunningMoments()
    moments.update_batch(gbm_exact(tau, w) ** p)
    return moments


def moment_domination(
    tau: float,
    p: int,
    R_moments: RunningMoments,
    rng: np.random.Generator,
    z_gate: float = 3.0,
) -> tuple[MomentReport, MomentReport]:
    """
    E R^p (caminhos matriciais, já acumulados em `R_moments`) contra E S^p
    com o mesmo número de amostras de S exato.
    """
    S_moments = gbm_moment_mc(p, tau, R_moments.n, rng)
    report_S = MomentReport.from_moments(
        f"gbm_moment_p{p}", S_moments, reference=gbm_moment(p, tau), z_gate=z_gate
    )
    margin = z_gate * math.hypot(R_moments.std_error, S_moments.std_error)
    report_R = MomentReport.from_moments(f"moment_domination_p{p}", R_moments)
    report_R.details.update({"E_S_p": S_moments.mean, "margin": margin, "tau": tau})
    report_R.require(R_moments.mean <= S_moments.mean + margin, "E R^p ≤ E S^p + margem")
    return report_R, report_S
