"""
Testes de distribuição (Kolmogorov–Smirnov) e de correlação.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n_a: int
    n_b: int = 0

    def passes(self, alpha: float = 0.01) -> bool:
        return self.p_value > alpha


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> KsResult:
    """KS de duas amostras (scipy.stats.ks_2samp, bilateral, modo exato/assintótico automático)."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    result = stats.ks_2samp(a, b)
    return KsResult(float(result.statistic), float(result.pvalue), a.size, b.size)


def ks_rayleigh(samples: np.ndarray, scale: float) -> KsResult:
    """KS de uma amostra contra Rayleigh(scale)."""
    samples = np.asarray(samples, dtype=float).ravel()
    result = stats.kstest(samples, "rayleigh", args=(0.0, scale))
    return KsResult(float(result.statistic), float(result.pvalue), samples.size)


def correlation_z(a: np.ndarray, b: np.ndarray) -> float:
    """
    z da correlação de Pearson sob independência: r·√n.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n = min(a.size, b.size)
    r = float(np.corrcoef(a[:n], b[:n])[0, 1])
    return r * math.sqrt(n)


def covariance_with_errors(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Covariância amostral (d×d) de amostras centradas em zero conhecido
    e o erro-padrão de cada entrada.

    Para média conhecida nula, a entrada (i, j) é a média de x_i·x_j;
    o erro-padrão é o desvio de x_i·x_j dividido por √n.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    products = samples[:, :, None] * samples[:, None, :]
    cov = products.mean(axis=0)
    se = products.std(axis=0, ddof=1) / math.sqrt(n)
    return cov, se
