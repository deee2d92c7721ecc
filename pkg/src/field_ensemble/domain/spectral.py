"""
Utilidades da rede de Fourier do toro [0, Λ)².

Os modos são indexados por inteiros m = (m_x, m_y), com k = Δk·m e
Δk = 2π/Λ. Só os representantes do semiplano (m_y > 0, ou m_y = 0 e
m_x > 0) são guardados; o modo −m é o conjugado.
"""

import math

import numpy as np

# Bits de mantissa mantidos na amplitude de cada modo. Com |m| < 2⁹,
# os produtos m_x·(m_y·t) e m_y·(m_x·t) ficam exatos e a divergência
# espectral cancela bit a bit.
AMPLITUDE_BITS = 35
MAX_EXACT_INDEX = 2**9


def mode_spacing(torus_side: float) -> float:
    return 2.0 * math.pi / torus_side


def half_plane_modes(torus_side: float, k_min: float, k_max: float) -> np.ndarray:
    """
    Índices (m, 2) dos representantes do semiplano com k_min ≤ |k| ≤ k_max,
    em ordem canônica (m_y crescente, depois m_x crescente).
    """
    dk = mode_spacing(torus_side)
    reach = int(math.floor(k_max / dk + 1e-9))
    mx, my = np.meshgrid(np.arange(-reach, reach + 1), np.arange(0, reach + 1), indexing="xy")
    mx, my = mx.ravel(), my.ravel()
    half = (my > 0) | ((my == 0) & (mx > 0))
    norm = dk * np.hypot(mx, my)
    band = (norm <= k_max * (1 + 1e-12)) & (norm >= k_min * (1 - 1e-12))
    keep = half & band
    return np.stack([mx[keep], my[keep]], axis=1)


def quantize(values: np.ndarray, bits: int = AMPLITUDE_BITS) -> np.ndarray:
    """Arredonda a mantissa (partes real e imaginária) para `bits` bits."""

    def _round(x):
        mantissa, exponent = np.frexp(x)
        return np.ldexp(np.round(np.ldexp(mantissa, bits)), exponent - bits)

    values = np.asarray(values)
    if np.iscomplexobj(values):
        return _round(values.real) + 1j * _round(values.imag)
    return _round(values)


def grid_wavenumbers(torus_side: float, grid_n: int) -> tuple[np.ndarray, np.ndarray]:
    """KX, KY (N, N) na ordem do np.fft, eixo 0 ↔ x."""
    spacing = torus_side / grid_n
    k = 2.0 * math.pi * np.fft.fftfreq(grid_n, d=spacing)
    return np.meshgrid(k, k, indexing="ij")


def dealias_mask(grid_n: int) -> np.ndarray:
    """Regra dos 2/3 (disco |m| ≤ N/3)."""
    m = np.fft.fftfreq(grid_n, d=1.0 / grid_n)
    mx, my = np.meshgrid(m, m, indexing="ij")
    return mx * mx + my * my <= (grid_n / 3.0) ** 2


def scatter_to_grid(modes: np.ndarray, values: np.ndarray, grid_n: int) -> np.ndarray:
    """
    Espalha coeficientes do semiplano (m, …) numa grade completa (…, N, N)
    com simetria hermitiana; a grade resultante é o espectro de um campo real.
    """
    values = np.asarray(values)
    trailing = values.shape[1:]
    grid = np.zeros(trailing + (grid_n, grid_n), dtype=complex)
    ix, iy = modes[:, 0] % grid_n, modes[:, 1] % grid_n
    jx, jy = (-modes[:, 0]) % grid_n, (-modes[:, 1]) % grid_n
    moved = np.moveaxis(values, 0, -1)
    grid[..., ix, iy] = moved
    grid[..., jx, jy] = np.conj(moved)
    return grid


def to_real_space(spectrum: np.ndarray) -> np.ndarray:
    """Σ_k ĉ_k e^{ik·x} nos pontos da grade (ĉ sem o fator N²)."""
    n = spectrum.shape[-1]
    return np.real(np.fft.ifft2(spectrum, axes=(-2, -1))) * (n * n)


def to_spectrum(values: np.ndarray) -> np.ndarray:
    """Inversa de to_real_space."""
    n = values.shape[-1]
    return np.fft.fft2(values, axes=(-2, -1)) / (n * n)
