"""Smooth cutoffs η and η_t, and the ℓ¹ bounds of their inverse transforms.

η = 1_[-3/8, 3/8] * ρ with ρ a normalized C^∞ bump on [-1/8, 1/8], so η is
exactly 1 on |x| <= 1/4 and exactly 0 on |x| >= 1/2.  The bump's CDF is
evaluated with 64-point Gauss-Legendre quadrature (error ~1e-15).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pvlab.errors import DomainError, ResolutionError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _bump(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def _bump_integral(u: np.ndarray) -> np.ndarray:
    """∫_{-1}^{u} bump for u in [-1, 0]."""
    half = (u + 1.0) / 2.0
    nodes = half[:, None] * _GL_X[None, :] + (u[:, None] - 1.0) / 2.0
    return half * (_bump(nodes) @ _GL_W)


_BUMP_MASS = 2.0 * float(_bump_integral(np.zeros(1))[0])


def bump_cdf(u) -> np.ndarray:
    """Normalized CDF of the standard bump on [-1, 1]."""
    u = np.clip(np.asarray(u, dtype=np.float64), -1.0, 1.0)
    out = np.empty_like(u)
    neg = u <= 0.0
    out[neg] = _bump_integral(u[neg]) / _BUMP_MASS
    out[~neg] = 1.0 - _bump_integral(-u[~neg]) / _BUMP_MASS
    return out


@dataclass(frozen=True)
class Cutoff:
    """η_t(ξ) = η(2π D^{t+2} ξ).  The theory wants D > 32; D = 2 is the desk default."""

    D: float = 2.0

    def __post_init__(self):
        if not self.D > 1.0:
            raise DomainError(f"D must exceed 1, got {self.D}")

    def eta(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        ax = np.abs(x)
        out[ax <= 0.25] = 1.0
        mid = (ax > 0.25) & (ax < 0.5)
        if mid.any():
            # 1 - cdf(s) = cdf(-s); the latter keeps the far tail from rounding to 0
            out[mid] = bump_cdf(-8.0 * (ax[mid] - 0.375))
        return float(out[0]) if scalar else out

    def scale(self, t: int) -> float:
        return 2.0 * math.pi * self.D ** (t + 2)

    def support_radius(self, t: int) -> float:
        """η_t vanishes for |ξ| >= (4π D^{t+2})^{-1}."""
        return 0.5 / self.scale(t)

    def plateau_radius(self, t: int) -> float:
        return 0.25 / self.scale(t)

    def eta_t(self, t: int, xi):
        if t < 0:
            raise DomainError(f"level must be >= 0, got {t}")
        return self.eta(self.scale(t) * np.asarray(xi, dtype=np.float64))


def default_grid_size(cutoff: Cutoff, t: int, cells: int = 1024) -> int:
    """Smallest power of two putting ``cells`` grid points across supp η_t."""
    need = cells / (2.0 * cutoff.support_radius(t))
    return 1 << max(4, math.ceil(math.log2(need)))


def lemma21_check(cutoff: Cutoff, t: int, u: float, J: int | None = None) -> tuple[float, float]:
    """ℓ¹ norms of the Fourier coefficients of η_t and of (1 - e(ξu)) η_t.

    Coefficients ∫_𝕋 e(-ξj) g(ξ) dξ are computed for |j| <= J/2 by the
    J-point trapezoid rule (one FFT), which is spectrally accurate for the
    smooth periodic integrands here.
    """
    if J is None:
        J = default_grid_size(cutoff, t)
    if J < 2:
        raise DomainError("grid size must be at least 2")
    width_cells = 2.0 * cutoff.support_radius(t) * J
    if width_cells < 4.0:
        raise ResolutionError(
            f"supp η_{t} spans {width_cells:.2f} of {J} grid cells; need at least 4"
        )
    k = np.arange(J)
    # grid point k/J represented in [-1/2, 1/2)
    xi = np.where(k < J - J // 2, k, k - J) / J
    vals = cutoff.eta_t(t, xi)
    c0 = np.fft.fft(vals) / J
    c1 = np.fft.fft(vals * (1.0 - np.exp(2j * np.pi * xi * u))) / J
    return float(np.abs(c0).sum()), float(np.abs(c1).sum())
