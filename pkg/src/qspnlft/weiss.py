"""Complementary polynomial a for a given b via the Weiss construction.

R = log sqrt(1 - |b|^2) on a circle grid, G = R - i H(R), a = exp(G); the
Fourier coefficients of a are then cut to the band of powers -d..0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GapTooSmall, NonConvergent, QSPError
from .poly import (
    LaurentPoly,
    UnitCircleGrid,
    grid_coefficients,
    laurent_eval_grid,
    laurent_star,
    next_pow2,
)

GAP_FLOOR = 1e-12
CLAMP = 1.0 - 1e-14
MAX_GRID = 1 << 24
GRID_CONSTANT = 8


def hilbert_transform_grid(g: UnitCircleGrid) -> UnitCircleGrid:
    """Fourier multiplier -i sign(n) on real grid samples."""
    samples = np.asarray(g.samples)
    if np.iscomplexobj(samples) and np.max(np.abs(samples.imag), initial=0.0) > 0:
        raise ValueError("Hilbert transform input must be real")
    N = g.size
    spec = np.fft.fft(samples.real)
    freq = np.fft.fftfreq(N, 1.0 / N)
    mult = -1j * np.sign(freq)
    if N % 2 == 0:
        mult[N // 2] = 0.0  # Nyquist mode has no definite sign
    return UnitCircleGrid(np.real(np.fft.ifft(spec * mult)))


def auto_grid_size(d: int, eta: float, eps: float) -> int:
    d = max(d, 1)
    ratio = d / eta
    n = GRID_CONSTANT * ratio * max(math.log2(ratio / eps), 1.0)
    return next_pow2(max(n, 4 * (d + 1), 64))


@dataclass(frozen=True)
class WeissConfig:
    eps: float = 1e-12
    N: int | None = None
    eta: float | None = None
    max_grid: int = MAX_GRID


@dataclass(frozen=True)
class ComplementOutput:
    a: LaurentPoly
    astar: LaurentPoly
    residual: float
    N: int
    eta: float
    out_of_band: float

    def to_dict(self) -> dict:
        return {
            "a": self.a.to_dict(),
            "astar": self.astar.to_dict(),
            "residual": self.residual,
            "N": self.N,
        }


def _b_degree(b: LaurentPoly) -> int:
    if b.min_power < 0:
        raise QSPError("Weiss construction expects b with nonnegative powers only")
    return b.max_power


def complement_residual(a: LaurentPoly, b: LaurentPoly, N: int | None = None) -> float:
    """max_j |a a* + b b* - 1| at N circle points."""
    span = max(a.span, b.max_power - min(b.min_power, 0), 1)
    N = N or next_pow2(max(8 * (span + 1), 1024))
    av = laurent_eval_grid(a, N).samples
    bv = laurent_eval_grid(b, N).samples
    return float(np.max(np.abs(np.abs(av) ** 2 + np.abs(bv) ** 2 - 1.0)))


def _complement_on_grid(b: LaurentPoly, d: int, N: int):
    bv = laurent_eval_grid(b, N).samples
    mag2 = np.minimum(np.abs(bv) ** 2, CLAMP)
    R = 0.5 * np.log1p(-mag2)
    H = hilbert_transform_grid(UnitCircleGrid(R)).samples
    avals = np.exp(R - 1j * H)
    spec = grid_coefficients(avals)
    powers = np.arange(-d, 1)
    band = spec[powers % N]
    total = np.sqrt(np.sum(np.abs(spec) ** 2))
    inband = np.sqrt(np.sum(np.abs(band) ** 2))
    out_of_band = float(np.sqrt(max(total**2 - inband**2, 0.0)))
    return LaurentPoly(-d, band), out_of_band


def weiss_complement(b: LaurentPoly, cfg: WeissConfig | None = None) -> ComplementOutput:
    """Laurent polynomial a (powers -d..0) with a a* + b b* = 1, a* outer, a*(0) > 0."""
    cfg = cfg or WeissConfig()
    d = _b_degree(b)
    probe = next_pow2(max(16 * (d + 1), 4096))
    sup_b = float(np.max(np.abs(laurent_eval_grid(b, probe).samples)))
    if sup_b > 1.0 - GAP_FLOOR:
        raise GapTooSmall(f"sup |b| = {sup_b:.15g} leaves no usable gap below 1", stage="weiss")
    eta = cfg.eta if cfg.eta is not None else 1.0 - sup_b
    # the asymptotic bound is pessimistic for small eta; the residual check decides
    N = cfg.N or min(auto_grid_size(d, eta, cfg.eps), cfg.max_grid)

    while True:
        a, oob = _complement_on_grid(b, d, N)
        # the true a has real-positive constant term; kill roundoff in its phase
        a0 = a.coeffs[-1]
        a = LaurentPoly(a.min_power, np.concatenate([a.coeffs[:-1], [abs(a0)]]))
        res = complement_residual(a, b)
        if res <= cfg.eps:
            return ComplementOutput(a, laurent_star(a), res, N, eta, oob)
        if 2 * N > cfg.max_grid:
            raise NonConvergent(
                f"Weiss residual {res:.3e} above {cfg.eps:.1e} at grid cap {N}", stage="weiss"
            )
        N *= 2


def ratio_coeffs(b: LaurentPoly, a: LaurentPoly, d: int | None = None, N: int | None = None) -> np.ndarray:
    """Coefficients c_0..c_d of the Laurent expansion of b/a (grid division + FFT)."""
    if d is None:
        d = max(b.max_power, -a.min_power)
    N = N or next_pow2(max(64 * (d + 1), 4096))
    av = laurent_eval_grid(a, N).samples
    small = np.min(np.abs(av))
    if small < 1e-13:
        raise QSPError(f"|a| = {small:.2e} on the grid; b/a is not resolvable", stage="ratio")
    bv = laurent_eval_grid(b, N).samples
    spec = grid_coefficients(bv / av)
    return spec[: d + 1].copy()


def project_imaginary(c: np.ndarray) -> tuple[np.ndarray, float]:
    """Zero the real parts; also return the largest real part that was dropped."""
    c = np.asarray(c, dtype=complex)
    return 1j * c.imag, float(np.max(np.abs(c.real), initial=0.0))
