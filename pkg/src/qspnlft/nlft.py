"""Forward nonlinear Fourier transform on SU(2).

Internally a pair is held as two coefficient vectors over powers 0..n-1:
``astar`` (the polynomial a*) and ``b`` (b shifted to start at power 0).
Keeping a* instead of a avoids negative powers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .poly import LaurentPoly, fft_convolve, laurent_eval_grid, laurent_star, next_pow2

LEAF = 16


@dataclass(frozen=True)
class GammaSeq:
    """Compactly supported complex sequence gamma_offset, gamma_offset+1, ..."""

    values: np.ndarray
    offset: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("gamma entries must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "offset", int(self.offset))

    def __len__(self):
        return len(self.values)

    def to_dict(self) -> dict:
        return {
            "offset": self.offset,
            "re": [float(x) for x in self.values.real],
            "im": [float(x) for x in self.values.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GammaSeq":
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        return cls(re + 1j * im, int(data.get("offset", 0)))


@dataclass(frozen=True)
class NlftPair:
    """(a, b) with a a* + b b* = 1 on the circle once validated."""

    a: LaurentPoly
    b: LaurentPoly
    validated: bool = False

    @property
    def astar(self) -> LaurentPoly:
        return laurent_star(self.a)

    @property
    def degree(self) -> int:
        return max(-self.a.min_power, self.b.max_power - self.b.min_power, 0)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, int]:
        """(astar, b, offset) as dense vectors over powers 0..d (b relative to offset)."""
        offset = self.b.min_power
        d = max(-self.a.min_power, self.b.max_power - offset, 0)
        astar = laurent_star(self.a).to_range(0, d)
        b = self.b.to_range(offset, offset + d)
        return astar, b, offset

    @classmethod
    def from_arrays(cls, astar: np.ndarray, b: np.ndarray, offset: int = 0) -> "NlftPair":
        a = laurent_star(LaurentPoly(0, astar))
        return cls(a, LaurentPoly(offset, b))

    def to_dict(self) -> dict:
        return {"a": self.a.to_dict(), "b": self.b.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "NlftPair":
        return cls(LaurentPoly.from_dict(data["a"]), LaurentPoly.from_dict(data["b"]))


def _direct_arrays(g: np.ndarray, normalize: bool = True):
    """Left-to-right product of the factors [[1, g_t z^t], [-conj(g_t) z^-t, 1]]."""
    n = len(g)
    astar = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    astar[0] = 1.0
    for t, gt in enumerate(g):
        if gt == 0:
            continue
        old = astar[: t + 1].copy()
        astar[1 : t + 1] -= gt * np.conj(b[:t][::-1])
        b[: t + 1] += gt * np.conj(old[::-1])
    if normalize:
        scale = np.prod(1.0 / np.sqrt(1.0 + np.abs(g) ** 2))
        astar *= scale
        b *= scale
    return astar, b


def _combine(as1, b1, as2, b2, m):
    """NLFT of a concatenation: left block of length m times the right block shifted by z^m."""
    n = m + len(as2)
    astar = np.zeros(n, dtype=complex)
    b = np.zeros(n, dtype=complex)
    a1 = np.conj(as1[::-1])  # a1 over powers -(m-1)..0
    b1s = np.conj(b1[::-1])  # b1* over powers -(m-1)..0
    astar[: n - 1] += fft_convolve(as1, as2)
    astar[1:] -= fft_convolve(b1s, b2)
    b[1:] += fft_convolve(a1, b2)
    b[: n - 1] += fft_convolve(b1, as2)
    return astar, b


def _fast_arrays(g: np.ndarray):
    n = len(g)
    if n <= LEAF:
        return _direct_arrays(g)
    m = (n + 1) // 2
    as1, b1 = _fast_arrays(g[:m])
    as2, b2 = _fast_arrays(g[m:])
    return _combine(as1, b1, as2, b2, m)


def _to_pair(astar, b, offset):
    return NlftPair(laurent_star(LaurentPoly(0, astar)), LaurentPoly(offset, b))


def _as_gamma(gamma) -> GammaSeq:
    return gamma if isinstance(gamma, GammaSeq) else GammaSeq(gamma)


def nlft_direct(gamma: GammaSeq) -> NlftPair:
    """O(d^2) sequential product of the elementary SU(2) factors."""
    gamma = _as_gamma(gamma)
    astar, b = _direct_arrays(np.asarray(gamma.values))
    return _to_pair(astar, b, gamma.offset)


def nlft_fast(gamma: GammaSeq) -> NlftPair:
    """Divide-and-conquer NLFT with FFT polynomial products, O(d log^2 d)."""
    gamma = _as_gamma(gamma)
    astar, b = _fast_arrays(np.asarray(gamma.values))
    return _to_pair(astar, b, gamma.offset)


@dataclass(frozen=True)
class PairDiagnostics:
    residual: float
    astar0: complex
    band_violation: float
    valid: bool
    pair: NlftPair


def validate_pair(p: NlftPair, tol: float = 1e-10, N: int | None = None) -> PairDiagnostics:
    """Grid check of a a* + b b* = 1, a*(0) > 0 and a supported on nonpositive powers."""
    span = max(p.a.span, p.b.span, 1)
    N = N or next_pow2(max(4 * (span + 1), 1024))
    av = laurent_eval_grid(p.a, N).samples
    bv = laurent_eval_grid(p.b, N).samples
    residual = float(np.max(np.abs(np.abs(av) ** 2 + np.abs(bv) ** 2 - 1.0)))
    astar0 = np.conj(p.a.coeff(0))
    pos = p.a.coeffs[p.a.min_power + np.arange(len(p.a.coeffs)) > 0]
    band = float(np.max(np.abs(pos), initial=0.0))
    ok = residual <= tol and band <= tol and astar0.real > 0 and abs(astar0.imag) <= tol
    return PairDiagnostics(residual, complex(astar0), band, bool(ok), replace(p, validated=bool(ok)))
