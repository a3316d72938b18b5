"""Chebyshev and Laurent polynomial arithmetic.

Everything that touches the unit circle goes through one FFT kernel:
coefficient/sample transforms, fast multiplication and the discrete cosine
identity used for Chebyshev interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NormError, ParityError

PARITIES = ("even", "odd", "none")

# wrong-parity coefficients below this are interpolation noise
PARITY_TOL = 1e-10
TRIM_TOL = 1e-15


def next_pow2(n: int) -> int:
    """Smallest power of two that is >= n (and >= 1)."""
    n = max(int(n), 1)
    return 1 << (n - 1).bit_length()


def is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def fft_convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Linear convolution of two coefficient vectors via a radix-2 FFT."""
    n = len(x) + len(y) - 1
    if n <= 0:
        return np.zeros(0, dtype=complex)
    size = next_pow2(n)
    out = np.fft.ifft(np.fft.fft(x, size) * np.fft.fft(y, size))
    return out[:n]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Chebyshev basis
# ---------------------------------------------------------------------------


def _parity_mask(n: int, parity: str) -> np.ndarray:
    """Boolean mask of coefficient indices forbidden by ``parity``."""
    k = np.arange(n)
    if parity == "even":
        return k % 2 == 1
    if parity == "odd":
        return k % 2 == 0
    return np.zeros(n, dtype=bool)


@dataclass(frozen=True)
class ChebPoly:
    """Real polynomial sum_k coeffs[k] T_k(x) with declared parity."""

    coeffs: np.ndarray
    parity: str = "none"

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise ValueError(f"unknown parity {self.parity!r}")
        c = np.asarray(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("Chebyshev coefficients must be finite")
        if np.any(c[_parity_mask(c.size, self.parity)] != 0.0):
            raise ParityError(f"coefficients violate declared {self.parity} parity")
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return cheb_eval(self, x)

    def scaled(self, factor: float) -> "ChebPoly":
        return ChebPoly(self.coeffs * factor, self.parity)

    def reduced(self) -> np.ndarray:
        """Coefficients of the parity-matching terms only (T_0, T_2, ... or T_1, T_3, ...)."""
        start = 1 if self.parity == "odd" else 0
        step = 1 if self.parity == "none" else 2
        return self.coeffs[start::step].copy()

    def to_dict(self) -> dict:
        return {"parity": self.parity, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> "ChebPoly":
        return cls(np.asarray(data["coeffs"], dtype=float), data.get("parity", "none"))

    @classmethod
    def from_reduced(cls, values, parity: str) -> "ChebPoly":
        """Inverse of :meth:`reduced` for a definite parity."""
        values = np.asarray(values, dtype=float)
        n = len(values)
        if parity == "even":
            c = np.zeros(max(2 * n - 1, 1))
            c[0::2] = values
        elif parity == "odd":
            c = np.zeros(2 * n)
            c[1::2] = values
        else:
            raise ValueError("from_reduced needs a definite parity")
        return cls(c, parity)


def cheb_nodes(n: int) -> np.ndarray:
    """First-kind Chebyshev nodes cos(pi (j + 1/2) / n), j = 0..n-1 (descending)."""
    j = np.arange(n)
    return np.cos(np.pi * (j + 0.5) / n)


def cheb_coeffs_from_nodes(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients of the degree n-1 interpolant through first-kind nodes.

    Uses the even extension of the nodal values so the discrete cosine sum
    becomes one FFT of length 2n.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    ext = np.concatenate([values, values[::-1]])
    spec = np.fft.fft(ext)[:n]
    k = np.arange(n)
    c = np.real(np.exp(-1j * np.pi * k / (2 * n)) * spec) / n
    c[0] /= 2
    return c


def enforce_parity(coeffs: np.ndarray, parity: str, tol: float = PARITY_TOL) -> np.ndarray:
    """Zero coefficients of the wrong parity, refusing if any is larger than ``tol``."""
    coeffs = np.array(coeffs, dtype=float)
    mask = _parity_mask(len(coeffs), parity)
    worst = np.max(np.abs(coeffs[mask]), initial=0.0)
    if worst > tol:
        raise ParityError(
            f"wrong-parity Chebyshev coefficient of size {worst:.3e} exceeds {tol:.0e} for {parity} parity"
        )
    coeffs[mask] = 0.0
    return coeffs


def cheb_interpolate(f: Callable, d: int, parity: str | None = None) -> ChebPoly:
    """Degree-d Chebyshev interpolant of ``f`` at d+1 first-kind nodes."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    parity = parity or "none"
    x = cheb_nodes(d + 1)
    values = np.asarray(f(x), dtype=float) * np.ones_like(x)
    if not np.all(np.isfinite(values)):
        raise ValueError("target function returned non-finite samples")
    c = cheb_coeffs_from_nodes(values)
    if parity != "none":
        c = enforce_parity(c, parity)
    return ChebPoly(c, parity)


def cheb_eval(p: ChebPoly, x):
    """Clenshaw evaluation of a Chebyshev series; vectorized over ``x``."""
    c = p.coeffs if isinstance(p, ChebPoly) else np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for ck in c[:0:-1]:
        b1, b2 = 2.0 * x * b1 - b2 + ck, b1
    out = x * b1 - b2 + c[0]
    return out if out.ndim else float(out)


def sup_norm(p: ChebPoly, n: int | None = None) -> float:
    """max |p| on a dense grid of [-1, 1] (uniform in arccos, endpoints included)."""
    n = n or max(4096, 8 * (p.degree + 1))
    x = np.cos(np.linspace(0.0, np.pi, n))
    return float(np.max(np.abs(cheb_eval(p, x))))


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentPoly:
    """sum_j coeffs[j] z^(min_power + j)."""

    min_power: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        object.__setattr__(self, "min_power", int(self.min_power))
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def constant(cls, value) -> "LaurentPoly":
        return cls(0, [value])

    @classmethod
    def monomial(cls, power: int, value=1.0) -> "LaurentPoly":
        return cls(power, [value])

    @property
    def max_power(self) -> int:
        return self.min_power + len(self.coeffs) - 1

    @property
    def span(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, power: int) -> complex:
        i = power - self.min_power
        if 0 <= i < len(self.coeffs):
            return complex(self.coeffs[i])
        return 0j

    def to_range(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients of powers lo..hi as a dense vector (zero-filled)."""
        out = np.zeros(hi - lo + 1, dtype=complex)
        src_lo = max(lo, self.min_power)
        src_hi = min(hi, self.max_power)
        if src_lo <= src_hi:
            out[src_lo - lo : src_hi - lo + 1] = self.coeffs[src_lo - self.min_power : src_hi - self.min_power + 1]
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        # Horner in z, then the z^min_power factor
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc * z ** self.min_power

    def trim(self, rel_tol: float = TRIM_TOL) -> "LaurentPoly":
        """Canonical form: drop edge coefficients below rel_tol * max |coeff|."""
        mag = np.abs(self.coeffs)
        big = mag > rel_tol * mag.max() if mag.max() > 0 else np.zeros_like(mag, dtype=bool)
        if not big.any():
            return LaurentPoly(0, [0.0])
        idx = np.flatnonzero(big)
        return LaurentPoly(self.min_power + idx[0], self.coeffs[idx[0] : idx[-1] + 1])

    def star(self) -> "LaurentPoly":
        return laurent_star(self)

    def shift(self, s: int) -> "LaurentPoly":
        """Multiply by z^s."""
        return LaurentPoly(self.min_power + s, self.coeffs)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return laurent_mul(self, other)
        return LaurentPoly(self.min_power, self.coeffs * other)

    def __rmul__(self, other):
        return LaurentPoly(self.min_power, self.coeffs * other)

    def __truediv__(self, other):
        return LaurentPoly(self.min_power, self.coeffs / other)

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        lo = min(self.min_power, other.min_power)
        hi = max(self.max_power, other.max_power)
        return LaurentPoly(lo, self.to_range(lo, hi) + other.to_range(lo, hi))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.min_power, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def to_dict(self) -> dict:
        return {
            "min_power": self.min_power,
            "re": [float(c) for c in self.coeffs.real],
            "im": [float(c) for c in self.coeffs.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LaurentPoly":
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        return cls(int(data["min_power"]), re + 1j * im)


def laurent_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Exact product; the power ranges add."""
    return LaurentPoly(p.min_power + q.min_power, fft_convolve(p.coeffs, q.coeffs))


def laurent_star(p: LaurentPoly) -> LaurentPoly:
    """p*(z) = conj(p(1 / conj z)): coefficient of z^k becomes conj of coefficient of z^-k."""
    return LaurentPoly(-p.max_power, np.conj(p.coeffs[::-1]))


# ---------------------------------------------------------------------------
# Unit-circle grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitCircleGrid:
    """Samples at z_j = exp(2 pi i j / N), N a power of two."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if not is_pow2(len(s)):
            raise ValueError(f"grid size must be a power of two, got {len(s)}")
        object.__setattr__(self, "samples", _frozen(s))

    @property
    def size(self) -> int:
        return len(self.samples)

    @property
    def points(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.size) / self.size)


def laurent_eval_grid(p: LaurentPoly, N: int) -> UnitCircleGrid:
    """Evaluate ``p`` at the N-th roots of unity with one inverse FFT."""
    if not is_pow2(N):
        raise ValueError(f"grid size must be a power of two, got {N}")
    folded = np.zeros(N, dtype=complex)
    powers = np.arange(p.min_power, p.max_power + 1)
    np.add.at(folded, powers % N, p.coeffs)
    return UnitCircleGrid(np.fft.ifft(folded) * N)


def coeffs_from_grid(grid: UnitCircleGrid, min_power: int, length: int) -> LaurentPoly:
    """Recover the coefficients of powers min_power..min_power+length-1 from samples."""
    N = grid.size
    if length > N:
        raise ValueError(f"grid of size {N} cannot resolve a Laurent span of {length} coefficients")
    spec = np.fft.fft(grid.samples) / N
    powers = np.arange(min_power, min_power + length)
    return LaurentPoly(min_power, spec[powers % N])


def grid_coefficients(samples: np.ndarray) -> np.ndarray:
    """Raw Fourier coefficients of grid samples (index k holds power k mod N)."""
    return np.fft.fft(samples) / len(samples)


# ---------------------------------------------------------------------------
# Chebyshev target -> NLFT b
# ---------------------------------------------------------------------------


def check_admissible(f: ChebPoly, norm_tol: float = 1e-12) -> ChebPoly:
    """Return ``f`` with definite parity matching its degree, or raise.

    A ChebPoly declared with parity "none" is accepted when its wrong-parity
    coefficients are at interpolation-noise level.
    """
    d = f.degree
    want = "even" if d % 2 == 0 else "odd"
    if f.parity == "none":
        f = ChebPoly(enforce_parity(f.coeffs, want), want)
    elif f.parity != want:
        raise ParityError(f"degree {d} requires {want} parity, target declared {f.parity}")
    s = sup_norm(f)
    if s > 1.0 + norm_tol:
        raise NormError(f"sup-norm {s:.15g} exceeds 1 on [-1, 1]")
    return f


def b_from_cheb(f: ChebPoly) -> LaurentPoly:
    """Polynomial b (powers 0..d, real coefficients) with f(cos t) = Re[b(e^{2it}) e^{-idt}].

    Frequency n = |2j - d| carries c_n / 2 on each of the two powers j and
    d - j; the zero frequency (even d only) keeps c_0 whole.
    """
    f = check_admissible(f)
    c = f.coeffs
    d = f.degree
    j = np.arange(d + 1)
    freq = np.abs(2 * j - d)
    b = c[freq] / 2.0
    b[freq == 0] = c[0]
    return LaurentPoly(0, b.astype(complex))


def eval_b_relation(b: LaurentPoly, d: int, theta) -> np.ndarray:
    """Re[b(e^{2i theta}) e^{-i d theta}]."""
    theta = np.asarray(theta, dtype=float)
    return np.real(b(np.exp(2j * theta)) * np.exp(-1j * d * theta))


def circle_sup(p: LaurentPoly, N: int | None = None) -> float:
    N = N or next_pow2(max(1024, 16 * (p.span + 1)))
    return float(np.max(np.abs(laurent_eval_grid(p, N).samples)))


def winding_number(p: LaurentPoly, N: int | None = None) -> int:
    """Winding number of p around 0 along the unit circle."""
    N = N or next_pow2(max(4096, 32 * (p.span + 1)))
    s = laurent_eval_grid(p, N).samples
    s = np.append(s, s[0])
    total = np.sum(np.angle(s[1:] / s[:-1]))
    return int(round(total / (2 * math.pi)))
