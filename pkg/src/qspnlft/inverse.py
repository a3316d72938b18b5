"""Inverse NLFT: layer stripping, Riemann-Hilbert factorization, inverse nonlinear FFT."""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .errors import DivisionDegenerate, QSPError, SolverFailure
from .nlft import LEAF, GammaSeq, NlftPair, _combine, _direct_arrays
from .poly import fft_convolve

DEGENERATE = 1e-14
SOLVERS = ("layer", "rh", "nlfft")


def _strip_arrays(astar: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Recover gamma_0..gamma_{n-1} from the first n coefficients of a* and b."""
    astar = np.array(astar[:n], dtype=complex)
    b = np.array(b[:n], dtype=complex)
    gammas = np.zeros(n, dtype=complex)
    for k in range(n):
        a0 = astar[0]
        if abs(a0) <= DEGENERATE:
            raise DivisionDegenerate(f"|a_{k}*(0)| = {abs(a0):.2e}; input is not a valid or outer pair")
        g = b[0] / a0
        gammas[k] = g
        s = np.sqrt(1.0 + abs(g) ** 2)
        astar, b = (astar[:-1] + np.conj(g) * b[:-1]) / s, (b[1:] - g * astar[1:]) / s
    return gammas


def layer_stripping(p: NlftPair) -> GammaSeq:
    """gamma_k = b_k(0) / a_k*(0), then peel that factor off; O(d^2)."""
    astar, b, offset = p.arrays()
    return GammaSeq(_strip_arrays(astar, b, len(astar)), offset)


# ---------------------------------------------------------------------------
# Riemann-Hilbert factorization
# ---------------------------------------------------------------------------


def hankel_matrix(c: np.ndarray, k: int) -> np.ndarray:
    """Xi_k[i, j] = c_{k+i+j}, zero past c_d."""
    c = np.asarray(c, dtype=complex)
    tail = c[k:]
    return linalg.hankel(tail, np.zeros_like(tail))


def hankel_block_system(c: np.ndarray, k: int) -> np.ndarray:
    """[[I, -Xi_k], [conj(Xi_k), I]]; for purely imaginary c this is [[I, -Xi], [-Xi, I]]."""
    xi = hankel_matrix(c, k)
    n = xi.shape[0]
    eye = np.eye(n)
    return np.block([[eye, -xi], [np.conj(xi), eye]])


def rh_gamma_at(c: np.ndarray, k: int) -> complex:
    """Single gamma_k from the ratio coefficients c_0..c_d.

    The block system is skew-Hermitian plus identity; eliminating the lower
    block leaves (I + Xi Xi^H) a = e_0, solved by Cholesky.
    """
    c = np.asarray(c, dtype=complex)
    d = len(c) - 1
    if not 0 <= k <= d:
        raise ValueError(f"index {k} outside 0..{d}")
    xi = hankel_matrix(c, k)
    n = xi.shape[0]
    gram = np.eye(n) + xi @ xi.conj().T
    e0 = np.zeros(n)
    e0[0] = 1.0
    try:
        fac = linalg.cho_factor(gram, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SolverFailure(f"Cholesky failed at k={k}: {exc}", k=k) from exc
    a = linalg.cho_solve(fac, e0, check_finite=False)
    bvec = -np.conj(xi) @ a
    res = np.concatenate([a - xi @ bvec - e0, np.conj(xi) @ a + bvec])
    if not np.linalg.norm(res) <= 1e-10:  # also catches NaN
        raise SolverFailure(f"Riemann-Hilbert residual {np.linalg.norm(res):.2e} at k={k}", k=k)
    return complex(-np.conj(bvec[0]) / a[0])


def rh_factorization(c: np.ndarray) -> GammaSeq:
    """Independent Riemann-Hilbert solve for every k = 0..d."""
    c = np.asarray(c, dtype=complex)
    out = np.zeros(len(c), dtype=complex)
    for k in range(len(c)):
        out[k] = rh_gamma_at(c, k)
    return GammaSeq(out)


# ---------------------------------------------------------------------------
# Inverse nonlinear FFT
# ---------------------------------------------------------------------------


def _inverse_fast(astar: np.ndarray, b: np.ndarray, n: int):
    """Returns (gammas, eta, xi) with (eta*, xi) the NLFT of the recovered gammas."""
    if n <= LEAF:
        g = _strip_arrays(astar, b, n)
        eta, xi = _direct_arrays(g)
        return g, eta, xi
    m = (n + 1) // 2
    g1, eta1, xi1 = _inverse_fast(astar, b, m)
    a_n = astar[:n]
    b_n = b[:n]
    # [z^m b_m; a_m*] = [[eta, -xi], [xi*, eta*]] [b; a*]
    top = fft_convolve(eta1, b_n) - fft_convolve(xi1, a_n)
    bot = fft_convolve(np.conj(xi1[::-1]), b_n) + fft_convolve(np.conj(eta1[::-1]), a_n)
    b_m = top[m:n]
    astar_m = bot[m - 1 : n - 1]
    g2, eta2, xi2 = _inverse_fast(astar_m, b_m, n - m)
    eta, xi = _combine(eta1, xi1, eta2, xi2, m)
    return np.concatenate([g1, g2]), eta, xi


def inverse_nlfft(p: NlftPair) -> GammaSeq:
    """Divide-and-conquer inverse NLFT in O(d log^2 d)."""
    astar, b, offset = p.arrays()
    g, _, _ = _inverse_fast(astar, b, len(astar))
    return GammaSeq(g, offset)


def solve_inverse(p: NlftPair, method: str, ratio: np.ndarray | None = None) -> GammaSeq:
    """Dispatch on the solver selection string; "rh" needs the ratio coefficients."""
    if method == "layer":
        return layer_stripping(p)
    if method == "nlfft":
        return inverse_nlfft(p)
    if method == "rh":
        if ratio is None:
            raise QSPError("Riemann-Hilbert solver needs ratio coefficients of b/a")
        out = rh_factorization(ratio)
        return GammaSeq(out.values, p.b.min_power)
    raise ValueError(f"unknown inverse solver {method!r}; expected one of {SOLVERS}")


# ---------------------------------------------------------------------------
# Non-outer companions (for stability characterization)
# ---------------------------------------------------------------------------


def reflect_root(astar: np.ndarray, root: complex, newton_steps: int = 8) -> np.ndarray:
    """Replace the factor (z - r) of a* by (conj(r) z - 1), keeping |a*| on the circle.

    The root is polished by Newton's method, the quotient a*/(z - r) is formed
    by forward deflation (stable for |r| > 1) and the result is rotated so its
    constant term is real and positive.
    """
    astar = np.asarray(astar, dtype=complex)
    P = np.polynomial.polynomial
    der = P.polyder(astar)
    r = complex(root)
    for _ in range(newton_steps):
        slope = P.polyval(r, der)
        if slope == 0:
            break
        r -= P.polyval(r, astar) / slope
    if abs(r) <= 1.0:
        raise ValueError("root must lie outside the closed unit disk")
    q = np.zeros(len(astar) - 1, dtype=complex)
    prev = 0j
    for j in range(len(q)):
        q[j] = (prev - astar[j]) / r
        prev = q[j]
    out = np.convolve(q, [-1.0, np.conj(r)])
    return out * np.exp(-1j * np.angle(out[0]))


def non_outer_pair(p: NlftPair, which: str = "farthest") -> NlftPair:
    """Same b, with one root of a* moved inside the disk ("farthest" or "nearest" to the circle)."""
    astar, b, offset = p.arrays()
    roots = np.roots(astar[::-1])
    if roots.size == 0:
        raise ValueError("a* is constant; there is no root to reflect")
    if which == "farthest":
        r = roots[np.argmax(np.abs(roots))]
    elif which == "nearest":
        r = roots[np.argmin(np.abs(np.abs(roots) - 1.0))]
    else:
        raise ValueError("which must be 'farthest' or 'nearest'")
    return NlftPair.from_arrays(reflect_root(astar, r), b, offset)
