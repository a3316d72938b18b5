"""Fixed-point iteration for symmetric phase factors.

Works directly on the Chebyshev coefficients of the target, with no
complementary polynomial. phi <- phi - (F(phi) - c) / 2 from phi = 0.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent
from .poly import ChebPoly, cheb_coeffs_from_nodes
from .qsp import expand_reduced, qsp_first_row, reduced_length

CONTRACTION_L1 = 0.861


@dataclass(frozen=True)
class ReducedPhases:
    values: np.ndarray
    degree: int
    parity: str
    iterations: int = 0
    residual: float = 0.0
    l1_norm: float = 0.0
    history: tuple = ()

    def full(self) -> np.ndarray:
        return expand_reduced(self.values, self.degree)

    def history_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "l1_residual"])
        for t, r in enumerate(self.history):
            w.writerow([t, format(float(r), ".17g")])
        return buf.getvalue()


def _half_nodes(m: int) -> np.ndarray:
    """The m positive nodes of the 2m-point first-kind Chebyshev grid."""
    j = np.arange(m)
    return np.cos(np.pi * (j + 0.5) / (2 * m))


def forward_map(phi, d: int, parity: str | None = None) -> np.ndarray:
    """Parity-matching Chebyshev coefficients of Im U_11 for the expanded phases.

    Im U_11 has the parity of d, so sampling the positive half of the grid and
    mirroring gives all 2m node values; the transform is exact up to degree
    2m - 1 >= d.
    """
    parity = parity or ("even" if d % 2 == 0 else "odd")
    if parity != ("even" if d % 2 == 0 else "odd"):
        raise ValueError(f"degree {d} cannot carry {parity} parity")
    m = reduced_length(d)
    x = _half_nodes(m)
    p, _ = qsp_first_row(x, expand_reduced(phi, d))
    v = p.imag
    sign = 1.0 if parity == "even" else -1.0
    full = np.concatenate([v, sign * v[::-1]])  # nodes descend from near 1 to near -1
    c = cheb_coeffs_from_nodes(full)
    return c[0::2].copy() if parity == "even" else c[1::2].copy()


def _target_reduced(c) -> tuple[np.ndarray, int, str]:
    if isinstance(c, ChebPoly):
        d = c.degree
        parity = "even" if d % 2 == 0 else "odd"
        if c.parity not in (parity, "none"):
            raise ValueError(f"degree {d} target must be {parity}")
        full = np.asarray(c.coeffs)
        red = full[0::2] if parity == "even" else full[1::2]
        return np.asarray(red, dtype=float), d, parity
    raise TypeError("fpi_solve expects a ChebPoly target")


def fpi_solve(c: ChebPoly, tol: float = 1e-12, max_iter: int = 500, warn: bool = True) -> ReducedPhases:
    """Iterate to ||F(phi) - c||_1 <= tol; raises NonConvergent after max_iter steps."""
    target, d, parity = _target_reduced(c)
    l1 = float(np.sum(np.abs(target)))
    if warn and l1 > CONTRACTION_L1:
        warnings.warn(
            f"||c||_1 = {l1:.4f} exceeds {CONTRACTION_L1}; convergence is not guaranteed",
            RuntimeWarning,
            stacklevel=2,
        )
    phi = np.zeros(reduced_length(d))
    history = []
    for t in range(max_iter + 1):
        r = forward_map(phi, d, parity) - target
        res = float(np.sum(np.abs(r)))
        history.append(res)
        if res <= tol:
            return ReducedPhases(phi, d, parity, t, res, l1, tuple(history))
        if not np.isfinite(res) or t == max_iter:
            break
        phi = phi - 0.5 * r
    raise NonConvergent(
        f"fixed-point iteration stalled at residual {history[-1]:.3e} after {len(history) - 1} steps",
        history=history,
        stage="fpi",
    )


def convergence_rate(history) -> float:
    """Geometric-mean contraction factor of the residual trace (excluding the floor)."""
    h = np.asarray(history, dtype=float)
    h = h[h > 0]
    if len(h) < 3:
        return 0.0
    # drop the last few steps where rounding dominates
    head = h[: max(3, int(0.8 * len(h)))]
    return float(np.exp(np.mean(np.diff(np.log(head)))))
