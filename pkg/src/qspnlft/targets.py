"""Target polynomials for the QSVT applications.

Hamiltonian simulation (cos/sin via Jacobi-Anger), the scaled inverse
1/(2 kappa x) and an even smoothed step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .poly import ChebPoly, cheb_eval, cheb_interpolate, sup_norm

SAFETY_SHRINK = 1.0 - 1e-8


def bessel_jn(t: float, nmax: int) -> np.ndarray:
    """J_0(t) .. J_nmax(t) by Miller's downward recurrence.

    Normalized with J_0 + 2 sum_k J_2k = 1.
    """
    out = np.zeros(nmax + 1)
    if t == 0:
        out[0] = 1.0
        return out
    if t < 0:
        signs = (-1.0) ** np.arange(nmax + 1)
        return signs * bessel_jn(-t, nmax)
    top = max(nmax, int(math.ceil(t)))
    start = top + int(math.sqrt(60 * top)) + 30
    start += start % 2
    vals = np.zeros(start + 2)
    vals[start] = 1e-30
    for k in range(start, 0, -1):
        vals[k - 1] = (2.0 * k / t) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e250:
            vals[k - 1 :] *= 1e-250
    norm = vals[0] + 2.0 * vals[2:start + 1:2].sum()
    return vals[: nmax + 1] / norm


def _apply_safety(p: ChebPoly) -> ChebPoly:
    if sup_norm(p) > 1.0 - 1e-12:
        return p.scaled(SAFETY_SHRINK)
    return p


def jacobi_anger(kind: str, t: float, eps: float, scale: float = 1.0) -> ChebPoly:
    """Truncated Chebyshev series of scale*cos(t x) or scale*sin(t x).

    The series is cut at the smallest degree whose dropped Bessel tail
    (times ``scale``) is below ``eps``.
    """
    if kind not in ("cos", "sin"):
        raise ValueError("kind must be 'cos' or 'sin'")
    if t <= 0 or eps <= 0:
        raise ValueError("need t > 0 and eps > 0")
    nmax = int(math.ceil(1.5 * t + 8 * math.log(1 / eps) + 40))
    J = bessel_jn(t, nmax)
    while abs(J[-1]) > 1e-3 * eps:
        nmax *= 2
        J = bessel_jn(t, nmax)

    n = np.arange(nmax + 1)
    if kind == "cos":
        full = 2.0 * (-1.0) ** (n // 2) * J
        full[0] = J[0]
        full[1::2] = 0.0
        start = 0
    else:
        full = 2.0 * (-1.0) ** ((n - 1) // 2) * J
        full[0::2] = 0.0
        start = 1
    full *= scale
    tails = np.cumsum(np.abs(full[::-1]))[::-1]  # tails[m] = sum_{n >= m} |c_n|
    deg = start
    while deg + 2 <= nmax and tails[deg + 2] > eps:
        deg += 2
    parity = "even" if kind == "cos" else "odd"
    return _apply_safety(ChebPoly(full[: deg + 1], parity))


def _inverse_profile(kappa: float, eps: float):
    """Odd, entire, 1/(2 kappa x) away from 0 up to eps/2 and bounded below 1."""
    r = math.log(4.0 / eps) ** 0.25
    w = 1.0 / (kappa * r)

    def g(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x == 0.0, 1.0, x)
        return np.where(x == 0.0, 0.0, -np.expm1(-((x / w) ** 4)) / (2.0 * kappa * safe))

    return g


def inverse_error(p: ChebPoly, kappa: float, n: int = 2000) -> float:
    x = np.linspace(1.0 / kappa, 1.0, n)
    return float(np.max(np.abs(cheb_eval(p, x) - 1.0 / (2.0 * kappa * x))))


def inverse_poly(kappa: float, eps: float, degree: int | None = None) -> ChebPoly:
    """Odd polynomial within eps of 1/(2 kappa x) on [1/kappa, 1], bounded by 1.

    With ``degree`` given the interpolant is returned at that degree and the
    achieved error is whatever that degree allows.
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    g = _inverse_profile(kappa, eps)
    if degree is not None:
        if degree % 2 == 0:
            raise ValueError("inverse polynomial degree must be odd")
        return _apply_safety(cheb_interpolate(g, degree, "odd"))
    d = 1
    while True:
        p = cheb_interpolate(g, d, "odd")
        if inverse_error(p, kappa) <= eps:
            return _apply_safety(p)
        if d > 200000:
            raise RuntimeError("inverse_poly degree search did not terminate")
        d = d + 2 * max(1, d // 20)


def _step_profile(x0: float, delta: float, eps: float):
    width = delta / float(special.erfcinv(eps / 4.0))
    height = 1.0 - eps / 2.0

    def g(x):
        x = np.asarray(x, dtype=float)
        return height * 0.5 * (special.erf((x + x0) / width) - special.erf((x - x0) / width))

    return g


def step_plateau_error(p: ChebPoly, x0: float, delta: float, n: int = 2000) -> float:
    inner = np.linspace(0.0, x0 - delta, n)
    outer = np.linspace(x0 + delta, 1.0, n)
    return float(max(np.max(np.abs(cheb_eval(p, inner) - 1.0)), np.max(np.abs(cheb_eval(p, outer)))))


def step_poly(x0: float, delta: float, eps: float, degree: int | None = None) -> ChebPoly:
    """Even polynomial within eps of 1 on [0, x0-delta] and of 0 on [x0+delta, 1]."""
    if not 0 < delta < min(x0, 1 - x0):
        raise ValueError("need 0 < delta < min(x0, 1 - x0)")
    g = _step_profile(x0, delta, eps)
    if degree is not None:
        return _apply_safety(cheb_interpolate(g, degree + degree % 2, "even"))
    d = 2
    while True:
        p = cheb_interpolate(g, d, "even")
        if step_plateau_error(p, x0, delta) <= eps:
            return _apply_safety(p)
        if d > 200000:
            raise RuntimeError("step_poly degree search did not terminate")
        d = d + 2 * max(1, d // 20)


@dataclass(frozen=True)
class TargetSpec:
    kind: str
    eps: float = 1e-12
    scale: float = 1.0
    t: float | None = None
    kappa: float | None = None
    x0: float | None = None
    delta: float | None = None
    degree: int | None = None
    coeffs: tuple = field(default=())
    parity: str = "none"

    KINDS = ("cos", "sin", "inverse", "step", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0 < self.scale <= 1:
            raise ValueError("scale must lie in (0, 1]")
        if self.kind in ("cos", "sin") and not (self.t and self.t > 0):
            raise ValueError("trigonometric targets need t > 0")
        if self.kind == "inverse" and not (self.kappa and self.kappa >= 1):
            raise ValueError("inverse target needs kappa >= 1")
        if self.kind == "step":
            if self.x0 is None or self.delta is None or not 0 < self.delta < min(self.x0, 1 - self.x0):
                raise ValueError("step target needs 0 < delta < min(x0, 1 - x0)")

    @classmethod
    def from_dict(cls, data: dict) -> "TargetSpec":
        return cls(
            kind=data["kind"],
            eps=float(data.get("eps", 1e-12)),
            scale=float(data.get("scale", 1.0)),
            t=data.get("t"),
            kappa=data.get("kappa"),
            x0=data.get("x0"),
            delta=data.get("delta"),
            degree=data.get("degree"),
            coeffs=tuple(data.get("coeffs", ())),
            parity=data.get("parity", "none"),
        )

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "eps": self.eps, "scale": self.scale}
        for key in ("t", "kappa", "x0", "delta", "degree"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.kind == "custom":
            out["coeffs"] = list(self.coeffs)
            out["parity"] = self.parity
        return out

    def build(self) -> ChebPoly:
        if self.kind in ("cos", "sin"):
            p = jacobi_anger(self.kind, self.t, self.eps, scale=self.scale)
            return p
        if self.kind == "inverse":
            p = inverse_poly(self.kappa, self.eps, degree=self.degree)
        elif self.kind == "step":
            p = step_poly(self.x0, self.delta, self.eps, degree=self.degree)
        else:
            p = ChebPoly(np.asarray(self.coeffs, dtype=float), self.parity)
        if self.scale != 1.0:
            p = p.scaled(self.scale)
        return p
