"""QSP unitaries, phase-factor conventions and the synthesis pipeline.

The QSP product is

    U(x, Psi) = e^{i psi_0 Z} prod_{j=1}^{d} W(x) e^{i psi_j Z},
    W(x) = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]].

Real targets are synthesized in the imaginary-part convention
f(x) = Im U_11(x, Psi); :func:`convention_shift` moves between conventions.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError, NonRealGamma, QSPError
from .inverse import SOLVERS, solve_inverse
from .nlft import GammaSeq, NlftPair, validate_pair
from .poly import ChebPoly, LaurentPoly, b_from_cheb, check_admissible, cheb_eval, cheb_nodes
from .weiss import WeissConfig, project_imaginary, ratio_coeffs, weiss_complement

CONVENTIONS = ("re", "im")
SYMMETRY_TOL = 1e-12


def _wrap(angles: np.ndarray) -> np.ndarray:
    """Map to [-pi, pi); e^{i(psi + 2 pi) Z} = e^{i psi Z} so U is unchanged."""
    out = np.mod(angles + math.pi, 2 * math.pi) - math.pi
    return np.where(out >= math.pi, out - 2 * math.pi, out)


def symmetry_error(angles) -> float:
    a = np.asarray(angles, dtype=float)
    return float(np.max(np.abs(a - a[::-1]), initial=0.0))


@dataclass(frozen=True)
class PhaseFactors:
    angles: np.ndarray
    convention: str = "im"
    symmetric: bool = False

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        a = np.asarray(self.angles, dtype=float).ravel()
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise ValueError("phase factors must be a non-empty finite vector")
        a = _wrap(a)
        if self.symmetric and symmetry_error(a) > SYMMETRY_TOL:
            raise ValueError(f"phases flagged symmetric but asymmetry is {symmetry_error(a):.2e}")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @property
    def degree(self) -> int:
        return len(self.angles) - 1

    def to_dict(self) -> dict:
        return {
            "convention": self.convention,
            "symmetric": bool(self.symmetric),
            "angles": [float(v) for v in self.angles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseFactors":
        return cls(np.asarray(data["angles"], dtype=float), data.get("convention", "im"), bool(data.get("symmetric", False)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"convention={self.convention}"])
        for v in self.angles:
            w.writerow([format(float(v), ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PhaseFactors":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        head = rows[0][0]
        if not head.startswith("convention="):
            raise ValueError("phase CSV must start with a convention=... header")
        return cls(np.array([float(r[0]) for r in rows[1:]]), head.split("=", 1)[1])


@dataclass(frozen=True)
class GqspPhases:
    psi: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float).ravel()
        phi = np.asarray(self.phi, dtype=float).ravel()
        if psi.shape != phi.shape or not (np.all(np.isfinite(psi)) and np.all(np.isfinite(phi))):
            raise ValueError("GQSP angles must be finite vectors of equal length")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "phi", phi)

    def to_dict(self) -> dict:
        return {"psi": [float(v) for v in self.psi], "phi": [float(v) for v in self.phi]}


@dataclass(frozen=True)
class SU2Matrix:
    """First row (u11, u12); the second row is (-conj(u12), conj(u11)).

    Entries may be arrays when a whole grid of x values is evaluated at once.
    """

    u11: np.ndarray
    u12: np.ndarray

    def __post_init__(self):
        u11 = np.asarray(self.u11, dtype=complex)
        u12 = np.asarray(self.u12, dtype=complex)
        dev = np.max(np.abs(np.abs(u11) ** 2 + np.abs(u12) ** 2 - 1.0), initial=0.0)
        if dev > 1e-12:
            raise ValueError(f"not in SU(2): |u11|^2 + |u12|^2 deviates by {dev:.2e}")
        object.__setattr__(self, "u11", u11)
        object.__setattr__(self, "u12", u12)

    def matrix(self) -> np.ndarray:
        """Dense 2x2 (or (..., 2, 2)) array."""
        return np.stack(
            [np.stack([self.u11, self.u12], -1), np.stack([-np.conj(self.u12), np.conj(self.u11)], -1)], -2
        )


def _as_angles(psi) -> np.ndarray:
    if isinstance(psi, PhaseFactors):
        return np.asarray(psi.angles)
    return np.asarray(psi, dtype=float).ravel()


def qsp_first_row(x, angles) -> tuple[np.ndarray, np.ndarray]:
    """(u11, u12) of U(x, Psi) for an array of x, by propagating the first row."""
    x = np.asarray(x, dtype=float)
    angles = np.asarray(angles, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-15):
        raise ValueError("QSP signal x must lie in [-1, 1]")
    x = np.clip(x, -1.0, 1.0)
    s = 1j * np.sqrt(1.0 - x * x)
    p = np.full(x.shape, np.exp(1j * angles[0]), dtype=complex)
    q = np.zeros(x.shape, dtype=complex)
    for psi in angles[1:]:
        e = np.exp(1j * psi)
        p, q = (p * x + q * s) * e, (p * s + q * x) * np.conj(e)
    return p, q


def u_eval(x, psi) -> SU2Matrix:
    """QSP unitary U(x, Psi); ``x`` may be a scalar or an array."""
    p, q = qsp_first_row(x, _as_angles(psi))
    return SU2Matrix(p, q)


def qsp_value(x, psi: PhaseFactors) -> np.ndarray:
    """The part of U_11 selected by the phase convention."""
    p, _ = qsp_first_row(x, psi.angles)
    return p.imag if psi.convention == "im" else p.real


# ---------------------------------------------------------------------------
# Conventions
# ---------------------------------------------------------------------------


def gamma_to_psi(gamma: GammaSeq, part: str = "imag", tol: float = 1e-10) -> PhaseFactors:
    """psi_k = arctan(gamma_k) for a sequence that is purely real or purely imaginary.

    ``part="real"`` is the real-gamma form; ``part="imag"`` applies the map to
    the imaginary parts, which is what the real-target pipeline produces. The
    result is in the imaginary-part convention either way.
    """
    g = np.asarray(gamma.values if isinstance(gamma, GammaSeq) else gamma, dtype=complex)
    if part == "real":
        keep, drop = g.real, g.imag
    elif part == "imag":
        keep, drop = g.imag, g.real
    else:
        raise ValueError("part must be 'real' or 'imag'")
    mix = float(np.max(np.abs(drop), initial=0.0))
    if mix > tol:
        raise NonRealGamma(f"gamma has a {('imaginary' if part == 'real' else 'real')} component of size {mix:.2e}")
    return PhaseFactors(np.arctan(keep), "im")


def convention_shift(psi: PhaseFactors) -> PhaseFactors:
    """Toggle between the Re- and Im-part conventions.

    Negating every angle conjugates U_11 and adding pi/4 at both ends
    multiplies it by i, so Re U_11(shifted) = Im U_11(original) and the
    reverse. The map is an involution.
    """
    a = -np.asarray(psi.angles, dtype=float)
    a[0] += math.pi / 4
    a[-1] += math.pi / 4
    other = "re" if psi.convention == "im" else "im"
    sym = psi.symmetric and symmetry_error(_wrap(a)) <= SYMMETRY_TOL
    return PhaseFactors(a, other, sym)


def strip_quarter_pi(psi: PhaseFactors) -> np.ndarray:
    """Re-convention phases with pi/4 removed at both ends; Im-convention phases unchanged."""
    a = np.asarray(psi.angles, dtype=float).copy()
    if psi.convention == "re":
        a[0] -= math.pi / 4
        a[-1] -= math.pi / 4
    return a


def gqsp_from_gamma(gamma: GammaSeq) -> GqspPhases:
    g = np.asarray(gamma.values if isinstance(gamma, GammaSeq) else gamma, dtype=complex)
    return GqspPhases(np.arctan(np.abs(g)), np.angle(g))


def gqsp_product(phases: GqspPhases, z) -> np.ndarray:
    """R_0 prod_{k>=1} diag(z, 1) R_k with R = [[cos psi, e^{i phi} sin psi], [-e^{-i phi} sin psi, cos psi]].

    Returns an array of shape z.shape + (2, 2).
    """
    z = np.asarray(z, dtype=complex)
    c = np.cos(phases.psi)
    s = np.sin(phases.psi)
    e = np.exp(1j * phases.phi)
    out = np.zeros(z.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c[0]
    out[..., 0, 1] = e[0] * s[0]
    out[..., 1, 0] = -np.conj(e[0]) * s[0]
    out[..., 1, 1] = c[0]
    for k in range(1, len(c)):
        r = np.array([[c[k], e[k] * s[k]], [-np.conj(e[k]) * s[k], c[k]]])
        left = out.copy()
        left[..., :, 0] *= z[..., None]
        out = left @ r
    return out


# ---------------------------------------------------------------------------
# Reduced phases
# ---------------------------------------------------------------------------


def reduced_length(d: int) -> int:
    return (d + 2) // 2


def expand_reduced(phi, d: int) -> np.ndarray:
    """Symmetric full phases from reduced ones indexed from the center outward.

    Even d: (phi_m, ..., phi_1, phi_0, phi_1, ..., phi_m); odd d: the central
    entry phi_0 appears twice.
    """
    phi = np.asarray(phi, dtype=float)
    if len(phi) != reduced_length(d):
        raise ValueError(f"degree {d} needs {reduced_length(d)} reduced phases, got {len(phi)}")
    if d % 2 == 0:
        return np.concatenate([phi[:0:-1], phi])
    return np.concatenate([phi[::-1], phi])


def reduce_phases(angles) -> np.ndarray:
    """Right half of a symmetric phase vector, starting at the center."""
    a = np.asarray(angles, dtype=float)
    d = len(a) - 1
    return a[d // 2 :].copy() if d % 2 == 0 else a[(d + 1) // 2 :].copy()


# ---------------------------------------------------------------------------
# Verification and diagnostics
# ---------------------------------------------------------------------------


def verify_grid(d: int, n: int | None = None) -> np.ndarray:
    return cheb_nodes(n or max(4 * d, 1024))


def verify(psi: PhaseFactors, f: ChebPoly, n: int | None = None) -> float:
    """Max |selected part of U_11 - f| over Chebyshev nodes (default max(4d, 1024))."""
    x = verify_grid(psi.degree, n)
    return float(np.max(np.abs(qsp_value(x, psi) - cheb_eval(f, x))))


@dataclass(frozen=True)
class TailReport:
    n: np.ndarray
    psi_tail: np.ndarray
    c_tail: np.ndarray

    def ratios(self) -> np.ndarray:
        ok = self.c_tail > 0
        return self.psi_tail[ok] / self.c_tail[ok]


def _tails(v: np.ndarray) -> np.ndarray:
    """t[n] = sum_{k > n} |v_k|."""
    rev = np.cumsum(np.abs(v[::-1]))[::-1]
    return np.append(rev[1:], 0.0)


def tail_decay_report(psi: PhaseFactors, c: ChebPoly) -> TailReport:
    """Tail sums of the reduced phases next to tail sums of the reduced coefficients."""
    angles = psi.angles if psi.convention == "im" else convention_shift(psi).angles
    phi = reduce_phases(angles)
    cr = c.reduced()
    m = max(len(phi), len(cr))
    phi = np.pad(phi, (0, m - len(phi)))
    cr = np.pad(cr, (0, m - len(cr)))
    return TailReport(np.arange(m), _tails(phi), _tails(cr))


# ---------------------------------------------------------------------------
# Synthesis pipeline
# ---------------------------------------------------------------------------


@dataclass
class SynthesisReport:
    method: str
    degree: int
    stages: dict = field(default_factory=dict)
    representation_error: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "degree": self.degree,
            "stages": dict(self.stages),
            "representation_error": self.representation_error,
        }


def _pipeline_pair(f: ChebPoly, weiss_cfg: WeissConfig | None, report: SynthesisReport):
    b = LaurentPoly(0, 1j * b_from_cheb(f).coeffs)
    try:
        comp = weiss_complement(b, weiss_cfg)
    except QSPError as exc:
        exc.stage = exc.stage or "weiss"
        raise
    report.stages["weiss"] = {
        "residual": comp.residual,
        "N": comp.N,
        "eta": comp.eta,
        "out_of_band": comp.out_of_band,
    }
    diag = validate_pair(NlftPair(comp.a, b))
    report.stages["pair"] = {"residual": diag.residual, "a_star_0": diag.astar0.real}
    if not diag.valid:
        raise QSPError(f"complementary pair failed validation (residual {diag.residual:.2e})", stage="pair")
    return diag.pair, comp


def synthesize(
    f: ChebPoly,
    method: str = "nlfft",
    weiss_cfg: WeissConfig | None = None,
    real_target: bool = True,
    fpi_tol: float = 1e-12,
    fpi_max_iter: int = 500,
) -> tuple[PhaseFactors, SynthesisReport]:
    """Phase factors with f = Im U_11 for an admissible real target.

    ``method`` is one of "layer", "rh", "nlfft" (Weiss + inverse NLFT) or
    "fpi" (fixed-point iteration, no complementary polynomial needed).
    """
    try:
        f = check_admissible(f)
    except AdmissibilityError as exc:
        exc.stage = "admissibility"
        raise
    report = SynthesisReport(method, f.degree)

    if method == "fpi":
        from .fpi import fpi_solve

        res = fpi_solve(f, tol=fpi_tol, max_iter=fpi_max_iter)
        angles = expand_reduced(res.values, f.degree)
        report.stages["fpi"] = {"iterations": res.iterations, "residual": res.residual, "l1_norm": res.l1_norm}
    elif method in SOLVERS:
        pair, comp = _pipeline_pair(f, weiss_cfg, report)
        ratio = None
        if method == "rh":
            ratio = ratio_coeffs(pair.b, pair.a, N=comp.N)
            if real_target:
                ratio, dropped = project_imaginary(ratio)
                report.stages["ratio"] = {"max_real_part": dropped}
        try:
            gamma = solve_inverse(pair, method, ratio)
        except QSPError as exc:
            exc.stage = exc.stage or "inverse"
            raise
        mix = float(np.max(np.abs(gamma.values.real), initial=0.0))
        report.stages["inverse"] = {"max_real_part": mix}
        try:
            angles = gamma_to_psi(gamma, "imag").angles
        except NonRealGamma as exc:
            exc.stage = "convert"
            raise
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {SOLVERS + ('fpi',)}")

    asym = symmetry_error(angles)
    report.stages["symmetry"] = {"max_asymmetry": asym}
    psi = PhaseFactors(angles, "im", asym <= SYMMETRY_TOL)
    report.representation_error = verify(psi, f)
    return psi, report
