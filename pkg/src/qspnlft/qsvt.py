"""Dense-matrix checks of singular value transformation and block encodings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import ChebPoly, cheb_eval
from .qsp import PhaseFactors, qsp_value, synthesize
from .targets import inverse_poly, jacobi_anger

NORM_TOL = 1e-10


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return A


def svt_reference(A, f: ChebPoly) -> np.ndarray:
    """W f(Sigma) V^H for odd f, V f(Sigma) V^H for even f, from A = W Sigma V^H."""
    A = _as_matrix(A)
    if f.parity not in ("even", "odd"):
        raise ValueError("singular value transformation needs a definite-parity polynomial")
    W, s, Vh = np.linalg.svd(A)
    if s.size and s[0] > 1.0 + NORM_TOL:
        raise ValueError(f"largest singular value {s[0]:.6g} exceeds 1")
    m, n = A.shape
    k = min(m, n)
    fs = cheb_eval(f, s)
    if f.parity == "odd":
        return (W[:, :k] * fs) @ Vh[:k, :]
    # even: f acts on all right singular vectors; the missing ones have sigma = 0
    full = np.concatenate([s, np.zeros(n - k)]) if n > k else s
    return (Vh.conj().T * cheb_eval(f, full)) @ Vh


def _psd_sqrt(H: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh((H + H.conj().T) / 2)
    return (Q * np.sqrt(np.clip(w, 0.0, None))) @ Q.conj().T


def block_encode(A) -> np.ndarray:
    """Unitary [[A, sqrt(I - A A^H)], [sqrt(I - A^H A), -A^H]]."""
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("block_encode expects a square matrix")
    norm = np.linalg.norm(A, 2) if A.size else 0.0
    if norm > 1.0 + NORM_TOL:
        raise ValueError(f"||A|| = {norm:.6g} exceeds 1")
    eye = np.eye(A.shape[0])
    top = _psd_sqrt(eye - A @ A.conj().T)
    bot = _psd_sqrt(eye - A.conj().T @ A)
    return np.block([[A, top], [bot, -A.conj().T]])


def qsp_on_spectrum(H, psi: PhaseFactors) -> np.ndarray:
    """Q diag(p(lambda)) Q^H where p is the scalar QSP value for Psi."""
    H = _as_matrix(H)
    if np.max(np.abs(H - H.conj().T), initial=0.0) > 1e-12 * max(1.0, np.abs(H).max()):
        raise ValueError("qsp_on_spectrum expects a Hermitian matrix")
    lam, Q = np.linalg.eigh(H)
    return (Q * qsp_value(np.clip(lam, -1.0, 1.0), psi)) @ Q.conj().T


@dataclass(frozen=True)
class InverseDemo:
    result: np.ndarray
    deviation: float
    inverse_error: float
    poly: ChebPoly


def inverse_demo(A, kappa: float, eps: float, poly: ChebPoly | None = None) -> InverseDemo:
    """f^SV(A^H) with f ~ 1/(2 kappa x), approximating A^{-1} / (2 kappa).

    ``deviation`` is max |result A - I/(2 kappa)| and ``inverse_error`` is
    max |result - A^{-1}/(2 kappa)|.
    """
    A = _as_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size and s[-1] < (1.0 / kappa) * (1.0 - 1e-8):
        raise ValueError(f"smallest singular value {s[-1]:.6g} is below 1/kappa")
    p = poly or inverse_poly(kappa, eps)
    R = svt_reference(A.conj().T, p)
    n = A.shape[0]
    dev = float(np.max(np.abs(R @ A - np.eye(n) / (2 * kappa))))
    err = float(np.max(np.abs(R - np.linalg.inv(A) / (2 * kappa))))
    return InverseDemo(R, dev, err, p)


def matrix_to_dict(M) -> dict:
    M = _as_matrix(M)
    return {"n": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_dict(data: dict) -> np.ndarray:
    M = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    if M.shape[0] != int(data["n"]):
        raise ValueError("matrix size field does not match entries")
    return M


@dataclass(frozen=True)
class HamiltonianDemo:
    result: np.ndarray
    phases_cos: PhaseFactors
    phases_sin: PhaseFactors
    errors: dict


def hamiltonian_demo(H, t: float, eps: float = 1e-14, method: str = "nlfft") -> HamiltonianDemo:
    """e^{itH} from QSP phases for cos(tx)/2 and sin(tx)/2, applied spectrum-wise.

    The factor 1/2 keeps both targets strictly inside the unit ball so the
    complementary polynomial is well defined; the halves are recombined as
    2 (C + i S).
    """
    H = _as_matrix(H)
    fc = jacobi_anger("cos", t, eps, scale=0.5)
    fs = jacobi_anger("sin", t, eps, scale=0.5)
    pc, rc = synthesize(fc, method)
    ps, rs = synthesize(fs, method)
    C = qsp_on_spectrum(H, pc)
    S = qsp_on_spectrum(H, ps)
    errors = {"cos_representation": rc.representation_error, "sin_representation": rs.representation_error}
    return HamiltonianDemo(2.0 * (C + 1j * S), pc, ps, errors)
