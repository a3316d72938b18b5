"""Command-line front end.

Every command writes CSV/JSON files into ``--out`` and a ``<file>.meta.json``
sidecar next to each, holding the run configuration, its SHA-256 hash and
the residuals relevant to that file.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from .errors import AdmissibilityError, DivisionDegenerate, GapTooSmall, NonConvergent, QSPError, SolverFailure
from .inverse import inverse_nlfft, layer_stripping, rh_factorization
from .nlft import GammaSeq, nlft_fast
from .poly import ChebPoly, cheb_eval, cheb_nodes, sup_norm
from .qsp import PhaseFactors, convention_shift, qsp_value, strip_quarter_pi, synthesize
from .qsvt import block_encode, hamiltonian_demo, inverse_demo, svt_reference
from .targets import TargetSpec, inverse_poly, jacobi_anger, step_poly
from .weiss import WeissConfig, ratio_coeffs, weiss_complement

METHODS = ("layer", "rh", "nlfft", "fpi")
EXIT_NONCONVERGENT = 1
EXIT_INVALID = 2


def fmt(v) -> str:
    return format(float(v), ".17g")


def random_imag_gamma(rng: np.random.Generator, n: int, amplitude: float | None = None) -> np.ndarray:
    """i * uniform(-A, A) entries; the default A = min(1, 2/sqrt(n)) keeps sum |gamma|^2 = O(1)."""
    amp = min(1.0, 2.0 / np.sqrt(n)) if amplitude is None else amplitude
    return 1j * rng.uniform(-amp, amp, n)


def random_target(rng: np.random.Generator, d: int, l1: float) -> ChebPoly:
    """Random definite-parity Chebyshev series of degree d with ||c||_1 = l1."""
    c = rng.standard_normal(d + 1)
    if d % 2 == 0:
        c[1::2] = 0.0
        parity = "even"
    else:
        c[0::2] = 0.0
        parity = "odd"
    c *= l1 / np.sum(np.abs(c))
    return ChebPoly(c, parity)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


class Writer:
    def __init__(self, out: Path, config: dict):
        self.out = out
        self.out.mkdir(parents=True, exist_ok=True)
        self.config = config
        blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
        self.config_hash = hashlib.sha256(blob).hexdigest()
        self.files: list[str] = []

    def _sidecar(self, name: str, residuals: dict):
        meta = {
            "file": name,
            "config": self.config,
            "config_hash": self.config_hash,
            "residuals": residuals,
        }
        (self.out / f"{name}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    def csv(self, name: str, header: list[str], rows, residuals: dict | None = None):
        with open(self.out / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
        self._sidecar(name, residuals or {})
        self.files.append(name)

    def json(self, name: str, data, residuals: dict | None = None):
        (self.out / name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        self._sidecar(name, residuals or {})
        self.files.append(name)

    def text(self, name: str, text: str, residuals: dict | None = None):
        (self.out / name).write_text(text)
        self._sidecar(name, residuals or {})
        self.files.append(name)


def _load_json_arg(value: str):
    path = Path(value)
    if path.exists():
        return json.loads(path.read_text())
    return json.loads(value)


def _load_target(args) -> ChebPoly:
    if getattr(args, "coeffs", None):
        path = Path(args.coeffs)
        text = path.read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            vals = [float(tok) for tok in text.replace(",", " ").split()]
            return ChebPoly(np.asarray(vals), "none")
        if isinstance(data, list):
            return ChebPoly(np.asarray(data, dtype=float), "none")
        if "coeffs" not in data:
            raise ValueError(f"{path} has no 'coeffs' entry")
        return ChebPoly.from_dict(data)
    if getattr(args, "target", None):
        return TargetSpec.from_dict(_load_json_arg(args.target)).build()
    raise ValueError("one of --target or --coeffs is required")


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    for key in ("target", "coeffs", "phases"):
        val = cfg.get(key)
        if val and Path(val).exists():
            cfg[key + "_sha256"] = hashlib.sha256(Path(val).read_bytes()).hexdigest()
    return cfg


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_approx(args) -> int:
    f = _load_target(args)
    w = Writer(Path(args.out), _config(args))
    w.json("target.json", f.to_dict(), {"sup_norm": sup_norm(f), "degree": f.degree})
    return 0


def _synth(args, f: ChebPoly):
    return synthesize(f, args.method, weiss_cfg=WeissConfig(eps=args.tol), fpi_tol=args.tol)


def cmd_synth(args) -> int:
    f = _load_target(args)
    psi, report = _synth(args, f)
    w = Writer(Path(args.out), _config(args))
    res = {"representation_error": report.representation_error}
    w.json("phases.json", psi.to_dict(), res)
    w.text("phases.csv", psi.to_csv(), res)
    w.json("report.json", report.to_dict(), res)
    return 0


def cmd_verify(args) -> int:
    f = _load_target(args)
    if not args.phases:
        raise ValueError("verify needs --phases")
    text = Path(args.phases).read_text()
    psi = PhaseFactors.from_csv(text) if args.phases.endswith(".csv") else PhaseFactors.from_dict(json.loads(text))
    x = np.sort(cheb_nodes(args.grid or max(4 * psi.degree, 1024)))
    q = qsp_value(x, psi)
    t = cheb_eval(f, x)
    err = np.abs(q - t)
    w = Writer(Path(args.out), _config(args))
    w.csv("verify.csv", ["x", "qsp", "target", "error"], zip(x, q, t, err), {"max_error": float(err.max())})
    return 0


def _roundtrip_solve(method: str, g: np.ndarray) -> np.ndarray:
    p = nlft_fast(GammaSeq(g))
    if method == "layer":
        return layer_stripping(p).values
    if method == "nlfft":
        return inverse_nlfft(p).values
    if method == "rh":
        comp = weiss_complement(p.b)
        return rh_factorization(ratio_coeffs(p.b, comp.a, N=comp.N)).values
    raise ValueError("roundtrip supports --method layer, rh or nlfft")


def cmd_roundtrip(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for trial in range(args.trials):
        g = random_imag_gamma(rng, args.d + 1, args.amplitude)
        back = _roundtrip_solve(args.method, g)
        rows.append((trial, len(g), float(np.max(np.abs(back - g)))))
    worst = max(r[2] for r in rows)
    w = Writer(Path(args.out), _config(args))
    w.csv("roundtrip.csv", ["trial", "length", "max_error"], rows, {"max_error": worst})
    w.json("roundtrip_report.json", {"method": args.method, "trials": args.trials, "max_error": worst}, {"max_error": worst})
    return 0


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    d = 16
    while d <= args.d:
        f = random_target(rng, d, 0.5)
        for method in METHODS:
            t0 = time.perf_counter()
            _, report = synthesize(f, method, weiss_cfg=WeissConfig(eps=args.tol), fpi_tol=args.tol)
            rows.append((d, method, time.perf_counter() - t0, report.representation_error))
        d *= 2
    w = Writer(Path(args.out), _config(args))
    w.csv("bench.csv", ["d", "method", "seconds", "representation_error"], rows,
          {"max_representation_error": max(r[3] for r in rows)})
    return 0


def _random_hermitian(rng, n: int, radius: float = 1.0) -> np.ndarray:
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = X + X.conj().T
    return radius * H / np.linalg.norm(H, 2)


def cmd_qsvt_demo(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    H = _random_hermitian(rng, 6, 0.99)
    ham = hamiltonian_demo(H, 5.0, method=args.method if args.method != "fpi" else "nlfft")
    rows.append(("hamiltonian_t5", "max_abs_vs_expm", float(np.max(np.abs(ham.result - expm(5j * H))))))
    eps = 1e-6
    A = np.diag(np.linspace(0.1, 1.0, 10))
    inv = inverse_demo(A, 10.0, eps)
    rows.append(("inverse_kappa10", "max_abs_vs_inverse", inv.inverse_error))
    rows.append(("inverse_kappa10", "deviation_RA_minus_I", inv.deviation))
    B = rng.standard_normal((6, 6))
    B = 0.9 * B / np.linalg.norm(B, 2)
    U = block_encode(B)
    rows.append(("block_encode", "unitarity", float(np.max(np.abs(U.conj().T @ U - np.eye(12))))))
    step = step_poly(0.5, 0.1, 1e-4)
    lam = np.concatenate([rng.uniform(0.0, 0.4, 3), rng.uniform(0.6, 1.0, 3)])
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    P = svt_reference((Q * lam) @ Q.T, step)
    rows.append(("step_projector", "norm_P2_minus_P", float(np.linalg.norm(P @ P - P, 2))))
    w = Writer(Path(args.out), _config(args))
    w.csv("qsvt_demo.csv", ["demo", "metric", "value"], rows, {r[0] + ":" + r[1]: r[2] for r in rows})
    return 0


def figure_target(which: int) -> ChebPoly:
    if which == 1:
        return jacobi_anger("cos", 100.0, 1e-14, scale=0.5)
    if which == 2:
        return inverse_poly(10.0, 1e-5, degree=101)
    raise ValueError("figure must be 1 or 2")


def figure_reference(which: int):
    if which == 1:
        return lambda x: 0.5 * np.cos(100.0 * x)
    return lambda x: 1.0 / (20.0 * x)


def cmd_figures(args) -> int:
    wanted = [1, 2] if args.which == "all" else [int(args.which)]
    w = Writer(Path(args.out), _config(args))
    for k in wanted:
        f = figure_target(k)
        psi, report = _synth(args, f)
        x = np.sort(cheb_nodes(max(4 * f.degree, 1024)))
        p = cheb_eval(f, x)
        q = qsp_value(x, psi)
        ref = figure_reference(k)
        with np.errstate(divide="ignore"):
            fx = np.where(np.abs(x) >= 0.1, ref(x), np.nan) if k == 2 else ref(x)
        err = np.abs(q - p)
        res = {"max_error": float(err.max()), "representation_error": report.representation_error}
        w.csv(f"fig{k}_curve.csv", ["x", "function", "polynomial", "qsp"], zip(x, fx, p, q), res)
        w.csv(f"fig{k}_error.csv", ["x", "error"], zip(x, err), res)
        shown = strip_quarter_pi(convention_shift(psi))
        mag = np.log10(np.maximum(np.abs(shown), 1e-300))
        w.csv(f"fig{k}_phases.csv", ["index", "phase", "log10_abs_phase"], zip(range(len(shown)), shown, mag),
              {"max_asymmetry": float(np.max(np.abs(shown - shown[::-1])))})
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qspnlft", description="QSP phase factors via the nonlinear Fourier transform")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, method_default="nlfft"):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--method", choices=METHODS, default=method_default)

    def target_args(p):
        p.add_argument("--target", help="TargetSpec as JSON text or a JSON file path")
        p.add_argument("--coeffs", help="Chebyshev coefficient file (ChebPoly JSON, JSON list or whitespace list)")

    p = sub.add_parser("approx", help="build a target polynomial")
    common(p)
    target_args(p)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("synth", help="compute phase factors for a target")
    common(p)
    target_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="pointwise error of phase factors against a target")
    common(p)
    target_args(p)
    p.add_argument("--phases", help="phases JSON or CSV written by synth")
    p.add_argument("--grid", type=int, default=None, help="number of Chebyshev nodes")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("roundtrip", help="inverse(forward(gamma)) on random purely imaginary gamma")
    common(p)
    p.add_argument("--d", type=int, default=128)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--amplitude", type=float, default=None, help="entry bound (default min(1, 2/sqrt(d+1)))")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("bench", help="timing sweep over degree for all solvers")
    common(p)
    p.add_argument("--d", type=int, default=1024, help="largest degree in the sweep")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("qsvt-demo", help="dense-matrix QSVT checks")
    common(p)
    p.set_defaults(func=cmd_qsvt_demo)

    p = sub.add_parser("figures", help="datasets for the cos(100x)/2 and inverse-function examples")
    common(p)
    p.add_argument("--which", choices=["1", "2", "all"], default="all")
    p.set_defaults(func=cmd_figures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NonConvergent, SolverFailure, DivisionDegenerate) as exc:
        stage = getattr(exc, "stage", None) or "solve"
        print(f"error [{stage}]: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT
    except (AdmissibilityError, GapTooSmall, QSPError, ValueError, KeyError, TypeError, OSError) as exc:
        stage = getattr(exc, "stage", None) or "input"
        print(f"error [{stage}]: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
