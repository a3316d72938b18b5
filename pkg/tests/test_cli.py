import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qspnlft.cli import main


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def column(path, name):
    header, rows = read_csv(path)
    i = header.index(name)
    return np.array([float(r[i]) for r in rows])


@pytest.fixture(scope="module")
def fig1(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig1")
    assert main(["figures", "--which", "1", "--out", str(out)]) == 0
    return out


class TestFigures:
    def test_error_column(self, fig1):
        assert column(fig1 / "fig1_error.csv", "error").max() <= 1e-12

    def test_curve_columns(self, fig1):
        header, rows = read_csv(fig1 / "fig1_curve.csv")
        assert header == ["x", "function", "polynomial", "qsp"]
        assert len(rows) >= 1024

    def test_phase_column_symmetric_and_decaying(self, fig1):
        phase = column(fig1 / "fig1_phases.csv", "phase")
        np.testing.assert_allclose(phase, phase[::-1], atol=1e-10)
        mag = np.abs(phase[: len(phase) // 2])
        # the outermost entries are far below the central ones
        assert mag[:10].max() < 1e-3 * mag.max()

    def test_sidecars(self, fig1):
        for name in ("fig1_curve.csv", "fig1_error.csv", "fig1_phases.csv"):
            meta = json.loads((fig1 / f"{name}.meta.json").read_text())
            assert meta["file"] == name
            assert len(meta["config_hash"]) == 64
            assert meta["config"]["which"] == "1"
            assert meta["residuals"]

    def test_byte_identical_repeat(self, fig1, tmp_path):
        assert main(["figures", "--which", "1", "--out", str(tmp_path)]) == 0
        for path in fig1.iterdir():
            assert (tmp_path / path.name).read_bytes() == path.read_bytes()


def test_synth_mixed_parity_exits_2(tmp_path, capsys):
    src = tmp_path / "mixed.json"
    src.write_text(json.dumps([0.2, 0.2, 0.2]))
    assert main(["synth", "--coeffs", str(src), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "admissibility" in err and "parit" in err


def test_synth_norm_exits_2(tmp_path, capsys):
    src = tmp_path / "big.txt"
    src.write_text("0 0.8 0 0.8")
    assert main(["synth", "--coeffs", str(src), "--out", str(tmp_path / "o")]) == 2
    assert "admissibility" in capsys.readouterr().err


def test_roundtrip_report(tmp_path):
    assert main(["roundtrip", "--d", "128", "--trials", "20", "--method", "nlfft", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "roundtrip_report.json").read_text())
    assert report["trials"] == 20
    assert report["max_error"] <= 1e-9
    assert len(read_csv(tmp_path / "roundtrip.csv")[1]) == 20


def test_approx_synth_verify_chain(tmp_path):
    spec = json.dumps({"kind": "sin", "t": 3.0, "eps": 1e-12, "scale": 0.5})
    assert main(["approx", "--target", spec, "--out", str(tmp_path)]) == 0
    target = tmp_path / "target.json"
    assert json.loads(target.read_text())["parity"] == "odd"
    assert main(["synth", "--coeffs", str(target), "--method", "layer", "--out", str(tmp_path)]) == 0
    phases = json.loads((tmp_path / "phases.json").read_text())
    assert phases["convention"] == "im"
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["representation_error"] <= 1e-12
    for ph in ("phases.json", "phases.csv"):
        out = tmp_path / ph.replace(".", "_")
        assert main(["verify", "--coeffs", str(target), "--phases", str(tmp_path / ph), "--out", str(out)]) == 0
        header, rows = read_csv(out / "verify.csv")
        assert header == ["x", "qsp", "target", "error"]
        assert max(float(r[3]) for r in rows) <= 1e-12


def test_verify_requires_phases(tmp_path):
    src = tmp_path / "c.txt"
    src.write_text("0 0.5")
    assert main(["verify", "--coeffs", str(src), "--out", str(tmp_path)]) == 2


def test_bench_small(tmp_path):
    assert main(["bench", "--d", "32", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "bench.csv")
    assert header == ["d", "method", "seconds", "representation_error"]
    assert {r[1] for r in rows} == {"layer", "rh", "nlfft", "fpi"}
    assert {r[0] for r in rows} == {"16", "32"}
    assert max(float(r[3]) for r in rows) <= 1e-12


def test_qsvt_demo(tmp_path):
    assert main(["qsvt-demo", "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "qsvt_demo.csv")
    vals = {(r[0], r[1]): float(r[2]) for r in rows}
    assert vals[("hamiltonian_t5", "max_abs_vs_expm")] <= 1e-9
    assert vals[("inverse_kappa10", "deviation_RA_minus_I")] <= 2e-6
    assert vals[("block_encode", "unitarity")] <= 1e-11


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["synth", "--bogus"])
    assert info.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qspnlft", "roundtrip", "--d", "8", "--trials", "2", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "roundtrip.csv.meta.json").exists()
