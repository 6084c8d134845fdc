import hashlib
import json
import math
from pathlib import Path

import numpy as np
import pytest

from fracgcg.cli import main
from fracgcg.io import read_field, read_pgm16, read_raw

DATA = Path(__file__).parent / "data"


def _digest(d: Path, skip=("manifest.json",)):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(d.iterdir()) if p.name not in skip}


def test_no_command_is_usage_error(capsys):
    assert main([]) == 2


def test_phantom_writes_deterministic_files(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["phantom", "--experiment", "denoise2d", "--n", "32", "--period", "8", "--seed", "3", "--out", str(a)]) == 0
    assert main(["phantom", "--experiment", "denoise2d", "--n", "32", "--period", "8", "--seed", "3", "--out", str(b)]) == 0
    assert _digest(a, ("phantom.json",)) == _digest(b, ("phantom.json",))
    ja, jb = (json.loads((d / "phantom.json").read_text()) for d in (a, b))
    ja["runspec"].pop("out"), jb["runspec"].pop("out")
    assert ja == jb
    assert {p.name for p in a.iterdir()} == {"clean.pgm", "clean.f64", "noisy.pgm", "noisy.f64", "phantom.json"}
    pix = read_pgm16(a / "clean.pgm")
    assert pix.shape == (32, 32) and set(np.unique(pix)) == {0, 65535}
    assert read_raw(a / "clean.f64").values.mean() == pytest.approx(2 * (2 / 8) - (2 / 8) ** 2)


def test_denoise_1d_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    args = ["denoise", "--experiment", "denoise1d", "--n", "64", "--max-iter", "10", "--out", str(out)]
    assert main(args) == 0
    report = json.loads(capsys.readouterr().out)
    names = {p.name for p in out.iterdir()}
    assert names == {"clean.csv", "noisy.csv", "reconstruction.csv", "sigma.csv", "residual.csv", "measure.json", "manifest.json"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["result"] == report
    for key in ("termination", "n_atoms", "support_size", "rate_constant", "psnr_reconstruction_db", "final_dual"):
        assert key in report
    assert manifest["kernel_backend"] in ("cython", "python")
    assert "PCG64" in manifest["rng"]
    residual = (out / "residual.csv").read_text().splitlines()
    assert residual[0] == "k,E_k,rhat_k,dual"
    assert float(residual[-1].split(",")[2]) == 0.0
    assert read_field(out / "reconstruction.csv").grid.n == 64
    # rerun is byte-identical (the manifest records the output path)
    out2 = tmp_path / "run2"
    assert main(args[:-1] + [str(out2)]) == 0
    assert _digest(out) == _digest(out2)


def test_denoise_2d_with_input(tmp_path, capsys):
    src = tmp_path / "ph"
    assert main(["phantom", "--experiment", "denoise2d", "--n", "16", "--period", "8", "--out", str(src)]) == 0
    out = tmp_path / "den"
    rc = main(["denoise", "--experiment", "denoise2d", "--input", str(src / "noisy.f64"), "--max-iter", "5", "--out", str(out)])
    assert rc == 0
    assert (out / "reconstruction.pgm").exists() and not (out / "clean.f64").exists()
    report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert "psnr_reconstruction_db" not in report


def test_odd_grid_rejected(tmp_path, capsys):
    rc = main(["phantom", "--n", "63", "--out", str(tmp_path / "x")])
    assert rc == 2
    assert "n" in capsys.readouterr().err
    assert not (tmp_path / "x").exists()


def test_missing_out_and_bad_values(tmp_path):
    assert main(["phantom"]) == 2
    assert main(["denoise", "--alpha", "-1", "--out", str(tmp_path / "y")]) == 2
    assert main(["phantom", "--experiment", "denoise1d", "--phantom", "grid", "--out", str(tmp_path / "z")]) == 2


def test_empty_and_missing_input(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["denoise", "--input", str(empty), "--out", str(tmp_path / "o")]) == 2
    assert main(["denoise", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")]) == 4
    assert main(["metrics", str(empty), str(empty)]) == 2


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test config\nexperiment = denoise2d\nn = 16\nperiod = 8\nnoise-std = 0.0\n")
    out = tmp_path / "c"
    assert main(["phantom", "--config", str(cfg), "--n", "32", "--out", str(out)]) == 0
    spec = json.loads((out / "phantom.json").read_text())["runspec"]
    assert spec["n"] == 32 and spec["period"] == 8 and spec["noise_std"] == 0.0
    assert np.array_equal(read_raw(out / "clean.f64").values, read_raw(out / "noisy.f64").values)
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["phantom", "--config", str(bad), "--out", str(tmp_path / "d")]) == 2


def test_metrics_golden(capsys):
    assert main(["metrics", str(DATA / "ref.csv"), str(DATA / "test.csv")]) == 0
    got = json.loads(capsys.readouterr().out)
    golden = json.loads((DATA / "metrics_golden.json").read_text())
    assert set(got) == set(golden) == {"psnr_db", "l2_error", "peak"}
    assert got == pytest.approx(golden, rel=1e-12)
    # independent check: error is +-0.1 on 8 samples with cell 2pi/8
    assert golden["l2_error"] == pytest.approx(math.sqrt(0.02 * math.pi), rel=1e-12)
    assert golden["psnr_db"] == pytest.approx(20.0, abs=1e-12)


def test_metrics_identical_sentinel(capsys):
    assert main(["metrics", str(DATA / "ref.csv"), str(DATA / "ref.csv")]) == 0
    text = capsys.readouterr().out
    assert json.loads(text)["psnr_db"] == math.inf
    assert "Infinity" in text
