import json
import math

import numpy as np
import pytest

from qclvol import io
from qclvol.cli import main


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["generate", "--n", "1095", "--seed", "1", "--out", str(d / "data.csv")]) == 0
    assert main(["train", "--data", str(d / "data.csv"), "--restarts", "4", "--seed", "1",
                 "--out", str(d / "params.csv")]) == 0
    assert main(["predict", "--params", str(d / "params.csv"), "--n", "20000", "--seed", "2",
                 "--out", str(d / "pred.csv")]) == 0
    return d


def test_generate_schema(work):
    cols = io.read_csv(work / "data.csv")
    assert list(cols) == ["t", "r", "sigma2"]
    assert cols["t"].size == 1095 and cols["t"][0] == 1
    m = json.loads((work / "data.csv.manifest.json").read_text())
    assert m["subcommand"] == "generate" and m["seed"] == 1
    assert m["outputs"][str(work / "data.csv")] == io.sha256(work / "data.csv")


def test_paper_generate_flags(tmp_path):
    out = tmp_path / "paper.csv"
    rc = main(["generate", "--alpha", "0.11", "--beta", "0.85", "--omega", "0.005", "--gamma", "0.1",
               "--variant", "exp", "--n", "1095", "--seed", "1", "--out", str(out)])
    assert rc == 0
    assert len(out.read_text().splitlines()) == 1096


def test_gamma_zero_variants_identical(tmp_path):
    base = ["generate", "--gamma", "0", "--n", "3000", "--seed", "9"]
    assert main(base + ["--variant", "rational", "--out", str(tmp_path / "a.csv")]) == 0
    assert main(base + ["--variant", "exp", "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_full_precision_round_trip(work):
    from qclvol import rgarch

    cols = io.read_csv(work / "data.csv")
    s = rgarch.simulate(rgarch.PAPER_PARAMS, n=1095, seed=1)
    assert np.array_equal(cols["r"], s.r) and np.array_equal(cols["sigma2"], s.sigma2)


def test_train_outputs(work):
    kv = io.read_kv(work / "params.csv")
    for key in ("theta", "lambda", "phi", "loss", "r_scale", "v_scale", "x0_r", "x0_sigma2"):
        assert math.isfinite(float(kv[key]))
    fit = io.read_csv(work / "params_fit.csv")
    assert list(fit) == ["t", "teacher", "fitted"] and fit["t"].size == 1094


def test_predict_schema(work):
    cols = io.read_csv(work / "pred.csv")
    assert list(cols) == ["t", "rp", "v"] and cols["v"].size == 20000
    m = json.loads((work / "pred.csv.manifest.json").read_text())
    assert "clamp_count" in m["diagnostics"] and m["diagnostics"]["rng"].startswith("numpy")


def test_predict_single_row(work, tmp_path):
    out = tmp_path / "one.csv"
    assert main(["predict", "--params", str(work / "params.csv"), "--n", "1", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2


def test_analyze_chain(work):
    cc = work / "cc.csv"
    assert main(["analyze", "crosscorr", "--input", str(work / "pred.csv"), "--d", "2",
                 "--lags", "-100:100", "--out", str(cc)]) == 0
    cols = io.read_csv(cc)
    assert list(cols) == ["lag", "value", "n_pairs"] and cols["lag"][0] == -100 and cols["lag"].size == 201
    fit = work / "fit.csv"
    assert main(["analyze", "fitdecay", "--input", str(cc), "--out", str(fit)]) == 0
    f = io.read_csv(fit)
    assert f["tau"][0] > 0
    # crosscorr works on data files too
    assert main(["analyze", "crosscorr", "--input", str(work / "data.csv"), "--lags=-5:5",
                 "--out", str(work / "cc_data.csv")]) == 0


def test_analyze_autocorr_mfdfa_rolling(work):
    assert main(["analyze", "autocorr", "--input", str(work / "pred.csv"), "--max-lag", "20",
                 "--out", str(work / "acf.csv")]) == 0
    acf = io.read_csv(work / "acf.csv")
    assert list(acf) == ["lag", "acf"] and acf["acf"][0] == pytest.approx(1.0)
    mf = work / "mf"
    assert main(["analyze", "mfdfa", "--input", str(work / "pred.csv"), "--segment", "0:1095",
                 "--out", str(mf)]) == 0
    assert list(io.read_csv(mf / "hq.csv")) == ["q", "h", "r2"]
    spec = io.read_csv(mf / "spectrum.csv")
    assert list(spec) == ["q", "alpha", "f"] and spec["q"].size == 19
    assert (mf / "manifest.json").exists()
    assert main(["analyze", "rolling-hurst", "--input", str(work / "pred.csv"), "--window", "1095",
                 "--shift", "100", "--out", str(work / "roll.csv")]) == 0
    roll = io.read_csv(work / "roll.csv")
    assert list(roll) == ["start", "h2"]
    assert roll["start"].size == (19999 - 1095) // 100 + 1


def test_plots_written(work):
    out = work / "cc_plot.csv"
    assert main(["analyze", "crosscorr", "--input", str(work / "pred.csv"), "--out", str(out), "--plot"]) == 0
    png = out.with_suffix(".png")
    assert png.exists() and png.read_bytes()[:4] == b"\x89PNG"
    m = json.loads((work / "cc_plot.csv.manifest.json").read_text())
    assert str(png) in m["outputs"]


def test_manifest_command_reproduces(work, tmp_path):
    m = json.loads((work / "pred.csv.manifest.json").read_text())
    cmd = [a for a in m["command"][1:] if not a.startswith("--out=")] + [f"--out={tmp_path / 'again.csv'}"]
    assert main(cmd) == 0
    assert (tmp_path / "again.csv").read_bytes() == (work / "pred.csv").read_bytes()


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("# paper training set\nn = 50\nseed = 4\ngamma = 0.1\n")
    a = tmp_path / "a.csv"
    assert main(["generate", "--config", str(cfg), "--out", str(a)]) == 0
    assert len(a.read_text().splitlines()) == 51
    b = tmp_path / "b.csv"
    assert main(["generate", "--config", str(cfg), "--n", "20", "--out", str(b)]) == 0
    assert len(b.read_text().splitlines()) == 21
    c = tmp_path / "c.csv"
    assert main(["generate", "--n", "50", "--seed", "4", "--out", str(c)]) == 0
    assert a.read_bytes() == c.read_bytes()
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 3\n")
    assert main(["generate", "--config", str(bad), "--out", str(tmp_path / "d.csv")]) == 1


def test_exit_codes(tmp_path, work):
    assert main(["generate", "--bogus"]) == 1
    assert main([]) == 1
    assert main(["analyze", "fitdecay", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "x.csv")]) == 3
    assert main(["generate", "--alpha", "0.5", "--beta", "0.6", "--out", str(tmp_path / "x.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("t,r,sigma2\n1,0.1,0.2\n2,oops,0.3\n")
    assert main(["train", "--data", str(bad), "--out", str(tmp_path / "p.csv")]) == 2
    assert main(["analyze", "fitdecay", "--input", str(work / "data.csv"), "--out", str(tmp_path / "y.csv")]) == 2


def test_parse_error_has_line_number(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,r,sigma2\n1,0.1,0.2\n2,oops,0.3\n")
    main(["train", "--data", str(bad), "--out", str(tmp_path / "p.csv")])
    assert "line 3" in capsys.readouterr().err


def test_rational_failure_exit_code(tmp_path, capsys):
    rc = main(["generate", "--variant", "rational", "--gamma", "5", "--omega", "0.5", "--alpha", "0.2",
               "--beta", "0.7", "--n", "5000", "--burn-in", "0", "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "step" in capsys.readouterr().err


def test_constant_volatility_terminates(tmp_path):
    rng = np.random.default_rng(0)
    n = 200
    io.write_csv(tmp_path / "flat.csv", ["t", "r", "sigma2"],
                 [np.arange(1, n + 1), 0.1 * rng.normal(size=n), np.full(n, 0.01)])
    out = tmp_path / "p.csv"
    assert main(["train", "--data", str(tmp_path / "flat.csv"), "--restarts", "2", "--out", str(out)]) == 0
    assert math.isfinite(float(io.read_kv(out)["loss"]))
