"""CLI subcommands: exit codes, schema stability, byte-identical reruns,
and fit-JSON round trips."""
import json

import numpy as np
import pytest

from nsgevlm.cli import (EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main)

from conftest import gev11_series


@pytest.fixture
def data_csv(tmp_path):
    s = gev11_series(n=50, xi=-0.1, seed=60)
    p = tmp_path / "amax.csv"
    lines = ["year,value"] + [f"{y},{v:.6f}" for y, v in zip(s.years,
                                                            s.values)]
    p.write_text("\n".join(lines) + "\n")
    return p


def test_fit_writes_stable_json(data_csv, tmp_path):
    out = tmp_path / "fit.json"
    rc = main(["fit", str(data_csv), "--method", "prop", "--model", "gev11",
               "--out", str(out)])
    assert rc == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["method"] == "PROP"
    assert payload["model"]["family"] == "gev11"
    assert len(payload["params"]["mu_coef"]) == 2
    assert len(payload["std_residuals"]) == 50
    assert payload["diagnostics"]["n"] == 50
    assert "chi" in payload["diagnostics"]
    assert payload["seed"] == 0
    assert len(payload["data_hash"]) == 16


def test_fit_rerun_is_byte_identical(data_csv, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["fit", str(data_csv), "--method", "prop",
                     "--out", str(out)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_fit_qq_output(data_csv, tmp_path):
    out = tmp_path / "fit.json"
    qq = tmp_path / "qq.csv"
    rc = main(["fit", str(data_csv), "--method", "lme-sta-gev",
               "--out", str(out), "--qq-out", str(qq)])
    assert rc == EXIT_OK
    lines = qq.read_text().splitlines()
    assert lines[0] == "theoretical_gumbel_quantile,ordered_std_residual"
    assert len(lines) == 51


def test_rl_round_trips_fit_json(data_csv, tmp_path):
    fit_out = tmp_path / "fit.json"
    main(["fit", str(data_csv), "--method", "prop", "--out", str(fit_out)])
    rl_out = tmp_path / "rl.csv"
    rc = main(["rl", str(fit_out), "--T", "10,100", "--kind", "both",
               "--out", str(rl_out)])
    assert rc == EXIT_OK
    lines = rl_out.read_text().splitlines()
    assert lines[0] == "kind,T,t,value"
    kinds = {ln.split(",")[0] for ln in lines[1:]}
    assert kinds == {"parey", "conventional"}
    # parey rows: one per T; conventional: one per (T, t)
    parey_rows = [ln for ln in lines[1:] if ln.startswith("parey")]
    assert len(parey_rows) == 2
    vals = [float(ln.split(",")[3]) for ln in parey_rows]
    assert vals[0] < vals[1]  # T=10 below T=100


def test_select_ranks_models(data_csv, tmp_path):
    out = tmp_path / "sel.json"
    rc = main(["select", str(data_csv),
               "--models", "m0=stationary;m1=t",
               "--repeats", "3", "--out", str(out)])
    assert rc == EXIT_OK
    payload = json.loads(out.read_text())
    assert set(payload["models"]) == {"m0", "m1"}
    assert payload["best"] in ("m0", "m1")


def test_bootstrap_command(data_csv, tmp_path):
    out = tmp_path / "boot.json"
    rc = main(["bootstrap", str(data_csv), "--method", "lme-sta-gev",
               "--B", "30", "--out", str(out)])
    assert rc == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["B"] == 30
    assert set(payload["params"]) == {"mu0", "logsigma0", "xi"}
    assert all(v["se"] > 0 for v in payload["params"].values())


def test_simulate_command_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--xi", "-0.1", "--N", "8",
            "--methods", "prop,lme-sta-gev"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header.split(",")[:5] == ["measure", "method", "xi", "n",
                                    "target"]


def test_exit_codes(tmp_path, data_csv):
    # usage error: unknown subcommand / missing args
    assert main(["fit"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    # data error: missing file
    rc = main(["fit", str(tmp_path / "nope.csv"), "--method", "prop",
               "--out", str(tmp_path / "o.json")])
    assert rc == EXIT_DATA
    # data error: malformed CSV
    bad = tmp_path / "bad.csv"
    bad.write_text("year,value\n1990,xyz\n")
    rc = main(["fit", str(bad), "--method", "prop",
               "--out", str(tmp_path / "o.json")])
    assert rc == EXIT_DATA


def test_numeric_failure_writes_diagnostics(tmp_path):
    # constant values: degenerate sample -> numerical failure path
    p = tmp_path / "const.csv"
    p.write_text("year,value\n" + "\n".join(
        f"{1990 + i},5.0" for i in range(30)) + "\n")
    out = tmp_path / "o.json"
    rc = main(["fit", str(p), "--method", "lme-sta-gev", "--out", str(out)])
    assert rc == EXIT_NUMERIC
    payload = json.loads(out.read_text())
    assert payload["status"] == "numerical-failure"
