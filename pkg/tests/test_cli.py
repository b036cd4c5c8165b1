import json
import math
import subprocess
import sys

import jsonschema
import pytest

from sphere_extremal import __version__
from sphere_extremal.bve import TrajectoryLog
from sphere_extremal.cli import CURVE_COLUMNS, TRACE_COLUMNS, main
from sphere_extremal.config import OUT_ENV, RunConfig, UsageError, parse_config, read_config_file
from sphere_extremal.io import read_csv
from sphere_extremal.schemas import document_schema


def run_cli(args, out, capsys, monkeypatch=None):
    code = main([*args, "--output-dir", str(out)])
    stdout = capsys.readouterr().out
    docs = sorted(out.glob("*.json"))
    doc = json.loads(docs[-1].read_text()) if docs else None
    return code, doc, stdout


def check_doc(doc, command):
    jsonschema.validate(doc, document_schema(command))
    assert doc["version"] == __version__
    assert doc["params"]["command"] == command


def csv_files(out, suffix=".csv"):
    return sorted(p for p in out.iterdir() if p.name.endswith(suffix))


def test_defaults():
    cfg = parse_config(["classify", "--omega", "1", "--q-rel", "1"], environ={})
    assert (cfg.L, cfg.dt, cfg.t_end, cfg.seed) == (21, 1e-3, 10.0, 42)
    assert cfg.output_dir == "results"


def test_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\nomega = 0.5\nq_rel = 2   # inline\nseed = 9\noutput_dir = from_file\n")
    cfg = parse_config(["oracle", "--config", str(conf), "--seed", "3"], environ={})
    assert cfg.omega == 0.5 and cfg.q_rel == 2.0 and cfg.seed == 3 and cfg.output_dir == "from_file"
    cfg = parse_config(["oracle", "--config", str(conf)], environ={OUT_ENV: "from_env"})
    assert cfg.output_dir == "from_env" and cfg.seed == 9
    cfg = parse_config(["oracle", "--config", str(conf), "--output-dir", "flag"], environ={OUT_ENV: "env"})
    assert cfg.output_dir == "flag"


@pytest.mark.parametrize("text", ["omega = 1\nbogus = 2\n", "omega = one\n", "omega 1\n"])
def test_bad_config_files(tmp_path, text):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    with pytest.raises(UsageError):
        read_config_file(conf)


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--q-rel", "1"],
        ["classify", "--omega", "1", "--q-rel", "0"],
        ["classify", "--omega", "nan", "--q-rel", "1"],
        ["solve-el", "--omega", "1"],
        ["oracle", "--omega", "1", "--q-rel", "1", "--direction", "up"],
        ["evolve", "--omega", "1", "--q-rel", "1", "--dt", "-1"],
        ["figures", "--omega", "1", "--fig", "7"],
        ["probe", "--omega", "1", "--q-rel", "1", "--modes", "0,0:1"],
        ["launch"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert main([*argv, "--output-dir", str(tmp_path)]) == 2
    assert not list(tmp_path.iterdir())


def test_negative_omega_in_config(tmp_path, capsys):
    conf = tmp_path / "c.conf"
    conf.write_text("omega = -1\nq_rel = 1\n")
    assert main(["classify", "--config", str(conf), "--output-dir", str(tmp_path / "o")]) == 2
    assert "omega" in capsys.readouterr().err


def test_env_var_sets_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "envout"))
    assert main(["classify", "--omega", "1", "--q-rel", "1"]) == 0
    assert len(list((tmp_path / "envout").glob("classify-*.json"))) == 1


def test_classify(tmp_path, capsys):
    code, doc, stdout = run_cli(["classify", "--omega", "1.0", "--q-rel", "1.0"], tmp_path, capsys)
    assert code == 0
    check_doc(doc, "classify")
    assert json.loads(stdout)["kind"] == "ConstrainedMin"
    assert doc["params"]["omega"] == 1.0 and doc["params"]["L"] == 21


def test_extremals_omega_zero(tmp_path, capsys):
    code, doc, _ = run_cli(["extremals", "--omega", "0", "--q-rel", "1"], tmp_path, capsys)
    assert code == 0
    check_doc(doc, "extremals")
    assert doc["result"]["H_Max"] == doc["result"]["H_min"] == 0.25


@pytest.mark.parametrize("lam,branch", [("-0.5", "ProRotating"), ("0.1", "CounterRotating"),
                                        ("-0.25", None), ("-0.08333333333333333", "Bifurcation(2)")])
def test_solve_el(lam, branch, tmp_path, capsys):
    code, doc, _ = run_cli(["solve-el", "--omega", "1", "--lambda-rel", lam], tmp_path, capsys)
    assert code == 0
    check_doc(doc, "solve-el")
    assert doc["result"]["branch"] == branch
    if branch is not None:
        assert doc["result"]["residual"] < 1e-12


def test_oracle_example(tmp_path, capsys):
    code, doc, _ = run_cli(["oracle", "--omega", "1", "--q-rel", "1", "--direction", "ascend", "--seed", "7"],
                           tmp_path, capsys)
    assert code == 0
    check_doc(doc, "oracle")
    assert doc["result"]["distance_to_analytic"] < 1e-5
    assert doc["result"]["verification"]["ok"] is True
    header, rows = read_csv(csv_files(tmp_path)[0])
    assert tuple(header) == TRACE_COLUMNS and int(rows[-1][0]) == doc["result"]["iterations"]


def test_oracle_non_convergence_exit_1(tmp_path, capsys):
    code, doc, _ = run_cli(["oracle", "--omega", "1", "--q-rel", "1", "--max-iter", "2"], tmp_path, capsys)
    assert code == 1
    check_doc(doc, "oracle")
    assert doc["status"] == 1 and doc["result"]["converged"] is False


def test_evolve_blow_up_exit_1(tmp_path, capsys):
    code, doc, _ = run_cli(["evolve", "--omega", "1", "--q-rel", "1e6", "--L", "8", "--dt", "0.5",
                            "--t-end", "50", "--sample-every", "1"], tmp_path, capsys)
    assert code == 1
    check_doc(doc, "evolve")
    assert doc["result"]["blew_up"] is True


def test_evolve_wmin(tmp_path, capsys):
    code, doc, _ = run_cli(["evolve", "--omega", "1", "--q-rel", "2", "--L", "10", "--init", "wmin",
                            "--modes", "2,1:1e-3", "3,0:1e-3", "--t-end", "1", "--dt", "1e-2",
                            "--sample-every", "10"], tmp_path, capsys)
    assert code == 0
    check_doc(doc, "evolve")
    header, rows = read_csv(csv_files(tmp_path)[0])
    assert tuple(header) == TrajectoryLog.COLUMNS and len(rows) == 11
    assert doc["result"]["drift"]["H"] < 1e-10


def test_probe_example(tmp_path, capsys):
    code, doc, _ = run_cli(["probe", "--base", "wmax", "--omega", "1", "--q-rel", "1", "--modes", "2,1:1e-3"],
                           tmp_path, capsys)
    assert code == 0
    check_doc(doc, "probe")
    header, rows = read_csv(csv_files(tmp_path)[0])
    assert tuple(header) == TrajectoryLog.COLUMNS
    qq = [float(r[header.index("q1_plus_q2")]) for r in rows]
    assert max(abs(v / qq[0] - 1.0) for v in qq) < 1e-6
    assert doc["result"]["verdict"] == "Stable"


def test_figures(tmp_path, capsys):
    code, doc, _ = run_cli(["figures", "--omega", "1", "--gnuplot", "--n-points", "21"], tmp_path, capsys)
    assert code == 0
    check_doc(doc, "figures")
    assert sorted(doc["result"]["figures"]) == ["fig1", "fig2", "fig3", "fig4"]
    for f in csv_files(tmp_path):
        header, rows = read_csv(f)
        assert tuple(header) == CURVE_COLUMNS and rows
        assert f.read_text().startswith("# figure")
    assert len(csv_files(tmp_path, ".gp")) == 4


def test_fig3_example(tmp_path, capsys):
    code, doc, _ = run_cli(["figures", "--omega", "1", "--fig", "3", "--q-max", "10"], tmp_path, capsys)
    assert code == 0
    header, rows = read_csv(csv_files(tmp_path)[0])
    xs = [float(r[0]) for r in rows]
    assert min(xs) > 0 and max(xs) == pytest.approx(math.sqrt(10.0), rel=1e-15)
    assert {r[2] for r in rows} == {"lambda_plus", "lambda_minus"}


def test_plot_writes_png(tmp_path, capsys):
    code, doc, _ = run_cli(["figures", "--omega", "1", "--fig", "4", "--plot"], tmp_path, capsys)
    assert code == 0
    pngs = csv_files(tmp_path, ".png")
    assert len(pngs) == 1 and pngs[0].read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert str(pngs[0]) in doc["files"]


@pytest.mark.parametrize(
    "argv",
    [
        ["figures", "--omega", "0.7", "--n-points", "33"],
        ["oracle", "--omega", "1", "--q-rel", "3", "--seed", "11", "--L", "8"],
        ["evolve", "--omega", "1", "--q-rel", "1", "--L", "8", "--t-end", "0.5", "--dt", "1e-2",
         "--sample-every", "5"],
    ],
)
def test_byte_identical_csv(argv, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*argv, "--output-dir", str(a)]) == 0
    assert main([*argv, "--output-dir", str(b)]) == 0
    fa, fb = csv_files(a), csv_files(b)
    assert len(fa) == len(fb) > 0
    for x, y in zip(fa, fb):
        raw = x.read_bytes()
        assert raw == y.read_bytes()
        assert b"\r" not in raw


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sphere_extremal", "classify", "--omega", "1", "--q-rel", "10",
         "--output-dir", str(tmp_path)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kind"] == "Saddle"


def test_config_to_dict_roundtrip():
    cfg = RunConfig("probe", omega=1.0, q_rel=1.0, modes=((2, 1, 1e-3),))
    assert cfg.to_dict()["modes"] == [[2, 1, 1e-3]]
