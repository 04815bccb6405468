import json
import subprocess
import sys
from fractions import Fraction

import pytest

from owlab.cli import ConfigError, JobConfig, build_parser, main, parse_set, render


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_alpha_example(capsys):
    code, out, _ = run(["alpha", "--semigroup", "zd:2", "--set", "box:0,0:10,10", "--K", "box:0,0:3,3"], capsys)
    assert code == 0
    assert json.loads(out) == {"alpha": {"num": 36, "den": 100}}


def test_boundary_command(capsys):
    code, out, _ = run(["boundary", "--set", "box:0:10", "--K", "list:[0,1,2]"], capsys)
    data = json.loads(out)
    assert code == 0 and data["interior"] == list(range(8)) and data["boundary"] == [8, 9]
    assert data["alpha"] == {"num": 2, "den": 10}


def test_ow_example(capsys):
    code, out, err = run(["ow", "--semigroup", "zd:1", "--folner", "boxes", "--h", "card:2", "--max", "10"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "n,card,h,ratio" and len(lines) == 11
    assert all(line.split(",")[3] == "2" for line in lines[1:])
    assert json.loads(err)["cauchy_gap"] == "0"


def test_strict_tile_rejects_small_n(capsys):
    code, _, err = run(["tile", "--mode", "strict", "--eps", "1/2", "--n", "2", "--D", "box:0:64"], capsys)
    assert code == 2 and "n0(1/2) = 3" in err


def test_tile_and_fill(capsys):
    code, out, _ = run(["tile", "--D", "box:0:64", "--K", "box:0:2", "--eps", "1/2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["residual_size"] == 0 and data["achieves_t3"]
    code, out, _ = run(["fill", "--omega", "box:0:100", "--K", "box:0:10", "--eps", "1/2"], capsys)
    data = json.loads(out)
    assert data["P"] == list(range(0, 91, 5)) and data["coverage_size"] == 100
    assert data["guarantee"] == "91/2"


def test_folner_report_csv(capsys):
    code, out, _ = run(["folner-report", "--semigroup", "zd:2", "--kind", "boxes", "--K", "box:0,0:3,3",
                        "--indices", "10,100"], capsys)
    assert code == 0
    assert out.splitlines() == ["n,card,alpha_num,alpha_den,max_defect_num,max_defect_den",
                                "10,100,36,100,36,100", "100,10000,396,10000,396,10000"]


def test_entropy_and_certify(capsys, tmp_path):
    summary = tmp_path / "s.json"
    code, out, _ = run(["entropy", "--sft", "golden", "--max", "30", "--summary", str(summary)], capsys)
    assert code == 0 and out.splitlines()[5].startswith("5,5,13,")
    assert abs(float(json.loads(summary.read_text())["lambda_hat"]) - 0.4812) < 0.01
    code, out, _ = run(["certify", "--h", "sft:golden", "--D", "box:0:64", "--K", "box:0:8", "--eps", "1/2"], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_exit_codes(capsys, monkeypatch):
    assert run(["alpha", "--set", "box:0:10"], capsys)[0] == 1
    assert run(["alpha", "--set", "box:0:10", "--K", "blob:1"], capsys)[0] == 1
    code, _, err = run(["fill", "--omega", "box:0:9", "--K", "box:0:2", "--eps", "half"], capsys)
    assert code == 1 and "--eps" in err
    assert run([], capsys)[0] == 1
    assert run(["alpha", "--semigroup", "nat:1", "--set", "list:[-1]", "--K", "box:0:1"], capsys)[0] == 2
    assert run(["alpha", "--set", "list:[]", "--K", "box:0:1"], capsys)[0] == 2
    monkeypatch.setenv("OWLAB_BUDGET", "10")
    code, _, err = run(["entropy", "--sft", "hardsq", "--max", "6"], capsys)
    assert code == 3 and "budget" in err


def test_outputs_are_deterministic(tmp_path):
    argv = ["entropy", "--sft", "hardsq", "--max", "5", "--window", "2"]
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.csv"
        assert main(argv + ["--out", str(path)]) == 0
        outs.append((path.read_bytes(), (tmp_path / f"out{i}.csv.summary.json").read_bytes()))
    assert outs[0] == outs[1]


def test_render():
    assert render(Fraction(3, 6)) == "1/2"
    assert render(Fraction(4, 2)) == "2"
    assert render(0.1 + 0.2) == "0.3"
    assert render(2 / 3) == "0.666666666667"


def test_job_config_round_trip(tmp_path, capsys):
    argv = ["tile", "--semigroup", "zd:1", "--D", "box:0:64", "--K", "box:0:2", "--K", "box:0:8",
            "--eps", "1/2", "--mode", "best-effort"]
    cfg = JobConfig.from_argv(argv)
    again = JobConfig.from_argv(cfg.to_argv())
    assert again == cfg
    assert JobConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    path = tmp_path / "job.json"
    path.write_text(json.dumps(cfg.to_dict()))
    code, out, _ = run(["--config", str(path)], capsys)
    assert code == 0 and json.loads(out)["D_size"] == 64
    path.write_text(json.dumps({"command": "tile", "params": {"D": "box:0:8"}}))
    assert run(["--config", str(path)], capsys)[0] == 1
    path.write_text(json.dumps({"command": "plot"}))
    assert run(["--config", str(path)], capsys)[0] == 1


def test_parse_set_errors():
    with pytest.raises(ConfigError):
        parse_set("box:0:1,2")
    with pytest.raises(ConfigError):
        parse_set("box:0")
    assert len(parse_set("box:0,0:2,3")) == 6


def test_help_documents_csv_columns(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["entropy", "--help"])
    assert "n,card,count,h,ratio" in capsys.readouterr().out


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "owlab.cli", "alpha", "--set", "box:0:100", "--K", "box:0:10"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out) == {"alpha": {"num": 9, "den": 100}}
