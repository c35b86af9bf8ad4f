import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from renyi_lab import __version__
from renyi_lab.cli import main
from renyi_lab.states import w_state


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_examples(capsys):
    code, out, _ = run(["eval", "--state", "ghz", "--measure", "renyi-ent", "--alpha", "2", "--cut", "0"], capsys)
    assert code == 0 and out.splitlines()[0] == "1.000000000000"
    code, out, _ = run(["eval", "--state", "werner:0.5", "--measure", "concurrence"], capsys)
    assert code == 0 and out.splitlines()[0] == "0.250000000000"
    code, out, _ = run(["eval", "--state", "w", "--measure", "ckw-residual"], capsys)
    assert code == 0 and out.splitlines()[0] == "0.000000000000"
    assert "branch=ckw" in out


def test_eval_provenance_json(capsys):
    code, out, _ = run(["eval", "--state", "werner:0.5", "--measure", "renyi-ent", "--alpha", "0.9",
                        "--format", "json"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["conjectural"] is True and rec["branch"] == "f_alpha(wootters)"
    assert rec["value"] == pytest.approx(0.0, abs=1) and rec["formula"] == "renyi"


def test_eval_more_measures(capsys):
    code, out, _ = run(["eval", "--state", "w", "--measure", "renyi-monogamy-residual", "--alpha", "2"], capsys)
    assert float(out.splitlines()[0]) == pytest.approx(np.log2(49 / 45), abs=1e-12)
    code, out, _ = run(["eval", "--state", "bell", "--measure", "coa"], capsys)
    assert out.splitlines()[0] == "1.000000000000"
    code, out, _ = run(["eval", "--state", "ghz:4", "--measure", "renyi-ent", "--alpha", "1", "--cut", "0,1"], capsys)
    assert out.splitlines()[0] == "1.000000000000"
    code, out, _ = run(["eval", "--state", "werner:0.5", "--measure", "roof-min", "--alpha", "2"], capsys)
    assert code == 0 and float(out.splitlines()[0]) == pytest.approx(0.0458037, abs=2e-3)


def test_eval_state_files(tmp_path, capsys):
    f = tmp_path / "w.json"
    psi = w_state()
    f.write_text(json.dumps({"n_qubits": 3, "amplitudes": [[z.real, z.imag] for z in psi.amplitudes]}))
    code, out, _ = run(["eval", "--state", str(f), "--measure", "concurrence", "--cut", "0"], capsys)
    assert code == 0 and float(out.splitlines()[0]) == pytest.approx(np.sqrt(8 / 9), abs=1e-12)
    m = tmp_path / "rho.json"
    rho = np.eye(4) / 4
    m.write_text(json.dumps({"n_qubits": 2, "matrix": [[[v, 0.0] for v in row] for row in rho]}))
    code, out, _ = run(["eval", "--state", str(m), "--measure", "coa"], capsys)
    assert code == 0 and out.splitlines()[0] == "1.000000000000"


def test_eval_errors(tmp_path, capsys):
    assert run(["eval", "--state", "nope", "--measure", "concurrence"], capsys)[0] == 2
    assert run(["eval", "--state", "werner:1.5", "--measure", "concurrence"], capsys)[0] == 2
    assert run(["eval", "--state", "ghz:7", "--measure", "concurrence"], capsys)[0] == 2
    assert run(["eval", "--state", "ghz", "--measure", "renyi-ent"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"amplitudes": [[1, 0], [1, 0]]}')
    code, _, err = run(["eval", "--state", str(bad), "--measure", "concurrence"], capsys)
    assert code == 2 and "normalized" in err
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--state", "ghz", "--measure", "bogus"])
    assert exc.value.code == 2


def test_check_pass_and_rows(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, _, _ = run(["check", "renyi-monogamy", "--alpha", "3,2", "--n", "3", "--samples", "50", "--seed", "7",
                      "--out", str(out)], capsys)
    assert code == 0
    table = rows(out.read_text())
    assert [r["alpha"] for r in table] == ["2", "3"]
    for r in table:
        assert r["violations"] == "0" and r["version"] == __version__ and r["seed"] == "7"
        assert r["tolerance"] == format(1e-9, ".17g")
        assert float(r["min_residual"]) >= -1e-9
    assert not (tmp_path / "m.csv.violations.json").exists()


def test_check_violation_sidecar(tmp_path, capsys):
    out = tmp_path / "eof.csv"
    code, _, err = run(["check", "renyi-monogamy", "--alpha", "1.0", "--samples", "300", "--seed", "7",
                        "--out", str(out)], capsys)
    assert code == 1 and "violation" in err
    (row,) = rows(out.read_text())
    side = json.loads((tmp_path / "eof.csv.violations.json").read_text())
    assert len(side) == int(row["violations"]) > 0
    rec = side[0]
    assert rec["residual"] < -1e-9
    # replay the dumped state through eval
    f = tmp_path / "state.json"
    f.write_text(json.dumps(rec["state"]))
    code, txt, _ = run(["eval", "--state", str(f), "--measure", "renyi-monogamy-residual", "--alpha", "1.0",
                        "--focus", str(rec["focus"]), "--format", "json"], capsys)
    assert json.loads(txt)["value"] == pytest.approx(rec["residual"], abs=1e-12)


def test_check_empty(capsys):
    code, out, _ = run(["check", "ckw", "--samples", "0"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert row["n_checks"] == "0" and row["violations"] == "0"


def test_check_json_and_usage(capsys):
    code, out, _ = run(["check", "coa-polygamy", "--samples", "5", "--format", "json", "--all-foci"], capsys)
    data = json.loads(out)
    assert code == 0 and data[0]["n_checks"] == 15
    assert run(["check", "renyi-polygamy", "--samples", "5"], capsys)[0] == 2


def test_outputs_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        main(["check", "renyi-polygamy", "--alpha", "0.83,1.2", "--samples", "30", "--seed", "3", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    for p in paths:
        main(["sweep", "h-scan", "--alpha", "1.9,2", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    capsys.readouterr()


def test_sweep_scan(capsys):
    code, out, _ = run(["sweep", "h-scan", "--alpha", "1.9"], capsys)
    (row,) = rows(out)
    assert code == 0 and row["verdict"] == "violated"
    assert -1e-10 < float(row["grid_min_or_max"]) < -1e-12
    assert set(row) == {"alpha", "grid_min_or_max", "location_x", "location_y", "verdict", "version", "seed",
                        "tolerance"}
    code, out, _ = run(["sweep", "convexity-scan", "--alpha", "0.82,0.83"], capsys)
    assert [r["verdict"] for r in rows(out)] == ["violated", "holds"]
    assert rows(out)[0]["location_y"] == ""


def test_sweep_thresholds(capsys):
    code, out, _ = run(["sweep", "convexity-threshold", "--lo", "0.5", "--hi", "2", "--iters", "20"], capsys)
    (row,) = rows(out)
    assert code == 0 and 0.82 <= float(row["lo"]) < float(row["hi"]) <= 0.83
    code, out, _ = run(["sweep", "polygamy-threshold", "--lo", "1.0", "--hi", "2.0", "--iters", "20"], capsys)
    (row,) = rows(out)
    assert code == 0 and 1.43 <= float(row["lo"]) < float(row["hi"]) <= 1.44


def test_sweep_bad_bracket(capsys):
    code, _, err = run(["sweep", "convexity-threshold", "--lo", "2", "--hi", "3", "--iters", "5"], capsys)
    assert code == 2 and "expected violated at lo=2.0" in err


def test_entry_points():
    out = subprocess.run(["renyi-lab", "eval", "--state", "bell", "--measure", "concurrence"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[0] == "1.000000000000"
    out = subprocess.run([sys.executable, "-m", "renyi_lab", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
