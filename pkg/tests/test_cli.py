import json
import subprocess
import sys

import numpy as np
import pytest

from monotone_lab.cli import main, parse_params, resolve_seed
from monotone_lab.exceptions import ValidationError
from monotone_lab.statefile import save_state
from monotone_lab.states import bipartition, make_bell, make_max_entangled, make_omega, make_w


@pytest.fixture
def files(tmp_path):
    paths = {
        "bell": tmp_path / "bell.json",
        "qutrit": tmp_path / "qutrit.json",
        "omega": tmp_path / "omega.json",
        "w_ab": tmp_path / "w_ab.json",
    }
    save_state(make_bell(), paths["bell"])
    save_state(make_max_entangled(3), paths["qutrit"])
    save_state(make_omega(*np.sqrt([0.5, 0.3, 0.2])), paths["omega"])
    save_state(bipartition(make_w(), "A|B"), paths["w_ab"])
    return paths


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def values(stdout):
    return {r["measure"]: r["value"] for r in json.loads(stdout)["results"]}


def test_measure_bell(files, capsys):
    code, out, _ = run(["measure", files["bell"], "--measure", "E2_NORM,TANGLE"], capsys)
    assert code == 0
    v = values(out)
    assert v["E2_NORM"] == pytest.approx(1.0) and v["TANGLE"] == pytest.approx(1.0)
    labels = [r["label"] for r in json.loads(out)["results"]]
    assert labels[0] == "E2_NORM (normalized d=2)"


def test_measure_qutrit_e_min(files, capsys):
    code, out, _ = run(["measure", files["qutrit"], "--measure", "E_MIN"], capsys)
    assert code == 0 and values(out)["E_MIN"] == pytest.approx(1 / 3)


def test_measure_omega_cut(files, capsys):
    code, out, _ = run(["measure", files["omega"], "--measure", "PARTIAL_NEGATIVITY", "--cut", "A|BC"], capsys)
    assert code == 0
    assert values(out)["PARTIAL_NEGATIVITY"] == pytest.approx(0.3872983, abs=1e-7)
    assert "cut A|BC" in json.loads(out)["results"][0]["label"]


def test_measure_writes_out(files, tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(["measure", files["bell"], "--out", target], capsys)
    assert code == 0 and target.read_text() == out


def test_exit_code_validation(files, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "pure", "dims": [2], "data": [[1, 0], [1, 0]]}')
    code, _, err = run(["measure", bad], capsys)
    assert code == 2 and "PureState.normalized" in err
    code, _, err = run(["measure", files["omega"]], capsys)
    assert code == 2 and "Cut.required" in err
    code, _, _ = run(["measure", files["bell"], "--measure", "NOPE"], capsys)
    assert code == 2
    code, _, _ = run(["measure", files["bell"], "--unknown-flag"], capsys)
    assert code == 2


def test_exit_code_capability(files, capsys):
    code, _, err = run(["measure", files["w_ab"], "--measure", "TANGLE"], capsys)
    assert code == 3 and "roof" in err


def test_exit_code_io(tmp_path, capsys):
    code, _, _ = run(["measure", tmp_path / "missing.json"], capsys)
    assert code == 4
    code, _, _ = run(["figures", "--fig", "1", "--out", tmp_path / "no" / "dir.csv"], capsys)
    assert code == 4


def test_roof_command(files, capsys):
    code, out, _ = run(["roof", files["w_ab"], "--measure", "TANGLE,SCHMIDT_NUMBER", "--restarts", "2"], capsys)
    assert code == 0
    res = json.loads(out)["results"]
    assert res[0]["value"] == pytest.approx(4 / 9, abs=1e-6)
    assert (res[1]["lower"], res[1]["upper"]) == (2, 2)


def test_monogamy_omega(tmp_path, capsys):
    csv_path = tmp_path / "omega.csv"
    code, out, _ = run(["monogamy", "--family", "omega", "--out", csv_path], capsys)
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert rep["verdict"] == "VIOLATION_WITNESS"
    assert rep["e_ac"] == pytest.approx(np.sqrt(0.06))
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("family,measure,")
    assert lines[1].startswith("omega,PARTIAL_NEGATIVITY,")


def test_monogamy_w(capsys):
    code, out, _ = run(["monogamy", "--family", "w", "--restarts", "2"], capsys)
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert rep["e_a_bc"] == 2
    assert rep["details"]["ab_bounds"] == [2, 2] and rep["details"]["ac_bounds"] == [2, 2]


def test_monogamy_phi_e2_case(capsys):
    code, out, _ = run(["monogamy", "--family", "phi", "--restarts", "1"], capsys)
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert rep["verdict"] == "VIOLATION_WITNESS"
    assert rep["e_ab"] == pytest.approx(0.5, abs=1e-9)


def test_monogamy_acin_default_consistent(capsys):
    code, out, _ = run(["monogamy", "--family", "acin", "--restarts", "2"], capsys)
    assert code == 0
    assert json.loads(out)["reports"][0]["verdict"] == "CONSISTENT"


def test_monogamy_acin_unmet_expectation_exits_1(capsys):
    lam = f"0.4:0:0.5:0.6:{float(np.sqrt(0.23))!r}"
    code, out, _ = run(["monogamy", "--family", "acin", "--params", f"lambdas={lam}", "--restarts", "2"], capsys)
    rep = json.loads(out)["reports"][0]
    assert rep["expected"] == "VIOLATION_WITNESS" and rep["verdict"] == "INCONCLUSIVE"
    assert code == 1


def test_monogamy_file_family_has_no_expectation(files, capsys):
    code, out, _ = run(["monogamy", files["omega"], "--family", "file", "--measure", "NEGATIVITY"], capsys)
    assert code == 0 and json.loads(out)["reports"][0]["expected"] is None


def test_monogamy_param_errors(capsys):
    assert run(["monogamy", "--family", "phi", "--params", "a2=0.5:0.3"], capsys)[0] == 2
    assert run(["monogamy", "--family", "phi", "--params", "zz=1"], capsys)[0] == 2
    assert run(["monogamy"], capsys)[0] == 2
    assert run(["monogamy", "--family", "acin", "--measure", "TANGLE"], capsys)[0] == 3


def test_figures_fig1(tmp_path, capsys):
    out = tmp_path / "fig1.csv"
    code, _, _ = run(["figures", "--fig", "1", "--resolution", "34", "--out", out], capsys)
    assert code == 0
    rows = out.read_text().split("\n")
    assert rows[0] == "param1,param2,e2_norm,e_min,e_min_reinforced,tangle,partial_negativity"
    body = [r for r in rows[1:] if r]
    assert len(body) == 34
    first, last = body[0].split(","), body[-1].split(",")
    assert float(first[0]) == 0 and abs(float(first[4]) - 2 / 3) < 1e-6
    assert float(last[0]) == pytest.approx(1 / 3, abs=1e-9) and abs(float(last[2]) - 1) < 1e-9


def test_figures_bytes_are_stable(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["figures", "--fig", "2", "--resolution", "8", "--out", a], capsys)
    run(["figures", "--fig", "2", "--resolution", "8", "--out", b], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_figures_resolution_validation(capsys):
    assert run(["figures", "--fig", "1", "--resolution", "1"], capsys)[0] == 2


def test_properties_mixing(capsys):
    code, out, _ = run(["properties", "--suite", "mixing", "--samples", "30", "--seed", "3"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["seed"] == 3 and report["checks"][0]["passed"] == 30


def test_seed_resolution(monkeypatch, capsys):
    assert resolve_seed(None, {}) == 42
    assert resolve_seed(None, {"MONOTONE_LAB_SEED": "9"}) == 9
    assert resolve_seed(4, {"MONOTONE_LAB_SEED": "9"}) == 4
    with pytest.raises(ValidationError):
        resolve_seed(None, {"MONOTONE_LAB_SEED": "x"})
    monkeypatch.setenv("MONOTONE_LAB_SEED", "11")
    code, out, _ = run(["properties", "--suite", "mixing", "--samples", "5"], capsys)
    assert code == 0 and json.loads(out)["seed"] == 11


def test_parse_params():
    assert parse_params("a2=0.5:0.3:0.2,regime=emin") == {"a2": "0.5:0.3:0.2", "regime": "emin"}
    with pytest.raises(ValidationError):
        parse_params("novalue")
    with pytest.raises(ValidationError):
        parse_params("a=1,a=2")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "monotone_lab", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "properties" in proc.stdout
