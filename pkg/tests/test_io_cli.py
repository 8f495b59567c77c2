import csv
import json
from fractions import Fraction

import pytest

from chirprip import cli, io
from chirprip.addcomb import ResidueSet


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def payload(text):
    d = json.loads(text)
    d.pop("timing")
    return d


def test_parse_set_layouts():
    assert io.parse_set("[10, 1, 3, 13]") == ResidueSet(10, (1, 3))
    assert io.parse_set("10\n1\n# comment\n3\n") == ResidueSet(10, (1, 3))
    with pytest.raises(ValueError):
        io.parse_set("  ")
    A = ResidueSet(11, (2, 5))
    assert io.parse_set(io.format_set(A)) == A
    assert io.parse_set(io.format_set(A, as_json=True)) == A


def test_write_atomic(tmp_path):
    path = tmp_path / "r.json"
    io.write_atomic(path, "x")
    io.write_atomic(path, "y")
    assert path.read_text() == "y"
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]


def test_dumps_handles_fractions():
    assert json.loads(io.dumps({"q": Fraction(1, 3)})) == {"q": "1/3"}


def test_optimize_headline(capsys):
    code, out, _ = run(capsys, "optimize", "--m", "53000000", "--c0", "1/10430")
    assert code == 0
    d = json.loads(out)
    assert d["ok"] and d["seed"] == io.DEFAULT_SEED
    assert d["tool"] == "chirprip" and d["version"]
    assert {"started", "wall_seconds"} <= set(d["timing"])
    assert float(d["result"]["eps0"]["decimal"]) == pytest.approx(4.4466e-24, rel=5e-5)


def test_optimize_odd_m_is_usage_error(capsys):
    code, out, err = run(capsys, "optimize", "--m", "3")
    assert code == 2 and not out and "even" in err


def test_unknown_flag_is_usage_error(capsys):
    code, _, _ = run(capsys, "optimize", "--m", "4", "--bogus", "1")
    assert code == 2


def test_bad_c0(capsys):
    assert run(capsys, "optimize", "--m", "4", "--c0", "x/y")[0] == 2
    assert run(capsys, "optimize", "--m", "4", "--c0", "3/2")[0] == 2


def test_gram_check_p7(capsys):
    code, out, _ = run(capsys, "gram-check", "--p", "7", "--count", "500")
    assert code == 0
    assert json.loads(out)["result"]["max_closed_vs_direct"] < 1e-9


def test_composite_p_is_usage_error(capsys):
    assert run(capsys, "gram-check", "--p", "9")[0] == 2


def test_reports_are_reproducible(capsys):
    a = payload(run(capsys, "energy", "--count", "40", "--seed", "7")[1])
    b = payload(run(capsys, "energy", "--count", "40", "--seed", "7")[1])
    assert a == b and a["seed"] == 7 and a["config"]["count"] == 40


def test_energy_and_bias_on_file(tmp_path, capsys):
    f = tmp_path / "set.txt"
    f.write_text("12\n0\n4\n8\n")
    code, out, _ = run(capsys, "energy", str(f))
    d = json.loads(out)["result"]
    assert code == 0 and d["coset"] and d["sumset"] == 3 and d["energy"] == 27
    assert run(capsys, "bias", str(f))[0] == 0


def test_build_and_rip_roundtrip(tmp_path, capsys):
    out = tmp_path / "ens.json"
    code, _, _ = run(capsys, "build", "--p", "13", "--count", "10", "--out", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert report["result"]["columns"] == 10
    ens_file = tmp_path / "cols.json"
    ens_file.write_text(json.dumps(report["result"]["ensemble"]))
    code, text, _ = run(capsys, "rip", str(ens_file), "--K", "2", "--s", "2")
    r = json.loads(text)["result"]
    assert code == 0 and r["scaling"]["ok"] and r["gershgorin"]["ok"]
    code, text, _ = run(capsys, "rip", str(tmp_path / "ens.csv"), "--K", "2")
    assert code == 0
    assert json.loads(text)["result"]["report"]["delta"] == pytest.approx(r["report"]["delta"], abs=1e-12)
    code, text, _ = run(capsys, "flat-rip", str(ens_file), "--K", "3")
    assert code == 0 and json.loads(text)["result"]["lemma_b"]["ok"]


def test_csv_and_json_inputs_agree(tmp_path, capsys):
    out = tmp_path / "e.json"
    run(capsys, "build", "--p", "13", "--count", "9", "--out", str(out))
    ens_file = tmp_path / "cols.json"
    ens_file.write_text(json.dumps(json.loads(out.read_text())["result"]["ensemble"]))
    a = json.loads(run(capsys, "rip", str(ens_file), "--K", "3")[1])["result"]["report"]["delta"]
    b = json.loads(run(capsys, "rip", str(tmp_path / "e.csv"), "--K", "3")[1])["result"]["report"]["delta"]
    assert a == pytest.approx(b, abs=1e-12)


def test_rip_sampled(capsys):
    code, out, _ = run(capsys, "rip", "--p", "7", "--K", "3", "--mode", "sampled", "--count", "100")
    rep = json.loads(out)["result"]["report"]
    assert code == 0 and rep["lower_bound"] and rep["count"] == 100


def test_rip_blowup_is_usage_error(capsys):
    assert run(capsys, "rip", "--p", "13", "--K", "4")[0] == 2


def test_build_cube_overflow(capsys):
    assert run(capsys, "build", "--p", "13", "--M", "2", "--r", "2")[0] == 2


def test_verify_A_default(capsys):
    code, out, _ = run(capsys, "verify-A", "--m", "2")
    d = json.loads(out)["result"]
    assert code == 0 and d["A"] == [2188, 4378, 6570] and d["p"] == 22876792454987


def test_tau(capsys):
    code, out, _ = run(capsys, "tau", "--M", "2")
    assert code == 0 and json.loads(out)["result"]["tau"] == pytest.approx(0.6942419, abs=1e-6)
    code, out, _ = run(capsys, "tau", "--M", "2**60")
    assert code == 0 and json.loads(out)["result"]["branch"] == "asymptotic"
    assert run(capsys, "tau")[0] == 2


def test_lemma9_and_sums(capsys):
    assert run(capsys, "lemma9-check", "--p", "11", "--count", "50")[0] == 0
    assert run(capsys, "sums", "--p", "11", "--count", "10")[0] == 0


def test_sweep_single_point(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(capsys, "sweep", "--grid", "53000000:53000000:2", "--out", str(out))[0] == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["m", "eps1_sup_decimal", "eps1_sup_rational"]
    assert len(rows) == 2 and rows[1][0] == "53000000"
    n, d = rows[1][2].split("/")
    assert float(Fraction(int(n), int(d))) == pytest.approx(8.8933e-24, rel=5e-5)


def test_sweep_infeasible_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--grid", "1000:1000:2")
    assert code == 0
    assert out.splitlines()[1] == "1000,nan,infeasible"


@pytest.mark.parametrize("grid", ["5:1:2", "1:10:1", "1:2", "a:b:c"])
def test_sweep_bad_grid(capsys, grid):
    assert run(capsys, "sweep", "--grid", grid)[0] == 2


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "chirprip", "optimize", "--m", "3"], capture_output=True)
    assert r.returncode == 2
