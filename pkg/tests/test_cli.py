import json

import pytest

from prooflab.cli import cli_main


def run(capsys, *argv):
    code = cli_main(list(argv))
    out = capsys.readouterr()
    return code, out.out


def test_pc_refuted_exit_code(tmp_path, capsys):
    system = {"field": {"kind": "Q"}, "num_vars": 1, "booleanity": True,
              "polys": [[{"coef": "1", "mono": [1]}],
                        [{"coef": "1", "mono": []}, {"coef": "-1", "mono": [1]}]]}
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(system))
    code, out = run(capsys, "pc", str(path), "--engine", "monpc", "--degree", "2")
    assert code == 10
    assert json.loads(out)["refuted"] is True


def test_pc_not_refuted_exit_code(tmp_path, capsys):
    system = {"field": {"kind": "Q"}, "num_vars": 1, "booleanity": True,
              "polys": [[{"coef": "1", "mono": [1]}]]}
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(system))
    code, out = run(capsys, "pc", str(path), "--degree", "2")
    assert code == 11


def test_res_horn_on_dimacs(tmp_path, capsys):
    path = tmp_path / "f.cnf"
    path.write_text("p cnf 1 2\n1 0\n-1 0\n")
    code, out = run(capsys, "res", "horn", str(path))
    assert code == 10
    assert json.loads(out)["derived_units"] == [1]


def test_wl_identical_graphs(tmp_path, capsys):
    g = tmp_path / "g.graph"
    g.write_text("3 3\n0 1\n1 2\n0 2\n")
    code, out = run(capsys, "wl", "--g", str(g), "--h", str(g), "--dim-max", "3")
    assert code == 11
    assert json.loads(out)["distinguishing_dim"] is None


def test_encode_nonreach_round_trip(tmp_path, capsys):
    g = tmp_path / "g.graph"
    g.write_text("2 1\n0 1\n")
    code, out = run(capsys, "encode", "nonreach", "--graph", str(g), "--s", "0", "--t", "1")
    assert code == 0
    assert out.startswith("p cnf")


def test_cfi_aut_dimension(capsys):
    code, out = run(capsys, "cfi", "aut", "--base", "k4", "--p", "2")
    assert code == 0
    assert json.loads(out)["dimension"] == 3


def test_game_solve(tmp_path, capsys):
    path = tmp_path / "game.json"
    path.write_text(json.dumps({"n": 2, "edges": [[0, 1]], "theta": [1, 0], "start": 0}))
    code, out = run(capsys, "game", "solve", str(path))
    assert code == 0
    verdict = json.loads(out)
    assert verdict["w0"] == [0, 1]


def test_csp_check_odd_cycle(tmp_path, capsys):
    inst = tmp_path / "c3.json"
    tmpl = tmp_path / "k2.json"
    c3 = {"n": 3, "relations": {"E": {"arity": 2,
          "tuples": [[0, 1], [1, 0], [1, 2], [2, 1], [0, 2], [2, 0]]}}}
    k2 = {"n": 2, "relations": {"E": {"arity": 2, "tuples": [[0, 1], [1, 0]]}}}
    inst.write_text(json.dumps(c3))
    tmpl.write_text(json.dumps(k2))
    code, out = run(capsys, "csp", "check", "--instance", str(inst),
                    "--template", str(tmpl), "--k", "3")
    assert code == 10  # inconsistent: refuted side of the verdict convention
    assert json.loads(out)["consistent"] is False


def test_lfp_eval_and_encode(tmp_path, capsys):
    s = tmp_path / "s.json"
    phi = tmp_path / "phi.lfp"
    s.write_text(json.dumps({"n": 2, "relations": {"E": {"arity": 2, "tuples": [[0, 1]]}}}))
    phi.write_text("(lfp R (x) (or (= x s) (exists y (and (R y) (E y x)))) t)")
    code, out = run(capsys, "lfp", "eval", "--structure", str(s), "--formula", str(phi),
                    "--param", "s=0", "--param", "t=1")
    assert code == 10
    assert json.loads(out)["satisfied"] is True
    code, out = run(capsys, "lfp", "encode", "--structure", str(s), "--formula", str(phi),
                    "--param", "s=0", "--param", "t=1")
    assert code == 0
    assert out.startswith("p cnf")


def test_usage_errors_exit_2(tmp_path, capsys):
    assert cli_main(["res", "horn", str(tmp_path / "missing.cnf")]) == 2
    assert cli_main(["nonsense"]) == 2
    path = tmp_path / "wide.cnf"
    path.write_text("p cnf 2 1\n1 2 0\n")
    assert cli_main(["res", "horn", str(path)]) == 2  # non-Horn input


def test_min_degree_command(tmp_path, capsys):
    system = {"field": {"kind": "Q"}, "num_vars": 2, "booleanity": True,
              "polys": [[{"coef": "1", "mono": [1, 2]}, {"coef": "-1", "mono": []}],
                        [{"coef": "1", "mono": [1]}]]}
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(system))
    code, out = run(capsys, "min-degree", str(path), "--k-max", "4")
    assert code == 10
    assert json.loads(out)["min_degree"] == 2


def test_experiment_degree_growth_small(tmp_path, capsys):
    json_path = tmp_path / "growth.json"
    code, out = run(capsys, "experiment", "degree-growth", "--bases", "k4",
                    "--k-max", "2", "--dim-max", "1", "--timeout", "120",
                    "--out-json", str(json_path))
    assert code == 0
    (row,) = json.loads(json_path.read_text())
    assert row["base"] == "k4" and row["base_n"] == 4
    assert row["num_vars"] == 112
    assert row["min_degree"] is None and row["k_checked"] == 2  # not refuted at 2
    assert row["wl_dim"] is None  # dim 1 does not split the twisted pair


def test_experiment_config_file(tmp_path, capsys):
    json_path = tmp_path / "rows.json"
    config = tmp_path / "exp.cfg"
    config.write_text("timeout=90\n# comment\n")
    code, _ = run(capsys, "experiment", "csp-sweep", "--cycle-min", "3",
                  "--cycle-max", "3", "--config", str(config),
                  "--out-json", str(json_path))
    assert code == 0
    (row,) = json.loads(json_path.read_text())
    assert row["cycle"] == 3 and row["agree"]


def test_experiment_csp_sweep(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    json_path = tmp_path / "rows.json"
    code, out = run(capsys, "experiment", "csp-sweep", "--cycle-min", "3",
                    "--cycle-max", "5", "--out-csv", str(csv_path),
                    "--out-json", str(json_path), "--timeout", "120")
    assert code == 0
    rows = json.loads(json_path.read_text())
    assert [r["cycle"] for r in rows] == [3, 4, 5]
    assert all(r["agree"] for r in rows)
    assert csv_path.read_text().startswith("agree,")
