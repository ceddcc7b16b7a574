import csv
import io
import json
from fractions import Fraction

import pytest

from hlab.cli import main
from hlab.codec import save_graph
from hlab.hypergraph import complete_graph, graph_from_edges
from hlab.measure import EdgePredicate
from hlab.steiner import SteinerSystem, save_system
from hlab.supersat import Instance, LemmaParameters, save_instance

K3 = complete_graph(3, 2)
C4 = graph_from_edges(4, 2, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    paths = {
        "k3": str(root / "K3.g6"),
        "c4": str(root / "C4.g6"),
        "fam_k3": str(root / "famK3.g6"),
        "system": str(root / "sys6.json"),
        "instance": str(root / "inst6.json"),
        "root": str(root),
    }
    save_graph(K3, paths["k3"])
    save_graph(C4, paths["c4"])
    save_graph(K3, paths["fam_k3"])
    sys6 = SteinerSystem(r=2, m=3, n=6,
                         blocks=((0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 4, 5)))
    save_system(sys6, paths["system"])
    from hlab.family import normalize_family
    inst = Instance(n=6, r=2, p=Fraction(1, 2),
                    predicate=EdgePredicate.min_edges(8),
                    family=normalize_family([K3]), system=sys6,
                    params=LemmaParameters(nu=Fraction(1, 4), m=3))
    save_instance(inst, paths["instance"])
    return paths


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv)
    assert code == 0, err
    return json.loads(out)


def test_measure_example(files, capsys):
    obj = run_json(capsys, ["measure", "--n", "3", "--r", "2", "--p", "1/2",
                            "--forb", files["fam_k3"], "--exact"])
    assert obj["value"] == "7/8"
    assert obj["method"] == "exact"


def test_measure_min_edges(files, capsys):
    obj = run_json(capsys, ["measure", "--n", "4", "--r", "2", "--p", "1/3",
                            "--min-edges", "0"])
    assert obj["value"] == "1/1"


def test_tau_example(files, capsys):
    obj = run_json(capsys, ["tau", "--graph", files["c4"]])
    assert obj["t"] == 2


def test_steiner_restarts_reach_fano(files, capsys):
    obj = run_json(capsys, ["steiner", "--r", "2", "--m", "3", "--n", "7",
                            "--algo", "greedy", "--restarts", "400",
                            "--seed", "0"])
    assert obj["d"] == 7
    assert obj["valid"] is True
    assert obj["uncovered_fraction"] == "0/1"


def test_steiner_writes_system(files, capsys, tmp_path):
    out = str(tmp_path / "out.json")
    obj = run_json(capsys, ["steiner", "--r", "2", "--m", "3", "--n", "9",
                            "--seed", "3", "--out", out])
    saved = json.loads(open(out, encoding="utf-8").read())
    assert saved["n"] == 9
    assert len(saved["blocks"]) == obj["d"]


def test_verify_steiner(files, capsys):
    obj = run_json(capsys, ["verify-steiner", "--system", files["system"]])
    assert obj["valid"] is True
    assert obj["d"] == 4
    assert obj["covered"] == 12


def test_cn_sequence(files, capsys):
    rows = run_json(capsys, ["cn", "--family", files["fam_k3"], "--p", "1/2",
                             "--n-list", "2,3,4"])
    assert [r["n"] for r in rows] == [2, 3, 4]
    assert rows[0]["mu"] == "1/1"
    assert rows[1]["mu"] == "7/8"
    assert rows[2]["mu"] == "41/64"
    assert float(rows[0]["c_n"]) == 0.0


def test_mc_smoke_and_determinism(files, capsys):
    argv = ["mc", "--n", "4", "--r", "2", "--p", "1/2", "--samples", "500",
            "--seed", "11", "--forb", files["fam_k3"]]
    a = run_json(capsys, argv)
    b = run_json(capsys, argv)
    assert a == b
    assert a["hits"] <= a["samples"] == 500
    assert float(a["ci_low"]) <= float(a["estimate"]) <= float(a["ci_high"])


def test_lemma_command(files, capsys):
    obj = run_json(capsys, ["lemma", "--instance", files["instance"]])
    assert obj["d"] == 4
    assert obj["gamma"] == "1/16"
    assert len(obj["theta"]) == 4


def test_partition_command(files, capsys):
    obj = run_json(capsys, ["partition", "--instance", files["instance"]])
    assert obj["identity_ok"] is True
    assert obj["weighted_sum"] == "1651/4096"
    assert obj["weighted_sum"] == obj["theta_sum"]


def test_tailmass_command(files, capsys):
    obj = run_json(capsys, ["tailmass", "--nu", "1/2", "--d", "4",
                            "--mu", "7/8", "--instance", files["instance"]])
    assert obj["value"] == "32193/4096"
    assert obj["dominates"] is True


def test_xset_command(files, capsys):
    obj = run_json(capsys, ["xset", "--instance", files["instance"],
                            "--gamma", "1/8"])
    assert obj["averaging_ok"] is True
    assert obj["x_size"] == len(obj["x_members"])


def test_floor_command(files, capsys):
    obj = run_json(capsys, ["floor", "--n", "10", "--m", "4", "--t", "2"])
    assert obj["ratio"] == "15/2"
    assert obj["floor"] == "25/16"
    assert obj["ok"] is True and obj["proviso_met"] is True


def test_exstar_command(files, capsys):
    obj = run_json(capsys, ["exstar", "--n", "4", "--graph", files["k3"]])
    assert obj["value"] == 4
    assert len(obj["E"]) == 4


def test_witness_command(files, capsys):
    ok = run_json(capsys, ["witness", "--n", "4", "--graph", files["k3"],
                           "--e", "0-2,0-3,1-2,1-3"])
    assert ok["ok"] is True
    bad = run_json(capsys, ["witness", "--n", "3", "--graph", files["k3"],
                            "--e", "0-1", "--e0", "0-2,1-2"])
    assert bad["ok"] is False
    assert bad["counterexample"] == [[0, 1]]


def test_count_induced_command(files, capsys):
    obj = run_json(capsys, ["count-induced", "--graph", files["c4"],
                            "--family", files["fam_k3"]])
    assert obj == {"count": 0, "contains": False}


def test_codec_command(files, capsys, tmp_path):
    obj = run_json(capsys, ["codec", "--input", files["k3"], "--to", "g6"])
    assert obj["g6"] == "Bw"
    as_json = run_json(capsys, ["codec", "--input", files["k3"],
                                "--to", "json"])
    assert as_json["n"] == 3 and as_json["r"] == 2
    out = str(tmp_path / "k3.json")
    run_json(capsys, ["codec", "--input", files["k3"], "--out", out])
    round_tripped = run_json(capsys, ["codec", "--input", out, "--to", "g6"])
    assert round_tripped["g6"] == "Bw"


def test_usage_error_no_predicate(files, capsys):
    code, out, err = run(capsys, ["measure", "--n", "3", "--r", "2",
                                  "--p", "1/2"])
    assert code == 2
    assert out == ""
    assert "usage error" in err


def test_usage_error_two_predicates(files, capsys):
    code, out, err = run(capsys, ["measure", "--n", "3", "--r", "2",
                                  "--p", "1/2", "--forb", files["fam_k3"],
                                  "--min-edges", "1"])
    assert code == 2
    assert out == ""


def test_usage_error_missing_seed(files, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["mc", "--n", "4", "--r", "2", "--p", "1/2", "--samples", "10",
              "--forb", files["fam_k3"]])
    assert exc.value.code == 2


def test_domain_error_missing_file(files, capsys):
    code, out, err = run(capsys, ["tau", "--graph",
                                  files["root"] + "/nope.g6"])
    assert code == 1
    assert out == ""
    assert "error" in err


def test_domain_error_infeasible(files, capsys):
    code, out, err = run(capsys, ["measure", "--n", "9", "--r", "2",
                                  "--p", "1/2", "--forb", files["fam_k3"],
                                  "--cap", "20"])
    assert code == 1
    assert out == ""
    assert "mc_measure" in err


def test_domain_error_bad_graph_file(files, capsys, tmp_path):
    bad = tmp_path / "broken.g6"
    bad.write_text("C~\x01zz\n")
    code, out, err = run(capsys, ["tau", "--graph", str(bad)])
    assert code == 1
    assert out == ""


def csv_cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return json.dumps(value, separators=(",", ":"))


def test_csv_and_json_values_agree(files, capsys):
    base = ["measure", "--n", "4", "--r", "2", "--p", "1/2",
            "--forb", files["fam_k3"]]
    obj = run_json(capsys, base + ["--format", "json"])
    code, out, err = run(capsys, base + ["--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert set(rows[0]) == set(obj)
    for key, val in obj.items():
        assert rows[0][key] == csv_cell(val)


def test_csv_and_json_agree_on_nested(files, capsys):
    base = ["verify-steiner", "--system", files["system"]]
    obj = run_json(capsys, base)
    code, out, err = run(capsys, base + ["--format", "csv"])
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    for key, val in obj.items():
        assert row[key] == csv_cell(val)


def test_output_byte_identical_across_workers(files, capsys):
    base = ["xset", "--instance", files["instance"], "--gamma", "1/8"]
    outs = []
    for workers in ("1", "4"):
        code, out, err = run(capsys, base + ["--workers", workers])
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    code, out, err = run(capsys, base + ["--workers", "1"])
    assert out == outs[0]


def test_cn_workers_identical(files, capsys):
    base = ["cn", "--family", files["fam_k3"], "--p", "1/2",
            "--n-list", "2,3,4,5"]
    a = run(capsys, base + ["--workers", "1"])
    b = run(capsys, base + ["--workers", "8"])
    assert a[1] == b[1]


def test_console_script_entry_point(files):
    import subprocess
    import sys as _sys

    proc = subprocess.run(
        [_sys.executable, "-m", "hlab.cli", "tau", "--graph", files["c4"]],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["t"] == 2
