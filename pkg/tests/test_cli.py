import json

import pytest

from lsmrecovery.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_regime_json(capsys):
    code, out, _ = run(capsys, "regime", "--n", "300", "--mu", "1", "--sigma", "0.3")
    assert code == 0
    rep = json.loads(out)
    assert rep["label"] == "indeterminate"


def test_regime_grid_csv(capsys):
    code, out, _ = run(capsys, "regime-grid", "--grid", "mu=0.5:1.0:0.5",
                       "--grid", "sigma=0.1:0.3:0.1")
    assert code == 0
    assert len(out.strip().splitlines()) == 1 + 2 * 3


def test_bad_grid_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["regime-grid", "--grid", "mu=1:oops"])
    assert exc.value.code != 0


def test_invalid_parameter_exit_code(capsys):
    code, _, err = run(capsys, "regime", "--sigma", "-1")
    assert code == 2 and "error" in err


def test_gen_certify_solve_mle(tmp_path, capsys):
    inst = tmp_path / "inst"
    assert run(capsys, "gen", "--n", "12", "--sigma", "0.1", "--seed", "3",
               "--out", str(inst))[0] == 0
    code, out, _ = run(capsys, "certify", str(inst))
    rep = json.loads(out)
    assert code == 0 and "margins" in rep and rep["gap_identity_ok"]
    code, out, _ = run(capsys, "solve", str(inst), "--labels-out", str(tmp_path / "y.txt"))
    sol = json.loads(out)
    assert code == 0 and "accuracy" in sol and "success" in sol
    assert len((tmp_path / "y.txt").read_text().split()) == 12
    code, out, _ = run(capsys, "mle", str(inst / "edges.txt"), "--nodes", "12")
    assert code == 0 and json.loads(out)["best_objective"] > 0


def test_certify_generated(capsys):
    code, out, _ = run(capsys, "certify", "--n", "40", "--sigma", "0.05")
    assert code == 0 and json.loads(out)["certified"] is not None


def test_certify_edge_list_without_labels(tmp_path, capsys):
    (tmp_path / "e.txt").write_text("0 1\n2 3\n")
    code, _, err = run(capsys, "certify", str(tmp_path / "e.txt"))
    assert code == 2 and "labels" in err


def test_mle_too_large(tmp_path, capsys):
    (tmp_path / "e.txt").write_text("0 1\n")
    code, _, err = run(capsys, "mle", str(tmp_path / "e.txt"), "--nodes", "30")
    assert code == 2


def test_moments_with_sampling(capsys):
    code, out, _ = run(capsys, "moments", "--samples", "5000")
    data = json.loads(out)
    assert code == 0 and set(data) >= {"closed_form", "monte_carlo"}


def test_sweep_to_file(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--n", "20", "--grid", "sigma=0.1:0.2:0.1",
                     "--trials-cert", "2", "--trials-sdp", "1", "--out", str(out))
    assert code == 0
    assert len(out.read_text().strip().splitlines()) == 2 + 2


def test_replicate_small(capsys):
    code, out, _ = run(capsys, "replicate-appendix-d", "--n", "40", "--trials", "2")
    rows = json.loads(out)["rows"]
    assert code == 0 and [r["sigma"] for r in rows] == [0.05, 0.3]


def test_score_real(tmp_path, capsys):
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    edges += [(i, j) for i in range(5, 9) for j in range(i + 1, 9)]
    (tmp_path / "e.txt").write_text("".join(f"{i} {j}\n" for i, j in edges))
    (tmp_path / "l.txt").write_text("".join(f"{i} {0 if i < 5 else 1}\n" for i in range(9))
                                    + "9 2\n")
    code, out, _ = run(capsys, "score-real", str(tmp_path / "e.txt"),
                       "--labels", str(tmp_path / "l.txt"))
    res = json.loads(out)
    assert code == 0 and res["accuracy"] == 1.0 and res["cluster_sizes"] == [5, 4]
