"""Command line behavior: exit codes, report shape, determinism, config
precedence.  Everything drives main(argv) in-process."""

import json

import numpy as np
import pytest

from morseflow import cli, maslov

TORUS_ARGS = ["--manifold", "torus2", "--function", "cos(2*pi*x1) + cos(2*pi*x2)"]


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_critpoints_json(capsys):
    code, out, _ = run_cli(capsys, ["critpoints"] + TORUS_ARGS)
    assert code == 0
    lines = out.strip().split("\n")
    head = json.loads(lines[0])
    assert head["config"]["manifold"] == "torus2"
    records = [json.loads(ln) for ln in lines[1:]]
    assert len(records) == 4
    assert sorted(r["index"] for r in records) == [0, 1, 1, 2]


def test_nonperiodic_function_is_usage_error(capsys):
    code, out, err = run_cli(capsys, ["critpoints", "--manifold", "torus2",
                                      "--function", "x1"])
    assert code == 2
    assert "periodic" in err


def test_bad_expression_is_usage_error(capsys):
    code, _, err = run_cli(capsys, ["critpoints", "--manifold", "torus2",
                                    "--function", "cos(2*pi*x1"])
    assert code == 2


def test_unknown_manifold_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, ["critpoints", "--manifold", "klein",
                                  "--function", "x1"])
    assert code == 2


def test_missing_function_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, ["critpoints", "--manifold", "torus2"])
    assert code == 2


def test_unknown_subcommand_exits_2(capsys):
    assert cli.main(["frobnicate"]) == 2


def test_scale_variant_projective_field_rejected(capsys):
    code, _, err = run_cli(capsys, ["critpoints", "--manifold", "rp2",
                                    "--function", "x1^2 + x2^2 + x3^2"])
    assert code == 2
    assert "scale" in err


def test_domain_error_exits_1(capsys):
    # the rp3 weight field has an index-3 source; the seed scan refuses
    num = "1*x2^2 + 2*x3^2 + 3*x4^2"
    den = "x1^2 + x2^2 + x3^2 + x4^2"
    code, _, err = run_cli(capsys, ["homology", "--manifold", "rp3",
                                    "--function", f"({num}) / ({den})"])
    assert code == 1
    assert err.startswith("morseflow: error:")


def test_homology_report_shape(capsys):
    code, out, _ = run_cli(capsys, ["homology"] + TORUS_ARGS)
    assert code == 0
    d = json.loads(out)
    assert d["ranks"] == [1, 2, 1]
    assert d["euler"] == 0
    assert d["morse"] is True
    assert d["inequalities"]["all_ok"] is True
    assert d["boundary_matrices"]["1"] == ["00"]
    assert [c["raw_count"] for c in d["counts"]] == [2, 2, 2, 2]


def test_byte_identical_reruns(capsys):
    _, out1, _ = run_cli(capsys, ["homology"] + TORUS_ARGS)
    _, out2, _ = run_cli(capsys, ["homology"] + TORUS_ARGS)
    assert out1 == out2


def test_flow_csv_shape(capsys):
    code, out, _ = run_cli(capsys, ["flow", "--manifold", "sphere2",
                                    "--function", "x3", "--from", "1,0,0"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("# config:")
    assert lines[2] == "t,x1,x2,x3,f"
    last = lines[-1].split(",")
    assert float(last[3]) < -0.999  # ends near the south pole


def test_flow_bad_start_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, ["flow", "--manifold", "sphere2",
                                  "--function", "x3", "--from", "1,0"])
    assert code == 2
    code, _, _ = run_cli(capsys, ["flow", "--manifold", "sphere2",
                                  "--function", "x3", "--from", "a,b,c"])
    assert code == 2


def test_connections_report(capsys):
    code, out, _ = run_cli(capsys, ["connections"] + TORUS_ARGS)
    assert code == 0
    d = json.loads(out)
    assert {(c["source"], c["sink"]) for c in d["counts"]} == \
        {(1, 0), (2, 0), (3, 1), (3, 2)}
    assert all(c["count_mod2"] == 0 for c in d["counts"])


def test_arnold_values(capsys):
    code, out, _ = run_cli(capsys, ["arnold"] + TORUS_ARGS)
    assert json.loads(out)["arnold_bound"] == 4
    code, out, _ = run_cli(capsys, ["arnold", "--manifold", "sphere2",
                                    "--function", "x3"])
    assert json.loads(out)["arnold_bound"] == 2


def test_floer_circle(capsys):
    code, out, _ = run_cli(capsys, ["floer", "--base", "circle",
                                    "--function", "cos(2*pi*x1)"])
    assert code == 0
    d = json.loads(out)
    assert d["hf_ranks"] == [1, 1]
    assert d["total_rank"] == 2
    assert d["t1_matches_morse"] is True
    assert all(s["agrees"] for s in d["strip_checks"])


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("scan = 128\nepsilon = 0.07  # tighter pushoff\n",
                   encoding="utf-8")
    code, out, _ = run_cli(capsys, ["arnold"] + TORUS_ARGS +
                           ["--config", str(cfg), "--epsilon", "0.09"])
    assert code == 0
    d = json.loads(out)
    assert d["config"]["scan"] == 128       # from the file
    assert d["config"]["epsilon"] == 0.09   # flag wins


def test_config_file_unknown_key_rejected(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("granularity = 8\n", encoding="utf-8")
    code, _, _ = run_cli(capsys, ["arnold"] + TORUS_ARGS + ["--config", str(cfg)])
    assert code == 2


def test_maslov_loop_file(capsys, tmp_path):
    thetas = np.linspace(0.0, 1.0, 65)
    path = tmp_path / "half_turn.csv"
    rows = []
    for t in thetas:
        fr = np.array([[np.cos(np.pi * t)], [np.sin(np.pi * t)]])
        rows.append(",".join([repr(float(t))] + [repr(float(v)) for v in fr.ravel()]))
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    code, out, _ = run_cli(capsys, ["maslov", "--loop", str(path)])
    assert code == 0
    d = json.loads(out)
    assert d["index"] == 1
    assert d["n"] == 1


def test_maslov_missing_loop_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, ["maslov"])
    assert code == 2


def test_maslov_open_loop_is_domain_error(capsys, tmp_path):
    thetas = np.linspace(0.0, 1.0, 33)
    path = tmp_path / "open.csv"
    rows = []
    for t in thetas:
        fr = np.array([[np.cos(np.pi * t / 2)], [np.sin(np.pi * t / 2)]])
        rows.append(",".join([repr(float(t))] + [repr(float(v)) for v in fr.ravel()]))
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    code, _, _ = run_cli(capsys, ["maslov", "--loop", str(path)])
    assert code == 1
