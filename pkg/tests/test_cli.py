import json
import subprocess
import sys

import numpy as np
import pytest

from grouplab.cli import main
from grouplab.config import (
    build_function,
    build_test_set,
    build_weights,
    functions_from_csv,
    functions_to_csv,
    l2_from_csv,
    l2_to_csv,
)
from grouplab.groups import make_group
from grouplab.catalog import build_catalog, peter_weyl_basis
from grouplab.hilbert import random_function


def write_config(tmp_path, name="exp", **kwargs):
    cfg = {"name": name, "group": "sym:3"}
    cfg.update(kwargs)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    return path


def read_csv(path):
    lines = path.read_text().split("\n")
    assert lines[-1] == ""
    return lines[0].split(","), [line.split(",") for line in lines[1:-1]]


def test_cmd_catalog_zn4(tmp_path):
    cfg = write_config(tmp_path, group="zn:4")
    assert main(["catalog", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_catalog.json").read_text())
    assert len(obj["labels"]) == 4
    assert all(lab["degree"] == 1 for lab in obj["labels"])


def test_cmd_catalog_sym3_degrees(tmp_path):
    cfg = write_config(tmp_path, group="sym:3")
    assert main(["catalog", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_catalog.json").read_text())
    assert sorted(lab["degree"] for lab in obj["labels"]) == [1, 1, 2]


def test_cmd_catalog_circle_truncation(tmp_path):
    cfg = write_config(tmp_path, group="circle:8", truncation=3)
    assert main(["catalog", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_catalog.json").read_text())
    assert len(obj["labels"]) == 7
    ms = sorted(int(lab["label"].split(":")[1]) for lab in obj["labels"])
    assert ms == list(range(-3, 4))


def test_cmd_catalog_coefficient_dump(tmp_path):
    cfg = write_config(tmp_path, group="zn:4", dump_coefficients=True)
    assert main(["catalog", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    files = sorted(tmp_path.glob("exp_coeffs_*.csv"))
    assert len(files) == 4
    header, rows = read_csv(files[0])
    assert header == ["node", "i", "j", "re", "im"]
    assert len(rows) == 4


def test_cmd_parseval_complete_family(tmp_path):
    cfg = write_config(tmp_path, test_set="random:count=10,seed=3")
    assert main(["parseval", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "exp_parseval.csv")
    assert header == ["fn_id", "norm_sq", "coeff_sum_sq", "defect"]
    assert len(rows) == 10
    assert all(abs(float(r[3])) < 1e-10 for r in rows)


def test_cmd_parseval_member_testset_defects(tmp_path):
    # omission family, member test set: all members have defect 0
    cfg = write_config(tmp_path, omit=["irrep:2"], test_set="members")
    assert main(["parseval", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "exp_parseval.csv")
    assert len(rows) == 2
    for r in rows:
        assert abs(float(r[1]) - 1.0) < 1e-10
        assert abs(float(r[3])) < 1e-10


def test_cmd_parseval_empty_testset(tmp_path):
    cfg = write_config(tmp_path, test_set="random:count=0,seed=1")
    assert main(["parseval", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "exp_parseval.csv")
    assert header == ["fn_id", "norm_sq", "coeff_sum_sq", "defect"]
    assert rows == []


def test_cmd_semicomplete_complete_family(tmp_path):
    cfg = write_config(tmp_path, weights="unit", test_set="random:count=5,seed=0")
    assert main(["semicomplete", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_semicomplete.json").read_text())
    assert obj["max_defect"] < 1e-10
    assert len(obj["per_function"]) == 5
    assert obj["weight_diagnostic"]["admissible"]


def test_cmd_semicomplete_adversarial_member(tmp_path):
    cfg = write_config(
        tmp_path,
        omit=["irrep:2"],
        test_set=["member:block=2,i=0,j=0"],
    )
    # the member spec refers to the full Peter-Weyl block; build the function
    # from the retained family instead: use an explicit samples file
    group = make_group("sym:3")
    cat = build_catalog(group)
    full = peter_weyl_basis(cat)
    f = full.member(2, 0, 0)
    sample = tmp_path / "f.csv"
    functions_to_csv(["adversarial"], [f], sample)
    cfg = write_config(
        tmp_path, omit=["irrep:2"], test_set=f"samples:{sample}", epsilon=0.5
    )
    assert main(["semicomplete", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_semicomplete.json").read_text())
    assert abs(obj["max_defect"] - 1.0) < 1e-9
    assert obj["within_epsilon"] is False


def test_cmd_semicomplete_weight_violations_reported(tmp_path):
    table = tmp_path / "weights.json"
    table.write_text(json.dumps({"gamma": [2.0, 1.0], "beta": [[1.0, 1.0], [1.0, 1.0]]}))
    cfg = write_config(
        tmp_path, weights=f"table:{table}", test_set="random:count=3,seed=5"
    )
    assert main(["semicomplete", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_semicomplete.json").read_text())
    assert not obj["weight_diagnostic"]["admissible"]
    assert obj["weight_diagnostic"]["diagonal_violations"] == [
        {"index": 0, "residual": 1.0}
    ]


def test_cmd_semicomplete_deterministic(tmp_path):
    cfg = write_config(
        tmp_path, weights="diag-reciprocal:seed=9", test_set="random:count=8,seed=4"
    )
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(["semicomplete", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["semicomplete", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in ["exp_semicomplete.json", "exp_semicomplete.csv"]:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_cmd_isometry_span_testset(tmp_path):
    cfg = write_config(tmp_path, omit=["irrep:2"], test_set="members")
    assert main(["isometry", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "exp_isometry.csv")
    assert header == ["fn_id", "norm_sq", "seq_norm_sq", "defect"]
    assert all(float(r[3]) < 1e-9 for r in rows)


def test_cmd_isometry_orthogonal_vector(tmp_path):
    group = make_group("sym:3")
    cat = build_catalog(group)
    f = peter_weyl_basis(cat).member(2, 0, 0)
    sample = tmp_path / "f.csv"
    functions_to_csv(["orthogonal"], [f], sample)
    cfg = write_config(tmp_path, omit=["irrep:2"], test_set=f"samples:{sample}")
    assert main(["isometry", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "exp_isometry.csv")
    assert abs(float(rows[0][3]) - 1.0) < 1e-9


def test_cmd_lift_uniform_profile(tmp_path):
    cfg = write_config(
        tmp_path,
        group="circle:64",
        iwasawa={
            "K": "circle:64",
            "A": {"range": [-0.5, 0.5], "nodes": 8},
            "N": {"range": [-0.5, 0.5], "nodes": 8},
            "profile": "uniform",
            "truncation": 3,
        },
    )
    assert main(["lift", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_lift.json").read_text())
    assert obj["restriction_residual"] == 0.0
    assert obj["condition_i_residual"] == 0.0
    assert obj["condition_ii_residual"] < 1e-10
    assert obj["gram_residual"] < 1e-10
    assert obj["reproduction"]["max_over_grid"] < 1e-10


def test_cmd_lift_gauss_profile(tmp_path):
    cfg = write_config(
        tmp_path,
        group="circle:64",
        iwasawa={
            "K": "circle:64",
            "A": {"range": [-2, 2], "nodes": 32},
            "N": {"range": [-2, 2], "nodes": 32},
            "profile": "gauss:sigma=0.7",
            "truncation": 3,
        },
    )
    assert main(["lift", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "exp_lift.json").read_text())
    assert obj["condition_ii_residual"] < 1e-10
    assert obj["gram_residual"] < 1e-9
    assert obj["n_members"] == 7


def test_cmd_lift_malformed_range_exit2(tmp_path):
    cfg = write_config(
        tmp_path,
        iwasawa={
            "K": "circle:16",
            "A": {"range": [1.0, 2.0], "nodes": 8},
            "N": {"range": [-1, 1], "nodes": 8},
            "profile": "uniform",
        },
    )
    assert main(["lift", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_missing_config_exit2(tmp_path):
    assert main(["catalog", "--config", str(tmp_path / "nope.json")]) == 2


def test_bad_json_exit2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["catalog", "--config", str(path)]) == 2


def test_bad_group_spec_exit2(tmp_path):
    cfg = write_config(tmp_path, group="tetrahedral:5")
    assert main(["catalog", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_lift_without_iwasawa_block_exit2(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["lift", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_seed_override_changes_testset(tmp_path):
    cfg = write_config(tmp_path, test_set="random:count=4,seed=1")
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["parseval", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["parseval", "--config", str(cfg), "--out", str(out2), "--seed", "99"]) == 0
    assert (out1 / "exp_parseval.csv").read_bytes() != (out2 / "exp_parseval.csv").read_bytes()


def test_console_entry_point_runs(tmp_path):
    cfg = write_config(tmp_path, group="zn:4")
    result = subprocess.run(
        [sys.executable, "-m", "grouplab.cli", "catalog", "--config", str(cfg), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0


def test_l2_csv_roundtrip(tmp_path):
    group = make_group("zn:12")
    f = random_function(group, 8)
    path = tmp_path / "fn.csv"
    l2_to_csv(f, path)
    g = l2_from_csv(group, path)
    assert np.max(np.abs(f.values - g.values)) < 1e-15


def test_functions_csv_roundtrip(tmp_path):
    group = make_group("zn:12")
    fns = [random_function(group, s) for s in range(3)]
    ids = [f"fn{k}" for k in range(3)]
    path = tmp_path / "set.csv"
    functions_to_csv(ids, fns, path)
    got_ids, got_fns = functions_from_csv(group, path)
    assert got_ids == ids
    for f, g in zip(fns, got_fns):
        assert np.max(np.abs(f.values - g.values)) < 1e-15


def test_build_function_specs(tmp_path):
    group = make_group("sym:3")
    fam = peter_weyl_basis(build_catalog(group))
    fid, f = build_function("random:seed=3", group)
    assert fid == "random:3" and abs(f.norm() - 1.0) < 1e-12
    fid, f = build_function("member:block=irrep:2,i=0,j=1", group, fam)
    assert fid == "member:irrep:2[0][1]"
    assert (f - fam.member(2, 0, 1)).norm() < 1e-15


def test_build_weights_specs(tmp_path):
    w = build_weights("unit", 3)
    assert np.all(w.gamma == 1.0)
    w = build_weights("diag-reciprocal:seed=2", 4)
    assert np.max(np.abs(w.gamma * np.diag(w.beta) - 1.0)) < 1e-12
    with pytest.raises(ValueError):
        build_weights("nonsense", 2)


def test_build_test_set_list_of_specs():
    group = make_group("sym:3")
    fam = peter_weyl_basis(build_catalog(group))
    ids, fns, desc = build_test_set(
        ["random:seed=1", "member:block=0,i=0,j=0"], group, fam
    )
    assert len(fns) == 2
    assert desc == "list:2"


def test_exit_3_on_forced_gram_breach(tmp_path):
    # an absurdly small tolerance turns rounding into an invariant breach
    cfg = write_config(tmp_path, group="circle:16", truncation=3, test_set="random:count=1,seed=0")
    assert main(["parseval", "--config", str(cfg), "--out", str(tmp_path), "--tol", "1e-18"]) == 3


def test_su2_spec_parse_with_quad():
    group = make_group("su2:j=1,quad=4")
    assert group.name == "su2:j=1,quad=4"
    assert group.kind == "su2"


def test_cmd_isometry_zero_function(tmp_path):
    group = make_group("sym:3")
    from grouplab.hilbert import zero_function

    sample = tmp_path / "zero.csv"
    functions_to_csv(["zero"], [zero_function(group)], sample)
    cfg = write_config(tmp_path, omit=["irrep:2"], test_set=f"samples:{sample}")
    assert main(["isometry", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "exp_isometry.csv")
    assert float(rows[0][1]) == 0.0
    assert float(rows[0][3]) == 0.0
