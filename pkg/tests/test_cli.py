"""End-to-end CLI tests: one subprocess per scenario, JSON in / JSON out."""

import json
import subprocess
import sys

import pytest

MOD = [sys.executable, "-m", "qlat.cli"]


def run(args, request=None, expect=0):
    data = None if request is None else json.dumps(request).encode()
    proc = subprocess.run(MOD + args, input=data, capture_output=True)
    assert proc.returncode == expect, (proc.returncode, proc.stderr.decode())
    return proc


def run_json(args, request, expect=0):
    proc = run(args, request, expect)
    stream = proc.stdout if expect == 0 else proc.stderr
    text = stream.decode()
    assert text.endswith("\n")
    return json.loads(text)


# ---------------------------------------------------------------------------
# local subcommands


def test_local_classify_split_apartment():
    doc = run_json(
        ["local", "classify"],
        {"p": 3, "generators": [[[1, 0], [0, 2]]]},
    )
    assert doc["p"] == 3 and doc["rank"] == 2
    shape = doc["shape"]
    assert shape["kind"] == "thick_apartment"
    assert shape["thickness"] == 0
    assert shape["ends"] is not None and len(shape["ends"]) == 2
    assert shape["anchor"] == {"a": 0, "b": 0, "c": 0}


def test_local_classify_scalar_is_full():
    doc = run_json(["local", "classify"], {"p": 5, "generators": [[[7, 0], [0, 7]]]})
    assert doc["shape"] == {"kind": "full", "p": 5}
    assert doc["rank"] == 1


def test_local_classify_rational_strings():
    doc = run_json(
        ["local", "classify"],
        {"p": 2, "generators": [[["1/1", "0"], [0, "2"]]]},
    )
    assert doc["shape"]["kind"] == "thick_apartment"


def test_local_branch_enum_eichler():
    doc = run_json(
        ["local", "branch-enum"],
        {
            "p": 3,
            "generators": [[[1, 0], [0, 0]], [[0, 1], [0, 0]]],
            "radius": 1,
        },
    )
    assert doc["count"] == 2
    assert doc["vertices"] == [{"a": 0, "b": 0, "c": 0}, {"a": 0, "b": 1, "c": 0}]


def test_local_branch_enum_depth_and_center():
    doc = run_json(
        ["local", "branch-enum"],
        {
            "p": 3,
            "generators": [[[1, 0], [0, 0]], [[0, 1], [0, 0]]],
            "radius": 2,
            "depth": 1,
            "center": {"a": 0, "b": 1, "c": 0},
        },
    )
    # depth 1 of a level-1 Eichler branch is empty
    assert doc["count"] == 0 and doc["vertices"] == []


def test_local_spinor_image():
    doc = run_json(
        ["local", "spinor-image"],
        {"p": 3, "generators": [[[0, 9], [18, 0]]], "level": 2, "shift": 1},
    )
    assert doc == {"diameter": 2, "image": "unit_squares", "level": 0}
    doc2 = run_json(
        ["local", "spinor-image"],
        {"p": 3, "generators": [[[7, 0], [0, 7]]], "level": 3, "shift": 2},
    )
    assert doc2 == {"diameter": "infinite", "image": "full", "level": None}
    doc3 = run_json(
        ["local", "spinor-image"],
        {"p": 3, "generators": [[[0, 9], [18, 0]]], "level": 3, "shift": 2},
    )
    assert doc3 == {"diameter": 0, "image": "no_embedding", "level": 0}
    doc4 = run_json(
        ["local", "spinor-image"],
        {"p": 3, "generators": [[[0, 9], [18, 0]]], "level": 0, "shift": 3},
    )
    assert doc4 == {"diameter": None, "image": "no_embedding", "level": None}


def test_local_decompose():
    # the full level-1 Eichler order: upper triangular plus 3*e21
    doc = run_json(
        ["local", "decompose"],
        {
            "p": 3,
            "generators": [[[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [3, 0]]],
        },
    )
    assert doc == {
        "endpoints": [{"a": 0, "b": 0, "c": 0}, {"a": 0, "b": 1, "c": 0}],
        "level": 1,
        "shift": 0,
    }


def test_local_decompose_rejects_commutative():
    err = run_json(
        ["local", "decompose"],
        {"p": 3, "generators": [[[1, 0], [0, 2]]]},
        expect=4,
    )
    assert err["error"] == "NotShiftedEichler"


def test_local_three_maximals():
    req = {
        "p": 3,
        "endpoints": [{"a": 0, "b": 0, "c": 0}, {"a": 0, "b": 2, "c": 0}],
        "shift": 1,
    }
    doc = run_json(["local", "three-maximals"], req)
    assert doc["level"] == 2
    assert len(doc["vertices"]) == 3
    err = run_json(["local", "three-maximals"], {**req, "level": 3}, expect=2)
    assert err["error"] == "SchemaError" and err["path"] == "level"


# ---------------------------------------------------------------------------
# tree subcommands


def test_tree_ball():
    doc = run_json(["tree", "ball"], {"p": 2, "radius": 2})
    assert doc["count"] == 10 and len(doc["vertices"]) == 10
    assert doc["vertices"][0] == {"a": 0, "b": 0, "c": 0}


def test_tree_ball_budget():
    err = run_json(
        ["tree", "ball"], {"p": 5, "radius": 3, "max_vertices": 10}, expect=3
    )
    assert err["error"] == "ResourceLimit"
    # an unbounded branch with a small cap trips the certified-region check
    err2 = run_json(
        ["local", "branch-enum"],
        {
            "p": 3,
            "generators": [[[7, 0], [0, 7]]],
            "radius": 4,
            "max_vertices": 10,
        },
        expect=3,
    )
    assert err2["error"] in ("ResourceLimit", "BudgetExceeded")


def test_tree_dot_inline_and_file(tmp_path):
    doc = run_json(["tree", "dot"], {"p": 2, "radius": 1})
    assert doc["vertices"] == 4 and "graph" in doc["dot"]
    target = tmp_path / "ball.dot"
    doc2 = run_json(["tree", "dot", "--dot", str(target)], {"p": 2, "radius": 1})
    assert doc2 == {"dot_file": str(target), "vertices": 4}
    assert target.read_text() == doc["dot"]


# ---------------------------------------------------------------------------
# global subcommands


def test_global_sigma_rationals():
    doc = run_json(
        ["global", "sigma"],
        {"field": {"kind": "Q"}, "algebra": {}, "genus": {}},
    )
    assert doc == {"forced_split": [], "group_order": 1, "sigma_degree": 1}


def test_global_sigma_quadratic():
    doc = run_json(
        ["global", "sigma"],
        {"field": {"kind": "quadratic", "d": 10}, "algebra": {}, "genus": {}},
    )
    assert doc == {"forced_split": [], "group_order": 2, "sigma_degree": 2}
    doc2 = run_json(
        ["global", "sigma"],
        {
            "field": {"kind": "quadratic", "d": 10},
            "algebra": {},
            "genus": {"level": {"3.1": 1}},
        },
    )
    assert doc2 == {"forced_split": ["3.1"], "group_order": 2, "sigma_degree": 1}


def test_global_sigma_definite_algebra():
    doc = run_json(
        ["global", "sigma"],
        {
            "field": {"kind": "quadratic", "d": 3},
            "algebra": {"ramified": ["inf1", "inf2"]},
            "genus": {},
        },
    )
    assert doc["sigma_degree"] == 2 and doc["group_order"] == 2


def test_global_rep_field_comm_quadratic():
    doc = run_json(
        ["global", "rep-field"],
        {
            "field": {"kind": "quadratic", "d": 10},
            "algebra": {},
            "genus": {},
            "suborder": {"kind": "commutative-quadratic", "delta": 2},
        },
    )
    assert doc["rep_field_degree"] == 2 and doc["ratio"] == "1/2"
    assert doc["sigma_degree"] == 2 and doc["strict_places"] == []


def test_global_rep_field_conductor():
    doc = run_json(
        ["global", "rep-field"],
        {
            "field": {"kind": "quadratic", "d": 10},
            "algebra": {},
            "genus": {},
            "suborder": {
                "kind": "commutative-quadratic",
                "delta": 2,
                "conductor": {"3.1": 1},
            },
        },
    )
    assert doc["rep_field_degree"] == 1 and doc["ratio"] == "1"
    assert doc["strict_places"] == ["3.1"]


def test_global_rep_field_rank4():
    base = {
        "field": {"kind": "quadratic", "d": 10},
        "algebra": {},
        "genus": {},
    }
    doc = run_json(
        ["global", "rep-field"],
        {**base, "suborder": {"kind": "rank4", "I": {"3.1": 1}}},
    )
    assert doc["rep_field_degree"] == 1 and doc["strict_places"] == ["3.1"]
    doc2 = run_json(
        ["global", "rep-field"],
        {**base, "suborder": {"kind": "rank4", "I": {"31.1": 1}}},
    )
    assert doc2["rep_field_degree"] == 2 and doc2["strict_places"] == ["31.1"]


def test_global_rep_field_rank3_requires_split():
    err = run_json(
        ["global", "rep-field"],
        {
            "field": {"kind": "quadratic", "d": 10},
            "algebra": {"ramified": ["inf1", "inf2"]},
            "genus": {},
            "suborder": {"kind": "rank3"},
        },
        expect=4,
    )
    assert err["error"] == "AlgebraNotSplit"


def test_global_rep_field_infeasible_reports_place():
    err = run_json(
        ["global", "rep-field"],
        {
            "field": {"kind": "quadratic", "d": 10},
            "algebra": {},
            "genus": {"level": {"3.1": 3}},
            "suborder": {"kind": "commutative-quadratic", "delta": 2},
        },
        expect=4,
    )
    assert err["error"] == "EmbeddingInfeasible"
    assert err["place"] == "3.1"


def test_global_unsupported_field_kind():
    err = run_json(
        ["global", "sigma"],
        {"field": {"kind": "cubic"}, "algebra": {}, "genus": {}},
        expect=4,
    )
    assert err["error"] == "UnsupportedField"


def test_global_unknown_suborder_kind():
    err = run_json(
        ["global", "rep-field"],
        {
            "field": {"kind": "Q"},
            "algebra": {},
            "genus": {},
            "suborder": {"kind": "rank5"},
        },
        expect=2,
    )
    assert err["error"] == "SchemaError" and err["path"] == "suborder.kind"


# ---------------------------------------------------------------------------
# request validation and exit codes


def test_invalid_json_reports_position():
    proc = subprocess.run(
        MOD + ["tree", "ball"], input=b"{", capture_output=True
    )
    assert proc.returncode == 2
    err = json.loads(proc.stderr.decode())
    assert err["error"] == "SchemaError" and err["path"] == "$"
    assert "line 1" in err["message"] and "char 1" in err["message"]


def test_zero_denominator_diagnostic():
    err = run_json(
        ["local", "classify"],
        {"p": 3, "generators": [[["1/0", 0], [0, 0]]]},
        expect=2,
    )
    assert err["path"] == "generators[0][0][0]"
    assert "zero denominator in '1/0'" in err["message"]


def test_float_rejected():
    err = run_json(
        ["local", "classify"],
        {"p": 3, "generators": [[[1.5, 0], [0, 0]]]},
        expect=2,
    )
    assert "floats are not exact" in err["message"]


def test_missing_keys():
    err = run_json(["tree", "ball"], {"p": 3}, expect=2)
    assert err["error"] == "SchemaError" and err["path"] == "radius"
    err2 = run_json(["local", "classify"], {"generators": [[[1, 0], [0, 1]]]}, expect=2)
    assert err2["path"] == "p"
    err3 = run_json(["local", "classify"], {"p": 4, "generators": []}, expect=2)
    assert "not prime" in err3["message"]


def test_unbounded_generators_exit_4():
    err = run_json(
        ["local", "classify"],
        {"p": 3, "generators": [[["1/3", 0], [0, 0]]]},
        expect=4,
    )
    assert err["error"] == "Unbounded"


def test_bad_vertex_exit_2():
    err = run_json(
        ["tree", "ball"],
        {"p": 3, "radius": 1, "center": {"a": 1, "b": 1, "c": 0}},
        expect=2,
    )
    assert err["error"] == "SchemaError" and err["path"] == "center"


# ---------------------------------------------------------------------------
# I/O plumbing and determinism


def test_in_out_files(tmp_path):
    req = tmp_path / "req.json"
    out = tmp_path / "resp.json"
    req.write_text(json.dumps({"p": 2, "radius": 1}))
    proc = run(["tree", "ball", "--in", str(req), "--out", str(out)])
    assert proc.stdout == b""
    direct = run(["tree", "ball"], {"p": 2, "radius": 1})
    assert out.read_bytes() == direct.stdout


def test_missing_input_file(tmp_path):
    proc = subprocess.run(
        MOD + ["tree", "ball", "--in", str(tmp_path / "absent.json")],
        capture_output=True,
    )
    assert proc.returncode == 2


def test_byte_determinism_and_threads():
    req = {
        "p": 3,
        "generators": [[[1, 0], [0, 0]], [[0, 1], [0, 0]]],
        "radius": 3,
    }
    runs = [
        run(["local", "branch-enum"], req).stdout,
        run(["local", "branch-enum"], req).stdout,
        run(["local", "branch-enum", "--threads", "1"], req).stdout,
        run(["local", "branch-enum", "--threads", "4"], req).stdout,
    ]
    assert len(set(runs)) == 1


def test_output_is_canonical_json():
    proc = run(["tree", "ball"], {"p": 2, "radius": 2})
    text = proc.stdout.decode()
    doc = json.loads(text)
    assert (
        json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n" == text
    )


def test_pretty_reparses_identically():
    req = {"p": 2, "radius": 2}
    plain = json.loads(run(["tree", "ball"], req).stdout)
    pretty_out = run(["tree", "ball", "--pretty"], req).stdout.decode()
    assert "\n  " in pretty_out  # actually indented
    assert json.loads(pretty_out) == plain


def test_package_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qlat", "tree", "ball"],
        input=json.dumps({"p": 2, "radius": 0}).encode(),
        capture_output=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {
        "count": 1,
        "vertices": [{"a": 0, "b": 0, "c": 0}],
    }


def test_env_budget_cap():
    import os

    env = dict(os.environ, QLAT_MAX_VERTICES="5")
    proc = subprocess.run(
        MOD + ["tree", "ball"],
        input=json.dumps({"p": 3, "radius": 2}).encode(),
        capture_output=True,
        env=env,
    )
    assert proc.returncode == 3
    assert json.loads(proc.stderr)["error"] == "ResourceLimit"
