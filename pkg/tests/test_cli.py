"""Command line interface: JSON output, exit codes, determinism."""

import json

import pytest

from reglab import (
    FiniteGroup,
    dihedral_relation,
    module_digest,
    module_to_json,
    relation_to_json,
    random_module,
    trivial_module,
)
from reglab.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def triv_d3(tmp_path):
    path = tmp_path / "triv.json"
    path.write_text(json.dumps(module_to_json(trivial_module(
        FiniteGroup.dihedral(3)))))
    return str(path)


@pytest.fixture
def theta_d3(tmp_path):
    path = tmp_path / "theta.json"
    path.write_text(json.dumps(relation_to_json(dihedral_relation(3))))
    return str(path)


@pytest.fixture
def finite_d3(tmp_path):
    M = random_module(FiniteGroup.dihedral(3), "finite", seed=7)
    path = tmp_path / "fin.json"
    path.write_text(json.dumps(module_to_json(M)))
    return str(path), module_digest(M)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def test_validate_reports_digest_and_shape(capsys, triv_d3):
    code, doc = _run(capsys, "validate", "--module", triv_d3)
    assert code == 0
    assert doc["valid"] is True
    assert doc["rank"] == 1 and doc["relations"] == 0
    assert doc["order"] is None  # infinite module
    assert len(doc["digest"]) == 64


def test_validate_rejects_group_law_violation(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "group": {"kind": "cyclic", "n": 2},
        "rank": 1, "relations": [], "action": {"0": [[1]], "1": [[2]]},
    }))
    code, doc = _run(capsys, "validate", "--module", str(path))
    assert code == 2
    assert doc["error"] == "ValidationError"
    assert "group law" in doc["message"]


def test_validate_rejects_malformed_json(capsys, tmp_path):
    path = tmp_path / "nj.json"
    path.write_text("not json")
    code, doc = _run(capsys, "validate", "--module", str(path))
    assert code == 2
    assert doc["error"] == "InputError"


def test_validate_missing_file(capsys, tmp_path):
    code, doc = _run(capsys, "validate", "--module", str(tmp_path / "no.json"))
    assert code == 2


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------


def test_cohomology_trivial_module_over_rotations(capsys, triv_d3):
    code, doc = _run(capsys, "cohomology", "--module", triv_d3,
                     "--subgroup", "1", "--degrees", "-1..2")
    assert code == 0
    assert doc["subgroup"] == [0, 1, 2]  # closure of the rotation
    degrees = doc["degrees"]
    assert degrees["-1"]["order"] == 1
    assert degrees["0"] == {"order": 3, "invariants": [0, [3]]}
    assert degrees["1"]["order"] == 1
    assert degrees["2"] == {"order": 3, "invariants": [0, [3]]}


def test_cohomology_defaults_to_full_group(capsys, triv_d3):
    code, doc = _run(capsys, "cohomology", "--module", triv_d3,
                     "--degrees", "0")
    assert code == 0
    assert doc["subgroup"] == [0, 1, 2, 3, 4, 5]
    assert doc["degrees"]["0"]["order"] == 6


def test_cohomology_comma_degree_list(capsys, triv_d3):
    code, doc = _run(capsys, "cohomology", "--module", triv_d3,
                     "--degrees", "0,2")
    assert code == 0
    assert sorted(doc["degrees"]) == ["0", "2"]


def test_cohomology_bad_degrees(capsys, triv_d3):
    code, doc = _run(capsys, "cohomology", "--module", triv_d3,
                     "--degrees", "x..y")
    assert code == 2


def test_cohomology_subgroup_element_out_of_range(capsys, triv_d3):
    code, doc = _run(capsys, "cohomology", "--module", triv_d3,
                     "--subgroup", "9")
    assert code == 2


# ---------------------------------------------------------------------------
# regulator
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("method", ["pairing", "qindex", "both"])
def test_regulator_trivial_module_is_one_third(capsys, triv_d3, theta_d3,
                                               method):
    code, doc = _run(capsys, "regulator", "--module", triv_d3,
                     "--relation", theta_d3, "--method", method)
    assert code == 0
    assert doc["value"] == "1/3"
    assert doc["factorization"] == {"3": -1}
    assert doc["method"] == method


def test_regulator_seed_independence(capsys, triv_d3, theta_d3):
    values = set()
    for seed in (0, 1, 17):
        _, doc = _run(capsys, "regulator", "--module", triv_d3,
                      "--relation", theta_d3, "--seed", str(seed))
        values.add(doc["value"])
    assert values == {"1/3"}


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------


def test_relations_klein_four(capsys):
    desc = json.dumps({"kind": "product", "factors": [
        {"kind": "cyclic", "n": 2}, {"kind": "cyclic", "n": 2}]})
    code, doc = _run(capsys, "relations", "--group", desc)
    assert code == 0
    assert doc["rank"] == 1
    assert doc["basis"] == [[1, -1, -1, -1, 2]]
    assert len(doc["subgroup_classes"]) == 5


def test_relations_cyclic_group_has_none(capsys):
    code, doc = _run(capsys, "relations", "--group",
                     json.dumps({"kind": "cyclic", "n": 5}))
    assert code == 0
    assert doc["rank"] == 0
    assert doc["basis"] == []


def test_relations_group_from_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"kind": "dihedral", "q": 3}))
    code, doc = _run(capsys, "relations", "--group", str(path))
    assert code == 0
    assert doc["rank"] == 1


def test_relations_bad_inline_json(capsys):
    code, doc = _run(capsys, "relations", "--group", "{bad")
    assert code == 2


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def test_check_dihedral_main_passes(capsys, finite_d3):
    path, digest = finite_d3
    code, doc = _run(capsys, "check", "--identity", "DIHEDRAL_MAIN",
                     "--module", path)
    assert code == 0
    assert doc["status"] == "pass"
    assert doc["identity"] == "DIHEDRAL_MAIN"
    assert doc["module_digest"] == digest


def test_check_rcz_infers_q_from_module_group(capsys, triv_d3):
    code, doc = _run(capsys, "check", "--identity", "RCZ",
                     "--module", triv_d3)
    assert code == 0
    assert doc["lhs"] == "1/3" and doc["rhs"] == "1/3"


def test_check_bounds_with_explicit_prime(capsys, finite_d3):
    path, _ = finite_d3
    code, doc = _run(capsys, "check", "--identity", "BOUNDS",
                     "--module", path, "--prime", "3")
    assert code == 0
    rows = doc["details"]["bounds"]
    assert len(rows) == 1 and rows[0]["ell"] == 3 and rows[0]["ok"]


def test_check_dual1_needs_relation(capsys, triv_d3):
    code, doc = _run(capsys, "check", "--identity", "DUAL1",
                     "--module", triv_d3)
    assert code == 2
    assert "relation" in doc["message"]


def test_check_dual1_with_relation(capsys, triv_d3, theta_d3):
    code, doc = _run(capsys, "check", "--identity", "DUAL1",
                     "--module", triv_d3, "--relation", theta_d3)
    assert code == 0
    assert doc["status"] == "pass"


def test_check_unknown_identity(capsys, triv_d3):
    code, doc = _run(capsys, "check", "--identity", "NOPE",
                     "--module", triv_d3)
    assert code == 2
    assert "unknown identity" in doc["message"]


def test_check_non_dihedral_group_rejected_for_dihedral_identity(
        capsys, tmp_path):
    M = trivial_module(FiniteGroup.cyclic(4))
    path = tmp_path / "c4.json"
    path.write_text(json.dumps(module_to_json(M)))
    code, doc = _run(capsys, "check", "--identity", "DIHEDRAL_MAIN",
                     "--module", str(path))
    assert code == 2
    assert "dihedral" in doc["message"]


def test_check_failing_report_exits_one(capsys, triv_d3, monkeypatch):
    import reglab.cli as climod

    def fake(identity, **kw):
        return {"identity": identity, "status": "fail", "lhs": "2",
                "rhs": "1", "factorization": {}, "seed": 0, "details": {}}

    monkeypatch.setattr(climod, "verify_identity", fake)
    code, doc = _run(capsys, "check", "--identity", "RCZ",
                     "--module", triv_d3)
    assert code == 1
    assert doc["status"] == "fail"


# ---------------------------------------------------------------------------
# random-module
# ---------------------------------------------------------------------------


def test_random_module_writes_validatable_file(capsys, tmp_path):
    out = str(tmp_path / "m.json")
    code, doc = _run(capsys, "random-module", "--group",
                     json.dumps({"kind": "dihedral", "q": 3}),
                     "--profile", "mixed", "--seed", "11", "--out", out)
    assert code == 0
    code2, doc2 = _run(capsys, "validate", "--module", out)
    assert code2 == 0
    assert doc2["digest"] == doc["digest"]


def test_random_module_is_seed_deterministic(capsys, tmp_path):
    digests = []
    for name in ("a.json", "b.json"):
        out = str(tmp_path / name)
        _, doc = _run(capsys, "random-module", "--group",
                      json.dumps({"kind": "cyclic", "n": 6}),
                      "--profile", "finite", "--seed", "4", "--out", out)
        digests.append(doc["digest"])
    assert digests[0] == digests[1]


def test_random_module_unwritable_out_is_input_error(capsys, tmp_path):
    code, doc = _run(capsys, "random-module", "--group",
                     json.dumps({"kind": "cyclic", "n": 2}),
                     "--profile", "finite", "--seed", "0",
                     "--out", str(tmp_path / "nodir" / "m.json"))
    assert code == 2


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_small_dihedral_suite_passes(capsys):
    code, doc = _run(capsys, "verify", "--suite", "dihedral",
                     "--q", "3", "--trials", "2", "--seed", "1")
    assert code == 0
    assert doc["summary"]["fail"] == 0 and doc["summary"]["error"] == 0
    assert doc["summary"]["checks"] > 0


def test_verify_is_byte_deterministic(capsys):
    argv = ["verify", "--suite", "dihedral", "--q", "3",
            "--trials", "2", "--seed", "1"]
    main(list(argv))
    first = capsys.readouterr().out
    main(list(argv))
    second = capsys.readouterr().out
    assert first == second


def test_verify_seed_changes_output(capsys):
    main(["verify", "--suite", "dihedral", "--q", "3", "--trials", "2",
          "--seed", "1"])
    first = capsys.readouterr().out
    main(["verify", "--suite", "dihedral", "--q", "3", "--trials", "2",
          "--seed", "2"])
    second = capsys.readouterr().out
    assert first != second


def test_verify_unknown_suite_is_usage_error(capsys):
    code, _ = _run(capsys, "verify", "--suite", "nope")
    assert code == 2


def test_verify_failure_exits_one(capsys, monkeypatch):
    import reglab.cli as climod

    def fake(name, q_list=None, trials=None, seed=0):
        return {"suite": name, "params": {}, "reports": [],
                "summary": {"pass": 0, "fail": 1, "error": 0, "checks": 1}}

    monkeypatch.setattr(climod, "run_suite", fake)
    code, _ = _run(capsys, "verify", "--suite", "dihedral")
    assert code == 1


# ---------------------------------------------------------------------------
# global behaviour
# ---------------------------------------------------------------------------


def test_resource_limit_maps_to_exit_three(capsys, triv_d3, monkeypatch):
    monkeypatch.setenv("REGLAB_LIMIT_COLS", "1")
    code, doc = _run(capsys, "cohomology", "--module", triv_d3,
                     "--degrees", "0")
    assert code == 3
    assert doc["error"] == "ResourceLimitError"


def test_usage_error_exits_two(capsys):
    assert main(["regulator"]) == 2  # missing required flags
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_output_is_sorted_pretty_json(capsys, triv_d3):
    main(["validate", "--module", triv_d3])
    out = capsys.readouterr().out
    doc = json.loads(out)
    assert out == json.dumps(doc, indent=2, sort_keys=True) + "\n"
