"""CLI contract: exit codes, formats, determinism."""

from __future__ import annotations

import json

from archforge.cli import run
from archforge.documents import bundled_path

DC = str(bundled_path("catalog_dc.catalog.json"))
ML = str(bundled_path("ml_training.query.json"))
CLOUD = str(bundled_path("catalog_cloud.catalog.json"))


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_clean_catalog(capsys):
    code, out, _ = invoke(capsys, "validate", "-c", DC)
    assert code == 0
    assert "0 violations" in out


def test_validate_empty_catalog(tmp_path, capsys):
    empty = tmp_path / "empty.catalog.json"
    empty.write_text('{"kepler-spec": 1}\n')
    code, out, _ = invoke(capsys, "validate", "-c", str(empty))
    assert code == 0
    assert "0 violations" in out


def test_validate_broken_catalog_exits_one(tmp_path, capsys):
    doc = {
        "kepler-spec": 1,
        "systems": [{"id": "S", "roles": ["ghost"]}],
    }
    path = tmp_path / "broken.catalog.json"
    path.write_text(json.dumps(doc))
    code, out, _ = invoke(capsys, "validate", "-c", str(path))
    assert code == 1
    assert "dangling-role" in out


def test_synthesize_ml_training_text_report(capsys, tmp_path):
    out_path = tmp_path / "out.design.json"
    code, out, _ = invoke(
        capsys,
        "synthesize",
        "-c",
        DC,
        "-q",
        ML,
        "--output",
        str(out_path),
    )
    assert code == 0
    assert "** Systems deployed **" in out
    for system in ("ZygOS", "DCQCN", "ANDROMEDA", "RDMA", "PLB", "Sonata"):
        assert system in out
    assert "** Hardware assignments **" in out
    doc = json.loads(out_path.read_text())
    assert doc["systems"]["ML_Training"]["cca"] == "DCQCN"


def test_json_format_is_canonical(capsys):
    code, out, _ = invoke(capsys, "synthesize", "-c", DC, "-q", ML, "--format", "json")
    assert code == 0
    parsed = json.loads(out)
    from archforge.documents import canonical_dumps

    assert canonical_dumps(parsed) == out


def test_determinism_byte_identical_with_seed(capsys):
    _, out1, _ = invoke(
        capsys, "synthesize", "-c", DC, "-q", ML, "--format", "json", "--seed", "7"
    )
    _, out2, _ = invoke(
        capsys, "synthesize", "-c", DC, "-q", ML, "--format", "json", "--seed", "7"
    )
    assert out1 == out2


def test_check_round_trips_solver_output(capsys, tmp_path):
    design_path = tmp_path / "d.design.json"
    invoke(capsys, "synthesize", "-c", DC, "-q", ML, "--output", str(design_path))
    code, out, _ = invoke(
        capsys, "check", "-c", DC, "-q", ML, "--design", str(design_path)
    )
    assert code == 0
    assert "0 violations" in out


def test_check_flags_hand_mutated_design(capsys, tmp_path):
    design_path = tmp_path / "d.design.json"
    invoke(capsys, "synthesize", "-c", DC, "-q", ML, "--output", str(design_path))
    doc = json.loads(design_path.read_text())
    doc["systems"]["ML_Training"]["load_balancer"] = "PacketSpray"
    design_path.write_text(json.dumps(doc))
    code, out, _ = invoke(
        capsys, "check", "-c", DC, "-q", ML, "--design", str(design_path)
    )
    assert code == 1
    assert "NIC_Reorder_Buffer" in out or "PacketSpray" in out


def test_explain_conflict_exits_one_with_table_text(capsys, tmp_path):
    design_path = tmp_path / "d.design.json"
    invoke(capsys, "synthesize", "-c", DC, "-q", ML, "--output", str(design_path))
    code, out, _ = invoke(
        capsys,
        "explain",
        "-c",
        DC,
        "-q",
        ML,
        "--design",
        str(design_path),
        "--workload",
        "ML_Training",
        "--role",
        "load_balancer",
        "--prefer",
        "PacketSpray",
    )
    assert code == 1
    assert "Why PacketSpray is not selected" in out
    assert "RDMA" in out
    assert "NIC_Reorder_Buffer" in out


def test_explain_already_optimal_exits_zero(capsys, tmp_path):
    design_path = tmp_path / "d.design.json"
    invoke(capsys, "synthesize", "-c", DC, "-q", ML, "--output", str(design_path))
    code, out, _ = invoke(
        capsys,
        "explain",
        "-c",
        DC,
        "-q",
        ML,
        "--design",
        str(design_path),
        "--workload",
        "ML_Training",
        "--role",
        "load_balancer",
        "--prefer",
        "PLB",
        "--objective",
        "load_balancing",
    )
    assert code == 0
    assert "already the selection" in out


def test_catalog_list_and_show(capsys):
    code, out, _ = invoke(capsys, "catalog", "list", "-c", DC)
    assert code == 0
    assert "PacketSpray" in out and "tofino1" in out
    code, out, _ = invoke(capsys, "catalog", "show", "-c", DC, "RDMA")
    assert code == 0
    shown = json.loads(out)
    assert shown["id"] == "RDMA"
    code, _, err = invoke(capsys, "catalog", "show", "-c", DC, "NoSuchThing")
    assert code == 1


def test_usage_error_exits_two(capsys):
    code, _, _ = invoke(capsys, "synthesize", "-c", DC)  # missing -q
    assert code == 2


def test_parse_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.catalog.json"
    bad.write_text("{not json")
    code, _, err = invoke(capsys, "validate", "-c", str(bad))
    assert code == 2
    assert "error" in err


def test_catalog_merge_repeatable_flag(tmp_path, capsys):
    overlay = {
        "kepler-spec": 1,
        "orderings": [
            {
                "objective": "latency",
                "subject": "PLB",
                "relation": "BETTER_THAN",
                "object": "CONGA",
                "provenance": "ARCHITECT",
            }
        ],
    }
    path = tmp_path / "overlay.catalog.json"
    path.write_text(json.dumps(overlay))
    code, out, _ = invoke(capsys, "validate", "-c", DC, "-c", str(path))
    assert code == 0
