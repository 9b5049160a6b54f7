"""Acceptance suite: every criterion at its stated tolerance, one line each.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints a
PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import time
from fractions import Fraction

import pytest

from _oracle import brute_force_best, design_vector, random_instance
from archforge.cli import run as cli_run
from archforge.documents import bundled_path, load_catalog, load_query
from archforge.encode import encode
from archforge.explain import ExplainRequest, atom_session, explain
from archforge.synthesis import Design, Infeasibility, check_design, synthesize

DC = load_catalog([bundled_path("catalog_dc.catalog.json")])
CLOUD = load_catalog([bundled_path("catalog_cloud.catalog.json")])


@pytest.fixture(scope="module")
def ml_design():
    query = load_query(bundled_path("ml_training.query.json"))
    started = time.monotonic()
    design = synthesize(DC, query)
    elapsed = time.monotonic() - started
    return query, design, elapsed


@pytest.mark.acceptance("case-study-2 synthesis: exact six assignments, < 10 s")
def test_case_study_2_exact_assignments(ml_design):
    _query, design, elapsed = ml_design
    assert isinstance(design, Design)
    assert design.systems["ML_Training"] == {
        "cpu_sched": "ZygOS",
        "cca": "DCQCN",
        "virtual_switch": "ANDROMEDA",
        "transport": "RDMA",
        "load_balancer": "PLB",
        "Monitor": "Sonata",
    }
    assert elapsed < 10.0, f"synthesis took {elapsed:.2f}s"


@pytest.mark.acceptance("explainability reproduction: conflict atoms and categories")
def test_explainability_reproduction(ml_design):
    query, design, _ = ml_design
    request = ExplainRequest(
        "ML_Training", "load_balancer", "PacketSpray", "load_balancing"
    )
    explanation = explain(DC, query, design, request)
    assert explanation.outcome == "CONFLICT"
    clauses = [a.clause for a in explanation.atoms]
    assert any(  # (a) the transport implies the per-compute RDMA flag
        "deploy(RDMA," in c and ",RDMA)" in c for c in clauses
    ), clauses
    assert any(  # (b) the preferred balancer needs reorder buffers > 20
        "deploy(PacketSpray," in c and "NIC_Reorder_Buffer" in c and "> 20" in c
        for c in clauses
    ), clauses
    assert any(  # (c) a hardware implication with RDMA=false or buffer in {10, 20}
        c.startswith("Implies(hardware(")
        and ("Not(attr(" in c or "NIC_Reorder_Buffer) = 10" in c or "NIC_Reorder_Buffer) = 20" in c)
        for c in clauses
    ), clauses
    assert "SYSTEM_INCOMPATIBILITY" in explanation.categories


@pytest.mark.acceptance("case-study-1 priority flip: only the mesh cell changes")
def test_case_study_1_priority_flip():
    eod = synthesize(CLOUD, load_query(bundled_path("cloud_eod.query.json")))
    assert eod.systems["HotelReservation"] == {
        "runtime": "containerd",
        "orchestrator": "Kubernetes",
        "autoscaler": "HPA",
        "mesh": "Linkerd",
        "rpc": "gRPC",
    }
    latency = synthesize(CLOUD, load_query(bundled_path("cloud_latency.query.json")))
    assert latency.systems["HotelReservation"]["mesh"] == "Istio-ambient"
    unchanged = {k: v for k, v in latency.systems["HotelReservation"].items() if k != "mesh"}
    assert unchanged == {
        "runtime": "containerd",
        "orchestrator": "Kubernetes",
        "autoscaler": "HPA",
        "rpc": "gRPC",
    }


@pytest.mark.acceptance("appendix cost scenario: cca -> Swift, monitor -> Simon")
def test_programmable_switch_exclusion_flip():
    with_prog = synthesize(DC, load_query(bundled_path("inference.query.json")))
    assert with_prog.systems["Inference"]["cca"] in ("BFC", "DCQCN")
    assert with_prog.systems["Inference"]["Monitor"] == "Sonata"
    without = synthesize(DC, load_query(bundled_path("inference_no_prog.query.json")))
    assert without.systems["Inference"]["cca"] == "Swift"
    assert without.systems["Inference"]["Monitor"] == "Simon"


@pytest.mark.acceptance("oracle optimality: 500 randomized instances, 0 failures")
def test_oracle_optimality_500():
    failures = []
    for seed in range(1000, 1500):
        catalog, query = random_instance(seed)
        oracle = brute_force_best(catalog, query)
        out = synthesize(catalog, query, budget_seconds=60)
        if oracle is None:
            if not isinstance(out, Infeasibility):
                failures.append(f"seed {seed}: engine SAT, oracle infeasible")
            continue
        if isinstance(out, Infeasibility):
            failures.append(f"seed {seed}: engine infeasible, oracle SAT")
            continue
        if design_vector(catalog, query, out) != oracle.vector:
            failures.append(
                f"seed {seed}: {design_vector(catalog, query, out)} != {oracle.vector}"
            )
            continue
        if check_design(catalog, query, out):
            failures.append(f"seed {seed}: checker rejected engine design")
    assert not failures, failures[:10]


def _conflict_instance(seed: int):
    from test_explain import conflict_instance

    return conflict_instance(seed)


@pytest.mark.acceptance("core soundness/minimality: 200 randomized conflicts, 0 failures")
def test_core_soundness_minimality_200():
    failures = []
    for seed in range(200):
        catalog, query = _conflict_instance(seed)
        base = synthesize(catalog, query)
        explanation = explain(
            catalog, query, base, ExplainRequest("w", "r", "Magic", "perf")
        )
        if explanation.outcome != "CONFLICT":
            failures.append(f"seed {seed}: expected a conflict")
            continue
        if not explanation.categories:
            failures.append(f"seed {seed}: empty category set")
            continue
        problem = encode(catalog, query)
        session = atom_session(problem, explanation.atoms)
        ids = [a.atom_id for a in explanation.atoms]
        if session.solve_subset(ids).status != "UNSAT":
            failures.append(f"seed {seed}: atom set is satisfiable")
            continue
        for drop in ids:
            rest = [a for a in ids if a != drop]
            if session.solve_subset(rest).status != "SAT":
                failures.append(f"seed {seed}: atom {drop} is redundant")
                break
    assert not failures, failures[:10]


@pytest.mark.acceptance("capacity invariant: fuzzed ledgers respected; dedup charges once")
def test_capacity_invariant_and_dedup():
    # fuzzed ledgers: every synthesized design keeps consumed <= capacity
    for seed in range(300, 420):
        catalog, query = random_instance(seed)
        out = synthesize(catalog, query, budget_seconds=60)
        if isinstance(out, Infeasibility):
            continue
        for device, resources in out.ledgers.items():
            for resource, entry in resources.items():
                assert entry.consumed <= entry.capacity, (
                    f"seed {seed}: {device}/{resource} {entry.consumed} > {entry.capacity}"
                )

    # a per-system-global resource charges exactly one unit however many
    # workloads share the system
    from test_synthesis import tiny_catalog, tiny_query
    from archforge.model import Query

    catalog = tiny_catalog()
    for n_workloads in (1, 2):
        base = tiny_query(workload_ids=tuple(f"w{i}" for i in range(n_workloads)))
        query = Query(
            topology=base.topology,
            workloads=base.workloads,
            optimize=base.optimize,
            excluded_systems=("Fast", "Slow"),
        )
        design = synthesize(catalog, query)
        assert isinstance(design, Design)
        ledger = design.ledgers["g.sw"]["qos"]
        assert ledger.consumed == Fraction(1), f"{n_workloads} workloads"


@pytest.mark.acceptance("determinism: byte-identical documents across reruns")
def test_determinism_golden_scenarios(tmp_path, capsys):
    scenarios = [
        ("catalog_dc.catalog.json", "ml_training.query.json"),
        ("catalog_dc.catalog.json", "inference.query.json"),
        ("catalog_dc.catalog.json", "inference_no_prog.query.json"),
        ("catalog_cloud.catalog.json", "cloud_eod.query.json"),
        ("catalog_cloud.catalog.json", "cloud_latency.query.json"),
    ]
    for catalog_name, query_name in scenarios:
        outputs = []
        for attempt in range(2):
            out_path = tmp_path / f"{query_name}.{attempt}.design.json"
            code = cli_run(
                [
                    "synthesize",
                    "-c",
                    str(bundled_path(catalog_name)),
                    "-q",
                    str(bundled_path(query_name)),
                    "--output",
                    str(out_path),
                    "--seed",
                    "42",
                ]
            )
            capsys.readouterr()
            assert code == 0, f"{query_name} infeasible"
            outputs.append(out_path.read_bytes())
        assert outputs[0] == outputs[1], f"{query_name} not byte-identical"
