"""Synthesis engine: toy fixtures, oracle agreement, ledger and pin invariants."""

from __future__ import annotations

from fractions import Fraction

import pytest

from _oracle import brute_force_best, design_vector, random_instance
from archforge import dsl
from archforge.encode import EncodingError, encode
from archforge.model import (
    ArchitectConstraint,
    Catalog,
    DeviceGroup,
    DeviceSlot,
    HardwareSchema,
    HardwareSpec,
    ObjectiveSpec,
    OptimizeDirective,
    OrderingSpec,
    Query,
    RoleSpec,
    SchemaEntry,
    SystemSpec,
    WorkloadSpec,
)
from archforge.synthesis import Design, Infeasibility, check_design, synthesize


def tiny_catalog(timely_like=False) -> Catalog:
    schemas = {
        "compute": HardwareSchema(
            "compute",
            "COMPUTE",
            {
                "cost": SchemaEntry("REAL"),
                "cores": SchemaEntry("EXHAUSTIBLE"),
                "fast_nic": SchemaEntry("BOOL", False),
            },
        ),
        "switch": HardwareSchema(
            "switch",
            "SWITCH",
            {
                "cost": SchemaEntry("REAL"),
                "qos": SchemaEntry("EXHAUSTIBLE", 1),
            },
        ),
    }
    hardware = {
        "small": HardwareSpec("small", "compute", {"cost": 100.0, "cores": 4}),
        "big": HardwareSpec(
            "big", "compute", {"cost": 300.0, "cores": 16, "fast_nic": True}
        ),
        "sw1": HardwareSpec("sw1", "switch", {"cost": 50.0, "qos": 2}),
    }
    objectives = {"perf": ObjectiveSpec("perf")}
    roles = {"r": RoleSpec("r", dsl.WorkloadHasProperty("busy"))}
    systems = {
        "Fast": SystemSpec(
            "Fast",
            ("r",),
            (),
            dsl.ForAllDeployedDevices("COMPUTE", "c", dsl.DeviceAttr("c", "fast_nic")).with_meta(
                node_id="Fast.c"
            ),
            (),
            {"Fast.c": "Fast needs the fast NIC everywhere"},
        ),
        "Slow": SystemSpec(
            "Slow",
            ("r",),
            (),
            dsl.Lit(True).with_meta(node_id="Slow.c"),
            (),
            {"Slow.c": "Slow runs anywhere"},
        ),
        "Greedy": SystemSpec(
            "Greedy",
            ("r",),
            (),
            dsl.Allocate(
                "qos", dsl.Lit(1), dsl.AllocationScope.PER_SYSTEM_GLOBAL, "SWITCH"
            ).with_meta(node_id="Greedy.c"),
            (),
            {"Greedy.c": "Greedy takes a switch qos level once"},
        ),
    }
    orderings = (
        OrderingSpec("perf", "Fast", "BETTER_THAN", "Greedy"),
        OrderingSpec("perf", "Greedy", "BETTER_THAN", "Slow"),
    )
    return Catalog(schemas, hardware, objectives, roles, systems, orderings)


def tiny_query(n_computes=2, workload_ids=("w0",), optimize=True, pins=None) -> Query:
    devices = [DeviceSlot(f"g.c{i}", "COMPUTE", "compute") for i in range(n_computes)]
    devices.append(DeviceSlot("g.sw", "SWITCH", "switch"))
    return Query(
        topology=DeviceGroup("g", "GROUP", (), tuple(devices)),
        workloads=tuple(
            WorkloadSpec(w, ("g",), ("busy",), ("perf",)) for w in workload_ids
        ),
        optimize=(
            (OptimizeDirective(priority=1, workload=workload_ids[0], objective="perf"),)
            if optimize
            else ()
        )
        + (OptimizeDirective(priority=2, total_cost=True),),
        pins=pins or {},
    )


def test_toy_picks_best_feasible_system():
    catalog = tiny_catalog()
    design = synthesize(catalog, tiny_query())
    assert design.systems["w0"]["r"] == "Fast"
    # Fast forces the fast-NIC hardware despite its cost
    assert design.hardware["g.c0"] == "big"
    assert check_design(catalog, tiny_query(), design) == []


def test_toy_matches_brute_force():
    catalog = tiny_catalog()
    query = tiny_query()
    oracle = brute_force_best(catalog, query)
    design = synthesize(catalog, query)
    assert isinstance(design, Design)
    assert design_vector(catalog, query, design) == oracle.vector


def test_no_workloads_only_device_fill():
    catalog = tiny_catalog()
    query = Query(
        topology=DeviceGroup(
            "g", "GROUP", (), (DeviceSlot("g.c0", "COMPUTE", "compute"),)
        ),
        optimize=(OptimizeDirective(priority=1, total_cost=True),),
    )
    design = synthesize(catalog, query)
    assert design.systems == {}
    assert design.hardware == {"g.c0": "small"}
    assert design.total_cost == Fraction(100)


def test_fully_pinned_zero_workloads_cost_is_sum_of_pins():
    catalog = tiny_catalog()
    query = Query(
        topology=DeviceGroup(
            "g",
            "GROUP",
            (),
            (
                DeviceSlot("g.c0", "COMPUTE", "compute"),
                DeviceSlot("g.sw", "SWITCH", "switch"),
            ),
        ),
        pins={"g.c0": "big", "g.sw": "sw1"},
    )
    design = synthesize(catalog, query)
    assert design.hardware == {"g.c0": "big", "g.sw": "sw1"}
    assert design.total_cost == Fraction(350)


def test_infeasible_reports_origins():
    catalog = tiny_catalog()
    query = tiny_query()
    # exclude everything that could fill the role
    query = Query(
        topology=query.topology,
        workloads=query.workloads,
        optimize=query.optimize,
        excluded_systems=("Fast", "Greedy", "Slow"),
    )
    out = synthesize(catalog, query)
    assert isinstance(out, Infeasibility)
    kinds = {o.kind for o in out.origins()}
    assert "ROLE_FULFILL" in kinds


def test_timely_style_dedup_single_qos_level():
    catalog = tiny_catalog()
    query = tiny_query(workload_ids=("w0", "w1"))
    design = synthesize(catalog, query)
    # both workloads may deploy Greedy without double-charging the switch
    ledger = design.ledgers.get("g.sw", {}).get("qos")
    if design.systems["w0"]["r"] == "Greedy" or design.systems["w1"]["r"] == "Greedy":
        assert ledger is not None and ledger.consumed == Fraction(1)


def test_timely_dedup_forced():
    catalog = tiny_catalog()
    base = tiny_query(workload_ids=("w0", "w1"))
    query = Query(
        topology=base.topology,
        workloads=base.workloads,
        optimize=base.optimize,
        excluded_systems=("Fast", "Slow"),
    )
    design = synthesize(catalog, query)
    assert design.systems["w0"]["r"] == "Greedy"
    assert design.systems["w1"]["r"] == "Greedy"
    ledger = design.ledgers["g.sw"]["qos"]
    assert ledger.consumed == Fraction(1)
    assert check_design(catalog, query, design) == []


def test_capacity_violation_detected_by_checker():
    # two demands of one qos level each against a capacity-1 switch
    catalog = tiny_catalog()
    hardware = dict(catalog.hardware)
    hardware["sw_tight"] = HardwareSpec("sw_tight", "switch", {"cost": 10.0, "qos": 1})
    roles = dict(catalog.roles)
    roles["r2"] = RoleSpec("r2", dsl.WorkloadHasProperty("busy"))
    systems = dict(catalog.systems)
    systems["Greedy2"] = SystemSpec(
        "Greedy2",
        ("r2",),
        (),
        dsl.Allocate(
            "qos", dsl.Lit(1), dsl.AllocationScope.PER_SYSTEM_GLOBAL, "SWITCH"
        ).with_meta(node_id="g2"),
        (),
        {"g2": "another qos consumer"},
    )
    catalog2 = Catalog(
        catalog.schemas, hardware, catalog.objectives, roles, systems, catalog.orderings
    )
    overfull = Design(
        systems={"w0": {"r": "Greedy", "r2": "Greedy2"}},
        hardware={"g.c0": "small", "g.c1": "small", "g.sw": "sw_tight"},
        total_cost=Fraction(210),
    )
    violations = check_design(catalog2, tiny_query(), overfull)
    assert any(v.startswith("CAPACITY") and "g.sw" in v for v in violations)


def test_system_constraint_violation_detected_by_checker():
    catalog = tiny_catalog()
    bad = Design(
        systems={"w0": {"r": "Fast"}},
        hardware={"g.c0": "small", "g.c1": "small", "g.sw": "sw1"},
        total_cost=Fraction(250),
    )
    violations = check_design(catalog, tiny_query(), bad)
    assert any("SYSTEM_CONSTRAINT" in v for v in violations)


def test_mutated_design_fast_on_slow_nics_rejected():
    catalog = tiny_catalog()
    query = tiny_query()
    design = synthesize(catalog, query)
    mutated = Design(
        systems={"w0": {"r": "Fast"}},
        hardware=dict(design.hardware),
        total_cost=design.total_cost,
    )
    mutated.hardware["g.c0"] = "small"
    violations = check_design(catalog, query, mutated)
    assert any("Fast" in v for v in violations)


def test_performance_bound_excludes_dominated():
    catalog = tiny_catalog()
    base = tiny_query()
    query = Query(
        topology=base.topology,
        workloads=(
            WorkloadSpec(
                "w0",
                ("g",),
                ("busy",),
                ("perf",),
                performance_bounds=(
                    __import__("archforge.model", fromlist=["PerformanceBound"]).PerformanceBound(
                        "perf", "Greedy"
                    ),
                ),
            ),
        ),
        optimize=(OptimizeDirective(priority=1, total_cost=True),),
    )
    design = synthesize(catalog, query)
    # Slow is dominated by Greedy on perf, so never chosen even though cheaper
    assert design.systems["w0"]["r"] in ("Fast", "Greedy")


def test_bound_outside_ordering_is_an_encoding_error():
    catalog = tiny_catalog()
    base = tiny_query()
    from archforge.model import PerformanceBound

    query = Query(
        topology=base.topology,
        workloads=(
            WorkloadSpec(
                "w0",
                ("g",),
                ("busy",),
                ("ease",),
                performance_bounds=(PerformanceBound("ease", "Fast"),),
            ),
        ),
        optimize=(),
    )
    catalog = Catalog(
        catalog.schemas,
        catalog.hardware,
        dict(catalog.objectives, ease=ObjectiveSpec("ease")),
        catalog.roles,
        catalog.systems,
        catalog.orderings,
    )
    with pytest.raises(EncodingError):
        encode(catalog, query)


def test_optional_constraint_never_causes_infeasibility():
    catalog = tiny_catalog()
    base = tiny_query()
    impossible = ArchitectConstraint(
        "impossible",
        dsl.Cmp(dsl.CmpOp.GE, dsl.TotalCapacity("cores", "COMPUTE"), dsl.Lit(10_000)),
        hardness="OPTIONAL",
        label="unreachable capacity target",
    )
    query = Query(
        topology=base.topology,
        workloads=base.workloads,
        optimize=base.optimize,
        constraints=(impossible,),
    )
    design = synthesize(catalog, query)
    assert isinstance(design, Design)
    assert design.dropped_optional == ["arch:impossible"]


def test_hard_architect_constraint_enforced():
    catalog = tiny_catalog()
    base = tiny_query()
    floor = ArchitectConstraint(
        "headroom",
        dsl.Cmp(
            dsl.CmpOp.LE,
            dsl.TotalAllocated("cores", "COMPUTE"),
            dsl.Mul((dsl.Lit(0.8), dsl.TotalCapacity("cores", "COMPUTE"))),
        ),
        hardness="HARD",
        label="peak utilization below 80% of total cores",
    )
    query = Query(
        topology=base.topology,
        workloads=(
            WorkloadSpec("w0", ("g",), ("busy",), ("perf",), {"peak_cores": 6}),
        ),
        optimize=base.optimize,
        constraints=(floor,),
    )
    design = synthesize(catalog, query)
    assert isinstance(design, Design)
    assert check_design(catalog, query, design) == []
    total_cores = sum(
        Fraction(catalog.hardware[h].values["cores"]) for d, h in design.hardware.items() if "c" in d and h != "sw1"
    )
    assert Fraction(6) <= Fraction(8, 10) * total_cores


def test_pin_consistent_with_design_keeps_validity():
    catalog = tiny_catalog()
    query = tiny_query()
    design = synthesize(catalog, query)
    pinned_query = Query(
        topology=query.topology,
        workloads=query.workloads,
        optimize=query.optimize,
        pins={"g.c0": design.hardware["g.c0"]},
    )
    pinned = synthesize(catalog, pinned_query)
    assert isinstance(pinned, Design)
    assert check_design(catalog, pinned_query, pinned) == []
    assert pinned.hardware["g.c0"] == design.hardware["g.c0"]


def test_total_cost_is_exact_sum():
    catalog = tiny_catalog()
    query = tiny_query()
    design = synthesize(catalog, query)
    expected = sum(
        (
            Fraction(catalog.hardware[h].values["cost"])
            for h in design.hardware.values()
        ),
        Fraction(0),
    )
    assert design.total_cost == expected


def test_rank_relabel_invariance():
    # stretching rank values monotonically must not change the selection
    catalog = tiny_catalog()
    query = tiny_query()
    base = synthesize(catalog, query)
    stretched = Catalog(
        catalog.schemas,
        catalog.hardware,
        catalog.objectives,
        catalog.roles,
        catalog.systems,
        (
            # same strict order Fast > Greedy > Slow, longer chain distances
            OrderingSpec("perf", "Fast", "BETTER_THAN", "Greedy"),
            OrderingSpec("perf", "Greedy", "BETTER_THAN", "Slow"),
            OrderingSpec("perf", "Fast", "BETTER_THAN", "Slow"),
        ),
    )
    again = synthesize(stretched, query)
    assert again.systems == base.systems


def test_collect_warnings_for_unfulfilled_optional_role():
    catalog = tiny_catalog()
    roles = dict(catalog.roles)
    roles["watchdog"] = RoleSpec(
        "watchdog",
        dsl.WorkloadHasProperty("busy"),
        warning="nothing fulfills the watchdog role",
    )
    catalog2 = Catalog(
        catalog.schemas, catalog.hardware, catalog.objectives, roles, catalog.systems, catalog.orderings
    )
    query = tiny_query()
    design = synthesize(catalog2, query)
    assert isinstance(design, Design)
    assert any("watchdog" in source for source, _ in design.warnings)


def test_wan_dc_contention_warning_from_bundled_catalog():
    from archforge.documents import bundled_path, load_catalog, load_query

    catalog = load_catalog([bundled_path("catalog_dc.catalog.json")])
    query = load_query(bundled_path("ml_training.query.json"))
    wan = WorkloadSpec(
        "EdgeReplication",
        ("pod1.rack1",),
        ("wan_flows",),
        (),
        {"peak_cores": 14},
    )
    contended = Query(
        topology=query.topology,
        workloads=query.workloads + (wan,),
        optimize=query.optimize,
    )
    design = synthesize(catalog, contended)
    assert isinstance(design, Design)
    # the contention role has no fulfilling system: warning, never an error
    assert any(
        "WAN_DC_Competition" in source and "high latency" in text
        for source, text in design.warnings
    )

    # architect exempts the role while the condition still holds: same warning
    exempted = Query(
        topology=query.topology,
        workloads=query.workloads
        + (
            WorkloadSpec(
                "EdgeReplication",
                ("pod1.rack1",),
                ("wan_flows",),
                (),
                {"peak_cores": 14},
                (),
                ("WAN_DC_Competition",),
            ),
        ),
        optimize=query.optimize,
    )
    design2 = synthesize(catalog, exempted)
    assert any(
        "WAN_DC_Competition" in source and "high latency" in text
        for source, text in design2.warnings
    )


def test_shared_role_allows_multiple_systems():
    catalog = tiny_catalog()
    roles = dict(catalog.roles)
    roles["obs"] = RoleSpec("obs", dsl.WorkloadHasProperty("busy"), is_exclusive=False)
    systems = dict(catalog.systems)
    for sid in ("WatchA", "WatchB", "WatchC"):
        systems[sid] = SystemSpec(
            sid, ("obs",), (), dsl.Lit(True).with_meta(node_id="t"), (), {"t": "no requirements"}
        )
    catalog2 = Catalog(
        catalog.schemas,
        catalog.hardware,
        dict(catalog.objectives, vis=ObjectiveSpec("vis")),
        roles,
        systems,
        catalog.orderings
        + (
            OrderingSpec("vis", "WatchA", "BETTER_THAN", "WatchB"),
            OrderingSpec("vis", "WatchB", "BETTER_THAN", "WatchC"),
        ),
    )
    base = tiny_query()
    query = Query(
        topology=base.topology,
        workloads=(WorkloadSpec("w0", ("g",), ("busy",), ("perf", "vis")),),
        optimize=(
            OptimizeDirective(priority=1, workload="w0", objective="vis"),
            OptimizeDirective(priority=2, workload="w0", objective="perf"),
        ),
    )
    design = synthesize(catalog2, query)
    assert isinstance(design, Design)
    # a shared role admits several deployed systems; the vis objective sums
    # their ranks, so both watchers deploy
    assert {"WatchA", "WatchB"} <= design.deployed("w0")
    assert design.systems["w0"]["obs"] == "WatchA"  # map keeps the lex-smallest
    assert check_design(catalog2, query, design) == []


@pytest.mark.parametrize("seed", range(60))
def test_oracle_agreement_randomized(seed):
    catalog, query = random_instance(seed)
    oracle = brute_force_best(catalog, query)
    out = synthesize(catalog, query, budget_seconds=60)
    if oracle is None:
        assert isinstance(out, Infeasibility), f"seed {seed}: engine SAT, oracle UNSAT"
    else:
        assert isinstance(out, Design), f"seed {seed}: engine UNSAT, oracle SAT"
        got = design_vector(catalog, query, out)
        assert got == oracle.vector, f"seed {seed}: {got} != {oracle.vector}"
        assert check_design(catalog, query, out) == [], f"seed {seed}"


def test_non_considered_role_emits_warning_when_activated():
    catalog = tiny_catalog()
    roles = dict(catalog.roles)
    roles["advisory"] = RoleSpec(
        "advisory",
        dsl.WorkloadHasProperty("busy"),
        warning="an advisory role matched but is not considered",
        considered=False,
    )
    catalog2 = Catalog(
        catalog.schemas, catalog.hardware, catalog.objectives, roles,
        catalog.systems, catalog.orderings,
    )
    design = synthesize(catalog2, tiny_query())
    assert isinstance(design, Design)
    assert any("advisory" in source for source, _ in design.warnings)
