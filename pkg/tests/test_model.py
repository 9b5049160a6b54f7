"""Catalog validation and role activation."""

from __future__ import annotations

from archforge import dsl
from archforge.documents import bundled_path, load_catalog, load_query
from archforge.model import (
    Catalog,
    HardwareSchema,
    HardwareSpec,
    ObjectiveSpec,
    OrderingSpec,
    RoleSpec,
    SchemaEntry,
    SystemSpec,
    WorkloadSpec,
    activated_roles,
    tag_matches,
    validate_catalog,
)
from archforge.ranks import build_rank_table, effective_orderings


def switch_schema() -> HardwareSchema:
    return HardwareSchema(
        "switch",
        "SWITCH",
        {
            "cost": SchemaEntry("REAL"),
            "rack_units": SchemaEntry("REAL", 1),
            "line_cards": SchemaEntry("REAL", 1),
            "ECN": SchemaEntry("BOOL", False),
            "INT": SchemaEntry("BOOL", False),
            "QOS_Levels": SchemaEntry("EXHAUSTIBLE", 1),
        },
    )


def test_asr9006_against_switch_schema_is_valid():
    catalog = Catalog(
        schemas={"switch": switch_schema()},
        hardware={
            "CISCO_ASR9006": HardwareSpec(
                "CISCO_ASR9006",
                "switch",
                {"cost": 6000.0, "rack_units": 10.0, "line_cards": 4.0, "ECN": True, "INT": True},
            )
        },
    )
    assert validate_catalog(catalog).ok


def test_hardware_kind_and_missing_entry_violations():
    catalog = Catalog(
        schemas={"switch": switch_schema()},
        hardware={
            "bad": HardwareSpec(
                "bad",
                "switch",
                {"QOS_Levels": -2, "mystery": 1.0},
            )
        },
    )
    report = validate_catalog(catalog)
    codes = {v.code for v in report.violations}
    assert "missing-entry" in codes  # cost has no default
    assert "kind-mismatch" in codes  # negative exhaustible
    assert "extraneous-entry" in codes


def test_two_cycle_is_a_violation_naming_both():
    role = RoleSpec("r")
    catalog = Catalog(
        schemas={"switch": switch_schema()},
        objectives={"latency": ObjectiveSpec("latency")},
        roles={"r": role},
        systems={
            "A": SystemSpec("A", ("r",)),
            "B": SystemSpec("B", ("r",)),
        },
        orderings=(
            OrderingSpec("latency", "A", "BETTER_THAN", "B"),
            OrderingSpec("latency", "B", "BETTER_THAN", "A"),
        ),
    )
    report = validate_catalog(catalog)
    cycles = [v for v in report.violations if v.code == "ordering-cycle"]
    assert cycles and "A" in cycles[0].message and "B" in cycles[0].message


def test_same_as_into_better_than_cycle():
    catalog = Catalog(
        schemas={"switch": switch_schema()},
        objectives={"latency": ObjectiveSpec("latency")},
        roles={"r": RoleSpec("r")},
        systems={"A": SystemSpec("A", ("r",)), "B": SystemSpec("B", ("r",))},
        orderings=(
            OrderingSpec("latency", "A", "SAME_AS", "B"),
            OrderingSpec("latency", "A", "BETTER_THAN", "B"),
        ),
    )
    report = validate_catalog(catalog)
    assert any(v.code == "ordering-cycle" for v in report.violations)


def test_dangling_role_reference():
    catalog = Catalog(systems={"S": SystemSpec("S", ("ghost",))})
    report = validate_catalog(catalog)
    assert any(v.code == "dangling-role" for v in report.violations)


def test_validation_is_order_independent():
    def build(reorder: bool) -> Catalog:
        systems = {
            "A": SystemSpec("A", ("ghost1",)),
            "B": SystemSpec("B", ("ghost2",)),
        }
        if reorder:
            systems = dict(reversed(list(systems.items())))
        return Catalog(systems=systems)

    first = [str(v) for v in validate_catalog(build(False)).sorted()]
    second = [str(v) for v in validate_catalog(build(True)).sorted()]
    assert first == second and len(first) == 2


def test_tag_matching_is_segment_prefix():
    assert tag_matches("monitoring", "monitoring.detect_queue_length")
    assert tag_matches("monitoring.detect_queue_length", "monitoring.detect_queue_length")
    assert not tag_matches("monitoring.detect_queue_length", "monitoring")
    assert not tag_matches("monitor", "monitoring")


# --- activation ---------------------------------------------------------------


def _role_catalog() -> Catalog:
    return Catalog(
        roles={
            "wan_dc": RoleSpec(
                "wan_dc",
                dsl.And(
                    (
                        dsl.WorkloadHasProperty("wan_flows"),
                        dsl.CoLocatedHasProperty("dc_flows"),
                    )
                ),
                warning="WAN-DC competition can cause high latency",
            ),
            "gated": RoleSpec("gated", dsl.WorkloadHasProperty("special")),
            "ignored": RoleSpec(
                "ignored", dsl.WorkloadHasProperty("special"), considered=False
            ),
        }
    )


def test_cross_workload_activation():
    catalog = _role_catalog()
    wan = WorkloadSpec("edge", ("g",), properties=("wan_flows",))
    dc = WorkloadSpec("batch", ("g",), properties=("dc_flows",))
    got = activated_roles(catalog, wan, (wan, dc))
    assert [r for r, _ in got] == ["wan_dc"]
    alone = activated_roles(catalog, wan, (wan,))
    assert alone == []


def test_empty_properties_activate_nothing():
    catalog = _role_catalog()
    w = WorkloadSpec("w", ("g",))
    assert activated_roles(catalog, w, (w,)) == []


def test_exempted_roles_never_activate():
    catalog = _role_catalog()
    w = WorkloadSpec("w", ("g",), properties=("special",), exempted_roles=("gated",))
    assert activated_roles(catalog, w, (w,)) == []


def test_non_considered_roles_never_activate():
    catalog = _role_catalog()
    w = WorkloadSpec("w", ("g",), properties=("special",))
    got = [r for r, _ in activated_roles(catalog, w, (w,))]
    assert got == ["gated"]  # "ignored" stays out


def test_activation_monotone_in_properties():
    catalog = _role_catalog()
    base = WorkloadSpec("w", ("g",), properties=("special",))
    more = WorkloadSpec("w", ("g",), properties=("special", "wan_flows", "dc_flows"))
    roles_base = {r for r, _ in activated_roles(catalog, base, (base,))}
    roles_more = {r for r, _ in activated_roles(catalog, more, (more,))}
    assert roles_base <= roles_more


def test_bundled_ml_training_role_set():
    catalog = load_catalog([bundled_path("catalog_dc.catalog.json")])
    query = load_query(bundled_path("ml_training.query.json"))
    w = query.workload("ML_Training")
    got = sorted(r for r, _ in activated_roles(catalog, w, query.workloads))
    # derived by hand from the bundled activation predicates before building
    assert got == [
        "Monitor",
        "cca",
        "cpu_sched",
        "load_balancer",
        "transport",
        "virtual_switch",
    ]


# --- rank tables ----------------------------------------------------------------


def test_rank_layers_and_dominators():
    orderings = (
        OrderingSpec("lat", "PacketSpray", "BETTER_THAN", "CONGA"),
        OrderingSpec("lat", "CONGA", "SAME_AS", "PLB"),
        OrderingSpec("lat", "PLB", "BETTER_THAN", "ECMP"),
    )
    table = build_rank_table("lat", orderings)
    assert table.rank("PacketSpray") == 2
    assert table.rank("CONGA") == table.rank("PLB") == 1
    assert table.rank("ECMP") == 0
    assert table.dominators_of("ECMP") == {"PacketSpray", "CONGA", "PLB"}
    assert table.dominators_of("PLB") == {"PacketSpray"}
    assert table.dominators_of("PacketSpray") == frozenset()


def test_architect_shadows_expert_on_same_pair():
    orderings = (
        OrderingSpec("lat", "A", "BETTER_THAN", "B"),
        OrderingSpec("lat", "B", "BETTER_THAN", "A", provenance="ARCHITECT"),
    )
    kept = effective_orderings(orderings)
    assert len(kept) == 1 and kept[0].provenance == "ARCHITECT"
    table = build_rank_table("lat", orderings)
    assert table.rank("B") > table.rank("A")


def test_conditional_ordering_filtered():
    orderings = (
        OrderingSpec(
            "lat",
            "A",
            "BETTER_THAN",
            "B",
            condition=dsl.WorkloadHasProperty("incast"),
        ),
    )
    with_cond = build_rank_table("lat", orderings, condition_holds=lambda o: False)
    assert not with_cond.covers("A")
    active = build_rank_table("lat", orderings, condition_holds=lambda o: True)
    assert active.rank("A") == 1


def test_duplicate_priorities_flagged():
    from archforge.model import (
        Catalog as C, DeviceGroup, DeviceSlot, OptimizeDirective, Query, WorkloadSpec,
    )

    catalog = C(schemas={"switch": switch_schema()})
    query = Query(
        topology=DeviceGroup("g", "GROUP", (), (DeviceSlot("g.s", "SWITCH", "switch"),)),
        workloads=(WorkloadSpec("w", ("g",)),),
        optimize=(
            OptimizeDirective(priority=1, total_cost=True),
            OptimizeDirective(priority=1, workload="w", objective="latency"),
        ),
    )
    report = validate_catalog(catalog, query)
    assert any(v.code == "duplicate-priority" for v in report.violations)
