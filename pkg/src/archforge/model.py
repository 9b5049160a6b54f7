"""Typed catalog, topology, and query entities with structural validation.

A validated catalog is immutable and safe to share across concurrent
synthesis sessions; mutation means building a new catalog.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from . import dsl
from .ranks import OrderingCycle, build_rank_table, ordering_objectives

IDENTIFIER_RE = re.compile(r"^[A-Za-z0-9_.-]+$")

TOTAL_COST = "TOTAL_COST"


def tag_matches(want: str, have: str) -> bool:
    """Segment-prefix matching for compound objective tags.

    ``monitoring`` matches ``monitoring.detect_queue_length``; the reverse
    requires the full tag.
    """
    if want == have:
        return True
    return have.startswith(want + ".")


@dataclass(frozen=True)
class ObjectiveSpec:
    id: str
    granularities: tuple[str, ...] = ()

    def tags(self) -> tuple[str, ...]:
        return (self.id,) + tuple(f"{self.id}.{g}" for g in self.granularities)


@dataclass(frozen=True)
class RoleSpec:
    id: str
    activation_condition: dsl.Expr = dsl.TRUE
    warning: Optional[str] = None
    is_exclusive: bool = True
    considered: bool = True


@dataclass(frozen=True)
class SystemWarning:
    when: dsl.Expr
    text: str


@dataclass(frozen=True)
class SystemSpec:
    id: str
    roles: tuple[str, ...]
    solves: tuple[str, ...] = ()
    deployment_constraints: dsl.Expr = dsl.TRUE
    warnings: tuple[SystemWarning, ...] = ()
    constraint_labels: dict[str, str] = field(default_factory=dict)

    def label_for(self, node: dsl.Expr) -> Optional[str]:
        if node.node_id and node.node_id in self.constraint_labels:
            return self.constraint_labels[node.node_id]
        return node.label


@dataclass(frozen=True)
class OrderingSpec:
    objective: str
    subject: str
    relation: str  # BETTER_THAN | SAME_AS
    object: str
    condition: Optional[dsl.Expr] = None
    provenance: str = "EXPERT"  # EXPERT | ARCHITECT


class EntryKind(str):
    pass


REAL = "REAL"
BOOL = "BOOL"
EXHAUSTIBLE = "EXHAUSTIBLE"


@dataclass(frozen=True)
class SchemaEntry:
    kind: str
    default: Optional[Union[bool, int, float]] = None


@dataclass(frozen=True)
class HardwareSchema:
    id: str
    device_type: str
    entries: dict[str, SchemaEntry]


@dataclass(frozen=True)
class HardwareSpec:
    id: str
    schema: str
    values: dict[str, Union[bool, int, float]]
    provenance: Optional[str] = None

    def resolved_values(self, schema: HardwareSchema) -> dict[str, Union[bool, Fraction]]:
        out: dict[str, Union[bool, Fraction]] = {}
        for name, entry in schema.entries.items():
            raw = self.values.get(name, entry.default)
            if raw is None:
                continue
            out[name] = raw if isinstance(raw, bool) else Fraction(raw)
        return out


@dataclass(frozen=True)
class DeviceSlot:
    id: str
    device_type: str
    schema: str
    pinned_hardware: Optional[str] = None


@dataclass(frozen=True)
class DeviceGroup:
    id: str
    group_type: str
    children: tuple["DeviceGroup", ...] = ()
    devices: tuple[DeviceSlot, ...] = ()

    def all_devices(self) -> tuple[DeviceSlot, ...]:
        out = list(self.devices)
        for child in self.children:
            out.extend(child.all_devices())
        return tuple(out)

    def all_groups(self) -> tuple["DeviceGroup", ...]:
        out = [self]
        for child in self.children:
            out.extend(child.all_groups())
        return tuple(out)


TopologySpec = DeviceGroup


@dataclass(frozen=True)
class PerformanceBound:
    objective: str
    at_least: str


@dataclass(frozen=True)
class WorkloadSpec:
    id: str
    deployed_at: tuple[str, ...]
    properties: tuple[str, ...] = ()
    objectives: tuple[str, ...] = ()
    scalars: dict[str, Union[int, float]] = field(default_factory=dict)
    performance_bounds: tuple[PerformanceBound, ...] = ()
    exempted_roles: tuple[str, ...] = ()

    def scalar(self, name: str) -> Fraction:
        if name in self.scalars:
            return Fraction(self.scalars[name])
        return Fraction(0)


@dataclass(frozen=True)
class OptimizeDirective:
    """Target is (workload, objective) for MAXIMIZE or TOTAL_COST for MINIMIZE."""

    priority: int
    workload: Optional[str] = None
    objective: Optional[str] = None
    total_cost: bool = False

    @property
    def sense(self) -> str:
        return "MINIMIZE" if self.total_cost else "MAXIMIZE"


@dataclass(frozen=True)
class ArchitectConstraint:
    id: str
    expr: dsl.Expr
    hardness: str = "HARD"  # HARD | OPTIONAL
    label: Optional[str] = None


@dataclass(frozen=True)
class Catalog:
    schemas: dict[str, HardwareSchema] = field(default_factory=dict)
    hardware: dict[str, HardwareSpec] = field(default_factory=dict)
    objectives: dict[str, ObjectiveSpec] = field(default_factory=dict)
    roles: dict[str, RoleSpec] = field(default_factory=dict)
    systems: dict[str, SystemSpec] = field(default_factory=dict)
    orderings: tuple[OrderingSpec, ...] = ()

    def systems_for_role(self, role_id: str) -> list[SystemSpec]:
        return [
            s for _, s in sorted(self.systems.items()) if role_id in s.roles
        ]

    def objective_tags(self) -> frozenset[str]:
        tags: set[str] = set()
        for obj in self.objectives.values():
            tags.update(obj.tags())
        return frozenset(tags)


@dataclass(frozen=True)
class Query:
    topology: TopologySpec
    workloads: tuple[WorkloadSpec, ...] = ()
    optimize: tuple[OptimizeDirective, ...] = ()
    constraints: tuple[ArchitectConstraint, ...] = ()
    pins: dict[str, str] = field(default_factory=dict)
    excluded_hardware: tuple[str, ...] = ()
    excluded_systems: tuple[str, ...] = ()

    def workload(self, workload_id: str) -> WorkloadSpec:
        for w in self.workloads:
            if w.id == workload_id:
                return w
        raise KeyError(workload_id)


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, subject: str, message: str) -> None:
        self.violations.append(Violation(code, subject, message))

    def sorted(self) -> list[Violation]:
        return sorted(self.violations, key=lambda v: (v.code, v.subject, v.message))


def _check_identifier(report: ValidationReport, kind: str, ident: str) -> None:
    if not IDENTIFIER_RE.match(ident):
        report.add("bad-identifier", ident, f"{kind} id must match [A-Za-z0-9_.-]+")


def _value_matches_kind(kind: str, value: Union[bool, int, float]) -> bool:
    if kind == BOOL:
        return isinstance(value, bool)
    if isinstance(value, bool):
        return False
    if kind == EXHAUSTIBLE:
        return isinstance(value, int) and value >= 0
    if kind == REAL:
        return isinstance(value, (int, float)) and value == value and abs(value) != float("inf")
    return False


def validate_catalog(catalog: Catalog, query: Optional[Query] = None) -> ValidationReport:
    """Collect every structural violation; an empty report admits synthesis."""
    report = ValidationReport()

    for schema_id, schema in sorted(catalog.schemas.items()):
        _check_identifier(report, "schema", schema_id)
        cost = schema.entries.get("cost")
        if cost is None or cost.kind != REAL:
            report.add("schema-missing-cost", schema_id, "every schema needs a REAL 'cost' entry")
        for name, entry in sorted(schema.entries.items()):
            if entry.kind not in (REAL, BOOL, EXHAUSTIBLE):
                report.add("bad-entry-kind", f"{schema_id}.{name}", f"unknown kind {entry.kind!r}")
            elif entry.default is not None and not _value_matches_kind(entry.kind, entry.default):
                report.add(
                    "bad-default",
                    f"{schema_id}.{name}",
                    f"default {entry.default!r} does not fit kind {entry.kind}",
                )

    for hw_id, hw in sorted(catalog.hardware.items()):
        _check_identifier(report, "hardware", hw_id)
        schema = catalog.schemas.get(hw.schema)
        if schema is None:
            report.add("dangling-schema", hw_id, f"schema {hw.schema!r} is not defined")
            continue
        for name, entry in sorted(schema.entries.items()):
            if name not in hw.values and entry.default is None:
                report.add("missing-entry", hw_id, f"no value for required entry {name!r}")
        for name, value in sorted(hw.values.items()):
            entry = schema.entries.get(name)
            if entry is None:
                report.add("extraneous-entry", hw_id, f"entry {name!r} not in schema {schema.id!r}")
            elif not _value_matches_kind(entry.kind, value):
                report.add(
                    "kind-mismatch",
                    f"{hw_id}.{name}",
                    f"value {value!r} does not fit kind {entry.kind}",
                )

    for obj_id, obj in sorted(catalog.objectives.items()):
        _check_identifier(report, "objective", obj_id)
        if len(set(obj.granularities)) != len(obj.granularities):
            report.add("duplicate-granularity", obj_id, "granularity list has duplicates")

    for role_id, role in sorted(catalog.roles.items()):
        _check_identifier(report, "role", role_id)
        for problem in dsl.check_expression(
            role.activation_condition,
            allow_device_context=False,
            allow_system_context=False,
        ):
            report.add("bad-activation", role_id, problem)

    known_tags = catalog.objective_tags()
    for system_id, system in sorted(catalog.systems.items()):
        _check_identifier(report, "system", system_id)
        if not system.roles:
            report.add("empty-roles", system_id, "a system must fulfill at least one role")
        for role_id in system.roles:
            if role_id not in catalog.roles:
                report.add("dangling-role", system_id, f"role {role_id!r} is not defined")
        for tag in system.solves:
            if not any(tag_matches(t, tag) or tag_matches(tag, t) for t in known_tags):
                report.add("dangling-objective", system_id, f"solves unknown objective {tag!r}")
        for problem in dsl.check_expression(system.deployment_constraints):
            report.add("bad-constraint", system_id, problem)
        refs = dsl.free_references(system.deployment_constraints)
        for ref in sorted(refs.systems):
            if ref not in catalog.systems:
                report.add("dangling-system", system_id, f"constraint references unknown system {ref!r}")

    subjects_ok = True
    for i, ordering in enumerate(catalog.orderings):
        where = f"orderings[{i}]"
        for side in (ordering.subject, ordering.object):
            if side not in catalog.systems:
                report.add("dangling-system", where, f"ordering names unknown system {side!r}")
                subjects_ok = False
        if ordering.relation not in ("BETTER_THAN", "SAME_AS"):
            report.add("bad-relation", where, f"unknown relation {ordering.relation!r}")
            subjects_ok = False
        if ordering.subject in catalog.systems and ordering.object in catalog.systems:
            a = set(catalog.systems[ordering.subject].roles)
            b = set(catalog.systems[ordering.object].roles)
            if not a & b:
                report.add(
                    "no-common-role",
                    where,
                    f"{ordering.subject} and {ordering.object} fulfill no common role",
                )

    if subjects_ok:
        for objective in ordering_objectives(catalog.orderings):
            try:
                build_rank_table(objective, catalog.orderings)
            except OrderingCycle as cycle:
                report.add(
                    "ordering-cycle",
                    objective,
                    f"cycle through {', '.join(cycle.members)}",
                )

    if query is not None:
        _validate_query(catalog, query, report)
    return report


def _validate_query(catalog: Catalog, query: Query, report: ValidationReport) -> None:
    devices = query.topology.all_devices()
    seen_devices: set[str] = set()
    for device in devices:
        if device.id in seen_devices:
            report.add("duplicate-device", device.id, "device ids must be globally unique")
        seen_devices.add(device.id)
        schema = catalog.schemas.get(device.schema)
        if schema is None:
            report.add("dangling-schema", device.id, f"schema {device.schema!r} is not defined")
        elif schema.device_type != device.device_type:
            report.add(
                "type-mismatch",
                device.id,
                f"slot type {device.device_type!r} != schema type {schema.device_type!r}",
            )
        if device.pinned_hardware is not None:
            _check_pin(catalog, device.id, device.pinned_hardware, device, report)

    group_ids: set[str] = set()
    for group in query.topology.all_groups():
        if group.id in group_ids:
            report.add("duplicate-group", group.id, "a group may appear under one parent only")
        group_ids.add(group.id)

    for device_id, hw_id in sorted(query.pins.items()):
        device = next((d for d in devices if d.id == device_id), None)
        if device is None:
            report.add("dangling-device", device_id, "pin names unknown device")
        else:
            _check_pin(catalog, device_id, hw_id, device, report)

    for hw_id in query.excluded_hardware:
        if hw_id not in catalog.hardware:
            report.add("dangling-hardware", hw_id, "excluded hardware is not in the catalog")
    for system_id in query.excluded_systems:
        if system_id not in catalog.systems:
            report.add("dangling-system", system_id, "excluded system is not in the catalog")

    known_tags = catalog.objective_tags()
    workload_ids: set[str] = set()
    for workload in query.workloads:
        if workload.id in workload_ids:
            report.add("duplicate-workload", workload.id, "workload ids must be unique")
        workload_ids.add(workload.id)
        for group_id in workload.deployed_at:
            if group_id not in group_ids:
                report.add("dangling-group", workload.id, f"deployed_at unknown group {group_id!r}")
        for tag in workload.objectives:
            if not any(tag_matches(t, tag) or tag_matches(tag, t) for t in known_tags):
                report.add("dangling-objective", workload.id, f"unknown objective {tag!r}")
        for name in sorted(workload.scalars):
            if name not in dsl.KNOWN_SCALARS:
                report.add("unknown-scalar", workload.id, f"unknown scalar {name!r}")
            elif workload.scalars[name] < 0:
                report.add("negative-scalar", workload.id, f"scalar {name!r} must be non-negative")
        for bound in workload.performance_bounds:
            if bound.objective not in workload.objectives:
                report.add(
                    "bound-not-an-objective",
                    workload.id,
                    f"bound objective {bound.objective!r} missing from the workload's objectives",
                )
            if bound.at_least not in catalog.systems:
                report.add("dangling-system", workload.id, f"bound names unknown system {bound.at_least!r}")
        for role_id in workload.exempted_roles:
            if role_id not in catalog.roles:
                report.add("dangling-role", workload.id, f"exempted unknown role {role_id!r}")

    priorities = [d.priority for d in query.optimize]
    if len(set(priorities)) != len(priorities):
        dupes = sorted({p for p in priorities if priorities.count(p) > 1})
        report.add("duplicate-priority", "optimize", f"priorities {dupes} appear more than once")
    for directive in query.optimize:
        if directive.priority < 1:
            report.add("bad-priority", "optimize", "priorities start at 1")
        if not directive.total_cost:
            if directive.workload not in workload_ids:
                report.add("dangling-workload", "optimize", f"unknown workload {directive.workload!r}")

    constraint_ids: set[str] = set()
    for constraint in query.constraints:
        if constraint.id in constraint_ids:
            report.add("duplicate-constraint", constraint.id, "constraint ids must be unique")
        constraint_ids.add(constraint.id)
        if constraint.hardness not in ("HARD", "OPTIONAL"):
            report.add("bad-hardness", constraint.id, f"unknown hardness {constraint.hardness!r}")
        for problem in dsl.check_expression(constraint.expr, allow_workload_context=False):
            report.add("bad-constraint", constraint.id, problem)


def _check_pin(
    catalog: Catalog,
    device_id: str,
    hw_id: str,
    device: DeviceSlot,
    report: ValidationReport,
) -> None:
    hw = catalog.hardware.get(hw_id)
    if hw is None:
        report.add("dangling-hardware", device_id, f"pinned hardware {hw_id!r} is not in the catalog")
        return
    if hw.schema != device.schema:
        report.add(
            "pin-schema-mismatch",
            device_id,
            f"hardware {hw_id!r} has schema {hw.schema!r}, slot wants {device.schema!r}",
        )


# --- role activation --------------------------------------------------------


def activation_binding(
    workload: WorkloadSpec, all_workloads: tuple[WorkloadSpec, ...]
) -> dsl.Binding:
    colocated: set[str] = set()
    for other in all_workloads:
        colocated.update(other.properties)
    return dsl.Binding(
        workload=workload.id,
        scalars={k: Fraction(v) for k, v in workload.scalars.items()},
        properties=frozenset(workload.properties),
        colocated_properties=frozenset(colocated),
    )


def activated_roles(
    catalog: Catalog,
    workload: WorkloadSpec,
    all_workloads: tuple[WorkloadSpec, ...],
) -> list[tuple[str, str]]:
    """Roles whose activation condition holds, with a human-readable reason.

    Exempted roles never appear; non-considered roles never appear (their
    warnings surface separately).
    """
    binding = activation_binding(workload, all_workloads)
    out: list[tuple[str, str]] = []
    for role_id, role in sorted(catalog.roles.items()):
        if not role.considered:
            continue
        if role_id in workload.exempted_roles:
            continue
        if dsl.evaluate(role.activation_condition, binding).truth:
            reason = role.activation_condition.label or describe_condition(
                role.activation_condition
            )
            out.append((role_id, reason))
    return out


def describe_condition(expr: dsl.Expr) -> str:
    if isinstance(expr, dsl.Lit):
        return "always" if expr.value else "never"
    if isinstance(expr, dsl.WorkloadHasProperty):
        return f"workload has property {expr.tag}"
    if isinstance(expr, dsl.CoLocatedHasProperty):
        return f"a co-located workload has property {expr.tag}"
    if isinstance(expr, dsl.And):
        return " and ".join(describe_condition(a) for a in expr.args)
    if isinstance(expr, dsl.Or):
        return " or ".join(describe_condition(a) for a in expr.args)
    if isinstance(expr, dsl.Not):
        return f"not ({describe_condition(expr.arg)})"
    return type(expr).__name__
