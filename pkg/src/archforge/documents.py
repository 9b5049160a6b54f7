"""Document formats: catalogs, queries, designs, explanations.

UTF-8 JSON with a version marker; canonical form sorts object keys, keeps
arrays in declaration order, and renders numbers shortest-round-trip, so two
semantically equal graphs serialize byte-identically.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

from . import dsl
from .model import (
    ArchitectConstraint,
    Catalog,
    DeviceGroup,
    DeviceSlot,
    HardwareSchema,
    HardwareSpec,
    ObjectiveSpec,
    OptimizeDirective,
    OrderingSpec,
    PerformanceBound,
    Query,
    RoleSpec,
    SchemaEntry,
    SystemSpec,
    SystemWarning,
    WorkloadSpec,
)

VERSION_KEY = "kepler-spec"
VERSION = 1

CATALOG_KEYS = {VERSION_KEY, "schemas", "hardware", "objectives", "roles", "systems", "orderings"}
QUERY_KEYS = {
    VERSION_KEY,
    "topology",
    "workloads",
    "optimize",
    "constraints",
    "pins",
    "excluded_hardware",
    "excluded_systems",
}


class DocumentError(Exception):
    """Parse or resolution failure, annotated with a document path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _num(value: Union[int, float, Fraction]) -> Union[int, float]:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return float(value)
    return value


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_document(path: Union[str, Path], doc: Any) -> None:
    Path(path).write_text(canonical_dumps(doc), encoding="utf-8")


def read_json(path: Union[str, Path]) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}", exc.msg) from exc


def _check_version(doc: dict, where: str) -> None:
    version = doc.get(VERSION_KEY)
    if version is None:
        raise DocumentError(where, f"missing {VERSION_KEY!r} version marker")
    if not isinstance(version, int) or version > VERSION:
        raise DocumentError(
            where, f"unsupported {VERSION_KEY} version {version!r} (loader supports <= {VERSION})"
        )


# --- expression codec --------------------------------------------------------

_SCOPES = {s.value: s for s in dsl.AllocationScope}
_CMPS = {c.value: c for c in dsl.CmpOp}


def expr_to_json(expr: dsl.Expr) -> dict:
    out: dict[str, Any]
    if isinstance(expr, dsl.Lit):
        out = {"op": "lit", "value": _num(expr.value) if not isinstance(expr.value, bool) else expr.value}
    elif isinstance(expr, dsl.WorkloadScalar):
        out = {"op": "scalar", "name": expr.name}
    elif isinstance(expr, dsl.WorkloadHasProperty):
        out = {"op": "has_property", "tag": expr.tag}
    elif isinstance(expr, dsl.CoLocatedHasProperty):
        out = {"op": "colocated_has_property", "tag": expr.tag}
    elif isinstance(expr, dsl.DeviceAttr):
        out = {"op": "device_attr", "slot": expr.slot, "entry": expr.entry}
    elif isinstance(expr, dsl.SystemDeployed):
        out = {"op": "deployed", "system": expr.system, "workload": expr.workload}
    elif isinstance(expr, dsl.RoleEnabled):
        out = {"op": "role_enabled", "role": expr.role}
    elif isinstance(expr, dsl.CountDeployedDevices):
        out = {"op": "count_devices", "device_type": expr.device_type}
    elif isinstance(expr, dsl.TotalAllocated):
        out = {"op": "total_allocated", "resource": expr.resource}
        if expr.device_type:
            out["device_type"] = expr.device_type
    elif isinstance(expr, dsl.TotalCapacity):
        out = {"op": "total_capacity", "resource": expr.resource}
        if expr.device_type:
            out["device_type"] = expr.device_type
    elif isinstance(expr, dsl.Add):
        out = {"op": "add", "args": [expr_to_json(a) for a in expr.args]}
    elif isinstance(expr, dsl.Sub):
        out = {"op": "sub", "lhs": expr_to_json(expr.lhs), "rhs": expr_to_json(expr.rhs)}
    elif isinstance(expr, dsl.Mul):
        out = {"op": "mul", "args": [expr_to_json(a) for a in expr.args]}
    elif isinstance(expr, dsl.Cmp):
        out = {
            "op": "cmp",
            "cmp": expr.op.value,
            "lhs": expr_to_json(expr.lhs),
            "rhs": expr_to_json(expr.rhs),
        }
    elif isinstance(expr, dsl.And):
        out = {"op": "and", "args": [expr_to_json(a) for a in expr.args]}
    elif isinstance(expr, dsl.Or):
        out = {"op": "or", "args": [expr_to_json(a) for a in expr.args]}
    elif isinstance(expr, dsl.Not):
        out = {"op": "not", "arg": expr_to_json(expr.arg)}
    elif isinstance(expr, dsl.Implies):
        out = {
            "op": "implies",
            "if": expr_to_json(expr.antecedent),
            "then": expr_to_json(expr.consequent),
        }
    elif isinstance(expr, dsl.ForAllDeployedDevices):
        out = {
            "op": "forall_devices",
            "device_type": expr.device_type,
            "binder": expr.binder,
            "body": expr_to_json(expr.body),
        }
    elif isinstance(expr, dsl.Allocate):
        out = {
            "op": "allocate",
            "resource": expr.resource,
            "amount": expr_to_json(expr.amount),
            "scope": expr.scope.value,
            "device_type": expr.device_type,
        }
    else:
        raise TypeError(type(expr).__name__)
    if expr.node_id:
        out["id"] = expr.node_id
    if expr.label:
        out["label"] = expr.label
    return out


def expr_from_json(doc: Any, where: str) -> dsl.Expr:
    if not isinstance(doc, dict):
        raise DocumentError(where, f"expression must be an object, got {type(doc).__name__}")
    op = doc.get("op")
    meta = {"node_id": doc.get("id"), "label": doc.get("label")}

    def sub(key: str, default=None) -> dsl.Expr:
        if key not in doc and default is not None:
            return default
        return expr_from_json(doc.get(key), f"{where}.{key}")

    def args() -> tuple[dsl.Expr, ...]:
        raw = doc.get("args", [])
        return tuple(
            expr_from_json(a, f"{where}.args[{i}]") for i, a in enumerate(raw)
        )

    if op == "lit":
        return dsl.Lit(doc["value"], **meta)
    if op == "scalar":
        return dsl.WorkloadScalar(doc["name"], **meta)
    if op == "has_property":
        return dsl.WorkloadHasProperty(doc["tag"], **meta)
    if op == "colocated_has_property":
        return dsl.CoLocatedHasProperty(doc["tag"], **meta)
    if op == "device_attr":
        return dsl.DeviceAttr(doc["slot"], doc["entry"], **meta)
    if op == "deployed":
        return dsl.SystemDeployed(doc["system"], doc.get("workload", dsl.SELF_WORKLOAD), **meta)
    if op == "role_enabled":
        return dsl.RoleEnabled(doc["role"], **meta)
    if op == "count_devices":
        return dsl.CountDeployedDevices(doc["device_type"], **meta)
    if op == "total_allocated":
        return dsl.TotalAllocated(doc["resource"], doc.get("device_type"), **meta)
    if op == "total_capacity":
        return dsl.TotalCapacity(doc["resource"], doc.get("device_type"), **meta)
    if op == "add":
        return dsl.Add(args(), **meta)
    if op == "sub":
        return dsl.Sub(sub("lhs"), sub("rhs"), **meta)
    if op == "mul":
        return dsl.Mul(args(), **meta)
    if op == "cmp":
        cmp_op = doc.get("cmp")
        if cmp_op not in _CMPS:
            raise DocumentError(where, f"unknown comparison {cmp_op!r}")
        return dsl.Cmp(_CMPS[cmp_op], sub("lhs"), sub("rhs"), **meta)
    if op == "and":
        return dsl.And(args(), **meta)
    if op == "or":
        return dsl.Or(args(), **meta)
    if op == "not":
        return dsl.Not(sub("arg"), **meta)
    if op == "implies":
        return dsl.Implies(sub("if"), sub("then"), **meta)
    if op == "forall_devices":
        return dsl.ForAllDeployedDevices(
            doc["device_type"], doc.get("binder", "d"), sub("body"), **meta
        )
    if op == "allocate":
        scope = doc.get("scope")
        if scope not in _SCOPES:
            raise DocumentError(where, f"unknown allocation scope {scope!r}")
        return dsl.Allocate(
            doc["resource"], sub("amount"), _SCOPES[scope], doc["device_type"], **meta
        )
    raise DocumentError(where, f"unknown expression node kind {op!r}")


# --- catalog -------------------------------------------------------------------


def catalog_to_json(catalog: Catalog) -> dict:
    return {
        VERSION_KEY: VERSION,
        "schemas": [
            {
                "id": s.id,
                "device_type": s.device_type,
                "entries": {
                    name: (
                        {"kind": e.kind}
                        if e.default is None
                        else {"kind": e.kind, "default": _num(e.default) if not isinstance(e.default, bool) else e.default}
                    )
                    for name, e in sorted(s.entries.items())
                },
            }
            for _, s in sorted(catalog.schemas.items())
        ],
        "hardware": [
            {
                "id": h.id,
                "schema": h.schema,
                "values": {k: (v if isinstance(v, bool) else _num(v)) for k, v in sorted(h.values.items())},
                **({"provenance": h.provenance} if h.provenance else {}),
            }
            for _, h in sorted(catalog.hardware.items())
        ],
        "objectives": [
            {
                "id": o.id,
                **({"granularities": list(o.granularities)} if o.granularities else {}),
            }
            for _, o in sorted(catalog.objectives.items())
        ],
        "roles": [
            {
                "id": r.id,
                "activation_condition": expr_to_json(r.activation_condition),
                **({"warning": r.warning} if r.warning else {}),
                **({} if r.is_exclusive else {"is_exclusive": False}),
                **({} if r.considered else {"considered": False}),
            }
            for _, r in sorted(catalog.roles.items())
        ],
        "systems": [
            {
                "id": s.id,
                "roles": list(s.roles),
                **({"solves": list(s.solves)} if s.solves else {}),
                "deployment_constraints": expr_to_json(s.deployment_constraints),
                **(
                    {
                        "warnings": [
                            {"when": expr_to_json(w.when), "text": w.text}
                            for w in s.warnings
                        ]
                    }
                    if s.warnings
                    else {}
                ),
                **(
                    {"constraint_labels": dict(sorted(s.constraint_labels.items()))}
                    if s.constraint_labels
                    else {}
                ),
            }
            for _, s in sorted(catalog.systems.items())
        ],
        "orderings": [
            {
                "objective": o.objective,
                "subject": o.subject,
                "relation": o.relation,
                "object": o.object,
                **({"condition": expr_to_json(o.condition)} if o.condition else {}),
                **({} if o.provenance == "EXPERT" else {"provenance": o.provenance}),
            }
            for o in catalog.orderings
        ],
    }


def catalog_from_json(doc: Any, where: str = "catalog") -> Catalog:
    if not isinstance(doc, dict):
        raise DocumentError(where, "catalog document must be an object")
    unknown = set(doc) - CATALOG_KEYS
    if unknown:
        raise DocumentError(where, f"unknown top-level keys: {sorted(unknown)}")
    _check_version(doc, where)

    schemas: dict[str, HardwareSchema] = {}
    for i, raw in enumerate(doc.get("schemas", [])):
        path = f"{where}.schemas[{i}]"
        entries = {}
        for name, e in raw.get("entries", {}).items():
            entries[name] = SchemaEntry(kind=e["kind"], default=e.get("default"))
        schema = HardwareSchema(raw["id"], raw["device_type"], entries)
        if schema.id in schemas:
            raise DocumentError(path, f"duplicate schema id {schema.id!r}")
        schemas[schema.id] = schema

    hardware: dict[str, HardwareSpec] = {}
    for i, raw in enumerate(doc.get("hardware", [])):
        path = f"{where}.hardware[{i}]"
        hw = HardwareSpec(
            raw["id"], raw["schema"], dict(raw.get("values", {})), raw.get("provenance")
        )
        if hw.id in hardware:
            first = [j for j, r in enumerate(doc["hardware"]) if r["id"] == hw.id][0]
            raise DocumentError(
                path, f"duplicate hardware id {hw.id!r} (first at {where}.hardware[{first}])"
            )
        hardware[hw.id] = hw

    objectives: dict[str, ObjectiveSpec] = {}
    for i, raw in enumerate(doc.get("objectives", [])):
        path = f"{where}.objectives[{i}]"
        obj = ObjectiveSpec(raw["id"], tuple(raw.get("granularities", [])))
        if obj.id in objectives:
            raise DocumentError(path, f"duplicate objective id {obj.id!r}")
        objectives[obj.id] = obj

    roles: dict[str, RoleSpec] = {}
    for i, raw in enumerate(doc.get("roles", [])):
        path = f"{where}.roles[{i}]"
        role = RoleSpec(
            raw["id"],
            expr_from_json(raw.get("activation_condition", {"op": "lit", "value": True}), f"{path}.activation_condition"),
            raw.get("warning"),
            raw.get("is_exclusive", True),
            raw.get("considered", True),
        )
        if role.id in roles:
            raise DocumentError(path, f"duplicate role id {role.id!r}")
        roles[role.id] = role

    systems: dict[str, SystemSpec] = {}
    for i, raw in enumerate(doc.get("systems", [])):
        path = f"{where}.systems[{i}]"
        system = SystemSpec(
            raw["id"],
            tuple(raw.get("roles", [])),
            tuple(raw.get("solves", [])),
            expr_from_json(
                raw.get("deployment_constraints", {"op": "lit", "value": True}),
                f"{path}.deployment_constraints",
            ),
            tuple(
                SystemWarning(
                    expr_from_json(w["when"], f"{path}.warnings[{j}].when"), w["text"]
                )
                for j, w in enumerate(raw.get("warnings", []))
            ),
            dict(raw.get("constraint_labels", {})),
        )
        if system.id in systems:
            first = [j for j, r in enumerate(doc["systems"]) if r["id"] == system.id][0]
            raise DocumentError(
                path, f"duplicate system id {system.id!r} (first at {where}.systems[{first}])"
            )
        systems[system.id] = system

    orderings = []
    for i, raw in enumerate(doc.get("orderings", [])):
        path = f"{where}.orderings[{i}]"
        orderings.append(
            OrderingSpec(
                raw["objective"],
                raw["subject"],
                raw["relation"],
                raw["object"],
                expr_from_json(raw["condition"], f"{path}.condition") if raw.get("condition") else None,
                raw.get("provenance", "EXPERT"),
            )
        )

    return Catalog(schemas, hardware, objectives, roles, systems, tuple(orderings))


def merge_catalogs(base: Catalog, overlay: Catalog) -> Catalog:
    """Later files add entries; orderings append (architect overlays)."""
    def merged(a: dict, b: dict, kind: str) -> dict:
        out = dict(a)
        for key, value in b.items():
            if key in out:
                raise DocumentError(kind, f"duplicate {kind} id {key!r} across catalog files")
            out[key] = value
        return out

    return Catalog(
        merged(base.schemas, overlay.schemas, "schema"),
        merged(base.hardware, overlay.hardware, "hardware"),
        merged(base.objectives, overlay.objectives, "objective"),
        merged(base.roles, overlay.roles, "role"),
        merged(base.systems, overlay.systems, "system"),
        base.orderings + overlay.orderings,
    )


# --- query ---------------------------------------------------------------------


def _group_to_json(group: DeviceGroup) -> dict:
    return {
        "id": group.id,
        "group_type": group.group_type,
        "children": [_group_to_json(c) for c in group.children],
        "devices": [
            {
                "id": d.id,
                "device_type": d.device_type,
                "schema": d.schema,
                **({"pinned_hardware": d.pinned_hardware} if d.pinned_hardware else {}),
            }
            for d in group.devices
        ],
    }


def _group_from_json(doc: Any, where: str) -> DeviceGroup:
    return DeviceGroup(
        doc["id"],
        doc.get("group_type", "GROUP"),
        tuple(
            _group_from_json(c, f"{where}.children[{i}]")
            for i, c in enumerate(doc.get("children", []))
        ),
        tuple(
            DeviceSlot(d["id"], d["device_type"], d["schema"], d.get("pinned_hardware"))
            for d in doc.get("devices", [])
        ),
    )


def query_to_json(query: Query) -> dict:
    return {
        VERSION_KEY: VERSION,
        "topology": _group_to_json(query.topology),
        "workloads": [
            {
                "id": w.id,
                "deployed_at": list(w.deployed_at),
                "properties": list(w.properties),
                "objectives": list(w.objectives),
                **({"scalars": {k: _num(v) for k, v in sorted(w.scalars.items())}} if w.scalars else {}),
                **(
                    {
                        "performance_bounds": [
                            {"objective": b.objective, "at_least": b.at_least}
                            for b in w.performance_bounds
                        ]
                    }
                    if w.performance_bounds
                    else {}
                ),
                **({"exempted_roles": list(w.exempted_roles)} if w.exempted_roles else {}),
            }
            for w in query.workloads
        ],
        "optimize": [
            (
                {"target": "TOTAL_COST", "priority": d.priority}
                if d.total_cost
                else {
                    "target": {"workload": d.workload, "objective": d.objective},
                    "priority": d.priority,
                }
            )
            for d in query.optimize
        ],
        "constraints": [
            {
                "id": c.id,
                "expr": expr_to_json(c.expr),
                "hardness": c.hardness,
                **({"label": c.label} if c.label else {}),
            }
            for c in query.constraints
        ],
        "pins": dict(sorted(query.pins.items())),
        "excluded_hardware": list(query.excluded_hardware),
        "excluded_systems": list(query.excluded_systems),
    }


def query_from_json(doc: Any, where: str = "query") -> Query:
    if not isinstance(doc, dict):
        raise DocumentError(where, "query document must be an object")
    unknown = set(doc) - QUERY_KEYS
    if unknown:
        raise DocumentError(where, f"unknown top-level keys: {sorted(unknown)}")
    _check_version(doc, where)
    if "topology" not in doc:
        raise DocumentError(where, "query needs a topology")

    workloads = []
    seen: dict[str, int] = {}
    for i, raw in enumerate(doc.get("workloads", [])):
        path = f"{where}.workloads[{i}]"
        wid = raw["id"]
        if wid in seen:
            raise DocumentError(
                path, f"duplicate workload id {wid!r} (first at {where}.workloads[{seen[wid]}])"
            )
        seen[wid] = i
        workloads.append(
            WorkloadSpec(
                wid,
                tuple(raw.get("deployed_at", [])),
                tuple(raw.get("properties", [])),
                tuple(raw.get("objectives", [])),
                dict(raw.get("scalars", {})),
                tuple(
                    PerformanceBound(b["objective"], b["at_least"])
                    for b in raw.get("performance_bounds", [])
                ),
                tuple(raw.get("exempted_roles", [])),
            )
        )

    optimize = []
    for i, raw in enumerate(doc.get("optimize", [])):
        path = f"{where}.optimize[{i}]"
        target = raw.get("target")
        priority = raw.get("priority")
        if not isinstance(priority, int):
            raise DocumentError(path, "priority must be an integer")
        if target == "TOTAL_COST":
            optimize.append(OptimizeDirective(priority=priority, total_cost=True))
        elif isinstance(target, dict):
            optimize.append(
                OptimizeDirective(
                    priority=priority,
                    workload=target.get("workload"),
                    objective=target.get("objective"),
                )
            )
        else:
            raise DocumentError(path, f"bad optimize target {target!r}")

    constraints = tuple(
        ArchitectConstraint(
            raw["id"],
            expr_from_json(raw["expr"], f"{where}.constraints[{i}].expr"),
            raw.get("hardness", "HARD"),
            raw.get("label"),
        )
        for i, raw in enumerate(doc.get("constraints", []))
    )

    return Query(
        _group_from_json(doc["topology"], f"{where}.topology"),
        tuple(workloads),
        tuple(optimize),
        constraints,
        dict(doc.get("pins", {})),
        tuple(doc.get("excluded_hardware", [])),
        tuple(doc.get("excluded_systems", [])),
    )


# --- design / explanation --------------------------------------------------------


def design_to_json(design) -> dict:
    return {
        VERSION_KEY: VERSION,
        "systems": {
            w: dict(sorted(assignments.items()))
            for w, assignments in sorted(design.systems.items())
        },
        "also_deployed": {
            w: list(extras) for w, extras in sorted(design.also_deployed.items())
        },
        "hardware": dict(sorted(design.hardware.items())),
        "total_cost": _num(design.total_cost),
        "ledgers": {
            device: {
                resource: {
                    "capacity": _num(entry.capacity),
                    "consumed": _num(entry.consumed),
                    "breakdown": {k: _num(v) for k, v in sorted(entry.breakdown.items())},
                }
                for resource, entry in sorted(resources.items())
            }
            for device, resources in sorted(design.ledgers.items())
        },
        "warnings": [{"source": s, "text": t} for s, t in design.warnings],
        "dropped_optional": list(design.dropped_optional),
        "objectives": [
            {
                "priority": o.priority,
                "target": o.label,
                "achieved": _num(o.achieved),
                "rank_vector": {
                    role: {"system": system, "rank": rank}
                    for role, (system, rank) in sorted(o.rank_vector.items())
                },
            }
            for o in design.objectives
        ],
    }


def design_from_json(doc: Any, where: str = "design"):
    from .synthesis import Design, LedgerEntry, ObjectiveReport

    if not isinstance(doc, dict):
        raise DocumentError(where, "design document must be an object")
    _check_version(doc, where)
    design = Design()
    design.systems = {w: dict(m) for w, m in doc.get("systems", {}).items()}
    design.also_deployed = {
        w: list(extras) for w, extras in doc.get("also_deployed", {}).items()
    }
    design.hardware = dict(doc.get("hardware", {}))
    design.total_cost = Fraction(str(doc.get("total_cost", 0)))
    for device, resources in doc.get("ledgers", {}).items():
        design.ledgers[device] = {
            resource: LedgerEntry(
                Fraction(str(e["capacity"])),
                Fraction(str(e["consumed"])),
                {k: Fraction(str(v)) for k, v in e.get("breakdown", {}).items()},
            )
            for resource, e in resources.items()
        }
    design.warnings = [(w["source"], w["text"]) for w in doc.get("warnings", [])]
    design.dropped_optional = list(doc.get("dropped_optional", []))
    design.objectives = [
        ObjectiveReport(
            o["priority"],
            o["target"],
            Fraction(str(o["achieved"])),
            {
                role: (v["system"], v["rank"])
                for role, v in o.get("rank_vector", {}).items()
            },
        )
        for o in doc.get("objectives", [])
    ]
    return design


def explanation_to_json(explanation) -> dict:
    request = explanation.request
    doc: dict[str, Any] = {
        VERSION_KEY: VERSION,
        "outcome": explanation.outcome,
        "request": {
            "workload": request.workload,
            "role": request.role,
            "preferred": request.preferred,
            "objective": request.objective,
            "flexible": sorted(request.flexible),
        },
        "ordering_consulted": explanation.ordering_consulted,
        "dominators": list(explanation.dominators),
    }
    if explanation.outcome == "CONFLICT":
        from .explain import classify

        doc["categories"] = list(explanation.categories)
        doc["atoms"] = [
            {
                "id": a.atom_id,
                "clause": a.clause,
                "categories": classify([a], explanation.request),
                **({"label": a.label} if a.label else {}),
                "origin": {
                    k: v
                    for k, v in (
                        ("kind", a.origin.kind),
                        ("device", a.origin.device),
                        ("resource", a.origin.resource),
                        ("workload", a.origin.workload),
                        ("role", a.origin.role),
                        ("system", a.origin.system),
                        ("objective", a.origin.objective),
                        ("constraint_id", a.origin.constraint_id),
                        ("pin_kind", a.origin.pin_kind),
                    )
                    if v is not None
                },
            }
            for a in explanation.atoms
        ]
    if explanation.outcome == "ALTERNATIVE":
        doc["alternative"] = design_to_json(explanation.alternative)
        doc["tradeoffs"] = [
            {
                "objective": t.objective,
                "priority": t.priority,
                "old_value": _num(t.old_value),
                "new_value": _num(t.new_value),
                "worsened": t.worsened,
                "old_vector": {
                    role: {"system": system, "rank": rank}
                    for role, (system, rank) in sorted(t.old_vector.items())
                },
                "new_vector": {
                    role: {"system": system, "rank": rank}
                    for role, (system, rank) in sorted(t.new_vector.items())
                },
            }
            for t in explanation.tradeoffs
        ]
    return doc


# --- file-level helpers -------------------------------------------------------------


def load_catalog(paths: list[Union[str, Path]]) -> Catalog:
    catalog: Optional[Catalog] = None
    for path in paths:
        doc = read_json(path)
        loaded = catalog_from_json(doc, where=str(path))
        catalog = loaded if catalog is None else merge_catalogs(catalog, loaded)
    return catalog if catalog is not None else Catalog()


def load_query(path: Union[str, Path]) -> Query:
    return query_from_json(read_json(path), where=str(path))


def bundled_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name
