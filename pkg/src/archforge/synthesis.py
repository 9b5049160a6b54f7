"""Synthesis: solve the encoded problem, extract a canonical design, and
re-verify it with a solver-free checker.

The checker re-evaluates every hard constraint through the expression
evaluator plus ledger arithmetic; a disagreement with the solver means a
defect in exactly one of encoder or evaluator, so designs are always passed
through it before being reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from . import dsl
from .encode import (
    EncodedProblem,
    EncodingError,
    Origin,
    admissible_hardware,
    attr_var,
    dep_var,
    encode,
    enabled_var,
    hw_var,
    workload_demand_shares,
    workload_devices,
)
from .model import (
    Catalog,
    EXHAUSTIBLE,
    Query,
    WorkloadSpec,
    activated_roles,
    activation_binding,
    tag_matches,
    validate_catalog,
)
from .solver import Model, Session, SolverTimeout


@dataclass
class LedgerEntry:
    capacity: Fraction
    consumed: Fraction = Fraction(0)
    breakdown: dict[str, Fraction] = field(default_factory=dict)


@dataclass
class ObjectiveReport:
    priority: int
    label: str
    achieved: Fraction
    rank_vector: dict[str, tuple[str, int]] = field(default_factory=dict)


@dataclass
class Design:
    systems: dict[str, dict[str, str]] = field(default_factory=dict)
    # extra deployments on shared roles, beyond each role's representative
    also_deployed: dict[str, list[str]] = field(default_factory=dict)
    hardware: dict[str, str] = field(default_factory=dict)
    total_cost: Fraction = Fraction(0)
    ledgers: dict[str, dict[str, LedgerEntry]] = field(default_factory=dict)
    warnings: list[tuple[str, str]] = field(default_factory=list)
    dropped_optional: list[str] = field(default_factory=list)
    objectives: list[ObjectiveReport] = field(default_factory=list)

    def deployed(self, workload_id: str) -> frozenset[str]:
        return frozenset(self.systems.get(workload_id, {}).values()) | frozenset(
            self.also_deployed.get(workload_id, ())
        )


@dataclass
class Infeasibility:
    core: list[tuple[str, Origin]]

    def origins(self) -> list[Origin]:
        return [origin for _, origin in self.core]


class SynthesisError(Exception):
    pass


def synthesize(
    catalog: Catalog,
    query: Query,
    budget_seconds: float = 30.0,
) -> Union[Design, Infeasibility]:
    """Produce the lexicographically optimal design or an annotated core.

    Raises SolverTimeout when the budget is exhausted (never silently UNSAT)
    and SynthesisError on invalid inputs.
    """
    report = validate_catalog(catalog, query)
    if not report.ok:
        raise SynthesisError(
            "catalog/query invalid: " + "; ".join(str(v) for v in report.sorted())
        )
    problem = encode(catalog, query)
    session = problem.build_session(budget_seconds=budget_seconds)
    result = session.solve()
    if result.status == "UNSAT":
        core = [(t, problem.origin_of(t)) for t in sorted(result.core)]
        return Infeasibility(core)
    model = _polish(problem, session, result.model)
    design = extract_design(problem, session, model, result)
    violations = check_design(catalog, query, design)
    if violations:
        raise SynthesisError(
            "solver design failed independent checking: " + "; ".join(violations)
        )
    return design


def _polish(problem: EncodedProblem, session: Session, model: Model) -> Model:
    """Canonicalize ties: lexicographically smallest system ids, then hardware ids.

    Objective floors recorded by the session keep optimality intact; every
    fix is validated by a feasibility check before being adopted.
    """
    catalog = problem.catalog
    for w in sorted(problem.enabled_roles):
        for role_id, on in sorted(problem.enabled_roles[w].items()):
            if not on or not catalog.roles[role_id].is_exclusive:
                continue
            fulfillers = [
                s.id
                for s in catalog.systems_for_role(role_id)
                if s.id not in problem.query.excluded_systems
            ]
            current = [s for s in fulfillers if model.bool_value(dep_var(s, w))]
            if not current:
                continue
            for candidate in fulfillers:
                if candidate == current[0]:
                    session.fix(session.bool_lit(dep_var(candidate, w)))
                    break
                attempt = session.check([session.bool_lit(dep_var(candidate, w))])
                if attempt is not None:
                    model = attempt
                    session.fix(session.bool_lit(dep_var(candidate, w)))
                    break
    for device_id in sorted(problem.admissible):
        admissible = problem.admissible[device_id]
        if len(admissible) <= 1:
            continue
        current = int(model.num_value(hw_var(device_id)))
        for i, _hw_id in enumerate(admissible):
            if i == current:
                session.fix(session.num_eq_lit(hw_var(device_id), Fraction(i)))
                break
            attempt = session.check([session.num_eq_lit(hw_var(device_id), Fraction(i))])
            if attempt is not None:
                model = attempt
                session.fix(session.num_eq_lit(hw_var(device_id), Fraction(i)))
                break
    final = session.check()
    return final if final is not None else model


def extract_design(
    problem: EncodedProblem,
    session: Session,
    model: Model,
    result,
) -> Design:
    catalog, query = problem.catalog, problem.query
    design = Design()

    for device_id in sorted(problem.admissible):
        admissible = problem.admissible[device_id]
        if not admissible:
            continue
        idx = int(model.num_value(hw_var(device_id)))
        design.hardware[device_id] = admissible[idx]

    for w in sorted(problem.enabled_roles):
        assignments: dict[str, str] = {}
        deployed_all: set[str] = set()
        for role_id, on in sorted(problem.enabled_roles[w].items()):
            if not on:
                continue
            deployed = [
                s.id
                for s in catalog.systems_for_role(role_id)
                if s.id not in query.excluded_systems
                and model.bool_value(dep_var(s.id, w))
            ]
            deployed_all.update(deployed)
            if deployed:
                assignments[role_id] = sorted(deployed)[0]
        design.systems[w] = assignments
        extras = sorted(deployed_all - set(assignments.values()))
        if extras:
            design.also_deployed[w] = extras

    design.total_cost = sum(
        (
            Fraction(catalog.hardware[hw].resolved_values(catalog.schemas[catalog.hardware[hw].schema])["cost"])
            for hw in design.hardware.values()
        ),
        Fraction(0),
    )

    # ledgers from the demand registry, guards read off the model
    for demand in problem.demands:
        guard_true = (
            model.bool_value(demand.guard) if session.has_name(demand.guard) else False
        )
        if not guard_true:
            continue
        slot_ledgers = design.ledgers.setdefault(demand.device, {})
        entry = slot_ledgers.get(demand.resource)
        if entry is None:
            cap_name = attr_var(demand.device, demand.resource)
            entry = LedgerEntry(capacity=model.num_value(cap_name))
            slot_ledgers[demand.resource] = entry
        entry.consumed += demand.amount
        entry.breakdown[demand.consumer] = (
            entry.breakdown.get(demand.consumer, Fraction(0)) + demand.amount
        )

    design.dropped_optional = sorted(result.dropped_soft)

    for priority, sense, s, label in problem.objectives:
        achieved = model.sum_value(s)
        report = ObjectiveReport(priority, label, achieved)
        if ":" in label:
            w, obj = label.split(":", 1)
            table = problem.rank_tables.get((w, obj))
            for role_id in problem.relevant_roles.get((w, obj), ()):
                chosen = design.systems.get(w, {}).get(role_id)
                if chosen is not None:
                    report.rank_vector[role_id] = (
                        chosen,
                        table.rank(chosen) if table else 0,
                    )
        design.objectives.append(report)

    design.warnings = collect_warnings(catalog, query, design)
    return design


# --- independent checker -----------------------------------------------------


def design_binding(
    catalog: Catalog,
    query: Query,
    design: Design,
    workload: WorkloadSpec,
    ledgers: Optional[dict[tuple[str, str], tuple[Fraction, Fraction]]] = None,
) -> dsl.Binding:
    devices = []
    for device in workload_devices(query, workload):
        hw_id = design.hardware.get(device.id)
        if hw_id is None:
            continue
        hw = catalog.hardware[hw_id]
        devices.append(
            dsl.DeviceBinding(
                device.id, device.device_type, hw.resolved_values(catalog.schemas[hw.schema])
            )
        )
    colocated: set[str] = set()
    for w in query.workloads:
        colocated.update(w.properties)
    return dsl.Binding(
        workload=workload.id,
        scalars={k: Fraction(v) for k, v in workload.scalars.items()},
        properties=frozenset(workload.properties),
        colocated_properties=frozenset(colocated),
        devices=tuple(devices),
        deployed={w: design.deployed(w) for w in design.systems},
        enabled_roles=frozenset(design.systems.get(workload.id, {})),
        ledgers=ledgers or {},
    )


def check_design(catalog: Catalog, query: Query, design: Design) -> list[str]:
    """Re-verify a design without the solver; returns violations (empty = ok)."""
    violations: list[str] = []
    workloads = tuple(sorted(query.workloads, key=lambda w: w.id))

    # hardware admissibility and pins
    for device in query.topology.all_devices():
        hw_id = design.hardware.get(device.id)
        admissible = admissible_hardware(catalog, query, device)
        if hw_id is None:
            if admissible:
                violations.append(f"DEVICE_FILL: {device.id} left unfilled")
            continue
        if hw_id not in admissible:
            violations.append(
                f"DEVICE_FILL: {device.id} filled with inadmissible hardware {hw_id}"
            )

    # role activation and fulfillment
    for w in workloads:
        active = dict(activated_roles(catalog, w, workloads))
        assigned = design.systems.get(w.id, {})
        for role_id, system_id in sorted(assigned.items()):
            if role_id not in active:
                violations.append(
                    f"ROLE_ACTIVATION: {w.id} maps inactive role {role_id}"
                )
            system = catalog.systems.get(system_id)
            if system is None or role_id not in system.roles:
                violations.append(
                    f"ROLE_FULFILL: {system_id} does not fulfill {role_id}"
                )
            if system_id in query.excluded_systems:
                violations.append(f"ROLE_FULFILL: {system_id} was excluded")
        for role_id in sorted(active):
            if role_id in assigned:
                continue
            fulfillers = catalog.systems_for_role(role_id)
            if _hard_for(catalog, w, role_id, fulfillers):
                violations.append(
                    f"ROLE_FULFILL: required role {role_id} unfilled for {w.id}"
                )
        deployed_now = design.deployed(w.id)
        for system_id in sorted(deployed_now):
            system = catalog.systems.get(system_id)
            if system is not None and not any(r in active for r in system.roles):
                violations.append(
                    f"ROLE_FULFILL: {system_id} deployed for {w.id} without an enabled role"
                )
        for role_id in sorted(active):
            role = catalog.roles[role_id]
            if not role.is_exclusive:
                continue
            fulfilling = [
                s for s in sorted(deployed_now) if role_id in catalog.systems[s].roles
            ]
            if len(fulfilling) > 1:
                violations.append(
                    f"ROLE_FULFILL: exclusive role {role_id} held by {fulfilling} for {w.id}"
                )

    # objective coverage
    for w in workloads:
        active = {r for r, _ in activated_roles(catalog, w, workloads)}
        deployed = design.deployed(w.id)
        for tag in w.objectives:
            candidates = [
                s.id
                for _sid, s in sorted(catalog.systems.items())
                if s.id not in query.excluded_systems
                and any(tag_matches(tag, solved) for solved in s.solves)
                and any(r in active for r in s.roles)
            ]
            if candidates and not any(s in deployed for s in candidates):
                violations.append(
                    f"OBJECTIVE: no deployed system solves {tag} for {w.id}"
                )

    # system constraints + allocations -> ledgers
    ledgers: dict[tuple[str, str], tuple[Fraction, Fraction]] = {}
    consumed: dict[tuple[str, str], Fraction] = {}
    breakdown: dict[tuple[str, str], dict[str, Fraction]] = {}
    system_global_seen: set[tuple[str, str, str]] = set()
    for w in workloads:
        binding = design_binding(catalog, query, design, w)
        for system_id in sorted(design.deployed(w.id)):
            system = catalog.systems[system_id]
            try:
                result = dsl.evaluate(system.deployment_constraints, binding)
            except dsl.DslError as exc:
                violations.append(f"SYSTEM_CONSTRAINT: {system_id}@{w.id}: {exc}")
                continue
            if not result.truth:
                label = system.label_for(system.deployment_constraints)
                violations.append(
                    f"SYSTEM_CONSTRAINT: {system_id}@{w.id} violated"
                    + (f" ({label})" if label else "")
                )
                continue
            for alloc in result.allocations:
                if alloc.scope is dsl.AllocationScope.PER_SYSTEM_GLOBAL:
                    key3 = (system_id, alloc.slot_id, alloc.resource)
                    if key3 in system_global_seen:
                        continue
                    system_global_seen.add(key3)
                key = (alloc.slot_id, alloc.resource)
                consumed[key] = consumed.get(key, Fraction(0)) + alloc.amount
                breakdown.setdefault(key, {})
                breakdown[key][f"{system_id}"] = (
                    breakdown[key].get(f"{system_id}", Fraction(0)) + alloc.amount
                )
        for device_id, resource, amount in workload_demand_shares(
            w, workload_devices(query, w)
        ):
            key = (device_id, resource)
            consumed[key] = consumed.get(key, Fraction(0)) + amount
            breakdown.setdefault(key, {})
            breakdown[key][w.id] = breakdown[key].get(w.id, Fraction(0)) + amount

    # capacity ledgers
    for (device_id, resource), used in sorted(consumed.items()):
        device = next(
            (d for d in query.topology.all_devices() if d.id == device_id), None
        )
        if device is None:
            continue
        schema = catalog.schemas[device.schema]
        entry = schema.entries.get(resource)
        if entry is None or entry.kind != EXHAUSTIBLE:
            violations.append(f"CAPACITY: {resource} on {device_id} is not exhaustible")
            continue
        hw_id = design.hardware.get(device_id)
        if hw_id is None:
            continue
        values = catalog.hardware[hw_id].resolved_values(schema)
        capacity = values.get(resource, Fraction(0))
        ledgers[(device_id, resource)] = (Fraction(capacity), used)
        if used > capacity:
            violations.append(
                f"CAPACITY: {device_id} {resource} consumed {used} > capacity {capacity}"
            )

    # performance bounds
    for w in workloads:
        for bound in w.performance_bounds:
            from .ranks import build_rank_table

            binding = activation_binding(w, workloads)
            table = build_rank_table(
                bound.objective,
                catalog.orderings,
                condition_holds=lambda o: dsl.evaluate(o.condition, binding).truth,
            )
            roles_of_bound = set(catalog.systems[bound.at_least].roles)
            for role_id in sorted(roles_of_bound):
                chosen = design.systems.get(w.id, {}).get(role_id)
                if chosen is None:
                    continue
                if bound.at_least in table.dominators_of(chosen):
                    violations.append(
                        f"ORDERING_BOUND: {chosen} is dominated by {bound.at_least} "
                        f"on {bound.objective} for {w.id}"
                    )

    # architect constraints over ledger aggregates
    arch_binding = dsl.Binding(
        workload="",
        devices=tuple(
            dsl.DeviceBinding(
                d.id,
                d.device_type,
                catalog.hardware[design.hardware[d.id]].resolved_values(
                    catalog.schemas[d.schema]
                ),
            )
            for d in sorted(query.topology.all_devices(), key=lambda d: d.id)
            if d.id in design.hardware
        ),
        deployed={w: design.deployed(w) for w in design.systems},
        ledgers=ledgers,
    )
    for constraint in query.constraints:
        if constraint.hardness != "HARD":
            continue
        try:
            result = dsl.evaluate(constraint.expr, arch_binding)
        except dsl.DslError as exc:
            violations.append(f"ARCHITECT: {constraint.id}: {exc}")
            continue
        if not result.truth:
            violations.append(f"ARCHITECT: constraint {constraint.id} violated")

    # cost conservation
    expected_cost = Fraction(0)
    for device_id, hw_id in design.hardware.items():
        hw = catalog.hardware[hw_id]
        expected_cost += Fraction(
            hw.resolved_values(catalog.schemas[hw.schema])["cost"]
        )
    if expected_cost != design.total_cost:
        violations.append(
            f"COST: reported {design.total_cost} != recomputed {expected_cost}"
        )

    return violations


def _hard_for(catalog: Catalog, w: WorkloadSpec, role_id: str, fulfillers) -> bool:
    from .ranks import build_rank_table

    tables: dict[str, object] = {}
    for s in fulfillers:
        for tag in w.objectives:
            if any(tag_matches(tag, solved) or tag_matches(solved, tag) for solved in s.solves):
                return True
        for obj in sorted({o.objective for o in catalog.orderings}):
            if not any(tag_matches(t, obj) or tag_matches(obj, t) for t in w.objectives):
                continue
            if obj not in tables:
                tables[obj] = build_rank_table(obj, catalog.orderings)
            if tables[obj].covers(s.id):
                return True
    for bound in w.performance_bounds:
        if bound.at_least in {s.id for s in fulfillers}:
            return True
    return False


def collect_warnings(catalog: Catalog, query: Query, design: Design) -> list[tuple[str, str]]:
    """System warnings, unfulfilled optional roles, and exempted-role warnings."""
    warnings: list[tuple[str, str]] = []
    workloads = tuple(sorted(query.workloads, key=lambda w: w.id))
    for w in workloads:
        binding = design_binding(catalog, query, design, w)
        for system_id in sorted(design.deployed(w.id)):
            system = catalog.systems[system_id]
            for warning in system.warnings:
                try:
                    if dsl.evaluate(warning.when, binding).truth:
                        warnings.append((f"{system_id}@{w.id}", warning.text))
                except dsl.DslError:
                    continue

        active = dict(activated_roles(catalog, w, workloads))
        assigned = design.systems.get(w.id, {})
        for role_id in sorted(active):
            if role_id in assigned:
                continue
            role = catalog.roles[role_id]
            text = role.warning or f"role {role_id} is activated but no system fulfills it"
            warnings.append((f"{role_id}@{w.id}", text))

        # roles the architect disabled although their condition holds
        act_binding = activation_binding(w, workloads)
        for role_id in sorted(catalog.roles):
            role = catalog.roles[role_id]
            disabled = role_id in w.exempted_roles or not role.considered
            if not disabled:
                continue
            if dsl.evaluate(role.activation_condition, act_binding).truth and role.warning:
                warnings.append((f"{role_id}@{w.id}", role.warning))
    return warnings
