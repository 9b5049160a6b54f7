"""Lower a (catalog, query) pair to a solver session.

Choice variables: one finite ``hardware(<device>)`` index per slot, one
``deploy(<system>,<workload>)`` boolean per candidate deployment, one
``enabled(<role>,<workload>)`` boolean per role. Every assertion is tracked
with an origin record so unsatisfiable cores stay classifiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import dsl, formula as F
from .model import (
    Catalog,
    DeviceSlot,
    EXHAUSTIBLE,
    BOOL,
    OptimizeDirective,
    Query,
    WorkloadSpec,
    activated_roles,
    activation_binding,
    tag_matches,
)
from .ranks import RankTable, build_rank_table
from .solver import Session


class EncodingError(Exception):
    pass


def hw_var(device_id: str) -> str:
    return f"hardware({device_id})"

def attr_var(device_id: str, entry: str) -> str:
    return f"attr({device_id},{entry})"

def dep_var(system_id: str, workload_id: str) -> str:
    return f"deploy({system_id},{workload_id})"

def enabled_var(role_id: str, workload_id: str) -> str:
    return f"enabled({role_id},{workload_id})"


@dataclass(frozen=True)
class Origin:
    kind: str  # DEVICE_FILL CAPACITY ROLE_ACTIVATION ROLE_FULFILL SYSTEM_CONSTRAINT ORDERING_BOUND ARCHITECT PIN
    label: Optional[str] = None
    device: Optional[str] = None
    resource: Optional[str] = None
    workload: Optional[str] = None
    role: Optional[str] = None
    system: Optional[str] = None
    objective: Optional[str] = None
    constraint_id: Optional[str] = None
    pin_kind: Optional[str] = None  # system | hardware | prefer | forbid


@dataclass(frozen=True)
class Demand:
    """One guarded capacity demand on (device, resource)."""

    device: str
    resource: str
    amount: Fraction
    guard: str  # bool var name; true-var for unconditional demands
    consumer: str


@dataclass
class EncodedProblem:
    catalog: Catalog
    query: Query
    bool_vars: list[str] = field(default_factory=list)
    num_vars: dict[str, tuple[Fraction, ...]] = field(default_factory=dict)
    assertions: dict[str, tuple[F.Formula, Origin]] = field(default_factory=dict)
    structural: list[F.Formula] = field(default_factory=list)
    soft: dict[str, tuple[F.Formula, Origin]] = field(default_factory=dict)
    objectives: list[tuple[int, str, F.LinSum, str]] = field(default_factory=list)
    admissible: dict[str, tuple[str, ...]] = field(default_factory=dict)
    demands: list[Demand] = field(default_factory=list)
    enabled_roles: dict[str, dict[str, bool]] = field(default_factory=dict)
    hard_roles: dict[str, frozenset[str]] = field(default_factory=dict)
    rank_tables: dict[tuple[str, str], RankTable] = field(default_factory=dict)
    relevant_roles: dict[tuple[str, str], tuple[str, ...]] = field(default_factory=dict)

    def declare_bool(self, name: str) -> None:
        if name not in self._bool_seen:
            self._bool_seen.add(name)
            self.bool_vars.append(name)

    def declare_num(self, name: str, domain) -> None:
        self.num_vars.setdefault(name, tuple(sorted({Fraction(v) for v in domain})))

    _bool_seen: set = field(default_factory=set)

    def assert_hard(self, track_id: str, f: F.Formula, origin: Origin) -> None:
        if track_id in self.assertions:
            raise EncodingError(f"duplicate track id {track_id}")
        self.assertions[track_id] = (f, origin)

    def assert_soft(self, soft_id: str, f: F.Formula, origin: Origin) -> None:
        self.soft[soft_id] = (f, origin)

    def assert_structural(self, f: F.Formula) -> None:
        """Definitional assertions outside the tracked registry (never in cores)."""
        self.structural.append(f)

    def origin_of(self, track_id: str) -> Origin:
        return self.assertions[track_id][1]

    def build_session(self, budget_seconds: float = 30.0) -> Session:
        session = Session(budget_seconds=budget_seconds)
        for name in self.bool_vars:
            session.declare_bool(name)
        for name, domain in self.num_vars.items():
            session.declare_num(name, domain)
        # the per-workload always-true markers anchor unconditional demands
        for w in self.query.workloads:
            session.assert_always(F.FBool(f"workload({w.id})"))
        for f in self.structural:
            session.assert_always(f)
        for track_id, (f, _origin) in self.assertions.items():
            session.assert_hard(track_id, f)
        for soft_id, (f, _origin) in self.soft.items():
            session.assert_soft(soft_id, f)
        for priority, sense, s, label in self.objectives:
            session.add_objective(priority, sense, s, label)
        return session


def admissible_hardware(catalog: Catalog, query: Query, device: DeviceSlot) -> tuple[str, ...]:
    """Hardware ids that may fill the slot, sorted; pins give a singleton."""
    pin = query.pins.get(device.id, device.pinned_hardware)
    out = []
    for hw_id, hw in sorted(catalog.hardware.items()):
        if hw.schema != device.schema:
            continue
        if hw_id in query.excluded_hardware:
            continue
        if pin is not None and hw_id != pin:
            continue
        out.append(hw_id)
    return tuple(out)


def workload_devices(query: Query, workload: WorkloadSpec) -> tuple[DeviceSlot, ...]:
    groups = {g.id: g for g in query.topology.all_groups()}
    devices: list[DeviceSlot] = []
    seen: set[str] = set()
    for group_id in workload.deployed_at:
        group = groups.get(group_id)
        if group is None:
            continue
        for device in group.all_devices():
            if device.id not in seen:
                seen.add(device.id)
                devices.append(device)
    return tuple(sorted(devices, key=lambda d: d.id))


#: scalar name -> (resource entry, device type) convention for workload demands
WORKLOAD_CHARGES = (
    ("peak_cores", "cores", "COMPUTE"),
    ("compute_load", "cores", "COMPUTE"),
    ("peak_bandwidth", "bandwidth", "LINK"),
    ("network_load", "bandwidth", "LINK"),
)


def workload_demand_shares(
    workload: WorkloadSpec, devices: tuple[DeviceSlot, ...]
) -> list[tuple[str, str, Fraction]]:
    """(device, resource, amount) charges implied by the workload's scalars."""
    out: list[tuple[str, str, Fraction]] = []
    for scalar, resource, device_type in WORKLOAD_CHARGES:
        amount = workload.scalar(scalar)
        if amount == 0:
            continue
        matched = tuple(d.id for d in devices if d.device_type == device_type)
        shares = dsl.split_allocation(amount, matched)
        for slot in sorted(shares):
            if shares[slot] != 0:
                out.append((slot, resource, shares[slot]))
    return out


class _Lowerer:
    """Lower one system constraint (or architect constraint) to a formula."""

    def __init__(
        self,
        problem: EncodedProblem,
        workload: Optional[WorkloadSpec],
        devices: tuple[DeviceSlot, ...],
        guard: Optional[str],
        consumer: str,
        system_id: Optional[str],
        allow_aggregates: bool,
    ):
        self.problem = problem
        self.workload = workload
        self.devices = devices
        self.guard = guard
        self.consumer = consumer
        self.system_id = system_id
        self.allow_aggregates = allow_aggregates
        self.system_allocations: list[tuple[str, str, Fraction, tuple[str, ...]]] = []

    def devices_of(self, device_type: str) -> tuple[DeviceSlot, ...]:
        return tuple(d for d in self.devices if d.device_type == device_type)

    def number(self, expr: dsl.Expr, env: dict[str, DeviceSlot]) -> F.LinSum:
        if isinstance(expr, dsl.Lit):
            if isinstance(expr.value, bool):
                raise EncodingError("boolean literal in numeric position")
            return F.LinSum(const=Fraction(expr.value))
        if isinstance(expr, dsl.WorkloadScalar):
            if self.workload is None:
                raise EncodingError(f"scalar {expr.name!r} outside a workload context")
            return F.LinSum(const=self.workload.scalar(expr.name))
        if isinstance(expr, dsl.CountDeployedDevices):
            return F.LinSum(const=Fraction(len(self.devices_of(expr.device_type))))
        if isinstance(expr, dsl.DeviceAttr):
            device = env.get(expr.slot)
            slot_id = device.id if device is not None else expr.slot
            name = attr_var(slot_id, expr.entry)
            if name not in self.problem.num_vars:
                raise EncodingError(
                    f"no numeric entry {expr.entry!r} on device {slot_id!r}"
                )
            return F.LinSum(((Fraction(1), name),))
        if isinstance(expr, dsl.Add):
            total = F.LinSum()
            for a in expr.args:
                total = total + self.number(a, env)
            return total
        if isinstance(expr, dsl.Sub):
            return self.number(expr.lhs, env) + (-self.number(expr.rhs, env))
        if isinstance(expr, dsl.Mul):
            sums = [self.number(a, env) for a in expr.args]
            consts = [s for s in sums if not s.terms]
            varying = [s for s in sums if s.terms]
            if len(varying) > 1:
                raise EncodingError("nonlinear product is not lowerable")
            k = Fraction(1)
            for s in consts:
                k *= s.const
            if not varying:
                return F.LinSum(const=k)
            return varying[0].scaled(k)
        if isinstance(expr, dsl.TotalAllocated):
            if not self.allow_aggregates:
                raise EncodingError("ledger aggregates are only available to architect constraints")
            total = F.LinSum()
            for demand in self.problem.demands:
                if demand.resource != expr.resource:
                    continue
                if expr.device_type is not None:
                    dtype = _device_type_of(self.problem.query, demand.device)
                    if dtype != expr.device_type:
                        continue
                total = total + F.LinSum(((demand.amount, demand.guard),))
            return total
        if isinstance(expr, dsl.TotalCapacity):
            if not self.allow_aggregates:
                raise EncodingError("ledger aggregates are only available to architect constraints")
            total = F.LinSum()
            for device in self.problem.query.topology.all_devices():
                name = attr_var(device.id, expr.resource)
                if name not in self.problem.num_vars:
                    continue
                if expr.device_type is not None and device.device_type != expr.device_type:
                    continue
                total = total + F.LinSum(((Fraction(1), name),))
            return total
        raise EncodingError(f"{type(expr).__name__} is not numeric")

    def formula(self, expr: dsl.Expr, env: dict[str, DeviceSlot], path: tuple[str, ...]) -> F.Formula:
        if isinstance(expr, dsl.Lit):
            if not isinstance(expr.value, bool):
                raise EncodingError("numeric literal in boolean position")
            return F.TRUE if expr.value else F.FALSE
        if isinstance(expr, dsl.WorkloadHasProperty):
            if self.workload is None:
                raise EncodingError("property test outside a workload context")
            return F.TRUE if expr.tag in self.workload.properties else F.FALSE
        if isinstance(expr, dsl.CoLocatedHasProperty):
            tags: set[str] = set()
            for w in self.problem.query.workloads:
                tags.update(w.properties)
            return F.TRUE if expr.tag in tags else F.FALSE
        if isinstance(expr, dsl.SystemDeployed):
            if expr.system not in self.problem.catalog.systems:
                raise EncodingError(f"unknown system {expr.system!r}")
            if expr.workload == dsl.SELF_WORKLOAD:
                if self.workload is None:
                    raise EncodingError("'self' deployment test outside a workload context")
                return F.FBool(dep_var(expr.system, self.workload.id))
            if expr.workload == dsl.ANY_WORKLOAD:
                return F.for_(
                    *(
                        F.FBool(dep_var(expr.system, w.id))
                        for w in self.problem.query.workloads
                    )
                )
            return F.FBool(dep_var(expr.system, expr.workload))
        if isinstance(expr, dsl.RoleEnabled):
            if self.workload is None:
                raise EncodingError("role test outside a workload context")
            return F.FBool(enabled_var(expr.role, self.workload.id))
        if isinstance(expr, dsl.DeviceAttr):
            device = env.get(expr.slot)
            slot_id = device.id if device is not None else expr.slot
            name = attr_var(slot_id, expr.entry)
            if name in self.problem.num_vars:
                raise EncodingError(
                    f"numeric entry {expr.entry!r} used as a boolean flag"
                )
            return F.FBool(name)
        if isinstance(expr, dsl.Cmp):
            s = self.number(expr.lhs, env) + (-self.number(expr.rhs, env))
            s = s.merged()
            return F.FCmp(expr.op.value, F.LinSum(s.terms), -s.const)
        if isinstance(expr, dsl.And):
            return F.fand(*(self.formula(a, env, path + (str(i),)) for i, a in enumerate(expr.args)))
        if isinstance(expr, dsl.Or):
            self._forbid_allocations(expr, "Or")
            return F.for_(*(self.formula(a, env, path + (str(i),)) for i, a in enumerate(expr.args)))
        if isinstance(expr, dsl.Not):
            self._forbid_allocations(expr, "Not")
            return F.fnot(self.formula(expr.arg, env, path + ("0",)))
        if isinstance(expr, dsl.Implies):
            self._forbid_allocations(expr.antecedent, "an implication antecedent")
            ante = self.formula(expr.antecedent, env, path + ("a",))
            # allocations inside the consequent fire only when the antecedent holds
            old_guard = self.guard
            conditional = not isinstance(ante, F.FTrue)
            if conditional:
                self.guard = self._conditional_guard(ante, path)
            cons = self.formula(expr.consequent, env, path + ("c",))
            self.guard = old_guard
            return F.FImplies(ante, cons)
        if isinstance(expr, dsl.ForAllDeployedDevices):
            matched = self.devices_of(expr.device_type)
            parts = []
            for device in matched:
                sub = dict(env)
                sub[expr.binder] = device
                parts.append(self.formula(expr.body, sub, path + (device.id,)))
            return F.fand(*parts)
        if isinstance(expr, dsl.Allocate):
            amount_sum = self.number(expr.amount, env)
            if amount_sum.terms:
                raise EncodingError("allocation amounts must be constant per workload")
            amount = amount_sum.const
            if amount < 0:
                raise EncodingError("allocation amount is negative")
            guard = self.guard
            if guard is None:
                raise EncodingError("allocation outside a deployment context")
            matched = self.devices_of(expr.device_type)
            self._emit_allocation(expr, amount, matched, guard)
            return F.TRUE
        raise EncodingError(f"{type(expr).__name__} is not lowerable")

    def _forbid_allocations(self, expr: dsl.Expr, where: str) -> None:
        for node in dsl.walk(expr):
            if isinstance(node, dsl.Allocate):
                raise EncodingError(f"allocations may not appear under {where}")

    def _conditional_guard(self, ante: F.Formula, path: tuple[str, ...]) -> str:
        name = f"cond({self.consumer}:{'.'.join(path)})"
        self.problem.declare_bool(name)
        base = F.FBool(self.guard) if self.guard else F.TRUE
        self.problem.assert_structural(F.FIff(F.FBool(name), F.fand(base, ante)))
        return name

    def _emit_allocation(
        self,
        expr: dsl.Allocate,
        amount: Fraction,
        matched: tuple[DeviceSlot, ...],
        guard: str,
    ) -> None:
        if expr.scope is dsl.AllocationScope.PER_DEVICE:
            for device in matched:
                self.problem.demands.append(
                    Demand(device.id, expr.resource, amount, guard, self.consumer)
                )
        elif expr.scope is dsl.AllocationScope.PER_WORKLOAD_GLOBAL:
            shares = dsl.split_allocation(amount, tuple(d.id for d in matched))
            for slot in sorted(shares):
                if shares[slot] != 0:
                    self.problem.demands.append(
                        Demand(slot, expr.resource, shares[slot], guard, self.consumer)
                    )
        else:  # PER_SYSTEM_GLOBAL: dedup handled by the encoder afterwards
            self.system_allocations.append(
                (expr.resource, guard, amount, tuple(d.id for d in matched))
            )


def _device_type_of(query: Query, device_id: str) -> str:
    for device in query.topology.all_devices():
        if device.id == device_id:
            return device.device_type
    raise KeyError(device_id)


def encode(catalog: Catalog, query: Query) -> EncodedProblem:
    problem = EncodedProblem(catalog, query)
    devices = tuple(sorted(query.topology.all_devices(), key=lambda d: d.id))
    workloads = tuple(sorted(query.workloads, key=lambda w: w.id))

    # choice variables and attribute variables
    for device in devices:
        admissible = admissible_hardware(catalog, query, device)
        problem.admissible[device.id] = admissible
        schema = catalog.schemas[device.schema]
        if admissible:
            problem.declare_num(hw_var(device.id), [Fraction(i) for i in range(len(admissible))])
        for entry_name, entry in sorted(schema.entries.items()):
            values = []
            for hw_id in admissible:
                resolved = catalog.hardware[hw_id].resolved_values(schema)
                if entry_name in resolved:
                    values.append(resolved[entry_name])
            if entry.kind == BOOL:
                problem.declare_bool(attr_var(device.id, entry_name))
            else:
                domain = values if values else [Fraction(0)]
                problem.declare_num(attr_var(device.id, entry_name), domain)

    for w in workloads:
        problem.declare_bool(f"workload({w.id})")
        for role_id in sorted(catalog.roles):
            problem.declare_bool(enabled_var(role_id, w.id))
        for system_id in sorted(catalog.systems):
            problem.declare_bool(dep_var(system_id, w.id))

    # (1) device fill: some admissible hardware, attributes bound per choice
    for device in devices:
        admissible = problem.admissible[device.id]
        schema = catalog.schemas[device.schema]
        if not admissible:
            problem.assert_hard(
                f"fill:{device.id}",
                F.FALSE,
                Origin(
                    kind="DEVICE_FILL",
                    device=device.id,
                    label=f"no admissible hardware can fill {device.id}",
                ),
            )
            continue
        parts: list[F.Formula] = [
            F.for_(*(F.num_eq(hw_var(device.id), Fraction(i)) for i in range(len(admissible))))
        ]
        for i, hw_id in enumerate(admissible):
            resolved = catalog.hardware[hw_id].resolved_values(schema)
            bindings: list[F.Formula] = []
            for entry_name in sorted(schema.entries):
                if entry_name not in resolved:
                    continue
                value = resolved[entry_name]
                if isinstance(value, bool):
                    bindings.append(F.bool_is(attr_var(device.id, entry_name), value))
                else:
                    bindings.append(F.num_eq(attr_var(device.id, entry_name), value))
            parts.append(
                F.FImplies(F.num_eq(hw_var(device.id), Fraction(i)), F.fand(*bindings))
            )
        problem.assert_hard(
            f"fill:{device.id}",
            F.fand(*parts),
            Origin(
                kind="DEVICE_FILL",
                device=device.id,
                label=f"device {device.id} must be filled by admissible hardware",
            ),
        )

    # (3) role activation equivalences
    for w in workloads:
        active = dict(activated_roles(catalog, w, workloads))
        problem.enabled_roles[w.id] = {}
        for role_id in sorted(catalog.roles):
            on = role_id in active
            problem.enabled_roles[w.id][role_id] = on
            problem.assert_hard(
                f"act:{w.id}:{role_id}",
                F.FIff(F.FBool(enabled_var(role_id, w.id)), F.TRUE if on else F.FALSE),
                Origin(
                    kind="ROLE_ACTIVATION",
                    workload=w.id,
                    role=role_id,
                    label=(
                        f"role {role_id} is {'activated' if on else 'not activated'} "
                        f"for workload {w.id}"
                    ),
                ),
            )

    # rank tables conditioned per workload, for bounds and objectives
    objective_tags_in_orderings = sorted({o.objective for o in catalog.orderings})
    for w in workloads:
        binding = activation_binding(w, workloads)

        def condition_holds(entry, _binding=binding):
            return dsl.evaluate(entry.condition, _binding).truth

        for tag in objective_tags_in_orderings:
            problem.rank_tables[(w.id, tag)] = build_rank_table(
                tag, catalog.orderings, condition_holds=condition_holds
            )

    # (4) role fulfillment, hardness per objective linkage; hardness judges the
    # full catalog so excluding every candidate of a needed role is infeasible
    for w in workloads:
        hard: set[str] = set()
        for role_id, on in sorted(problem.enabled_roles[w.id].items()):
            if not on:
                continue
            fulfillers = [
                s for s in catalog.systems_for_role(role_id) if s.id not in query.excluded_systems
            ]
            if _role_is_hard(catalog, problem, w, role_id, catalog.systems_for_role(role_id)):
                hard.add(role_id)
                role = catalog.roles[role_id]
                deps = tuple(F.FBool(dep_var(s.id, w.id)) for s in fulfillers)
                body = F.exactly_one(deps) if role.is_exclusive else F.for_(*deps)
                problem.assert_hard(
                    f"fulfill:{w.id}:{role_id}",
                    F.FImplies(F.FBool(enabled_var(role_id, w.id)), body),
                    Origin(
                        kind="ROLE_FULFILL",
                        workload=w.id,
                        role=role_id,
                        label=(
                            f"enabled role {role_id} needs "
                            f"{'exactly one' if role.is_exclusive else 'at least one'} system"
                        ),
                    ),
                )
        problem.hard_roles[w.id] = frozenset(hard)

        # systems deploy only toward enabled roles; exclusive roles stay single
        for system_id, system in sorted(catalog.systems.items()):
            role_lits = tuple(
                F.FBool(enabled_var(r, w.id)) for r in system.roles if r in catalog.roles
            )
            guard_parts: list[F.Formula] = [F.for_(*role_lits)]
            if system_id in query.excluded_systems:
                guard_parts = [F.FALSE]
            problem.assert_hard(
                f"scope:{w.id}:{system_id}",
                F.FImplies(F.FBool(dep_var(system_id, w.id)), F.fand(*guard_parts)),
                Origin(
                    kind="ROLE_FULFILL",
                    workload=w.id,
                    system=system_id,
                    label=(
                        f"{system_id} deploys for {w.id} only to fill an enabled role"
                        + (" (system excluded by the architect)" if system_id in query.excluded_systems else "")
                    ),
                ),
            )
        for role_id, on in sorted(problem.enabled_roles[w.id].items()):
            if not on or role_id in problem.hard_roles[w.id]:
                continue
            role = catalog.roles[role_id]
            if not role.is_exclusive:
                continue
            fulfillers = [
                s for s in catalog.systems_for_role(role_id) if s.id not in query.excluded_systems
            ]
            deps = tuple(F.FBool(dep_var(s.id, w.id)) for s in fulfillers)
            if len(deps) > 1:
                pairwise = []
                for i in range(len(deps)):
                    for j in range(i + 1, len(deps)):
                        pairwise.append(F.for_(F.fnot(deps[i]), F.fnot(deps[j])))
                problem.assert_hard(
                    f"exclusive:{w.id}:{role_id}",
                    F.fand(*pairwise),
                    Origin(
                        kind="ROLE_FULFILL",
                        workload=w.id,
                        role=role_id,
                        label=f"role {role_id} is exclusive for workload {w.id}",
                    ),
                )

    # objective coverage: each workload objective reachable by some fulfiller
    for w in workloads:
        for tag in w.objectives:
            candidates = _objective_candidates(catalog, problem, query, w, tag)
            if not candidates:
                continue
            problem.assert_hard(
                f"cover:{w.id}:{tag}",
                F.for_(*(F.FBool(dep_var(s, w.id)) for s in candidates)),
                Origin(
                    kind="ROLE_FULFILL",
                    workload=w.id,
                    objective=tag,
                    label=f"some deployed system must solve {tag} for workload {w.id}",
                ),
            )

    # (5) deployed systems apply their constraints; also collect demands
    system_global: dict[tuple[str, str, str], tuple[Fraction, list[str]]] = {}
    for w in workloads:
        wdevices = workload_devices(query, w)
        for system_id, system in sorted(catalog.systems.items()):
            if system_id in query.excluded_systems:
                continue
            if not any(problem.enabled_roles[w.id].get(r, False) for r in system.roles):
                continue
            guard = dep_var(system_id, w.id)
            lowerer = _Lowerer(
                problem, w, wdevices, guard, f"{system_id}@{w.id}", system_id, False
            )
            body = lowerer.formula(system.deployment_constraints, {}, ())
            label = system.label_for(system.deployment_constraints) or (
                f"deployment constraints of {system_id}"
            )
            problem.assert_hard(
                f"sys:{system_id}:{w.id}",
                F.FImplies(F.FBool(guard), body),
                Origin(
                    kind="SYSTEM_CONSTRAINT",
                    system=system_id,
                    workload=w.id,
                    label=label,
                ),
            )
            for resource, guard_name, amount, matched in lowerer.system_allocations:
                for device_id in matched:
                    key = (system_id, device_id, resource)
                    if key in system_global:
                        prev_amount, guards = system_global[key]
                        if prev_amount != amount:
                            raise EncodingError(
                                f"{system_id} demands conflicting per-system amounts of "
                                f"{resource} on {device_id}"
                            )
                        guards.append(guard_name)
                    else:
                        system_global[key] = (amount, [guard_name])

    for (system_id, device_id, resource), (amount, guards) in sorted(system_global.items()):
        name = f"psg({system_id},{device_id},{resource})"
        problem.declare_bool(name)
        problem.assert_structural(
            F.FIff(F.FBool(name), F.for_(*(F.FBool(g) for g in sorted(set(guards)))))
        )
        problem.demands.append(Demand(device_id, resource, amount, name, system_id))

    # workload scalar demands (always active)
    for w in workloads:
        wdevices = workload_devices(query, w)
        for device_id, resource, amount in workload_demand_shares(w, wdevices):
            problem.demands.append(
                Demand(device_id, resource, amount, f"workload({w.id})", w.id)
            )

    # (2) per-device exhaustible capacity >= sum of guarded demands
    by_slot: dict[tuple[str, str], list[Demand]] = {}
    for demand in problem.demands:
        by_slot.setdefault((demand.device, demand.resource), []).append(demand)
    for device in devices:
        schema = catalog.schemas[device.schema]
        for entry_name, entry in sorted(schema.entries.items()):
            if entry.kind != EXHAUSTIBLE:
                continue
            slot_demands = by_slot.get((device.id, entry_name), [])
            if not slot_demands:
                continue
            cap_name = attr_var(device.id, entry_name)
            terms = [(demand.amount, demand.guard) for demand in slot_demands]
            terms.append((Fraction(-1), cap_name))
            problem.assert_hard(
                f"cap:{device.id}:{entry_name}",
                F.FCmp("<=", F.LinSum(tuple(terms)), Fraction(0)),
                Origin(
                    kind="CAPACITY",
                    device=device.id,
                    resource=entry_name,
                    label=f"aggregate {entry_name} demand fits {device.id}",
                ),
            )

    # (6) performance bounds: the chosen system is not dominated by the floor
    for w in workloads:
        for bound in w.performance_bounds:
            table = problem.rank_tables.get((w.id, bound.objective))
            if table is None or not table.covers(bound.at_least):
                raise EncodingError(
                    f"performance bound for {w.id} names {bound.at_least!r}, which has "
                    f"no ordering on {bound.objective!r}"
                )
            roles_of_bound = set(catalog.systems[bound.at_least].roles)
            excluded: list[str] = []
            for role_id in sorted(roles_of_bound):
                if not problem.enabled_roles[w.id].get(role_id, False):
                    continue
                for s in catalog.systems_for_role(role_id):
                    if bound.at_least in table.dominators_of(s.id):
                        excluded.append(s.id)
            parts = tuple(
                F.fnot(F.FBool(dep_var(s, w.id))) for s in sorted(set(excluded))
            )
            problem.assert_hard(
                f"bound:{w.id}:{bound.objective}",
                F.fand(*parts),
                Origin(
                    kind="ORDERING_BOUND",
                    workload=w.id,
                    objective=bound.objective,
                    system=bound.at_least,
                    label=(
                        f"{w.id} requires {bound.objective} at least as good as {bound.at_least}"
                    ),
                ),
            )

    # (7) architect constraints
    for constraint in query.constraints:
        lowerer = _Lowerer(problem, None, devices, None, f"arch:{constraint.id}", None, True)
        body = lowerer.formula(constraint.expr, {}, ())
        origin = Origin(
            kind="ARCHITECT",
            constraint_id=constraint.id,
            label=constraint.label or f"architect constraint {constraint.id}",
        )
        if constraint.hardness == "OPTIONAL":
            problem.assert_soft(f"arch:{constraint.id}", body, origin)
        else:
            problem.assert_hard(f"arch:{constraint.id}", body, origin)

    # (8) objectives by priority
    for directive in sorted(query.optimize, key=lambda d: d.priority):
        if directive.total_cost:
            terms = []
            for device in devices:
                if problem.admissible[device.id]:
                    terms.append((Fraction(1), attr_var(device.id, "cost")))
            problem.objectives.append(
                (directive.priority, "MINIMIZE", F.LinSum(tuple(terms)), "TOTAL_COST")
            )
            continue
        w = query.workload(directive.workload)
        s, relevant = _objective_sum(catalog, problem, query, w, directive.objective)
        problem.relevant_roles[(w.id, directive.objective)] = relevant
        problem.objectives.append(
            (
                directive.priority,
                "MAXIMIZE",
                s,
                f"{directive.workload}:{directive.objective}",
            )
        )

    return problem


def _role_is_hard(catalog, problem, w, role_id, fulfillers) -> bool:
    for s in fulfillers:
        for tag in w.objectives:
            if any(tag_matches(tag, solved) or tag_matches(solved, tag) for solved in s.solves):
                return True
        for (wid, obj), table in problem.rank_tables.items():
            if wid != w.id:
                continue
            if not any(tag_matches(t, obj) or tag_matches(obj, t) for t in w.objectives):
                continue
            if table.covers(s.id):
                return True
    for bound in w.performance_bounds:
        if bound.at_least in {s.id for s in fulfillers}:
            return True
    return False


def _objective_candidates(catalog, problem, query, w, tag) -> list[str]:
    out = []
    for system_id, system in sorted(catalog.systems.items()):
        if system_id in query.excluded_systems:
            continue
        if not any(problem.enabled_roles[w.id].get(r, False) for r in system.roles):
            continue
        if any(tag_matches(tag, solved) for solved in system.solves):
            out.append(system_id)
    return out


def _objective_sum(catalog, problem, query, w, objective) -> tuple[F.LinSum, tuple[str, ...]]:
    table = problem.rank_tables.get((w.id, objective))
    relevant: list[str] = []
    terms: list[tuple[Fraction, str]] = []
    for role_id, on in sorted(problem.enabled_roles[w.id].items()):
        if not on:
            continue
        fulfillers = [
            s for s in catalog.systems_for_role(role_id) if s.id not in query.excluded_systems
        ]
        linked = False
        for s in fulfillers:
            if any(tag_matches(objective, solved) for solved in s.solves):
                linked = True
            if table is not None and table.covers(s.id):
                linked = True
        if not linked:
            continue
        relevant.append(role_id)
        for s in fulfillers:
            rank = table.rank(s.id) if table is not None else 0
            if rank:
                terms.append((Fraction(rank), dep_var(s.id, w.id)))
    return F.LinSum(tuple(terms)), tuple(relevant)
