"""Declarative constraint expressions over workloads, devices, and systems.

Expressions are immutable trees. They can be evaluated against a concrete
binding (hardware assigned to slots, deployed systems, workload context) or
lowered to solver formulas by the encoder. Evaluation is pure: it returns a
truth value plus the resource allocations demanded by satisfied branches.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Union

Number = Union[int, float, Fraction]

#: Workload scalar names understood by the tool; absent entries default to 0.
KNOWN_SCALARS = (
    "peak_cores",
    "average_cores",
    "peak_bandwidth",
    "average_bandwidth",
    "network_load",
    "compute_load",
    "num_flows",
)

SELF_WORKLOAD = "self"
ANY_WORKLOAD = "any"


class AllocationScope(str, Enum):
    PER_DEVICE = "PER_DEVICE"
    PER_WORKLOAD_GLOBAL = "PER_WORKLOAD_GLOBAL"
    PER_SYSTEM_GLOBAL = "PER_SYSTEM_GLOBAL"


class DslError(Exception):
    """Base class for expression evaluation/validation failures."""


class UnboundReference(DslError):
    """An expression names a slot, system, scalar, or entry absent from the binding."""


class KindMismatch(DslError):
    """A boolean was used as a number or vice versa."""


class NegativeAllocation(DslError):
    """An allocation amount evaluated to a negative quantity."""


@dataclass(frozen=True)
class Expr:
    """Base node. ``node_id`` keys into a system's constraint-label map."""

    node_id: Optional[str] = field(default=None, kw_only=True)
    label: Optional[str] = field(default=None, kw_only=True)

    def children(self) -> tuple["Expr", ...]:
        return ()

    def with_meta(self, node_id: Optional[str] = None, label: Optional[str] = None) -> "Expr":
        return replace(self, node_id=node_id or self.node_id, label=label or self.label)


# --- leaves ---------------------------------------------------------------


@dataclass(frozen=True)
class Lit(Expr):
    value: Union[bool, int, float]


@dataclass(frozen=True)
class WorkloadScalar(Expr):
    name: str


@dataclass(frozen=True)
class WorkloadHasProperty(Expr):
    tag: str


@dataclass(frozen=True)
class CoLocatedHasProperty(Expr):
    """True when any workload sharing the topology carries the tag."""

    tag: str


@dataclass(frozen=True)
class DeviceAttr(Expr):
    """Attribute of a device slot: either a quantifier binder or a concrete slot id."""

    slot: str
    entry: str


@dataclass(frozen=True)
class SystemDeployed(Expr):
    """Deployment status of a system for ``self``, ``any``, or a named workload."""

    system: str
    workload: str = SELF_WORKLOAD


@dataclass(frozen=True)
class RoleEnabled(Expr):
    role: str


@dataclass(frozen=True)
class CountDeployedDevices(Expr):
    device_type: str


@dataclass(frozen=True)
class TotalAllocated(Expr):
    """Aggregate ledger consumption of a resource, optionally per device type."""

    resource: str
    device_type: Optional[str] = None


@dataclass(frozen=True)
class TotalCapacity(Expr):
    resource: str
    device_type: Optional[str] = None


# --- arithmetic and comparisons -------------------------------------------


@dataclass(frozen=True)
class Add(Expr):
    args: tuple[Expr, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Sub(Expr):
    lhs: Expr
    rhs: Expr

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class Mul(Expr):
    """Product limited to constants and device counts times one expression."""

    args: tuple[Expr, ...]

    def children(self):
        return self.args


class CmpOp(str, Enum):
    LT = "<"
    LE = "<="
    EQ = "="
    GE = ">="
    GT = ">"


@dataclass(frozen=True)
class Cmp(Expr):
    op: CmpOp
    lhs: Expr
    rhs: Expr

    def children(self):
        return (self.lhs, self.rhs)


# --- connectives and quantifier -------------------------------------------


@dataclass(frozen=True)
class And(Expr):
    args: tuple[Expr, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Expr):
    args: tuple[Expr, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Implies(Expr):
    antecedent: Expr
    consequent: Expr

    def children(self):
        return (self.antecedent, self.consequent)


@dataclass(frozen=True)
class ForAllDeployedDevices(Expr):
    """Body must hold for every deployed device of the type; binds ``binder``."""

    device_type: str
    binder: str
    body: Expr

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Allocate(Expr):
    """Demand a quantity of an exhaustible resource on matched devices.

    Truth-neutral: evaluates to true and only emits demand records. Capacity
    enforcement happens in the encoder / design checker.
    """

    resource: str
    amount: Expr
    scope: AllocationScope
    device_type: str

    def children(self):
        return (self.amount,)


# --- helpers ---------------------------------------------------------------

TRUE = Lit(True)
FALSE = Lit(False)


def conj(*args: Expr) -> Expr:
    return And(tuple(args))


def disj(*args: Expr) -> Expr:
    return Or(tuple(args))


def walk(expr: Expr) -> Iterator[Expr]:
    yield expr
    for child in expr.children():
        yield from walk(child)


# --- binding ---------------------------------------------------------------


@dataclass(frozen=True)
class DeviceBinding:
    """A concrete device occupied by the workload, with its hardware values."""

    slot_id: str
    device_type: str
    values: dict[str, Union[bool, Fraction]]


@dataclass
class Binding:
    """Concrete context an expression is evaluated against.

    ``deployed`` maps workload id -> set of deployed system ids. ``devices``
    are the context workload's occupied slots. ``ledgers`` carries
    (slot, resource) -> (capacity, consumed) pairs for aggregate nodes.
    """

    workload: str
    scalars: dict[str, Fraction] = field(default_factory=dict)
    properties: frozenset[str] = frozenset()
    colocated_properties: frozenset[str] = frozenset()
    devices: tuple[DeviceBinding, ...] = ()
    deployed: dict[str, frozenset[str]] = field(default_factory=dict)
    enabled_roles: frozenset[str] = frozenset()
    ledgers: dict[tuple[str, str], tuple[Fraction, Fraction]] = field(default_factory=dict)

    def devices_of(self, device_type: str) -> tuple[DeviceBinding, ...]:
        return tuple(d for d in self.devices if d.device_type == device_type)


@dataclass(frozen=True)
class Allocation:
    """One concrete demand: ``amount`` of ``resource`` on ``slot_id``."""

    slot_id: str
    resource: str
    amount: Fraction
    scope: AllocationScope


@dataclass(frozen=True)
class EvalResult:
    truth: bool
    allocations: tuple[Allocation, ...] = ()


def _as_fraction(value: Union[bool, int, float, Fraction]) -> Fraction:
    if isinstance(value, bool):
        raise KindMismatch("boolean used where a number is required")
    return Fraction(value)


def split_allocation(
    amount: Fraction, slots: tuple[str, ...]
) -> dict[str, Fraction]:
    """Spread a global amount across slots; integers keep per-slot integrality.

    The remainder of an integral amount goes to the first slots in id order.
    """
    ordered = sorted(slots)
    n = len(ordered)
    if n == 0:
        return {}
    if amount.denominator == 1:
        base, rem = divmod(amount.numerator, n)
        return {
            slot: Fraction(base + (1 if i < rem else 0))
            for i, slot in enumerate(ordered)
        }
    share = amount / n
    return {slot: share for slot in ordered}


class _Evaluator:
    def __init__(self, binding: Binding):
        self.binding = binding

    def number(self, expr: Expr, env: dict[str, DeviceBinding]) -> Fraction:
        b = self.binding
        if isinstance(expr, Lit):
            return _as_fraction(expr.value)
        if isinstance(expr, WorkloadScalar):
            if expr.name in b.scalars:
                return Fraction(b.scalars[expr.name])
            if expr.name in KNOWN_SCALARS:
                return Fraction(0)
            raise UnboundReference(f"unknown workload scalar {expr.name!r}")
        if isinstance(expr, DeviceAttr):
            device = env.get(expr.slot)
            if device is None:
                device = next(
                    (d for d in b.devices if d.slot_id == expr.slot), None
                )
            if device is None:
                raise UnboundReference(f"slot {expr.slot!r} is not bound")
            if expr.entry not in device.values:
                raise UnboundReference(
                    f"device {device.slot_id!r} has no entry {expr.entry!r}"
                )
            value = device.values[expr.entry]
            if isinstance(value, bool):
                raise KindMismatch(f"entry {expr.entry!r} is boolean")
            return Fraction(value)
        if isinstance(expr, CountDeployedDevices):
            return Fraction(len(b.devices_of(expr.device_type)))
        if isinstance(expr, TotalAllocated):
            total = Fraction(0)
            for (slot, resource), (_cap, used) in sorted(b.ledgers.items()):
                if resource != expr.resource:
                    continue
                if expr.device_type is not None:
                    device = next(
                        (d for d in b.devices if d.slot_id == slot), None
                    )
                    if device is None or device.device_type != expr.device_type:
                        continue
                total += used
            return total
        if isinstance(expr, TotalCapacity):
            total = Fraction(0)
            for (slot, resource), (cap, _used) in sorted(b.ledgers.items()):
                if resource != expr.resource:
                    continue
                if expr.device_type is not None:
                    device = next(
                        (d for d in b.devices if d.slot_id == slot), None
                    )
                    if device is None or device.device_type != expr.device_type:
                        continue
                total += cap
            return total
        if isinstance(expr, Add):
            return sum((self.number(a, env) for a in expr.args), Fraction(0))
        if isinstance(expr, Sub):
            return self.number(expr.lhs, env) - self.number(expr.rhs, env)
        if isinstance(expr, Mul):
            product = Fraction(1)
            for a in expr.args:
                product *= self.number(a, env)
            return product
        raise KindMismatch(f"{type(expr).__name__} is not a numeric expression")

    def formula(self, expr: Expr, env: dict[str, DeviceBinding]) -> EvalResult:
        b = self.binding
        if isinstance(expr, Lit):
            if not isinstance(expr.value, bool):
                raise KindMismatch("numeric literal used as a formula")
            return EvalResult(expr.value)
        if isinstance(expr, WorkloadHasProperty):
            return EvalResult(expr.tag in b.properties)
        if isinstance(expr, CoLocatedHasProperty):
            return EvalResult(expr.tag in b.colocated_properties)
        if isinstance(expr, DeviceAttr):
            # boolean entries are formulas on their own (the has-flag idiom)
            device = env.get(expr.slot)
            if device is None:
                device = next((d for d in b.devices if d.slot_id == expr.slot), None)
            if device is None:
                raise UnboundReference(f"slot {expr.slot!r} is not bound")
            if expr.entry not in device.values:
                raise UnboundReference(
                    f"device {device.slot_id!r} has no entry {expr.entry!r}"
                )
            value = device.values[expr.entry]
            if not isinstance(value, bool):
                raise KindMismatch(f"entry {expr.entry!r} is not boolean")
            return EvalResult(value)
        if isinstance(expr, SystemDeployed):
            if expr.workload == SELF_WORKLOAD:
                targets = [b.workload]
            elif expr.workload == ANY_WORKLOAD:
                targets = sorted(b.deployed)
            else:
                if expr.workload not in b.deployed:
                    raise UnboundReference(
                        f"workload {expr.workload!r} absent from binding"
                    )
                targets = [expr.workload]
            hit = any(expr.system in b.deployed.get(w, frozenset()) for w in targets)
            return EvalResult(hit)
        if isinstance(expr, RoleEnabled):
            return EvalResult(expr.role in b.enabled_roles)
        if isinstance(expr, Cmp):
            lhs = self.number(expr.lhs, env)
            rhs = self.number(expr.rhs, env)
            op = expr.op
            truth = {
                CmpOp.LT: lhs < rhs,
                CmpOp.LE: lhs <= rhs,
                CmpOp.EQ: lhs == rhs,
                CmpOp.GE: lhs >= rhs,
                CmpOp.GT: lhs > rhs,
            }[op]
            return EvalResult(truth)
        if isinstance(expr, And):
            results = [self.formula(a, env) for a in expr.args]
            if all(r.truth for r in results):
                allocs: list[Allocation] = []
                for r in results:
                    allocs.extend(r.allocations)
                return EvalResult(True, tuple(allocs))
            return EvalResult(False)
        if isinstance(expr, Or):
            results = [self.formula(a, env) for a in expr.args]
            if any(r.truth for r in results):
                allocs = []
                for r in results:
                    if r.truth:
                        allocs.extend(r.allocations)
                return EvalResult(True, tuple(allocs))
            return EvalResult(False)
        if isinstance(expr, Not):
            inner = self.formula(expr.arg, env)
            return EvalResult(not inner.truth)
        if isinstance(expr, Implies):
            ante = self.formula(expr.antecedent, env)
            if not ante.truth:
                return EvalResult(True)
            cons = self.formula(expr.consequent, env)
            if cons.truth:
                return EvalResult(True, ante.allocations + cons.allocations)
            return EvalResult(False)
        if isinstance(expr, ForAllDeployedDevices):
            matched = b.devices_of(expr.device_type)
            collected: list[Allocation] = []
            for device in sorted(matched, key=lambda d: d.slot_id):
                sub = dict(env)
                sub[expr.binder] = device
                result = self.formula(expr.body, sub)
                if not result.truth:
                    return EvalResult(False)
                collected.extend(result.allocations)
            return EvalResult(True, tuple(collected))
        if isinstance(expr, Allocate):
            amount = self.number(expr.amount, env)
            if amount < 0:
                raise NegativeAllocation(
                    f"allocation of {expr.resource!r} evaluated to {amount}"
                )
            matched = tuple(
                d.slot_id for d in sorted(b.devices_of(expr.device_type), key=lambda d: d.slot_id)
            )
            if expr.scope is AllocationScope.PER_DEVICE:
                allocs = tuple(
                    Allocation(slot, expr.resource, amount, expr.scope)
                    for slot in matched
                )
            else:
                shares = split_allocation(amount, matched)
                allocs = tuple(
                    Allocation(slot, expr.resource, shares[slot], expr.scope)
                    for slot in matched
                    if shares[slot] != 0
                )
            return EvalResult(True, allocs)
        raise KindMismatch(f"{type(expr).__name__} is not a boolean expression")


def evaluate(expr: Expr, binding: Binding) -> EvalResult:
    """Evaluate under classical semantics; allocations flow only from satisfied branches."""
    return _Evaluator(binding).formula(expr, {})


@dataclass(frozen=True)
class References:
    scalars: frozenset[str] = frozenset()
    properties: frozenset[str] = frozenset()
    systems: frozenset[str] = frozenset()
    roles: frozenset[str] = frozenset()
    resources: frozenset[str] = frozenset()
    device_attrs: frozenset[str] = frozenset()


def free_references(expr: Expr) -> References:
    """Exact reference sets of an expression, independent of any binding."""
    scalars, properties, systems, roles, resources, attrs = (
        set(),
        set(),
        set(),
        set(),
        set(),
        set(),
    )
    for node in walk(expr):
        if isinstance(node, WorkloadScalar):
            scalars.add(node.name)
        elif isinstance(node, (WorkloadHasProperty, CoLocatedHasProperty)):
            properties.add(node.tag)
        elif isinstance(node, SystemDeployed):
            systems.add(node.system)
        elif isinstance(node, RoleEnabled):
            roles.add(node.role)
        elif isinstance(node, Allocate):
            resources.add(node.resource)
        elif isinstance(node, (TotalAllocated, TotalCapacity)):
            resources.add(node.resource)
        elif isinstance(node, DeviceAttr):
            attrs.add(node.entry)
    return References(
        frozenset(scalars),
        frozenset(properties),
        frozenset(systems),
        frozenset(roles),
        frozenset(resources),
        frozenset(attrs),
    )


_NUMERIC_NODES = (
    WorkloadScalar,
    DeviceAttr,
    CountDeployedDevices,
    TotalAllocated,
    TotalCapacity,
    Add,
    Sub,
    Mul,
)


def check_expression(
    expr: Expr,
    *,
    allow_workload_context: bool = True,
    allow_device_context: bool = True,
    allow_system_context: bool = True,
) -> list[str]:
    """Scope and kind checking; returns human-readable problems (empty = ok)."""
    problems: list[str] = []

    def is_bool(node: Expr, bound: frozenset[str]) -> bool:
        if isinstance(node, Lit):
            return isinstance(node.value, bool)
        if isinstance(node, (WorkloadHasProperty, CoLocatedHasProperty)):
            if not allow_workload_context:
                problems.append(f"workload reference {node!r} not allowed here")
            return True
        if isinstance(node, (SystemDeployed, RoleEnabled)):
            if not allow_system_context:
                problems.append(f"system/role reference {node!r} not allowed here")
            if isinstance(node, SystemDeployed) and node.workload == SELF_WORKLOAD:
                if not allow_workload_context:
                    problems.append(
                        f"{node!r} uses 'self' outside a workload context"
                    )
            return True
        if isinstance(node, DeviceAttr):
            # kind (bool flag vs number) resolves against the schema downstream
            if not allow_device_context:
                problems.append(f"device attribute {node.entry!r} not allowed here")
            elif node.slot not in bound and "." not in node.slot:
                problems.append(
                    f"device attribute binder {node.slot!r} is not bound by a quantifier"
                )
            return True
        if isinstance(node, Cmp):
            check_num(node.lhs, bound)
            check_num(node.rhs, bound)
            return True
        if isinstance(node, (And, Or)):
            for a in node.args:
                if not is_bool(a, bound):
                    problems.append(f"non-boolean operand in {type(node).__name__}")
            return True
        if isinstance(node, Not):
            if not is_bool(node.arg, bound):
                problems.append("non-boolean operand in Not")
            return True
        if isinstance(node, Implies):
            for a in (node.antecedent, node.consequent):
                if not is_bool(a, bound):
                    problems.append("non-boolean operand in Implies")
            return True
        if isinstance(node, ForAllDeployedDevices):
            if not allow_device_context:
                problems.append("device quantifier not allowed here")
            if not is_bool(node.body, bound | {node.binder}):
                problems.append("quantifier body is not boolean")
            return True
        if isinstance(node, Allocate):
            if not allow_device_context:
                problems.append("allocation not allowed here")
            check_num(node.amount, bound)
            return True
        problems.append(f"{type(node).__name__} used as a formula")
        return False

    def check_num(node: Expr, bound: frozenset[str]) -> None:
        if isinstance(node, Lit):
            if isinstance(node.value, bool):
                problems.append("boolean literal used as a number")
            return
        if isinstance(node, WorkloadScalar):
            if not allow_workload_context:
                problems.append(f"workload scalar {node.name!r} not allowed here")
            return
        if isinstance(node, DeviceAttr):
            if not allow_device_context:
                problems.append(f"device attribute {node.entry!r} not allowed here")
            elif node.slot not in bound and "." not in node.slot:
                # path-structured ids ("pod1.rack0.tor") name concrete slots
                problems.append(
                    f"device attribute binder {node.slot!r} is not bound by a quantifier"
                )
            return
        if isinstance(node, (CountDeployedDevices, TotalAllocated, TotalCapacity)):
            if not allow_device_context:
                problems.append(f"{type(node).__name__} not allowed here")
            return
        if isinstance(node, Add):
            for a in node.args:
                check_num(a, bound)
            return
        if isinstance(node, Sub):
            check_num(node.lhs, bound)
            check_num(node.rhs, bound)
            return
        if isinstance(node, Mul):
            non_const = 0
            for a in node.args:
                check_num(a, bound)
                if not isinstance(a, (Lit, CountDeployedDevices)):
                    non_const += 1
            if non_const > 1:
                problems.append(
                    "product mixes two non-constant factors; only constants and "
                    "device counts may scale an expression"
                )
            return
        problems.append(f"{type(node).__name__} used as a number")

    is_bool(expr, frozenset())
    return problems
