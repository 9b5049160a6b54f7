"""Counterfactual explanations: why is the preferred system not in the design?

Re-solves with the preference asserted and everything outside the flexible
set pinned. A feasible outcome becomes an alternative design with its
objective trade-offs; an infeasible one yields a decomposed, deletion-minimal,
classified conflict core rendered through constraint labels.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import formula as F
from .encode import EncodedProblem, Origin, dep_var, encode, hw_var
from .model import Catalog, Query
from .ranks import build_rank_table
from .solver import Session
from .synthesis import Design, check_design, extract_design

WORKLOAD_MISMATCH = "WORKLOAD_MISMATCH"
OBJECTIVE_MISALIGNMENT = "OBJECTIVE_MISALIGNMENT"
INSUFFICIENT_INVENTORY = "INSUFFICIENT_INVENTORY"
SYSTEM_INCOMPATIBILITY = "SYSTEM_INCOMPATIBILITY"


class InvalidRequest(Exception):
    pass


@dataclass(frozen=True)
class ExplainRequest:
    workload: str
    role: str
    preferred: str
    objective: str
    flexible: frozenset[str] = frozenset()  # role ids and device ids free to change


@dataclass
class ConflictAtom:
    atom_id: str
    clause: str
    label: Optional[str]
    origin: Origin
    formula: F.Formula = F.TRUE


@dataclass
class Tradeoff:
    objective: str
    priority: int
    old_value: Fraction
    new_value: Fraction
    old_vector: dict[str, tuple[str, int]]
    new_vector: dict[str, tuple[str, int]]

    @property
    def worsened(self) -> bool:
        if self.new_value < self.old_value:
            return True
        return any(
            self.new_vector.get(role, (None, 0))[1] < rank
            for role, (_sys, rank) in self.old_vector.items()
        )


@dataclass
class Explanation:
    outcome: str  # ALTERNATIVE | CONFLICT | ALREADY_OPTIMAL
    request: ExplainRequest
    ordering_consulted: str
    dominators: list[str] = field(default_factory=list)
    alternative: Optional[Design] = None
    tradeoffs: list[Tradeoff] = field(default_factory=list)
    atoms: list[ConflictAtom] = field(default_factory=list)
    categories: list[str] = field(default_factory=list)
    degraded_notice: Optional[str] = None


def get_priority_systems(
    catalog: Catalog,
    query: Query,
    workload_id: str,
    role: str,
    objective: str,
    chosen: str,
) -> list[str]:
    """Systems strictly better than the chosen one for this role and objective."""
    from . import dsl
    from .model import activation_binding

    w = query.workload(workload_id)
    binding = activation_binding(w, query.workloads)
    table = build_rank_table(
        objective,
        catalog.orderings,
        condition_holds=lambda o: dsl.evaluate(o.condition, binding).truth,
    )
    fulfillers = {s.id for s in catalog.systems_for_role(role)}
    return sorted(table.dominators_of(chosen) & fulfillers)


def explain(
    catalog: Catalog,
    query: Query,
    base: Design,
    request: ExplainRequest,
    budget_seconds: float = 30.0,
) -> Explanation:
    system = catalog.systems.get(request.preferred)
    if system is None or request.role not in system.roles:
        raise InvalidRequest(
            f"{request.preferred!r} does not fulfill role {request.role!r}"
        )
    if request.workload not in base.systems:
        raise InvalidRequest(f"workload {request.workload!r} not in the design")
    chosen = base.systems[request.workload].get(request.role)
    if chosen is None:
        raise InvalidRequest(f"role {request.role!r} is not mapped in the design")

    dominators = get_priority_systems(
        catalog, query, request.workload, request.role, request.objective, chosen
    )
    if request.preferred == chosen:
        return Explanation(
            "ALREADY_OPTIMAL",
            request,
            ordering_consulted=request.objective,
            dominators=dominators,
        )

    problem = encode(catalog, query)
    _add_pins(problem, base, request)
    session = problem.build_session(budget_seconds=budget_seconds)
    result = session.solve()

    if result.status == "SAT":
        model = result.model
        alternative = extract_design(problem, session, model, result)
        violations = check_design(catalog, query, alternative)
        if violations:
            raise RuntimeError(
                "alternative design failed independent checking: " + "; ".join(violations)
            )
        tradeoffs = _tradeoffs(problem, base, alternative)
        return Explanation(
            "ALTERNATIVE",
            request,
            ordering_consulted=request.objective,
            dominators=dominators,
            alternative=alternative,
            tradeoffs=tradeoffs,
        )

    atoms = decompose_core(problem, sorted(result.core))
    minimal = minimize_core(problem, atoms, budget_seconds=budget_seconds)
    categories = classify(minimal, request)
    return Explanation(
        "CONFLICT",
        request,
        ordering_consulted=request.objective,
        dominators=dominators,
        atoms=minimal,
        categories=categories,
    )


def _add_pins(problem: EncodedProblem, base: Design, request: ExplainRequest) -> None:
    catalog, query = problem.catalog, problem.query
    w = request.workload
    problem.assert_hard(
        f"pin:prefer:{request.preferred}",
        F.FBool(dep_var(request.preferred, w)),
        Origin(
            kind="PIN",
            pin_kind="prefer",
            workload=w,
            system=request.preferred,
            label=f"the architect asked for {request.preferred} on {w}",
        ),
    )
    chosen = base.systems[w][request.role]
    problem.assert_hard(
        f"pin:forbid:{chosen}",
        F.fnot(F.FBool(dep_var(chosen, w))),
        Origin(
            kind="PIN",
            pin_kind="forbid",
            workload=w,
            system=chosen,
            label=f"{chosen} is displaced by the preferred system",
        ),
    )
    for workload_id, assignments in sorted(base.systems.items()):
        for role_id, system_id in sorted(assignments.items()):
            if workload_id == w and role_id == request.role:
                continue
            if role_id in request.flexible:
                continue
            problem.assert_hard(
                f"pin:system:{workload_id}:{role_id}",
                F.FBool(dep_var(system_id, workload_id)),
                Origin(
                    kind="PIN",
                    pin_kind="system",
                    workload=workload_id,
                    role=role_id,
                    system=system_id,
                    label=f"{role_id} stays on {system_id} for {workload_id}",
                ),
            )
    for device_id, hw_id in sorted(base.hardware.items()):
        if device_id in request.flexible:
            continue
        admissible = problem.admissible.get(device_id, ())
        if hw_id not in admissible:
            continue
        problem.assert_hard(
            f"pin:hardware:{device_id}",
            F.num_eq(hw_var(device_id), Fraction(admissible.index(hw_id))),
            Origin(
                kind="PIN",
                pin_kind="hardware",
                device=device_id,
                label=f"{device_id} keeps its {hw_id}",
            ),
        )


def _tradeoffs(problem: EncodedProblem, base: Design, alternative: Design) -> list[Tradeoff]:
    out = []
    base_by_priority = {o.priority: o for o in base.objectives}
    for alt in alternative.objectives:
        old = base_by_priority.get(alt.priority)
        if old is None:
            continue
        out.append(
            Tradeoff(
                objective=alt.label,
                priority=alt.priority,
                old_value=old.achieved,
                new_value=alt.achieved,
                old_vector=dict(old.rank_vector),
                new_vector=dict(alt.rank_vector),
            )
        )
    return out


# --- core decomposition --------------------------------------------------------


def decompose_core(
    problem: EncodedProblem,
    core: list[str],
    max_depth: Optional[int] = None,
) -> list[ConflictAtom]:
    """Split core members into atomic clauses; atoms inherit label and origin.

    Conjunctions split; implications distribute over conjunctive consequents
    and curry nested antecedents; negations push inward. Disjunctions and
    comparisons are atomic. The conjunction of the produced atoms is logically
    equivalent to the conjunction of the originals.
    """
    atoms: list[ConflictAtom] = []

    def sort_prefix(origin: Origin) -> str:
        # user pins sort first so minimization drops them before catalog facts
        return "0" if origin.kind == "PIN" else "1"

    def emit(track_id: str, path: str, f: F.Formula, origin: Origin) -> None:
        atom_id = f"{sort_prefix(origin)}:{track_id}:{path}" if path else f"{sort_prefix(origin)}:{track_id}"
        atoms.append(ConflictAtom(atom_id, F.text(f), origin.label, origin, f))

    def split(track_id: str, path: str, f: F.Formula, origin: Origin, depth: int) -> None:
        if max_depth is not None and depth >= max_depth:
            emit(track_id, path, f, origin)
            return
        if isinstance(f, F.FTrue):
            return
        if isinstance(f, F.FAnd):
            for i, arg in enumerate(f.args):
                split(track_id, f"{path}.{i}" if path else str(i), arg, origin, depth + 1)
            return
        if isinstance(f, F.FNot):
            inner = f.arg
            if isinstance(inner, F.FNot):
                split(track_id, path, inner.arg, origin, depth + 1)
                return
            if isinstance(inner, F.FOr):
                pushed = F.FAnd(tuple(F.fnot(a) for a in inner.args))
                split(track_id, path, pushed, origin, depth + 1)
                return
            emit(track_id, path, f, origin)
            return
        if isinstance(f, F.FIff):
            split(
                track_id,
                path,
                F.FAnd((F.FImplies(f.lhs, f.rhs), F.FImplies(f.rhs, f.lhs))),
                origin,
                depth + 1,
            )
            return
        if isinstance(f, F.FImplies):
            body = f.consequent
            if isinstance(body, F.FAnd):
                for i, arg in enumerate(body.args):
                    split(
                        track_id,
                        f"{path}.{i}" if path else str(i),
                        F.FImplies(f.antecedent, arg),
                        origin,
                        depth + 1,
                    )
                return
            if isinstance(body, F.FImplies):
                curried = F.FImplies(
                    F.fand(f.antecedent, body.antecedent), body.consequent
                )
                split(track_id, path, curried, origin, depth + 1)
                return
            if isinstance(body, F.FTrue):
                return
            emit(track_id, path, f, origin)
            return
        emit(track_id, path, f, origin)
        return

    for track_id in core:
        f = problem.assertions[track_id][0]
        origin = problem.assertions[track_id][1]
        split(track_id, "", f, origin, 0)
    atoms.sort(key=lambda a: a.atom_id)
    return atoms


def atom_session(problem: EncodedProblem, atoms: list[ConflictAtom], budget_seconds: float = 30.0) -> Session:
    """Fresh session over the same variable space, asserting exactly the atoms."""
    session = Session(budget_seconds=budget_seconds)
    for name in problem.bool_vars:
        session.declare_bool(name)
    for name, domain in problem.num_vars.items():
        session.declare_num(name, domain)
    for f in problem.structural:
        session.assert_always(f)
    for w in problem.query.workloads:
        session.assert_always(F.FBool(f"workload({w.id})"))
    for atom in atoms:
        session.assert_hard(atom.atom_id, atom.formula)
    return session


def minimize_core(
    problem: EncodedProblem,
    atoms: list[ConflictAtom],
    budget_seconds: float = 30.0,
) -> list[ConflictAtom]:
    """Deletion-minimal subset of jointly unsatisfiable atoms.

    Scans in ascending atom id (user pins first, so they are dropped whenever
    the catalog content already explains the conflict). Returned cores from
    sub-solves refine the pending set; an atom once confirmed necessary stays
    necessary because necessity is monotone under set shrinking.
    """
    session = atom_session(problem, atoms, budget_seconds)
    by_id = {a.atom_id: a for a in atoms}
    first = session.solve_subset([a.atom_id for a in atoms])
    if first.status != "UNSAT":
        raise RuntimeError("minimize_core called on a satisfiable atom set")
    pending = [a.atom_id for a in atoms if not first.core or a.atom_id in first.core]
    confirmed: list[str] = []
    while pending:
        probe = pending[0]
        rest = confirmed + pending[1:]
        result = session.solve_subset(rest)
        if result.status == "UNSAT":
            kept = result.core if result.core else frozenset(rest)
            pending = [a for a in pending[1:] if a in kept]
        else:
            confirmed.append(probe)
            pending = pending[1:]
    return [by_id[a] for a in sorted(confirmed)]


def classify(atoms: list[ConflictAtom], request: Optional[ExplainRequest] = None) -> list[str]:
    """Map every atom's origin into the four-way category union (never empty)."""
    categories: set[str] = set()
    candidate = request.preferred if request else None
    for atom in atoms:
        origin = atom.origin
        kind = origin.kind
        if kind in ("DEVICE_FILL", "CAPACITY"):
            categories.add(INSUFFICIENT_INVENTORY)
        elif kind == "ROLE_ACTIVATION":
            categories.add(WORKLOAD_MISMATCH)
        elif kind == "ORDERING_BOUND":
            categories.add(WORKLOAD_MISMATCH)
        elif kind == "ROLE_FULFILL":
            if origin.objective:
                categories.add(OBJECTIVE_MISALIGNMENT)
            else:
                categories.add(WORKLOAD_MISMATCH)
        elif kind == "ARCHITECT":
            names = F.referenced_names(atom.formula)
            if names and all(n.startswith("attr(") or n.startswith("hardware(") for n in names):
                categories.add(INSUFFICIENT_INVENTORY)
            else:
                categories.add(WORKLOAD_MISMATCH)
        elif kind == "SYSTEM_CONSTRAINT":
            if candidate is not None and origin.system != candidate:
                categories.add(SYSTEM_INCOMPATIBILITY)
            else:
                names = F.referenced_names(atom.formula)
                if any(n.startswith("deploy(") and f"deploy({origin.system}," not in n for n in names):
                    categories.add(SYSTEM_INCOMPATIBILITY)
                elif any(n.startswith("attr(") for n in names):
                    categories.add(INSUFFICIENT_INVENTORY)
                else:
                    categories.add(WORKLOAD_MISMATCH)
        elif kind == "PIN":
            if origin.pin_kind in ("system", "prefer", "forbid"):
                categories.add(SYSTEM_INCOMPATIBILITY)
            else:
                categories.add(INSUFFICIENT_INVENTORY)
        else:
            categories.add(WORKLOAD_MISMATCH)
    return sorted(categories)


# --- rendering ------------------------------------------------------------------

_CATEGORY_TITLES = {
    WORKLOAD_MISMATCH: "Workload mismatch",
    OBJECTIVE_MISALIGNMENT: "Objective misalignment",
    INSUFFICIENT_INVENTORY: "Insufficient inventory",
    SYSTEM_INCOMPATIBILITY: "System incompatibility",
}


def render(explanation: Explanation, renderer: str = "TEMPLATE") -> str:
    if renderer == "SUMMARIZER":
        return _render_summarized(explanation)
    return render_template(explanation)


def render_template(explanation: Explanation) -> str:
    request = explanation.request
    lines: list[str] = []
    if explanation.outcome == "ALREADY_OPTIMAL":
        lines.append(
            f"{request.preferred} is already the selection for role {request.role}; "
            f"no system outranks it on the {explanation.ordering_consulted} ordering."
        )
        return "\n".join(lines) + "\n"

    lines.append(
        f"Why {request.preferred} is not selected for {request.workload} "
        f"(role {request.role}, ordering {explanation.ordering_consulted}):"
    )
    if explanation.dominators:
        lines.append(
            f"Higher-priority systems than the current choice: {explanation.dominators}"
        )
    if explanation.outcome == "ALTERNATIVE":
        alt = explanation.alternative
        lines.append("A feasible alternative exists with these assignments:")
        for w, assignments in sorted(alt.systems.items()):
            for role_id, system_id in sorted(assignments.items()):
                lines.append(f"  {w}: {role_id} -> {system_id}")
        lines.append(f"  total cost = {float(alt.total_cost):g}")
        worsened = [t for t in explanation.tradeoffs if t.worsened]
        if worsened:
            lines.append("Trade-offs against the original design:")
            for t in worsened:
                lines.append(
                    f"  {t.objective} (priority {t.priority}): "
                    f"{float(t.old_value):g} -> {float(t.new_value):g}"
                )
                for role_id, (system_id, rank) in sorted(t.old_vector.items()):
                    new_sys, new_rank = t.new_vector.get(role_id, ("-", 0))
                    if (system_id, rank) != (new_sys, new_rank):
                        lines.append(
                            f"    {role_id}: {system_id} (rank {rank}) -> {new_sys} (rank {new_rank})"
                        )
        return "\n".join(lines) + "\n"

    # CONFLICT
    by_category: dict[str, list[ConflictAtom]] = {c: [] for c in explanation.categories}
    for atom in explanation.atoms:
        for category in classify([atom], explanation.request):
            if category in by_category:
                by_category[category].append(atom)
    for category in explanation.categories:
        lines.append(f"{_CATEGORY_TITLES[category]}:")
        for atom in by_category[category]:
            label = f"  [{atom.label}] " if atom.label else "  "
            lines.append(f"{label}{atom.clause}")
    lines.append(
        "Result: the preference cannot be satisfied together with the constraints above."
    )
    if explanation.degraded_notice:
        lines.append(explanation.degraded_notice)
    return "\n".join(lines) + "\n"


def _render_summarized(explanation: Explanation) -> str:
    from .documents import explanation_to_json

    url = os.environ.get("ARCHFORGE_SUMMARIZER_URL")
    token = os.environ.get("ARCHFORGE_SUMMARIZER_TOKEN")
    template = render_template(explanation)
    if not url:
        return template + "(summarizer not configured; template output shown)\n"
    try:
        import httpx

        response = httpx.post(
            url,
            json=explanation_to_json(explanation),
            headers={"Authorization": f"Bearer {token}"} if token else {},
            timeout=10.0,
        )
        response.raise_for_status()
        return response.text
    except Exception:
        return template + "(summarizer unreachable; template output shown)\n"
