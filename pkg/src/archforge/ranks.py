"""Qualitative partial orders over systems, one table per (role, objective).

BETTER_THAN edges are taken over SAME_AS equivalence classes; rank is the
longest chain strictly below a class, so any strict preference survives and
incomparable systems may share a layer. Raw rank values are always
re-canonicalized from the induced order, which makes selection invariant
under monotone relabeling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TYPE_CHECKING

if TYPE_CHECKING:
    from .model import OrderingSpec


class OrderingCycle(Exception):
    def __init__(self, members: list[str]):
        super().__init__(f"ordering cycle through {', '.join(members)}")
        self.members = members


class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic: smaller id becomes the representative
            lo, hi = sorted((ra, rb))
            self.parent[hi] = lo


def effective_orderings(orderings: Iterable["OrderingSpec"]) -> list["OrderingSpec"]:
    """Architect entries shadow expert entries on the same (objective, pair)."""
    architect_pairs = {
        (o.objective, frozenset((o.subject, o.object)))
        for o in orderings
        if o.provenance == "ARCHITECT"
    }
    kept = []
    for o in orderings:
        if o.provenance == "EXPERT":
            if (o.objective, frozenset((o.subject, o.object))) in architect_pairs:
                continue
        kept.append(o)
    return kept


@dataclass
class RankTable:
    """Ranks and dominator sets for the systems named by one objective's orderings."""

    objective: str
    ranks: dict[str, int] = field(default_factory=dict)
    dominators: dict[str, frozenset[str]] = field(default_factory=dict)

    def rank(self, system: str) -> int:
        return self.ranks.get(system, 0)

    def dominators_of(self, system: str) -> frozenset[str]:
        return self.dominators.get(system, frozenset())

    def covers(self, system: str) -> bool:
        return system in self.ranks


def build_rank_table(
    objective: str,
    orderings: Iterable["OrderingSpec"],
    *,
    condition_holds=None,
) -> RankTable:
    """Derive layers and dominators from the orderings on one objective.

    ``condition_holds`` filters conditional entries for the querying workload;
    when None, conditions are treated as holding. Raises OrderingCycle when
    the strict relation (transitively closed, quotiented by SAME_AS) is cyclic.
    """
    entries = [
        o
        for o in effective_orderings(orderings)
        if o.objective == objective
        and (o.condition is None or condition_holds is None or condition_holds(o))
    ]
    uf = _UnionFind()
    names: set[str] = set()
    for o in entries:
        names.add(o.subject)
        names.add(o.object)
        if o.relation == "SAME_AS":
            uf.union(o.subject, o.object)

    edges: set[tuple[str, str]] = set()  # (better class, worse class)
    for o in entries:
        if o.relation == "BETTER_THAN":
            a, b = uf.find(o.subject), uf.find(o.object)
            if a == b:
                raise OrderingCycle(sorted({o.subject, o.object}))
            edges.add((a, b))

    classes = sorted({uf.find(n) for n in names})
    below: dict[str, list[str]] = {c: [] for c in classes}
    for better, worse in sorted(edges):
        below[better].append(worse)

    rank_of: dict[str, int] = {}
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(c: str, stack: list[str]) -> int:
        if state.get(c) == 2:
            return rank_of[c]
        if state.get(c) == 1:
            cycle = stack[stack.index(c):]
            raise OrderingCycle(sorted(cycle))
        state[c] = 1
        stack.append(c)
        depth = 0
        for worse in below[c]:
            depth = max(depth, visit(worse, stack) + 1)
        stack.pop()
        state[c] = 2
        rank_of[c] = depth
        return depth

    for c in classes:
        visit(c, [])

    above: dict[str, set[str]] = {c: set() for c in classes}
    for better, worse in edges:
        above[worse].add(better)
    memo: dict[str, frozenset[str]] = {}

    def all_above(c: str) -> frozenset[str]:
        if c in memo:
            return memo[c]
        acc: set[str] = set()
        for parent in above[c]:
            acc.add(parent)
            acc |= all_above(parent)
        memo[c] = frozenset(acc)
        return memo[c]

    members: dict[str, list[str]] = {c: [] for c in classes}
    for n in sorted(names):
        members[uf.find(n)].append(n)

    ranks: dict[str, int] = {}
    dominators: dict[str, frozenset[str]] = {}
    for c in classes:
        dom_systems: set[str] = set()
        for dc in all_above(c):
            dom_systems.update(members[dc])
        for n in members[c]:
            ranks[n] = rank_of[c]
            dominators[n] = frozenset(dom_systems)
    return RankTable(objective, ranks, dominators)


def canonicalize(table: RankTable) -> RankTable:
    """Relabel arbitrary rank values back to longest-path layers of the induced order."""
    order = sorted(set(table.ranks.values()))
    relabel = {v: i for i, v in enumerate(order)}
    # layers must respect dominators exactly: recompute from the dominator DAG
    systems = sorted(table.ranks)
    rank_of: dict[str, int] = {}

    def depth(s: str, seen: frozenset[str]) -> int:
        if s in rank_of:
            return rank_of[s]
        worse = [
            t
            for t in systems
            if s in table.dominators_of(t) and t not in seen
        ]
        d = 0
        for t in worse:
            d = max(d, depth(t, seen | {s}) + 1)
        rank_of[s] = d
        return d

    for s in systems:
        depth(s, frozenset())
    del relabel
    return RankTable(table.objective, rank_of, dict(table.dominators))


def ordering_objectives(orderings: Iterable["OrderingSpec"]) -> list[str]:
    return sorted({o.objective for o in orderings})
