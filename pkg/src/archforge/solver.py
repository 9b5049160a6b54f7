"""Self-contained solver session: tracked assertions, soft assertions,
lexicographic objectives, models, and unsatisfiable cores.

The engine is a conflict-driven clause-learning SAT search extended with
reified linear (pseudo-boolean) constraints over exact rationals. Finite
numeric variables are one-hot encoded, so every assertion grounds out to
clauses plus linear atoms. The search is fully deterministic: no randomness,
ties broken by variable index, so equal sessions always produce equal models.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .formula import (
    FAnd,
    FBool,
    FCmp,
    FFalse,
    FImplies,
    FIff,
    FNot,
    FOr,
    FTrue,
    Formula,
    LinSum,
)


class SolverTimeout(Exception):
    """Raised when the wall-clock budget is exhausted; never treated as UNSAT."""


UNDEF = 0
TRUE = 1
FALSE = -1


def _neg(lit: int) -> int:
    return lit ^ 1


def _var(lit: int) -> int:
    return lit >> 1


def _sign(lit: int) -> bool:
    return (lit & 1) == 0  # even literal = positive phase


def _mklit(var: int, positive: bool = True) -> int:
    return var * 2 + (0 if positive else 1)


class _PB:
    """Reified linear constraint  guard <-> (sum of coef*lit  op  bound).

    Coefficients are positive after normalization; op is <= or < depending on
    ``strict``. Counters are maintained incrementally by the engine.
    """

    __slots__ = ("guard", "terms", "bound", "strict", "sum_true", "sum_potential", "cmax")

    def __init__(self, guard: int, terms: list[tuple[Fraction, int]], bound: Fraction, strict: bool):
        self.guard = guard
        self.terms = terms
        self.bound = bound
        self.strict = strict
        self.sum_true = Fraction(0)
        self.sum_potential = sum((c for c, _ in terms), Fraction(0))
        self.cmax = max((c for c, _ in terms), default=Fraction(0))

    def exceeds(self, x: Fraction) -> bool:
        return x >= self.bound if self.strict else x > self.bound

    def cannot_exceed(self, x: Fraction) -> bool:
        # the negated constraint (sum > bound, or >= when strict) is unreachable
        return x < self.bound if self.strict else x <= self.bound


class _Engine:
    def __init__(self) -> None:
        self.values: list[int] = []
        self.levels: list[int] = []
        self.reasons: list[Optional[object]] = []  # clause list | _PB-derived list | None
        self.activity: list[float] = []
        self.phase: list[bool] = []
        self.order_heap: list[tuple[float, int]] = []  # (-activity, var), lazy entries
        self.var_inc = 1.0
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: dict[int, list[list[int]]] = {}
        self.clauses: list[list[int]] = []
        self.pbs: list[_PB] = []
        self.pb_true_occ: dict[int, list[tuple[_PB, Fraction]]] = {}
        self.pb_false_occ: dict[int, list[tuple[_PB, Fraction]]] = {}
        self.pb_guard_occ: dict[int, list[_PB]] = {}
        self.root_unsat = False
        self._assumption_depth = 0
        self._assumption_tracks: dict[int, object] = {}
        self.true_lit = _mklit(self.new_var())
        self._enqueue(self.true_lit, None)

    # -- variables ---------------------------------------------------------

    def new_var(self) -> int:
        idx = len(self.values)
        self.values.append(UNDEF)
        self.levels.append(0)
        self.reasons.append(None)
        self.activity.append(0.0)
        self.phase.append(False)
        heapq.heappush(self.order_heap, (0.0, idx))
        return idx

    def value_lit(self, lit: int) -> int:
        v = self.values[_var(lit)]
        if v == UNDEF:
            return UNDEF
        return v if _sign(lit) else -v

    def level(self) -> int:
        return len(self.trail_lim)

    # -- clause / pb installation -------------------------------------------

    def add_clause(self, lits: Sequence[int]) -> None:
        # simplify against root-level assignments
        out: list[int] = []
        for lit in lits:
            val = self.value_lit(lit)
            if val == TRUE and self.levels[_var(lit)] == 0:
                return
            if val == FALSE and self.levels[_var(lit)] == 0:
                continue
            if lit in out:
                continue
            if _neg(lit) in out:
                return
            out.append(lit)
        if not out:
            self.root_unsat = True
            return
        if len(out) == 1:
            if self.level() != 0:
                raise RuntimeError("unit clauses must be added at the root level")
            if self._enqueue(out[0], None) is not None:
                self.root_unsat = True
            return
        self.clauses.append(out)
        self.watches.setdefault(out[0], []).append(out)
        self.watches.setdefault(out[1], []).append(out)

    def add_pb(self, guard: int, terms: list[tuple[Fraction, int]], bound: Fraction, strict: bool) -> None:
        pb = _PB(guard, terms, bound, strict)
        self.pbs.append(pb)
        self.pb_guard_occ.setdefault(guard, []).append(pb)
        self.pb_guard_occ.setdefault(_neg(guard), []).append(pb)
        for coef, lit in terms:
            self.pb_true_occ.setdefault(lit, []).append((pb, coef))
            self.pb_false_occ.setdefault(_neg(lit), []).append((pb, coef))
        # account for assignments made before installation (root level only)
        for coef, lit in terms:
            val = self.value_lit(lit)
            if val == TRUE:
                pb.sum_true += coef
            elif val == FALSE:
                pb.sum_potential -= coef

    # -- assignment --------------------------------------------------------

    def _enqueue(self, lit: int, reason: Optional[object]) -> Optional[object]:
        """Assign lit; returns a conflicting reason when lit is already false.

        Linear-constraint counters update here (assignment time) so that
        trail pops can reverse them symmetrically.
        """
        val = self.value_lit(lit)
        if val == TRUE:
            return None
        if val == FALSE:
            return reason if reason is not None else [lit]
        var = _var(lit)
        self.values[var] = TRUE if _sign(lit) else FALSE
        self.levels[var] = self.level()
        self.reasons[var] = reason
        self.phase[var] = _sign(lit)
        self.trail.append(lit)
        for pb, coef in self.pb_true_occ.get(lit, ()):
            pb.sum_true += coef
        for pb, coef in self.pb_false_occ.get(lit, ()):
            pb.sum_potential -= coef
        return None

    def _cancel_until(self, level: int) -> None:
        if self.level() <= level:
            return
        bound = self.trail_lim[level]
        for i in range(len(self.trail) - 1, bound - 1, -1):
            lit = self.trail[i]
            var = _var(lit)
            for pb, coef in self.pb_true_occ.get(lit, ()):
                pb.sum_true -= coef
            for pb, coef in self.pb_false_occ.get(lit, ()):
                pb.sum_potential += coef
            self.values[var] = UNDEF
            self.reasons[var] = None
            heapq.heappush(self.order_heap, (-self.activity[var], var))
        del self.trail[bound:]
        del self.trail_lim[level:]
        self.qhead = min(self.qhead, len(self.trail))
        self._assumption_depth = min(self._assumption_depth, level)

    # -- propagation ---------------------------------------------------------

    def propagate(self) -> Optional[list[int]]:
        """Returns a conflict clause (list of false literals) or None."""
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1

            touched: list[_PB] = []
            for pb, _coef in self.pb_true_occ.get(p, ()):
                touched.append(pb)
            for pb, _coef in self.pb_false_occ.get(p, ()):
                touched.append(pb)
            for pb in self.pb_guard_occ.get(p, ()):
                touched.append(pb)

            conflict = self._propagate_clauses(_neg(p))
            if conflict is not None:
                return conflict
            for pb in touched:
                conflict = self._check_pb(pb)
                if conflict is not None:
                    return conflict
        return None

    def _propagate_clauses(self, false_lit: int) -> Optional[list[int]]:
        clauses = self.watches.get(false_lit)
        if not clauses:
            return None
        i = 0
        while i < len(clauses):
            clause = clauses[i]
            # ensure false_lit sits at position 1
            if clause[0] == false_lit:
                clause[0], clause[1] = clause[1], clause[0]
            first = clause[0]
            if self.value_lit(first) == TRUE:
                i += 1
                continue
            moved = False
            for k in range(2, len(clause)):
                if self.value_lit(clause[k]) != FALSE:
                    clause[1], clause[k] = clause[k], clause[1]
                    self.watches.setdefault(clause[1], []).append(clause)
                    clauses[i] = clauses[-1]
                    clauses.pop()
                    moved = True
                    break
            if moved:
                continue
            # unit or conflicting
            if self.value_lit(first) == FALSE:
                self.qhead = len(self.trail)
                return list(clause)
            self._enqueue(first, clause)
            i += 1
        return None

    def _check_pb(self, pb: _PB) -> Optional[list[int]]:
        gval = self.value_lit(pb.guard)

        def active_reason(extra: Optional[int]) -> list[int]:
            out = [] if extra is None else [extra]
            out.append(_neg(pb.guard))
            for _, lit in pb.terms:
                if self.value_lit(lit) == TRUE:
                    out.append(_neg(lit))
            return out

        def negated_reason(extra: Optional[int]) -> list[int]:
            out = [] if extra is None else [extra]
            out.append(pb.guard)
            for _, lit in pb.terms:
                if self.value_lit(lit) == FALSE:
                    out.append(lit)
            return out

        if gval == TRUE:
            if pb.exceeds(pb.sum_true):
                return active_reason(None)
            if pb.exceeds(pb.sum_true + pb.cmax):
                for coef, lit in pb.terms:
                    if self.value_lit(lit) == UNDEF and pb.exceeds(pb.sum_true + coef):
                        conflict = self._enqueue(_neg(lit), active_reason(_neg(lit)))
                        if conflict is not None:
                            return conflict  # pragma: no cover - enqueue guards
        elif gval == FALSE:
            if pb.cannot_exceed(pb.sum_potential):
                return negated_reason(None)
            if pb.cannot_exceed(pb.sum_potential - pb.cmax):
                for coef, lit in pb.terms:
                    if self.value_lit(lit) == UNDEF and pb.cannot_exceed(pb.sum_potential - coef):
                        conflict = self._enqueue(lit, negated_reason(lit))
                        if conflict is not None:
                            return conflict  # pragma: no cover
        else:
            if pb.exceeds(pb.sum_true):
                conflict = self._enqueue(_neg(pb.guard), active_reason(_neg(pb.guard)))
                if conflict is not None:
                    return conflict  # pragma: no cover
            elif pb.cannot_exceed(pb.sum_potential):
                conflict = self._enqueue(pb.guard, negated_reason(pb.guard))
                if conflict is not None:
                    return conflict  # pragma: no cover
        return None

    # -- conflict analysis ----------------------------------------------------

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for i in range(len(self.activity)):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100
            self.order_heap = [(-self.activity[v], v) for v in range(len(self.values))]
            heapq.heapify(self.order_heap)
        elif self.values[var] == UNDEF:
            heapq.heappush(self.order_heap, (-self.activity[var], var))

    def analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        learnt: list[int] = [0]  # placeholder for the asserting literal
        seen = [False] * len(self.values)
        counter = 0
        p: Optional[int] = None
        reason: list[int] = conflict
        idx = len(self.trail) - 1
        while True:
            for q in reason:
                if p is not None and q == p:
                    continue
                v = _var(q)
                if not seen[v] and self.levels[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.levels[v] >= self.level():
                        counter += 1
                    else:
                        learnt.append(q)
            while idx >= 0 and not seen[_var(self.trail[idx])]:
                idx -= 1
            if idx < 0:
                break
            p_lit = self.trail[idx]
            v = _var(p_lit)
            seen[v] = False
            counter -= 1
            idx -= 1
            if counter == 0:
                learnt[0] = _neg(p_lit)
                break
            p = p_lit
            raw = self.reasons[v]
            reason = list(raw) if raw is not None else []
        if learnt[0] == 0:
            return [], 0  # conflict independent of current level: root unsat
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.levels[_var(q)] for q in learnt[1:])
        # move a literal of the backjump level into watch position 1
        for k in range(1, len(learnt)):
            if self.levels[_var(learnt[k])] == back:
                learnt[1], learnt[k] = learnt[k], learnt[1]
                break
        return learnt, back

    def analyze_final(self, failed: list[int], is_assumption: dict[int, object]) -> set:
        """Collect the assumptions a conflict depends on (final conflict analysis)."""
        out: set = set()
        seen = [False] * len(self.values)
        stack = [q for q in failed]
        for q in stack:
            seen[_var(q)] = True
        for i in range(len(self.trail) - 1, -1, -1):
            lit = self.trail[i]
            v = _var(lit)
            if not seen[v]:
                continue
            raw = self.reasons[v]
            if raw is None:
                if lit in is_assumption:
                    out.add(is_assumption[lit])
            else:
                for q in raw:
                    if _var(q) != v and self.levels[_var(q)] > 0:
                        seen[_var(q)] = True
        return out

    # -- search ----------------------------------------------------------------

    def _decide(self) -> int:
        while self.order_heap:
            neg_act, v = heapq.heappop(self.order_heap)
            if self.values[v] != UNDEF:
                continue
            if -neg_act != self.activity[v]:
                heapq.heappush(self.order_heap, (-self.activity[v], v))
                continue
            return _mklit(v, self.phase[v])
        # heap entries can be stale after cancellations; rebuild once
        unassigned = [v for v in range(len(self.values)) if self.values[v] == UNDEF]
        if not unassigned:
            return -1
        self.order_heap = [(-self.activity[v], v) for v in unassigned]
        heapq.heapify(self.order_heap)
        neg_act, v = heapq.heappop(self.order_heap)
        return _mklit(v, self.phase[v])

    def solve(self, assumptions: list[int], deadline: Optional[float]) -> tuple[bool, set]:
        """Returns (sat, failed_assumption_tracks); tracks via assumption map."""
        if self.root_unsat:
            return False, set()
        self._cancel_until(0)
        conflict = self.propagate()
        if conflict is not None:
            self.root_unsat = True
            return False, set()

        assumption_map: dict[int, object] = {}
        for i, lit in enumerate(assumptions):
            assumption_map.setdefault(lit, i)

        conflicts_since_restart = 0
        restart_limit = self._luby(64)
        restart_count = 0
        steps = 0

        while True:
            steps += 1
            if deadline is not None and steps % 64 == 0 and time.monotonic() > deadline:
                raise SolverTimeout()
            conflict = self.propagate()
            if conflict is not None:
                if self.level() == 0:
                    self.root_unsat = True
                    return False, set()
                if self.level() <= self._assumption_depth:
                    tracks = self.analyze_final(conflict, self._assumption_tracks)
                    self._cancel_until(0)
                    return False, tracks
                learnt, back = self.analyze(conflict)
                if not learnt:
                    self.root_unsat = True
                    return False, set()
                self._cancel_until(max(back, self._assumption_depth))
                if len(learnt) == 1:
                    self._cancel_until(0)
                    if self._enqueue(learnt[0], None) is not None:
                        self.root_unsat = True
                        return False, set()
                    # re-establish assumptions from scratch
                    self._assumption_depth = 0
                else:
                    self.clauses.append(learnt)
                    self.watches.setdefault(learnt[0], []).append(learnt)
                    self.watches.setdefault(learnt[1], []).append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= 0.95
                conflicts_since_restart += 1
                if conflicts_since_restart >= restart_limit:
                    conflicts_since_restart = 0
                    restart_count += 1
                    restart_limit = self._luby(64, restart_count)
                    self._cancel_until(0)
                    self._assumption_depth = 0
                continue

            if self.level() < len(assumptions) and self.level() >= self._assumption_depth:
                # establish the next assumption as a pseudo-decision
                lit = assumptions[self.level()]
                val = self.value_lit(lit)
                if val == TRUE:
                    self.trail_lim.append(len(self.trail))
                    self._assumption_depth = self.level()
                    continue
                if val == FALSE:
                    # the failed assumption itself always belongs to the core
                    tracks = self.analyze_final([lit], self._assumption_tracks)
                    if lit in self._assumption_tracks:
                        tracks.add(self._assumption_tracks[lit])
                    self._cancel_until(0)
                    return False, tracks
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, None)
                self._assumption_depth = self.level()
                continue

            lit = self._decide()
            if lit == -1:
                return True, set()
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    @staticmethod
    def _luby(unit: int, x: int = 0) -> int:
        # luby sequence 1,1,2,1,1,2,4,... scaled by unit (x is 0-based)
        size, seq = 1, 0
        while size < x + 1:
            seq += 1
            size = 2 * size + 1
        while size - 1 != x:
            size = (size - 1) >> 1
            seq -= 1
            x = x % size
        return unit * (1 << seq)


@dataclass(frozen=True)
class TrackedAssertion:
    track_id: str
    formula: Formula


@dataclass
class SolveResult:
    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    model: Optional["Model"] = None
    core: frozenset[str] = frozenset()
    objective_values: dict[int, Fraction] = field(default_factory=dict)
    satisfied_soft: frozenset[str] = frozenset()
    dropped_soft: frozenset[str] = frozenset()


class Model:
    def __init__(self, session: "Session", values: list[int]):
        self._session = session
        self._values = values

    def bool_value(self, name: str) -> bool:
        var = self._session._bools[name]
        return self._values[var] == TRUE

    def num_value(self, name: str) -> Fraction:
        bits = self._session._nums[name]
        for value, var in bits:
            if self._values[var] == TRUE:
                return value
        raise KeyError(f"no one-hot bit set for {name}")

    def sum_value(self, s: LinSum) -> Fraction:
        total = s.const
        for coef, name in s.terms:
            if name in self._session._bools:
                total += coef * (1 if self.bool_value(name) else 0)
            else:
                total += coef * self.num_value(name)
        return total

    def holds(self, lit_name: str) -> bool:
        return self.bool_value(lit_name)


@dataclass(frozen=True)
class Objective:
    priority: int
    sense: str  # MAXIMIZE | MINIMIZE
    sum: LinSum
    label: str = ""


class Session:
    """One solver session: declarations, tracked/soft assertions, objectives.

    Single-threaded; distinct sessions share nothing. ``budget_seconds``
    bounds each ``solve``/``check`` call; exhaustion raises SolverTimeout,
    surfaced as UNKNOWN by callers, never as UNSAT.
    """

    def __init__(self, budget_seconds: float = 30.0):
        self.budget_seconds = budget_seconds
        self._engine = _Engine()
        self._bools: dict[str, int] = {}
        self._nums: dict[str, list[tuple[Fraction, int]]] = {}
        self._tracked: dict[str, TrackedAssertion] = {}
        self._selectors: dict[str, int] = {}
        self._softs: list[tuple[str, int, int]] = []  # (id, indicator lit, weight)
        self._objectives: list[Objective] = []
        self._floors: list[int] = []
        self._compiled_cache: dict[Formula, int] = {}

    # -- declarations ---------------------------------------------------------

    def declare_bool(self, name: str) -> None:
        if name in self._bools or name in self._nums:
            return
        self._bools[name] = self._engine.new_var()

    def declare_num(self, name: str, domain: Iterable[Union[int, float, Fraction]]) -> None:
        if name in self._nums:
            return
        values = sorted({Fraction(v) for v in domain})
        if not values:
            raise ValueError(f"numeric variable {name!r} needs a non-empty domain")
        bits = [(v, self._engine.new_var()) for v in values]
        self._nums[name] = bits
        lits = [_mklit(var) for _, var in bits]
        self._engine.add_clause(lits)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                self._engine.add_clause([_neg(lits[i]), _neg(lits[j])])

    def declarations(self) -> tuple[dict[str, None], dict[str, tuple[Fraction, ...]]]:
        return (
            {name: None for name in self._bools},
            {name: tuple(v for v, _ in bits) for name, bits in self._nums.items()},
        )

    def has_name(self, name: str) -> bool:
        return name in self._bools or name in self._nums

    # -- literal helpers --------------------------------------------------------

    def bool_lit(self, name: str, positive: bool = True) -> int:
        if name not in self._bools:
            self.declare_bool(name)
        return _mklit(self._bools[name], positive)

    def num_eq_lit(self, name: str, value: Union[int, float, Fraction]) -> int:
        value = Fraction(value)
        for v, var in self._nums[name]:
            if v == value:
                return _mklit(var)
        raise KeyError(f"{value} is not in the domain of {name}")

    # -- compilation -----------------------------------------------------------

    def _expand_sum(self, s: LinSum) -> tuple[list[tuple[Fraction, int]], Fraction]:
        """One-hot expansion, rebased at each numeric variable's extreme value.

        Rebasing (sum c*value_j*bit_j == c*ref + sum c*(value_j - ref)*bit_j,
        exact under the one-hot invariant) keeps residual coefficients
        non-negative, which makes slack-based propagation much tighter.
        """
        terms: list[tuple[Fraction, int]] = []
        const = s.const
        for coef, name in s.merged().terms:
            if name in self._bools:
                terms.append((coef, _mklit(self._bools[name])))
            elif name in self._nums:
                bits = self._nums[name]
                ref = bits[0][0] if coef > 0 else bits[-1][0]
                const += coef * ref
                for value, var in bits:
                    residual = coef * (value - ref)
                    if residual != 0:
                        terms.append((residual, _mklit(var)))
            else:
                raise KeyError(f"undeclared variable {name!r} in linear sum")
        return terms, const

    def _reify_le(self, terms: list[tuple[Fraction, int]], bound: Fraction, strict: bool) -> int:
        # returns a guard literal g with g <-> (sum <= / < bound)
        norm: list[tuple[Fraction, int]] = []
        b = bound
        for coef, lit in terms:
            if coef == 0:
                continue
            if coef < 0:
                # coef*lit == coef - |coef|*(neg lit)
                b -= coef
                norm.append((-coef, _neg(lit)))
            else:
                norm.append((coef, lit))
        if not norm:
            holds = (Fraction(0) < b) if strict else (Fraction(0) <= b)
            return self._engine.true_lit if holds else _neg(self._engine.true_lit)
        guard = _mklit(self._engine.new_var())
        self._engine.add_pb(guard, norm, b, strict)
        return guard

    def compile(self, formula: Formula) -> int:
        cached = self._compiled_cache.get(formula)
        if cached is not None:
            return cached
        lit = self._compile(formula)
        self._compiled_cache[formula] = lit
        return lit

    def _compile(self, formula: Formula) -> int:
        eng = self._engine
        if isinstance(formula, FTrue):
            return eng.true_lit
        if isinstance(formula, FFalse):
            return _neg(eng.true_lit)
        if isinstance(formula, FBool):
            return self.bool_lit(formula.name)
        if isinstance(formula, FNot):
            return _neg(self.compile(formula.arg))
        if isinstance(formula, FImplies):
            return self.compile(FOr((FNot(formula.antecedent), formula.consequent)))
        if isinstance(formula, FIff):
            a = self.compile(formula.lhs)
            b = self.compile(formula.rhs)
            v = _mklit(eng.new_var())
            eng.add_clause([_neg(v), _neg(a), b])
            eng.add_clause([_neg(v), a, _neg(b)])
            eng.add_clause([v, a, b])
            eng.add_clause([v, _neg(a), _neg(b)])
            return v
        if isinstance(formula, FAnd):
            lits = [self.compile(a) for a in formula.args]
            if not lits:
                return eng.true_lit
            v = _mklit(eng.new_var())
            for lit in lits:
                eng.add_clause([_neg(v), lit])
            eng.add_clause([v] + [_neg(lit) for lit in lits])
            return v
        if isinstance(formula, FOr):
            lits = [self.compile(a) for a in formula.args]
            if not lits:
                return _neg(eng.true_lit)
            v = _mklit(eng.new_var())
            for lit in lits:
                eng.add_clause([v, _neg(lit)])
            eng.add_clause([_neg(v)] + lits)
            return v
        if isinstance(formula, FCmp):
            terms, const = self._expand_sum(formula.sum)
            bound = formula.bound - const
            if formula.op == "<=":
                return self._reify_le(terms, bound, strict=False)
            if formula.op == "<":
                return self._reify_le(terms, bound, strict=True)
            if formula.op == ">=":
                neg_terms = [(-c, l) for c, l in terms]
                return self._reify_le(neg_terms, -bound, strict=False)
            if formula.op == ">":
                neg_terms = [(-c, l) for c, l in terms]
                return self._reify_le(neg_terms, -bound, strict=True)
            if formula.op == "=":
                le = self._reify_le(terms, bound, strict=False)
                ge = self._reify_le([(-c, l) for c, l in terms], -bound, strict=False)
                v = _mklit(eng.new_var())
                eng.add_clause([_neg(v), le])
                eng.add_clause([_neg(v), ge])
                eng.add_clause([v, _neg(le), _neg(ge)])
                return v
            raise ValueError(f"unknown comparison {formula.op!r}")
        raise TypeError(type(formula).__name__)

    # -- assertions --------------------------------------------------------------

    def assert_hard(self, track_id: str, formula: Formula) -> None:
        if track_id in self._tracked:
            raise ValueError(f"duplicate track id {track_id!r}")
        self._tracked[track_id] = TrackedAssertion(track_id, formula)
        selector = self._engine.new_var()
        self._selectors[track_id] = selector
        lit = self.compile(formula)
        self._engine.add_clause([_neg(_mklit(selector)), lit])

    def assert_always(self, formula: Formula) -> None:
        """Structural assertion outside any core (variable semantics etc.)."""
        lit = self.compile(formula)
        self._engine.add_clause([lit])

    def assert_soft(self, soft_id: str, formula: Formula, weight: int = 1) -> None:
        name = f"__soft::{soft_id}"
        self.declare_bool(name)
        indicator = self.bool_lit(name)
        lit = self.compile(formula)
        self._engine.add_clause([_neg(indicator), lit])
        self._engine.add_clause([indicator, _neg(lit)])
        self._softs.append((soft_id, name, weight))

    def add_objective(self, priority: int, sense: str, s: LinSum, label: str = "") -> None:
        self._objectives.append(Objective(priority, sense, s, label))

    def tracked_formula(self, track_id: str) -> Formula:
        return self._tracked[track_id].formula

    def track_ids(self) -> list[str]:
        return list(self._tracked)

    # -- solving -----------------------------------------------------------------

    def _deadline(self) -> float:
        return time.monotonic() + self.budget_seconds

    def _base_assumptions(self, restrict_to: Optional[Iterable[str]] = None) -> tuple[list[int], dict[int, str]]:
        tracks = list(self._tracked) if restrict_to is None else list(restrict_to)
        lits: list[int] = []
        mapping: dict[int, str] = {}
        for t in tracks:
            lit = _mklit(self._selectors[t])
            lits.append(lit)
            mapping[lit] = t
        return lits, mapping

    def _search(
        self,
        assumptions: list[int],
        track_of: dict[int, str],
        deadline: float,
    ) -> tuple[Optional[Model], frozenset[str]]:
        self._engine._assumption_depth = 0
        self._engine._assumption_tracks = {
            lit: track_of[lit] for lit in assumptions if lit in track_of
        }
        sat, failed = self._engine.solve(assumptions, deadline)
        if sat:
            return Model(self, list(self._engine.values)), frozenset()
        return None, frozenset(t for t in failed if isinstance(t, str))

    def solve(self, restrict_to: Optional[Iterable[str]] = None, with_objectives: bool = True) -> SolveResult:
        """Full pipeline: feasibility, soft maximization, lexicographic objectives."""
        deadline = self._deadline()
        base, track_of = self._base_assumptions(restrict_to)
        assumptions = base + self._floors if with_objectives else list(base)
        model, core = self._search(assumptions, track_of, deadline)
        if model is None:
            return SolveResult("UNSAT", core=core)
        if not with_objectives:
            return SolveResult("SAT", model=model, **self._soft_report(model))

        # soft assertions are optimized ahead of user objectives: architects
        # mark constraints optional to avoid infeasibility, not to waive them
        if self._softs:
            soft_sum = LinSum(
                tuple((Fraction(w), name) for _sid, name, w in self._softs)
            )
            model = self._improve(model, soft_sum, "MAXIMIZE", base, track_of, deadline)

        values: dict[int, Fraction] = {}
        for objective in sorted(self._objectives, key=lambda o: o.priority):
            model = self._improve(model, objective.sum, objective.sense, base, track_of, deadline)
            values[objective.priority] = model.sum_value(objective.sum)
        return SolveResult(
            "SAT", model=model, objective_values=values, **self._soft_report(model)
        )

    def _improve(
        self,
        model: Model,
        s: LinSum,
        sense: str,
        base: list[int],
        track_of: dict[int, str],
        deadline: float,
    ) -> Model:
        best = model.sum_value(s)
        maximize = sense == "MAXIMIZE"
        while True:
            if maximize:
                probe = FCmp(">", s, best)
            else:
                probe = FCmp("<", s, best)
            lit = self.compile(probe)
            candidate, _ = self._search(base + self._floors + [lit], track_of, deadline)
            if candidate is None:
                break
            model = candidate
            best = model.sum_value(s)
        floor = FCmp(">=" if maximize else "<=", s, best)
        self._floors.append(self.compile(floor))
        return model

    def _soft_report(self, model: Model) -> dict:
        satisfied: set[str] = set()
        dropped: set[str] = set()
        for sid, name, _w in self._softs:
            if model.bool_value(name):
                satisfied.add(sid)
            else:
                dropped.add(sid)
        return {
            "satisfied_soft": frozenset(satisfied),
            "dropped_soft": frozenset(dropped),
        }

    def check(self, extra_literals: Sequence[int] = ()) -> Optional[Model]:
        """Feasibility with tracked assertions + objective floors + extras."""
        deadline = self._deadline()
        base, track_of = self._base_assumptions()
        model, _ = self._search(base + self._floors + list(extra_literals), track_of, deadline)
        return model

    def solve_subset(self, track_ids: Iterable[str]) -> SolveResult:
        """Solve with exactly the given assertion subset and no objectives."""
        result = self.solve(restrict_to=list(track_ids), with_objectives=False)
        return result

    def fix(self, lit: int) -> None:
        """Permanently adopt a literal for subsequent checks (canonicalization)."""
        self._floors.append(lit)
