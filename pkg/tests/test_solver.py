"""Engine checks: agreement with brute force, core soundness, lexicographic order."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from archforge import formula as F
from archforge.solver import Session


def brute_force_eval(formula: F.Formula, assignment: dict[str, bool]) -> bool:
    if isinstance(formula, F.FTrue):
        return True
    if isinstance(formula, F.FFalse):
        return False
    if isinstance(formula, F.FBool):
        return assignment[formula.name]
    if isinstance(formula, F.FNot):
        return not brute_force_eval(formula.arg, assignment)
    if isinstance(formula, F.FAnd):
        return all(brute_force_eval(a, assignment) for a in formula.args)
    if isinstance(formula, F.FOr):
        return any(brute_force_eval(a, assignment) for a in formula.args)
    if isinstance(formula, F.FImplies):
        return (not brute_force_eval(formula.antecedent, assignment)) or brute_force_eval(
            formula.consequent, assignment
        )
    if isinstance(formula, F.FIff):
        return brute_force_eval(formula.lhs, assignment) == brute_force_eval(
            formula.rhs, assignment
        )
    if isinstance(formula, F.FCmp):
        total = formula.sum.const
        for coef, name in formula.sum.terms:
            total += coef * (1 if assignment[name] else 0)
        return {
            "<": total < formula.bound,
            "<=": total <= formula.bound,
            "=": total == formula.bound,
            ">=": total >= formula.bound,
            ">": total > formula.bound,
        }[formula.op]
    raise TypeError(type(formula))


def random_formula(rng: random.Random, names: list[str], depth: int) -> F.Formula:
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(3)
        if kind == 0:
            return F.FBool(rng.choice(names))
        if kind == 1:
            k = rng.randrange(1, 4)
            terms = tuple(
                (Fraction(rng.randrange(-3, 4)), rng.choice(names)) for _ in range(k)
            )
            op = rng.choice(["<", "<=", "=", ">=", ">"])
            return F.FCmp(op, F.LinSum(terms), Fraction(rng.randrange(-3, 6)))
        return F.FTrue() if rng.random() < 0.5 else F.FFalse()
    kind = rng.randrange(5)
    if kind == 0:
        return F.FAnd(tuple(random_formula(rng, names, depth - 1) for _ in range(2)))
    if kind == 1:
        return F.FOr(tuple(random_formula(rng, names, depth - 1) for _ in range(2)))
    if kind == 2:
        return F.FNot(random_formula(rng, names, depth - 1))
    if kind == 3:
        return F.FImplies(
            random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1)
        )
    return F.FIff(
        random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1)
    )


def test_agreement_with_brute_force_random():
    rng = random.Random(7)
    names = ["a", "b", "c", "d", "e"]
    for trial in range(300):
        formulas = [random_formula(rng, names, 3) for _ in range(rng.randrange(1, 5))]
        session = Session()
        for n in names:
            session.declare_bool(n)
        for i, f in enumerate(formulas):
            session.assert_hard(f"t{i}", f)
        result = session.solve()
        expected_sat = any(
            all(brute_force_eval(f, dict(zip(names, bits))) for f in formulas)
            for bits in itertools.product([False, True], repeat=len(names))
        )
        assert (result.status == "SAT") == expected_sat, f"trial {trial}"
        if result.status == "SAT":
            assignment = {n: result.model.bool_value(n) for n in names}
            assert all(brute_force_eval(f, assignment) for f in formulas), f"trial {trial}"
        else:
            # core soundness: the core alone must be unsatisfiable
            core = sorted(result.core)
            sub = session.solve_subset(core)
            assert sub.status == "UNSAT", f"trial {trial}: core {core} not UNSAT"


def test_core_is_subset_and_unsat():
    session = Session()
    for n in ("x", "y", "z"):
        session.declare_bool(n)
    session.assert_hard("t1", F.FBool("x"))
    session.assert_hard("t2", F.FNot(F.FBool("x")))
    session.assert_hard("t3", F.FBool("y"))
    result = session.solve()
    assert result.status == "UNSAT"
    assert result.core <= {"t1", "t2", "t3"}
    assert session.solve_subset(sorted(result.core)).status == "UNSAT"


def test_solve_subset_restricts():
    session = Session()
    session.declare_bool("x")
    session.assert_hard("t1", F.FBool("x"))
    session.assert_hard("t2", F.FNot(F.FBool("x")))
    assert session.solve_subset(["t1"]).status == "SAT"
    assert session.solve_subset(["t2"]).status == "SAT"
    assert session.solve_subset([]).status == "SAT"
    assert session.solve_subset(["t1", "t2"]).status == "UNSAT"


def _lex_brute_force(names, formulas, objectives):
    """Enumerate all assignments; return the lexicographically best objective vector."""
    best = None
    for bits in itertools.product([False, True], repeat=len(names)):
        assignment = dict(zip(names, bits))
        if not all(brute_force_eval(f, assignment) for f in formulas):
            continue
        vector = []
        for sense, terms in objectives:
            value = sum(c * (1 if assignment[n] else 0) for c, n in terms)
            vector.append(value if sense == "MAXIMIZE" else -value)
        vector = tuple(vector)
        if best is None or vector > best:
            best = vector
    return best


def test_lexicographic_soundness_exhaustive():
    rng = random.Random(23)
    names = ["a", "b", "c", "d", "e", "f"]
    for trial in range(120):
        formulas = [random_formula(rng, names, 2) for _ in range(rng.randrange(0, 4))]
        objectives = []
        for p in range(1, rng.randrange(2, 4)):
            terms = [
                (Fraction(rng.randrange(0, 4)), n)
                for n in rng.sample(names, rng.randrange(1, 4))
            ]
            objectives.append((rng.choice(["MAXIMIZE", "MINIMIZE"]), terms))
        session = Session()
        for n in names:
            session.declare_bool(n)
        for i, f in enumerate(formulas):
            session.assert_hard(f"t{i}", f)
        for p, (sense, terms) in enumerate(objectives, start=1):
            session.add_objective(p, sense, F.LinSum(tuple(terms)))
        result = session.solve()
        expected = _lex_brute_force(names, formulas, objectives)
        if expected is None:
            assert result.status == "UNSAT", f"trial {trial}"
            continue
        assert result.status == "SAT", f"trial {trial}"
        got = tuple(
            result.objective_values[p] if sense == "MAXIMIZE" else -result.objective_values[p]
            for p, (sense, _) in enumerate(objectives, start=1)
        )
        assert got == expected, f"trial {trial}: {got} != {expected}"


def test_two_system_toy_priorities():
    # one role, two candidates; latency prefers A, deploy-ease prefers B;
    # priority 1 = latency must win even though priority 2 disagrees
    session = Session()
    session.declare_bool("pick_a")
    session.declare_bool("pick_b")
    session.assert_hard("one", F.exactly_one((F.FBool("pick_a"), F.FBool("pick_b"))))
    session.add_objective(1, "MAXIMIZE", F.lin((2, "pick_a"), (1, "pick_b")))
    session.add_objective(2, "MAXIMIZE", F.lin((1, "pick_a"), (2, "pick_b")))
    result = session.solve()
    assert result.model.bool_value("pick_a") and not result.model.bool_value("pick_b")


def test_soft_assertions_never_cause_unsat():
    session = Session()
    session.declare_bool("x")
    session.assert_hard("hard", F.FBool("x"))
    session.assert_soft("soft1", F.FNot(F.FBool("x")))
    session.assert_soft("soft2", F.FBool("x"))
    result = session.solve()
    assert result.status == "SAT"
    assert result.dropped_soft == {"soft1"}
    assert result.satisfied_soft == {"soft2"}


def test_determinism_same_models():
    def run():
        session = Session()
        for n in ("a", "b", "c", "d"):
            session.declare_bool(n)
        session.declare_num("k", [0, 1, 2, 3])
        session.assert_hard("pb", F.FCmp("<=", F.lin((1, "a"), (1, "b"), (1, "c"), (1, "d"), (1, "k")), Fraction(3)))
        session.add_objective(1, "MAXIMIZE", F.lin((1, "a"), (1, "b"), (2, "k")))
        r = session.solve()
        return (
            [r.model.bool_value(n) for n in ("a", "b", "c", "d")],
            r.model.num_value("k"),
        )

    assert run() == run()


def test_timeout_raises():
    from archforge.solver import SolverTimeout

    session = Session(budget_seconds=0.02)
    pigeons, holes = 10, 9
    for p in range(pigeons):
        for h in range(holes):
            session.declare_bool(f"p{p}h{h}")
    for p in range(pigeons):
        session.assert_hard(
            f"pigeon{p}", F.FOr(tuple(F.FBool(f"p{p}h{h}") for h in range(holes)))
        )
    for h in range(holes):
        for a in range(pigeons):
            for b in range(a + 1, pigeons):
                session.assert_hard(
                    f"hole{h}:{a}:{b}",
                    F.FOr((F.FNot(F.FBool(f"p{a}h{h}")), F.FNot(F.FBool(f"p{b}h{h}")))),
                )
    with pytest.raises(SolverTimeout):
        session.solve()
