"""Ground solver formulas: boolean structure over named variables and linear atoms.

Variables are referenced by name; a session maps names to engine indices, so
the same formula can be re-asserted in a fresh session (used when a conflict
core is decomposed and re-solved).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union


@dataclass(frozen=True)
class LinSum:
    """sum of coef*var plus a constant; vars may be boolean (0/1) or numeric."""

    terms: tuple[tuple[Fraction, str], ...] = ()
    const: Fraction = Fraction(0)

    def __add__(self, other: "LinSum") -> "LinSum":
        return LinSum(self.terms + other.terms, self.const + other.const)

    def __neg__(self) -> "LinSum":
        return LinSum(tuple((-c, v) for c, v in self.terms), -self.const)

    def scaled(self, k: Fraction) -> "LinSum":
        return LinSum(tuple((c * k, v) for c, v in self.terms), self.const * k)

    def merged(self) -> "LinSum":
        acc: dict[str, Fraction] = {}
        for coef, var in self.terms:
            acc[var] = acc.get(var, Fraction(0)) + coef
        terms = tuple((c, v) for v, c in sorted(acc.items()) if c != 0)
        return LinSum(terms, self.const)


def lin(*terms: tuple[Union[int, Fraction], str], const: Union[int, Fraction] = 0) -> LinSum:
    return LinSum(tuple((Fraction(c), v) for c, v in terms), Fraction(const))


class Formula:
    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()


@dataclass(frozen=True)
class FTrue(Formula):
    pass


@dataclass(frozen=True)
class FFalse(Formula):
    pass


@dataclass(frozen=True)
class FBool(Formula):
    name: str


@dataclass(frozen=True)
class FNot(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class FAnd(Formula):
    args: tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class FOr(Formula):
    args: tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class FImplies(Formula):
    antecedent: Formula
    consequent: Formula

    def children(self):
        return (self.antecedent, self.consequent)


@dataclass(frozen=True)
class FIff(Formula):
    lhs: Formula
    rhs: Formula

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True)
class FCmp(Formula):
    """``sum op bound`` with op in {<, <=, =, >=, >}."""

    op: str
    sum: LinSum
    bound: Fraction


TRUE = FTrue()
FALSE = FFalse()


def fand(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, FTrue):
            continue
        if isinstance(a, FFalse):
            return FALSE
        if isinstance(a, FAnd):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return FAnd(tuple(flat))


def for_(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        if isinstance(a, FFalse):
            continue
        if isinstance(a, FTrue):
            return TRUE
        if isinstance(a, FOr):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return FOr(tuple(flat))


def fnot(arg: Formula) -> Formula:
    if isinstance(arg, FTrue):
        return FALSE
    if isinstance(arg, FFalse):
        return TRUE
    if isinstance(arg, FNot):
        return arg.arg
    return FNot(arg)


def num_eq(name: str, value: Fraction) -> FCmp:
    return FCmp("=", LinSum(((Fraction(1), name),)), Fraction(value))


def bool_is(name: str, value: bool) -> Formula:
    return FBool(name) if value else FNot(FBool(name))


def exactly_one(args: tuple[Formula, ...]) -> Formula:
    parts: list[Formula] = [for_(*args)]
    for i in range(len(args)):
        for j in range(i + 1, len(args)):
            parts.append(for_(fnot(args[i]), fnot(args[j])))
    return fand(*parts)


def walk(formula: Formula) -> Iterator[Formula]:
    yield formula
    for child in formula.children():
        yield from walk(child)


def referenced_names(formula: Formula) -> frozenset[str]:
    names: set[str] = set()
    for node in walk(formula):
        if isinstance(node, FBool):
            names.add(node.name)
        elif isinstance(node, FCmp):
            for _, v in node.sum.terms:
                names.add(v)
    return frozenset(names)


def _frac_text(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    f = float(x)
    return repr(f)


def _sum_text(s: LinSum) -> str:
    parts: list[str] = []
    for coef, var in s.terms:
        if coef == 1:
            parts.append(var)
        else:
            parts.append(f"{_frac_text(coef)}*{var}")
    if s.const != 0 or not parts:
        parts.append(_frac_text(s.const))
    return " + ".join(parts)


def text(formula: Formula) -> str:
    """Human-readable rendering used in explanations and reports."""
    if isinstance(formula, FTrue):
        return "true"
    if isinstance(formula, FFalse):
        return "false"
    if isinstance(formula, FBool):
        return formula.name
    if isinstance(formula, FNot):
        return f"Not({text(formula.arg)})"
    if isinstance(formula, FAnd):
        return "And(" + ", ".join(text(a) for a in formula.args) + ")"
    if isinstance(formula, FOr):
        return "Or(" + ", ".join(text(a) for a in formula.args) + ")"
    if isinstance(formula, FImplies):
        return f"Implies({text(formula.antecedent)}, {text(formula.consequent)})"
    if isinstance(formula, FIff):
        return f"Iff({text(formula.lhs)}, {text(formula.rhs)})"
    if isinstance(formula, FCmp):
        return f"{_sum_text(formula.sum)} {formula.op} {_frac_text(formula.bound)}"
    raise TypeError(type(formula).__name__)
