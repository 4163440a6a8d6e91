"""Exact data model: rationals, 0-1 inequalities, clauses and partial assignments.

Variables are numbered 1..n everywhere.  Every inequality is kept in
``sum(coef * x) >= rhs`` form; the box ``0 <= x <= 1`` is implicit and only
materialised on request (:meth:`BinarySystem.rows_with_box`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence, Union

Rat = Fraction
RatLike = Union[int, str, Fraction]


class UnsatisfiableClause(ValueError):
    """The empty clause has no inequality form."""


class UnassignedVariable(KeyError):
    pass


def rat(value: RatLike) -> Fraction:
    """Convert an int, ``"p/q"`` string or Fraction to a Fraction.

    Floats are rejected on purpose: they would smuggle binary rounding into
    an otherwise exact computation.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot make a rational from {value!r}")


def fmt_rat(q: Fraction) -> str:
    return str(q)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class LinIneq:
    """``sum(coeffs[j] * x_j) >= rhs`` with zero coefficients dropped."""

    coeffs: tuple[tuple[int, Fraction], ...]
    rhs: Fraction

    @classmethod
    def make(cls, coeffs: Mapping[int, RatLike] | Iterable[tuple[int, RatLike]], rhs: RatLike) -> "LinIneq":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Fraction] = {}
        for j, c in items:
            if not isinstance(j, int) or j < 1:
                raise ValueError(f"bad variable index {j!r}")
            acc[j] = acc.get(j, Fraction(0)) + rat(c)
        return cls(tuple(sorted((j, c) for j, c in acc.items() if c != 0)), rat(rhs))

    @classmethod
    def leq(cls, coeffs, rhs) -> "LinIneq":
        """Build ``coeffs . x <= rhs``, stored negated."""
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        return cls.make([(j, -rat(c)) for j, c in items], -rat(rhs))

    @cached_property
    def coef(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    @property
    def variables(self) -> frozenset[int]:
        return frozenset(j for j, _ in self.coeffs)

    def lhs(self, point: Mapping[int, RatLike] | Sequence[RatLike]) -> Fraction:
        total = Fraction(0)
        for j, c in self.coeffs:
            try:
                v = point[j] if isinstance(point, Mapping) else point[j - 1]
            except (KeyError, IndexError):
                raise UnassignedVariable(j) from None
            total += c * rat(v)
        return total

    def satisfied_by(self, point) -> bool:
        return self.lhs(point) >= self.rhs

    def scaled(self, factor: Fraction) -> "LinIneq":
        if factor <= 0:
            raise ValueError("scaling an inequality needs a positive factor")
        return LinIneq(tuple((j, c * factor) for j, c in self.coeffs), self.rhs * factor)

    def normalized(self) -> "LinIneq":
        """Scale to coprime integer coefficients (rhs may stay fractional).

        Constant rows collapse to ``0 >= 1``, ``0 >= 0`` or ``0 >= -1``.
        """
        if not self.coeffs:
            return LinIneq((), Fraction((self.rhs > 0) - (self.rhs < 0)))
        den = 1
        for _, c in self.coeffs:
            den = _lcm(den, c.denominator)
        num = 0
        for _, c in self.coeffs:
            num = gcd(num, abs(c.numerator * (den // c.denominator)))
        return self.scaled(Fraction(den, num))

    def max_over_box(self, fixed: Mapping[int, int] | None = None) -> Fraction:
        """Largest left-hand side over 0-1 points agreeing with ``fixed``."""
        fixed = fixed or {}
        total = Fraction(0)
        for j, c in self.coeffs:
            if j in fixed:
                total += c * fixed[j]
            elif c > 0:
                total += c
        return total

    def min_over_box(self) -> Fraction:
        return sum((c for _, c in self.coeffs if c < 0), Fraction(0))

    def is_trivial(self) -> bool:
        """True when every point of the unit box satisfies the row."""
        return self.min_over_box() >= self.rhs

    def text(self, names: Mapping[int, str] | None = None) -> str:
        """Render as ``2 x1 - 4 x2 >= -3`` (parseable by the model reader)."""
        parts = []
        for j, c in self.coeffs:
            name = names[j] if names and j in names else f"x{j}"
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            term = name if mag == 1 else f"{fmt_rat(mag)} {name}"
            parts.append((sign, term))
        if not parts:
            body = "0"
        else:
            first_sign, first = parts[0]
            body = ("-" if first_sign == "-" else "") + first
            for sign, term in parts[1:]:
                body += f" {sign} {term}"
        return f"{body} >= {fmt_rat(self.rhs)}"

    def __str__(self) -> str:
        return self.text()


def lower_bound_row(j: int) -> LinIneq:
    return LinIneq(((j, Fraction(1)),), Fraction(0))


def upper_bound_row(j: int) -> LinIneq:
    return LinIneq(((j, Fraction(-1)),), Fraction(-1))


@dataclass(frozen=True)
class BinarySystem:
    """A 0-1 constraint set: ``n`` binary variables and ``rows`` (all ``>=``)."""

    n: int
    rows: tuple[LinIneq, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative variable count")
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            for j in r.variables:
                if j > self.n:
                    raise ValueError(f"row {r} uses x{j} but the system has {self.n} variables")

    def with_rows(self, extra: Iterable[LinIneq]) -> "BinarySystem":
        return BinarySystem(self.n, self.rows + tuple(extra))

    def rows_within(self, J: Iterable[int]) -> tuple[LinIneq, ...]:
        """Rows whose variables all lie in ``J`` (constant rows included)."""
        J = frozenset(J)
        return tuple(r for r in self.rows if r.variables <= J)

    def rows_with_box(self) -> tuple[LinIneq, ...]:
        """Rows, then ``x_j >= 0`` for j=1..n, then ``-x_j >= -1`` for j=1..n.

        Multiplier certificates index into exactly this layout.
        """
        lows = tuple(lower_bound_row(j) for j in range(1, self.n + 1))
        ups = tuple(upper_bound_row(j) for j in range(1, self.n + 1))
        return self.rows + lows + ups

    def satisfied_by(self, point) -> bool:
        return all(r.satisfied_by(point) for r in self.rows)

    def text(self) -> str:
        return "\n".join([f"vars {self.n}"] + [r.text() for r in self.rows]) + "\n"


@dataclass(frozen=True, order=False)
class Clause:
    """Disjunction of ``x_j`` (j in pos) and ``not x_j`` (j in neg)."""

    pos: frozenset[int] = field(default_factory=frozenset)
    neg: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "pos", frozenset(self.pos))
        object.__setattr__(self, "neg", frozenset(self.neg))
        if self.pos & self.neg:
            raise ValueError(f"clause is tautological in {sorted(self.pos & self.neg)}")

    @classmethod
    def of(cls, *literals: int) -> "Clause":
        """``Clause.of(1, -3)`` is ``x1 or not x3``."""
        return cls(frozenset(l for l in literals if l > 0), frozenset(-l for l in literals if l < 0))

    @property
    def literals(self) -> tuple[int, ...]:
        return tuple(sorted([*self.pos, *(-j for j in self.neg)], key=lambda l: (abs(l), l < 0)))

    @property
    def variables(self) -> frozenset[int]:
        return self.pos | self.neg

    @property
    def is_empty(self) -> bool:
        return not self.pos and not self.neg

    def __len__(self) -> int:
        return len(self.pos) + len(self.neg)

    def absorbs(self, other: "Clause") -> bool:
        return self.pos <= other.pos and self.neg <= other.neg

    def falsifying_assignment(self) -> "PartialAssignment":
        bind = {j: 0 for j in self.pos}
        bind.update({j: 1 for j in self.neg})
        return PartialAssignment.of(bind)

    def falsified_by(self, point: Mapping[int, int] | Sequence[int]) -> bool:
        get = (lambda j: point[j]) if isinstance(point, Mapping) else (lambda j: point[j - 1])
        return all(get(j) == 0 for j in self.pos) and all(get(j) == 1 for j in self.neg)

    def sort_key(self):
        return (len(self), tuple((abs(l), l < 0) for l in self.literals))

    def __str__(self) -> str:
        if self.is_empty:
            return "<empty>"
        return " ∨ ".join(f"x{l}" if l > 0 else f"¬x{-l}" for l in self.literals)

    def text(self) -> str:
        """CLI form: ``x1 -x3``."""
        return " ".join(f"x{l}" if l > 0 else f"-x{-l}" for l in self.literals)


EMPTY_CLAUSE = Clause()


@dataclass(frozen=True)
class PartialAssignment:
    """Sorted ``(variable, value)`` pairs with values in {0, 1}."""

    bindings: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "PartialAssignment":
        items = dict(mapping.items() if isinstance(mapping, Mapping) else mapping)
        for j, v in items.items():
            if v not in (0, 1):
                raise ValueError(f"x{j}={v} is not a 0-1 value")
            if j < 1:
                raise ValueError(f"bad variable index {j}")
        return cls(tuple(sorted((j, int(v)) for j, v in items.items())))

    @cached_property
    def as_dict(self) -> dict[int, int]:
        return dict(self.bindings)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.bindings)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)

    def __contains__(self, j: int) -> bool:
        return j in self.as_dict

    def __getitem__(self, j: int) -> int:
        return self.as_dict[j]

    def extend(self, j: int, v: int) -> "PartialAssignment":
        if j in self.as_dict:
            raise ValueError(f"x{j} already assigned")
        return PartialAssignment.of({**self.as_dict, j: v})

    def falsified_clause(self) -> Clause:
        """The clause over these variables that this assignment falsifies."""
        return Clause(frozenset(j for j, v in self.bindings if v == 0),
                      frozenset(j for j, v in self.bindings if v == 1))

    def __str__(self) -> str:
        if not self.bindings:
            return "()"
        if len(self.bindings) == 1:
            j, v = self.bindings[0]
            return f"x{j}={v}"
        names = ",".join(f"x{j}" for j in self.variables)
        vals = ",".join(str(v) for v in self.values)
        return f"({names})=({vals})"


def clause_to_inequality(c: Clause) -> LinIneq:
    """``sum_{pos} x_j - sum_{neg} x_j >= 1 - |neg|``."""
    if c.is_empty:
        raise UnsatisfiableClause("unsatisfiable clause")
    coeffs = {j: 1 for j in c.pos}
    coeffs.update({j: -1 for j in c.neg})
    return LinIneq.make(coeffs, 1 - len(c.neg))


def inequality_to_clause(a: LinIneq) -> Clause | None:
    """Inverse of :func:`clause_to_inequality`; ``None`` if ``a`` is not clausal."""
    pos = frozenset(j for j, c in a.coeffs if c == 1)
    neg = frozenset(j for j, c in a.coeffs if c == -1)
    if len(pos) + len(neg) != len(a.coeffs) or not a.coeffs:
        return None
    if a.rhs != 1 - len(neg):
        return None
    return Clause(pos, neg)


def inequality_implies_clause(a: LinIneq, c: Clause, n: int | None = None) -> bool:
    """Does every 0-1 point satisfying ``a`` satisfy ``c``?

    Fix the unique assignment falsifying ``c`` and ask whether ``a`` can still
    be met by the free variables; no enumeration.
    """
    if n is not None and any(j > n for j in c.variables):
        raise ValueError("clause mentions variables outside 1..n")
    falsify = {j: 0 for j in c.pos}
    falsify.update({j: 1 for j in c.neg})
    return a.max_over_box(falsify) < a.rhs


def evaluate(a: LinIneq, point: Mapping[int, int] | Sequence[int]) -> bool:
    return a.satisfied_by(point)
