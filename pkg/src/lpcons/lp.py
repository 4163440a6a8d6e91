"""Exact rational LP: feasibility, optimisation and Farkas certificates.

Two-phase primal simplex over a dense gmpy2 ``mpq`` tableau with Bland's rule;
all inputs and outputs are ``Fraction``.
Finite upper bounds are carried as explicit rows so that an infeasibility
certificate is a plain nonnegative multiplier vector over

    [problem rows; x_j >= lower_j; -x_j >= -upper_j]

whose combination reads ``0 >= positive``.  Every witness and certificate is
re-multiplied against the original data before it is returned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .model import BinarySystem, LinIneq, PartialAssignment, RatLike, rat

ZERO = Fraction(0)
ONE = Fraction(1)
QZERO = mpq(0)
QONE = mpq(1)


def _q(v: Fraction) -> mpq:
    return mpq(v.numerator, v.denominator)


def _frac(v: mpq) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class Status(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


class VerificationError(AssertionError):
    """A witness or certificate failed exact re-verification (solver bug)."""


@dataclass(frozen=True)
class LpProblem:
    rows: tuple[LinIneq, ...]
    nvars: int
    lower: tuple[Fraction | None, ...]
    upper: tuple[Fraction | None, ...]
    objective: tuple[tuple[int, Fraction], ...] | None = None
    fixings: PartialAssignment = PartialAssignment()
    x_count: int | None = None

    @classmethod
    def build(cls, rows: Iterable[LinIneq], nvars: int, lower=None, upper=None,
              objective: Mapping[int, RatLike] | None = None,
              fixings: PartialAssignment | Mapping[int, int] | None = None,
              x_count: int | None = None) -> "LpProblem":
        """Defaults: every variable in [0, 1].  ``None`` bounds are infinite."""
        lower = (tuple(None if v is None else rat(v) for v in lower)
                 if lower is not None else (ZERO,) * nvars)
        upper = (tuple(None if v is None else rat(v) for v in upper)
                 if upper is not None else (ONE,) * nvars)
        if len(lower) != nvars or len(upper) != nvars:
            raise ValueError("bounds length does not match variable count")
        for lo, up in zip(lower, upper):
            if up is not None and lo is not None and lo > up:
                raise ValueError("lower bound above upper bound")
        if fixings is None:
            fixings = PartialAssignment()
        elif not isinstance(fixings, PartialAssignment):
            fixings = PartialAssignment.of(fixings)
        limit = nvars if x_count is None else x_count
        if any(j > limit for j in fixings.variables):
            raise ValueError("fixings must touch x-variables only")
        rows = tuple(rows)
        for r in rows:
            if any(j > nvars for j in r.variables):
                raise ValueError(f"row {r} exceeds {nvars} variables")
        obj = None
        if objective is not None:
            obj = tuple(sorted((j, rat(c)) for j, c in objective.items() if rat(c) != 0))
        return cls(rows, nvars, lower, upper, obj, fixings, x_count)

    @classmethod
    def relaxation(cls, system: BinarySystem, fixings=None, objective=None,
                   extra_rows: Iterable[LinIneq] = ()) -> "LpProblem":
        """``S_LP`` plus a 0-1 partial assignment, as bound tightening."""
        return cls.build(system.rows + tuple(extra_rows), system.n,
                         objective=objective, fixings=fixings)

    def effective_bounds(self) -> tuple[list[Fraction], list[Fraction | None]]:
        lo, up = list(self.lower), list(self.upper)
        for j, v in self.fixings.bindings:
            lo[j - 1] = up[j - 1] = Fraction(v)
        return lo, up


@dataclass(frozen=True)
class FarkasCertificate:
    row_multipliers: tuple[Fraction, ...]
    lower_multipliers: tuple[Fraction, ...]
    upper_multipliers: tuple[Fraction, ...]

    @property
    def multipliers(self) -> tuple[Fraction, ...]:
        return self.row_multipliers + self.lower_multipliers + self.upper_multipliers


@dataclass(frozen=True)
class LpOutcome:
    status: Status
    witness: tuple[Fraction, ...] | None = None
    certificate: FarkasCertificate | None = None
    value: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status in (Status.FEASIBLE, Status.OPTIMAL, Status.UNBOUNDED)


def check_witness(p: LpProblem, x: Sequence[Fraction]) -> bool:
    lo, up = p.effective_bounds()
    if len(x) != p.nvars:
        return False
    for j, v in enumerate(x):
        if (lo[j] is not None and v < lo[j]) or (up[j] is not None and v > up[j]):
            return False
    return all(r.satisfied_by(x) for r in p.rows)


def check_farkas(p: LpProblem, cert: FarkasCertificate) -> bool:
    """``cert`` combines rows and bounds into ``0 >= positive``."""
    lo, up = p.effective_bounds()
    if (len(cert.row_multipliers) != len(p.rows) or len(cert.lower_multipliers) != p.nvars
            or len(cert.upper_multipliers) != p.nvars):
        return False
    if any(m < 0 for m in cert.multipliers):
        return False
    combo = [ZERO] * p.nvars
    rhs = ZERO
    for m, r in zip(cert.row_multipliers, p.rows):
        if m:
            for j, c in r.coeffs:
                combo[j - 1] += m * c
            rhs += m * r.rhs
    for j in range(p.nvars):
        m = cert.lower_multipliers[j]
        if m:
            if lo[j] is None:
                return False
            combo[j] += m
            rhs += m * lo[j]
        m = cert.upper_multipliers[j]
        if m:
            if up[j] is None:
                return False
            combo[j] -= m
            rhs -= m * up[j]
    return all(c == 0 for c in combo) and rhs > 0


class _Tableau:
    """Dense tableau ``T x = b`` with a basis and a reduced-cost row."""

    def __init__(self, T, b, basis):
        self.T = T
        self.b = b
        self.basis = basis
        self.d: list[Fraction] = []
        self.negz = QZERO

    def set_costs(self, cost: Sequence[Fraction]):
        ncols = len(cost)
        d = list(cost)
        negz = QZERO
        for r, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                row = self.T[r]
                for j in range(ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
                negz -= cb * self.b[r]
        self.d, self.negz = d, negz

    def pivot(self, r: int, c: int):
        row = self.T[r]
        p = row[c]
        if p != 1:
            row = [v / p if v else v for v in row]
            self.T[r] = row
            self.b[r] /= p
        br = self.b[r]
        nz = [j for j, v in enumerate(row) if v]
        for i, other in enumerate(self.T):
            if i == r:
                continue
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
                self.b[i] -= f * br
        f = self.d[c]
        if f:
            for j in nz:
                self.d[j] -= f * row[j]
            self.negz -= f * br
        self.basis[r] = c

    def run(self, allowed: int) -> bool:
        """Bland's rule on columns ``< allowed``.  False means unbounded."""
        while True:
            enter = next((j for j in range(allowed) if self.d[j] < 0), None)
            if enter is None:
                return True
            best = None
            for r, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    ratio = self.b[r] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], enter)


def _solve(p: LpProblem, cost: Sequence[Fraction] | None) -> LpOutcome:
    n = p.nvars
    lo, up = p.effective_bounds()
    m_rows = len(p.rows)
    base = [ZERO if v is None else v for v in lo]
    # a free variable x_j is split as x'_j - x''_j; x''_j gets its own column
    free = [j for j in range(n) if lo[j] is None]
    neg_col = {j: n + k for k, j in enumerate(free)}
    nx = n + len(free)

    def certificate(rows_m, lows_m, ups_m) -> LpOutcome:
        cert = FarkasCertificate(tuple(rows_m), tuple(lows_m), tuple(ups_m))
        if not check_farkas(p, cert):
            raise VerificationError("Farkas certificate failed re-verification")
        return LpOutcome(Status.INFEASIBLE, certificate=cert)

    # Shift x = lo + x' so that x' >= 0; collect G x' >= h.
    G: list[dict[int, Fraction]] = []
    h: list[Fraction] = []
    origin: list[tuple[str, int]] = []
    for i, r in enumerate(p.rows):
        coeffs = {j - 1: c for j, c in r.coeffs}
        shift = r.rhs - sum((c * base[j] for j, c in coeffs.items()), ZERO)
        if not coeffs:
            if shift > 0:
                rows_m = [ZERO] * m_rows
                rows_m[i] = ONE
                return certificate(rows_m, [ZERO] * n, [ZERO] * n)
            continue
        G.append(coeffs)
        h.append(shift)
        origin.append(("row", i))
    for j in range(n):
        if up[j] is not None:
            width = up[j] - base[j]
            if width < 0:
                lows_m, ups_m = [ZERO] * n, [ZERO] * n
                lows_m[j] = ups_m[j] = ONE
                return certificate([ZERO] * m_rows, lows_m, ups_m)
            G.append({j: -ONE})
            h.append(-width)
            origin.append(("up", j))

    M = len(G)
    signs = [1 if hi > 0 else -1 for hi in h]
    art_rows = [i for i in range(M) if signs[i] > 0]
    art_col = {i: nx + M + k for k, i in enumerate(art_rows)}
    ncols = nx + M + len(art_rows)
    T = []
    b = []
    basis = []
    for i in range(M):
        row = [QZERO] * ncols
        s = signs[i]
        for j, c in G[i].items():
            row[j] = _q(c * s)
            if j in neg_col:
                row[neg_col[j]] = _q(-c * s)
        row[nx + i] = mpq(-s)
        if s > 0:
            row[art_col[i]] = QONE
            basis.append(art_col[i])
        else:
            basis.append(nx + i)
        T.append(row)
        b.append(_q(h[i] * s))
    tab = _Tableau(T, b, basis)
    identity_col = [art_col.get(i, nx + i) for i in range(M)]

    if art_rows:
        phase1 = [QZERO] * ncols
        for c in art_col.values():
            phase1[c] = QONE
        tab.set_costs(phase1)
        tab.run(ncols)
        if -tab.negz > 0:
            y = [_frac(phase1[identity_col[i]] - tab.d[identity_col[i]]) for i in range(M)]
            mu = [signs[i] * y[i] for i in range(M)]
            rows_m, lows_m, ups_m = [ZERO] * m_rows, [ZERO] * n, [ZERO] * n
            combo = [ZERO] * n
            for i in range(M):
                if mu[i]:
                    for j, c in G[i].items():
                        combo[j] += mu[i] * c
                kind, idx = origin[i]
                if kind == "row":
                    rows_m[idx] = mu[i]
                else:
                    ups_m[idx] = mu[i]
            for j in range(n):
                lows_m[j] = -combo[j]
            return certificate(rows_m, lows_m, ups_m)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        limit = nx + M
        r = 0
        while r < len(tab.basis):
            if tab.basis[r] >= limit:
                col = next((j for j in range(limit) if tab.T[r][j] != 0), None)
                if col is None:
                    del tab.T[r], tab.b[r], tab.basis[r]
                    continue
                tab.pivot(r, col)
            r += 1

    allowed = nx + M
    if cost is None:
        status, value = Status.FEASIBLE, None
    else:
        full = [QZERO] * ncols
        for j in range(n):
            full[j] = _q(cost[j])
            if j in neg_col:
                full[neg_col[j]] = _q(-cost[j])
        tab.set_costs(full)
        if not tab.run(allowed):
            status, value = Status.UNBOUNDED, None
        else:
            status = Status.OPTIMAL
            value = None
    xprime = [ZERO] * nx
    for r, bv in enumerate(tab.basis):
        if bv < nx:
            xprime[bv] = _frac(tab.b[r])
    x = tuple(base[j] + xprime[j] - (xprime[neg_col[j]] if j in neg_col else ZERO) for j in range(n))
    if not check_witness(p, x):
        raise VerificationError("LP witness failed re-verification")
    if status is Status.OPTIMAL:
        value = sum((cost[j] * x[j] for j in range(n)), ZERO)
    return LpOutcome(status, witness=x, value=value)


def lp_feasible(p: LpProblem) -> LpOutcome:
    """Exact feasibility verdict with witness point or Farkas certificate."""
    return _solve(p, None)


def lp_optimize(p: LpProblem, direction: str = "max") -> LpOutcome:
    """Optimise ``p.objective``; ``value`` is reported in the caller's sense."""
    if p.objective is None:
        raise ValueError("problem has no objective")
    if direction not in ("max", "min"):
        raise ValueError("direction must be 'max' or 'min'")
    cost = [ZERO] * p.nvars
    for j, c in p.objective:
        cost[j - 1] = -c if direction == "max" else c
    out = _solve(p, cost)
    if out.status is Status.OPTIMAL and direction == "max":
        return LpOutcome(out.status, out.witness, out.certificate, -out.value)
    return out


def relaxation_feasible(system: BinarySystem, fixings=None, extra_rows: Iterable[LinIneq] = ()) -> bool:
    """Shorthand: is ``S_LP`` with the given 0-1 fixings feasible?"""
    return lp_feasible(LpProblem.relaxation(system, fixings, extra_rows=extra_rows)).feasible
