"""Lift-and-project: linearized products with x_k and 1 - x_k, then projection.

``lift`` multiplies every row of ``S_LP`` (box rows included) by ``x_k`` and by
``1 - x_k``, replacing ``x_k^2`` with ``x_k`` and ``x_i x_k`` with an auxiliary
variable ``y_{i,k}``.  ``fm_project`` eliminates variables by Fourier-Motzkin.

Elimination keeps, at every step, only rows whose support (the set of input
rows with a positive multiplier) is minimal in the pool.  Extreme rays of the
projection cone have minimal support and every extreme ray after eliminating
t variables combines two extreme rays from step t-1, so the pruning loses
nothing; a support larger than t + 1 can never be minimal.  When pruning is
enabled and the pool grows past ``REBASE_AT`` rows, LP-redundant rows are
removed and the surviving rows become the new base for support tracking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lp import LpProblem, Status, lp_feasible, lp_optimize
from .model import BinarySystem, LinIneq

ZERO = Fraction(0)
DEFAULT_ROW_LIMIT = 5000
REBASE_AT = 40


class ProjectionBlowup(RuntimeError):
    """Intermediate row pool exceeded the configured limit."""


class Mode(enum.Enum):
    PAPER = "paper"  # keep x_1 .. x_{k-1}
    AUX_ONLY = "aux-only"  # keep every x variable, drop only the y's


@dataclass(frozen=True)
class LiftedSystem:
    x_count: int
    k: int
    aux: tuple[frozenset, ...]  # aux[p] = {i, k}; its variable index is x_count + 1 + p
    rows: tuple[LinIneq, ...]
    origin: tuple[tuple[int, str], ...]  # (index into S.rows_with_box(), "x" | "1-x")

    @property
    def nvars(self) -> int:
        return self.x_count + len(self.aux)

    def aux_index(self, i: int) -> int:
        return self.x_count + 1 + self.aux.index(frozenset((i, self.k)))

    def names(self) -> dict[int, str]:
        out = {j: f"x{j}" for j in range(1, self.x_count + 1)}
        for p, pair in enumerate(self.aux):
            i, j = sorted(pair)
            out[self.x_count + 1 + p] = f"y{i}_{j}"
        return out

    def lift_point(self, x: Sequence) -> tuple:
        """Extend an x-point with ``y_{i,k} = x_i x_k``."""
        xk = x[self.k - 1]
        ys = []
        for pair in self.aux:
            (i,) = pair - {self.k}
            ys.append(x[i - 1] * xk)
        return tuple(x) + tuple(ys)

    def text(self) -> str:
        names = self.names()
        return "\n".join(r.text(names) for r in self.rows)


def lift(S: BinarySystem, k: int) -> LiftedSystem:
    if not 1 <= k <= S.n:
        raise ValueError(f"lift variable x{k} outside 1..{S.n}")
    n = S.n
    others = [i for i in range(1, n + 1) if i != k]
    aux = tuple(frozenset((i, k)) for i in others)
    y = {i: n + 1 + p for p, i in enumerate(others)}
    rows, origin = [], []
    for idx, r in enumerate(S.rows_with_box()):
        c, b = r.coef, r.rhs
        ck = c.get(k, ZERO)
        # (a x - b) x_k >= 0
        times = {y[i]: v for i, v in c.items() if i != k}
        times[k] = ck - b
        rows.append(LinIneq.make(times, 0))
        origin.append((idx, "x"))
        # (a x - b)(1 - x_k) >= 0
        comp = {i: v for i, v in c.items() if i != k}
        comp.update({y[i]: -v for i, v in c.items() if i != k})
        comp[k] = b
        rows.append(LinIneq.make(comp, b))
        origin.append((idx, "1-x"))
    return LiftedSystem(n, k, aux, tuple(rows), tuple(origin))


@dataclass(frozen=True)
class ProjectedSystem:
    keep: tuple[int, ...]
    rows: tuple[LinIneq, ...]
    provenance: tuple[tuple[tuple[int, Fraction], ...], ...]  # per row: (input row, multiplier)
    source: tuple[LinIneq, ...]

    @property
    def infeasible(self) -> bool:
        return any(not r.coeffs and r.rhs > 0 for r in self.rows)

    def verify(self) -> bool:
        """Each row is dominated by its recorded combination of source rows."""
        for row, trail in zip(self.rows, self.provenance):
            coeffs: dict[int, Fraction] = {}
            rhs = ZERO
            for i, m in trail:
                if m < 0:
                    return False
                for j, c in self.source[i].coeffs:
                    coeffs[j] = coeffs.get(j, ZERO) + m * c
                rhs += m * self.source[i].rhs
            combo = LinIneq.make(coeffs, rhs)
            if any(j not in self.keep for j in combo.variables):
                return False
            # same normal, and the stored rhs is no stronger than the combination's
            if not combo.coeffs and not row.coeffs:
                if row.rhs > 0 and not combo.rhs > 0:
                    return False
                continue
            if combo.normalized().coeffs != row.normalized().coeffs:
                return False
            scale = row.coeffs[0][1] / combo.coeffs[0][1]
            if scale <= 0 or row.rhs > combo.rhs * scale:
                return False
        return True

    def as_system(self, n: int) -> BinarySystem:
        return BinarySystem(n, self.rows)


def _variables(rows: Iterable[LinIneq]) -> set[int]:
    out: set[int] = set()
    for r in rows:
        out |= r.variables
    return out


def _minimal_support(pool: list[tuple]) -> list[tuple]:
    pool = sorted(pool, key=lambda e: len(e[3]))
    kept: list[tuple] = []
    for e in pool:
        if any(k[3] <= e[3] for k in kept):
            continue
        kept.append(e)
    return kept


def _drop_constant(pool: list[tuple]) -> list[tuple]:
    """Constant rows never combine: drop true ones, collapse to a false one."""
    for e in pool:
        if not e[0] and e[1] > 0:
            return [e]
    return [e for e in pool if e[0]]


def _canonical(rows: list[tuple[LinIneq, dict]]) -> list[tuple[LinIneq, dict]]:
    """Normalize, drop trivial rows, keep the strongest of identical normals."""
    best: dict[tuple, tuple[LinIneq, dict]] = {}
    for r, trail in rows:
        r = r.normalized()
        if not r.coeffs:
            if r.rhs > 0:
                return [(r, trail)]
            continue
        cur = best.get(r.coeffs)
        if cur is None or r.rhs > cur[0].rhs:
            best[r.coeffs] = (r, trail)
    return sorted(best.values(), key=lambda e: (len(e[0].coeffs), e[0].coeffs, e[0].rhs))


def _implied(target: LinIneq, rows: list[LinIneq], vs: list[int], boxed: frozenset) -> bool:
    if not rows and not boxed:
        return False
    idx = {j: p + 1 for p, j in enumerate(vs)}

    def remap(r: LinIneq) -> LinIneq:
        return LinIneq.make({idx[j]: c for j, c in r.coeffs}, r.rhs)

    lower = [0 if j in boxed else None for j in vs]
    upper = [1 if j in boxed else None for j in vs]
    p = LpProblem.build([remap(r) for r in rows], len(vs), lower=lower, upper=upper,
                        objective=remap(target).coef)
    out = lp_optimize(p, "min")
    return out.status is Status.INFEASIBLE or (out.status is Status.OPTIMAL and out.value >= target.rhs)


def _lp_prune(rows: list[tuple[LinIneq, dict]], boxed: frozenset) -> list[tuple[LinIneq, dict]]:
    """Drop rows implied by the others (exact LPs).

    A forward pass admits a row only when the rows admitted so far do not
    imply it; a backward pass then removes rows made redundant by later ones.
    Every LP may assume ``0 <= z_j <= 1`` for ``j`` in ``boxed``.
    """
    if not rows or not rows[0][0].coeffs:
        return rows
    vs = sorted(_variables(r for r, _ in rows))
    kept: list[tuple[LinIneq, dict]] = []
    for e in rows:
        if not _implied(e[0], [r for r, _ in kept], vs, boxed):
            kept.append(e)
    i = len(kept) - 1
    while i >= 0:
        others = [r for p, (r, _) in enumerate(kept) if p != i]
        if _implied(kept[i][0], others, vs, boxed):
            del kept[i]
        i -= 1
    return kept


def fm_project(L, keep: Iterable[int], prune_redundant: bool = False,
               max_rows: int = DEFAULT_ROW_LIMIT, assume_box: bool = False) -> ProjectedSystem:
    """Exact projection of ``{z : rows}`` onto the variables in ``keep``.

    ``L`` is anything with a ``rows`` attribute (a lifted or projected system,
    or a ``BinarySystem``; box rows are not added implicitly).  With
    ``assume_box`` the redundancy pruning may rely on ``0 <= x_j <= 1``, so
    the result describes the projection only together with the box.
    """
    source = tuple(L.rows)
    keep = tuple(sorted(set(keep)))
    present = _variables(source)
    aux_floor = getattr(L, "x_count", None)
    # entries: (coeffs, rhs, trail over source rows, support over the current base)
    pool = [(dict(r.coef), r.rhs, {i: Fraction(1)}, frozenset((i,))) for i, r in enumerate(source)]
    todo = present - set(keep)
    # the box may stand in for rows only on variables that survive the projection
    boxed = frozenset(keep) if assume_box else frozenset()
    eliminated = 0
    while todo:
        def occurrences(v):
            return sum(1 for e in pool if v in e[0])
        aux_left = [v for v in todo if aux_floor is not None and v > aux_floor]
        cands = aux_left or list(todo)
        v = min(cands, key=lambda u: (occurrences(u), u))
        todo.discard(v)
        eliminated += 1
        pos = [e for e in pool if e[0].get(v, ZERO) > 0]
        neg = [e for e in pool if e[0].get(v, ZERO) < 0]
        nxt = [e for e in pool if v not in e[0]]
        for pc, pr, pt, ps in pos:
            for nc, nr, nt, ns in neg:
                support = ps | ns
                if len(support) > eliminated + 1:
                    continue
                a, b = -nc[v], pc[v]
                coeffs = {}
                for j in pc.keys() | nc.keys():
                    if j == v:
                        continue
                    c = a * pc.get(j, ZERO) + b * nc.get(j, ZERO)
                    if c:
                        coeffs[j] = c
                trail = {i: a * pt.get(i, ZERO) + b * nt.get(i, ZERO) for i in pt.keys() | nt.keys()}
                nxt.append((coeffs, a * pr + b * nr, trail, support))
        pool = _minimal_support(_drop_constant(nxt))
        if prune_redundant and len(pool) > REBASE_AT and todo:
            # LP-prune and restart the support bookkeeping on the smaller pool
            pairs = _lp_prune([(LinIneq.make(e[0], e[1]), e) for e in pool], boxed)
            pool = [(c, r, t, frozenset((p,))) for p, (_, (c, r, t, _)) in enumerate(pairs)]
            eliminated = 0
        if len(pool) > max_rows:
            raise ProjectionBlowup(f"{len(pool)} rows after eliminating x{v} (limit {max_rows})")
    rows = _canonical([(LinIneq.make(e[0], e[1]), e[2]) for e in pool])
    if prune_redundant:
        rows = _lp_prune(rows, boxed)
    return ProjectedSystem(
        keep,
        tuple(r for r, _ in rows),
        tuple(tuple(sorted(t.items())) for _, t in rows),
        source,
    )


def _box_implied(r: LinIneq) -> bool:
    return r.min_over_box() >= r.rhs


def sequentialize(S: BinarySystem, k: int, mode: Mode = Mode.PAPER, prune_redundant: bool = True) -> BinarySystem:
    """Augment ``S`` with the projection of ``R_k(S_LP)``."""
    L = lift(S, k)
    keep = range(1, k) if mode is Mode.PAPER else range(1, S.n + 1)
    P = fm_project(L, keep, prune_redundant=prune_redundant, assume_box=True)
    have = {r.normalized() for r in S.rows}
    extra = [r for r in P.rows if r not in have and not _box_implied(r)]
    return S.with_rows(extra)


def sequentialize_all(S: BinarySystem, ks: Iterable[int] | None = None, mode: Mode = Mode.PAPER) -> BinarySystem:
    """Apply ``sequentialize`` for each k in turn, feeding the augmented system forward.

    The default order is k = n, ..., 1.  Rows added for k' leave the LP
    verdict of every assignment that fixes x_1..x_{k'} unchanged, so levels
    above k' survive; the ascending order can break a lower level.
    """
    for k in (range(S.n, 0, -1) if ks is None else ks):
        S = sequentialize(S, k, mode)
    return S


def hull_rows(S: BinarySystem, k: int, prune_redundant: bool = True) -> tuple[LinIneq, ...]:
    """Rows describing the hull of ``S_LP`` with ``x_k = 0`` and with ``x_k = 1``."""
    return fm_project(lift(S, k), range(1, S.n + 1), prune_redundant=prune_redundant, assume_box=True).rows


def disjunctive_cuts(S: BinarySystem, k: int, target: Sequence) -> list[LinIneq]:
    """Hull rows for the ``x_k`` disjunction that ``target`` violates."""
    if len(target) != S.n:
        raise ValueError("target dimension does not match the system")
    return [r for r in hull_rows(S, k) if not r.satisfied_by(target)]


def integer_hull(S: BinarySystem) -> BinarySystem:
    """Sequential convexification over x_1..x_n; its LP is the integer hull."""
    return sequentialize_all(S, mode=Mode.AUX_ONLY)


def lp_projection_contains(S: BinarySystem, keep: Sequence[int], point: Sequence) -> bool:
    """Does ``point`` (over ``keep``) extend to a point of ``S_LP``?  Independent LP oracle."""
    fix = [LinIneq.make({j: 1}, v) for j, v in zip(keep, point)]
    fix += [LinIneq.make({j: -1}, -v) for j, v in zip(keep, point)]
    return lp_feasible(LpProblem.relaxation(S, extra_rows=fix)).feasible


__all__ = [
    "LiftedSystem", "ProjectedSystem", "ProjectionBlowup", "Mode", "lift", "fm_project",
    "sequentialize", "sequentialize_all", "hull_rows", "disjunctive_cuts", "integer_hull",
    "lp_projection_contains",
]
