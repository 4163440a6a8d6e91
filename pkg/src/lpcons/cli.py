"""``lpcons`` command-line tool.

Exit codes: 0 when the verdict is true or the command succeeded, 1 when the
verdict is false (a witness is reported), 2 on usage or parse errors.
``--format json`` prints one document; every rational in it is a ``"p/q"``
string and the model text is echoed so the report can be replayed.
"""

from __future__ import annotations

import argparse
import enum
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .cuts import InfeasibleRelaxation, LpConsistentAssignment, cg_cut_test, combine, derive_cg_cut
from .liftproject import Mode, fm_project, lift, sequentialize
from .lp import LpProblem, lp_feasible
from .model import BinarySystem, Clause, LinIneq, PartialAssignment, clause_to_inequality
from .modelfile import Model, ModelParseError, format_model, load_model
from .oracle import EnumerationCapExceeded, Property, check
from .resolution import augment_with_closure, clausal_core, full_closure, input_closure
from .search import Prune, Strategy, ValueOrder, branch_and_bound, feasibility_search
from .suites import DEFAULT_SEED, SUITES, run_suite

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class ReportDocument:
    command: list[str]
    data: dict[str, Any] = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)
    exit_code: int = EXIT_TRUE

    def render(self, fmt: str = "text") -> str:
        if fmt == "json":
            doc = {"command": self.command, "exit_code": self.exit_code, **self.data}
            return json.dumps(jsonable(doc), indent=2, ensure_ascii=False) + "\n"
        return "\n".join(self.lines) + "\n"


def rat_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def jsonable(obj: Any) -> Any:
    """Convert model objects to JSON-ready values with exact ``"p/q"`` rationals."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return rat_text(obj)
    if isinstance(obj, LinIneq):
        return {"coeffs": {str(j): rat_text(c) for j, c in obj.coeffs}, "rhs": rat_text(obj.rhs),
                "text": obj.text()}
    if isinstance(obj, Clause):
        return {"literals": list(obj.literals), "text": obj.text()}
    if isinstance(obj, PartialAssignment):
        return {f"x{j}": v for j, v in obj.bindings}
    if isinstance(obj, BinarySystem):
        return {"n": obj.n, "rows": [jsonable(r) for r in obj.rows]}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return str(obj)


def _point_text(x: Sequence) -> str:
    return "(" + ", ".join(str(v) for v in x) + ")"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _indices(raw: str, what: str) -> tuple[int, ...]:
    out = []
    for tok in re.split(r"[\s,]+", raw.strip()):
        if not tok:
            continue
        m = re.fullmatch(r"x?([0-9]+)", tok)
        if not m:
            raise UsageError(f"bad {what} entry {tok!r}; use e.g. '1,2' or 'x1,x2'")
        out.append(int(m.group(1)))
    return tuple(out)


def parse_clause(raw: str, n: int) -> Clause:
    """``"x1 -x3"``, ``"x1, ~x3"`` or ``"x1 ∨ ¬x3"``."""
    lits = []
    for tok in re.split(r"[\s,|∨]+", raw.strip()):
        if not tok:
            continue
        m = re.fullmatch(r"([-~¬!]?)x([0-9]+)", tok)
        if not m:
            raise UsageError(f"bad literal {tok!r}; use x<j> or -x<j>")
        j = int(m.group(2))
        if not 1 <= j <= n:
            raise UsageError(f"literal {tok} outside x1..x{n}")
        lits.append(-j if m.group(1) else j)
    try:
        return Clause.of(*lits)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_assignment(raw: str, n: int) -> PartialAssignment:
    """``"x1=0,x3=1"``."""
    bind: dict[int, int] = {}
    for tok in re.split(r"[\s,]+", raw.strip()):
        if not tok:
            continue
        m = re.fullmatch(r"x([0-9]+)=([01])", tok)
        if not m:
            raise UsageError(f"bad binding {tok!r}; use x<j>=0 or x<j>=1")
        j = int(m.group(1))
        if not 1 <= j <= n:
            raise UsageError(f"x{j} outside x1..x{n}")
        if j in bind:
            raise UsageError(f"x{j} assigned twice")
        bind[j] = int(m.group(2))
    if not bind:
        raise UsageError("empty assignment")
    return PartialAssignment.of(bind)


def parse_property(raw: str) -> tuple[Property, int | None]:
    name, _, k = raw.partition(":")
    try:
        prop = Property(name)
    except ValueError:
        raise UsageError(f"unknown property {name!r}") from None
    if prop.needs_k:
        if not k.isdigit():
            raise UsageError(f"{name} needs ':<k>', e.g. {name}:2")
        return prop, int(k)
    if k:
        raise UsageError(f"{name} takes no k")
    return prop, None


def _model_data(path: str, model: Model) -> dict:
    return {"file": path, "model": model.text(), "system": model.system}


def _certificate_block(S: BinarySystem, cert) -> tuple[dict, list[str]]:
    rows = S.rows_with_box()
    combo = combine(S, cert.multipliers)
    data = {"rows_with_box": list(rows), "multipliers": list(cert.multipliers),
            "combination": combo, "target": cert.target}
    lines = ["multipliers over the rows and the box rows x_j >= 0, -x_j >= -1:"]
    for u, r in zip(cert.multipliers, rows):
        if u:
            lines.append(f"  {u}  *  ({r})")
    lines.append(f"combination: {combo}")
    lines.append(f"rounded up:  {cert.target}")
    return data, lines


# ---- commands ---------------------------------------------------------------

def cmd_check(args, model: Model, rep: ReportDocument) -> int:
    prop, k = parse_property(args.property)
    S = model.system
    if k is not None and not 1 <= k <= max(S.n, 1):
        raise UsageError(f"k must lie in 1..{S.n}")
    r = check(S, prop, k, cap=args.cap)
    rep.data.update(property=r.label(), verdict=r.verdict, witness=r.witness, detail=r.detail)
    rep.lines.append(f"{r.label()}: {'holds' if r.verdict else 'fails'}")
    if r.witness is not None:
        rep.lines.append(f"witness: {r.witness}")
    if r.detail:
        rep.lines.append(f"detail: {r.detail}")
    return EXIT_TRUE if r.verdict else EXIT_FALSE


def _write(path: str | None, S: BinarySystem, model: Model, rep: ReportDocument):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_model(S, model.objective, model.direction))
        rep.data["output"] = path
        rep.lines.append(f"augmented model written to {path}")


def cmd_closure(args, model: Model, rep: ReportDocument) -> int:
    S = model.system
    core = clausal_core(S)
    if args.mode == "full":
        closure, proofs = full_closure(core), None
    else:
        closure, dag = input_closure(core)
        proofs = [{"clause": c, "parents": list(p) if p else None} for c, p in dag.steps]
    T = augment_with_closure(S, closure)
    added = T.rows[len(S.rows):]
    rep.data.update(mode=args.mode, clausal_core=list(core), closure=list(closure),
                    added=list(added), augmented=T)
    if proofs is not None:
        rep.data["proof_steps"] = proofs
    rep.lines.append(f"clausal core ({len(core)}): " + "; ".join(str(c) for c in core))
    rep.lines.append(f"{args.mode} closure ({len(closure)}): " + "; ".join(str(c) for c in closure))
    rep.lines.append(f"added inequalities ({len(added)}):")
    rep.lines += [f"  {r}" for r in added]
    _write(args.output, T, model, rep)
    return EXIT_TRUE


def cmd_cut_test(args, model: Model, rep: ReportDocument) -> int:
    S = model.system
    c = parse_clause(args.clause, S.n)
    rep.data["clause"] = c
    try:
        test = cg_cut_test(S, c)
    except InfeasibleRelaxation as exc:
        rep.data.update(is_cut=False, reason=str(exc))
        rep.lines.append(f"{c}: not decided; {exc}")
        return EXIT_FALSE
    rep.data.update(is_cut=test.certificate is not None, reason=test.reason, best_rhs=test.best_rhs)
    if test.certificate is None:
        rep.lines.append(f"{c}: not a rank-1 C-G cut ({test.reason})")
        if test.best_rhs is not None:
            rep.lines.append(f"best surrogate rhs: {test.best_rhs}")
        return EXIT_FALSE
    block, lines = _certificate_block(S, test.certificate)
    rep.data["certificate"] = block
    rep.lines.append(f"{c}: C-G cut")
    rep.lines += lines
    return EXIT_TRUE


def cmd_cut_derive(args, model: Model, rep: ReportDocument) -> int:
    S = model.system
    a = parse_assignment(args.assign, S.n)
    rep.data["assignment"] = a
    try:
        clause, trace, cert = derive_cg_cut(S, a)
    except InfeasibleRelaxation as exc:
        rep.data.update(derived=False, reason=str(exc))
        rep.lines.append(f"{a}: not separated; {exc}")
        return EXIT_FALSE
    except LpConsistentAssignment:
        out = lp_feasible(LpProblem.relaxation(S, a))
        rep.data.update(derived=False, reason="LP-consistent assignment", lp_point=list(out.witness))
        rep.lines.append(f"{a} is LP-consistent; no cut separates it")
        rep.lines.append(f"witness LP point: {_point_text(out.witness)}")
        return EXIT_FALSE
    block, lines = _certificate_block(S, cert)
    rep.data.update(derived=True, clause=clause, surrogate=trace.surrogate, pi=trace.pi,
                    bound_rows_added=list(trace.chosen_subset), certificate=block)
    rep.lines.append(f"{a} is LP-infeasible; derived cut {clause}  ({clause_to_inequality(clause)})")
    rep.lines.append(f"surrogate: {trace.surrogate}  (pi = {trace.pi})")
    if trace.chosen_subset:
        rep.lines.append("bound rows added for: " + ", ".join(f"x{j}" for j in trace.chosen_subset))
    rep.lines += lines
    return EXIT_TRUE


def cmd_lnp(args, model: Model, rep: ReportDocument) -> int:
    S = model.system
    k = args.k
    if not 1 <= k <= S.n:
        raise UsageError(f"--k must lie in 1..{S.n}")
    mode = Mode(args.mode)
    L = lift(S, k)
    keep = range(1, k) if mode is Mode.PAPER else range(1, S.n + 1)
    P = fm_project(L, keep, prune_redundant=True, assume_box=True)
    T = sequentialize(S, k, mode)
    after = check(T, Property.SEQUENTIAL_LP_K, k, cap=args.cap)
    names = L.names()
    rep.data.update(k=k, mode=mode, lifted_rows=[r.text(names) for r in L.rows],
                    projection=list(P.rows), projection_verified=P.verify(),
                    added=list(T.rows[len(S.rows):]), augmented=T,
                    sequential_lp_k_after=after.verdict)
    rep.lines.append(f"lifted system R_{k} ({len(L.rows)} rows, variables {', '.join(names.values())}):")
    rep.lines += [f"  {r.text(names)}" for r in L.rows]
    target = "x" + ", x".join(map(str, keep)) if keep else "no variables"
    rep.lines.append(f"projection onto {target} ({len(P.rows)} rows, provenance verified: {P.verify()}):")
    rep.lines += [f"  {r}" for r in P.rows]
    rep.lines.append("rows added to S: " + ("; ".join(str(r) for r in T.rows[len(S.rows):]) or "none"))
    rep.lines.append(f"seq-lp-k:{k} after augmentation: {'holds' if after.verdict else 'fails'}")
    if not after.verdict:
        rep.data["witness"] = after.witness
        rep.lines.append(f"witness: {after.witness}")
    _write(args.output, T, model, rep)
    return EXIT_TRUE if after.verdict else EXIT_FALSE


def _strategy(args, n: int, default_prune: Prune) -> Strategy:
    order = _indices(args.order, "order") if getattr(args, "order", None) else None
    prune = Prune(args.prune) if args.prune else default_prune
    try:
        strat = Strategy(order, prune, ValueOrder(args.value_order))
        strat.resolved_order(n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return strat


def _log(trace, rep: ReportDocument):
    rep.data["log"] = [{"depth": e.depth, "assignment": e.assignment, "event": e.event, "value": e.value}
                       for e in trace.log]
    rep.lines.append("log:")
    for e in trace.log:
        val = f"  value {e.value}" if e.value is not None else ""
        rep.lines.append(f"  {'  ' * e.depth}{e.assignment}: {e.event}{val}")


def cmd_search(args, model: Model, rep: ReportDocument) -> int:
    S = model.system
    strat = _strategy(args, S.n, Prune.LP)
    t = feasibility_search(S, strat)
    rep.data.update(order=list(strat.resolved_order(S.n)), prune=strat.prune, value_order=strat.value_order,
                    nodes=t.nodes, backtracks=t.backtracks, solution=t.solution)
    rep.lines.append(f"nodes: {t.nodes}  backtracks: {t.backtracks}")
    rep.lines.append(f"solution: {_point_text(t.solution) if t.solution else 'none (infeasible)'}")
    _log(t, rep)
    return EXIT_TRUE if t.solution is not None else EXIT_FALSE


def cmd_bnb(args, model: Model, rep: ReportDocument) -> int:
    S = model.system
    if not model.objective and model.direction is None:
        raise UsageError("bnb needs an objective line ('max ...' or 'min ...') in the model")
    cuts = _indices(args.root_cuts, "root-cuts") if args.root_cuts else ()
    if any(not 1 <= j <= S.n for j in cuts):
        raise UsageError(f"--root-cuts entries must lie in 1..{S.n}")
    strat = _strategy(args, S.n, Prune.NONE)
    t = branch_and_bound(S, model.objective or {}, model.direction, cuts, strat)
    rep.data.update(objective=model.objective, direction=model.direction, root_cuts=list(cuts),
                    prune=strat.prune, value_order=strat.value_order, cuts=list(t.cuts),
                    nodes=t.nodes, backtracks=t.backtracks, solution=t.solution, value=t.objective_value)
    if t.cuts:
        rep.lines.append("root cuts: " + "; ".join(str(c) for c in t.cuts))
    rep.lines.append(f"nodes: {t.nodes}  backtracks: {t.backtracks}")
    if t.solution is None:
        rep.lines.append("optimum: none (infeasible)")
    else:
        rep.lines.append(f"optimum: {_point_text(t.solution)}  value {t.objective_value}")
    _log(t, rep)
    return EXIT_TRUE if t.solution is not None else EXIT_FALSE


def cmd_verify(args, rep: ReportDocument) -> int:
    if args.seeds is not None and args.seeds < 1:
        raise UsageError("--seeds must be positive")
    r = run_suite(args.suite, args.seeds, args.seed)
    rep.data.update(suite=args.suite, seed=args.seed, checked=r.checked, applicable=r.applicable,
                    ok=r.ok, violations=r.violations, notes=r.notes)
    rep.lines.append(r.summary())
    rep.lines += [f"  violation: {v}" for v in r.violations]
    return EXIT_TRUE if r.ok else EXIT_FALSE


# ---- wiring -----------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help=f"seed for randomized suites (default {DEFAULT_SEED})")
    common.add_argument("--cap", type=int, default=argparse.SUPPRESS,
                        help="enumeration cap on n (default: $LPCONS_ENUM_CAP or 22)")

    p = _Parser(prog="lpcons", parents=[common],
                description="Consistency analysis of 0-1 linear systems with exact arithmetic.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, help_, with_file=True):
        sp = sub.add_parser(name, help=help_, parents=[common])
        if with_file:
            sp.add_argument("file")
        return sp

    sp = add("check", "check a consistency property")
    sp.add_argument("--property", required=True,
                    help="consistent | domain | k:<k> | strong-k:<k> | seq-k:<k> | lp | seq-lp-k:<k>")
    sp = add("closure", "resolution closure of the clausal core")
    sp.add_argument("--mode", choices=("full", "input"), default="full")
    sp.add_argument("--output", help="write the augmented model here")
    sp = add("cut-test", "decide whether a clause is a rank-1 C-G cut")
    sp.add_argument("--clause", required=True, help='literals, e.g. "x1 -x3"')
    sp = add("cut-derive", "derive a C-G cut refuting an LP-infeasible assignment")
    sp.add_argument("--assign", required=True, help='e.g. "x1=0,x3=0"')
    sp = add("lnp", "lift-and-project for sequential LP k-consistency")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.PAPER.value)
    sp.add_argument("--output", help="write the augmented model here")
    for name, help_, prunes in (("search", "depth-first feasibility search", ("none", "rows", "lp")),
                                ("bnb", "LP branch and bound on the model's objective", ("none", "rows", "lp"))):
        sp = add(name, help_)
        sp.add_argument("--prune", choices=prunes)
        sp.add_argument("--value-order", choices=[v.value for v in ValueOrder], default=ValueOrder.ZERO_FIRST.value)
        if name == "search":
            sp.add_argument("--order", help="branching order, e.g. 2,1,3")
        else:
            sp.add_argument("--root-cuts", help="variables whose disjunctive cuts are added at the root, e.g. 1,2")
    sp = add("verify", "run a seeded property suite", with_file=False)
    sp.add_argument("--suite", required=True, choices=list(SUITES))
    sp.add_argument("--seeds", type=int, help="number of seeded instances")
    return p


_COMMANDS = {"check": cmd_check, "closure": cmd_closure, "cut-test": cmd_cut_test,
             "cut-derive": cmd_cut_derive, "lnp": cmd_lnp, "search": cmd_search, "bnb": cmd_bnb}


def run_command(argv: Sequence[str]) -> tuple[int, ReportDocument]:
    """Run one command; returns the exit code and the report (not yet printed)."""
    argv = list(argv)
    rep = ReportDocument(argv)
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        rep.data["error"] = str(exc)
        rep.lines.append(str(exc))
        rep.exit_code = EXIT_USAGE
        return EXIT_USAGE, rep
    except SystemExit as exc:  # --help
        rep.exit_code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return rep.exit_code, rep
    args.format = getattr(args, "format", "text")
    args.seed = getattr(args, "seed", DEFAULT_SEED)
    args.cap = getattr(args, "cap", None)
    rep.data["format"] = args.format
    try:
        if args.cmd == "verify":
            code = cmd_verify(args, rep)
        else:
            model = load_model(args.file)
            rep.data.update(_model_data(args.file, model))
            code = _COMMANDS[args.cmd](args, model, rep)
    except (UsageError, ModelParseError, EnumerationCapExceeded, OSError) as exc:
        msg = f"{getattr(args, 'file', '')}: {exc}" if isinstance(exc, ModelParseError) else str(exc)
        rep.data["error"] = msg
        rep.lines.append(f"error: {msg}")
        code = EXIT_USAGE
    rep.exit_code = code
    return code, rep


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, rep = run_command(argv)
    fmt = rep.data.get("format", "json" if "json" in argv and "--format" in argv else "text")
    if rep.lines or rep.data:
        stream = sys.stderr if code == EXIT_USAGE and fmt == "text" else sys.stdout
        stream.write(rep.render(fmt))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
