"""Plain-text model files.

A model is a ``vars <n>`` line, any number of constraint lines such as
``2 x1 + 4 x2 >= 1`` or ``x1 - x4 = 0`` (senses ``<=``, ``>=``, ``=``), and at
most one objective line ``max 3 x2 - 1 x1`` or ``min ...``.  ``#`` starts a
comment.  Coefficients are integers or ``p/q``; both sides of a constraint
may hold terms and constants.  Equalities become two ``>=`` rows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .model import BinarySystem, LinIneq, fmt_rat

_TOKEN = re.compile(r"\s*(?:(?P<num>[0-9][0-9./]*)|(?P<var>x[0-9]+)|(?P<sense><=|>=|=)|(?P<op>[+\-*]))")
_RATIONAL = re.compile(r"[0-9]+(?:/[0-9]+)?")


class ModelParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message, self.line, self.column = message, line, column


@dataclass(frozen=True)
class Model:
    system: BinarySystem
    objective: dict[int, Fraction] | None = None
    direction: str | None = None  # "max" | "min"

    def text(self) -> str:
        return format_model(self.system, self.objective, self.direction)


def _tokens(body: str, line: int, offset: int):
    pos = 0
    while pos < len(body):
        if body[pos:].strip() == "":
            break
        m = _TOKEN.match(body, pos)
        if not m or m.end() == pos:
            col = offset + pos + len(body[pos:]) - len(body[pos:].lstrip()) + 1
            raise ModelParseError(f"unexpected character {body[col - offset - 1]!r}", line, col)
        kind = m.lastgroup
        col = offset + m.start(kind) + 1
        yield kind, m.group(kind), col
        pos = m.end()


def _rational(tok: str, line: int, col: int) -> Fraction:
    if not _RATIONAL.fullmatch(tok):
        raise ModelParseError(f"malformed rational {tok!r}", line, col)
    num, _, den = tok.partition("/")
    if den and int(den) == 0:
        raise ModelParseError(f"zero denominator in {tok!r}", line, col)
    return Fraction(int(num), int(den) if den else 1)


def _expression(toks: list, line: int, n: int, end_col: int) -> tuple[dict[int, Fraction], Fraction]:
    """Parse ``[sign] term (sign term)*``; returns (coefficients, constant)."""
    coeffs: dict[int, Fraction] = {}
    const = Fraction(0)
    i = 0
    if not toks:
        raise ModelParseError("expected an expression", line, end_col)
    first = True
    while i < len(toks):
        sign = 1
        kind, val, col = toks[i]
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            raise ModelParseError(f"expected '+' or '-' before {val!r}", line, col)
        first = False
        if i >= len(toks):
            raise ModelParseError("expression ends after a sign", line, end_col)
        kind, val, col = toks[i]
        coef = Fraction(1)
        if kind == "num":
            coef = _rational(val, line, col)
            i += 1
            if i < len(toks) and toks[i][0] == "op" and toks[i][1] == "*":
                i += 1
                if i >= len(toks) or toks[i][0] != "var":
                    raise ModelParseError("expected a variable after '*'", line, toks[i - 1][2])
            if i >= len(toks) or toks[i][0] != "var":
                const += sign * coef
                continue
            kind, val, col = toks[i]
        if kind != "var":
            raise ModelParseError(f"unexpected {val!r}", line, col)
        j = int(val[1:])
        if j < 1 or j > n:
            raise ModelParseError(f"variable {val} outside x1..x{n}", line, col)
        coeffs[j] = coeffs.get(j, Fraction(0)) + sign * coef
        i += 1
    return coeffs, const


def parse_model(text: str) -> Model:
    n: int | None = None
    rows: list[LinIneq] = []
    objective = direction = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        offset = len(body) - len(body.lstrip())
        word, _, rest = stripped.partition(" ")
        rest_offset = offset + len(word) + (len(stripped) - len(word) - len(rest))
        if word == "vars":
            if n is not None:
                raise ModelParseError("second 'vars' declaration", lineno, offset + 1)
            if not re.fullmatch(r"[0-9]+", rest.strip()):
                raise ModelParseError(f"'vars' needs a nonnegative integer, got {rest.strip()!r}",
                                      lineno, rest_offset + 1)
            n = int(rest)
            continue
        if n is None:
            raise ModelParseError("the model must start with 'vars <n>'", lineno, offset + 1)
        if word in ("max", "min"):
            if objective is not None:
                raise ModelParseError("second objective line", lineno, offset + 1)
            toks = list(_tokens(rest, lineno, rest_offset))
            if any(k == "sense" for k, _, _ in toks):
                raise ModelParseError("objective lines take no sense", lineno, offset + 1)
            coeffs, const = _expression(toks, lineno, n, len(raw) + 1)
            if const:
                raise ModelParseError("constant term in objective", lineno, offset + 1)
            objective, direction = {j: c for j, c in coeffs.items() if c}, word
            continue
        toks = list(_tokens(body, lineno, 0))
        senses = [i for i, (k, _, _) in enumerate(toks) if k == "sense"]
        if len(senses) != 1:
            col = toks[senses[1]][2] if len(senses) > 1 else offset + 1
            raise ModelParseError("a constraint needs exactly one of <=, >=, =", lineno, col)
        s = senses[0]
        left, lc = _expression(toks[:s], lineno, n, toks[s][2])
        right, rc = _expression(toks[s + 1:], lineno, n, len(raw) + 1)
        diff = dict(left)
        for j, c in right.items():
            diff[j] = diff.get(j, Fraction(0)) - c
        rhs = rc - lc
        sense = toks[s][1]
        if sense in (">=", "="):
            rows.append(LinIneq.make(diff, rhs))
        if sense in ("<=", "="):
            rows.append(LinIneq.leq(diff, rhs))
    if n is None:
        raise ModelParseError("missing 'vars <n>' declaration", 1, 1)
    return Model(BinarySystem(n, tuple(rows)), objective, direction)


def _expr_text(coeffs: dict[int, Fraction]) -> str:
    return LinIneq.make(coeffs, 0).text().rsplit(" >= ", 1)[0]


def format_model(S: BinarySystem, objective=None, direction: str | None = None) -> str:
    """Inverse of :func:`parse_model` up to the equality split."""
    out = S.text()
    if objective:
        out += f"{direction or 'max'} {_expr_text({j: Fraction(c) for j, c in objective.items()})}\n"
    return out


def load_model(path: str) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


__all__ = ["Model", "ModelParseError", "parse_model", "format_model", "load_model", "fmt_rat"]
