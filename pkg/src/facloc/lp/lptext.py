"""CPLEX-style LP text export and a parser for the subset we emit.

The output reads into external solvers (CPLEX, Gurobi, HiGHS, GLPK with
``--lp``) so programs too large for the dense solver can be solved elsewhere.
"""

from __future__ import annotations

import math
import re

import numpy as np

from facloc.errors import ParseError
from facloc.lp.model import LpModel

#: Long expressions are wrapped; CPLEX rejects lines over 510 characters.
LINE_WIDTH = 200

_SENSE_IN = {"<=": "<=", "=<": "<=", "<": "<=", ">=": ">=", "=>": ">=", ">": ">=", "=": "="}


def _num(v: float) -> str:
    return repr(float(v))


def _expr(coefs: np.ndarray, names: tuple[str, ...], every: bool = False) -> list[str]:
    terms = []
    for k in range(len(coefs)) if every else np.nonzero(coefs)[0]:
        v = float(coefs[k])
        sign = "-" if math.copysign(1.0, v) < 0 else "+"
        terms.append(f"{sign} {_num(abs(v))} {names[k]}")
    if not terms:
        terms.append(f"0 {names[0]}")
    elif terms[0].startswith("+ "):
        terms[0] = terms[0][2:]
    return terms


def _wrap(head: str, terms: list[str], tail: str = "") -> list[str]:
    lines = []
    cur = head
    for t in terms + ([tail] if tail else []):
        if len(cur) + 1 + len(t) > LINE_WIDTH and cur.strip():
            lines.append(cur)
            cur = "   "
        cur = f"{cur} {t}"
    lines.append(cur)
    return lines


def export_lp_text(model: LpModel) -> str:
    """Render ``model`` in LP file format.

    Bounds are only written when they differ from the default ``[0, inf)``.
    """
    names = model.var_names
    out = ["Maximize" if model.maximize else "Minimize"]
    # zero terms keep every variable declared, in order, for the parser
    out += _wrap(" obj:", _expr(model.objective, names, every=True))
    out.append("Subject To")
    for r in range(model.num_rows):
        out += _wrap(f" {model.row_names[r]}:", _expr(model.A[r], names), f"{model.senses[r]} {_num(model.rhs[r])}")
    bounds = []
    for k, (lo, hi) in enumerate(zip(model.lower, model.upper)):
        if lo == 0.0 and hi == math.inf:
            continue
        if lo == -math.inf and hi == math.inf:
            bounds.append(f" {names[k]} free")
        elif lo == -math.inf:
            bounds.append(f" -inf <= {names[k]} <= {_num(hi)}")
        elif hi == math.inf:
            bounds.append(f" {names[k]} >= {_num(lo)}")
        else:
            bounds.append(f" {_num(lo)} <= {names[k]} <= {_num(hi)}")
    if bounds:
        out.append("Bounds")
        out += bounds
    out.append("End")
    return "\n".join(out) + "\n"


_SECTIONS = {
    "maximize": "obj",
    "maximum": "obj",
    "max": "obj",
    "minimize": "obj",
    "minimum": "obj",
    "min": "obj",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "end": "end",
}
_TERM = re.compile(r"([+-]?)\s*([0-9.eE+-]*)\s*([A-Za-z_][\w.\[\]]*)")


def _parse_expr(text: str, index: dict[str, int], where: int) -> dict[int, float]:
    coefs: dict[int, float] = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot read linear term near {text[pos:pos + 20]!r}", where)
        sign, num, name = m.groups()
        v = float(num) if num else 1.0
        if sign == "-":
            v = -v
        if name not in index:
            index[name] = len(index)
        k = index[name]
        coefs[k] = coefs.get(k, 0.0) + v
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return coefs


def parse_lp_text(text: str) -> LpModel:
    """Parse LP text written by :func:`export_lp_text` back into a model."""
    maximize = None
    section = None
    chunks: dict[str, list[tuple[int, str]]] = {"obj": [], "rows": [], "bounds": []}
    for ln_no, raw in enumerate(text.splitlines()):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "obj":
                maximize = key.startswith("max")
            if section == "end":
                break
            continue
        if section is None or section == "end":
            raise ParseError(f"text outside any section: {line!r}", ln_no)
        # a new statement starts with ``name:``; anything else continues the last one
        if section != "bounds" and chunks[section] and not re.match(r"^[A-Za-z_][\w.\[\]]*\s*:", line):
            prev_no, prev = chunks[section][-1]
            chunks[section][-1] = (prev_no, prev + " " + line)
        else:
            chunks[section].append((ln_no, line))
    if maximize is None:
        raise ParseError("missing objective section", 0)

    index: dict[str, int] = {}
    obj: dict[int, float] = {}
    for ln_no, stmt in chunks["obj"]:
        body = stmt.split(":", 1)[1] if ":" in stmt else stmt
        obj.update(_parse_expr(body, index, ln_no))
    rows = []
    for ln_no, stmt in chunks["rows"]:
        name, body = (s.strip() for s in stmt.split(":", 1)) if ":" in stmt else (f"r{len(rows) + 1}", stmt)
        m = re.match(r"^(.*?)(<=|>=|=<|=>|<|>|=)\s*([^\s]+)\s*$", body)
        if not m:
            raise ParseError(f"row {name!r} has no comparison", ln_no)
        rows.append((name, _parse_expr(m.group(1), index, ln_no), _SENSE_IN[m.group(2)], float(m.group(3))))
    bounds: dict[int, tuple[float, float]] = {}
    for ln_no, stmt in chunks["bounds"]:
        toks = stmt.split()
        if len(toks) == 2 and toks[1].lower() == "free":
            bounds[index.setdefault(toks[0], len(index))] = (-math.inf, math.inf)
        elif len(toks) == 5 and toks[1] == toks[3] == "<=":
            bounds[index.setdefault(toks[2], len(index))] = (float(toks[0]), float(toks[4]))
        elif len(toks) == 3 and toks[1] in (">=", "<="):
            k = index.setdefault(toks[0], len(index))
            lo, hi = bounds.get(k, (0.0, math.inf))
            bounds[k] = (float(toks[2]), hi) if toks[1] == ">=" else (lo, float(toks[2]))
        else:
            raise ParseError(f"unsupported bound {stmt!r}", ln_no)

    n = len(index)
    names = tuple(sorted(index, key=index.__getitem__))
    c = np.zeros(n)
    for k, v in obj.items():
        c[k] = v
    A = np.zeros((len(rows), n))
    for r, (_, coefs, _, _) in enumerate(rows):
        for k, v in coefs.items():
            A[r, k] = v
    lower = np.zeros(n)
    upper = np.full(n, math.inf)
    for k, (lo, hi) in bounds.items():
        lower[k], upper[k] = lo, hi
    return LpModel(
        objective=c,
        A=A,
        senses=tuple(r[2] for r in rows),
        rhs=np.array([r[3] for r in rows]),
        maximize=maximize,
        lower=lower,
        upper=upper,
        var_names=names,
        row_names=tuple(r[0] for r in rows),
    )
