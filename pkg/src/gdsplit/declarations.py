"""Text declarations of systems and splittings.

System grammar (Python call syntax, parsed with :mod:`ast`, never evaluated)::

    product(g=circle_g(alpha, beta), h=toral([2, 1], [1, 1]))
    rotation(0.618..., 0.414..., flag="known-minimal")

Factor kinds: ``rotation(freqs...)``, ``toral(rows...)``,
``circle_g(alpha, beta)`` and ``product(...)``; product arguments are
factors, named by keyword or ``f0, f1, ...`` by position.  Numbers may be
written as arithmetic on literals with ``sqrt`` and ``pi``.

Splitting grammar::

    E = g + stable(h); F = unstable(h)

Terms: a factor name (all its axes), ``axis(name, i)``, ``stable(name)`` and
``unstable(name)`` for toral factors.
"""

from __future__ import annotations

import ast
import math
import operator

from .errors import ConfigParseError, ConfigValidationError, GdsError
from .splittings import splitting_from_terms
from .systems import ProductSystem, build_circle_map_g, build_rotation, build_toral

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sqrt": math.sqrt}
_CONSTS = {"pi": math.pi}


def _parse_expr(text, field):
    try:
        return ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ConfigParseError(f"{field}: {exc.msg}", exc.lineno, exc.offset) from None


def _fail(node, field, msg):
    raise ConfigParseError(f"{field}: {msg}", getattr(node, "lineno", None),
                           getattr(node, "col_offset", -1) + 1)


def _number(node, field):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _number(node.operand, field)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        try:
            return _BINOPS[type(node.op)](_number(node.left, field), _number(node.right, field))
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            _fail(node, field, f"bad arithmetic: {exc}")
    if isinstance(node, ast.Name) and node.id in _CONSTS:
        return _CONSTS[node.id]
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        if len(node.args) != 1 or node.keywords:
            _fail(node, field, f"{node.func.id} takes one argument")
        try:
            return _FUNCS[node.func.id](_number(node.args[0], field))
        except ValueError as exc:
            _fail(node, field, str(exc))
    _fail(node, field, f"expected a number, got {ast.unparse(node)!r}")


def _row(node, field):
    if not isinstance(node, (ast.List, ast.Tuple)):
        _fail(node, field, "toral rows must be lists like [2, 1]")
    return [_number(e, field) for e in node.elts]


def _factor(node, field):
    if not (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)):
        _fail(node, field, f"expected a factor like rotation(...), got {ast.unparse(node)!r}")
    kind = node.func.id
    kw = {k.arg: k.value for k in node.keywords}
    try:
        if kind == "rotation":
            flag = "unknown"
            if "flag" in kw:
                f = kw.pop("flag")
                if not (isinstance(f, ast.Constant) and isinstance(f.value, str)):
                    _fail(f, field, "flag must be a string")
                flag = f.value
            if kw:
                _fail(node, field, f"unexpected keywords {sorted(kw)} for rotation")
            return build_rotation([_number(a, field) for a in node.args], flag)
        if kind == "toral":
            if kw:
                _fail(node, field, "toral takes matrix rows only")
            return build_toral([_row(a, field) for a in node.args])
        if kind == "circle_g":
            args = [_number(a, field) for a in node.args]
            names = ["alpha", "beta", "table_resolution"]
            vals = dict(zip(names, args))
            for k, v in kw.items():
                if k not in names:
                    _fail(node, field, f"unknown circle_g argument {k!r}")
                vals[k] = _number(v, field)
            if "table_resolution" in vals:
                vals["table_resolution"] = int(vals["table_resolution"])
            return build_circle_map_g(**vals)
    except GdsError as exc:
        if isinstance(exc, ConfigParseError):
            raise
        raise ConfigValidationError(str(exc), field) from None
    _fail(node, field, f"unknown factor kind {kind!r}")


def parse_system(text: str, field: str = "system") -> ProductSystem:
    """Build a ProductSystem from a declaration string."""
    node = _parse_expr(text, field)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "product":
        comps = [(f"f{i}", _factor(a, field)) for i, a in enumerate(node.args)]
        comps += [(k.arg, _factor(k.value, field)) for k in node.keywords]
        try:
            return ProductSystem(comps)
        except GdsError as exc:
            raise ConfigValidationError(str(exc), field) from None
    return ProductSystem([("f0", _factor(node, field))])


def _terms(node, field, out):
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Add):
        _terms(node.left, field, out)
        _terms(node.right, field, out)
    elif isinstance(node, ast.Name):
        out.append(("factor", node.id))
    elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        kind = node.func.id
        args = node.args
        if kind in ("stable", "unstable") and len(args) == 1 and isinstance(args[0], ast.Name):
            out.append((kind, args[0].id))
        elif kind == "axis" and len(args) == 2 and isinstance(args[0], ast.Name):
            out.append(("axis", args[0].id, int(_number(args[1], field))))
        else:
            _fail(node, field, f"bad splitting term {ast.unparse(node)!r}")
    else:
        _fail(node, field, f"bad splitting term {ast.unparse(node)!r}")
    return out


def parse_splitting_terms(text: str, field: str = "splitting"):
    """Return (E_terms, F_terms) from ``"E = ...; F = ..."``."""
    sides = {}
    for part in [p for p in text.split(";") if p.strip()]:
        if "=" not in part:
            raise ConfigParseError(f"{field}: expected 'E = ...' or 'F = ...', got {part.strip()!r}")
        lhs, rhs = part.split("=", 1)
        lhs = lhs.strip()
        if lhs not in ("E", "F") or lhs in sides:
            raise ConfigParseError(f"{field}: each of E and F must be given exactly once")
        sides[lhs] = _terms(_parse_expr(rhs, f"{field}.{lhs}"), f"{field}.{lhs}", [])
    if set(sides) != {"E", "F"}:
        raise ConfigParseError(f"{field}: both E and F are required")
    return sides["E"], sides["F"]


def parse_splitting(system, text: str, label=None, field: str = "splitting"):
    E_terms, F_terms = parse_splitting_terms(text, field)
    try:
        return splitting_from_terms(system, E_terms, F_terms, label=label)
    except GdsError as exc:
        raise ConfigValidationError(str(exc), field) from None
