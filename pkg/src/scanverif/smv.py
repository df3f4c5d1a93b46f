"""Export of a verification case as an SMV model for external model checkers.

The cycle is symbolically executed with an SMV-expression backend: every
assignment becomes a DEFINE in static single assignment form, branches merge
through ``case ... esac``, persistent variables get ``init``/``next``
equations and each checked requirement becomes an INVARSPEC.  Configuration
variables are FROZENVARs; inputs are ordinary unconstrained VARs so that
invariants may refer to them.
"""

from __future__ import annotations

import re
from collections import defaultdict

from .ir import BOOL, state_layout
from .symexec import SymbolicExecutor

_KEYWORDS = {
    "MODULE", "VAR", "IVAR", "FROZENVAR", "DEFINE", "ASSIGN", "INIT", "INVAR", "TRANS",
    "INVARSPEC", "SPEC", "LTLSPEC", "CTLSPEC", "init", "next", "case", "esac", "word",
    "bool", "boolean", "unsigned", "signed", "TRUE", "FALSE", "mod", "xor", "xnor",
    "self", "in", "union", "main", "toint", "resize", "extend", "count", "array", "of",
}
_IDENT = re.compile(r"(?<![A-Za-z0-9_$#])[A-Za-z_][A-Za-z0-9_$#]*")


def smv_name(name: str) -> str:
    """Map an IR name (possibly qualified or indexed) to an SMV identifier."""
    s = name.replace("@", "_at").replace(".", "__").replace("[", "_").replace("]", "")
    s = re.sub(r"[^A-Za-z0-9_]", "_", s)
    if not s or s[0].isdigit() or s in _KEYWORDS:
        s = "v_" + s
    return s


def _smv_type(dtype) -> str:
    return "boolean" if dtype == BOOL else "unsigned word[16]"


def _smv_const(dtype, value) -> str:
    if dtype == BOOL:
        return "TRUE" if value else "FALSE"
    return f"0ud16_{value}"


class SmvBackend:
    """Symbolic values are SMV expression strings."""

    def __init__(self):
        self.defines = []           # (name, expression) in definition order
        self._counts = defaultdict(int)

    def const(self, dtype, value):
        return _smv_const(dtype, value)

    def not_(self, v, dtype):
        if v == "TRUE":
            return "FALSE"
        if v == "FALSE":
            return "TRUE"
        return f"!{v}" if _atomic(v) else f"!({v})"

    def and_(self, a, b, dtype):
        if dtype == BOOL:
            if a == "TRUE":
                return b
            if b == "TRUE":
                return a
            if "FALSE" in (a, b):
                return "FALSE"
        return f"({a} & {b})"

    def or_(self, a, b, dtype):
        if dtype == BOOL:
            if a == "FALSE":
                return b
            if b == "FALSE":
                return a
            if "TRUE" in (a, b):
                return "TRUE"
        return f"({a} | {b})"

    def xor_(self, a, b, dtype):
        return f"({a} xor {b})"

    def eq(self, a, b, dtype):
        return f"({a} = {b})"

    def bit(self, v, b):
        return f"bool({v}[{b}:{b}])"

    def set_bit(self, v, b, x):
        parts = []
        if b < 15:
            parts.append(f"{v}[15:{b + 1}]")
        parts.append(f"word1({x})")
        if b > 0:
            parts.append(f"{v}[{b - 1}:0]")
        return "(" + " :: ".join(parts) + ")"

    def ite(self, sel, a, b, dtype):
        return f"case {sel} : {a}; TRUE : {b}; esac"

    def is_true(self, v):
        return v == "TRUE"

    def bind(self, name, v, dtype):
        base = smv_name(name)
        self._counts[base] += 1
        d = f"{base}__{self._counts[base]}"
        self.defines.append((d, v))
        return d


def _atomic(v: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z0-9_$#]+", v)) or v.startswith("(")


def _elements(name, dtype):
    """(SMV name, scalar type) pairs for a possibly array-typed variable."""
    if dtype.kind != "ARRAY":
        return [(smv_name(name), dtype)]
    out = []
    for i in range(dtype.length):
        out += _elements(f"{name}[{dtype.lo + i}]", dtype.elem)
    return out


def _shape(names, dtype):
    """Rebuild the symbolic value of an array from its flat element names."""
    if dtype.kind != "ARRAY":
        return names.pop(0)
    return tuple(_shape(names, dtype.elem) for _ in range(dtype.length))


def _flat(v, dtype):
    if dtype.kind != "ARRAY":
        return [v]
    out = []
    for e in v:
        out += _flat(e, dtype.elem)
    return out


def emit_smv(case, bound: int | None = None) -> str:
    """Render the case's program and requirements as one SMV module."""
    program = case.program
    k = case.resolved_bound(bound)
    backend = SmvBackend()
    ex = SymbolicExecutor(program, backend)
    decls = {"config": [], "input": [], "state": []}
    state_names = {}

    def leaf(kind, name, dtype):
        elems = _elements(name, dtype)
        decls[kind] += elems
        if kind == "state":
            state_names[name] = [n for n, _ in elems]
        return _shape([n for n, _ in elems], dtype)

    sym = ex.run(leaf)
    entry = program.entry_pou

    # the last SSA version of each plain local is renamed to the local's name
    rename = {}
    finals = []
    taken = {n for group in decls.values() for n, _ in group}
    for d in entry.decls:
        if d.section in ("CONFIG", "INPUT", "INOUT") or d.name in state_names:
            continue
        value = sym.frame[d.name]
        for (plain, _), v in zip(_elements(d.name, d.dtype), _flat(value, d.dtype)):
            if plain in taken:
                continue
            if re.fullmatch(r".+__\d+", v) and v not in rename and any(n == v for n, _ in backend.defines):
                rename[v] = plain
            else:
                finals.append((plain, v))
            taken.add(plain)

    def sub(text):
        return _IDENT.sub(lambda m: rename.get(m.group(0), m.group(0)), text)

    lines = [f"-- scanverif model of case {case.id}", f"-- bounded check depth used by the internal engine: {k}",
             "MODULE main"]
    if decls["config"]:
        lines.append("FROZENVAR -- configuration, fixed at start-up")
        lines += [f"  {n} : {_smv_type(t)};" for n, t in decls["config"]]
    if decls["input"]:
        lines.append("VAR -- inputs, fresh every scan cycle")
        lines += [f"  {n} : {_smv_type(t)};" for n, t in decls["input"]]
    layout = state_layout(program)
    if layout:
        lines.append("VAR -- persistent state")
        lines += [f"  {n} : {_smv_type(t)};" for n, t in decls["state"]]
        lines.append("ASSIGN")
        for key, d in layout:
            init = [_smv_const(t, v) for (_, t), v in zip(_elements(key, d.dtype), _flat(d.initial, d.dtype))]
            nxt = _flat(sym.statics[key], d.dtype)
            for name, i0, n1 in zip(state_names[key], init, nxt):
                lines.append(f"  init({name}) := {i0};")
                lines.append(f"  next({name}) := {sub(n1)};")
    if backend.defines or finals:
        lines.append("DEFINE")
        for name, v in backend.defines:
            lines.append(f"  {sub(name)} := {sub(v)};")
        for name, v in finals:
            lines.append(f"  {name} := {sub(v)};")
    for rid in case.requirement_ids:
        lines.append(f"-- requirement {rid}")
        lines.append(f"INVARSPEC {sub(sym.asserts.get(rid, 'TRUE'))};")
    return "\n".join(lines) + "\n"

