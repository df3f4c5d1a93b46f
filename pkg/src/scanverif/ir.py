"""Typed intermediate representation of PLC programs.

Programs are trees of frozen dataclasses.  Source locations and inferred
types are carried on nodes but excluded from equality, so two programs
parsed from differently formatted text compare equal when their structure
matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Union

WORD_BITS = 16
WORD_MASK = 0xFFFF

SECTIONS = ("INPUT", "OUTPUT", "INOUT", "STATIC", "TEMP", "CONFIG")


@dataclass(frozen=True)
class Loc:
    line: int
    col: int
    path: str | None = None

    def __str__(self) -> str:
        prefix = f"{self.path}:" if self.path else ""
        return f"{prefix}{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    message: str
    loc: Loc | None = None

    def __str__(self) -> str:
        return f"{self.loc}: {self.message}" if self.loc else self.message


class DiagnosticError(Exception):
    """Base class for errors that carry one or more located diagnostics."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class TypeCheckError(DiagnosticError):
    pass


# --------------------------------------------------------------------------
# Types

@dataclass(frozen=True)
class DataType:
    kind: str  # BOOL | WORD | ARRAY
    elem: DataType | None = None
    lo: int = 0
    hi: int = 0

    def __post_init__(self):
        if self.kind == "ARRAY":
            if self.elem is None or self.lo > self.hi:
                raise ValueError(f"bad array bounds [{self.lo}..{self.hi}]")
        elif self.kind not in ("BOOL", "WORD"):
            raise ValueError(f"unknown type kind {self.kind!r}")

    @property
    def width(self) -> int:
        if self.kind == "BOOL":
            return 1
        if self.kind == "WORD":
            return WORD_BITS
        return (self.hi - self.lo + 1) * self.elem.width

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1

    def __str__(self) -> str:
        if self.kind == "ARRAY":
            return f"ARRAY[{self.lo}..{self.hi}] OF {self.elem}"
        return self.kind


BOOL = DataType("BOOL")
WORD = DataType("WORD")


def array_of(elem: DataType, lo: int, hi: int) -> DataType:
    return DataType("ARRAY", elem, lo, hi)


def default_value(dtype: DataType):
    if dtype.kind == "BOOL":
        return False
    if dtype.kind == "WORD":
        return 0
    return tuple(default_value(dtype.elem) for _ in range(dtype.length))


def check_value(dtype: DataType, value) -> bool:
    if dtype.kind == "BOOL":
        return isinstance(value, bool)
    if dtype.kind == "WORD":
        return isinstance(value, int) and not isinstance(value, bool) and 0 <= value <= WORD_MASK
    return (isinstance(value, tuple) and len(value) == dtype.length
            and all(check_value(dtype.elem, v) for v in value))


def value_to_bits(dtype: DataType, value) -> list[int]:
    """Flatten a value into its bits, LSB first; array elements in index order."""
    if dtype.kind == "BOOL":
        return [int(bool(value))]
    if dtype.kind == "WORD":
        return [(value >> b) & 1 for b in range(WORD_BITS)]
    out = []
    for v in value:
        out.extend(value_to_bits(dtype.elem, v))
    return out


def bits_to_value(dtype: DataType, bits):
    bits = list(bits)
    if dtype.kind == "BOOL":
        return bool(bits[0])
    if dtype.kind == "WORD":
        return sum((b & 1) << i for i, b in enumerate(bits))
    w = dtype.elem.width
    return tuple(bits_to_value(dtype.elem, bits[i * w:(i + 1) * w]) for i in range(dtype.length))


def format_value(dtype: DataType, value) -> str:
    if dtype.kind == "BOOL":
        return "TRUE" if value else "FALSE"
    if dtype.kind == "WORD":
        return f"16#{value:04X}"
    return "[" + ", ".join(format_value(dtype.elem, v) for v in value) + "]"


# --------------------------------------------------------------------------
# Expressions

def _meta():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: Union[bool, int]
    loc: Loc | None = _meta()
    dtype: DataType | None = _meta()


@dataclass(frozen=True)
class VarRef:
    name: str
    loc: Loc | None = _meta()
    dtype: DataType | None = _meta()


@dataclass(frozen=True)
class Index:
    base: "Expr"
    index: Union[int, str]  # constant or enclosing FOR variable
    loc: Loc | None = _meta()
    dtype: DataType | None = _meta()


@dataclass(frozen=True)
class BitSel:
    base: "Expr"
    bit: Union[int, str]  # constant or enclosing FOR variable
    loc: Loc | None = _meta()
    dtype: DataType | None = _meta()


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    loc: Loc | None = _meta()
    dtype: DataType | None = _meta()


BINOPS = ("AND", "OR", "XOR", "EQ", "NEQ")


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc | None = _meta()
    dtype: DataType | None = _meta()


@dataclass(frozen=True)
class Old:
    var: VarRef
    loc: Loc | None = _meta()
    dtype: DataType | None = _meta()


Expr = Union[Const, VarRef, Index, BitSel, Not, BinOp, Old]


def And(a, b):
    return BinOp("AND", a, b)


def Or(a, b):
    return BinOp("OR", a, b)


def Xor(a, b):
    return BinOp("XOR", a, b)


def Eq(a, b):
    return BinOp("EQ", a, b)


def Neq(a, b):
    return BinOp("NEQ", a, b)


def TRUE():
    return Const(True, dtype=BOOL)


def FALSE():
    return Const(False, dtype=BOOL)


def walk_expr(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, (Index, BitSel)):
        yield from walk_expr(e.base)
    elif isinstance(e, Not):
        yield from walk_expr(e.operand)
    elif isinstance(e, BinOp):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Old):
        yield from walk_expr(e.var)


def lvalue_root(e: Expr) -> VarRef | None:
    while isinstance(e, (Index, BitSel)):
        e = e.base
    return e if isinstance(e, VarRef) else None


# --------------------------------------------------------------------------
# Statements

@dataclass(frozen=True)
class Assign:
    target: Expr
    value: Expr
    loc: Loc | None = _meta()


@dataclass(frozen=True)
class If:
    branches: tuple  # tuple[tuple[Expr, tuple[Stmt, ...]], ...]
    else_body: tuple = ()
    loc: Loc | None = _meta()


@dataclass(frozen=True)
class For:
    var: str
    lo: Expr
    hi: Expr
    body: tuple
    loc: Loc | None = _meta()

    @property
    def bounds(self) -> tuple[int, int]:
        return self.lo.value, self.hi.value


@dataclass(frozen=True)
class Call:
    pou: str
    inputs: tuple = ()   # (param, Expr) bound with :=
    outputs: tuple = ()  # (param, lvalue Expr) bound with =>
    loc: Loc | None = _meta()
    site: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Assert:
    req_id: str
    loc: Loc | None = _meta()


Stmt = Union[Assign, If, For, Call, Assert]


def walk_stmts(stmts) -> Iterator[Stmt]:
    for s in stmts:
        yield s
        if isinstance(s, If):
            for _, body in s.branches:
                yield from walk_stmts(body)
            yield from walk_stmts(s.else_body)
        elif isinstance(s, For):
            yield from walk_stmts(s.body)


# --------------------------------------------------------------------------
# POUs, requirements, programs

@dataclass(frozen=True)
class VarDecl:
    name: str
    dtype: DataType
    section: str
    init: object = None
    loc: Loc | None = _meta()

    def __post_init__(self):
        if self.section not in SECTIONS:
            raise ValueError(f"unknown section {self.section!r}")

    @property
    def initial(self):
        return default_value(self.dtype) if self.init is None else self.init


@dataclass(frozen=True)
class Pou:
    name: str
    kind: str  # FC | FB
    decls: tuple
    body: tuple
    loc: Loc | None = _meta()

    def decl(self, name: str) -> VarDecl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def section(self, *sections: str) -> list[VarDecl]:
        return [d for d in self.decls if d.section in sections]

    def persistent(self) -> list[VarDecl]:
        """Variables whose values carry over from one invocation to the next."""
        if self.kind != "FB":
            return []
        return self.section("STATIC", "OUTPUT")


@dataclass(frozen=True)
class ProgramPoint:
    """Where an assertion is evaluated.

    ``path`` indexes statements through nested blocks; the last element is
    the index of the statement the assertion precedes (equal to the block
    length when it sits at the block's end).  ``None`` means end of body.
    """
    pou: str
    path: tuple | None = None
    line: int | None = field(default=None, compare=False)


ORIGINS = ("inline", "template", "manifest")


@dataclass(frozen=True)
class Requirement:
    id: str
    expr: Expr
    origin: str = "manifest"
    point: ProgramPoint | None = None
    text: str | None = field(default=None, compare=False)

    def uses_old(self) -> bool:
        return any(isinstance(e, Old) for e in walk_expr(self.expr))


@dataclass(frozen=True)
class Program:
    pous: tuple
    entry: str
    requirements: tuple = ()
    typed: bool = field(default=False, compare=False)

    def pou(self, name: str) -> Pou:
        for p in self.pous:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def entry_pou(self) -> Pou:
        return self.pou(self.entry)

    def requirement(self, req_id: str) -> Requirement:
        for r in self.requirements:
            if r.id == req_id:
                return r
        raise KeyError(req_id)

    def nondet_decls(self) -> tuple[list[VarDecl], list[VarDecl]]:
        """(config, inputs) of the entry POU; entry IN_OUTs behave as inputs."""
        e = self.entry_pou
        return e.section("CONFIG"), e.section("INPUT", "INOUT")

    def with_end_requirements(self, reqs: Iterable[Requirement]) -> Program:
        """Attach end-of-cycle requirements to the entry body."""
        reqs = list(reqs)
        known = {r.id for r in self.requirements}
        for r in reqs:
            if r.id in known:
                raise ValueError(f"duplicate requirement id {r.id!r}")
            known.add(r.id)
        entry = self.entry_pou
        body = entry.body + tuple(Assert(r.id) for r in reqs)
        new_entry = replace(entry, body=body)
        pous = tuple(new_entry if p.name == entry.name else p for p in self.pous)
        point = ProgramPoint(entry.name, None)
        reqs = tuple(replace(r, point=point) for r in reqs)
        return Program(pous, self.entry, self.requirements + reqs)


def log2_input_space(program: Program) -> int:
    """Exact base-2 exponent of the number of configuration/input combinations."""
    config, inputs = program.nondet_decls()
    return sum(d.dtype.width for d in config) + sum(d.dtype.width for d in inputs)


# --------------------------------------------------------------------------
# Type checking

class _Checker:
    def __init__(self, program: Program):
        self.program = program
        self.diags: list[Diagnostic] = []
        self.reqs = {r.id: r for r in program.requirements}
        self.typed_reqs: dict[str, Requirement] = {}

    def error(self, msg, loc):
        self.diags.append(Diagnostic(msg, loc))

    # expressions -----------------------------------------------------------
    def expr(self, e, scope, loops, allow_old=False):
        """Return a typed copy of ``e`` or None after reporting an error."""
        if isinstance(e, Const):
            if isinstance(e.value, bool):
                return replace(e, dtype=BOOL)
            if not 0 <= e.value <= WORD_MASK:
                self.error(f"literal {e.value} out of WORD range", e.loc)
                return None
            return replace(e, dtype=WORD)
        if isinstance(e, VarRef):
            if e.name in loops:
                self.error(f"loop variable {e.name!r} can only be used as an index", e.loc)
                return None
            d = scope.get(e.name)
            if d is None:
                self.error(f"undefined identifier {e.name!r}", e.loc)
                return None
            return replace(e, dtype=d.dtype)
        if isinstance(e, Old):
            if not allow_old:
                self.error("OLD() is only allowed in requirements", e.loc)
                return None
            v = self.expr(e.var, scope, loops)
            return None if v is None else replace(e, var=v, dtype=v.dtype)
        if isinstance(e, Index):
            base = self.expr(e.base, scope, loops, allow_old)
            if base is None:
                return None
            if base.dtype.kind != "ARRAY":
                self.error(f"indexing non-array of type {base.dtype}", e.loc)
                return None
            if not self._const_index(e.index, base.dtype.lo, base.dtype.hi, loops, e.loc, "array index"):
                return None
            return replace(e, base=base, dtype=base.dtype.elem)
        if isinstance(e, BitSel):
            base = self.expr(e.base, scope, loops, allow_old)
            if base is None:
                return None
            if base.dtype != WORD:
                self.error(f"bit selection on non-WORD type {base.dtype}", e.loc)
                return None
            if not self._const_index(e.bit, 0, WORD_BITS - 1, loops, e.loc, "bit selector"):
                return None
            return replace(e, base=base, dtype=BOOL)
        if isinstance(e, Not):
            v = self.expr(e.operand, scope, loops, allow_old)
            if v is None:
                return None
            if v.dtype.kind == "ARRAY":
                self.error("NOT applied to an array", e.loc)
                return None
            return replace(e, operand=v, dtype=v.dtype)
        if isinstance(e, BinOp):
            left = self.expr(e.left, scope, loops, allow_old)
            right = self.expr(e.right, scope, loops, allow_old)
            if left is None or right is None:
                return None
            if left.dtype != right.dtype:
                self.error(f"type mismatch: {e.op} of {left.dtype} and {right.dtype}", e.loc)
                return None
            if left.dtype.kind == "ARRAY":
                self.error(f"{e.op} applied to arrays", e.loc)
                return None
            dt = BOOL if e.op in ("EQ", "NEQ") else left.dtype
            return replace(e, left=left, right=right, dtype=dt)
        raise TypeError(f"not an expression: {e!r}")

    def _const_index(self, idx, lo, hi, loops, loc, what):
        if isinstance(idx, str):
            if idx not in loops:
                self.error(f"{what} must be a constant or loop variable, got {idx!r}", loc)
                return False
            llo, lhi = loops[idx]
            if llo <= lhi and (llo < lo or lhi > hi):
                self.error(f"{what} {idx} ranges over {llo}..{lhi}, outside {lo}..{hi}", loc)
                return False
            return True
        if not lo <= idx <= hi:
            self.error(f"out-of-range {what} {idx} (valid {lo}..{hi})", loc)
            return False
        return True

    # statements ------------------------------------------------------------
    def lvalue(self, e, scope, loops):
        root = lvalue_root(e)
        if root is None:
            self.error("assignment target must be a variable", getattr(e, "loc", None))
            return None
        d = scope.get(root.name)
        if d is not None and d.section == "CONFIG":
            self.error(f"cannot assign CONFIG variable {root.name!r}", e.loc)
            return None
        return self.expr(e, scope, loops)

    def stmts(self, body, pou, scope, loops, sites):
        out = []
        for s in body:
            t = self.stmt(s, pou, scope, loops, sites)
            if t is not None:
                out.append(t)
        return tuple(out)

    def stmt(self, s, pou, scope, loops, sites):
        if isinstance(s, Assign):
            target = self.lvalue(s.target, scope, loops)
            value = self.expr(s.value, scope, loops)
            if target is None or value is None:
                return None
            if target.dtype != value.dtype:
                self.error(f"type mismatch: cannot assign {value.dtype} to {target.dtype}", s.loc)
                return None
            return replace(s, target=target, value=value)
        if isinstance(s, If):
            branches = []
            for cond, body in s.branches:
                c = self.expr(cond, scope, loops)
                if c is not None and c.dtype != BOOL:
                    self.error(f"condition must be BOOL, got {c.dtype}", cond.loc)
                branches.append((c, self.stmts(body, pou, scope, loops, sites)))
            else_body = self.stmts(s.else_body, pou, scope, loops, sites)
            if any(c is None for c, _ in branches):
                return None
            return replace(s, branches=tuple(branches), else_body=else_body)
        if isinstance(s, For):
            ok = True
            for b in (s.lo, s.hi):
                if not (isinstance(b, Const) and not isinstance(b.value, bool)):
                    self.error("non-constant loop bound", getattr(b, "loc", s.loc))
                    ok = False
            if s.var in scope or s.var in loops:
                self.error(f"loop variable {s.var!r} shadows another name", s.loc)
                ok = False
            if not ok:
                return None
            inner = dict(loops)
            inner[s.var] = (s.lo.value, s.hi.value)
            body = self.stmts(s.body, pou, scope, inner, sites)
            return replace(s, lo=replace(s.lo, dtype=WORD), hi=replace(s.hi, dtype=WORD), body=body)
        if isinstance(s, Call):
            return self.call(s, pou, scope, loops, sites)
        if isinstance(s, Assert):
            req = self.reqs.get(s.req_id)
            if req is None:
                self.error(f"unknown requirement {s.req_id!r}", s.loc)
                return None
            if s.req_id not in self.typed_reqs:
                e = self.expr(req.expr, scope, loops, allow_old=True)
                if e is not None and e.dtype != BOOL:
                    self.error(f"requirement must be BOOL, got {e.dtype}", req.expr.loc or s.loc)
                    e = None
                if e is not None:
                    self.typed_reqs[s.req_id] = replace(req, expr=e)
            return s
        raise TypeError(f"not a statement: {s!r}")

    def call(self, s, pou, scope, loops, sites):
        try:
            callee = self.program.pou(s.pou)
        except KeyError:
            self.error(f"undefined POU {s.pou!r}", s.loc)
            return None
        if callee.name == self.program.entry:
            self.error("the entry POU cannot be called", s.loc)
            return None
        ok = True
        inputs, outputs = [], []
        bound = set()
        for param, arg in s.inputs:
            d = callee.decl(param)
            if d is None or d.section not in ("INPUT", "INOUT"):
                self.error(f"{callee.name} has no input {param!r}", s.loc)
                ok = False
                continue
            a = self.lvalue(arg, scope, loops) if d.section == "INOUT" else self.expr(arg, scope, loops)
            if a is None:
                ok = False
                continue
            if a.dtype != d.dtype:
                self.error(f"type mismatch for {callee.name}.{param}: {a.dtype} vs {d.dtype}", s.loc)
                ok = False
            bound.add(param)
            inputs.append((param, a))
        for param, arg in s.outputs:
            d = callee.decl(param)
            if d is None or d.section != "OUTPUT":
                self.error(f"{callee.name} has no output {param!r}", s.loc)
                ok = False
                continue
            a = self.lvalue(arg, scope, loops)
            if a is None:
                ok = False
                continue
            if a.dtype != d.dtype:
                self.error(f"type mismatch for {callee.name}.{param}: {a.dtype} vs {d.dtype}", s.loc)
                ok = False
            outputs.append((param, a))
        for d in callee.section("INPUT", "INOUT"):
            if d.name not in bound:
                self.error(f"call to {callee.name} does not bind {d.name!r}", s.loc)
                ok = False
        if not ok:
            return None
        sites[0] += 1
        return replace(s, inputs=tuple(inputs), outputs=tuple(outputs), site=sites[0])

    # POUs ------------------------------------------------------------------
    def pou(self, p: Pou):
        scope = {}
        for d in p.decls:
            if d.name in scope:
                self.error(f"duplicate declaration {d.name!r}", d.loc)
            scope[d.name] = d
            if d.section == "STATIC" and p.kind == "FC":
                self.error(f"FUNCTION {p.name} cannot declare static variable {d.name!r}", d.loc)
            if d.section == "CONFIG" and p.name != self.program.entry:
                self.error(f"CONFIG variable {d.name!r} outside the entry POU", d.loc)
            if d.init is not None and not check_value(d.dtype, d.init):
                self.error(f"initializer of {d.name!r} does not match {d.dtype}", d.loc)
        body = self.stmts(p.body, p, scope, {}, [0])
        return replace(p, body=body)

    def check_call_graph(self):
        graph = {p.name: {s.pou for s in walk_stmts(p.body) if isinstance(s, Call)}
                 for p in self.program.pous}
        state = {}

        def visit(n, stack):
            state[n] = 1
            for m in sorted(graph.get(n, ())):
                if state.get(m) == 1:
                    self.error("recursive call cycle: " + " -> ".join(stack + [m]), None)
                elif m in graph and m not in state:
                    visit(m, stack + [m])
            state[n] = 2

        for n in sorted(graph):
            if n not in state:
                visit(n, [n])


def typecheck_program(program: Program) -> Program:
    """Resolve names and annotate every expression with its type.

    Raises TypeCheckError listing every problem found.
    """
    ck = _Checker(program)
    names = [p.name for p in program.pous]
    for n in set(names):
        if names.count(n) > 1:
            ck.error(f"duplicate POU {n!r}", None)
    if program.entry not in names:
        ck.error(f"entry POU {program.entry!r} not found", None)
        raise TypeCheckError(ck.diags)
    ck.check_call_graph()
    pous = tuple(ck.pou(p) for p in program.pous)
    for r in program.requirements:
        if r.id not in ck.typed_reqs and not any(d.message.startswith("unknown requirement") for d in ck.diags):
            if not any(isinstance(s, Assert) and s.req_id == r.id
                       for p in program.pous for s in walk_stmts(p.body)):
                ck.error(f"requirement {r.id!r} is never asserted", None)
    if ck.diags:
        raise TypeCheckError(ck.diags)
    reqs = tuple(ck.typed_reqs[r.id] for r in program.requirements)
    return Program(pous, program.entry, reqs, typed=True)


def instance_prefix(parent: str, callee: str, site: int) -> str:
    """State-key prefix for the FB instance created by one call site."""
    own = f"{callee}@{site}"
    return f"{parent}/{own}" if parent else own


def state_layout(program: Program) -> list[tuple[str, VarDecl]]:
    """Every persistent variable of the program as (flat key, decl).

    Entry variables use their own name; FB instance variables are keyed
    ``<callee>@<site>[/...].<name>``.
    """
    out = []

    def visit(pou, prefix):
        for d in pou.persistent():
            out.append((f"{prefix}.{d.name}" if prefix else d.name, d))
        for s in walk_stmts(pou.body):
            if isinstance(s, Call):
                callee = program.pou(s.pou)
                visit(callee, instance_prefix(prefix, callee.name, s.site))

    visit(program.entry_pou, "")
    return out
