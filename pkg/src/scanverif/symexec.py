"""Symbolic execution of one scan cycle over a pluggable value domain.

The executor walks a typed program exactly like the interpreter, but every
value is a symbolic term produced by a backend.  Branches are executed on
both sides and merged with if-then-else terms; FOR loops are unrolled.
Two backends exist: bit-level gates (``encoder``) and SMV expressions
(``smv``).

A backend provides ``const, leaf, not_, and_, or_, xor_, eq, bit, set_bit,
ite, is_true, bind``.  Scalars (BOOL/WORD) are backend values; arrays are
Python tuples of element values handled here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ir import (
    BOOL, Assert, Assign, BinOp, BitSel, Call, Const, For, If, Index, Not, Old,
    Program, VarRef, instance_prefix, state_layout,
)


@dataclass
class SymbolicCycle:
    frame: dict       # entry variables after the body
    statics: dict     # flat state key -> value after the body
    old: dict         # entry variables at cycle start
    asserts: dict     # requirement id -> BOOL value (conjoined, path-guarded)
    order: list       # requirement ids in first-execution order


class SymbolicExecutor:
    def __init__(self, program: Program, backend):
        self.program = program
        self.b = backend
        self.layout = state_layout(program)
        self.state_types = {k: d.dtype for k, d in self.layout}

    # value helpers ------------------------------------------------------------
    def const(self, dtype, value):
        if dtype.kind == "ARRAY":
            return tuple(self.const(dtype.elem, v) for v in value)
        return self.b.const(dtype, value)

    def ite(self, c, a, x, dtype):
        if a == x:
            return a
        if dtype.kind == "ARRAY":
            return tuple(self.ite(c, p, q, dtype.elem) for p, q in zip(a, x))
        return self.b.ite(c, a, x, dtype)

    def bind(self, name, v, dtype):
        if dtype.kind == "ARRAY":
            return tuple(self.bind(f"{name}[{dtype.lo + i}]", e, dtype.elem) for i, e in enumerate(v))
        return self.b.bind(name, v, dtype)

    # expressions ------------------------------------------------------------------
    def eval(self, e, frame, old, loops):
        b = self.b
        if isinstance(e, Const):
            return b.const(e.dtype, e.value)
        if isinstance(e, VarRef):
            return frame[e.name]
        if isinstance(e, BinOp):
            x = self.eval(e.left, frame, old, loops)
            y = self.eval(e.right, frame, old, loops)
            dt = e.left.dtype
            if e.op == "AND":
                return b.and_(x, y, dt)
            if e.op == "OR":
                return b.or_(x, y, dt)
            if e.op == "XOR":
                return b.xor_(x, y, dt)
            eq = b.eq(x, y, dt)
            return eq if e.op == "EQ" else b.not_(eq, BOOL)
        if isinstance(e, Not):
            return b.not_(self.eval(e.operand, frame, old, loops), e.dtype)
        if isinstance(e, BitSel):
            bit = loops[e.bit] if isinstance(e.bit, str) else e.bit
            return b.bit(self.eval(e.base, frame, old, loops), bit)
        if isinstance(e, Index):
            i = loops[e.index] if isinstance(e.index, str) else e.index
            return self.eval(e.base, frame, old, loops)[i - e.base.dtype.lo]
        if isinstance(e, Old):
            return old[e.var.name]
        raise TypeError(f"not an expression: {e!r}")

    def store(self, frame, target, value, loops, types, qual):
        sels = []
        t = target
        while isinstance(t, (Index, BitSel)):
            if isinstance(t, Index):
                i = loops[t.index] if isinstance(t.index, str) else t.index
                sels.append(("idx", i - t.base.dtype.lo, t.base.dtype))
            else:
                sels.append(("bit", loops[t.bit] if isinstance(t.bit, str) else t.bit, None))
            t = t.base
        sels.reverse()
        name = t.name

        def upd(cur, k, v):
            if k == len(sels):
                return v
            kind, n, _ = sels[k]
            if kind == "bit":
                return self.b.set_bit(cur, n, v)
            items = list(cur)
            items[n] = upd(cur[n], k + 1, v)
            return tuple(items)

        frame[name] = self.bind(qual(name), upd(frame[name], 0, value), types[name])

    # statements ------------------------------------------------------------------
    def run(self, leaf):
        """Execute the entry body once.

        ``leaf(kind, name, dtype)`` creates the symbolic value of a CONFIG
        (``"config"``), INPUT (``"input"``) or persistent (``"state"``)
        variable.
        """
        entry = self.program.entry_pou
        statics = {}
        for key, d in self.layout:
            statics[key] = leaf("state", key, d.dtype)
        frame = {}
        persistent = {d.name for d in entry.persistent()}
        for d in entry.decls:
            if d.section == "CONFIG":
                frame[d.name] = leaf("config", d.name, d.dtype)
            elif d.section in ("INPUT", "INOUT"):
                frame[d.name] = leaf("input", d.name, d.dtype)
            elif d.name in persistent:
                frame[d.name] = statics[d.name]
            else:
                frame[d.name] = self.const(d.dtype, d.initial)
        self.asserts = {}
        self.order = []
        ctx = {"statics": statics}
        old = dict(frame)
        types = {d.name: d.dtype for d in entry.decls}
        true = self.b.const(BOOL, True)
        self.block(entry.body, frame, old, {}, "", types, ctx, true)
        for name in persistent:
            ctx["statics"][name] = frame[name]
        return SymbolicCycle(frame, ctx["statics"], old, self.asserts, self.order)

    def block(self, body, frame, old, loops, prefix, types, ctx, pc):
        qual = (lambda n: f"{prefix}.{n}") if prefix else (lambda n: n)
        for s in body:
            if isinstance(s, Assign):
                v = self.eval(s.value, frame, old, loops)
                self.store(frame, s.target, v, loops, types, qual)
            elif isinstance(s, If):
                self.branch(s, frame, old, loops, prefix, types, ctx, pc)
            elif isinstance(s, For):
                lo, hi = s.bounds
                for i in range(lo, hi + 1):
                    self.block(s.body, frame, old, {**loops, s.var: i}, prefix, types, ctx, pc)
            elif isinstance(s, Call):
                self.call(s, frame, old, loops, prefix, types, ctx, pc)
            elif isinstance(s, Assert):
                req = self.program.requirement(s.req_id)
                v = self.eval(req.expr, frame, old, loops)
                if not self.b.is_true(pc):
                    v = self.b.or_(self.b.not_(pc, BOOL), v, BOOL)
                if s.req_id in self.asserts:
                    v = self.b.and_(self.asserts[s.req_id], v, BOOL)
                else:
                    self.order.append(s.req_id)
                self.asserts[s.req_id] = v
            else:
                raise TypeError(f"not a statement: {s!r}")

    def branch(self, s, frame, old, loops, prefix, types, ctx, pc):
        b = self.b
        results = []
        taken_none = b.const(BOOL, True)  # no earlier branch taken
        for cond, body in s.branches:
            c = self.eval(cond, frame, old, loops)
            f2, ctx2 = dict(frame), {"statics": dict(ctx["statics"])}
            guard = b.and_(pc, b.and_(taken_none, c, BOOL), BOOL)
            self.block(body, f2, old, loops, prefix, types, ctx2, guard)
            results.append((c, f2, ctx2["statics"]))
            taken_none = b.and_(taken_none, b.not_(c, BOOL), BOOL)
        f_else, ctx_else = dict(frame), {"statics": dict(ctx["statics"])}
        self.block(s.else_body, f_else, old, loops, prefix, types, ctx_else, b.and_(pc, taken_none, BOOL))
        qual = (lambda n: f"{prefix}.{n}") if prefix else (lambda n: n)
        acc_f, acc_s = f_else, ctx_else["statics"]
        for c, f2, s2 in reversed(results):
            acc_f = {k: self.ite(c, f2[k], acc_f[k], types[k]) for k in frame}
            acc_s = {k: self.ite(c, s2[k], acc_s[k], self.state_types[k]) for k in s2}
        for k in frame:
            if acc_f[k] != frame[k]:
                frame[k] = self.bind(qual(k), acc_f[k], types[k])
        ctx["statics"] = acc_s

    def call(self, s, frame, old, loops, prefix, types, ctx, pc):
        callee = self.program.pou(s.pou)
        inner = instance_prefix(prefix, callee.name, s.site)
        persistent = {d.name for d in callee.persistent()}
        ctypes = {d.name: d.dtype for d in callee.decls}
        cframe = {}
        for d in callee.decls:
            if d.name in persistent:
                cframe[d.name] = ctx["statics"][f"{inner}.{d.name}"]
            else:
                cframe[d.name] = self.const(d.dtype, d.initial)
        for param, arg in s.inputs:
            cframe[param] = self.bind(f"{inner}.{param}", self.eval(arg, frame, old, loops), ctypes[param])
        cold = dict(cframe)
        self.block(callee.body, cframe, cold, {}, inner, ctypes, ctx, pc)
        for name in persistent:
            ctx["statics"][f"{inner}.{name}"] = cframe[name]
        qual = (lambda n: f"{prefix}.{n}") if prefix else (lambda n: n)
        for param, arg in s.inputs:
            if callee.decl(param).section == "INOUT":
                self.store(frame, arg, cframe[param], loops, types, qual)
        for param, arg in s.outputs:
            self.store(frame, arg, cframe[param], loops, types, qual)
