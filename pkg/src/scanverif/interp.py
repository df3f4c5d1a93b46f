"""Reference interpreter with PLC scan-cycle semantics.

One call to :func:`run_cycle` executes the entry POU body once.  CONFIG
values are frozen for the whole run, INPUTs are sampled fresh every cycle,
STATIC variables (and the outputs of function blocks) persist, and TEMPs
start from their initial value each cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ir import (
    WORD_MASK, Assert, Assign, BinOp, BitSel, Call, Const, For, If, Index, Not,
    Old, Program, VarRef, check_value, instance_prefix, state_layout,
)


class ScenarioError(ValueError):
    """Raised when a valuation is missing a binding or has an ill-typed value."""


@dataclass(frozen=True)
class CycleState:
    config: dict
    statics: dict
    cycle_index: int = 0


@dataclass
class CycleResult:
    state: CycleState
    outputs: dict
    assertions: list = field(default_factory=list)  # (requirement id, bool) in execution order

    def verdicts(self) -> dict:
        """Per-requirement result of this cycle; multiple evaluations are conjoined."""
        out = {}
        for rid, ok in self.assertions:
            out[rid] = out.get(rid, True) and ok
        return out

    def holds(self, req_id: str) -> bool:
        return self.verdicts().get(req_id, True)


def eval_expr(expr, env: dict, old: dict | None = None, loops: dict | None = None):
    """Evaluate a typed expression against a valuation.

    ``old`` supplies cycle-start values for OLD() references; ``loops``
    binds enclosing FOR variables used as indices.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, VarRef):
        return env[expr.name]
    if isinstance(expr, BinOp):
        a = eval_expr(expr.left, env, old, loops)
        b = eval_expr(expr.right, env, old, loops)
        op = expr.op
        if op == "AND":
            return a & b
        if op == "OR":
            return a | b
        if op == "XOR":
            return a ^ b
        if op == "EQ":
            return a == b
        return a != b
    if isinstance(expr, Not):
        v = eval_expr(expr.operand, env, old, loops)
        return (not v) if isinstance(v, bool) else (~v & WORD_MASK)
    if isinstance(expr, BitSel):
        b = loops[expr.bit] if isinstance(expr.bit, str) else expr.bit
        return bool((eval_expr(expr.base, env, old, loops) >> b) & 1)
    if isinstance(expr, Index):
        i = loops[expr.index] if isinstance(expr.index, str) else expr.index
        return eval_expr(expr.base, env, old, loops)[i - expr.base.dtype.lo]
    if isinstance(expr, Old):
        if old is None:
            raise ScenarioError("OLD() evaluated without cycle-start values")
        return old[expr.var.name]
    raise TypeError(f"not an expression: {expr!r}")


def _selectors(target, loops):
    sels = []
    while isinstance(target, (Index, BitSel)):
        if isinstance(target, Index):
            i = loops[target.index] if isinstance(target.index, str) else target.index
            sels.append(("idx", i - target.base.dtype.lo))
        else:
            b = loops[target.bit] if isinstance(target.bit, str) else target.bit
            sels.append(("bit", b))
        target = target.base
    sels.reverse()
    return target.name, sels


def _update(cur, sels, value):
    if not sels:
        return value
    kind, k = sels[0]
    if kind == "bit":
        return (cur | (1 << k)) if value else (cur & ~(1 << k) & WORD_MASK)
    items = list(cur)
    items[k] = _update(cur[k], sels[1:], value)
    return tuple(items)


def _store(env, target, value, loops):
    name, sels = _selectors(target, loops)
    env[name] = _update(env[name], sels, value)


class _Machine:
    def __init__(self, program: Program, statics: dict):
        self.program = program
        self.statics = statics
        self.assertions = []

    def run_pou(self, pou, env, prefix):
        old = dict(env)
        self.exec_block(pou.body, env, old, {}, prefix)

    def exec_block(self, body, env, old, loops, prefix):
        for s in body:
            if isinstance(s, Assign):
                _store(env, s.target, eval_expr(s.value, env, old, loops), loops)
            elif isinstance(s, If):
                for cond, branch in s.branches:
                    if eval_expr(cond, env, old, loops):
                        self.exec_block(branch, env, old, loops, prefix)
                        break
                else:
                    self.exec_block(s.else_body, env, old, loops, prefix)
            elif isinstance(s, For):
                lo, hi = s.bounds
                for i in range(lo, hi + 1):
                    self.exec_block(s.body, env, old, {**loops, s.var: i}, prefix)
            elif isinstance(s, Call):
                self.call(s, env, old, loops, prefix)
            elif isinstance(s, Assert):
                req = self.program.requirement(s.req_id)
                self.assertions.append((s.req_id, bool(eval_expr(req.expr, env, old, loops))))
            else:
                raise TypeError(f"not a statement: {s!r}")

    def call(self, s, env, old, loops, prefix):
        callee = self.program.pou(s.pou)
        inner = instance_prefix(prefix, callee.name, s.site)
        frame = {}
        persistent = {d.name for d in callee.persistent()}
        for d in callee.decls:
            if d.name in persistent:
                frame[d.name] = self.statics[f"{inner}.{d.name}"]
            else:
                frame[d.name] = d.initial
        for param, arg in s.inputs:
            frame[param] = eval_expr(arg, env, old, loops)
        self.run_pou(callee, frame, inner)
        for name in persistent:
            self.statics[f"{inner}.{name}"] = frame[name]
        for param, arg in s.inputs:
            if callee.decl(param).section == "INOUT":
                _store(env, arg, frame[param], loops)
        for param, arg in s.outputs:
            _store(env, arg, frame[param], loops)


def initial_state(program: Program, config: dict) -> CycleState:
    cfg, _ = program.nondet_decls()
    _check_bindings(cfg, config, "config")
    statics = {key: d.initial for key, d in state_layout(program)}
    return CycleState(dict(config), statics, 0)


def _check_bindings(decls, valuation, what):
    for d in decls:
        if d.name not in valuation:
            raise ScenarioError(f"{what} valuation is missing {d.name!r}")
        if not check_value(d.dtype, valuation[d.name]):
            raise ScenarioError(f"{what} value for {d.name!r} is not a {d.dtype}: {valuation[d.name]!r}")


def run_cycle(program: Program, state: CycleState, inputs: dict) -> CycleResult:
    """Execute the entry POU once and return the post-cycle state."""
    entry = program.entry_pou
    _, in_decls = program.nondet_decls()
    _check_bindings(in_decls, inputs, "input")
    statics = dict(state.statics)
    env = {}
    persistent = {d.name for d in entry.persistent()}
    for d in entry.decls:
        if d.section == "CONFIG":
            env[d.name] = state.config[d.name]
        elif d.section in ("INPUT", "INOUT"):
            env[d.name] = inputs[d.name]
        elif d.name in persistent:
            env[d.name] = statics[d.name]
        else:
            env[d.name] = d.initial
    m = _Machine(program, statics)
    m.run_pou(entry, env, "")
    for name in persistent:
        statics[name] = env[name]
    outputs = {d.name: env[d.name] for d in entry.section("OUTPUT", "INOUT")}
    return CycleResult(CycleState(state.config, statics, state.cycle_index + 1), outputs, m.assertions)


@dataclass
class Trace:
    config: dict
    inputs: list
    cycles: list  # CycleResult per cycle, cycle 1 first

    def first_failure(self, req_ids=None):
        """(1-based cycle, requirement id) of the first failing assertion, or None."""
        for k, res in enumerate(self.cycles, start=1):
            for rid, ok in res.verdicts().items():
                if not ok and (req_ids is None or rid in req_ids):
                    return k, rid
        return None


def run_scenario(program: Program, config: dict, input_sequence: list) -> Trace:
    """Run consecutive cycles from the initial state under one frozen config."""
    if len(input_sequence) < 1:
        raise ScenarioError("a scenario needs at least one cycle")
    state = initial_state(program, config)
    cycles = []
    for inputs in input_sequence:
        res = run_cycle(program, state, inputs)
        cycles.append(res)
        state = res.state
    return Trace(dict(config), [dict(i) for i in input_sequence], cycles)
