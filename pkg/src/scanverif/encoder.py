"""Bit-blasting of scan cycles and bounded unrolling.

``encode_cycle`` turns one execution of the entry POU into a BitCircuit
whose leaves are configuration, input and state bits.  ``unroll`` chains K
copies of that circuit, sharing configuration bits, starting from the
declared initial state, and exposes a single violation output that is true
iff some checked assertion fails in some cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import BitCircuit
from .ir import BOOL, WORD, WORD_BITS, Program, value_to_bits
from .symexec import SymbolicExecutor


class BitBackend:
    def __init__(self, circuit: BitCircuit):
        self.c = circuit

    def const(self, dtype, value):
        if dtype == BOOL:
            return self.c.const(value)
        return tuple(self.c.const((value >> i) & 1) for i in range(WORD_BITS))

    def not_(self, v, dtype):
        if dtype == BOOL:
            return self.c.NOT(v)
        return tuple(self.c.NOT(x) for x in v)

    def and_(self, a, b, dtype):
        if dtype == BOOL:
            return self.c.AND(a, b)
        return tuple(self.c.AND(x, y) for x, y in zip(a, b))

    def or_(self, a, b, dtype):
        if dtype == BOOL:
            return self.c.OR(a, b)
        return tuple(self.c.OR(x, y) for x, y in zip(a, b))

    def xor_(self, a, b, dtype):
        if dtype == BOOL:
            return self.c.XOR(a, b)
        return tuple(self.c.XOR(x, y) for x, y in zip(a, b))

    def eq(self, a, b, dtype):
        if dtype == BOOL:
            return self.c.XNOR(a, b)
        return self.c.and_all(self.c.XNOR(x, y) for x, y in zip(a, b))

    def bit(self, v, b):
        return v[b]

    def set_bit(self, v, b, x):
        return v[:b] + (x,) + v[b + 1:]

    def ite(self, sel, a, b, dtype):
        if dtype == BOOL:
            return self.c.MUX(sel, a, b)
        return tuple(self.c.MUX(sel, x, y) for x, y in zip(a, b))

    def is_true(self, v):
        return v == BitCircuit.TRUE

    def bind(self, name, v, dtype):
        return v


def flatten_bits(v, dtype) -> tuple:
    if dtype == BOOL:
        return (v,)
    if dtype == WORD:
        return tuple(v)
    out = ()
    for e in v:
        out += flatten_bits(e, dtype.elem)
    return out


def _leaf_value(circuit, name, dtype, tag, start=0):
    if dtype == BOOL:
        return circuit.input((name, start, tag))
    if dtype == WORD:
        return tuple(circuit.input((name, start + i, tag)) for i in range(WORD_BITS))
    w = dtype.elem.width
    return tuple(_leaf_value(circuit, name, dtype.elem, tag, start + i * w) for i in range(dtype.length))


@dataclass
class TransitionSystem:
    """One scan cycle as a circuit over config, input and state leaves.

    Leaf keys are ``(variable, bit, tag)`` with tag ``None`` for config
    bits, ``"in"`` for input bits and ``"state"`` for current-state bits.
    Circuit outputs are named ``out:<var>``, ``next:<state key>`` and
    ``assert:<requirement id>``.
    """
    program: Program
    circuit: BitCircuit
    config_vars: list
    input_vars: list
    state_vars: list      # (key, dtype, initial value)
    output_vars: list
    requirement_ids: list = field(default_factory=list)

    @property
    def nondet_bits(self) -> int:
        return sum(d.width for _, d in self.config_vars) + sum(d.width for _, d in self.input_vars)

    @property
    def stateless(self) -> bool:
        return not self.state_vars


def encode_cycle(program: Program, strash: bool = True) -> TransitionSystem:
    """Symbolically execute one cycle of a typed program into a BitCircuit."""
    if not program.typed:
        raise ValueError("encode_cycle needs a typechecked program")
    c = BitCircuit(strash=strash)
    config, inputs = program.nondet_decls()
    tags = {"config": None, "input": "in", "state": "state"}

    def leaf(kind, name, dtype):
        return _leaf_value(c, name, dtype, tags[kind])

    # declare leaves in a fixed order: config, inputs, state
    for d in config:
        leaf("config", d.name, d.dtype)
    for d in inputs:
        leaf("input", d.name, d.dtype)
    ex = SymbolicExecutor(program, BitBackend(c))
    for key, d in ex.layout:
        leaf("state", key, d.dtype)
    sym = ex.run(leaf)
    entry = program.entry_pou
    outs = entry.section("OUTPUT", "INOUT")
    for d in outs:
        c.outputs[f"out:{d.name}"] = flatten_bits(sym.frame[d.name], d.dtype)
    for key, d in ex.layout:
        c.outputs[f"next:{key}"] = flatten_bits(sym.statics[key], d.dtype)
    req_ids = [r.id for r in program.requirements]
    for rid in req_ids:
        c.outputs[f"assert:{rid}"] = (sym.asserts.get(rid, BitCircuit.TRUE),)
    return TransitionSystem(
        program, c,
        [(d.name, d.dtype) for d in config],
        [(d.name, d.dtype) for d in inputs],
        [(key, d.dtype, d.initial) for key, d in ex.layout],
        [(d.name, d.dtype) for d in outs],
        req_ids,
    )


@dataclass
class Unrolled:
    circuit: BitCircuit
    violation: int
    bound: int
    requirement_ids: list
    asserts: list      # per cycle: {req id: node}
    outputs: list      # per cycle: {var: bits}
    states: list       # per cycle: {state key: bits} after the cycle


def unroll(ts: TransitionSystem, bound: int, requirement_ids=None) -> Unrolled:
    """Chain ``bound`` copies of the cycle circuit from the initial state."""
    if bound < 1:
        raise ValueError("unroll bound must be at least 1")
    req_ids = list(ts.requirement_ids if requirement_ids is None else requirement_ids)
    for rid in req_ids:
        if f"assert:{rid}" not in ts.circuit.outputs:
            raise KeyError(f"unknown requirement {rid!r}")
    src = ts.circuit
    u = BitCircuit(strash=src.strash)
    # leaves in a fixed order: config first, then each cycle's inputs
    for name, dt in ts.config_vars:
        _leaf_value(u, name, dt, None)
    state = {}
    for key, dt, init in ts.state_vars:
        for i, bit in enumerate(value_to_bits(dt, init)):
            state[(key, i)] = u.const(bit)
    asserts, outputs, states = [], [], []
    violation = BitCircuit.FALSE
    for k in range(bound):
        for name, dt in ts.input_vars:
            _leaf_value(u, name, dt, k)
        m = [0] * len(src.nodes)
        m[1] = 1
        for i in range(2, len(src.nodes)):
            node = src.nodes[i]
            op = node[0]
            if op == "AND":
                m[i] = u.AND(m[node[1]], m[node[2]])
            elif op == "OR":
                m[i] = u.OR(m[node[1]], m[node[2]])
            elif op == "XOR":
                m[i] = u.XOR(m[node[1]], m[node[2]])
            elif op == "NOT":
                m[i] = u.NOT(m[node[1]])
            elif op == "INPUT":
                name, bit, tag = node[1]
                if tag is None:
                    m[i] = u.input((name, bit, None))
                elif tag == "in":
                    m[i] = u.input((name, bit, k))
                else:
                    m[i] = state[(name, bit)]
            else:
                m[i] = u.const(node[1])
        cyc_asserts = {rid: m[src.outputs[f"assert:{rid}"][0]] for rid in ts.requirement_ids}
        asserts.append(cyc_asserts)
        outputs.append({name: tuple(m[b] for b in src.outputs[f"out:{name}"]) for name, _ in ts.output_vars})
        nxt = {}
        for key, dt, _ in ts.state_vars:
            bits = tuple(m[b] for b in src.outputs[f"next:{key}"])
            nxt[key] = bits
            for i, b in enumerate(bits):
                state[(key, i)] = b
        states.append(nxt)
        for rid in req_ids:
            violation = u.OR(violation, u.NOT(cyc_asserts[rid]))
    u.outputs["violation"] = (violation,)
    return Unrolled(u, violation, bound, req_ids, asserts, outputs, states)
