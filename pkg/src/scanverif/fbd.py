"""Import of function block diagram networks exported as XML.

The accepted vocabulary is the one of the vendor export: ``Access`` elements
name variables (``Symbol/Component``), ``Part`` elements are gates with
``TemplateValue`` children for the input cardinality and the source type,
and ``Wire`` elements connect ``IdentCon`` (a variable access) and
``NameCon`` (a part port) endpoints.  A document may hold several
``FlgNet`` networks, which execute in document order; a bare fragment is
one network.  An optional ``Interface`` element declares the block's
variables so that a whole document can be loaded as a POU.

Lowering emits one assignment per gate in topological order, ties broken
by ascending part UId.  A gate output that drives a variable is assigned to
that variable directly; otherwise it gets a fresh temporary ``tmp<n>``.
"""

from __future__ import annotations

import heapq
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .ir import (
    BOOL, WORD, Assign, BinOp, DiagnosticError, Diagnostic, Not, Pou, VarDecl, VarRef, WORD_MASK,
)

GATES = {"And": "AND", "Or": "OR", "Xor": "XOR", "Not": "NOT"}
_SRC_TYPES = {"Bool": BOOL, "Word": WORD}
_SECTIONS = {"Input": "INPUT", "Output": "OUTPUT", "InOut": "INOUT", "Static": "STATIC",
             "Temp": "TEMP", "Config": "CONFIG"}


class FbdError(DiagnosticError):
    pass


def _fail(msg):
    raise FbdError([Diagnostic(msg)])


@dataclass(frozen=True)
class FbdAccess:
    uid: int
    scope: str
    name: str


@dataclass(frozen=True)
class FbdPart:
    uid: int
    name: str
    cardinality: int
    src_type: str | None = None

    @property
    def ports(self) -> tuple:
        if self.name == "Not":
            return ("in",)
        return tuple(f"in{i}" for i in range(1, self.cardinality + 1))


@dataclass(frozen=True)
class Endpoint:
    uid: int
    port: str | None = None   # None for IdentCon, the port name for NameCon

    @property
    def is_part(self) -> bool:
        return self.port is not None


@dataclass(frozen=True)
class FbdWire:
    uid: int
    endpoints: tuple


@dataclass
class FbdNetwork:
    accesses: list
    parts: list
    wires: list
    externals: dict = field(default_factory=dict)  # UId -> variable name declared elsewhere

    def part(self, uid):
        for p in self.parts:
            if p.uid == uid:
                return p
        raise KeyError(uid)

    def variable(self, uid) -> str:
        for a in self.accesses:
            if a.uid == uid:
                return a.name
        return self.externals[uid]

    def connections(self):
        """Resolve wires into (source, sinks) pairs.

        A source is ``("var", name)`` or ``("part", uid)``; a sink is
        ``("var", name)`` or ``("port", uid, port)``.
        """
        out = []
        for w in self.wires:
            drivers = [e for e in w.endpoints if e.is_part and e.port == "out"]
            if drivers:
                src, rest = drivers[0], [e for e in w.endpoints if e is not drivers[0]]
                source = ("part", src.uid)
            else:
                src, rest = w.endpoints[0], list(w.endpoints[1:])
                source = ("var", self.variable(src.uid))
            sinks = [("port", e.uid, e.port) if e.is_part else ("var", self.variable(e.uid)) for e in rest]
            out.append((w.uid, source, sinks))
        return out


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _int(text, what):
    try:
        return int((text or "").strip())
    except ValueError:
        _fail(f"{what} is not an integer: {text!r}")


def _root(data) -> ET.Element:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    text = re.sub(r"^\s*<\?xml[^>]*\?>", "", data)
    try:
        return ET.fromstring(text)
    except ET.ParseError:
        try:  # a fragment with several top-level elements
            return ET.fromstring(f"<Fragment>{text}</Fragment>")
        except ET.ParseError as exc:
            _fail(f"malformed XML: {exc}")


def _network(elem, externals, scopes) -> FbdNetwork:
    accesses, parts, wires = [], [], []
    seen = set()

    def fresh(uid):
        if uid in seen:
            _fail(f"duplicate UId {uid}")
        seen.add(uid)
        return uid

    for node in elem.iter():
        tag = _local(node.tag)
        if tag == "Access":
            uid = fresh(_int(node.get("UId"), "Access UId"))
            comps = [c.get("Name") for c in node.iter() if _local(c.tag) == "Component"]
            if not comps or None in comps:
                _fail(f"Access {uid} has no symbol name")
            scope = node.get("Scope", "LocalVariable")
            name = ".".join(comps)
            if scopes and scope in scopes:
                name = scopes[scope](name) if callable(scopes[scope]) else f"{scopes[scope]}{name}"
            accesses.append(FbdAccess(uid, scope, name))
        elif tag == "Part":
            uid = fresh(_int(node.get("UId"), "Part UId"))
            name = node.get("Name")
            if name not in GATES:
                _fail(f"unsupported part {name!r} (UId {uid})")
            card, src_type = (1 if name == "Not" else 2), None
            for tv in node:
                if _local(tv.tag) != "TemplateValue":
                    continue
                if tv.get("Type") == "Cardinality":
                    card = _int(tv.text, f"cardinality of part {uid}")
                elif tv.get("Name") == "SrcType" or tv.get("Type") == "Type":
                    src_type = (tv.text or "").strip()
                    if src_type not in _SRC_TYPES:
                        _fail(f"unsupported source type {src_type!r} on part {uid}")
            if name == "Not" and card != 1:
                _fail(f"Not part {uid} is unary but has cardinality {card}")
            if card < 1 or (name != "Not" and card < 2):
                _fail(f"part {uid} has invalid cardinality {card}")
            parts.append(FbdPart(uid, name, card, src_type))
        elif tag == "Wire":
            uid = fresh(_int(node.get("UId"), "Wire UId"))
            ends = []
            for e in node:
                t = _local(e.tag)
                if t == "IdentCon":
                    ends.append(Endpoint(_int(e.get("UId"), "IdentCon UId")))
                elif t == "NameCon":
                    ends.append(Endpoint(_int(e.get("UId"), "NameCon UId"), e.get("Name")))
            if len(ends) < 2:
                _fail(f"wire {uid} needs at least two endpoints")
            wires.append(FbdWire(uid, tuple(ends)))
    net = FbdNetwork(accesses, parts, wires, dict(externals or {}))
    _validate(net)
    return net


def _validate(net: FbdNetwork):
    access_ids = {a.uid for a in net.accesses} | set(net.externals)
    parts = {p.uid: p for p in net.parts}
    driven = {}
    outs = {}
    for w in net.wires:
        for e in w.endpoints:
            if e.is_part:
                if e.uid not in parts:
                    _fail(f"wire {w.uid} references unknown part UId {e.uid}")
                p = parts[e.uid]
                port = e.port
                if p.name == "Not" and port == "in1":
                    port = "in"
                if port != "out" and port not in p.ports:
                    _fail(f"part {p.uid} ({p.name}) has no port {e.port!r}")
            elif e.uid not in access_ids:
                _fail(f"wire {w.uid} references unknown UId {e.uid}")
        drivers = [e for e in w.endpoints if e.is_part and e.port == "out"]
        if len(drivers) > 1:
            _fail(f"wire {w.uid} has several driving outputs")
        sinks = [e for e in w.endpoints if not (drivers and e is drivers[0])]
        if not drivers:
            sinks = sinks[1:]
        for e in sinks:
            if e.is_part:
                port = "in" if parts[e.uid].name == "Not" and e.port == "in1" else e.port
                if (e.uid, port) in driven:
                    _fail(f"port {port} of part {e.uid} is driven by several wires")
                driven[(e.uid, port)] = w.uid
        if drivers:
            outs[drivers[0].uid] = outs.get(drivers[0].uid, 0) + 1
    for p in net.parts:
        for port in p.ports:
            if (p.uid, port) not in driven:
                _fail(f"input port {port} of part {p.uid} ({p.name}) is unwired")
        if p.uid not in outs:
            _fail(f"output of part {p.uid} ({p.name}) is unconnected")


def parse_fbd_document(data, externals=None, scopes=None) -> list[FbdNetwork]:
    """All networks of a document; each ``FlgNet`` element is one network."""
    root = _root(data)
    nets = [e for e in root.iter() if _local(e.tag) == "FlgNet"]
    if not nets:
        nets = [root]
    return [_network(n, externals, scopes) for n in nets]


def parse_fbd_xml(data, externals=None, scopes=None) -> FbdNetwork:
    """Parse a document holding exactly one network.

    ``externals`` maps UIds that are declared outside the document to
    variable names; ``scopes`` maps an Access ``Scope`` attribute to a name
    prefix (or a callable) for non-local accesses.
    """
    nets = parse_fbd_document(data, externals, scopes)
    if len(nets) != 1:
        _fail(f"expected one network, found {len(nets)}")
    return nets[0]


def parse_interface(data) -> list[VarDecl]:
    """Declarations from an ``Interface/Section/Member`` block, if present."""
    root = _root(data)
    decls = []
    for sec in root.iter():
        if _local(sec.tag) != "Section":
            continue
        section = _SECTIONS.get(sec.get("Name"))
        if section is None:
            _fail(f"unknown interface section {sec.get('Name')!r}")
        for m in sec:
            if _local(m.tag) != "Member":
                continue
            dt = _SRC_TYPES.get(m.get("Datatype", "").capitalize())
            if dt is None:
                _fail(f"unsupported datatype {m.get('Datatype')!r} for {m.get('Name')}")
            decls.append(VarDecl(m.get("Name"), dt, section))
    return decls


# --------------------------------------------------------------------------
# lowering

@dataclass
class LoweredNetwork:
    stmts: list
    temps: list        # VarDecls of the fresh temporaries


def _topo_order(net: FbdNetwork) -> list[int]:
    deps = {p.uid: set() for p in net.parts}
    users = {p.uid: set() for p in net.parts}
    for _, source, sinks in net.connections():
        if source[0] != "part":
            continue
        for s in sinks:
            if s[0] == "port":
                deps[s[1]].add(source[1])
                users[source[1]].add(s[1])
    indeg = {u: len(d) for u, d in deps.items()}
    ready = [u for u, n in indeg.items() if n == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in sorted(users[u]):
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    if len(order) != len(deps):
        cyclic = sorted(u for u in deps if indeg[u] > 0)
        _fail(f"wiring cycle through parts {', '.join(map(str, cyclic))}")
    return order


def lower_to_ir(net: FbdNetwork, decls, temp_start: int = 1) -> LoweredNetwork:
    """Lower a network to assignments, one per gate, in dependency order."""
    types = {d.name: d.dtype for d in decls}
    for a in net.accesses:
        if a.name not in types:
            _fail(f"access {a.uid} names undeclared variable {a.name!r}")
    port_src = {}
    out_vars = {}
    copies = []
    for _, source, sinks in net.connections():
        for s in sinks:
            if s[0] == "port":
                port = "in" if net.part(s[1]).name == "Not" and s[2] == "in1" else s[2]
                port_src[(s[1], port)] = source
            elif source[0] == "part":
                out_vars.setdefault(source[1], []).append(s[1])
            else:
                copies.append((s[1], source[1]))
    stmts, temps = [], []
    result_of = {}
    counter = temp_start
    taken = set(types)
    part_type = {}

    def operand(src):
        if src[0] == "var":
            return VarRef(src[1]), types[src[1]]
        return VarRef(result_of[src[1]]), part_type[src[1]]

    for uid in _topo_order(net):
        p = net.part(uid)
        ops = [operand(port_src[(uid, port)]) for port in p.ports]
        dt = _SRC_TYPES[p.src_type] if p.src_type else ops[0][1]
        for ref, t in ops:
            if t != dt:
                _fail(f"part {uid} ({p.name}, {dt}) has a {t} operand {ref.name}")
        part_type[uid] = dt
        if p.name == "Not":
            expr = Not(ops[0][0])
        else:
            expr = ops[0][0]
            for ref, _ in ops[1:]:
                expr = BinOp(GATES[p.name], expr, ref)
        targets = out_vars.get(uid, [])
        if targets:
            target = targets[0]
            if types[target] != dt:
                _fail(f"part {uid} output of type {dt} wired to {types[target]} variable {target}")
        else:
            while f"tmp{counter}" in taken:
                counter += 1
            target = f"tmp{counter}"
            counter += 1
            taken.add(target)
            temps.append(VarDecl(target, dt, "TEMP"))
        result_of[uid] = target
        stmts.append(Assign(VarRef(target), expr))
        for extra in targets[1:]:
            stmts.append(Assign(VarRef(extra), VarRef(target)))
    for dst, src in copies:
        stmts.append(Assign(VarRef(dst), VarRef(src)))
    return LoweredNetwork(stmts, temps)


def evaluate_network(net: FbdNetwork, env: dict, types: dict) -> dict:
    """Evaluate the gate graph directly, without lowering.

    Returns the values of every variable driven by the network; used as an
    independent oracle for the lowering.
    """
    port_src = {}
    drives = []
    for _, source, sinks in net.connections():
        for s in sinks:
            if s[0] == "port":
                port = "in" if net.part(s[1]).name == "Not" and s[2] == "in1" else s[2]
                port_src[(s[1], port)] = source
            else:
                drives.append((s[1], source))
    memo = {}

    def value(src):
        if src[0] == "var":
            return env[src[1]]
        uid = src[1]
        if uid not in memo:
            p = net.part(uid)
            vals = [value(port_src[(uid, port)]) for port in p.ports]
            word = not isinstance(vals[0], bool)
            if p.name == "Not":
                memo[uid] = (~vals[0] & WORD_MASK) if word else not vals[0]
            else:
                acc = vals[0]
                for v in vals[1:]:
                    if p.name == "And":
                        acc = acc & v
                    elif p.name == "Or":
                        acc = acc | v
                    else:
                        acc = acc ^ v
                memo[uid] = acc if word else bool(acc)
        return memo[uid]

    return {name: value(src) for name, src in drives}


def fbd_to_pou(data, name: str, kind: str = "FC", externals=None, scopes=None) -> Pou:
    """Load a whole document (interface plus networks) as one POU."""
    decls = parse_interface(data)
    if not decls:
        _fail("document has no Interface declarations")
    body, temps = [], []
    counter = 1
    for net in parse_fbd_document(data, externals, scopes):
        lowered = lower_to_ir(net, decls + temps, counter)
        body += lowered.stmts
        temps += lowered.temps
        counter += len(lowered.temps)
    return Pou(name, kind, tuple(decls + temps), tuple(body))
