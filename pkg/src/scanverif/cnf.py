"""Tseitin conversion of circuit outputs to CNF, plus DIMACS I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import BitCircuit


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list
    bit_to_lit: dict = field(default_factory=dict)   # input key -> literal
    node_to_lit: dict = field(default_factory=dict)

    def to_dimacs(self, comments=True) -> str:
        lines = []
        if comments:
            for key, lit in sorted(self.bit_to_lit.items(), key=lambda kv: abs(kv[1])):
                if isinstance(key, tuple) and len(key) == 3:
                    name, bit, cycle = key
                    tag = "config" if cycle is None else f"cycle{cycle + 1}" if isinstance(cycle, int) else cycle
                    lines.append(f"c {lit} {name}[{bit}] {tag}")
                else:
                    lines.append(f"c {lit} {key}")
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        for cl in self.clauses:
            lines.append(" ".join(str(x) for x in cl) + (" 0" if cl else "0"))
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list]:
    num_vars, clauses, cur = 0, [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            num_vars = int(line.split()[2])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    return num_vars, clauses


def _leaves_depth_first(nodes, root, cone):
    """Leaves in depth-first order, shallower operands explored first."""
    depth = {}
    for n in cone:
        node = nodes[n]
        depth[n] = 1 + max(depth[c] for c in node[1:]) if node[0] in ("AND", "OR", "XOR", "NOT") else 0
    order, seen, stack = [], set(), [root]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        node = nodes[n]
        if node[0] == "INPUT":
            order.append(n)
        elif node[0] != "CONST":
            stack.extend(sorted(node[1:], key=lambda c: (depth[c], c), reverse=True))
    return order


def to_cnf(circuit: BitCircuit, root: int, free_inputs: bool = True) -> CnfFormula:
    """Equisatisfiable CNF asserting ``root`` true.

    Input leaves get the lowest variable numbers, in the order a
    depth-first walk from the root first reaches them, shallow operands
    first; gates follow.  The
    solver decides variables in ascending order, so this keeps the leaves
    of one sub-expression adjacent in the search.  NOT gates reuse the
    negated literal of their operand.  With ``free_inputs`` the inputs
    outside the root's cone get unconstrained variables after the gates,
    so every input bit of the circuit appears in the formula and model.
    """
    if root == BitCircuit.FALSE:
        return CnfFormula(0, [[]])
    if root == BitCircuit.TRUE:
        return CnfFormula(0, [])
    nodes = circuit.nodes
    cone = circuit.cone([root])
    lit = {}
    nvars = 0
    clauses = []
    bit_to_lit = {}
    for n in _leaves_depth_first(nodes, root, cone):
        nvars += 1
        lit[n] = nvars
        bit_to_lit[nodes[n][1]] = nvars
    if any(nodes[n][0] == "CONST" for n in cone):
        nvars += 1
        lit[1] = nvars
        lit[0] = -nvars
        clauses.append([nvars])
    for n in cone:
        node = nodes[n]
        op = node[0]
        if op == "NOT":
            lit[n] = -lit[node[1]]
        elif op in ("AND", "OR", "XOR"):
            nvars += 1
            g = lit[n] = nvars
            a, b = lit[node[1]], lit[node[2]]
            if op == "AND":
                clauses += [[-g, a], [-g, b], [g, -a, -b]]
            elif op == "OR":
                clauses += [[g, -a], [g, -b], [-g, a, b]]
            else:
                clauses += [[-g, a, b], [-g, -a, -b], [g, -a, b], [g, a, -b]]
    clauses.append([lit[root]])
    if free_inputs:
        for key, n in circuit.inputs.items():
            if n not in lit:
                nvars += 1
                lit[n] = nvars
                bit_to_lit[key] = nvars
    return CnfFormula(nvars, clauses, bit_to_lit, lit)
