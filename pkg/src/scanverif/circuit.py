"""Bit-level gate networks with structural hashing and constant folding."""

from __future__ import annotations

GATES = ("AND", "OR", "XOR", "NOT")


class BitCircuit:
    """A topologically ordered network of single-bit gates.

    Nodes 0 and 1 are the constants FALSE and TRUE.  Every other node is an
    ``("INPUT", key)`` leaf or a gate ``(op, a[, b])`` whose operands have
    smaller indices.  With ``strash`` enabled the network is an
    and-inverter graph plus XOR: OR is built as NOT(AND(NOT a, NOT b)),
    gates are folded against constants, a few local identities are applied
    and identical gates are shared.  With it disabled every request creates
    a fresh node of the requested kind (used to check that hashing does not
    change semantics).
    """

    FALSE = 0
    TRUE = 1

    def __init__(self, strash: bool = True):
        self.strash = strash
        self.nodes: list[tuple] = [("CONST", 0), ("CONST", 1)]
        self.inputs: dict = {}
        self.outputs: dict = {}
        self._table: dict = {}

    def __len__(self):
        return len(self.nodes)

    def _add(self, node):
        if self.strash:
            hit = self._table.get(node)
            if hit is not None:
                return hit
            self._table[node] = len(self.nodes)
        self.nodes.append(node)
        return len(self.nodes) - 1

    def input(self, key) -> int:
        n = self.inputs.get(key)
        if n is None:
            self.nodes.append(("INPUT", key))
            n = self.inputs[key] = len(self.nodes) - 1
        return n

    def const(self, bit) -> int:
        return self.TRUE if bit else self.FALSE

    def _complement(self, a, b) -> bool:
        na, nb = self.nodes[a], self.nodes[b]
        return (nb[0] == "NOT" and nb[1] == a) or (na[0] == "NOT" and na[1] == b)

    def NOT(self, a):
        if self.strash:
            if a < 2:
                return 1 - a
            node = self.nodes[a]
            if node[0] == "NOT":
                return node[1]
        return self._add(("NOT", a))

    def AND(self, a, b):
        if self.strash:
            if a > b:
                a, b = b, a
            if a == 0:
                return 0
            if a == 1 or a == b:
                return b
            if self._complement(a, b):
                return 0
        return self._add(("AND", a, b))

    def OR(self, a, b):
        if self.strash:
            if a > b:
                a, b = b, a
            if a == 1:
                return 1
            if a == 0 or a == b:
                return b
            if self._complement(a, b):
                return 1
            return self.NOT(self.AND(self.NOT(a), self.NOT(b)))
        return self._add(("OR", a, b))

    def XOR(self, a, b):
        if self.strash:
            if a > b:
                a, b = b, a
            if a == 0:
                return b
            if a == 1:
                return self.NOT(b)
            if a == b:
                return 0
            if self._complement(a, b):
                return 1
            na, nb = self.nodes[a], self.nodes[b]
            # a XOR (a AND y) = a AND NOT y
            for x, nx in ((a, nb), (b, na)):
                if nx[0] == "AND" and x in nx[1:]:
                    y = nx[2] if nx[1] == x else nx[1]
                    return self.AND(x, self.NOT(y))
            if na[0] == "NOT" or nb[0] == "NOT":
                # push inversions out so equivalent forms hash together
                ia = na[1] if na[0] == "NOT" else a
                ib = nb[1] if nb[0] == "NOT" else b
                flip = (na[0] == "NOT") != (nb[0] == "NOT")
                x = self.XOR(ia, ib)
                return self.NOT(x) if flip else x
        return self._add(("XOR", a, b))

    def XNOR(self, a, b):
        return self.NOT(self.XOR(a, b))

    def MUX(self, sel, then, other):
        if self.strash:
            if then == other or sel == 1:
                return then
            if sel == 0:
                return other
            if then == 1 and other == 0:
                return sel
            if then == 0 and other == 1:
                return self.NOT(sel)
            # a branch that only strengthens the other one by a conjunct
            nt, no = self.nodes[then], self.nodes[other]
            if nt[0] == "AND" and other in nt[1:]:
                x = nt[2] if nt[1] == other else nt[1]
                return self.AND(other, self.OR(self.NOT(sel), x))
            if no[0] == "AND" and then in no[1:]:
                x = no[2] if no[1] == then else no[1]
                return self.AND(then, self.OR(sel, x))
        return self.OR(self.AND(sel, then), self.AND(self.NOT(sel), other))

    def and_all(self, bits):
        acc = self.TRUE
        for b in bits:
            acc = self.AND(acc, b)
        return acc

    def or_all(self, bits):
        acc = self.FALSE
        for b in bits:
            acc = self.OR(acc, b)
        return acc

    # ------------------------------------------------------------------
    def evaluate(self, values: dict, mask: int = 1) -> list[int]:
        """Evaluate every node bit-parallel.

        ``values`` maps input keys to integers whose bit ``i`` is the value
        in lane ``i``; missing inputs are 0.  ``mask`` selects the lanes.
        """
        out = [0] * len(self.nodes)
        out[1] = mask
        for i in range(2, len(self.nodes)):
            node = self.nodes[i]
            op = node[0]
            if op == "AND":
                out[i] = out[node[1]] & out[node[2]]
            elif op == "OR":
                out[i] = out[node[1]] | out[node[2]]
            elif op == "XOR":
                out[i] = out[node[1]] ^ out[node[2]]
            elif op == "NOT":
                out[i] = mask ^ out[node[1]]
            elif op == "INPUT":
                out[i] = values.get(node[1], 0) & mask
            else:
                out[i] = mask if node[1] else 0
        return out

    def cone(self, roots) -> list[int]:
        """Indices of all nodes the roots depend on, ascending."""
        seen = set()
        stack = list(roots)
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            node = self.nodes[n]
            if node[0] in GATES:
                stack.extend(node[1:])
        return sorted(seen)

    def gate_counts(self, roots=None) -> dict:
        idx = range(len(self.nodes)) if roots is None else self.cone(roots)
        counts = {}
        for i in idx:
            op = self.nodes[i][0]
            counts[op] = counts.get(op, 0) + 1
        return counts

    def netlist(self, roots=None) -> str:
        """Human-readable dump of the circuit (or of the cone of ``roots``)."""
        idx = range(len(self.nodes)) if roots is None else self.cone(roots)
        lines = []
        for i in idx:
            node = self.nodes[i]
            if node[0] == "INPUT":
                name, bit, cycle = node[1]
                tag = "config" if cycle is None else f"cycle {cycle}" if isinstance(cycle, int) else cycle
                lines.append(f"n{i} = INPUT {name}[{bit}] ({tag})")
            elif node[0] == "CONST":
                lines.append(f"n{i} = {'TRUE' if node[1] else 'FALSE'}")
            else:
                lines.append(f"n{i} = {node[0]} " + " ".join(f"n{a}" for a in node[1:]))
        for name, bits in sorted(self.outputs.items()):
            lines.append(f"output {name} = " + " ".join(f"n{b}" for b in bits))
        return "\n".join(lines) + "\n"
