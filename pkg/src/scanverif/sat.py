"""Conflict-driven clause-learning SAT solver.

Two-watched-literal propagation, first-UIP learning and non-chronological
backjumping.  Decisions are deterministic: the lowest-numbered unassigned
variable is tried false first, so identical inputs always yield identical
models.  No restarts and no clause deletion.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"


@dataclass
class SatResult:
    status: str
    model: list | None = None   # model[v] for v in 1..n (index 0 unused)
    stats: dict = field(default_factory=dict)

    def value(self, lit: int) -> bool:
        v = self.model[abs(lit)]
        return v if lit > 0 else not v


class Solver:
    def __init__(self, num_vars: int, clauses):
        self.n = num_vars
        # literal code: 2*v for v, 2*v+1 for -v
        self.lval = [0] * (2 * num_vars + 2)
        self.level = [0] * (num_vars + 1)
        self.reason = [-1] * (num_vars + 1)
        self.watches = [[] for _ in range(2 * num_vars + 2)]
        self.clauses = []
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.next_var = 1
        self.ok = True
        self.decisions = self.conflicts = self.propagations = 0
        units = []
        for cl in clauses:
            codes = sorted({2 * abs(x) + (x < 0) for x in cl})
            present = set(codes)
            if any(c ^ 1 in present for c in codes):
                continue  # tautology
            if not codes:
                self.ok = False
            elif len(codes) == 1:
                units.append(codes[0])
            else:
                self._attach(codes)
        for u in units:
            if self.lval[u] == -1:
                self.ok = False
            elif self.lval[u] == 0:
                self._assign(u, -1)

    def _attach(self, codes):
        ci = len(self.clauses)
        self.clauses.append(codes)
        self.watches[codes[0]].append(ci)
        self.watches[codes[1]].append(ci)
        return ci

    def _assign(self, code, reason):
        self.lval[code] = 1
        self.lval[code ^ 1] = -1
        v = code >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _propagate(self):
        lval, watches, clauses = self.lval, self.watches, self.clauses
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if lval[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if lval[c[k]] != -1:
                        c[1] = c[k]
                        c[k] = false_lit
                        watches[c[1]].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if lval[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    self._assign(first, ci)
            del ws[j:]
        return -1

    def _analyze(self, confl):
        seen = bytearray(self.n + 1)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        level, trail, reason = self.level, self.trail, self.reason
        c = self.clauses[confl]
        start = 0
        while True:
            for q in c[start:]:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = 0
            counter -= 1
            if counter == 0:
                break
            c = self.clauses[reason[v]]
            start = 1
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        for code in self.trail[lim:]:
            self.lval[code] = 0
            self.lval[code ^ 1] = 0
            v = code >> 1
            self.reason[v] = -1
            if v < self.next_var:
                self.next_var = v
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _decide(self):
        lval = self.lval
        v = self.next_var
        while v <= self.n and lval[2 * v] != 0:
            v += 1
        self.next_var = v
        if v > self.n:
            return False
        self.decisions += 1
        self.trail_lim.append(len(self.trail))
        self._assign(2 * v + 1, -1)  # false first
        return True

    def solve(self, conflict_limit=None, time_limit=None) -> SatResult:
        t0 = time.monotonic()
        if not self.ok:
            return SatResult(UNSAT, stats=self.stats())
        if self._propagate() >= 0:
            return SatResult(UNSAT, stats=self.stats())
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                if not self.trail_lim:
                    return SatResult(UNSAT, stats=self.stats())
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self._assign(learnt[0], ci)
                if conflict_limit is not None and self.conflicts >= conflict_limit:
                    return SatResult(UNKNOWN, stats=self.stats("conflict limit"))
                if time_limit is not None and self.conflicts % 64 == 0 and time.monotonic() - t0 > time_limit:
                    return SatResult(UNKNOWN, stats=self.stats("time limit"))
            else:
                if not self._decide():
                    model = [False] + [self.lval[2 * v] == 1 for v in range(1, self.n + 1)]
                    return SatResult(SAT, model, self.stats())
                if time_limit is not None and self.decisions % 256 == 0 and time.monotonic() - t0 > time_limit:
                    return SatResult(UNKNOWN, stats=self.stats("time limit"))

    def stats(self, limit=None):
        s = {"decisions": self.decisions, "conflicts": self.conflicts,
             "propagations": self.propagations, "clauses": len(self.clauses)}
        if limit:
            s["limit"] = limit
        return s


def solve(num_vars, clauses, conflict_limit=None, time_limit=None) -> SatResult:
    return Solver(num_vars, clauses).solve(conflict_limit, time_limit)
