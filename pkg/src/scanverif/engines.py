"""Verification engines and counterexample replay.

``verify_explicit`` enumerates every configuration and input sequence with
the reference interpreter; ``verify_bmc`` bit-blasts the unrolled program
and decides it with the internal CDCL solver.  Both return a ``Verdict``.
Violations carry a ``Counterexample`` that ``replay_counterexample``
re-executes on the interpreter.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .cnf import to_cnf
from .encoder import encode_cycle, unroll
from .interp import ScenarioError, initial_state, run_cycle, run_scenario
from .ir import Program, Requirement, bits_to_value, state_layout, typecheck_program

SATISFIED, VIOLATED, UNKNOWN, ERROR = "satisfied", "violated", "unknown", "error"
OUTCOMES = (SATISFIED, VIOLATED, UNKNOWN, ERROR)

DEFAULT_STATEFUL_BOUND = 16
DEFAULT_TIMEOUT = 300.0
DEFAULT_CONFLICTS = 10_000_000


@dataclass(frozen=True)
class VerificationCase:
    id: str
    program: Program          # typechecked, with the requirements asserted
    requirement_ids: tuple
    bound: int | None = None  # None selects the default bound

    @property
    def stateless(self) -> bool:
        return not state_layout(self.program)

    @property
    def uses_old(self) -> bool:
        return any(self.program.requirement(r).uses_old() for r in self.requirement_ids)

    def default_bound(self) -> int:
        if self.stateless and not self.uses_old:
            return 1
        return DEFAULT_STATEFUL_BOUND

    def resolved_bound(self, bound=None) -> int:
        k = bound if bound is not None else self.bound if self.bound is not None else self.default_bound()
        if k < 1:
            raise ValueError("bound must be at least 1")
        return k


def make_case(program: Program, requirement, case_id: str | None = None, bound: int | None = None) -> VerificationCase:
    """Build a case checking one requirement.

    ``requirement`` is either the id of an inline assertion already in the
    program or a Requirement evaluated at the end of each cycle.
    """
    if isinstance(requirement, Requirement):
        program = program.with_end_requirements([requirement])
        rid = requirement.id
    else:
        rid = requirement
        program.requirement(rid)
    program = typecheck_program(program)
    return VerificationCase(case_id or rid, program, (rid,), bound)


@dataclass
class Counterexample:
    requirement_id: str
    cycle: int                 # 1-based cycle in which the requirement fails
    config: dict
    inputs: list               # one valuation per cycle up to ``cycle``
    states: list = field(default_factory=list)   # persistent values after each cycle
    outputs: list = field(default_factory=list)  # outputs after each cycle


@dataclass
class Verdict:
    outcome: str
    bound: int | None = None
    counterexample: Counterexample | None = None
    message: str | None = None
    exhaustive: bool = False
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"bad outcome {self.outcome!r}")
        if self.outcome == VIOLATED and self.counterexample is None:
            raise ValueError("a violated verdict needs a counterexample")
        if self.outcome == SATISFIED and self.bound is None:
            raise ValueError("a satisfied verdict needs its bound")

    @property
    def scope(self) -> str | None:
        if self.outcome != SATISFIED:
            return None
        return "exhaustive" if self.exhaustive else f"up to bound {self.bound}"


# --------------------------------------------------------------------------
# explicit-state enumeration

def _domain(dtype):
    if dtype.kind == "BOOL":
        return (False, True)
    if dtype.kind == "WORD":
        return range(1 << 16)
    return itertools.product(*[list(_domain(dtype.elem))] * dtype.length)


def _valuations(decls):
    names = [d.name for d in decls]
    for values in itertools.product(*[list(_domain(d.dtype)) for d in decls]):
        yield dict(zip(names, values))


class _Budget(Exception):
    pass


def verify_explicit(case: VerificationCase, bit_budget: int = 24, bound: int | None = None,
                    time_limit: float | None = None) -> Verdict:
    """Exhaustively run every configuration and input sequence.

    Enumeration is lexicographic with the first declared configuration
    variable most significant, then cycle-1 inputs, cycle-2 inputs, and so
    on; the first violating sequence is returned.
    """
    k_max = case.resolved_bound(bound)
    program = case.program
    config_decls, input_decls = program.nondet_decls()
    cfg_bits = sum(d.dtype.width for d in config_decls)
    in_bits = sum(d.dtype.width for d in input_decls)
    needed = cfg_bits + k_max * in_bits
    stats = {"nondet_bits": needed, "evaluations": 0}
    if needed > bit_budget:
        return Verdict(UNKNOWN, k_max, message=f"explicit search needs {needed} nondeterministic bits; budget is {bit_budget}",
                       stats=stats)
    t0 = time.monotonic()
    inputs_all = list(_valuations(input_decls))
    reqs = case.requirement_ids

    def dfs(state, k, seq, results):
        for inp in inputs_all:
            res = run_cycle(program, state, inp)
            stats["evaluations"] += 1
            if time_limit is not None and stats["evaluations"] % 1024 == 0 and time.monotonic() - t0 > time_limit:
                raise _Budget()
            for rid in reqs:
                if not res.holds(rid):
                    return rid, seq + [inp], results + [res]
            if k + 1 < k_max:
                found = dfs(res.state, k + 1, seq + [inp], results + [res])
                if found:
                    return found
        return None

    try:
        for config in _valuations(config_decls):
            found = dfs(initial_state(program, config), 0, [], [])
            if found:
                rid, seq, results = found
                cex = Counterexample(rid, len(seq), config, seq,
                                     [dict(r.state.statics) for r in results],
                                     [dict(r.outputs) for r in results])
                stats["time"] = time.monotonic() - t0
                return Verdict(VIOLATED, k_max, cex, stats=stats)
    except _Budget:
        stats["time"] = time.monotonic() - t0
        return Verdict(UNKNOWN, k_max, message="time limit", stats=stats)
    stats["time"] = time.monotonic() - t0
    return Verdict(SATISFIED, k_max, exhaustive=case.stateless, stats=stats)


# --------------------------------------------------------------------------
# SAT-based bounded model checking

@dataclass
class BmcProblem:
    system: object
    unrolled: object
    cnf: object


def build_bmc_problem(case: VerificationCase, bound: int | None = None, system=None) -> BmcProblem:
    k = case.resolved_bound(bound)
    ts = encode_cycle(case.program) if system is None else system
    u = unroll(ts, k, case.requirement_ids)
    return BmcProblem(ts, u, to_cnf(u.circuit, u.violation))


def _decode(case, problem, model_lits):
    ts, u, cnf = problem.system, problem.unrolled, problem.cnf
    values = {key: int(model_lits(lit)) for key, lit in cnf.bit_to_lit.items()}
    node_val = u.circuit.evaluate(values, 1)
    cycle = rid = None
    for k in range(u.bound):
        for r in u.requirement_ids:
            if not node_val[u.asserts[k][r]]:
                cycle, rid = k, r
                break
        if rid is not None:
            break
    if rid is None:
        raise RuntimeError("solver model does not violate any assertion")

    def leaf_value(name, dt, tag):
        return bits_to_value(dt, [values.get((name, i, tag), 0) for i in range(dt.width)])

    config = {n: leaf_value(n, dt, None) for n, dt in ts.config_vars}
    inputs = [{n: leaf_value(n, dt, k) for n, dt in ts.input_vars} for k in range(cycle + 1)]
    types_out = dict(ts.output_vars)
    types_state = {key: dt for key, dt, _ in ts.state_vars}
    outputs = [{n: bits_to_value(types_out[n], [node_val[b] for b in bits]) for n, bits in u.outputs[k].items()}
               for k in range(cycle + 1)]
    states = [{n: bits_to_value(types_state[n], [node_val[b] for b in bits]) for n, bits in u.states[k].items()}
              for k in range(cycle + 1)]
    return Counterexample(rid, cycle + 1, config, inputs, states, outputs)


def verify_bmc(case: VerificationCase, bound: int | None = None, time_limit: float | None = DEFAULT_TIMEOUT,
               conflict_limit: int | None = DEFAULT_CONFLICTS) -> Verdict:
    """Bounded model check of the case up to ``bound`` cycles."""
    from .sat import SAT, UNSAT, Solver

    k = case.resolved_bound(bound)
    t_start = time.monotonic()
    system = encode_cycle(case.program)
    stats = {"encode_time": time.monotonic() - t_start, "solve_time": 0.0,
             "variables": 0, "clauses": 0, "decisions": 0, "conflicts": 0}
    # deepen one cycle at a time so that a violation is reported at its earliest cycle
    for depth in range(1, k + 1):
        t0 = time.monotonic()
        problem = build_bmc_problem(case, depth, system)
        t1 = time.monotonic()
        cnf = problem.cnf
        remaining = None if time_limit is None else max(0.0, time_limit - (t1 - t_start))
        budget = None if conflict_limit is None else max(0, conflict_limit - stats["conflicts"])
        res = Solver(cnf.num_vars, cnf.clauses).solve(budget, remaining)
        t2 = time.monotonic()
        stats["encode_time"] += t1 - t0
        stats["solve_time"] += t2 - t1
        stats["variables"], stats["clauses"] = cnf.num_vars, len(cnf.clauses)
        stats["decisions"] += res.stats.get("decisions", 0)
        stats["conflicts"] += res.stats.get("conflicts", 0)
        if res.status == SAT:
            cex = _decode(case, problem, (lambda lit: False) if cnf.num_vars == 0 else res.value)
            return Verdict(VIOLATED, k, cex, stats=stats)
        if res.status != UNSAT:
            return Verdict(UNKNOWN, k, message=res.stats.get("limit", "resource limit"), stats=stats)
    return Verdict(SATISFIED, k, exhaustive=system.stateless, stats=stats)


# --------------------------------------------------------------------------
# replay

@dataclass
class ReplayReport:
    confirmed: bool
    message: str
    divergence: dict | None = None   # first differing signal, if any


def replay_counterexample(case: VerificationCase, cex: Counterexample) -> ReplayReport:
    """Re-run a counterexample on the interpreter and compare every signal."""
    try:
        trace = run_scenario(case.program, cex.config, cex.inputs)
    except (ScenarioError, KeyError) as exc:
        return ReplayReport(False, f"counterexample does not fit the program: {exc}")
    if not 1 <= cex.cycle <= len(trace.cycles):
        return ReplayReport(False, f"cycle {cex.cycle} is outside the replayed trace")
    divergence = None
    for k, res in enumerate(trace.cycles[:cex.cycle], start=1):
        for kind, engine_snap, interp_snap in (("output", cex.outputs, res.outputs),
                                               ("state", cex.states, res.state.statics)):
            if len(engine_snap) < k:
                continue
            for name in sorted(engine_snap[k - 1]):
                if engine_snap[k - 1][name] != interp_snap.get(name):
                    divergence = {"cycle": k, "kind": kind, "signal": name,
                                  "counterexample": engine_snap[k - 1][name], "interpreter": interp_snap.get(name)}
                    break
            if divergence:
                break
        if divergence:
            break
    fails = not trace.cycles[cex.cycle - 1].holds(cex.requirement_id)
    if not fails:
        msg = f"assertion holds: {cex.requirement_id} is satisfied at cycle {cex.cycle}"
        if divergence:
            msg += f"; first divergence at cycle {divergence['cycle']} on {divergence['signal']}"
        return ReplayReport(False, msg, divergence)
    if divergence:
        return ReplayReport(False, f"{cex.requirement_id} fails at cycle {cex.cycle}, but {divergence['kind']} "
                                   f"{divergence['signal']} diverges at cycle {divergence['cycle']}", divergence)
    return ReplayReport(True, f"confirmed: {cex.requirement_id} fails at cycle {cex.cycle}")


def run_case(case: VerificationCase, engine: str = "bmc", bound: int | None = None,
             time_limit: float | None = DEFAULT_TIMEOUT, conflict_limit: int | None = DEFAULT_CONFLICTS,
             bit_budget: int = 24) -> Verdict:
    """Run one engine, turning unexpected failures into an error verdict."""
    try:
        if engine == "explicit":
            return verify_explicit(case, bit_budget=bit_budget, bound=bound, time_limit=time_limit)
        if engine == "bmc":
            return verify_bmc(case, bound=bound, time_limit=time_limit, conflict_limit=conflict_limit)
        raise ValueError(f"unknown engine {engine!r}")
    except Exception as exc:  # surfaced in the report, never swallowed silently
        return Verdict(ERROR, message=f"{type(exc).__name__}: {exc}")
