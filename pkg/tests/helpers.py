"""Shared fixtures for the test-suite: random small programs and valuations."""

from __future__ import annotations

import random

from scanverif.engines import make_case
from scanverif.il_parser import parse_program
from scanverif.ir import typecheck_program

LATCH = """FUNCTION_BLOCK LATCH
VAR_INPUT
    s : BOOL;
    r : BOOL;
END_VAR
VAR_OUTPUT
    q : BOOL;
END_VAR
q := (q OR s) AND NOT r;
END_FUNCTION_BLOCK
"""


class _Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def bool_expr(self, atoms, depth=0):
        r = self.rng
        if depth >= 3 or r.random() < 0.3:
            return r.choice(atoms)
        k = r.random()
        if k < 0.15:
            return f"NOT {self.bool_expr(atoms, depth + 1)}"
        op = r.choice(["AND", "OR", "XOR", "=", "<>", "AND", "OR"])
        return f"({self.bool_expr(atoms, depth + 1)} {op} {self.bool_expr(atoms, depth + 1)})"


def random_program(seed: int, max_bits: int = 20, max_bound: int = 2):
    """IL text of a small random program with one inline assertion, and its bound.

    The configuration bits plus ``bound`` times the input bits never exceed
    ``max_bits``.  Function blocks carry state in outputs and statics and
    may call a latch; functions may read a WORD configuration value.
    """
    rng = random.Random(seed)
    g = _Gen(rng)
    fb = rng.random() < 0.55
    word = not fb and rng.random() < 0.35
    n_cfg = rng.randint(0, 1 if word else 2)
    arr = rng.random() < 0.25
    n_out = rng.randint(1, 2)
    n_static = rng.randint(0, 2) if fb else 0
    bound = rng.randint(1, max_bound) if fb else 1
    budget = max_bits - n_cfg - (16 if word else 0)
    per_cycle = max(1, budget // bound)
    n_in = rng.randint(1, max(1, min(4, per_cycle - (2 if arr else 0))))
    if n_in + (2 if arr else 0) > per_cycle:
        arr = False
    call = fb and rng.random() < 0.4

    cfg = [f"k{i}" for i in range(n_cfg)]
    ins = [f"x{i}" for i in range(n_in)]
    outs = [f"y{i}" for i in range(n_out)]
    stats = [f"s{i}" for i in range(n_static)]
    decl = ["VAR_INPUT"] + [f"    {n} : BOOL;" for n in ins]
    if arr:
        decl.append("    a : ARRAY[0..1] OF BOOL;")
    decl.append("END_VAR")
    if cfg or word:
        decl += ["VAR_CONFIG"] + [f"    {n} : BOOL;" for n in cfg]
        if word:
            decl.append("    w : WORD;")
        decl.append("END_VAR")
    decl += ["VAR_OUTPUT"] + [f"    {n} : BOOL;" for n in outs]
    if word:
        decl.append("    wy : WORD;")
    decl.append("END_VAR")
    if stats:
        decl += ["VAR"] + [f"    {n} : BOOL;" for n in stats] + ["END_VAR"]
    decl += ["VAR_TEMP", "    t : BOOL;", "END_VAR"]

    atoms = ins + cfg + ["TRUE", "FALSE"] + stats + (outs if fb else [])
    if arr:
        atoms += ["a[0]", "a[1]"]
    if word:
        atoms += [f"w.%X{rng.randint(0, 15)}" for _ in range(2)]
    body = []
    assert_line = None
    writable = outs + stats + ["t"]
    for _ in range(rng.randint(2, 5)):
        k = rng.random()
        tgt = rng.choice(writable)
        if k < 0.45:
            e = g.bool_expr(atoms)
            body.append(f"{tgt} := {e};")
            if assert_line is None and rng.random() < 0.35 and tgt not in e.replace("(", " ").replace(")", " ").split():
                assert_line = len(body)
                body.append(f"//#ASSERT {tgt} = {e};")
        elif k < 0.8:
            body.append(f"IF {g.bool_expr(atoms)} THEN")
            body.append(f"    {tgt} := {g.bool_expr(atoms)};")
            if rng.random() < 0.5:
                body.append(f"ELSIF {g.bool_expr(atoms)} THEN")
                body.append(f"    {rng.choice(writable)} := {g.bool_expr(atoms)};")
            if rng.random() < 0.5:
                body.append("ELSE")
                body.append(f"    {rng.choice(writable)} := {g.bool_expr(atoms)};")
            body.append("END_IF;")
        elif k < 0.9 and arr:
            body.append("FOR i := 0 TO 1 DO")
            body.append(f"    {tgt} := {tgt} XOR a[i];")
            body.append("END_FOR;")
        elif call:
            body.append(f"LATCH(s := {g.bool_expr(atoms)}, r := {g.bool_expr(atoms)}, q => {tgt});")
        else:
            body.append(f"t := {g.bool_expr(atoms)};")
        if "t" not in atoms and any(line.startswith("t :=") or " t :=" in line for line in body):
            atoms.append("t")
    if word:
        body.append(f"wy := w {rng.choice(['AND', 'OR', 'XOR'])} 16#{rng.randint(0, 0xFFFF):04X};")
    if assert_line is None:
        req_atoms = atoms + outs + (["t"] if "t" not in atoms else [])
        if fb and rng.random() < 0.4:
            req_atoms.append(f"OLD({rng.choice(outs + stats)})")
        req = g.bool_expr(req_atoms)
        if word and rng.random() < 0.5:
            req = f"(((wy AND 16#000F) = 16#{rng.randint(0, 15):04X}) OR {req})"
        body.append(f"//#ASSERT {req};")
    kw = "FUNCTION_BLOCK" if fb else "FUNCTION"
    src = ([LATCH] if call else []) + [f"{kw} RANDOM_{seed}", *decl, *body, f"END_{kw}", ""]
    return "\n".join(src), bound


def random_case(seed: int, max_bits: int = 20, max_bound: int = 2):
    src, bound = random_program(seed, max_bits, max_bound)
    program = typecheck_program(parse_program(src))
    return make_case(program, program.requirements[0].id, bound=bound)


def random_valuation(rng: random.Random, decls) -> dict:
    out = {}
    for d in decls:
        out[d.name] = random_value(rng, d.dtype)
    return out


def random_value(rng: random.Random, dtype):
    if dtype.kind == "BOOL":
        return rng.random() < 0.5
    if dtype.kind == "WORD":
        return rng.randrange(1 << 16)
    return tuple(random_value(rng, dtype.elem) for _ in range(dtype.length))


def fbd_rows(decls, rng: random.Random, word_samples: int = 64):
    """Every BOOL input valuation, each paired with sampled WORD inputs."""
    import itertools

    bools = [d.name for d in decls if d.section == "INPUT" and d.dtype.kind == "BOOL"]
    words = [d.name for d in decls if d.section == "INPUT" and d.dtype.kind == "WORD"]
    fixed = [0x0000, 0xFFFF, 0x5555, 0xA5A5]
    for combo in itertools.product([False, True], repeat=len(bools)):
        for k in range(word_samples):
            row = dict(zip(bools, combo))
            for w in words:
                row[w] = fixed[k] if k < len(fixed) else rng.randrange(1 << 16)
            yield row


def fbd_mismatches(xml: str, externals=None, word_samples: int = 64, seed: int = 0) -> tuple[int, list]:
    """Compare lowered statements with direct gate-graph evaluation.

    Returns the number of rows checked and the rows that disagree.
    """
    from scanverif.fbd import evaluate_network, fbd_to_pou, parse_fbd_document, parse_interface
    from scanverif.interp import initial_state, run_cycle
    from scanverif.ir import Program

    decls = parse_interface(xml)
    types = {d.name: d.dtype for d in decls}
    networks = parse_fbd_document(xml, externals)
    pou = fbd_to_pou(xml, "FBD", externals=externals)
    program = typecheck_program(Program((pou,), pou.name))
    outputs = [d.name for d in decls if d.section == "OUTPUT"]
    rng = random.Random(seed)
    checked, bad = 0, []
    for row in fbd_rows(decls, rng, word_samples):
        env = dict(row)
        for d in decls:
            env.setdefault(d.name, False if d.dtype.kind == "BOOL" else 0)
        for net in networks:
            env.update(evaluate_network(net, env, types))
        lowered = run_cycle(program, initial_state(program, {}), row).outputs
        checked += 1
        if any(lowered[o] != env[o] for o in outputs):
            bad.append(row)
    return checked, bad


def _lanes(bits) -> int:
    """Pack a sequence of 0/1 values into an integer, element k at bit k."""
    return int("".join("1" if b else "0" for b in reversed(bits)) or "0", 2)


def circuit_mismatches(program, draws: int, seed: int = 0, chunk: int = 2048) -> list:
    """Bit-exact comparison of one scan cycle: interpreter against circuit.

    Configuration, inputs and the persistent state at cycle start are drawn
    at random.  The circuit is evaluated on ``chunk`` draws at once, one
    draw per bit lane.  Returns ``(draw, signal)`` for every disagreement.
    """
    from scanverif.encoder import encode_cycle
    from scanverif.interp import initial_state, run_cycle
    from scanverif.ir import value_to_bits

    ts = encode_cycle(program)
    config, inputs = program.nondet_decls()
    rng = random.Random(seed)
    bad = []
    done = 0
    while done < draws:
        n = min(chunk, draws - done)
        leaf_bits, expect_bits = {}, {}

        def put(table, key, dtype, value):
            for i, b in enumerate(value_to_bits(dtype, value)):
                table.setdefault((key, i), []).append(b)

        for _ in range(n):
            cfg = random_valuation(rng, config)
            inp = random_valuation(rng, inputs)
            start = initial_state(program, cfg)
            statics = {key: random_value(rng, dt) for key, dt, _ in ts.state_vars}
            res = run_cycle(program, type(start)(start.config, statics, 0), inp)
            for name, dt in ts.config_vars:
                put(leaf_bits, (name, None), dt, cfg[name])
            for name, dt in ts.input_vars:
                put(leaf_bits, (name, "in"), dt, inp[name])
            for key, dt, _ in ts.state_vars:
                put(leaf_bits, (key, "state"), dt, statics[key])
                put(expect_bits, f"next:{key}", dt, res.state.statics[key])
            for name, dt in ts.output_vars:
                put(expect_bits, f"out:{name}", dt, res.outputs[name])
            verdicts = res.verdicts()
            for rid in ts.requirement_ids:
                expect_bits.setdefault((f"assert:{rid}", 0), []).append(verdicts.get(rid, True))
        leaves = {(name, i, tag): _lanes(bits) for ((name, tag), i), bits in leaf_bits.items()}
        values = ts.circuit.evaluate(leaves, (1 << n) - 1)
        for (signal, i), bits in expect_bits.items():
            got = values[ts.circuit.outputs[signal][i]]
            diff = got ^ _lanes(bits)
            for lane in range(n):
                if diff >> lane & 1:
                    bad.append((done + lane, f"{signal}[{i}]"))
        done += n
    return bad
