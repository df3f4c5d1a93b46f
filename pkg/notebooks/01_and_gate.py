# %% [markdown]
# # An AND gate, end to end
#
# The smallest program worth verifying: a function that ANDs two inputs and
# an assertion comment stating exactly that.  We parse it, run a few scan
# cycles, look at the circuit the encoder builds and then let both engines
# decide the assertion.

# %%
from scanverif import make_case, parse_program, typecheck_program, verify_bmc, verify_explicit
from scanverif.corpus import AND_GATE_SOURCE
from scanverif.encoder import encode_cycle
from scanverif.engines import replay_counterexample
from scanverif.interp import initial_state, run_cycle

print(AND_GATE_SOURCE)

# %%
program = typecheck_program(parse_program(AND_GATE_SOURCE))
req = program.requirements[0]
print(req.id, "->", req.text)

# %% [markdown]
# One scan cycle per input combination.  The assertion is checked where the
# comment sits, here at the end of the body.

# %%
state = initial_state(program, {})
for a in (False, True):
    for b in (False, True):
        res = run_cycle(program, state, {"var1": a, "var2": b})
        print(a, b, res.outputs, res.assertions)

# %% [markdown]
# The encoder turns the cycle into a bit circuit.  Structural hashing
# notices that the assertion compares the AND gate with itself, so the
# assertion bit is the constant TRUE node before any solver runs.

# %%
ts = encode_cycle(program)
print("nondeterministic bits:", ts.nondet_bits)
print("gates:", ts.circuit.gate_counts())
print("assertion node:", ts.circuit.outputs[f"assert:{req.id}"])

# %%
case = make_case(program, req.id)
for engine in (verify_explicit, verify_bmc):
    v = engine(case)
    print(engine.__name__, v.outcome, v.scope, v.stats)

# %% [markdown]
# Now break the program: OR instead of AND.  The explicit engine walks the
# valuations in order and stops at the first failing one.

# %%
mutant = typecheck_program(parse_program(AND_GATE_SOURCE.replace("var1 AND var2;", "var1 OR var2;")))
bad = make_case(mutant, req.id)
v = verify_explicit(bad)
print(v.outcome, v.counterexample)
print(replay_counterexample(bad, v.counterexample).message)

# %%
v = verify_bmc(bad)
print(v.outcome, v.counterexample.inputs, v.stats["decisions"], "decisions")
