# %% [markdown]
# # SIF-X1: sixteen safety chains
#
# The generated SIF-X1 analogue has the published interface size: 94 WORD
# and 4 BOOL configuration variables, 21 WORD and 2 BOOL inputs.  Exhaustive
# enumeration is hopeless, bounded model checking is not.

# %%
import time

from scanverif import log2_input_space, parse_program, typecheck_program, verify_bmc, verify_explicit
from scanverif.corpus import (
    REDUCED, TWO_DOOR_EXPECTED_SAFE, SifX1Params, complete_valuation, gen_sif_x1, two_door_scenario,
)
from scanverif.engines import make_case, replay_counterexample
from scanverif.interp import run_scenario
from scanverif.requirements import instantiate_chain_cases

gen = gen_sif_x1()
program = typecheck_program(parse_program(gen.source))
print(len(gen.source.splitlines()), "lines")
print("input space: 2 **", log2_input_space(program))

# %% [markdown]
# The worked example: two doors, one emergency handle, door 1 in chain 0 and
# door 4 in chain 1.  Words not listed in the example are set all-safe.

# %%
config, inputs = two_door_scenario()
cfg_decls, in_decls = program.nondet_decls()
trace = run_scenario(program, complete_valuation(cfg_decls, config), [complete_valuation(in_decls, inputs)])
safe = trace.cycles[0].outputs["N_EISa_Safe"]
print(f"N_EISa_Safe = {safe:016b}", safe == TWO_DOOR_EXPECTED_SAFE)

# %% [markdown]
# One requirement template, instantiated per chain.

# %%
template = gen.chain_templates[0]
print(template.instance_text(0))
cases = instantiate_chain_cases(template, program, bound=1)

t0 = time.monotonic()
verdicts = {c.id: verify_bmc(c) for c in cases}
print(f"{time.monotonic() - t0:.1f} s")
for cid, v in verdicts.items():
    print(cid, v.outcome, v.scope, v.stats["variables"], "variables", v.stats["conflicts"], "conflicts")

# %% [markdown]
# The explicit engine refuses the full program and says why.

# %%
print(verify_explicit(cases[0]).message)

# %% [markdown]
# A program that forgets the door bypass is caught on every chain.  The
# counterexample is replayed on the interpreter before we trust it.

# %%
broken = gen_sif_x1(SifX1Params(drop_bypass=True))
broken_program = typecheck_program(parse_program(broken.source))
case = instantiate_chain_cases(template, broken_program, bound=1)[0]
v = verify_bmc(case)
cex = v.counterexample
print(v.outcome, "at cycle", cex.cycle)
print({k: f"{cex.inputs[0][k]:016b}" for k in ("I_EISa_Pos_Stat", "I_EISa_Bypass")})
print(replay_counterexample(case, cex).message)

# %% [markdown]
# A reduced variant with BOOL arrays is small enough for both engines, which
# is how the two are cross-checked.

# %%
small = gen_sif_x1(REDUCED)
small_program = typecheck_program(parse_program(small.source))
print("input space: 2 **", log2_input_space(small_program))
for c in instantiate_chain_cases(small.chain_templates[0], small_program, bound=1):
    print(c.id, verify_explicit(c).outcome, verify_bmc(c).outcome)
