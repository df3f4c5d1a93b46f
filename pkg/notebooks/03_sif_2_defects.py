# %% [markdown]
# # SIF-2: finding a missing variable
#
# Two seeded defects in the SIF-2 analogue.  In one the requirement forgets
# the safety-error condition, in the other the program forgets the external
# access condition when releasing the key.  Each comes with a repaired
# twin.  We go through the manifest loader and the report, as the command
# line does.

# %%
import tempfile
from pathlib import Path

from scanverif.corpus import write_corpus
from scanverif.engines import replay_counterexample, run_case
from scanverif.manifest import load_manifest
from scanverif.report import build_report, case_report, render_text

corpus = Path(tempfile.mkdtemp())
write_corpus(corpus)
print(sorted(p.name for p in corpus.glob("sif_2*.yaml")))

# %%
def check(name):
    m = load_manifest(corpus / f"{name}.yaml")
    rows = []
    for mc in m.cases:
        v = run_case(mc.case, mc.engine, mc.bound)
        rows.append(case_report(mc.case.id, mc.engine, v, mc.case.program, mc.case.requirement_ids))
        if v.counterexample is not None:
            assert replay_counterexample(mc.case, v.counterexample).confirmed
    return build_report(rows, name)

# %% [markdown]
# The specification defect: the beam-mode requirement without
# `N_NO_SAFETY_ERR`.  The program still leaves beam mode only when there is
# no safety error, so the weaker requirement is violated.

# %%
report = check("sif_2_missing_spec_var")
print(render_text(report))

# %% [markdown]
# The program defect breaks the key release on every chain.

# %%
report = check("sif_2_missing_program_var")
print(report["summary"], "exit code", report["exit_code"])
first = next(c for c in report["cases"] if c["outcome"] == "violated")
for row in first["counterexample"]["table"]["rows"]:
    if row["signal"] in ("N_EXT_ACCE_OK", "N_SECU_NO_REQ_Down", "N_MODE_BEAM", "O_RLS_ACCESS"):
        print(row["signal"], row["values"])

# %%
for name in ("sif_2_missing_spec_var_fixed", "sif_2_missing_program_var_fixed"):
    print(name, check(name)["summary"])
