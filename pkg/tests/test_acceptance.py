"""Acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (also collected into the terminal
summary) before asserting, so a failing criterion still reports its
measurement.
"""

import itertools
import json
import time

import pytest

from conftest import ACCEPTANCE_LINES, VIOLATIONS
from helpers import circuit_mismatches, fbd_mismatches, random_case
from scanverif import cli
from scanverif.corpus import WORD_AND_NETWORK, corpus_entries, fbd_documents
from scanverif.engines import SATISFIED, VIOLATED, replay_counterexample, verify_bmc, verify_explicit
from scanverif.fbd import lower_to_ir, parse_fbd_xml
from scanverif.ir import WORD, And, Assign, VarDecl, VarRef
from scanverif.manifest import load_manifest
from scanverif.report import strip_timings, to_json
from scanverif.requirements import SpecTemplate
from test_requirements import truth_table_mismatches


def report(number: int, title: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_input_space_arithmetic(corpus_dir, capsys):
    found, slowest = {}, 0.0
    for name in ("sif_x1", "sif_2"):
        t0 = time.monotonic()
        code = cli.main(["inspect", str(corpus_dir / f"{name}.il")])
        slowest = max(slowest, time.monotonic() - t0)
        out = capsys.readouterr().out
        line = next(line for line in out.splitlines() if line.startswith("log2_input_space:"))
        found[name] = (code, int(line.split(":")[1]))
    ok = found == {"sif_x1": (0, 1846), "sif_2": (0, 305)} and slowest < 1.0
    report(1, "input-space exponents", ok,
           f"SIF-X1 2^{found['sif_x1'][1]}, SIF-2 2^{found['sif_2'][1]}, slowest inspect {slowest:.2f} s")


def test_sif_x1_verification(corpus_dir):
    m = load_manifest(corpus_dir / "sif_x1.yaml")
    t0 = time.monotonic()
    verdicts = [verify_bmc(mc.case, 1) for mc in m.cases]
    elapsed = time.monotonic() - t0
    satisfied = sum(v.outcome == SATISFIED for v in verdicts)
    cexs = sum(v.counterexample is not None for v in verdicts)
    ok = len(m.cases) == 16 and satisfied == 16 and cexs == 0 and elapsed < 120
    report(2, "SIF-X1 chain cases at K=1", ok,
           f"{satisfied}/{len(m.cases)} satisfied, {cexs} counterexamples, {elapsed:.1f} s")


def test_seeded_defect_detection(corpus_dir):
    details, ok = [], True
    for defect in ("missing_spec_var", "missing_program_var"):
        violated = confirmed = 0
        slowest = 0.0
        for mc in load_manifest(corpus_dir / f"sif_2_{defect}.yaml").cases:
            t0 = time.monotonic()
            v = verify_bmc(mc.case, mc.bound)
            slowest = max(slowest, time.monotonic() - t0)
            if v.outcome == VIOLATED:
                violated += 1
                confirmed += replay_counterexample(mc.case, v.counterexample).confirmed
        fixed = [verify_bmc(mc.case, mc.bound).outcome
                 for mc in load_manifest(corpus_dir / f"sif_2_{defect}_fixed.yaml").cases]
        fixed_ok = all(o == SATISFIED for o in fixed)
        ok &= violated > 0 and confirmed == violated and fixed_ok and slowest < 120
        details.append(f"{defect}: {violated} violated ({confirmed} replayed), fixed variant "
                       f"{'satisfied' if fixed_ok else 'NOT satisfied'}, slowest case {slowest:.1f} s")
    report(3, "seeded defects", ok, "; ".join(details))


def test_oracle_equivalence():
    seeds = range(60)
    agree, disagreements, too_big = 0, [], []
    for seed in seeds:
        case = random_case(seed, max_bits=20, max_bound=2)
        k = case.resolved_bound()
        cfg, inp = case.program.nondet_decls()
        bits = sum(d.dtype.width for d in cfg) + k * sum(d.dtype.width for d in inp)
        if bits > 20 or k > 2:
            too_big.append(seed)
        a, b = verify_explicit(case), verify_bmc(case)
        if a.outcome == b.outcome and a.outcome in (SATISFIED, VIOLATED):
            agree += 1
        else:
            disagreements.append((seed, a.outcome, b.outcome))
    ok = agree == len(seeds) and not too_big
    outcomes = f"{agree}/{len(seeds)} programs agree"
    report(4, "explicit and BMC agree", ok,
           outcomes + (f"; disagreements {disagreements}" if disagreements else "")
           + (f"; over size {too_big}" if too_big else ""))


def test_circuit_fidelity(corpus_dir):
    draws = 10_000
    failures = {}
    for entry in corpus_entries():
        program = load_manifest(corpus_dir / f"{entry.name}.yaml").cases[0].case.program
        bad = circuit_mismatches(program, draws, seed=len(entry.name))
        if bad:
            failures[entry.name] = bad[:3]
    n = len(corpus_entries())
    report(5, "circuit matches interpreter", not failures,
           f"{n} corpus programs x {draws} random cycles, mismatches: {failures or 'none'}")


def test_fbd_lowering_fidelity():
    decls = [VarDecl("var1", WORD, "INPUT"), VarDecl("var2", WORD, "INPUT"), VarDecl("tmp1", WORD, "OUTPUT")]
    stmts = lower_to_ir(parse_fbd_xml(WORD_AND_NETWORK, externals={23: "tmp1"}), decls).stmts
    single_and = stmts == [Assign(VarRef("tmp1"), And(VarRef("var1"), VarRef("var2")))]
    rows, bad = 0, {}
    for name, (xml, ext) in sorted(fbd_documents().items()):
        checked, mismatches = fbd_mismatches(xml, ext)
        rows += checked
        if mismatches:
            bad[name] = mismatches[:3]
    ok = single_and and not bad
    report(6, "FBD lowering", ok,
           f"word AND network lowers to {'one AND assignment' if single_and else stmts}; "
           f"{len(fbd_documents())} networks, {rows} rows, mismatches: {bad or 'none'}")


def test_template_compiler_soundness():
    templates = []
    for n in (1, 2, 3):
        for values in itertools.product([0, 1], repeat=n):
            cases = tuple((f"c{i + 1}", v) for i, v in enumerate(values))
            templates.append(SpecTemplate("result", cases))
            for other in (0, 1):
                templates.append(SpecTemplate("result", cases, hold_else=False, else_value=other))
    bad = {str(t): truth_table_mismatches(t) for t in templates}
    bad = {k: v for k, v in bad.items() if v}
    rows = sum(2 ** (len(t.cases) + 1) for t in templates)
    report(7, "template compiler", not bad,
           f"{len(templates)} templates (1-3 cases, hold and fixed else), {rows} truth-table rows, "
           f"mismatches: {bad or 'none'}")


@pytest.mark.suite_wide
def test_counterexample_contract():
    confirmed = sum(r.confirmed for _, _, r in VIOLATIONS)
    failing = [(engine, cid, r.message) for engine, cid, r in VIOLATIONS if not r.confirmed]
    ok = bool(VIOLATIONS) and not failing
    report(8, "every violation replays", ok,
           f"{confirmed}/{len(VIOLATIONS)} violated verdicts confirmed by the interpreter"
           + (f"; failures {failing[:3]}" if failing else ""))


def test_determinism(corpus_dir, tmp_path, capsys):
    outs = []
    for run in ("first", "second"):
        path = tmp_path / f"{run}.json"
        cli.main(["verify", str(corpus_dir / "corpus.yaml"), "--json", str(path)])
        capsys.readouterr()
        outs.append(to_json(strip_timings(json.loads(path.read_text()))).encode())
    same = outs[0] == outs[1]
    cases = len(json.loads(outs[0])["cases"])
    report(9, "deterministic reports", same,
           f"two runs over {cases} corpus cases, timing-free JSON {'identical' if same else 'differs'} "
           f"({len(outs[0])} bytes)")
