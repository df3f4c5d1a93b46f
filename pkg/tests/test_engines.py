import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_case
from scanverif.corpus import AND_GATE_SOURCE, PROTECTION_SOURCE, gen_sif_x1
from scanverif.engines import (
    ERROR, SATISFIED, UNKNOWN, VIOLATED, Counterexample, Verdict, make_case, replay_counterexample, run_case,
    verify_bmc, verify_explicit,
)
from scanverif.il_parser import parse_program
from scanverif.ir import typecheck_program
from scanverif.manifest import load_manifest
from scanverif.requirements import parse_assertion


def typed(src):
    return typecheck_program(parse_program(src))


def and_gate_case(body="var1 AND var2"):
    p = typed(AND_GATE_SOURCE.replace("result := var1 AND var2;", f"result := {body};"))
    return make_case(p, p.requirements[0].id)


# --------------------------------------------------------------------------
# verdict invariants

def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict(VIOLATED, 1)
    with pytest.raises(ValueError):
        Verdict(SATISFIED)
    with pytest.raises(ValueError):
        Verdict("maybe")
    assert Verdict(SATISFIED, 3).scope == "up to bound 3"
    assert Verdict(SATISFIED, 1, exhaustive=True).scope == "exhaustive"


def test_default_bounds():
    assert and_gate_case().resolved_bound() == 1
    p = typed(PROTECTION_SOURCE)
    assert make_case(p, parse_assertion("result OR NOT result", p, "r")).resolved_bound() == 16
    with pytest.raises(ValueError):
        and_gate_case().resolved_bound(0)


# --------------------------------------------------------------------------
# explicit engine

def test_and_gate_explicit():
    v = verify_explicit(and_gate_case())
    assert v.outcome == SATISFIED and v.bound == 1 and v.exhaustive
    assert v.stats["evaluations"] == 4


def test_or_mutant_first_counterexample():
    v = verify_explicit(and_gate_case("var1 OR var2"))
    assert v.outcome == VIOLATED
    cex = v.counterexample
    assert cex.cycle == 1 and cex.inputs == [{"var1": False, "var2": True}]
    assert cex.outputs == [{"result": True}]


def test_sif_x1_is_over_the_explicit_budget():
    g = gen_sif_x1()
    p = typed(g.source)
    case = make_case(p, parse_assertion("N_EISa_Safe = N_EISa_Safe", p, "trivial"))
    v = verify_explicit(case)
    assert v.outcome == UNKNOWN
    assert "1846" in v.message and "24" in v.message


def test_explicit_time_limit():
    case = random_case(3, max_bits=20)
    v = verify_explicit(case, time_limit=0.0)
    assert v.outcome in (UNKNOWN, SATISFIED, VIOLATED)
    if v.outcome == UNKNOWN:
        assert v.message == "time limit"


# --------------------------------------------------------------------------
# bounded model checking

def test_and_gate_bmc():
    v = verify_bmc(and_gate_case())
    assert v.outcome == SATISFIED and v.exhaustive
    assert {"encode_time", "solve_time", "variables", "clauses", "decisions", "conflicts"} <= set(v.stats)


def test_or_mutant_bmc_is_replayable():
    case = and_gate_case("var1 OR var2")
    v = verify_bmc(case)
    assert v.outcome == VIOLATED
    assert replay_counterexample(case, v.counterexample).confirmed


def test_false_assertion_fails_in_the_first_cycle():
    p = typed(PROTECTION_SOURCE)
    case = make_case(p, parse_assertion("FALSE", p, "never"), bound=5)
    for engine in (verify_bmc, verify_explicit):
        v = engine(case)
        assert v.outcome == VIOLATED and v.counterexample.cycle == 1
        assert len(v.counterexample.inputs) == 1
    no_inputs = typed("FUNCTION F\nVAR_OUTPUT y : BOOL; END_VAR\ny := TRUE;\nEND_FUNCTION")
    v = verify_bmc(make_case(no_inputs, parse_assertion("FALSE", no_inputs, "never")))
    assert v.counterexample.inputs == [{}] and v.counterexample.config == {}


def test_bmc_finds_the_shortest_violation():
    p = typed(PROTECTION_SOURCE)
    case = make_case(p, parse_assertion("NOT (result AND OLD(result))", p, "no_repeat"), bound=6)
    v = verify_bmc(case)
    assert v.outcome == VIOLATED and v.counterexample.cycle == 2
    assert replay_counterexample(case, v.counterexample).confirmed


def test_conflict_limit_gives_unknown():
    case = random_case(11)
    v = run_case(case, "bmc", conflict_limit=0)
    assert v.outcome in (UNKNOWN, SATISFIED, VIOLATED)
    if v.outcome == UNKNOWN:
        assert v.message == "conflict limit"


def test_unknown_engine_is_an_error_verdict():
    v = run_case(and_gate_case(), "tableau")
    assert v.outcome == ERROR and "tableau" in v.message


def test_combinational_bounds_agree():
    for body in ("var1 AND var2", "var1 OR var2", "var1 XOR var2"):
        case = and_gate_case(body)
        assert verify_bmc(case, bound=1).outcome == verify_bmc(case, bound=3).outcome


def test_sif_2_defects_are_found(corpus_dir):
    spec = load_manifest(corpus_dir / "sif_2_missing_spec_var.yaml")
    beam = next(mc for mc in spec.cases if mc.case.id == "SIF_2_beam_mode")
    v = verify_bmc(beam.case, beam.bound)
    assert v.outcome == VIOLATED
    assert replay_counterexample(beam.case, v.counterexample).confirmed

    prog = load_manifest(corpus_dir / "sif_2_missing_program_var.yaml")
    release = prog.cases[1]
    v = verify_bmc(release.case, release.bound)
    assert v.outcome == VIOLATED
    assert replay_counterexample(release.case, v.counterexample).confirmed


# --------------------------------------------------------------------------
# replay

def test_replay_reports_a_flipped_input_truthfully():
    case = and_gate_case("var1 OR var2")
    cex = verify_explicit(case).counterexample
    flipped = dataclasses.replace(cex, inputs=[{"var1": True, "var2": True}])
    report = replay_counterexample(case, flipped)
    assert not report.confirmed
    assert "assertion holds" in report.message
    assert report.divergence is None
    still_failing = dataclasses.replace(cex, inputs=[{"var1": True, "var2": False}])
    assert replay_counterexample(case, still_failing).confirmed
    diverging = dataclasses.replace(cex, inputs=[{"var1": False, "var2": False}])
    report = replay_counterexample(case, diverging)
    assert not report.confirmed and "assertion holds" in report.message
    assert report.divergence["signal"] == "result" and report.divergence["counterexample"] is True


def test_replay_on_the_fixed_program(corpus_dir):
    broken = load_manifest(corpus_dir / "sif_2_missing_program_var.yaml").cases[1]
    fixed = load_manifest(corpus_dir / "sif_2_missing_program_var_fixed.yaml").cases[1]
    cex = verify_bmc(broken.case, broken.bound).counterexample
    report = replay_counterexample(fixed.case, cex)
    assert not report.confirmed
    assert report.message.startswith("assertion holds")
    assert report.divergence is not None


def test_replay_rejects_a_malformed_counterexample():
    case = and_gate_case()
    report = replay_counterexample(case, Counterexample(case.requirement_ids[0], 1, {}, [{"var1": True}]))
    assert not report.confirmed and "does not fit" in report.message


# --------------------------------------------------------------------------
# properties

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_engines_agree_on_random_programs(seed):
    case = random_case(seed, max_bits=14)
    a, b = verify_explicit(case), verify_bmc(case)
    assert a.outcome == b.outcome


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_violations_persist_at_larger_bounds(seed):
    case = random_case(seed, max_bits=12, max_bound=2)
    k = case.resolved_bound()
    small, large = verify_bmc(case, k), verify_bmc(case, k + 1)
    if small.outcome == VIOLATED:
        assert large.outcome == VIOLATED
        assert large.counterexample.cycle == small.counterexample.cycle
    if large.outcome == SATISFIED:
        assert small.outcome == SATISFIED


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_engines_are_deterministic(seed):
    case = random_case(seed, max_bits=12)
    for engine in (verify_bmc, verify_explicit):
        a, b = engine(case), engine(case)
        assert a.outcome == b.outcome and a.counterexample == b.counterexample
        strip = lambda s: {k: v for k, v in s.items() if not k.endswith("time")}
        assert strip(a.stats) == strip(b.stats)
