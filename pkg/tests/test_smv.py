import re

from scanverif.corpus import AND_GATE_SOURCE, PROTECTION_SOURCE, gen_sif_x1
from scanverif.engines import make_case
from scanverif.il_parser import parse_program
from scanverif.ir import typecheck_program
from scanverif.requirements import instantiate_chain_cases, parse_assertion
from scanverif.smv import emit_smv, smv_name


def typed(src):
    return typecheck_program(parse_program(src))


def declared_bits(text: str) -> int:
    bits = 0
    for line in text.splitlines():
        m = re.match(r"\s+\S+ : (boolean|unsigned word\[16\]);$", line)
        if m:
            bits += 1 if m.group(1) == "boolean" else 16
    return bits


def test_and_gate_model():
    p = typed(AND_GATE_SOURCE)
    text = emit_smv(make_case(p, p.requirements[0].id))
    assert "  var1 : boolean;" in text and "  var2 : boolean;" in text
    assert "  result := (var1 & var2);" in text
    assert "INVARSPEC ((var1 & var2) = result);" in text
    assert text.count("MODULE main") == 1


def test_tautology_over_one_input():
    p = typed(PROTECTION_SOURCE)
    text = emit_smv(make_case(p, parse_assertion("c1 OR NOT c1", p, "taut")), 2)
    assert text.rstrip().endswith("INVARSPEC (c1 | !c1);")


def test_state_and_configuration_sections():
    src = ("FUNCTION_BLOCK F\nVAR_CONFIG k : WORD; END_VAR\nVAR_INPUT x : BOOL; END_VAR\n"
           "VAR_OUTPUT y : BOOL; END_VAR\nVAR s : BOOL := TRUE; END_VAR\n"
           "s := s XOR x;\ny := s AND k.%X3;\nEND_FUNCTION_BLOCK")
    p = typed(src)
    text = emit_smv(make_case(p, parse_assertion("y OR NOT OLD(s)", p, "r")), 4)
    assert "FROZENVAR -- configuration, fixed at start-up\n  k : unsigned word[16];" in text
    assert "  init(s) := TRUE;" in text
    assert "  init(y) := FALSE;" in text
    assert "bounded check depth used by the internal engine: 4" in text


def test_sif_x1_chain_model_declares_every_bit():
    g = gen_sif_x1()
    case = instantiate_chain_cases(g.chain_templates[0], typed(g.source), bound=1)[0]
    text = emit_smv(case, 1)
    assert declared_bits(text) == 1846
    assert emit_smv(case, 1) == text


def test_names_are_valid_smv_identifiers():
    assert smv_name("CNT@2.q") == "CNT_at2__q"
    assert smv_name("next") == "v_next"
    assert smv_name("a[3]") == "a_3"
    assert re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", smv_name("N-SAFE"))
