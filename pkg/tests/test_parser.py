import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_program
from scanverif.corpus import corpus_entries
from scanverif.il_parser import ParseError, SourceFile, extract_assertions, format_program, parse_expression, parse_program
from scanverif.ir import And, Assign, BitSel, Const, Eq, For, If, Not, Or, VarRef, typecheck_program

AND_GATE = """FUNCTION AND_GATE
VAR_INPUT var1 : BOOL; var2 : BOOL; END_VAR
VAR_OUTPUT result : BOOL; END_VAR
result := var1 AND var2;
//#ASSERT (var1 AND var2) = result;
END_FUNCTION
"""


def test_and_gate_shape():
    p = parse_program(AND_GATE)
    assert len(p.pous) == 1
    pou = p.entry_pou
    assert len(pou.decls) == 3
    stmts = [s for s in pou.body if isinstance(s, Assign)]
    assert len(stmts) == 1
    assert stmts[0] == Assign(VarRef("result"), And(VarRef("var1"), VarRef("var2")))
    assert p.requirements[0].expr == Eq(And(VarRef("var1"), VarRef("var2")), VarRef("result"))
    assert p.requirements[0].origin == "inline"


def test_empty_file():
    with pytest.raises(ParseError, match="no POU found"):
        parse_program("")


def test_unterminated_if_reports_end_of_file():
    src = "FUNCTION F\nVAR_INPUT a : BOOL; END_VAR\nVAR_OUTPUT x : BOOL; END_VAR\nIF a THEN x := TRUE;"
    with pytest.raises(ParseError) as err:
        parse_program(src)
    d = err.value.diagnostics[0]
    assert "end of file" in d.message.lower() or "eof" in d.message.lower()
    assert d.loc.line == 4


def test_syntax_error_lists_expected_tokens():
    with pytest.raises(ParseError) as err:
        parse_program("FUNCTION F\nVAR_OUTPUT x : BOOL; END_VAR\nx := ;\nEND_FUNCTION")
    d = err.value.diagnostics[0]
    assert "expected" in d.message
    assert (d.loc.line, d.loc.col) == (3, 6)


def test_lexical_error_points_at_the_character():
    with pytest.raises(ParseError) as err:
        parse_program("FUNCTION F\nVAR_OUTPUT x : BOOL; END_VAR\nx := 3 $ 4;\nEND_FUNCTION")
    d = err.value.diagnostics[0]
    assert (d.loc.line, d.loc.col) == (3, 8)


def test_arithmetic_is_rejected():
    with pytest.raises(ParseError):
        parse_program("FUNCTION F\nVAR_INPUT w : WORD; END_VAR\nVAR_OUTPUT x : WORD; END_VAR\nx := w + 1;\nEND_FUNCTION")


def test_duplicate_declaration():
    with pytest.raises(ParseError, match="duplicate"):
        parse_program("FUNCTION F\nVAR_INPUT a : BOOL; a : BOOL; END_VAR\nEND_FUNCTION")


def test_grammar_coverage():
    src = """(* block comment *)
function_block Fb : VOID
var_input w : WORD; a : ARRAY[1..3] OF BOOL; END_VAR
VAR_IN_OUT io : BOOL; END_VAR
VAR_OUTPUT "N-SAFE" : BOOL; END_VAR
VAR s : WORD := 16#00FF; END_VAR
VAR_TEMP t : BOOL; END_VAR
VAR_CONFIG c : WORD; END_VAR
FOR i := 1 TO 3 DO
    t := t OR a[i];
END_FOR;
IF w.%X3 THEN "N-SAFE" := TRUE; ELSIF t THEN "N-SAFE" := FALSE; ELSE io := NOT io; END_IF;
s.%X0 := (c AND s) = 16#FFFF;
END_FUNCTION_BLOCK
"""
    p = typecheck_program(parse_program(src.replace("\n", "\r\n")))
    pou = p.entry_pou
    assert pou.kind == "FB"
    assert {d.section for d in pou.decls} == {"INPUT", "INOUT", "OUTPUT", "STATIC", "TEMP", "CONFIG"}
    assert pou.decl("s").init == 0x00FF
    assert isinstance(pou.body[0], For) and pou.body[0].bounds == (1, 3)
    assert isinstance(pou.body[1], If) and len(pou.body[1].branches) == 2
    assert pou.body[2].target == BitSel(VarRef("s"), 0)


def test_identifiers_are_case_sensitive():
    with pytest.raises(Exception):
        typecheck_program(parse_program("FUNCTION F\nVAR_OUTPUT x : BOOL; END_VAR\nX := TRUE;\nEND_FUNCTION"))


def test_precedence():
    e = parse_expression("a OR b AND NOT c = d")
    assert e == Or(VarRef("a"), And(VarRef("b"), Eq(Not(VarRef("c")), VarRef("d"))))
    assert parse_expression("16#FFFF") == Const(0xFFFF)


# --------------------------------------------------------------------------
# assertion comments

def test_and_gate_assertion_attaches_to_body_end():
    found = extract_assertions(SourceFile(AND_GATE))
    assert len(found) == 1
    comment, point = found[0]
    assert point.path is None or point.path == (1,)
    assert comment.loc.line == 5


def test_no_assertions():
    assert extract_assertions(AND_GATE.replace("//#ASSERT", "// plain")) == []


def test_consecutive_assertions_keep_order():
    src = AND_GATE.replace("//#ASSERT (var1 AND var2) = result;",
                           "//#ASSERT result OR NOT result;\n//#ASSERT (var1 AND var2) = result;")
    found = extract_assertions(src)
    assert [c.loc.line for c, _ in found] == [5, 6]
    p = parse_program(src)
    assert [r.text for r in p.requirements] == ["result OR NOT result", "(var1 AND var2) = result"]


def test_assertion_before_a_statement_attaches_to_it():
    src = """FUNCTION F
VAR_INPUT a : BOOL; END_VAR
VAR_OUTPUT x : BOOL; END_VAR
x := a;
//#ASSERT x = a;
x := NOT a;
END_FUNCTION
"""
    p = parse_program(src)
    assert p.requirements[0].point.path == (1,)


def test_assertion_without_semicolon():
    with pytest.raises(ParseError, match="missing ';'"):
        parse_program(AND_GATE.replace("= result;", "= result"))


def test_assertion_in_block_comment_is_ignored():
    p = parse_program(AND_GATE.replace("//#ASSERT (var1 AND var2) = result;", "(* //#ASSERT FALSE; *)"))
    assert p.requirements == ()


# --------------------------------------------------------------------------
# round trip

@pytest.mark.parametrize("entry", [g for g in corpus_entries() if g.suffix == ".il"], ids=lambda g: g.name)
def test_corpus_files_round_trip(entry):
    p = parse_program(entry.source)
    again = parse_program(format_program(p))
    assert again == p


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_programs_round_trip(seed):
    src, _ = random_program(seed)
    p = parse_program(src)
    assert parse_program(format_program(p)) == p
