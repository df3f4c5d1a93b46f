import pytest

from helpers import fbd_mismatches
from scanverif.corpus import WORD_AND_NETWORK, fbd_documents
from scanverif.fbd import FbdError, fbd_to_pou, lower_to_ir, parse_fbd_document, parse_fbd_xml, parse_interface
from scanverif.ir import BOOL, WORD, And, Assign, Not, Or, VarDecl, VarRef

WORD_AND_DECLS = [VarDecl("var1", WORD, "INPUT"), VarDecl("var2", WORD, "INPUT"), VarDecl("tmp1", WORD, "OUTPUT")]


def network(*elements):
    return "<FlgNet>" + "".join(elements) + "</FlgNet>"


def access(uid, name):
    return f'<Access Scope="LocalVariable" UId="{uid}"><Symbol><Component Name="{name}"/></Symbol></Access>'


def part(uid, name, card=None):
    card_xml = f'<TemplateValue Name="Card" Type="Cardinality">{card}</TemplateValue>' if card is not None else ""
    return f'<Part Name="{name}" UId="{uid}">{card_xml}</Part>'


def wire(uid, *ends):
    xml = [f'<Wire UId="{uid}">']
    for e in ends:
        xml.append(f'<NameCon UId="{e[0]}" Name="{e[1]}"/>' if isinstance(e, tuple) else f'<IdentCon UId="{e}"/>')
    return "".join(xml) + "</Wire>"


def parse_and_lower(xml):
    return lower_to_ir(parse_fbd_xml(xml), [VarDecl("a", BOOL, "INPUT"), VarDecl("y", BOOL, "OUTPUT")])


def test_word_and_structure():
    net = parse_fbd_xml(WORD_AND_NETWORK, externals={23: "tmp1"})
    assert [(a.uid, a.name) for a in net.accesses] == [(21, "var1"), (22, "var2")]
    assert len(net.parts) == 1
    p = net.parts[0]
    assert (p.uid, p.name, p.cardinality, p.src_type) == (97, "And", 2, "Word")
    assert [w.uid for w in net.wires] == [134, 135, 136]


def test_word_and_lowers_to_one_and():
    net = parse_fbd_xml(WORD_AND_NETWORK, externals={23: "tmp1"})
    lowered = lower_to_ir(net, WORD_AND_DECLS)
    assert lowered.stmts == [Assign(VarRef("tmp1"), And(VarRef("var1"), VarRef("var2")))]
    assert lowered.temps == []


def test_word_and_needs_the_external_output():
    with pytest.raises(FbdError, match="23"):
        parse_fbd_xml(WORD_AND_NETWORK)


def test_nand_or_chain():
    xml, ext = fbd_documents()["fbd_nand_or"]
    pou = fbd_to_pou(xml, "NAND_OR", externals=ext)
    assert list(pou.body) == [
        Assign(VarRef("tmp1"), And(VarRef("var1"), VarRef("var2"))),
        Assign(VarRef("tmp2"), Not(VarRef("tmp1"))),
        Assign(VarRef("result"), Or(VarRef("tmp2"), VarRef("varn"))),
    ]
    assert [d.name for d in pou.decls if d.section == "TEMP"] == ["tmp1", "tmp2"]


def test_identity_network_is_a_copy():
    xml = network(access(1, "a"), access(2, "y"), wire(3, 1, 2))
    assert parse_and_lower(xml).stmts == [Assign(VarRef("y"), VarRef("a"))]


@pytest.mark.parametrize("xml, fragment", [
    (network(access(1, "a"), part(2, "And", 2), wire(3, 999, (2, "in1"))), "999"),
    (network(access(1, "a"), part(2, "Not", 2), wire(3, 1, (2, "in")), wire(4, (2, "out"), 1)), "Not"),
    (network(access(1, "a"), part(2, "Nand", 2)), "Nand"),
    (network(access(1, "a"), part(2, "And", "two")), "cardinality"),
    (network(access(1, "a"), access(5, "y"), part(2, "And", 2), wire(3, 1, (2, "in1")), wire(4, (2, "out"), 5)),
     "in2"),
    (network(access(1, "a"), part(2, "And", 2), part(3, "And", 2), wire(4, 1, (2, "in1"), (3, "in1")),
             wire(5, (2, "out"), (3, "in2")), wire(6, (3, "out"), (2, "in2"))), "cycle"),
])
def test_malformed_networks(xml, fragment):
    with pytest.raises(FbdError) as err:
        parse_and_lower(xml)
    assert fragment.lower() in str(err.value).lower()


def test_wiring_cycle_names_its_parts():
    xml = network(access(1, "a"), part(2, "And", 2), part(3, "And", 2), wire(4, 1, (2, "in1"), (3, "in1")),
                  wire(5, (2, "out"), (3, "in2")), wire(6, (3, "out"), (2, "in2")))
    with pytest.raises(FbdError) as err:
        parse_and_lower(xml)
    assert "2, 3" in str(err.value)


def test_lowering_is_deterministic():
    xml, ext = fbd_documents()["fbd_mixed"]
    assert fbd_to_pou(xml, "M", externals=ext) == fbd_to_pou(xml, "M", externals=ext)


def test_multiple_networks_run_in_document_order():
    xml, ext = fbd_documents()["fbd_mixed"]
    assert len(parse_fbd_document(xml, ext)) == 2
    pou = fbd_to_pou(xml, "M", externals=ext)
    targets = [s.target.name for s in pou.body]
    assert targets.index("masked") > targets.index("both")


def test_interface_sections():
    xml, _ = fbd_documents()["fbd_mixed"]
    decls = parse_interface(xml)
    assert {d.name: d.section for d in decls}["w2"] == "INPUT"
    assert {d.name: d.dtype for d in decls}["masked"] == WORD


@pytest.mark.parametrize("name", sorted(fbd_documents()))
def test_lowered_code_matches_gate_graph(name):
    xml, ext = fbd_documents()[name]
    checked, bad = fbd_mismatches(xml, ext)
    assert checked > 0 and bad == []
