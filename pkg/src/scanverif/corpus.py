"""Demonstration corpus: reconstructions of the two safety functions, the
Table-1 scenario, small textbook programs and FBD networks.

SIF-X1 computes, for every safety chain j, the bit ``N_EISa_Safe.%Xj``: the
chain is safe when every installed door in the chain is closed or bypassed,
every installed emergency handle is armed or bypassed, and the chain's
access-point conditions ``S0_AP_Pos``, ``S0_AP_PU`` and
``S0_AP_Key_Distrib`` hold.  Element i of a zone is bit i of the EISa
words; chain membership is the configuration mask ``SC_S_j``.  Unused
spare words pad the interface to the published 94 WORD + 4 BOOL
configuration and 21 WORD + 2 BOOL inputs.

SIF-2 is a function block handling beam/access mode and access-key release
per chain, padded to 19 WORD + 1 BOOL inputs.  Its seeded defects model a
requirement that forgets a term and a program that forgets a condition.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .requirements import ChainTemplate

SIF_X1_CONFIG_WORDS, SIF_X1_CONFIG_BOOLS = 94, 4
SIF_X1_INPUT_WORDS, SIF_X1_INPUT_BOOLS = 21, 2
SIF2_INPUT_WORDS, SIF2_INPUT_BOOLS = 19, 1

DEFECTS = ("none", "missing_spec_var", "missing_program_var")


@dataclass
class Generated:
    name: str
    source: str                 # program text (IL) or XML document
    manifest: dict
    chain_templates: list = field(default_factory=list)
    suffix: str = ".il"

    @property
    def filename(self) -> str:
        return self.name + self.suffix


# --------------------------------------------------------------------------
# SIF-X1

@dataclass(frozen=True)
class SifX1Params:
    chains: int = 16
    eisa: int = 16              # elements per zone; only the "bool" layout may shrink it
    layout: str = "word"        # "word": 16-bit words; "bool": arrays of BOOL for small oracles
    bank2: bool = False         # second bank of 16 EISa (zones with up to 32 elements)
    drop_bypass: bool = False   # seeded defect: door bypass ignored by the program
    pad: bool = True            # pad the word interface to the published counts

    def __post_init__(self):
        if self.layout not in ("word", "bool"):
            raise ValueError("layout is 'word' or 'bool'")
        if not 1 <= self.chains <= 16:
            raise ValueError("between 1 and 16 chains")
        if self.layout == "word" and self.eisa != 16:
            raise ValueError("the word layout always has 16 elements per bank")
        if self.layout == "bool" and (self.bank2 or not 1 <= self.eisa <= 16):
            raise ValueError("the bool layout has one bank of 1..16 elements")


def _banks(p: SifX1Params):
    return ["", "_B2"] if p.bank2 else [""]


def _sel(p: SifX1Params, var: str, idx) -> str:
    return f"{var}.%X{idx}" if p.layout == "word" else f"{var}[{idx}]"


def sif_x1_chain_template(p: SifX1Params = SifX1Params()) -> ChainTemplate:
    """The per-chain safe-flag requirement."""
    parts = []
    for b in _banks(p):
        if p.layout == "word":
            for kind in ("Pos", "PU"):
                mask = f"(SC_S_{{j}}{b} AND I_EISa_{kind}{b})"
                parts.append(f"(((I_EISa_{kind}_Stat{b} OR I_EISa_Bypass{b}) AND {mask}) = {mask})")
        else:
            for kind in ("Pos", "PU"):
                for i in range(p.eisa):
                    parts.append(f"(NOT (SC_S_{{j}}[{i}] AND I_EISa_{kind}[{i}]) OR I_EISa_{kind}_Stat[{i}] "
                                 f"OR I_EISa_Bypass[{i}])")
    parts += [_sel(p, "S0_AP_Key_Distrib", "{j}"), _sel(p, "S0_AP_PU", "{j}"), _sel(p, "S0_AP_Pos", "{j}")]
    text = f"{_sel(p, 'N_EISa_Safe', '{j}')} = ({' AND '.join(parts)})"
    return ChainTemplate("SIF_X1_safe", text, tuple(range(p.chains)),
                         "chain j is safe iff every installed element is safe or bypassed and its access point is ready")


def _decl_lines(names, dtype, comment=None):
    out = []
    for n in names:
        out.append(f"    {n} : {dtype};" + (f" (* {comment} *)" if comment and n == names[0] else ""))
    return out


def gen_sif_x1(p: SifX1Params = SifX1Params(), name: str | None = None) -> Generated:
    name = name or ("sif_x1" if p == SifX1Params() else "sif_x1_custom")
    word = p.layout == "word"
    elem_t = "WORD" if word else f"ARRAY[0..{p.eisa - 1}] OF BOOL"
    chain_t = "WORD" if word else f"ARRAY[0..{p.chains - 1}] OF BOOL"
    inputs, config = [], []
    in_words = cfg_words = 0
    for b in _banks(p):
        inputs += _decl_lines([f"I_EISa_Pos_Stat{b}", f"I_EISa_PU_Stat{b}", f"I_EISa_Bypass{b}"], elem_t,
                              "element status, element i at position i")
        config += _decl_lines([f"I_EISa_Pos{b}", f"I_EISa_PU{b}"], elem_t, "installed elements")
        config += _decl_lines([f"SC_S_{j}{b}" for j in range(16 if word else p.chains)], elem_t,
                              "members of safety chain j")
        in_words += 3
        cfg_words += 2 + (16 if word else p.chains)
    inputs += _decl_lines(["S0_AP_Pos", "S0_AP_PU", "S0_AP_Key_Distrib"], chain_t, "access point state, chain j at position j")
    in_words += 3
    spare_in, spare_cfg, spare_in_b, spare_cfg_b = [], [], [], []
    if word and p.pad:
        spare_in = [f"I_Spare_{k:02d}" for k in range(1, SIF_X1_INPUT_WORDS - in_words + 1)]
        spare_in_b = [f"I_Spare_Flag_{k}" for k in range(1, SIF_X1_INPUT_BOOLS + 1)]
        spare_cfg = [f"C_Spare_{k:02d}" for k in range(1, SIF_X1_CONFIG_WORDS - cfg_words + 1)]
        spare_cfg_b = [f"C_Spare_Flag_{k}" for k in range(1, SIF_X1_CONFIG_BOOLS + 1)]
        inputs += _decl_lines(spare_in, "WORD", "interface padding") + _decl_lines(spare_in_b, "BOOL")
        config += _decl_lines(spare_cfg, "WORD", "interface padding") + _decl_lines(spare_cfg_b, "BOOL")

    body = []
    if word:
        body.append("N_EISa_Safe := 16#0000;")
    for j in range(p.chains):
        body.append(f"(* safety chain {j} *)")
        body.append(f"ok := {_sel(p, 'S0_AP_Key_Distrib', j)} AND {_sel(p, 'S0_AP_PU', j)} AND {_sel(p, 'S0_AP_Pos', j)};")
        for b in _banks(p):
            body.append(f"FOR i := 0 TO {p.eisa - 1} DO")
            for kind in ("Pos", "PU"):
                mask = f"{_sel(p, f'SC_S_{j}{b}', 'i')} AND {_sel(p, f'I_EISa_{kind}{b}', 'i')}"
                safe = _sel(p, f"I_EISa_{kind}_Stat{b}", "i")
                if not (p.drop_bypass and kind == "Pos"):
                    safe += f" OR {_sel(p, f'I_EISa_Bypass{b}', 'i')}"
                body += [f"    IF {mask} THEN", f"        ok := ok AND ({safe});", "    END_IF;"]
            body.append("END_FOR;")
        body.append(f"{_sel(p, 'N_EISa_Safe', j)} := ok;")
    outputs = [f"    N_EISa_Safe : {chain_t}; (* chain j safe at position j *)"]
    if spare_in or spare_cfg:
        outputs.append("    N_Spare_Status : WORD;")
        body.append("(* spare channels, not part of the safety function *)")
        terms = spare_in + spare_cfg
        body.append(f"N_Spare_Status := {terms[0]};")
        for t in terms[1:]:
            body.append(f"N_Spare_Status := N_Spare_Status XOR {t};")
        for f in spare_in_b + spare_cfg_b:
            body.append(f"IF {f} THEN N_Spare_Status := NOT N_Spare_Status; END_IF;")
    lines = ["(* Site safety function: EISa safety-chain status *)", "FUNCTION SIF_X1",
             "VAR_INPUT", *inputs, "END_VAR", "VAR_CONFIG", *config, "END_VAR",
             "VAR_OUTPUT", *outputs, "END_VAR", "VAR_TEMP", "    ok : BOOL;", "END_VAR",
             *body, "END_FUNCTION", ""]
    tpl = sif_x1_chain_template(p)
    manifest = {
        "program": name + ".il",
        "engine": "bmc" if word else "explicit",
        "bound": 1,
        "inline": False,
        "requirements": [{"chain": {"id": tpl.id, "text": tpl.text, "chains": list(tpl.chains)}}],
    }
    return Generated(name, "\n".join(lines), manifest, [tpl])


def two_door_scenario(p: SifX1Params = SifX1Params()) -> tuple[dict, dict]:
    """Configuration and inputs of the published expected-behaviour table.

    Words the table does not list are chosen all-safe: no bypass, the
    handle and key-distribution access-point bits set, empty chains and
    zero padding.
    """
    if p.layout != "word":
        raise ValueError("the scenario is defined on the word layout")
    config = {"I_EISa_Pos": 0x0009, "I_EISa_PU": 0x0001, "SC_S_0": 0x0001, "SC_S_1": 0x0008}
    inputs = {"I_EISa_Pos_Stat": 0x0009, "I_EISa_PU_Stat": 0x0001, "I_EISa_Bypass": 0x0000,
              "S0_AP_Pos": 0x0009, "S0_AP_PU": 0xFFFF, "S0_AP_Key_Distrib": 0xFFFF}
    return config, inputs


def complete_valuation(decls, partial: dict) -> dict:
    """Fill unspecified variables with their type's default value."""
    from .ir import default_value
    return {d.name: partial.get(d.name, default_value(d.dtype)) for d in decls}


TWO_DOOR_EXPECTED_SAFE = 0x0009   # chains 0 and 3; chain 1 lacks S0_AP_Pos bit 1


# --------------------------------------------------------------------------
# SIF-2

_SIF2_CORE = [
    ("N_EXT_ACCE_OK", "external access conditions met"),
    ("N_NO_SAFETY_ERR", "no safety error"),
    ("I_PB_TEST_ON", "test push button"),
    ("I_Key_TEST", "test key"),
    ("I_PB_Acce_ON", "access push button"),
    ("I_Key_Acce", "access key"),
    ("N_SECU_NO_REQ_Down", "no down request from security"),
    ("I_PB_Beam_ON", "beam push button"),
    ("I_Key_Beam", "beam key"),
]

_ACCESS_REQUEST = "(I_PB_TEST_ON AND I_Key_TEST) OR (I_PB_Acce_ON AND I_Key_Acce)"
# an access or test request with all conditions met forces the chain out of beam mode
BEAM_REQUIREMENT = ("((NOT ((N_EXT_ACCE_OK AND N_NO_SAFETY_ERR) AND "
                    f"({_ACCESS_REQUEST}))) OR (NOT N_MODE_BEAM)) = 16#FFFF")
# the same formula with the safety-error conjunct forgotten
BEAM_REQUIREMENT_INCOMPLETE = ("((NOT (N_EXT_ACCE_OK AND "
                               f"({_ACCESS_REQUEST}))) OR (NOT N_MODE_BEAM)) = 16#FFFF")
KEY_RELEASE_TEXT = "O_RLS_ACCESS.%X{j} = (N_SECU_NO_REQ_Down.%X{j} AND N_EXT_ACCE_OK.%X{j} AND NOT N_MODE_BEAM.%X{j})"


def gen_sif_2(seed_defect: str = "none", fixed: bool = False, name: str | None = None,
              key_chains=tuple(range(16))) -> Generated:
    """SIF-2 analogue; ``fixed`` repairs the seeded defect."""
    if seed_defect not in DEFECTS:
        raise ValueError(f"seed_defect must be one of {DEFECTS}")
    name = name or ("sif_2" if seed_defect == "none" else f"sif_2_{seed_defect}" + ("_fixed" if fixed else ""))
    spares = [f"I_Aux_{k:02d}" for k in range(1, SIF2_INPUT_WORDS - len(_SIF2_CORE) + 1)]
    inputs = [f"    {n} : WORD; (* {c}, chain j at position j *)" for n, c in _SIF2_CORE]
    inputs += _decl_lines(spares, "WORD", "interface padding")
    inputs.append("    I_Lamp_Test : BOOL;")
    release = "N_SECU_NO_REQ_Down AND NOT N_MODE_BEAM"
    if seed_defect != "missing_program_var" or fixed:
        release = "N_SECU_NO_REQ_Down AND N_EXT_ACCE_OK AND NOT N_MODE_BEAM"
    body = [
        "(* mode transitions: an access or test request with all conditions met leaves beam mode *)",
        f"access_req := {_ACCESS_REQUEST};",
        "access_ok := (N_EXT_ACCE_OK AND N_NO_SAFETY_ERR) AND access_req;",
        "beam_req := I_PB_Beam_ON AND I_Key_Beam;",
        "N_MODE_BEAM := (N_MODE_BEAM OR beam_req) AND NOT access_ok;",
        "(* access key release *)",
        f"O_RLS_ACCESS := {release};",
        "(* indicator lamps *)",
        "O_LAMP := N_MODE_BEAM;",
        "IF I_Lamp_Test THEN",
        "    O_LAMP := 16#FFFF;",
        "END_IF;",
        f"O_AUX := {spares[0]};",
    ] + [f"O_AUX := O_AUX XOR {s};" for s in spares[1:]]
    lines = ["(* General interlock safety function: mode transitions and key release *)",
             "FUNCTION_BLOCK SIF_2", "VAR_INPUT", *inputs, "END_VAR",
             "VAR_OUTPUT", "    N_MODE_BEAM : WORD;", "    O_RLS_ACCESS : WORD;", "    O_LAMP : WORD;",
             "    O_AUX : WORD;", "END_VAR", "VAR_TEMP", "    access_req : WORD;", "    access_ok : WORD;",
             "    beam_req : WORD;", "END_VAR",
             *body, "END_FUNCTION_BLOCK", ""]
    beam = BEAM_REQUIREMENT
    if seed_defect == "missing_spec_var" and not fixed:
        beam = BEAM_REQUIREMENT_INCOMPLETE
    tpl = ChainTemplate("SIF_2_key_release", KEY_RELEASE_TEXT, tuple(key_chains))
    manifest = {
        "program": name + ".il",
        "engine": "bmc",
        "bound": 3,
        "inline": False,
        "requirements": [
            {"id": "SIF_2_beam_mode", "expression": beam},
            {"chain": {"id": tpl.id, "text": tpl.text, "chains": list(tpl.chains)}},
        ],
    }
    return Generated(name, "\n".join(lines), manifest, [tpl])


# --------------------------------------------------------------------------
# small programs

AND_GATE_SOURCE = """(* two-input AND gate with its inline assertion *)
FUNCTION AND_GATE
VAR_INPUT
    var1 : BOOL;
    var2 : BOOL;
END_VAR
VAR_OUTPUT
    result : BOOL;
END_VAR
result := var1 AND var2;
//#ASSERT (var1 AND var2) = result;
END_FUNCTION
"""

PROTECTION_SOURCE = """(* protection action: c1 resets, c2 sets, otherwise hold *)
FUNCTION_BLOCK PROTECTION
VAR_INPUT
    c1 : BOOL;
    c2 : BOOL;
END_VAR
VAR_OUTPUT
    result : BOOL;
END_VAR
IF c1 THEN
    result := FALSE;
ELSIF c2 THEN
    result := TRUE;
END_IF;
END_FUNCTION_BLOCK
"""

WORD_AND_NETWORK = """<FlgNet>
<!-- Input variables -->
<Access Scope="LocalVariable" UId="21">
<Symbol>
<Component Name="var1"/>
</Symbol>
</Access>
<Access Scope="LocalVariable" UId="22">
<Symbol>
<Component Name="var2"/>
</Symbol>
</Access>

<!-- AND block -->
<Part Name="And" UId="97">
<TemplateValue Name="Card" Type="Cardinality">2</TemplateValue>
<TemplateValue Name="SrcType" Type="Type">Word</TemplateValue>
</Part>

<!-- Connecting the inputs with the block -->
<Wire UId="134">
<IdentCon UId="21" />
<NameCon UId="97" Name="in1" />
</Wire>
<Wire UId="135">
<IdentCon UId="22" />
<NameCon UId="97" Name="in2" />
</Wire>

<!-- Output variable -->
<Wire UId="136">
<NameCon UId="97" Name="out" />
<IdentCon UId="23" />
</Wire>
</FlgNet>"""


def _access(uid, name):
    return f'<Access Scope="LocalVariable" UId="{uid}"><Symbol><Component Name="{name}"/></Symbol></Access>'


def _part(uid, name, card=None, src="Bool"):
    card_xml = f'<TemplateValue Name="Card" Type="Cardinality">{card}</TemplateValue>' if card else ""
    return f'<Part Name="{name}" UId="{uid}">{card_xml}<TemplateValue Name="SrcType" Type="Type">{src}</TemplateValue></Part>'


def _wire(uid, *ends):
    xml = "".join(f'<IdentCon UId="{e}" />' if isinstance(e, int) else f'<NameCon UId="{e[0]}" Name="{e[1]}" />'
                  for e in ends)
    return f'<Wire UId="{uid}">{xml}</Wire>'


def _interface(sections):
    out = ["<Interface>"]
    for sec, members in sections:
        out.append(f'  <Section Name="{sec}">')
        out += [f'    <Member Name="{n}" Datatype="{t}"/>' for n, t in members]
        out.append("  </Section>")
    out.append("</Interface>")
    return "\n".join(out)


def fbd_documents() -> dict[str, tuple[str, dict]]:
    """Corpus FBD documents: name -> (XML text, externals map)."""
    word_and = "<Block>\n" + _interface([("Input", [("var1", "Word"), ("var2", "Word")]),
                                         ("Output", [("tmp1", "Word")])]) + "\n" + WORD_AND_NETWORK + "\n</Block>\n"
    # AND feeding an OR through a NOT, as in the diagram example
    nand_or = "\n".join([
        "<Block>",
        _interface([("Input", [("var1", "Bool"), ("var2", "Bool"), ("varn", "Bool")]),
                    ("Output", [("result", "Bool")])]),
        "<FlgNet>",
        _access(1, "var1"), _access(2, "var2"), _access(3, "varn"), _access(4, "result"),
        _part(10, "And", 2), _part(11, "Not"), _part(12, "Or", 2),
        _wire(20, 1, (10, "in1")), _wire(21, 2, (10, "in2")),
        _wire(22, (10, "out"), (11, "in")), _wire(23, (11, "out"), (12, "in1")),
        _wire(24, 3, (12, "in2")), _wire(25, (12, "out"), 4),
        "</FlgNet>",
        "</Block>", ""])
    # two networks: a 3-input vote with fan-out, then a word-level mask and a copy
    mixed = "\n".join([
        "<Block>",
        _interface([("Input", [("a", "Bool"), ("b", "Bool"), ("c", "Bool"), ("w1", "Word"), ("w2", "Word")]),
                    ("Output", [("any", "Bool"), ("odd", "Bool"), ("both", "Bool"), ("masked", "Word"),
                                ("copy", "Bool")])]),
        "<FlgNet>",
        _access(1, "a"), _access(2, "b"), _access(3, "c"),
        _access(4, "any"), _access(5, "odd"), _access(6, "both"),
        _part(30, "Xor", 2), _part(31, "Or", 3), _part(32, "Xor", 2), _part(33, "And", 2),
        _wire(40, 1, (31, "in1"), (30, "in1"), (33, "in1")), _wire(41, 2, (31, "in2"), (30, "in2")),
        _wire(42, 3, (31, "in3"), (32, "in2")), _wire(43, (30, "out"), (32, "in1")),
        _wire(44, (31, "out"), 4), _wire(45, (32, "out"), 5, (33, "in2")), _wire(46, (33, "out"), 6),
        "</FlgNet>",
        "<FlgNet>",
        _access(50, "w1"), _access(51, "w2"), _access(52, "masked"), _access(53, "a"), _access(54, "copy"),
        _part(60, "Not", src="Word"), _part(61, "And", 2, src="Word"),
        _wire(70, 51, (60, "in")), _wire(71, 50, (61, "in1")), _wire(72, (60, "out"), (61, "in2")),
        _wire(73, (61, "out"), 52), _wire(74, 53, 54),
        "</FlgNet>",
        "</Block>", ""])
    return {
        "fbd_word_and": (word_and, {23: "tmp1"}),
        "fbd_nand_or": (nand_or, {}),
        "fbd_mixed": (mixed, {}),
    }


def small_programs() -> list[Generated]:
    docs = fbd_documents()
    out = [
        Generated("and_gate", AND_GATE_SOURCE, {"program": "and_gate.il", "engine": "bmc", "inline": True}),
        Generated("protection", PROTECTION_SOURCE, {
            "program": "protection.il", "engine": "bmc", "bound": 4, "inline": False,
            "requirements": [{"id": "protection_action",
                              "template": {"target": "result", "cases": [["c1", 0], ["c2", 1]], "hold": True}}],
        }),
        Generated("fbd_word_and", docs["fbd_word_and"][0], {
            "program": "fbd_word_and.xml", "externals": {23: "tmp1"}, "engine": "bmc",
            "requirements": [{"id": "and_gate", "expression": "(var1 AND var2) = tmp1"}],
        }, suffix=".xml"),
        Generated("fbd_nand_or", docs["fbd_nand_or"][0], {
            "program": "fbd_nand_or.xml", "engine": "explicit",
            "requirements": [{"id": "nand_or", "expression": "result = (NOT (var1 AND var2) OR varn)"}],
        }, suffix=".xml"),
        Generated("fbd_mixed", docs["fbd_mixed"][0], {
            "program": "fbd_mixed.xml", "engine": "bmc",
            "requirements": [
                {"id": "vote", "expression": "any = (a OR b OR c)"},
                {"id": "parity", "expression": "odd = (a XOR b XOR c)"},
                {"id": "masked", "expression": "(masked AND w2) = 16#0000"},
                {"id": "copy", "expression": "copy = a"},
            ],
        }, suffix=".xml"),
    ]
    return out


# --------------------------------------------------------------------------
# writing the corpus

REDUCED = SifX1Params(chains=2, eisa=1, layout="bool", pad=False)


def corpus_entries() -> list[Generated]:
    items = [
        gen_sif_x1(),
        gen_sif_x1(SifX1Params(drop_bypass=True), name="sif_x1_no_bypass"),
        gen_sif_x1(REDUCED, name="sif_x1_reduced"),
        gen_sif_2("none"),
        gen_sif_2("missing_spec_var"),
        gen_sif_2("missing_spec_var", fixed=True),
        gen_sif_2("missing_program_var"),
        gen_sif_2("missing_program_var", fixed=True),
    ]
    return items + small_programs()


def write_corpus(directory, entries: list[Generated] | None = None) -> list[Path]:
    """Write programs, one manifest per program, an aggregate manifest and a lockfile."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    entries = corpus_entries() if entries is None else entries
    written, lock = [], {"generator": "scanverif.corpus", "entries": {}}
    for g in entries:
        prog = d / g.filename
        prog.write_text(g.source, encoding="utf-8")
        man = d / f"{g.name}.yaml"
        man.write_text(yaml.safe_dump(g.manifest, sort_keys=False, width=200), encoding="utf-8")
        written += [prog, man]
        lock["entries"][g.name] = {
            "program": g.filename,
            "sha256": hashlib.sha256(g.source.encode()).hexdigest(),
        }
    agg = d / "corpus.yaml"
    agg.write_text(yaml.safe_dump({"include": [f"{g.name}.yaml" for g in entries]}, sort_keys=False), encoding="utf-8")
    lock["params"] = {"sif_x1": asdict(SifX1Params()), "sif_x1_reduced": asdict(REDUCED), "sif_2_defects": list(DEFECTS)}
    lockfile = d / "corpus.lock.json"
    lockfile.write_text(json.dumps(lock, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return written + [agg, lockfile]
