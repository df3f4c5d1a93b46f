# %% [markdown]
# # Function block diagrams
#
# Safety PLC code is often drawn, not typed.  The exported network XML is
# lowered to one assignment per gate, in dependency order, and from there
# the program is verified like any other.

# %%
from scanverif import make_case, verify_bmc
from scanverif.corpus import WORD_AND_NETWORK, fbd_documents
from scanverif.fbd import evaluate_network, fbd_to_pou, lower_to_ir, parse_fbd_document, parse_fbd_xml
from scanverif.il_parser import format_program
from scanverif.ir import WORD, Program, VarDecl, typecheck_program
from scanverif.requirements import parse_assertion

net = parse_fbd_xml(WORD_AND_NETWORK, externals={23: "tmp1"})
print(net.accesses)
print(net.parts)

# %% [markdown]
# The output wire ends in UId 23, which the network itself never declares;
# the caller says which variable it is.

# %%
decls = [VarDecl("var1", WORD, "INPUT"), VarDecl("var2", WORD, "INPUT"), VarDecl("tmp1", WORD, "OUTPUT")]
print(lower_to_ir(net, decls).stmts)

# %% [markdown]
# A slightly larger diagram: AND, then NOT, then OR with a third input.

# %%
xml, ext = fbd_documents()["fbd_nand_or"]
pou = fbd_to_pou(xml, "NAND_OR", externals=ext)
program = typecheck_program(Program((pou,), "NAND_OR"))
print(format_program(program))

# %% [markdown]
# The gate graph can also be evaluated directly, which gives an independent
# check of the lowering.

# %%
types = {d.name: d.dtype for d in pou.decls}
(graph,) = parse_fbd_document(xml, ext)
for bits in range(8):
    env = {"var1": bool(bits & 4), "var2": bool(bits & 2), "varn": bool(bits & 1)}
    print(env, evaluate_network(graph, env, types))

# %%
req = parse_assertion("result = (NOT (var1 AND var2) OR varn)", program, "nand_or")
print(verify_bmc(make_case(program, req)).outcome)
