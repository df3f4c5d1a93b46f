"""Bounded verification of PLC scan-cycle programs.

Programs written in a small IEC 61131-3 style language (or imported from
FBD network XML) are checked against Boolean requirements by explicit
enumeration or by SAT-based bounded model checking.
"""

__version__ = "0.1.0"

from .engines import (  # noqa: E402
    ERROR, SATISFIED, UNKNOWN, VIOLATED, Counterexample, Verdict, VerificationCase, make_case,
    replay_counterexample, run_case, verify_bmc, verify_explicit,
)
from .il_parser import ParseError, parse_expression, parse_program  # noqa: E402
from .interp import run_cycle, run_scenario  # noqa: E402
from .ir import log2_input_space, typecheck_program  # noqa: E402
from .manifest import load_manifest  # noqa: E402
from .requirements import ChainTemplate, SpecTemplate, compile_spec_template, instantiate_chain_cases, parse_assertion  # noqa: E402

__all__ = [
    "ERROR", "SATISFIED", "UNKNOWN", "VIOLATED", "ChainTemplate", "Counterexample", "ParseError", "SpecTemplate",
    "Verdict", "VerificationCase", "compile_spec_template", "instantiate_chain_cases", "load_manifest",
    "log2_input_space", "make_case", "parse_assertion", "parse_expression", "parse_program",
    "replay_counterexample", "run_case", "run_cycle", "run_scenario", "typecheck_program", "verify_bmc",
    "verify_explicit",
]
