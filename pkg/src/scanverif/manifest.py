"""Verification manifests: which program to load and what to check.

A manifest is a YAML mapping::

    program: sif_2.il            # or a list of .il / .xml files
    entry: SIF_2                 # optional; defaults to the uncalled POU
    engine: bmc                  # or explicit
    bound: 3
    timeout: 300
    conflicts: 10000000
    inline: true                 # check //#ASSERT comments found in the program
    externals: {23: tmp1}        # FBD only: UIds bound outside the network
    requirements:
      - {id: beam, expression: "..."}
      - {id: act, template: {target: result, cases: [[c1, 0], [c2, 1]], hold: true}}
      - {chain: {id: key_release, text: "... {j} ...", chains: [0, 1]}}
    include: [other.yaml]        # cases of other manifests, ids prefixed "<stem>/"

Every path is relative to the manifest's own directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .engines import VerificationCase, make_case
from .fbd import fbd_to_pou
from .il_parser import SourceFile, default_entry, parse_program
from .ir import Diagnostic, DiagnosticError, Program, typecheck_program
from .requirements import ChainTemplate, SpecTemplate, compile_spec_template, instantiate_chain_cases, parse_assertion

ENGINES = ("bmc", "explicit")
_KEYS = {"program", "entry", "engine", "bound", "timeout", "conflicts", "inline", "externals", "scopes",
         "kind", "requirements", "include"}


class ManifestError(DiagnosticError):
    pass


def _fail(msg, path=None):
    raise ManifestError([Diagnostic(f"{path}: {msg}" if path else msg)])


@dataclass
class ManifestCase:
    case: VerificationCase
    engine: str = "bmc"
    bound: int | None = None
    timeout: float | None = None
    conflicts: int | None = None
    manifest: str | None = None      # the manifest file that declared the case


@dataclass
class VerificationManifest:
    path: Path
    programs: list = field(default_factory=list)   # resolved program files
    cases: list = field(default_factory=list)      # ManifestCase, in declaration order

    @property
    def case_ids(self) -> list[str]:
        return [c.case.id for c in self.cases]


def load_program_files(paths, entry=None, externals=None, scopes=None, kind="FC") -> Program:
    """Parse .il and .xml files into one untyped Program."""
    pous, reqs = [], []
    for path in paths:
        path = Path(path)
        if not path.is_file():
            _fail(f"program file not found: {path}")
        if path.suffix.lower() == ".xml":
            pous.append(fbd_to_pou(path.read_bytes(), path.stem, kind, externals, scopes))
        else:
            prog = parse_program(SourceFile.read(path))
            pous += prog.pous
            reqs += prog.requirements
    names = [p.name for p in pous]
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        _fail(f"POU defined twice: {', '.join(dup)}")
    if entry is not None and entry not in names:
        _fail(f"entry POU {entry!r} not found")
    return Program(tuple(pous), entry or default_entry(pous), tuple(reqs))


def _requirement_cases(entry, program, bound, path):
    if not isinstance(entry, dict):
        _fail(f"requirement entry must be a mapping, got {entry!r}", path)
    if "chain" in entry:
        c = entry["chain"]
        chains = tuple(c.get("chains", range(16)))
        t = ChainTemplate(c["id"], c["text"], chains, c.get("description"))
        return instantiate_chain_cases(t, program, bound)
    rid = entry.get("id")
    if not rid:
        _fail("requirement entry without an id", path)
    if "expression" in entry:
        req = parse_assertion(str(entry["expression"]), None, rid)
    elif "template" in entry:
        t = entry["template"]
        hold = t.get("hold", True)
        cases = tuple((str(g), v) for g, v in t["cases"])
        tpl = SpecTemplate(t["target"], cases, hold_else=hold, else_value=None if hold else t.get("else"))
        req = compile_spec_template(tpl, rid)
    else:
        _fail(f"requirement {rid!r} needs an expression, a template or a chain", path)
    return [make_case(program, req, bound=bound)]


def load_manifest(path, _seen=None) -> VerificationManifest:
    """Load a manifest (and its includes) into verification cases."""
    path = Path(path)
    if not path.is_file():
        _fail(f"manifest not found: {path}")
    seen = set() if _seen is None else _seen
    key = path.resolve()
    if key in seen:
        _fail("include cycle", path)
    seen = seen | {key}
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        _fail(f"not valid YAML: {exc}", path)
    if not isinstance(data, dict):
        _fail("top level must be a mapping", path)
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        _fail(f"unknown keys {', '.join(unknown)}", path)
    base = path.parent
    out = VerificationManifest(path)

    for inc in data.get("include", []) or []:
        sub = load_manifest(base / inc, seen)
        prefix = Path(inc).stem
        out.programs += sub.programs
        for mc in sub.cases:
            case = VerificationCase(f"{prefix}/{mc.case.id}", mc.case.program, mc.case.requirement_ids, mc.case.bound)
            out.cases.append(ManifestCase(case, mc.engine, mc.bound, mc.timeout, mc.conflicts, mc.manifest))

    if "program" in data:
        files = data["program"] if isinstance(data["program"], list) else [data["program"]]
        files = [base / f for f in files]
        out.programs += files
        engine = data.get("engine", "bmc")
        if engine not in ENGINES:
            _fail(f"engine must be one of {', '.join(ENGINES)}", path)
        bound = data.get("bound")
        externals = {int(k): v for k, v in (data.get("externals") or {}).items()}
        program = load_program_files(files, data.get("entry"), externals or None, data.get("scopes"),
                                     data.get("kind", "FC"))
        cases = []
        if data.get("inline", True):
            typed = typecheck_program(program)
            cases += [make_case(typed, r.id, bound=bound) for r in typed.requirements]
        for entry in data.get("requirements", []) or []:
            try:
                cases += _requirement_cases(entry, program, bound, path)
            except (ValueError, KeyError) as exc:
                _fail(f"bad requirement entry: {exc}", path)
        for c in cases:
            out.cases.append(ManifestCase(c, engine, bound, data.get("timeout"), data.get("conflicts"), str(path)))
    elif data.get("requirements"):
        _fail("requirements given without a program", path)

    ids = out.case_ids
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        _fail(f"duplicate case ids: {', '.join(dup)}", path)
    return out
