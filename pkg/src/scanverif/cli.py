"""Command-line interface.

    scanverif verify MANIFEST [--engine E] [--bound K] [--timeout S] [--jobs N]
                              [--json PATH] [--text PATH] [--dump-cnf PATH] [--emit-smv PATH]
    scanverif inspect PROGRAM [--entry POU] [--externals UID=NAME ...]
    scanverif gen-corpus DIR

Exit codes of ``verify``: 0 every case satisfied, 1 some case violated,
2 some case unknown or failed inside an engine, 3 the manifest or a program
could not be loaded.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .corpus import write_corpus
from .engines import DEFAULT_CONFLICTS, DEFAULT_TIMEOUT, build_bmc_problem, run_case
from .ir import DiagnosticError, log2_input_space, typecheck_program, walk_stmts, Assert
from .manifest import load_manifest, load_program_files
from .report import build_report, case_report, render_text, to_json
from .smv import emit_smv

EXIT_OK, EXIT_VIOLATED, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3
TIMEOUT_ENV = "SCANVERIF_TIMEOUT"


def _timeout(flag, manifest_value):
    if flag is not None:
        return flag
    if manifest_value is not None:
        return float(manifest_value)
    env = os.environ.get(TIMEOUT_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise ValueError(f"{TIMEOUT_ENV} must be a number of seconds, got {env!r}") from None
    return DEFAULT_TIMEOUT


def _job(args):
    case, engine, bound, timeout, conflicts = args
    return run_case(case, engine, bound, timeout, conflicts)


def _artifact_path(base: str, case_id: str, suffix: str, many: bool) -> Path:
    if not many:
        return Path(base)
    return Path(base) / (case_id.replace("/", "__") + suffix)


def cmd_verify(args) -> int:
    try:
        manifest = load_manifest(args.manifest)
        jobs = []
        for mc in manifest.cases:
            engine = args.engine or mc.engine
            bound = args.bound if args.bound is not None else mc.bound
            timeout = _timeout(args.timeout, mc.timeout)
            conflicts = mc.conflicts if mc.conflicts is not None else DEFAULT_CONFLICTS
            jobs.append((mc.case, engine, bound, timeout, conflicts))
    except (DiagnosticError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    many = len(jobs) > 1
    try:
        for flag, suffix, render in ((args.dump_cnf, ".cnf", lambda c, b: build_bmc_problem(c, b).cnf.to_dimacs()),
                                     (args.emit_smv, ".smv", emit_smv)):
            if not flag:
                continue
            if many:
                Path(flag).mkdir(parents=True, exist_ok=True)
            for case, _, bound, _, _ in jobs:
                _artifact_path(flag, case.id, suffix, many).write_text(render(case, bound), encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.jobs > 1 and many:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            verdicts = list(pool.map(_job, jobs))
    else:
        verdicts = [_job(j) for j in jobs]

    cases = [case_report(case.id, engine, v, case.program, case.requirement_ids)
             for (case, engine, _, _, _), v in zip(jobs, verdicts)]
    report = build_report(cases, str(args.manifest))
    text = render_text(report)
    sys.stdout.write(text)
    if args.json:
        Path(args.json).write_text(to_json(report), encoding="utf-8")
    if args.text:
        Path(args.text).write_text(text, encoding="utf-8")
    return report["exit_code"]


def _parse_externals(items):
    out = {}
    for item in items or []:
        uid, _, name = item.partition("=")
        out[int(uid)] = name
    return out or None


def cmd_inspect(args) -> int:
    try:
        program = typecheck_program(load_program_files([args.program], args.entry, _parse_externals(args.externals)))
    except (DiagnosticError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"program: {args.program}")
    print(f"entry: {program.entry}")
    print("POUs:")
    for pou in program.pous:
        counts = {}
        for d in pou.decls:
            counts[d.section] = counts.get(d.section, 0) + 1
        sections = ", ".join(f"{k} {v}" for k, v in sorted(counts.items())) or "no declarations"
        statements = sum(1 for s in walk_stmts(pou.body) if not isinstance(s, Assert))
        print(f"  {pou.kind} {pou.name}: {statements} statements; {sections}")
    config, inputs = program.nondet_decls()
    cfg_bits = sum(d.dtype.width for d in config)
    in_bits = sum(d.dtype.width for d in inputs)
    print(f"configuration bits: {cfg_bits}")
    print(f"input bits per cycle: {in_bits}")
    print(f"log2_input_space: {log2_input_space(program)}")
    print(f"assertions: {len(program.requirements)}")
    for r in program.requirements:
        line = f" (line {r.point.line})" if r.point is not None and r.point.line else ""
        print(f"  {r.id}{line}: {r.text or ''}".rstrip())
    return EXIT_OK


def cmd_gen_corpus(args) -> int:
    for path in write_corpus(args.directory):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scanverif", description="Bounded verification of PLC scan-cycle programs.")
    parser.add_argument("--version", action="version", version=f"scanverif {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check every case of a manifest")
    v.add_argument("manifest", type=Path)
    v.add_argument("--engine", choices=("explicit", "bmc"), help="override the manifest's engine")
    v.add_argument("--bound", type=int, help="number of scan cycles to unroll")
    v.add_argument("--timeout", type=float, help=f"seconds per case (fallback: ${TIMEOUT_ENV}, then {DEFAULT_TIMEOUT:g})")
    v.add_argument("--jobs", type=int, default=1, help="cases checked in parallel")
    v.add_argument("--json", help="write the JSON report here")
    v.add_argument("--text", help="also write the text report here")
    v.add_argument("--dump-cnf", help="write DIMACS CNF (a directory when the manifest has several cases)")
    v.add_argument("--emit-smv", help="write an SMV model (a directory when the manifest has several cases)")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("inspect", help="summarize a program and its input space")
    i.add_argument("program")
    i.add_argument("--entry")
    i.add_argument("--externals", nargs="*", metavar="UID=NAME", help="FBD connections bound outside the network")
    i.set_defaults(func=cmd_inspect)

    g = sub.add_parser("gen-corpus", help="write the demonstration corpus")
    g.add_argument("directory")
    g.set_defaults(func=cmd_gen_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
