"""Verification reports.

The JSON document is the source of truth; the text report is rendered from
it.  Each case carries its verdict, engine statistics and, for violations,
the raw counterexample plus a signal by cycle table.  Statistics whose key
ends in ``time`` are wall-clock measurements; ``strip_timings`` removes
them so that two runs can be compared byte for byte.
"""

from __future__ import annotations

import json
from importlib import resources

from . import __version__
from .engines import ERROR, OUTCOMES, SATISFIED, UNKNOWN, VIOLATED, Counterexample, Verdict
from .ir import format_value, state_layout

REPORT_FORMAT = 1
DETERMINISM_NOTE = ("verdicts and counterexamples depend only on the case and the limits; "
                    "the solver uses a fixed decision order and no random seed")


def load_schema() -> dict:
    return json.loads(resources.files("scanverif").joinpath("report_schema.json").read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# values

def _to_json(v):
    if isinstance(v, tuple):
        return [_to_json(x) for x in v]
    return v


def _from_json(v):
    if isinstance(v, list):
        return tuple(_from_json(x) for x in v)
    return v


def _snap(d):
    return {k: _to_json(v) for k, v in sorted(d.items())}


def _unsnap(d):
    return {k: _from_json(v) for k, v in d.items()}


def _signal_types(program):
    entry = program.entry_pou
    types = {}
    for d in entry.decls:
        if d.section == "CONFIG":
            types[d.name] = ("config", d.dtype)
        elif d.section in ("INPUT", "INOUT"):
            types[d.name] = ("input", d.dtype)
        elif d.section == "OUTPUT":
            types[d.name] = ("output", d.dtype)
    for key, d in state_layout(program):
        types.setdefault(key, ("state", d.dtype))
    return types


def counterexample_table(cex: Counterexample, program) -> dict:
    """Signal by cycle grid of formatted values."""
    types = _signal_types(program)
    n = cex.cycle
    rows = []

    def row(name, kind, values):
        dtype = types.get(name, (kind, None))[1]
        fmt = [format_value(dtype, v) if dtype is not None else str(v) for v in values]
        rows.append({"signal": name, "kind": kind, "values": fmt})

    for name in sorted(cex.config):
        row(name, "config", [cex.config[name]] * n)
    for name in sorted({k for step in cex.inputs for k in step}):
        row(name, "input", [step.get(name) for step in cex.inputs])
    shown = set()
    for name in sorted({k for step in cex.outputs for k in step}):
        shown.add(name)
        row(name, "output", [step.get(name) for step in cex.outputs])
    for name in sorted({k for step in cex.states for k in step} - shown):
        row(name, "state", [step.get(name) for step in cex.states])
    return {"cycles": list(range(1, n + 1)), "rows": rows}


# --------------------------------------------------------------------------
# building and reading reports

def case_report(case_id: str, engine: str, verdict: Verdict, program=None, requirement_ids=()) -> dict:
    out = {
        "id": case_id,
        "requirements": list(requirement_ids),
        "engine": engine,
        "outcome": verdict.outcome,
        "bound": verdict.bound,
        "scope": verdict.scope,
        "exhaustive": verdict.exhaustive,
        "message": verdict.message,
        "statistics": {k: verdict.stats[k] for k in sorted(verdict.stats)},
        "counterexample": None,
    }
    cex = verdict.counterexample
    if cex is not None:
        out["counterexample"] = {
            "requirement": cex.requirement_id,
            "cycle": cex.cycle,
            "config": _snap(cex.config),
            "inputs": [_snap(s) for s in cex.inputs],
            "states": [_snap(s) for s in cex.states],
            "outputs": [_snap(s) for s in cex.outputs],
            "table": counterexample_table(cex, program) if program is not None else None,
        }
    return out


def verdict_from_report(entry: dict) -> Verdict:
    """Rebuild the Verdict a case entry was made from."""
    c = entry["counterexample"]
    cex = None
    if c is not None:
        cex = Counterexample(c["requirement"], c["cycle"], _unsnap(c["config"]),
                             [_unsnap(s) for s in c["inputs"]], [_unsnap(s) for s in c["states"]],
                             [_unsnap(s) for s in c["outputs"]])
    return Verdict(entry["outcome"], entry["bound"], cex, entry["message"], entry["exhaustive"],
                   dict(entry["statistics"]))


def summarize(cases: list[dict]) -> dict:
    counts = {o: 0 for o in OUTCOMES}
    for c in cases:
        counts[c["outcome"]] += 1
    return counts


def exit_code(cases: list[dict]) -> int:
    """0 when every case is satisfied, 1 on any violation, otherwise 2."""
    outcomes = {c["outcome"] for c in cases}
    if VIOLATED in outcomes:
        return 1
    if outcomes & {UNKNOWN, ERROR}:
        return 2
    return 0


def build_report(cases: list[dict], manifest: str | None = None) -> dict:
    return {
        "format": REPORT_FORMAT,
        "tool": {"name": "scanverif", "version": __version__},
        "determinism": DETERMINISM_NOTE,
        "manifest": manifest,
        "summary": summarize(cases),
        "exit_code": exit_code(cases),
        "cases": cases,
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def strip_timings(report: dict) -> dict:
    """Copy of the report without wall-clock statistics."""
    out = json.loads(json.dumps(report))
    for c in out["cases"]:
        c["statistics"] = {k: v for k, v in c["statistics"].items() if not k.endswith("time")}
    return out


# --------------------------------------------------------------------------
# text rendering

def _elapsed(stats: dict) -> float:
    return sum(v for k, v in stats.items() if k.endswith("time") and isinstance(v, (int, float)))


def _grid(header, rows) -> list[str]:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    fmt = lambda r: "  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip()
    return [fmt(header), fmt(["-" * w for w in widths])] + [fmt(r) for r in rows]


def render_text(report: dict) -> str:
    lines = [f"scanverif {report['tool']['version']} verification report"]
    if report.get("manifest"):
        lines.append(f"manifest: {report['manifest']}")
    lines.append("")
    rows = []
    for c in report["cases"]:
        detail = c["scope"] or c["message"] or ""
        if c["outcome"] == VIOLATED:
            detail = f"fails at cycle {c['counterexample']['cycle']}"
        rows.append([c["id"], c["engine"], c["outcome"], detail, f"{_elapsed(c['statistics']):.2f} s"])
    lines += _grid(["case", "engine", "outcome", "detail", "time"], rows)
    s = report["summary"]
    lines.append("")
    lines.append(f"{s[SATISFIED]} satisfied, {s[VIOLATED]} violated, {s[UNKNOWN]} unknown, {s[ERROR]} error")
    for c in report["cases"]:
        cex = c["counterexample"]
        if cex is None or cex.get("table") is None:
            continue
        t = cex["table"]
        lines += ["", f"counterexample for {c['id']}: {cex['requirement']} fails at cycle {cex['cycle']}"]
        lines += _grid(["signal", "kind"] + [f"cycle {k}" for k in t["cycles"]],
                       [[r["signal"], r["kind"]] + r["values"] for r in t["rows"]])
    return "\n".join(lines) + "\n"
