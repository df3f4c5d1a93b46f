"""Requirement formalization: assertion text, specification templates and
per-safety-chain instantiation.

A ``SpecTemplate`` captures the protection-action pattern

    if guard1 then result <- v1
    elsif guard2 then result <- v2
    ...
    else result <- result

and compiles it to a pure AND/OR/NOT requirement evaluated at the end of
the cycle, with ``OLD(result)`` standing for the value at cycle start.  A
``ChainTemplate`` is requirement text containing ``{j}`` placeholders that
is instantiated once per safety chain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .engines import VerificationCase, make_case
from .il_parser import ParseError, parse_expression
from .ir import (
    BitSel, Const, Diagnostic, DiagnosticError, If, Assign, Not, Old, Program, Requirement, VarRef,
    And, Or, Eq, walk_expr, typecheck_program,
)

_ASSERT_RE = re.compile(r"^\s*(?://)?\s*#ASSERT\b", re.IGNORECASE)


class RequirementError(DiagnosticError):
    pass


def _fail(msg):
    raise RequirementError([Diagnostic(msg)])


def _expr(e):
    return parse_expression(e) if isinstance(e, str) else e


def parse_assertion(text: str, program: Program | None = None, req_id: str = "req",
                    origin: str = "manifest") -> Requirement:
    """Parse ``//#ASSERT <expr>;`` (or a bare expression) into a Requirement.

    When a program is given the requirement is typechecked against its
    entry POU as an end-of-cycle assertion; errors raise TypeCheckError.
    """
    body = text.strip()
    m = _ASSERT_RE.match(body)
    if m:
        body = body[m.end():]
        # continuation lines of a multi-line assertion comment
        body = "\n".join(re.sub(r"^\s*//", "", line) for line in body.splitlines())
        body = body.strip()
        if not body.endswith(";"):
            raise ParseError([Diagnostic("malformed assertion comment: missing ';'")])
    body = body.rstrip().rstrip(";")
    req = Requirement(req_id, parse_expression(body), origin, text=body.strip())
    if program is not None:
        typecheck_program(program.with_end_requirements([req]))
    return req


# --------------------------------------------------------------------------
# specification templates

@dataclass(frozen=True)
class SpecTemplate:
    target: str | object                # variable name, or a BOOL lvalue expression
    cases: tuple                        # ordered (guard, value) pairs, first match wins
    hold_else: bool = True
    else_value: bool | None = None      # used when hold_else is False

    def __post_init__(self):
        if not self.cases:
            raise ValueError("a template needs at least one guarded case")
        if not self.hold_else and self.else_value is None:
            raise ValueError("a template without hold needs an else value")


def _target(t: SpecTemplate):
    return parse_expression(t.target) if isinstance(t.target, str) else t.target


def _old_of(target):
    """OLD() applied to the variable underneath a BOOL target."""
    if isinstance(target, VarRef):
        return Old(target)
    if isinstance(target, BitSel) and isinstance(target.base, VarRef):
        return BitSel(Old(target.base), target.bit)
    _fail("template target must be a BOOL variable or a bit of a WORD variable")


def _bool_value(v):
    if isinstance(v, bool):
        return v
    if v in (0, 1):
        return bool(v)
    _fail(f"template value {v!r} does not match a BOOL target")


def template_paths(t: SpecTemplate) -> list:
    """Conjunctive path conditions under which the target ends up TRUE."""
    guards = [_expr(g) for g, _ in t.cases]
    paths = []
    for i, (_, value) in enumerate(t.cases):
        if _bool_value(value):
            paths.append([Not(g) for g in guards[:i]] + [guards[i]])
    rest = [Not(g) for g in guards]
    if t.hold_else:
        paths.append(rest + [_old_of(_target(t))])
    elif _bool_value(t.else_value):
        paths.append(rest)
    return paths


def _conj(items):
    e = items[0]
    for x in items[1:]:
        e = And(e, x)
    return e


def compile_spec_template(t: SpecTemplate, req_id: str = "spec", program: Program | None = None) -> Requirement:
    """``target = (path1 OR path2 OR ...)`` with no if-then-else node."""
    target = _target(t)
    _old_of(target)
    paths = template_paths(t)
    if paths:
        rhs = _conj(paths[0])
        for p in paths[1:]:
            rhs = Or(rhs, _conj(p))
    else:
        rhs = Const(False)
    req = Requirement(req_id, Eq(target, rhs), "template")
    if program is not None:
        typecheck_program(program.with_end_requirements([req]))
    return req


def template_statement(t: SpecTemplate):
    """The if/elsif/else statement the template describes."""
    target = _target(t)
    branches = tuple((_expr(g), (Assign(target, Const(_bool_value(v))),)) for g, v in t.cases)
    if t.hold_else:
        else_body = (Assign(target, target),)
    else:
        else_body = (Assign(target, Const(_bool_value(t.else_value))),)
    return If(branches, else_body)


# --------------------------------------------------------------------------
# per-chain instantiation

CHAINS = tuple(range(16))


@dataclass(frozen=True)
class ChainTemplate:
    id: str
    text: str                 # requirement expression with {j} placeholders
    chains: tuple = CHAINS
    description: str | None = field(default=None, compare=False)

    def instance_text(self, j: int) -> str:
        return self.text.replace("{j}", str(j))

    def instance_id(self, j: int) -> str:
        return f"{self.id}_SC{j}"


def instantiate_chain_cases(t: ChainTemplate, program: Program, bound: int | None = None) -> list[VerificationCase]:
    """One verification case per chain, ids suffixed ``_SC<j>``."""
    entry = program.entry_pou
    declared = {d.name for d in entry.decls}
    reqs = []
    for j in t.chains:
        text = t.instance_text(j)
        expr = parse_expression(text)
        missing = sorted({e.name for e in walk_expr(expr) if isinstance(e, VarRef)} - declared)
        if missing:
            _fail(f"chain j={j}: unknown symbol {', '.join(missing)} in {entry.name}")
        reqs.append(Requirement(t.instance_id(j), expr, "template", text=text))
    return [make_case(program, r, bound=bound) for r in reqs]
