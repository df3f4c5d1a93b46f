"""Parser and pretty-printer for the textual IL/ST-like program format.

The accepted language is a small structured-text dialect::

    FUNCTION_BLOCK Latch
    VAR_INPUT c1, c2 : BOOL; END_VAR
    VAR_OUTPUT result : BOOL; END_VAR
        IF c1 THEN
            result := FALSE;
        ELSIF c2 THEN
            result := TRUE;
        END_IF;
        //#ASSERT result = ((NOT c1 AND c2) OR (NOT c1 AND NOT c2 AND OLD(result)));
    END_FUNCTION_BLOCK

Keywords are case-insensitive, identifiers case-sensitive.  Identifiers that
are not plain words (``"SC-S_0"``) must be double-quoted.  Assertions live
in ``//#ASSERT`` line comments and attach to the statement that follows, or
to the end of the enclosing block.  An assertion may continue over further
``//`` lines until its terminating ``;``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ir import (
    BOOL, WORD, Assert, Assign, BinOp, BitSel, Call, Const, DataType, Diagnostic,
    DiagnosticError, For, If, Index, Loc, Not, Old, Pou, Program, ProgramPoint,
    Requirement, VarDecl, VarRef, array_of, format_value, walk_stmts,
)


class ParseError(DiagnosticError):
    pass


KEYWORDS = {
    "FUNCTION", "FUNCTION_BLOCK", "END_FUNCTION", "END_FUNCTION_BLOCK",
    "VAR_INPUT", "VAR_OUTPUT", "VAR_IN_OUT", "VAR", "VAR_TEMP", "VAR_CONFIG", "END_VAR",
    "BOOL", "WORD", "ARRAY", "OF", "VOID",
    "IF", "THEN", "ELSIF", "ELSE", "END_IF", "FOR", "TO", "DO", "END_FOR",
    "AND", "OR", "XOR", "NOT", "TRUE", "FALSE",
}

SECTION_KW = {
    "VAR_INPUT": "INPUT", "VAR_OUTPUT": "OUTPUT", "VAR_IN_OUT": "INOUT",
    "VAR": "STATIC", "VAR_TEMP": "TEMP", "VAR_CONFIG": "CONFIG",
}
SECTION_HEADER = {v: k for k, v in SECTION_KW.items()}

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"(?:(2|8|16)#([0-9A-Fa-f_]+))|([0-9][0-9_]*)")


@dataclass(frozen=True)
class SourceFile:
    text: str
    path: str | None = None

    @classmethod
    def read(cls, path) -> SourceFile:
        with open(path, "rb") as f:
            return cls(f.read().decode("utf-8"), str(path))


@dataclass(frozen=True)
class Token:
    kind: str  # KW IDENT INT BITSEL OP EOF
    value: object
    line: int
    col: int
    offset: int

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of file"
        if self.kind == "BITSEL":
            return f"'.%X{self.value}'"
        return repr(str(self.value))


@dataclass(frozen=True)
class AssertionComment:
    text: str           # full comment text starting with //#ASSERT
    expr_text: str      # the expression, without the trailing ';'
    loc: Loc
    offset: int
    tokens: tuple = ()


class _Lexer:
    def __init__(self, src: SourceFile):
        self.src = src
        self.text = src.text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.assertions: list[AssertionComment] = []
        self.diags: list[Diagnostic] = []

    def loc(self, line=None, col=None):
        return Loc(line or self.line, col or self.col, self.src.path)

    def advance(self, n):
        for ch in self.text[self.pos:self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def run(self):
        t = self.text
        while self.pos < len(t):
            ch = t[self.pos]
            if ch in " \t\r\n﻿":
                self.advance(1)
            elif t.startswith("//", self.pos):
                self.line_comment()
            elif t.startswith("(*", self.pos):
                end = t.find("*)", self.pos + 2)
                if end < 0:
                    self.diags.append(Diagnostic("unterminated block comment", self.loc()))
                    self.advance(len(t) - self.pos)
                else:
                    self.advance(end + 2 - self.pos)
            else:
                self.token()
        self.tokens.append(Token("EOF", None, self.line, self.col, self.pos))

    def line_comment(self):
        t = self.text
        end = t.find("\n", self.pos)
        end = len(t) if end < 0 else end
        body = t[self.pos + 2:end].rstrip("\r")
        if not body.startswith("#ASSERT"):
            self.advance(end - self.pos)
            return
        start_loc, start_off = self.loc(), self.pos
        segments = []  # (text, line, col, offset)
        seg_text = body[len("#ASSERT"):]
        seg_col = self.col + 2 + len("#ASSERT")
        raw = ["//" + body]
        while True:
            segments.append((seg_text, self.line, seg_col, self.pos + (seg_col - self.col)))
            self.advance(end - self.pos)
            if ";" in seg_text:
                break
            # continuation must be another // comment line
            m = re.compile(r"[ \t\r]*\n([ \t]*)//").match(t, self.pos)
            if not m or t.startswith("#ASSERT", m.end()):
                self.diags.append(Diagnostic("malformed assertion comment: missing ';'", start_loc))
                return
            self.advance(m.end() - self.pos)
            end = t.find("\n", self.pos)
            end = len(t) if end < 0 else end
            seg_text = t[self.pos:end].rstrip("\r")
            seg_col = self.col
            raw.append("//" + seg_text)
        tokens = []
        expr_parts = []
        for text, line, col, off in segments:
            cut = text.find(";")
            piece = text if cut < 0 else text[:cut]
            expr_parts.append(piece)
            sub = _Lexer(SourceFile(piece, self.src.path))
            sub.line, sub.col = line, col
            sub.run()
            for tok in sub.tokens[:-1]:
                tokens.append(Token(tok.kind, tok.value, tok.line, tok.col, tok.offset + off))
            self.diags.extend(sub.diags)
            if cut >= 0:
                break
        self.assertions.append(AssertionComment(
            "\n".join(raw), " ".join(p.strip() for p in expr_parts).strip(),
            start_loc, start_off, tuple(tokens)))

    def emit(self, kind, value, n):
        self.tokens.append(Token(kind, value, self.line, self.col, self.pos))
        self.advance(n)

    def token(self):
        t, p = self.text, self.pos
        ch = t[p]
        if ch == '"':
            end = t.find('"', p + 1)
            if end < 0 or "\n" in t[p:end]:
                self.diags.append(Diagnostic("unterminated quoted identifier", self.loc()))
                self.advance(1)
                return
            name = t[p + 1:end]
            if not name:
                self.diags.append(Diagnostic("empty quoted identifier", self.loc()))
            self.emit("IDENT", name, end + 1 - p)
            return
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            m = _IDENT_RE.match(t, p)
            word = m.group(0)
            if word.upper() in KEYWORDS:
                self.emit("KW", word.upper(), len(word))
            else:
                self.emit("IDENT", word, len(word))
            return
        if ch.isascii() and ch.isdigit():
            m = _INT_RE.match(t, p)
            if m.group(1):
                digits = m.group(2).replace("_", "")
                try:
                    value = int(digits, int(m.group(1)))
                except ValueError:
                    self.diags.append(Diagnostic(f"bad literal {m.group(0)!r}", self.loc()))
                    value = 0
            else:
                value = int(m.group(3).replace("_", ""))
            self.emit("INT", value, m.end() - p)
            return
        if t.startswith(".%X", p) or t.startswith(".%x", p):
            m = re.compile(r"[0-9]+|[A-Za-z_][A-Za-z0-9_]*").match(t, p + 3)
            if not m:
                self.diags.append(Diagnostic("bit selector needs a bit number", self.loc()))
                self.advance(3)
                return
            v = m.group(0)
            self.emit("BITSEL", int(v) if v.isdigit() else v, m.end() - p)
            return
        for op in (":=", "=>", "<>", "..", ":", ";", ",", "(", ")", "[", "]", "=", "&"):
            if t.startswith(op, p):
                self.emit("OP", op, len(op))
                return
        if ch in "+-*/<>":
            self.diags.append(Diagnostic(f"arithmetic/relational operator {ch!r} is not supported", self.loc()))
        else:
            self.diags.append(Diagnostic(f"unexpected character {ch!r}", self.loc()))
        self.advance(1)


def tokenize(src: SourceFile):
    lx = _Lexer(src)
    lx.run()
    return lx


# --------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, tokens, path=None):
        self.toks = tokens
        self.i = 0
        self.path = path

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def loc(self, tok=None) -> Loc:
        tok = tok or self.tok
        return Loc(tok.line, tok.col, self.path)

    def fail(self, expected):
        exp = ", ".join(sorted(expected))
        raise ParseError([Diagnostic(f"syntax error: expected {exp}; found {self.tok.describe()}", self.loc())])

    def at(self, kind, value=None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def accept(self, kind, value=None):
        if self.at(kind, value):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, kind, value=None) -> Token:
        t = self.accept(kind, value)
        if t is None:
            self.fail({repr(value) if value else kind.lower()})
        return t

    # expressions -----------------------------------------------------------
    def expr(self):
        return self.binary(0)

    LEVELS = (("OR",), ("XOR",), ("AND", "&"), ("=", "<>"))
    OPNAME = {"OR": "OR", "XOR": "XOR", "AND": "AND", "&": "AND", "=": "EQ", "<>": "NEQ"}

    def binary(self, level):
        if level == len(self.LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while self.tok.kind in ("KW", "OP") and self.tok.value in self.LEVELS[level]:
            t = self.tok
            self.i += 1
            right = self.binary(level + 1)
            left = BinOp(self.OPNAME[t.value], left, right, loc=self.loc(t))
        return left

    def unary(self):
        t = self.accept("KW", "NOT")
        if t:
            return Not(self.unary(), loc=self.loc(t))
        return self.postfix(self.primary())

    def postfix(self, e):
        while True:
            if self.at("OP", "["):
                t = self.tok
                self.i += 1
                idx = self.index_value()
                self.expect("OP", "]")
                e = Index(e, idx, loc=self.loc(t))
            elif self.at("BITSEL"):
                t = self.tok
                self.i += 1
                e = BitSel(e, t.value, loc=self.loc(t))
            else:
                return e

    def index_value(self):
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return t.value
        if t.kind == "IDENT":
            self.i += 1
            return t.value
        self.fail({"integer", "loop variable"})

    def primary(self):
        t = self.tok
        if t.kind == "OP" and t.value == "(":
            self.i += 1
            e = self.expr()
            self.expect("OP", ")")
            return e
        if t.kind == "KW" and t.value in ("TRUE", "FALSE"):
            self.i += 1
            return Const(t.value == "TRUE", loc=self.loc(t), dtype=BOOL)
        if t.kind == "INT":
            self.i += 1
            return Const(t.value, loc=self.loc(t), dtype=WORD)
        if t.kind == "IDENT":
            self.i += 1
            if t.value.upper() == "OLD" and self.at("OP", "("):
                self.i += 1
                name = self.expect("IDENT")
                self.expect("OP", ")")
                return Old(VarRef(name.value, loc=self.loc(name)), loc=self.loc(t))
            return VarRef(t.value, loc=self.loc(t))
        self.fail({"'('", "'TRUE'", "'FALSE'", "identifier", "integer", "'NOT'"})

    def lvalue(self):
        t = self.expect("IDENT")
        return self.postfix(VarRef(t.value, loc=self.loc(t)))

    # declarations ----------------------------------------------------------
    def dtype(self):
        if self.accept("KW", "BOOL"):
            return BOOL
        if self.accept("KW", "WORD"):
            return WORD
        t = self.accept("KW", "ARRAY")
        if t:
            self.expect("OP", "[")
            lo = self.expect("INT").value
            self.expect("OP", "..")
            hi = self.expect("INT").value
            self.expect("OP", "]")
            self.expect("KW", "OF")
            elem = self.dtype()
            if lo > hi:
                raise ParseError([Diagnostic(f"array bounds {lo}..{hi} are empty", self.loc(t))])
            return array_of(elem, lo, hi)
        self.fail({"'BOOL'", "'WORD'", "'ARRAY'"})

    def constant(self):
        if self.accept("OP", "["):
            items = [self.constant()]
            while self.accept("OP", ","):
                items.append(self.constant())
            self.expect("OP", "]")
            return tuple(items)
        t = self.tok
        if t.kind == "KW" and t.value in ("TRUE", "FALSE"):
            self.i += 1
            return t.value == "TRUE"
        if t.kind == "INT":
            self.i += 1
            return t.value
        self.fail({"constant"})

    def var_block(self, section, decls, seen):
        while not self.accept("KW", "END_VAR"):
            names = [self.expect("IDENT")]
            while self.accept("OP", ","):
                names.append(self.expect("IDENT"))
            self.expect("OP", ":")
            dt = self.dtype()
            init = None
            if self.accept("OP", ":="):
                init = self.constant()
            self.expect("OP", ";")
            for n in names:
                if n.value in seen:
                    raise ParseError([Diagnostic(f"duplicate declaration {n.value!r}", self.loc(n))])
                seen.add(n.value)
                decls.append(VarDecl(n.value, dt, section, init, loc=self.loc(n)))

    # statements ------------------------------------------------------------
    def block(self, terminators, hooks):
        body = []
        while True:
            hooks.flush(self.tok.offset, body)
            if self.tok.kind == "KW" and self.tok.value in terminators:
                return tuple(body)
            if self.at("EOF"):
                self.fail({repr(t) for t in terminators})
            if self.accept("OP", ";"):
                continue
            body.append(self.statement(hooks))

    def statement(self, hooks):
        t = self.tok
        if self.accept("KW", "IF"):
            branches = []
            cond = self.expr()
            self.expect("KW", "THEN")
            branches.append((cond, self.block({"ELSIF", "ELSE", "END_IF"}, hooks)))
            else_body = ()
            while True:
                if self.accept("KW", "ELSIF"):
                    cond = self.expr()
                    self.expect("KW", "THEN")
                    branches.append((cond, self.block({"ELSIF", "ELSE", "END_IF"}, hooks)))
                elif self.accept("KW", "ELSE"):
                    else_body = self.block({"END_IF"}, hooks)
                    self.expect("KW", "END_IF")
                    break
                else:
                    self.expect("KW", "END_IF")
                    break
            self.expect("OP", ";")
            return If(tuple(branches), else_body, loc=self.loc(t))
        if self.accept("KW", "FOR"):
            var = self.expect("IDENT")
            self.expect("OP", ":=")
            lo = self.expr()
            self.expect("KW", "TO")
            hi = self.expr()
            self.expect("KW", "DO")
            body = self.block({"END_FOR"}, hooks)
            self.expect("KW", "END_FOR")
            self.expect("OP", ";")
            return For(var.value, lo, hi, body, loc=self.loc(t))
        if t.kind == "IDENT" and self.toks[self.i + 1].kind == "OP" and self.toks[self.i + 1].value == "(":
            self.i += 2
            inputs, outputs = [], []
            if not self.accept("OP", ")"):
                while True:
                    p = self.expect("IDENT")
                    if self.accept("OP", ":="):
                        inputs.append((p.value, self.expr()))
                    elif self.accept("OP", "=>"):
                        outputs.append((p.value, self.lvalue()))
                    else:
                        self.fail({"':='", "'=>'"})
                    if self.accept("OP", ")"):
                        break
                    self.expect("OP", ",")
            self.expect("OP", ";")
            return Call(t.value, tuple(inputs), tuple(outputs), loc=self.loc(t))
        if t.kind == "IDENT":
            target = self.lvalue()
            self.expect("OP", ":=")
            value = self.expr()
            self.expect("OP", ";")
            return Assign(target, value, loc=self.loc(t))
        self.fail({"identifier", "'IF'", "'FOR'", "';'"})

    def pou(self, hooks):
        t = self.tok
        if self.accept("KW", "FUNCTION"):
            kind, end = "FC", "END_FUNCTION"
        elif self.accept("KW", "FUNCTION_BLOCK"):
            kind, end = "FB", "END_FUNCTION_BLOCK"
        else:
            self.fail({"'FUNCTION'", "'FUNCTION_BLOCK'"})
        name = self.expect("IDENT")
        if self.accept("OP", ":"):
            self.expect("KW", "VOID")
        decls, seen = [], set()
        while self.tok.kind == "KW" and self.tok.value in SECTION_KW:
            section = SECTION_KW[self.tok.value]
            self.i += 1
            self.var_block(section, decls, seen)
        hooks.enter(name.value)
        body = self.block({end}, hooks)
        self.expect("KW", end)
        hooks.leave()
        return Pou(name.value, kind, tuple(decls), body, loc=self.loc(t))


class _AssertionHooks:
    """Inserts Assert statements for pending //#ASSERT comments."""

    def __init__(self, comments, path):
        self.pending = list(comments)
        self.path = path
        self.pou = None
        self.counts = {}
        self.requirements = []
        self.comments = {}

    def enter(self, pou):
        self.pou = pou

    def leave(self):
        self.pou = None

    def flush(self, offset, body):
        while self.pending and self.pending[0].offset < offset:
            c = self.pending.pop(0)
            if self.pou is None:
                raise ParseError([Diagnostic("assertion comment outside a POU body", c.loc)])
            n = self.counts.get(self.pou, 0) + 1
            self.counts[self.pou] = n
            rid = f"{self.pou}_assert{n}"
            expr = parse_expression_tokens(c.tokens, self.path, c.loc)
            self.requirements.append(Requirement(
                rid, expr, "inline", ProgramPoint(self.pou, None, c.loc.line), text=c.expr_text))
            self.comments[rid] = c
            body.append(Assert(rid, loc=c.loc))


def parse_expression_tokens(tokens, path=None, loc=None):
    if not tokens:
        raise ParseError([Diagnostic("empty assertion expression", loc)])
    last = tokens[-1]
    eof = Token("EOF", None, last.line, last.col + len(str(last.value)), last.offset + 1)
    p = _Parser(list(tokens) + [eof], path)
    e = p.expr()
    if not p.at("EOF"):
        p.fail({"end of expression"})
    return e


def parse_expression(text: str, path=None):
    """Parse a standalone expression (requirements, manifests)."""
    lx = tokenize(SourceFile(text, path))
    if lx.diags:
        raise ParseError(lx.diags)
    return parse_expression_tokens(lx.tokens[:-1], path, Loc(1, 1, path))


def _find_points(program: Program) -> Program:
    """Fill in the statement path of every inline requirement."""
    paths = {}

    def visit(body, prefix, pou):
        for i, s in enumerate(body):
            if isinstance(s, Assert):
                paths[s.req_id] = (pou, prefix + (i,))
            elif isinstance(s, If):
                for b, (_, br) in enumerate(s.branches):
                    visit(br, prefix + (i, b), pou)
                visit(s.else_body, prefix + (i, len(s.branches)), pou)
            elif isinstance(s, For):
                visit(s.body, prefix + (i, 0), pou)

    for p in program.pous:
        visit(p.body, (), p.name)
    reqs = []
    for r in program.requirements:
        pou, path = paths[r.id]
        reqs.append(Requirement(r.id, r.expr, r.origin, ProgramPoint(pou, path, r.point.line), r.text))
    return Program(program.pous, program.entry, tuple(reqs))


def default_entry(pous) -> str:
    called = {s.pou for p in pous for s in walk_stmts(p.body) if isinstance(s, Call)}
    roots = [p.name for p in pous if p.name not in called]
    return (roots or [pous[-1].name])[-1]


def parse_program(src, entry: str | None = None) -> Program:
    """Parse IL source text (or a SourceFile) into an untyped Program.

    Raises ParseError with located diagnostics.
    """
    if isinstance(src, str):
        src = SourceFile(src)
    lx = tokenize(src)
    if lx.diags:
        raise ParseError(lx.diags)
    p = _Parser(lx.tokens, src.path)
    hooks = _AssertionHooks(lx.assertions, src.path)
    pous, names = [], set()
    while not p.at("EOF"):
        pou = p.pou(hooks)
        if pou.name in names:
            raise ParseError([Diagnostic(f"duplicate POU {pou.name!r}", pou.loc)])
        names.add(pou.name)
        pous.append(pou)
    if hooks.pending:
        raise ParseError([Diagnostic("assertion comment outside a POU body", hooks.pending[0].loc)])
    if not pous:
        raise ParseError([Diagnostic("no POU found", Loc(1, 1, src.path))])
    if entry is not None and entry not in names:
        raise ParseError([Diagnostic(f"entry POU {entry!r} not found", Loc(1, 1, src.path))])
    prog = Program(tuple(pous), entry or default_entry(pous), tuple(hooks.requirements))
    return _find_points(prog)


def extract_assertions(src) -> list[tuple[AssertionComment, ProgramPoint]]:
    """Every //#ASSERT comment paired with the program point it attaches to."""
    if isinstance(src, str):
        src = SourceFile(src)
    lx = tokenize(src)
    if lx.diags:
        raise ParseError(lx.diags)
    prog = parse_program(src)
    return [(c, r.point) for c, r in zip(lx.assertions, prog.requirements)]


# --------------------------------------------------------------------------
# Pretty-printing

_PREC = {"OR": 1, "XOR": 2, "AND": 3, "EQ": 4, "NEQ": 4}
_SYM = {"OR": "OR", "XOR": "XOR", "AND": "AND", "EQ": "=", "NEQ": "<>"}


def format_ident(name: str) -> str:
    if _IDENT_RE.fullmatch(name) and name.upper() not in KEYWORDS:
        return name
    return f'"{name}"'


def _prec(e) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Not):
        return 5
    return 6


def format_expr(e) -> str:
    if isinstance(e, Const):
        if isinstance(e.value, bool):
            return "TRUE" if e.value else "FALSE"
        return f"16#{e.value:04X}"
    if isinstance(e, VarRef):
        return format_ident(e.name)
    if isinstance(e, Old):
        return f"OLD({format_ident(e.var.name)})"
    if isinstance(e, Not):
        inner = format_expr(e.operand)
        return f"NOT {inner}" if _prec(e.operand) >= 5 else f"NOT ({inner})"
    if isinstance(e, (Index, BitSel)):
        base = format_expr(e.base)
        if _prec(e.base) < 6:
            base = f"({base})"
        if isinstance(e, Index):
            return f"{base}[{e.index}]"
        return f"{base}.%X{e.bit}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left, right = format_expr(e.left), format_expr(e.right)
        # mixed operators are always parenthesized for readability
        if isinstance(e.left, BinOp) and (e.left.op != e.op or _prec(e.left) < p):
            left = f"({left})"
        if isinstance(e.right, BinOp):
            right = f"({right})"
        return f"{left} {_SYM[e.op]} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _format_const(dtype: DataType, v) -> str:
    if dtype.kind == "ARRAY":
        return "[" + ", ".join(_format_const(dtype.elem, x) for x in v) + "]"
    return format_value(dtype, v)


def _format_block(body, reqs, indent, out):
    pad = "    " * indent
    for s in body:
        if isinstance(s, Assign):
            out.append(f"{pad}{format_expr(s.target)} := {format_expr(s.value)};")
        elif isinstance(s, If):
            for k, (cond, br) in enumerate(s.branches):
                kw = "IF" if k == 0 else "ELSIF"
                out.append(f"{pad}{kw} {format_expr(cond)} THEN")
                _format_block(br, reqs, indent + 1, out)
            if s.else_body:
                out.append(f"{pad}ELSE")
                _format_block(s.else_body, reqs, indent + 1, out)
            out.append(f"{pad}END_IF;")
        elif isinstance(s, For):
            out.append(f"{pad}FOR {format_ident(s.var)} := {s.lo.value} TO {s.hi.value} DO")
            _format_block(s.body, reqs, indent + 1, out)
            out.append(f"{pad}END_FOR;")
        elif isinstance(s, Call):
            args = [f"{format_ident(p)} := {format_expr(a)}" for p, a in s.inputs]
            args += [f"{format_ident(p)} => {format_expr(a)}" for p, a in s.outputs]
            out.append(f"{pad}{format_ident(s.pou)}({', '.join(args)});")
        elif isinstance(s, Assert):
            out.append(f"{pad}//#ASSERT {format_expr(reqs[s.req_id].expr)};")


def format_pou(pou: Pou, reqs: dict) -> str:
    kw = "FUNCTION" if pou.kind == "FC" else "FUNCTION_BLOCK"
    out = [f"{kw} {format_ident(pou.name)}"]
    section = None
    for d in pou.decls:
        if d.section != section:
            if section is not None:
                out.append("END_VAR")
            out.append(SECTION_HEADER[d.section])
            section = d.section
        init = "" if d.init is None else f" := {_format_const(d.dtype, d.init)}"
        out.append(f"    {format_ident(d.name)} : {d.dtype}{init};")
    if section is not None:
        out.append("END_VAR")
    _format_block(pou.body, reqs, 1, out)
    out.append(f"END_{kw}")
    return "\n".join(out)


def format_program(program: Program) -> str:
    """Render a program back to IL source; the result reparses to an equal Program."""
    reqs = {r.id: r for r in program.requirements}
    return "\n\n".join(format_pou(p, reqs) for p in program.pous) + "\n"
