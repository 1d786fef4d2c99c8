"""Tokenizer and parser for the fiber-exploration scripting language.

The language is line oriented: one statement per line, ``#`` comments,
keywords case-insensitive. Five verbs (LOAD, SELECT, LOCATE, UPDATE,
CALCULATE) take clause payloads; condition, spatial, and target expressions
live inside double-quoted string literals and have their own mini-grammars.

AST equality is semantic: raw source spellings (original casing, number
lexemes, payload text) are carried for formatting but excluded from
comparisons, so differently-cased keywords parse to equal statements.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .diagnostics import Diagnostic, Level, fatal, notice

VERBS = ("LOAD", "SELECT", "LOCATE", "UPDATE", "CALCULATE")
PREPOSITIONS = ("IN", "OUT")
CONJUNCTIVES = ("BY", "WITH")
ROUTINES = ("AvgFA", "AvgLA", "NumFibers", "NumFiber")
CONSTANTS = (
    "shape", "color", "size", "depth", "FA", "LA",
    "sagittal", "axial", "coronal", "DEFAULT", "RESET",
    "line", "tube", "ribbon", "value", "transparency",
)
KEYWORDS = {w.lower(): w for w in VERBS + PREPOSITIONS + CONJUNCTIVES + ROUTINES + CONSTANTS}

ATTRIBUTES = ("shape", "color", "size", "depth", "DEFAULT", "RESET")
MODES = ("line", "tube", "ribbon", "FA", "LA", "size", "color", "value", "transparency")
PLANES = ("sagittal", "axial", "coronal")
METRICS = ("FA", "LA")
COMPARISONS = ("<", "<=", ">", ">=", "==")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | string | number | operator | assign | newline
    text: str  # source slice (string tokens: content without the quotes)
    line: int
    column: int
    canonical: str = ""  # canonical casing for keyword tokens


_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?|\.\d+")


def tokenize(source: str) -> tuple[list[Token], list[Diagnostic]]:
    """Scan source into tokens; fatal diagnostics skip to the next line."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    for lineno, line in enumerate(source.splitlines(), start=1):
        col = 0
        n = len(line)
        while col < n:
            ch = line[col]
            if ch in " \t\r":
                col += 1
                continue
            if ch == "#":
                break
            start_col = col + 1  # 1-based
            if ch == '"':
                end = line.find('"', col + 1)
                if end < 0:
                    diags.append(fatal("unterminated string", lineno, start_col))
                    break
                tokens.append(Token("string", line[col + 1:end], lineno, start_col))
                col = end + 1
                continue
            m = _WORD_RE.match(line, col)
            if m:
                word = m.group(0)
                canon = KEYWORDS.get(word.lower())
                if canon is not None:
                    tokens.append(Token("keyword", word, lineno, start_col, canonical=canon))
                else:
                    tokens.append(Token("identifier", word, lineno, start_col))
                col = m.end()
                continue
            m = _NUMBER_RE.match(line, col)
            if m:
                tokens.append(Token("number", m.group(0), lineno, start_col))
                col = m.end()
                continue
            if ch == "=":
                tokens.append(Token("assign", "=", lineno, start_col))
                col += 1
                continue
            if ch in ",+-":
                tokens.append(Token("operator", ch, lineno, start_col))
                col += 1
                continue
            diags.append(fatal(f"unknown operator character {ch!r}", lineno, start_col))
            break
        tokens.append(Token("newline", "", lineno, n + 1))
    return tokens, diags


# --- embedded mini-grammars ---------------------------------------------------


@dataclass(frozen=True)
class ConditionExpr:
    """<metric> <op> <number | variable>  or  <metric> in [a, b]."""

    metric: str  # FA | LA
    op: str      # < <= > >= == in
    value: float | None = None
    interval: tuple[float, float] | None = None
    variable: str | None = None
    raw: str = field(default="", compare=False)


@dataclass(frozen=True)
class SpatialOp:
    plane: str   # sagittal | axial | coronal
    delta: float  # signed mm offset
    raw: str = field(default="", compare=False)


@dataclass(frozen=True)
class TargetSpec:
    is_all: bool
    names: tuple[str, ...]
    polarity: str = "IN"  # IN | OUT
    raw: str | None = field(default=None, compare=False)

    @classmethod
    def default(cls) -> "TargetSpec":
        return cls(is_all=True, names=())


_NUM_LITERAL_RE = re.compile(r"[+-]?(?:\d+(?:\.\d+)?|\.\d+)$")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _parse_number(text: str, what: str, line: int, column: int) -> float:
    if not _NUM_LITERAL_RE.match(text):
        raise _parse_fail(f"{what}: expected a number, got {text!r}", line, column)
    return float(text)


class ParseFailure(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _parse_fail(message: str, line: int, column: int) -> ParseFailure:
    return ParseFailure(fatal(message, line, column))


def parse_condition(text: str, line: int = 0, column: int = 0) -> ConditionExpr:
    """Parse a condition payload, e.g. ``FA in [0.2,0.25]`` or ``LA <= 0.5``."""
    src = text.strip()
    m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*", src)
    if not m:
        raise _parse_fail(f"condition {text!r}: expected a metric name", line, column)
    metric_word = m.group(1)
    if metric_word.upper() not in METRICS:
        raise _parse_fail(f"unknown metric {metric_word!r} in condition", line, column)
    metric = metric_word.upper()
    rest = src[m.end():]

    op_match = re.match(r"(<=|>=|==|=|<|>)\s*", rest)
    if op_match:
        op = "==" if op_match.group(1) in ("=", "==") else op_match.group(1)
        rhs = rest[op_match.end():].strip()
        if _NUM_LITERAL_RE.match(rhs):
            return ConditionExpr(metric, op, value=float(rhs), raw=text)
        if _IDENT_RE.match(rhs):
            return ConditionExpr(metric, op, variable=rhs, raw=text)
        raise _parse_fail(f"condition {text!r}: expected number or variable after {op!r}", line, column)

    in_match = re.match(r"in\b\s*", rest, flags=re.IGNORECASE)
    if in_match:
        rhs = rest[in_match.end():].strip()
        rng = re.match(r"\[\s*([^,\]\s]+)\s*,\s*([^,\]\s]+)\s*\]$", rhs)
        if not rng:
            raise _parse_fail(f"condition {text!r}: range operator requires [a,b]", line, column)
        a = _parse_number(rng.group(1), "range lower bound", line, column)
        b = _parse_number(rng.group(2), "range upper bound", line, column)
        if a > b:
            raise _parse_fail(f"empty range [{rng.group(1)},{rng.group(2)}]", line, column)
        return ConditionExpr(metric, "in", interval=(a, b), raw=text)

    raise _parse_fail(f"condition {text!r}: expected a comparison or range operator", line, column)


def parse_spatial(text: str, line: int = 0, column: int = 0) -> SpatialOp:
    """Parse a spatial payload, e.g. ``coronal +159.25``."""
    parts = text.strip().split()
    if not parts or parts[0].lower() not in PLANES:
        raise _parse_fail(f"spatial operation {text!r}: expected a plane name", line, column)
    plane = parts[0].lower()
    if len(parts) != 2:
        raise _parse_fail(f"spatial operation {text!r}: expected '<plane> <signed offset>'", line, column)
    offset = parts[1]
    if not offset.startswith(("+", "-")):
        raise _parse_fail("relative offset requires sign", line, column)
    if not _NUM_LITERAL_RE.match(offset):
        raise _parse_fail(f"spatial operation {text!r}: bad offset {offset!r}", line, column)
    return SpatialOp(plane=plane, delta=float(offset), raw=text)


def parse_target(text: str, polarity: str = "IN", line: int = 0, column: int = 0) -> TargetSpec:
    """Parse a target payload: comma-separated names, with ALL as the full scope."""
    names: list[str] = []
    for part in text.split(","):
        name = part.strip()
        if name and name not in names:
            names.append(name)
    if not names:
        raise _parse_fail("empty target list", line, column)
    if any(n.lower() == "all" for n in names):
        return TargetSpec(is_all=True, names=(), polarity=polarity, raw=text)
    return TargetSpec(is_all=False, names=tuple(names), polarity=polarity, raw=text)


def classify_select_payload(text: str) -> str:
    """Decide whether a SELECT payload is spatial, condition, or target form."""
    first = text.strip().split(None, 1)[0] if text.strip() else ""
    word = first.lower()
    if word in PLANES:
        return "spatial"
    head = re.match(r"[A-Za-z_][A-Za-z0-9_]*", first)
    if head and head.group(0).upper() in METRICS:
        return "condition"
    return "target"


# --- statements ----------------------------------------------------------------


@dataclass(frozen=True)
class Statement:
    verb: str
    line: int = field(default=0, compare=False)
    assign_to: str | None = None
    path: str | None = None                       # LOAD
    condition: ConditionExpr | None = None        # SELECT / LOCATE
    spatial: SpatialOp | None = None              # SELECT
    select_scope: TargetSpec | None = None        # SELECT, target-only form
    attribute: str | None = None                  # UPDATE
    mode: str | None = None                       # UPDATE ... BY
    params: tuple[float, ...] | None = None       # UPDATE ... WITH
    routine: str | None = None                    # CALCULATE
    target: TargetSpec = field(default_factory=TargetSpec.default)
    params_raw: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Script:
    statements: tuple[Statement, ...]
    diagnostics: tuple[Diagnostic, ...]

    @property
    def fatal_diagnostics(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.level is Level.FATAL)


class _Cursor:
    def __init__(self, tokens: list[Token], line: int):
        self.tokens = tokens
        self.pos = 0
        self.line = line

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None) -> ParseFailure:
        col = tok.column if tok else 0
        return _parse_fail(message, self.line, col)

    def expect_string(self, what: str) -> Token:
        tok = self.next()
        if tok is None or tok.kind != "string":
            raise self.fail(f"expected {what} (a quoted string)", tok)
        return tok

    def expect_end(self):
        tok = self.peek()
        if tok is not None:
            raise self.fail(f"unexpected token {tok.text!r}", tok)


def _parse_target_clause(cur: _Cursor, polarity_tok: Token) -> TargetSpec:
    payload = cur.expect_string("a target after IN/OUT")
    return parse_target(payload.text, polarity_tok.canonical, cur.line, payload.column)


def _parse_number_list(cur: _Cursor) -> tuple[tuple[float, ...], tuple[str, ...]]:
    values: list[float] = []
    raws: list[str] = []

    def one():
        sign = ""
        tok = cur.peek()
        if tok is not None and tok.kind == "operator" and tok.text in "+-":
            sign = tok.text
            cur.next()
            tok = cur.peek()
        if tok is None or tok.kind != "number":
            raise cur.fail("expected a number in WITH clause", tok)
        cur.next()
        values.append(float(sign + tok.text))
        raws.append(sign + tok.text)

    one()
    while (tok := cur.peek()) is not None and tok.kind == "operator" and tok.text == ",":
        cur.next()
        one()
    return tuple(values), tuple(raws)


def _parse_statement(tokens: list[Token], diags: list[Diagnostic]) -> Statement:
    line = tokens[0].line
    cur = _Cursor(tokens, line)

    assign_to = None
    first = cur.peek()
    if first is not None and first.kind == "identifier":
        nxt = tokens[1] if len(tokens) > 1 else None
        if nxt is not None and nxt.kind == "assign":
            assign_to = first.text
            cur.next()
            cur.next()
        else:
            raise cur.fail(f"unknown verb {first.text!r}", first)

    verb_tok = cur.next()
    if verb_tok is None or verb_tok.kind != "keyword" or verb_tok.canonical not in VERBS:
        got = verb_tok.text if verb_tok else "end of line"
        raise cur.fail(f"statement must start with a verb, got {got!r}", verb_tok)
    verb = verb_tok.canonical

    if assign_to is not None and verb in ("SELECT", "UPDATE"):
        raise cur.fail(f"{verb} does not produce a value", verb_tok)

    if verb == "LOAD":
        path = cur.expect_string("a data path")
        cur.expect_end()
        return Statement(verb="LOAD", line=line, assign_to=assign_to, path=path.text)

    if verb in ("SELECT", "LOCATE"):
        payload = cur.expect_string("a condition, spatial operation, or target")
        target = TargetSpec.default()
        if (tok := cur.peek()) is not None:
            if tok.kind == "keyword" and tok.canonical in PREPOSITIONS:
                cur.next()
                target = _parse_target_clause(cur, tok)
            else:
                raise cur.fail(f"unexpected token {tok.text!r}", tok)
        cur.expect_end()
        if verb == "LOCATE":
            cond = parse_condition(payload.text, line, payload.column)
            return Statement(verb="LOCATE", line=line, assign_to=assign_to,
                             condition=cond, target=target)
        form = classify_select_payload(payload.text)
        if form == "spatial":
            sp = parse_spatial(payload.text, line, payload.column)
            return Statement(verb="SELECT", line=line, spatial=sp, target=target)
        if form == "condition":
            cond = parse_condition(payload.text, line, payload.column)
            return Statement(verb="SELECT", line=line, condition=cond, target=target)
        scope = parse_target(payload.text, "IN", line, payload.column)
        return Statement(verb="SELECT", line=line, select_scope=scope, target=target)

    if verb == "UPDATE":
        attr_tok = cur.next()
        if attr_tok is None:
            raise cur.fail("UPDATE requires an attribute", attr_tok)
        if attr_tok.kind != "keyword" or attr_tok.canonical not in ATTRIBUTES:
            raise cur.fail(f"unknown attribute {attr_tok.text!r}", attr_tok)
        attribute = attr_tok.canonical
        mode = None
        params = None
        params_raw: tuple[str, ...] = ()
        target = TargetSpec.default()
        seen = set()
        while (tok := cur.peek()) is not None:
            if tok.kind != "keyword" or tok.canonical not in ("BY", "WITH", "IN", "OUT"):
                raise cur.fail(f"unexpected token {tok.text!r}", tok)
            clause = "target" if tok.canonical in PREPOSITIONS else tok.canonical
            if clause in seen:
                raise cur.fail(f"duplicate {tok.canonical} clause", tok)
            seen.add(clause)
            cur.next()
            if tok.canonical == "BY":
                mode_tok = cur.next()
                if mode_tok is None or mode_tok.kind != "keyword" or mode_tok.canonical not in MODES:
                    got = mode_tok.text if mode_tok else "end of line"
                    raise cur.fail(f"unknown encoding mode {got!r}", mode_tok)
                mode = mode_tok.canonical
            elif tok.canonical == "WITH":
                params, params_raw = _parse_number_list(cur)
            else:
                target = _parse_target_clause(cur, tok)
        return Statement(verb="UPDATE", line=line, attribute=attribute, mode=mode,
                         params=params, params_raw=params_raw, target=target)

    # CALCULATE
    routine_tok = cur.next()
    if routine_tok is None or routine_tok.kind != "keyword" or routine_tok.canonical not in ROUTINES:
        got = routine_tok.text if routine_tok else "end of line"
        raise cur.fail(f"unknown metric routine {got!r}", routine_tok)
    routine = routine_tok.canonical
    if routine == "NumFiber":
        diags.append(notice("NumFiber normalized to NumFibers", line, routine_tok.column))
        routine = "NumFibers"
    target = TargetSpec.default()
    if (tok := cur.peek()) is not None:
        if tok.kind == "keyword" and tok.canonical in PREPOSITIONS:
            cur.next()
            target = _parse_target_clause(cur, tok)
        else:
            raise cur.fail(f"unexpected token {tok.text!r}", tok)
    cur.expect_end()
    return Statement(verb="CALCULATE", line=line, assign_to=assign_to,
                     routine=routine, target=target)


def _statement_lines(tokens: list[Token]) -> Iterator[list[Token]]:
    group: list[Token] = []
    for tok in tokens:
        if tok.kind == "newline":
            if group:
                yield group
            group = []
        else:
            group.append(tok)
    if group:
        yield group


def parse_script(source: str) -> Script:
    """Parse source into statements; one statement per non-blank, non-comment line."""
    tokens, diags = tokenize(source)
    diags = list(diags)
    bad_lines = {d.line for d in diags if d.level is Level.FATAL}
    statements: list[Statement] = []
    for line_tokens in _statement_lines(tokens):
        if line_tokens[0].line in bad_lines:
            continue
        try:
            statements.append(_parse_statement(line_tokens, diags))
        except ParseFailure as pf:
            diags.append(pf.diagnostic)
    return Script(statements=tuple(statements), diagnostics=tuple(diags))


# --- formatting -----------------------------------------------------------------


def _format_target(spec: TargetSpec) -> str:
    if spec.raw is None:
        return ""
    return f' {spec.polarity} "{spec.raw}"'


def format_statement(stmt: Statement) -> str:
    head = f"{stmt.assign_to} = " if stmt.assign_to else ""
    if stmt.verb == "LOAD":
        return f'{head}LOAD "{stmt.path}"'
    if stmt.verb == "SELECT":
        payload = (stmt.condition or stmt.spatial or stmt.select_scope).raw
        return f'SELECT "{payload}"{_format_target(stmt.target)}'
    if stmt.verb == "LOCATE":
        return f'{head}LOCATE "{stmt.condition.raw}"{_format_target(stmt.target)}'
    if stmt.verb == "UPDATE":
        parts = [f"UPDATE {stmt.attribute}"]
        if stmt.mode is not None:
            parts.append(f"BY {stmt.mode}")
        if stmt.params is not None:
            raws = stmt.params_raw or tuple(repr(p) for p in stmt.params)
            parts.append(f"WITH {','.join(raws)}")
        return " ".join(parts) + _format_target(stmt.target)
    return f"{head}CALCULATE {stmt.routine}{_format_target(stmt.target)}"


def format_script(script: Script) -> str:
    """Canonical text: uppercase-canonical keywords, payload strings verbatim."""
    if not script.statements:
        return ""
    return "\n".join(format_statement(s) for s in script.statements) + "\n"
