"""Spec text format: abstract syntax, parser, printer, and evaluation.

A spec file is a sequence of sections.  ENV_VARS and SYS_VARS declare the
environment (input) and system (output) variables; the remaining sections
contribute one constraint per expression:

    ENV_VARS:      r c
    SYS_VARS:      g v
    ENV_INIT:      !r
    ENV_TRANS:     G(r -> X(r))
    ENV_LIVENESS:  GF(!r)
    SYS_INIT:      g
    SYS_TRANS:     G(c -> !v)
    SYS_LIVENESS:  GF(g & v)
    SYS_RESPONSE:  R(r, g)

Expressions use !, &, |, ->, <-> with that precedence order (tightest
first); -> and <-> associate to the right.  TRUE and FALSE are constants.
X(e) marks every variable reference inside e as referring to the next
step and is only meaningful inside G(...) constraints.  Comments run from
'#' to end of line.  A section keyword may be followed by expressions on
the same line and on the following lines, until the next section keyword;
repeating a section keyword appends to it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping

from .errors import (
    DuplicateVarError,
    MissingNextValuation,
    ScopeError,
    SpecSyntaxError,
)


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Ref:
    """A variable reference; nxt=True means the value at the next step."""

    name: str
    nxt: bool = False


@dataclass(frozen=True)
class Not:
    operand: "BoolExpr"


@dataclass(frozen=True)
class And:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Or:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Implies:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Iff:
    left: "BoolExpr"
    right: "BoolExpr"


BoolExpr = Const | Ref | Not | And | Or | Implies | Iff

TRUE = Const(True)
FALSE = Const(False)


def iter_refs(expr: BoolExpr) -> Iterator[Ref]:
    """Yield every Ref node in expr, left to right."""
    stack = [expr]
    out = []
    while stack:
        node = stack.pop()
        if isinstance(node, Ref):
            out.append(node)
        elif isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, (And, Or, Implies, Iff)):
            stack.append(node.right)
            stack.append(node.left)
    return iter(reversed(out))


def has_next(expr: BoolExpr) -> bool:
    return any(r.nxt for r in iter_refs(expr))


def mark_next(expr: BoolExpr) -> BoolExpr:
    """Mark every reference in expr as next-step.

    Raises ValueError if some reference is already marked; X may not nest.
    """
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Ref):
        if expr.nxt:
            msg = "nested next-marker"
            raise ValueError(msg)
        return replace(expr, nxt=True)
    if isinstance(expr, Not):
        return Not(mark_next(expr.operand))
    return type(expr)(mark_next(expr.left), mark_next(expr.right))


def strip_next(expr: BoolExpr) -> BoolExpr:
    """Remove the next-marker from every reference in expr."""
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Ref):
        return replace(expr, nxt=False)
    if isinstance(expr, Not):
        return Not(strip_next(expr.operand))
    return type(expr)(strip_next(expr.left), strip_next(expr.right))


def conj(exprs) -> BoolExpr:
    """Left-nested conjunction of exprs; TRUE when empty."""
    exprs = list(exprs)
    if not exprs:
        return TRUE
    out = exprs[0]
    for e in exprs[1:]:
        out = And(out, e)
    return out


def disj(exprs) -> BoolExpr:
    """Left-nested disjunction of exprs; FALSE when empty."""
    exprs = list(exprs)
    if not exprs:
        return FALSE
    out = exprs[0]
    for e in exprs[1:]:
        out = Or(out, e)
    return out


# ---------------------------------------------------------------------------
# Spec structure


class Player(Enum):
    ENV = "env"
    SYS = "sys"


class PartKind(Enum):
    INIT = "init"
    TRANS = "trans"
    LIVENESS = "liveness"
    RESPONSE = "response"


@dataclass(frozen=True)
class Gr1Part:
    """One constraint of a spec.

    For RESPONSE parts, body is the trigger and response is the reply;
    every other kind uses body alone.
    """

    player: Player
    kind: PartKind
    body: BoolExpr
    response: BoolExpr | None = None


@dataclass(frozen=True)
class Gr1Spec:
    env_vars: tuple[str, ...]
    sys_vars: tuple[str, ...]
    parts: tuple[Gr1Part, ...]

    @property
    def all_vars(self) -> tuple[str, ...]:
        return self.env_vars + self.sys_vars

    def parts_of(self, player: Player, kind: PartKind) -> tuple[Gr1Part, ...]:
        return tuple(
            p for p in self.parts if p.player is player and p.kind is kind
        )

    def with_extra_parts(self, extra) -> "Gr1Spec":
        return replace(self, parts=self.parts + tuple(extra))


SECTION_NAMES = (
    "ENV_VARS",
    "SYS_VARS",
    "ENV_INIT",
    "SYS_INIT",
    "ENV_TRANS",
    "SYS_TRANS",
    "ENV_LIVENESS",
    "SYS_LIVENESS",
    "SYS_RESPONSE",
)

RESERVED_WORDS = frozenset({"G", "GF", "X", "R", "TRUE", "FALSE"})


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t]+)
    | (?P<comment>\#[^\n]*)
    | (?P<nl>\n)
    | (?P<iff><->)
    | (?P<implies>->)
    | (?P<and>&)
    | (?P<or>\|)
    | (?P<not>!)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<comma>,)
    | (?P<colon>:)
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            msg = f"unexpected character {text[pos]!r}"
            raise SpecSyntaxError(line, col, msg)
        kind = m.lastgroup
        tok_text = m.group()
        col = pos - line_start + 1
        pos = m.end()
        if kind == "nl":
            tokens.append(Token("nl", tok_text, line, col))
            line += 1
            line_start = pos
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, tok_text, line, col))
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Expression parser


class _ExprParser:
    """Recursive descent over a token slice (newlines already removed)."""

    def __init__(self, tokens: list[Token], allow_next: bool, section: str):
        self.tokens = tokens
        self.pos = 0
        self.allow_next = allow_next
        self.section = section

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text if tok.kind != "eof" else "end of input"
            msg = f"expected {what}, found {shown!r}"
            raise SpecSyntaxError(tok.line, tok.col, msg)
        return self.take()

    def parse_full(self) -> BoolExpr:
        expr = self.parse_iff()
        tok = self.peek()
        if tok.kind != "eof":
            msg = f"unexpected {tok.text!r} after expression"
            raise SpecSyntaxError(tok.line, tok.col, msg)
        return expr

    def parse_iff(self) -> BoolExpr:
        left = self.parse_implies()
        if self.peek().kind == "iff":
            self.take()
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> BoolExpr:
        left = self.parse_or()
        if self.peek().kind == "implies":
            self.take()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> BoolExpr:
        expr = self.parse_and()
        while self.peek().kind == "or":
            self.take()
            expr = Or(expr, self.parse_and())
        return expr

    def parse_and(self) -> BoolExpr:
        expr = self.parse_unary()
        while self.peek().kind == "and":
            self.take()
            expr = And(expr, self.parse_unary())
        return expr

    def parse_unary(self) -> BoolExpr:
        tok = self.peek()
        if tok.kind == "not":
            self.take()
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> BoolExpr:
        tok = self.take()
        if tok.kind == "lparen":
            expr = self.parse_iff()
            self.expect("rparen", "')'")
            return expr
        if tok.kind == "name":
            if tok.text == "TRUE":
                return TRUE
            if tok.text == "FALSE":
                return FALSE
            if tok.text == "X":
                return self.parse_next(tok)
            if tok.text in RESERVED_WORDS:
                msg = f"{tok.text!r} cannot appear here"
                raise SpecSyntaxError(tok.line, tok.col, msg)
            return Ref(tok.text)
        shown = tok.text if tok.kind != "eof" else "end of input"
        msg = f"expected an expression, found {shown!r}"
        raise SpecSyntaxError(tok.line, tok.col, msg)

    def parse_next(self, x_tok: Token) -> BoolExpr:
        if not self.allow_next:
            msg = f"X(...) is not allowed in {self.section}"
            raise ScopeError(
                f"line {x_tok.line}, col {x_tok.col}: {msg}"
            )
        self.expect("lparen", "'(' after X")
        inner = self.parse_iff()
        self.expect("rparen", "')'")
        try:
            return mark_next(inner)
        except ValueError:
            msg = "X(...) may not nest"
            raise SpecSyntaxError(x_tok.line, x_tok.col, msg) from None


def _parse_expr_tokens(tokens, allow_next, section) -> BoolExpr:
    parser = _ExprParser(tokens, allow_next, section)
    return parser.parse_full()


# ---------------------------------------------------------------------------
# Spec parser


def _wrapped_expr(tokens, keyword, section):
    """Parse 'KW ( expr ) eof' and return the inner expression tokens."""
    head = tokens[0]
    if head.kind != "name" or head.text != keyword:
        shown = head.text if head.kind != "eof" else "end of input"
        msg = f"expected {keyword}(...), found {shown!r}"
        raise SpecSyntaxError(head.line, head.col, msg)
    if len(tokens) < 2 or tokens[1].kind != "lparen":
        tok = tokens[1] if len(tokens) > 1 else head
        msg = f"expected '(' after {keyword}"
        raise SpecSyntaxError(tok.line, tok.col, msg)
    tail = tokens[-2]
    if tail.kind != "rparen":
        msg = f"expected ')' closing {keyword}(...)"
        raise SpecSyntaxError(tail.line, tail.col, msg)
    eof = tokens[-1]
    return tokens[2:-2] + [eof]


def _split_response(tokens, section):
    """Split the inside of R(trigger, response) at the top-level comma."""
    depth = 0
    for idx, tok in enumerate(tokens):
        if tok.kind == "lparen":
            depth += 1
        elif tok.kind == "rparen":
            depth -= 1
        elif tok.kind == "comma" and depth == 0:
            eof = tokens[-1]
            return tokens[:idx] + [eof], tokens[idx + 1 :]
    tok = tokens[-1]
    msg = "expected ',' separating trigger and response"
    raise SpecSyntaxError(tok.line, tok.col, msg)


_SECTION_INFO = {
    "ENV_INIT": (Player.ENV, PartKind.INIT),
    "SYS_INIT": (Player.SYS, PartKind.INIT),
    "ENV_TRANS": (Player.ENV, PartKind.TRANS),
    "SYS_TRANS": (Player.SYS, PartKind.TRANS),
    "ENV_LIVENESS": (Player.ENV, PartKind.LIVENESS),
    "SYS_LIVENESS": (Player.SYS, PartKind.LIVENESS),
    "SYS_RESPONSE": (Player.SYS, PartKind.RESPONSE),
}


def _check_scope(part: Gr1Part, env_vars, sys_vars, section, line):
    env_set = set(env_vars)
    all_set = env_set | set(sys_vars)
    exprs = [part.body] if part.response is None else [part.body, part.response]
    for expr in exprs:
        for ref in iter_refs(expr):
            if ref.name not in all_set:
                msg = f"line {line}: undeclared variable {ref.name!r} in {section}"
                raise ScopeError(msg)
            if part.player is Player.ENV and ref.nxt and ref.name not in env_set:
                msg = (
                    f"line {line}: {section} may not mark system variable "
                    f"{ref.name!r} with X"
                )
                raise ScopeError(msg)
            if (
                part.player is Player.ENV
                and part.kind is PartKind.INIT
                and ref.name not in env_set
            ):
                msg = (
                    f"line {line}: ENV_INIT mentions system variable "
                    f"{ref.name!r}"
                )
                raise ScopeError(msg)
    if part.kind is PartKind.TRANS and part.player is Player.ENV:
        if not has_next(part.body):
            # A G(...) body with no X is an invariant the writer owns, so
            # an environment invariant may only mention environment vars.
            for ref in iter_refs(part.body):
                if ref.name not in env_set:
                    msg = (
                        f"line {line}: ENV_TRANS invariant mentions system "
                        f"variable {ref.name!r}"
                    )
                    raise ScopeError(msg)


def parse_spec(text: str) -> Gr1Spec:
    """Parse complete spec text into a Gr1Spec."""
    tokens = tokenize(text)
    # Group tokens into (section, line, expr-token-list) entries.  A new
    # entry starts at each section keyword and at each newline.
    entries = []
    env_vars: list[str] = []
    sys_vars: list[str] = []
    seen_sections = set()
    section = None
    current: list[Token] = []

    def flush():
        if section is None or not current:
            return
        if section in ("ENV_VARS", "SYS_VARS"):
            target = env_vars if section == "ENV_VARS" else sys_vars
            for tok in current:
                if tok.kind != "name":
                    msg = f"expected a variable name, found {tok.text!r}"
                    raise SpecSyntaxError(tok.line, tok.col, msg)
                if tok.text in RESERVED_WORDS:
                    msg = f"{tok.text!r} is reserved and cannot be a variable"
                    raise SpecSyntaxError(tok.line, tok.col, msg)
                if tok.text in env_vars or tok.text in sys_vars:
                    msg = f"variable {tok.text!r} declared twice"
                    raise DuplicateVarError(msg)
                target.append(tok.text)
        else:
            entries.append((section, current[0].line, list(current)))
        current.clear()

    for tok in tokens:
        if tok.kind == "name" and tok.text in SECTION_NAMES:
            flush()
            section = tok.text
            seen_sections.add(section)
            continue
        if tok.kind == "colon":
            if section is not None and not current:
                continue  # the optional colon right after a keyword
            msg = "unexpected ':'"
            raise SpecSyntaxError(tok.line, tok.col, msg)
        if tok.kind in ("nl", "eof"):
            flush()
            continue
        if section is None:
            msg = f"expected a section keyword, found {tok.text!r}"
            raise SpecSyntaxError(tok.line, tok.col, msg)
        current.append(tok)

    for required in ("ENV_VARS", "SYS_VARS"):
        if required not in seen_sections:
            msg = f"missing {required} section"
            raise SpecSyntaxError(1, 1, msg)

    parts = []
    for section, line, toks in entries:
        player, kind = _SECTION_INFO[section]
        eof = Token("eof", "", toks[-1].line, toks[-1].col + len(toks[-1].text))
        toks = toks + [eof]
        if kind is PartKind.INIT:
            body = _parse_expr_tokens(toks, False, section)
            part = Gr1Part(player, kind, body)
        elif kind is PartKind.TRANS:
            inner = _wrapped_expr(toks, "G", section)
            body = _parse_expr_tokens(inner, True, section)
            part = Gr1Part(player, kind, body)
        elif kind is PartKind.LIVENESS:
            inner = _wrapped_expr(toks, "GF", section)
            body = _parse_expr_tokens(inner, False, section)
            part = Gr1Part(player, kind, body)
        else:
            inner = _wrapped_expr(toks, "R", section)
            trig_toks, resp_toks = _split_response(inner, section)
            trigger = _parse_expr_tokens(trig_toks, False, section)
            response = _parse_expr_tokens(resp_toks, False, section)
            part = Gr1Part(player, kind, trigger, response)
        _check_scope(part, env_vars, sys_vars, section, line)
        parts.append(part)

    return Gr1Spec(tuple(env_vars), tuple(sys_vars), tuple(parts))


def parse_assumption(spec: Gr1Spec, text: str) -> Gr1Part:
    """Parse one environment constraint written as a section body line.

    Accepts the same shapes the sections do: GF(...) for liveness,
    G(...) for transitions and invariants, and a bare expression for an
    initial constraint.  Scoping is checked against spec's declarations.
    """
    stripped = text.strip()
    if stripped.startswith("GF"):
        section = "ENV_LIVENESS"
    elif stripped.startswith("G"):
        section = "ENV_TRANS"
    else:
        section = "ENV_INIT"
    mini = (
        f"ENV_VARS: {' '.join(spec.env_vars)}\n"
        f"SYS_VARS: {' '.join(spec.sys_vars)}\n"
        f"{section}: {stripped}\n"
    )
    parsed = parse_spec(mini)
    return parsed.parts[-1]


# ---------------------------------------------------------------------------
# Response expansion


def expand_responses(spec: Gr1Spec) -> Gr1Spec:
    """Rewrite R(t, g) parts into plain GR(1) parts over helper variables.

    Each response introduces one fresh system variable that tracks an
    undischarged trigger: it is set exactly when the obligation is open
    after this step, i.e. when a trigger has been seen (now or earlier)
    and the next step does not answer it.  Requiring the helper to be
    false infinitely often forces every trigger to be answered.
    """
    responses = [p for p in spec.parts if p.kind is PartKind.RESPONSE]
    if not responses:
        return spec
    taken = set(spec.all_vars)
    new_vars = []
    new_parts = []
    kept = [p for p in spec.parts if p.kind is not PartKind.RESPONSE]
    for idx, part in enumerate(responses, start=1):
        name = f"pend{idx}"
        while name in taken:
            name = "_" + name
        taken.add(name)
        new_vars.append(name)
        pend = Ref(name)
        trigger = part.body
        answered = mark_next(part.response)
        update = Iff(
            Ref(name, nxt=True),
            And(Or(trigger, pend), Not(answered)),
        )
        new_parts.append(Gr1Part(Player.SYS, PartKind.INIT, Not(pend)))
        new_parts.append(Gr1Part(Player.SYS, PartKind.TRANS, update))
        new_parts.append(Gr1Part(Player.SYS, PartKind.LIVENESS, Not(pend)))
    return Gr1Spec(
        spec.env_vars,
        spec.sys_vars + tuple(new_vars),
        tuple(kept) + tuple(new_parts),
    )


# ---------------------------------------------------------------------------
# Printer

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def _fully_next(expr: BoolExpr) -> bool:
    refs = list(iter_refs(expr))
    return bool(refs) and all(r.nxt for r in refs)


def _fmt(expr: BoolExpr, parent_prec: int) -> str:
    if _fully_next(expr):
        return f"X({_fmt(strip_next(expr), 0)})"
    if isinstance(expr, Const):
        return "TRUE" if expr.value else "FALSE"
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Not):
        return "!" + _fmt(expr.operand, _PREC[Not])
    prec = _PREC[type(expr)]
    if isinstance(expr, (And, Or)):
        op = " & " if isinstance(expr, And) else " | "
        text = _fmt(expr.left, prec) + op + _fmt(expr.right, prec + 1)
    else:
        op = " -> " if isinstance(expr, Implies) else " <-> "
        text = _fmt(expr.left, prec + 1) + op + _fmt(expr.right, prec)
    if prec < parent_prec:
        return "(" + text + ")"
    return text


def format_expr(expr: BoolExpr) -> str:
    """Render an expression; X is hoisted over fully next-marked subtrees."""
    return _fmt(expr, 0)


def format_part(part: Gr1Part) -> str:
    if part.kind is PartKind.INIT:
        return format_expr(part.body)
    if part.kind is PartKind.TRANS:
        return f"G({format_expr(part.body)})"
    if part.kind is PartKind.LIVENESS:
        return f"GF({format_expr(part.body)})"
    return f"R({format_expr(part.body)}, {format_expr(part.response)})"


_SECTION_OF = {
    (Player.ENV, PartKind.INIT): "ENV_INIT",
    (Player.SYS, PartKind.INIT): "SYS_INIT",
    (Player.ENV, PartKind.TRANS): "ENV_TRANS",
    (Player.SYS, PartKind.TRANS): "SYS_TRANS",
    (Player.ENV, PartKind.LIVENESS): "ENV_LIVENESS",
    (Player.SYS, PartKind.LIVENESS): "SYS_LIVENESS",
    (Player.SYS, PartKind.RESPONSE): "SYS_RESPONSE",
}


def section_of(part: Gr1Part) -> str:
    return _SECTION_OF[(part.player, part.kind)]


def format_spec(spec: Gr1Spec) -> str:
    """Render a whole spec in section order, one constraint per line."""
    lines = []
    lines.append("ENV_VARS: " + " ".join(spec.env_vars))
    lines.append("SYS_VARS: " + " ".join(spec.sys_vars))
    for section in SECTION_NAMES[2:]:
        for part in spec.parts:
            if section_of(part) == section:
                lines.append(f"{section}: {format_part(part)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evaluation


def eval_expr(
    expr: BoolExpr,
    now: Mapping[str, bool],
    nxt: Mapping[str, bool] | None = None,
) -> bool:
    """Evaluate expr over a current valuation and an optional next one."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Ref):
        if expr.nxt:
            if nxt is None:
                msg = f"reference X({expr.name}) needs a next-step valuation"
                raise MissingNextValuation(msg)
            return bool(nxt[expr.name])
        return bool(now[expr.name])
    if isinstance(expr, Not):
        return not eval_expr(expr.operand, now, nxt)
    if isinstance(expr, And):
        return eval_expr(expr.left, now, nxt) and eval_expr(expr.right, now, nxt)
    if isinstance(expr, Or):
        return eval_expr(expr.left, now, nxt) or eval_expr(expr.right, now, nxt)
    if isinstance(expr, Implies):
        return (not eval_expr(expr.left, now, nxt)) or eval_expr(
            expr.right, now, nxt
        )
    if isinstance(expr, Iff):
        return eval_expr(expr.left, now, nxt) == eval_expr(expr.right, now, nxt)
    msg = f"not an expression node: {expr!r}"
    raise TypeError(msg)
