"""Concrete ASCII syntax: lexer, parser, pretty-printer, matrix/vector files.

Grammar (parenthesized forms always accepted):

    prop    ::= imp ;  imp ::= conn ("->" imp)?            -- right-assoc, lowest
    conn    ::= patom (("&" | "|" | "@") patom)*            -- one level, left-assoc
    patom   ::= "unit" | "void" | "(" prop ")"

    term    ::= "\\" ident ":" prop "." term | sum
    sum     ::= tens ("+" tens)*                            -- left-assoc
    tens    ::= scalapp ("><" scalapp)*                     -- feature-gated
    scalapp ::= ("{" scalar "}" "*")* app                   -- prefix binds the whole app
    app     ::= atom atom*
    atom    ::= ident | "{" scalar "}" ".*"
            | "<" term "," term ">" | "[" term "," term "]"
            | "inl" "[" prop "]" "(" term ")" | "inr" "[" prop "]" "(" term ")"
            | "dtop" "(" term "," term ")" | "dbot" "[" prop "]" "(" term ")"
            | "dand1" "(" term "," ident "." term ")"       -- same for dand2, dsup1, dsup2
            | "dor" "(" term "," ident "." term "," ident "." term ")"   -- same for dsup
            | "(" term ")"

    scalar  ::= rational | rational "+" rational "i" | rational "i"
    rational ::= int | int "/" posint

Scalars appear only between braces so the lexer never confuses the term-level
sum "+" with scalar addition.  `parse_term(print_term(t))` is alpha-equal to t.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .kernel import (And, App, Bot, DAnd1, DAnd2, DBot, DOr, DSup, DSup1,
                     DSup2, DTop, GaussianRational, Imp, Inl, Inr, Lam, Or,
                     Pair, Proposition, Scal, Scalar, SourceSpan, Star, Sum,
                     Sup, SupPair, Tensor, Term, Top, Var, make_scalar)

KEYWORDS = frozenset(("unit", "void", "inl", "inr", "dtop", "dbot",
                      "dand1", "dand2", "dor", "dsup", "dsup1", "dsup2"))


class ParseError(Exception):
    """Rejected input; always carries a SourceSpan and the expected tokens."""

    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        self.message = message
        self.span = span
        self.expected = expected
        where = f"line {span.line}, column {span.col}"
        extra = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at {where}{extra}")


@dataclass(frozen=True)
class _Token:
    kind: str  # punctuation text, "ident", "scalar", or "eof"
    text: str
    span: SourceSpan


_PUNCT = ("->", "><", ".*", "\\", ":", ".", ",", "<", ">", "[", "]",
          "(", ")", "&", "|", "@", "+", "*")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*")
_BRACE_RE = re.compile(r"\{([^{}]*)\}")


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    last = text.rfind("\n", 0, pos)
    return line, pos - last


def _span(text: str, start: int, end: int) -> SourceSpan:
    line, col = _line_col(text, start)
    return SourceSpan(start, end, line, col)


def tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "{":
            m = _BRACE_RE.match(text, i)
            if m is None:
                raise ParseError("unterminated scalar braces", _span(text, i, n))
            tokens.append(_Token("scalar", m.group(1), _span(text, i, m.end())))
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(_Token(p, p, _span(text, i, i + len(p))))
                i += len(p)
                break
        else:
            m = _IDENT_RE.match(text, i)
            if m is None:
                raise ParseError(f"unexpected character {c!r}", _span(text, i, i + 1))
            word = m.group(0)
            kind = word if word in KEYWORDS else "ident"
            tokens.append(_Token(kind, word, _span(text, i, m.end())))
            i = m.end()
    tokens.append(_Token("eof", "", _span(text, n, n)))
    return tokens


# ---------------------------------------------------------------------------
# Scalar literals

_RAT = r"-?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(rf"^({_RAT})$|^({_RAT})\+({_RAT})i$|^({_RAT})i$")


def parse_scalar(text: str, span: Optional[SourceSpan] = None) -> Scalar:
    """Parse a scalar literal: rational, rational+rationali, or rationali."""
    if span is None:
        span = SourceSpan(0, len(text), 1, 1)
    m = _SCALAR_RE.match(text.strip())
    if m is None:
        raise ParseError(f"malformed scalar {text!r}", span,
                         ("rational", "rational+rationali", "rationali"))
    try:
        if m.group(1) is not None:
            return make_scalar(Fraction(m.group(1)))
        if m.group(4) is not None:
            return make_scalar(0, Fraction(m.group(4)))
        return make_scalar(Fraction(m.group(2)), Fraction(m.group(3)))
    except ZeroDivisionError:
        raise ParseError("zero denominator in scalar", span) from None


def print_scalar(a: Scalar) -> str:
    if isinstance(a, GaussianRational):
        if a.re == 0:
            return f"{a.im}i"
        return f"{a.re}+{a.im}i"
    return str(Fraction(a))


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, text: str, allow_tensor: bool):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_tensor = allow_tensor

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected {self._show(tok)}", tok.span, (kind,))
        return self.next()

    @staticmethod
    def _show(tok: _Token) -> str:
        return "end of input" if tok.kind == "eof" else f"{tok.text!r}"

    def fail(self, expected: tuple[str, ...]):
        tok = self.peek()
        raise ParseError(f"unexpected {self._show(tok)}", tok.span, expected)

    # -- propositions

    def prop(self) -> Proposition:
        left = self.prop_conn()
        if self.peek().kind == "->":
            self.next()
            return Imp(left, self.prop())
        return left

    def prop_conn(self) -> Proposition:
        left = self.prop_atom()
        while self.peek().kind in ("&", "|", "@"):
            op = self.next().kind
            right = self.prop_atom()
            left = {"&": And, "|": Or, "@": Sup}[op](left, right)
        return left

    def prop_atom(self) -> Proposition:
        tok = self.peek()
        if tok.kind == "unit":
            self.next()
            return Top()
        if tok.kind == "void":
            self.next()
            return Bot()
        if tok.kind == "(":
            self.next()
            p = self.prop()
            self.expect(")")
            return p
        self.fail(("unit", "void", "("))

    # -- terms

    def term(self) -> Term:
        if self.peek().kind == "\\":
            start = self.next().span
            x = self.expect("ident").text
            self.expect(":")
            dom = self.prop()
            self.expect(".")
            body = self.term()
            return Lam(x, dom, body, span=self._join(start, body))
        return self.sum()

    def sum(self) -> Term:
        left = self.tens()
        while self.peek().kind == "+":
            self.next()
            right = self.tens()
            left = Sum(left, right, span=self._join_tt(left, right))
        return left

    def tens(self) -> Term:
        left = self.scalapp()
        while self.peek().kind == "><":
            tok = self.next()
            if not self.allow_tensor:
                raise ParseError("tensor syntax '><' is disabled "
                                 "(enable the tensor extension)", tok.span)
            right = self.scalapp()
            left = Tensor(left, right, span=self._join_tt(left, right))
        return left

    def scalapp(self) -> Term:
        prefixes: list[tuple[Scalar, SourceSpan]] = []
        while self.peek().kind == "scalar" and self.peek(1).kind == "*":
            tok = self.next()
            self.next()
            prefixes.append((parse_scalar(tok.text, tok.span), tok.span))
        t = self.app()
        for coeff, sp in reversed(prefixes):
            t = Scal(coeff, t, span=self._join(sp, t))
        return t

    _ATOM_START = frozenset(("ident", "scalar", "(", "<", "[",
                             "inl", "inr", "dtop", "dbot",
                             "dand1", "dand2", "dor", "dsup", "dsup1", "dsup2"))

    def app(self) -> Term:
        t = self.atom()
        while self.peek().kind in self._ATOM_START:
            arg = self.atom()
            t = App(t, arg, span=self._join_tt(t, arg))
        return t

    def atom(self) -> Term:
        tok = self.peek()
        k = tok.kind
        if k == "ident":
            self.next()
            return Var(tok.text, span=tok.span)
        if k == "scalar":
            self.next()
            dot = self.expect(".*")
            return Star(parse_scalar(tok.text, tok.span),
                        span=SourceSpan(tok.span.start, dot.span.end,
                                        tok.span.line, tok.span.col))
        if k == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if k == "<":
            self.next()
            left = self.term()
            self.expect(",")
            right = self.term()
            close = self.expect(">")
            return Pair(left, right, span=self._join(tok.span, None, close.span))
        if k == "[":
            self.next()
            left = self.term()
            self.expect(",")
            right = self.term()
            close = self.expect("]")
            return SupPair(left, right, span=self._join(tok.span, None, close.span))
        if k in ("inl", "inr"):
            self.next()
            self.expect("[")
            other = self.prop()
            self.expect("]")
            self.expect("(")
            body = self.term()
            close = self.expect(")")
            ctor = Inl if k == "inl" else Inr
            return ctor(other, body, span=self._join(tok.span, None, close.span))
        if k == "dtop":
            self.next()
            self.expect("(")
            scrut = self.term()
            self.expect(",")
            body = self.term()
            close = self.expect(")")
            return DTop(scrut, body, span=self._join(tok.span, None, close.span))
        if k == "dbot":
            self.next()
            self.expect("[")
            result = self.prop()
            self.expect("]")
            self.expect("(")
            scrut = self.term()
            close = self.expect(")")
            return DBot(result, scrut, span=self._join(tok.span, None, close.span))
        if k in ("dand1", "dand2", "dsup1", "dsup2"):
            self.next()
            self.expect("(")
            scrut = self.term()
            self.expect(",")
            x = self.expect("ident").text
            self.expect(".")
            body = self.term()
            close = self.expect(")")
            ctor = {"dand1": DAnd1, "dand2": DAnd2,
                    "dsup1": DSup1, "dsup2": DSup2}[k]
            return ctor(scrut, x, body, span=self._join(tok.span, None, close.span))
        if k in ("dor", "dsup"):
            self.next()
            self.expect("(")
            scrut = self.term()
            self.expect(",")
            x = self.expect("ident").text
            self.expect(".")
            lbody = self.term()
            self.expect(",")
            y = self.expect("ident").text
            self.expect(".")
            rbody = self.term()
            close = self.expect(")")
            ctor = DOr if k == "dor" else DSup
            return ctor(scrut, x, lbody, y, rbody,
                        span=self._join(tok.span, None, close.span))
        self.fail(tuple(sorted(self._ATOM_START)))

    def _join(self, start: SourceSpan, t: Optional[Term],
              end: Optional[SourceSpan] = None) -> SourceSpan:
        last = end if end is not None else (t.span if t is not None and t.span else start)
        return SourceSpan(start.start, max(start.end, last.end), start.line, start.col)

    def _join_tt(self, a: Term, b: Term) -> Optional[SourceSpan]:
        if a.span is None or b.span is None:
            return None
        return SourceSpan(a.span.start, b.span.end, a.span.line, a.span.col)


def parse_term(text: str, allow_tensor: bool = False) -> Term:
    p = _Parser(text, allow_tensor)
    t = p.term()
    p.expect("eof")
    return t


def parse_prop(text: str) -> Proposition:
    p = _Parser(text, allow_tensor=True)
    prop = p.prop()
    p.expect("eof")
    return prop


# ---------------------------------------------------------------------------
# Pretty-printer (minimal parentheses; inverse of the grammar above)

_LAM, _SUM, _TENS, _SCAL, _APP, _ATOM = range(6)


def print_prop(p: Proposition, level: int = 0) -> str:
    if isinstance(p, Top):
        return "unit"
    if isinstance(p, Bot):
        return "void"
    if isinstance(p, Imp):
        s = f"{print_prop(p.dom, 1)} -> {print_prop(p.cod, 0)}"
        return f"({s})" if level > 0 else s
    op = {And: "&", Or: "|", Sup: "@"}[type(p)]
    s = f"{print_prop(p.left, 1)} {op} {print_prop(p.right, 2)}"
    return f"({s})" if level > 1 else s


def print_term(t: Term, level: int = _LAM) -> str:
    def wrap(s: str, mine: int) -> str:
        return f"({s})" if mine < level else s

    if isinstance(t, Var):
        return t.name
    if isinstance(t, Star):
        return "{" + print_scalar(t.coeff) + "}.*"
    if isinstance(t, Lam):
        return wrap(f"\\{t.var}:{print_prop(t.dom)}. {print_term(t.body, _LAM)}", _LAM)
    if isinstance(t, Sum):
        return wrap(f"{print_term(t.left, _SUM)} + {print_term(t.right, _TENS)}", _SUM)
    if isinstance(t, Tensor):
        return wrap(f"{print_term(t.left, _TENS)} >< {print_term(t.right, _SCAL)}", _TENS)
    if isinstance(t, Scal):
        return wrap("{" + print_scalar(t.coeff) + "}*" + print_term(t.body, _SCAL), _SCAL)
    if isinstance(t, App):
        return wrap(f"{print_term(t.fn, _APP)} {print_term(t.arg, _ATOM)}", _APP)
    if isinstance(t, Pair):
        return f"<{print_term(t.left)}, {print_term(t.right)}>"
    if isinstance(t, SupPair):
        return f"[{print_term(t.left)}, {print_term(t.right)}]"
    if isinstance(t, Inl):
        return f"inl[{print_prop(t.other)}]({print_term(t.body)})"
    if isinstance(t, Inr):
        return f"inr[{print_prop(t.other)}]({print_term(t.body)})"
    if isinstance(t, DTop):
        return f"dtop({print_term(t.scrut)}, {print_term(t.body)})"
    if isinstance(t, DBot):
        return f"dbot[{print_prop(t.result)}]({print_term(t.scrut)})"
    if isinstance(t, (DAnd1, DAnd2, DSup1, DSup2)):
        name = {DAnd1: "dand1", DAnd2: "dand2",
                DSup1: "dsup1", DSup2: "dsup2"}[type(t)]
        return f"{name}({print_term(t.scrut)}, {t.var}. {print_term(t.body)})"
    if isinstance(t, (DOr, DSup)):
        name = "dor" if isinstance(t, DOr) else "dsup"
        return (f"{name}({print_term(t.scrut)}, {t.lvar}. {print_term(t.lbody)}, "
                f"{t.rvar}. {print_term(t.rbody)})")
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Matrix and vector files: whitespace-separated scalars, one row per line

def parse_matrix_rows(text: str) -> list[list[Scalar]]:
    """Rows of scalar literals; rejects ragged rows and empty input."""
    rows: list[list[Scalar]] = []
    offset = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        cells = line.split()
        if cells:
            row = []
            for cell in cells:
                col = line.index(cell) + 1
                row.append(parse_scalar(
                    cell, SourceSpan(offset, offset + len(line), lineno, col)))
            rows.append(row)
        offset += len(line) + 1
    if not rows:
        raise ParseError("empty matrix", SourceSpan(0, len(text), 1, 1))
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ParseError(
                f"ragged rows: row {lineno} has {len(row)} entries, expected {width}",
                SourceSpan(0, len(text), lineno, 1))
    return rows


def parse_vector(text: str) -> list[Scalar]:
    """One scalar per line (blank lines ignored)."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        cell = line.strip()
        if cell:
            out.append(parse_scalar(cell, SourceSpan(0, len(line), lineno, 1)))
    if not out:
        raise ParseError("empty vector", SourceSpan(0, len(text), 1, 1))
    return out


def print_vector(values) -> str:
    return "\n".join(print_scalar(v) for v in values)
