"""Recursive-descent parser for polynomial expressions.

Supports ``+ - * / ^ **`` and parentheses, exact rationals such as ``-2/3``
(division is only allowed by constants).  Parsing is generic over the target
algebra: callers supply ``atom(name)`` and ``const(q)`` constructors.
"""

from __future__ import annotations

import re
from typing import Callable

from gmpy2 import mpq


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str, line: int, col0: int):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", line, col0 + pos + stripped)
        col = col0 + m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("num", int(m.group(1)), col))
        elif m.group(2) is not None:
            out.append(("id", m.group(2), col))
        else:
            out.append(("op", m.group(3), col))
        pos = m.end()
    out.append(("end", None, col0 + len(text)))
    return out


class _Parser:
    def __init__(self, tokens, atom, const, line):
        self.toks = tokens
        self.i = 0
        self.atom = atom
        self.const = const
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expr(self):
        value = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op[1] == "*":
                value = value * rhs
            else:
                if not isinstance(rhs, type(mpq(0))):
                    self.fail("division is only allowed by a constant", op)
                if rhs == 0:
                    self.fail("division by zero", op)
                value = value * (1 / rhs)
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            v = self.unary()
            return -v if tok[1] == "-" else v
        return self.power()

    def power(self):
        base = self.atom_()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("^", "**"):
            self.take()
            e = self.take()
            if e[0] != "num":
                self.fail("exponent must be a non-negative integer", e)
            if isinstance(base, type(mpq(0))):
                return base ** e[1]
            result = base
            for _ in range(e[1] - 1):
                result = result * base
            if e[1] == 0:
                return self.const(mpq(1))
            return result
        return base

    def atom_(self):
        tok = self.take()
        if tok[0] == "num":
            return mpq(tok[1])
        if tok[0] == "id":
            try:
                return self.atom(tok[1])
            except ValueError as exc:
                raise ParseError(str(exc), self.line, tok[2]) from None
        if tok[0] == "op" and tok[1] == "(":
            v = self.expr()
            close = self.take()
            if close[0] != "op" or close[1] != ")":
                raise ParseError("expected ')'", self.line, close[2])
            return v
        raise ParseError("unexpected end of expression" if tok[0] == "end" else f"unexpected token {tok[1]!r}", self.line, tok[2])


def parse_expression(text: str, atom: Callable, const: Callable, line: int = 1, column: int = 1):
    """Parse ``text``; plain numbers stay mpq until combined with an atom."""
    tokens = _tokenize(text, line, column)
    p = _Parser(tokens, atom, const, line)
    value = p.expr()
    if p.peek()[0] != "end":
        p.fail(f"unexpected token {p.peek()[1]!r}")
    if isinstance(value, type(mpq(0))):
        value = const(value)
    return value


def parse_polynomial(text: str, ring, line: int = 1, column: int = 1):
    return parse_expression(text, ring.var, ring.const, line, column)
