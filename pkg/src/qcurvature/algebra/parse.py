"""Recursive-descent parser for rational expressions in q and x.

Grammar (``^`` binds tightest, unary minus allowed)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INTEGER)?
    atom   := INTEGER | 'q' | 'x' | '(' expr ')'
"""

import re

from ..errors import DivisionByZero, ParseError
from .ratfun import RatFun

_TOKEN = re.compile(r"\s*(?:(\d+)|([qx])|([-+*/^()])|(\S))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        if m.group(4) is not None:
            raise ParseError(f"unexpected character {m.group(4)!r}", text, start)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("var", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op_tok = self.take()
            rhs = self.unary()
            if op_tok[1] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise DivisionByZero(
                        f"division by an expression that is identically zero at position {op_tok[2]}"
                    )
                value = value / rhs
        return value

    def unary(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if tok[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise self.error("exponent must be a nonnegative integer literal")
            self.take()
            if self.peek()[:2] == ("op", "^"):
                raise self.error("chained exponents need parentheses")
            return base ** tok[1]
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "int":
            return RatFun(val)
        if kind == "var":
            return RatFun.x() if val == "x" else RatFun.q()
        if tok[:2] == ("op", "("):
            value = self.expr()
            if self.peek()[:2] != ("op", ")"):
                raise self.error("expected ')'")
            self.take()
            return value
        if kind == "end":
            raise self.error("unexpected end of expression", tok)
        raise self.error(f"unexpected token {val!r}", tok)


def parse_ratfun(text: str) -> RatFun:
    """Parse an expression in q and x into a normalized RatFun."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    return _Parser(text).parse()


def format_ratfun(f) -> str:
    return str(f)
