"""Tiny recursive-descent parser for polynomial text like '2*m^2*z - m + 1'.

Supports +, -, *, ^ (nonnegative integer exponents), parentheses, integer and
'p/q' rational literals, and exactly the two variable names of the target
polynomial.  Used for golden values in tests and polynomial input on the CLI.
"""

from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(r"\s*(\d+/\d+|\d+|[A-Za-z_][A-Za-z_0-9]*|\*\*|[()+\-*^])")


class PolyParseError(ValueError):
    pass


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise PolyParseError(f"bad character at position {pos}: "
                                     f"{text[pos:]!r}")
            break
        tok = m.group(1)
        out.append("^" if tok == "**" else tok)
        pos = m.end()
    return out


def parse_poly(text, cls, u_label, v_label):
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take(expected=None):
        nonlocal i
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise PolyParseError(f"expected {expected or 'token'}, "
                                 f"got {tok!r}")
        i += 1
        return tok

    def atom():
        tok = peek()
        if tok == "(":
            take("(")
            e = expr()
            take(")")
            return e
        if tok == u_label:
            take()
            return cls.var_u(u_label, v_label)
        if tok == v_label:
            take()
            return cls.var_v(u_label, v_label)
        if tok is not None and (tok[0].isdigit()):
            take()
            return cls.constant(u_label, v_label, Fraction(tok))
        raise PolyParseError(f"unexpected token {tok!r}")

    def power():
        base = atom()
        if peek() == "^":
            take("^")
            exp = take()
            if not exp.isdigit():
                raise PolyParseError(f"exponent must be integer, got {exp!r}")
            return base ** int(exp)
        return base

    def product():
        acc = power()
        while True:
            tok = peek()
            if tok == "*":
                take("*")
                acc = acc * power()
            elif tok is not None and (tok == "(" or tok in (u_label, v_label)
                                      or tok[0].isdigit()):
                acc = acc * power()  # implicit multiplication: 2m, 3(z+1)
            else:
                return acc

    def expr():
        tok = peek()
        neg = False
        if tok in ("+", "-"):
            take()
            neg = tok == "-"
        acc = product()
        if neg:
            acc = -acc
        while peek() in ("+", "-"):
            op = take()
            term = product()
            acc = acc + (-term if op == "-" else term)
        return acc

    result = expr()
    if peek() is not None:
        raise PolyParseError(f"trailing input at token {peek()!r}")
    return result
