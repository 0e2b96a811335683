"""Expression language for building random matrix ensembles.

An expression names a limiting distribution by composing generators
(identity, atomic, wigner, wishart) with deterministic and stochastic
operations.  ``parse`` produces a small AST; ``to_distribution`` folds it
through the operational laws; the sampler walks the same tree to realize
finite matrices.  Infix '+' and '*' between two distribution expressions
mean free additive and multiplicative convolution.

Scalars are exact: "1/2" stays a Fraction and decimals convert via their
decimal digits, never through floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import oplaws
from .oplaws import AtomicSpec, MobiusParams


class DslError(Exception):
    """Parse or evaluation error with a character position."""

    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} (at column {pos + 1})"
        super().__init__(message)
        self.pos = pos


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Atomic:
    spec: AtomicSpec


@dataclass(frozen=True)
class Wigner:
    pass


@dataclass(frozen=True)
class Wishart:
    c: Fraction


@dataclass(frozen=True)
class Mobius:
    child: object
    p: Fraction
    q: Fraction
    r: Fraction
    s: Fraction


@dataclass(frozen=True)
class Inv:
    child: object


@dataclass(frozen=True)
class Scale:
    child: object
    alpha: Fraction


@dataclass(frozen=True)
class Shift:
    child: object
    alpha: Fraction


@dataclass(frozen=True)
class Square:
    child: object


@dataclass(frozen=True)
class BlockDiag:
    a: object
    b: object
    c: Fraction


@dataclass(frozen=True)
class Corner:
    child: object
    c: Fraction
    alpha: Fraction


@dataclass(frozen=True)
class AddAtomicWishart:
    child: object
    c: Fraction
    spec: AtomicSpec


@dataclass(frozen=True)
class MulWishart:
    child: object
    c: Fraction


@dataclass(frozen=True)
class InfoPlusNoise:
    child: object
    c: Fraction
    s: Fraction


@dataclass(frozen=True)
class FreeAdd:
    a: object
    b: object


@dataclass(frozen=True)
class FreeMul:
    a: object
    b: object


@dataclass(frozen=True)
class Compress:
    child: object
    c: Fraction


@dataclass(frozen=True)
class WishartCov:
    a: object
    b: object
    c: Fraction


@dataclass(frozen=True)
class TransposeSwap:
    child: object
    c: Fraction


# function name -> (node, argument shape); "e" expression, "n" scalar,
# "A" trailing atom list
_FUNCTIONS = {
    "identity": (Identity, ""),
    "wigner": (Wigner, ""),
    "wishart": (Wishart, "n"),
    "atomic": (Atomic, "A"),
    "mobius": (Mobius, "ennnn"),
    "inv": (Inv, "e"),
    "scale": (Scale, "en"),
    "shift": (Shift, "en"),
    "square": (Square, "e"),
    "blockdiag": (BlockDiag, "een"),
    "corner": (Corner, "enn"),
    "addatomicwishart": (AddAtomicWishart, "enA"),
    "mulwishart": (MulWishart, "en"),
    "infoplusnoise": (InfoPlusNoise, "enn"),
    "freeadd": (FreeAdd, "ee"),
    "freemul": (FreeMul, "ee"),
    "compress": (Compress, "en"),
    "wishartcov": (WishartCov, "een"),
    "transposeswap": (TransposeSwap, "en"),
}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch):
        if self._peek() != ch:
            raise DslError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def parse(self):
        node = self.expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise DslError("trailing input", self.pos)
        return node

    def expr(self):
        node = self.term()
        while self._peek() in ("+", "*"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            node = FreeAdd(node, rhs) if op == "+" else FreeMul(node, rhs)
        return node

    def term(self):
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self._expect(")")
            return node
        start = self.pos
        name = self._name()
        key = name.replace("_", "").lower()
        if key not in _FUNCTIONS:
            raise DslError(f"unknown function or generator {name!r}", start)
        ctor, shape = _FUNCTIONS[key]
        if not shape:
            # bare generator; permit optional empty parentheses
            if self._peek() == "(":
                self.pos += 1
                self._expect(")")
            return ctor()
        self._expect("(")
        args = []
        for i, kind in enumerate(shape):
            if i:
                self._expect(",")
            if kind == "e":
                args.append(self.expr())
            elif kind == "n":
                args.append(self._scalar())
            else:
                args.append(self._atom_list())
        self._expect(")")
        if shape and shape[-1] == "A" and ctor is Atomic:
            return ctor(args[-1])
        return ctor(*args)

    def _name(self):
        self._skip_ws()
        start = self.pos
        while (self.pos < len(self.text)
               and (self.text[self.pos].isalnum()
                    or self.text[self.pos] == "_")):
            self.pos += 1
        if start == self.pos:
            raise DslError("expected a name", start)
        return self.text[start:self.pos]

    def _scalar(self):
        self._skip_ws()
        start = self.pos
        if self._peek() == "-":
            self.pos += 1
        while (self.pos < len(self.text)
               and (self.text[self.pos].isdigit()
                    or self.text[self.pos] == ".")):
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise DslError("expected a number", start)
        num = Fraction(self.text[start:self.pos])
        if self._peek() == "/":
            self.pos += 1
            den_start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == den_start:
                raise DslError("expected a denominator", den_start)
            num /= int(self.text[den_start:self.pos])
        return num

    def _atom_list(self):
        atoms = [self._atom()]
        while self._peek() == ",":
            self.pos += 1
            atoms.append(self._atom())
        try:
            return AtomicSpec(tuple(atoms))
        except oplaws.OperationalLawError as exc:
            raise DslError(str(exc), self.pos) from exc

    def _atom(self):
        weight = self._scalar()
        self._expect("@")
        return (weight, self._scalar())


def parse(text):
    """Parse an ensemble expression into its AST."""
    return _Parser(text).parse()


def _fmt(x):
    return str(Fraction(x))


def to_text(node):
    """Canonical text form; parse(to_text(parse(s))) == parse(s)."""
    if isinstance(node, Identity):
        return "identity"
    if isinstance(node, Wigner):
        return "wigner"
    if isinstance(node, Wishart):
        return f"wishart({_fmt(node.c)})"
    if isinstance(node, Atomic):
        inner = ", ".join(f"{_fmt(w)}@{_fmt(x)}" for w, x in node.spec.atoms)
        return f"atomic({inner})"
    if isinstance(node, Mobius):
        return (f"mobius({to_text(node.child)}, {_fmt(node.p)}, "
                f"{_fmt(node.q)}, {_fmt(node.r)}, {_fmt(node.s)})")
    if isinstance(node, Inv):
        return f"inv({to_text(node.child)})"
    if isinstance(node, Scale):
        return f"scale({to_text(node.child)}, {_fmt(node.alpha)})"
    if isinstance(node, Shift):
        return f"shift({to_text(node.child)}, {_fmt(node.alpha)})"
    if isinstance(node, Square):
        return f"square({to_text(node.child)})"
    if isinstance(node, BlockDiag):
        return (f"blockdiag({to_text(node.a)}, {to_text(node.b)}, "
                f"{_fmt(node.c)})")
    if isinstance(node, Corner):
        return (f"corner({to_text(node.child)}, {_fmt(node.c)}, "
                f"{_fmt(node.alpha)})")
    if isinstance(node, AddAtomicWishart):
        inner = ", ".join(f"{_fmt(w)}@{_fmt(x)}" for w, x in node.spec.atoms)
        return (f"addatomicwishart({to_text(node.child)}, {_fmt(node.c)}, "
                f"{inner})")
    if isinstance(node, MulWishart):
        return f"mulwishart({to_text(node.child)}, {_fmt(node.c)})"
    if isinstance(node, InfoPlusNoise):
        return (f"infoplusnoise({to_text(node.child)}, {_fmt(node.c)}, "
                f"{_fmt(node.s)})")
    if isinstance(node, FreeAdd):
        return f"freeadd({to_text(node.a)}, {to_text(node.b)})"
    if isinstance(node, FreeMul):
        return f"freemul({to_text(node.a)}, {to_text(node.b)})"
    if isinstance(node, Compress):
        return f"compress({to_text(node.child)}, {_fmt(node.c)})"
    if isinstance(node, WishartCov):
        return (f"wishartcov({to_text(node.a)}, {to_text(node.b)}, "
                f"{_fmt(node.c)})")
    if isinstance(node, TransposeSwap):
        return f"transposeswap({to_text(node.child)}, {_fmt(node.c)})"
    raise DslError(f"unknown AST node {type(node).__name__}")


def to_distribution(node):
    """Fold the AST through the operational laws to an mz encoding."""
    if isinstance(node, Identity):
        return oplaws.identity_atom()
    if isinstance(node, Wigner):
        return oplaws.semicircle()
    if isinstance(node, Wishart):
        return oplaws.marchenko_pastur(node.c)
    if isinstance(node, Atomic):
        return oplaws.atomic(node.spec)
    if isinstance(node, Mobius):
        return oplaws.mobius(to_distribution(node.child),
                             MobiusParams(node.p, node.q, node.r, node.s))
    if isinstance(node, Inv):
        return oplaws.invert(to_distribution(node.child))
    if isinstance(node, Scale):
        return oplaws.scale(to_distribution(node.child), node.alpha)
    if isinstance(node, Shift):
        return oplaws.shift(to_distribution(node.child), node.alpha)
    if isinstance(node, Square):
        return oplaws.square(to_distribution(node.child))
    if isinstance(node, BlockDiag):
        return oplaws.block_diag(to_distribution(node.a),
                                 to_distribution(node.b), node.c)
    if isinstance(node, Corner):
        return oplaws.corner(to_distribution(node.child), node.c, node.alpha)
    if isinstance(node, AddAtomicWishart):
        return oplaws.add_atomic_wishart(to_distribution(node.child),
                                         node.c, node.spec)
    if isinstance(node, MulWishart):
        return oplaws.multiply_wishart(to_distribution(node.child), node.c)
    if isinstance(node, InfoPlusNoise):
        return oplaws.info_plus_noise(to_distribution(node.child),
                                      node.c, node.s)
    if isinstance(node, FreeAdd):
        return oplaws.free_add(to_distribution(node.a),
                               to_distribution(node.b))
    if isinstance(node, FreeMul):
        return oplaws.free_mul(to_distribution(node.a),
                               to_distribution(node.b))
    if isinstance(node, Compress):
        return oplaws.compress(to_distribution(node.child), node.c)
    if isinstance(node, WishartCov):
        return oplaws.wishart_covariance(to_distribution(node.a),
                                         to_distribution(node.b), node.c)
    if isinstance(node, TransposeSwap):
        return oplaws.transpose_swap(to_distribution(node.child), node.c)
    raise DslError(f"unknown AST node {type(node).__name__}")
