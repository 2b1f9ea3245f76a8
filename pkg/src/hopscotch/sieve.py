"""Xenakis-style sieve algebra: residue classes under union, intersection
and complement, with a small text grammar and a scale/pitch mapping.

Grammar::

    expr   := term ('|' term)*
    term   := factor ('&' factor)*
    factor := '!' factor | '(' expr ')' | INT '@' INT

'&' binds tighter than '|'; whitespace is insignificant.  A residue
``m@r`` is the set of integers congruent to r modulo m; the shift is
normalized to 0 <= r < m at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_SIEVE = "3@0|4@1"


class SieveError(Exception):
    pass


class SieveSyntaxError(SieveError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SieveDomainError(SieveError):
    pass


class EmptyScaleError(SieveError):
    pass


@dataclass(frozen=True)
class Residue:
    modulus: int
    shift: int

    def __post_init__(self):
        if self.modulus < 1:
            raise SieveDomainError("modulus must be >= 1")
        object.__setattr__(self, "shift", self.shift % self.modulus)

    def contains(self, n: int) -> bool:
        return n % self.modulus == self.shift

    def moduli(self):
        yield self.modulus

    def __str__(self):
        return f"{self.modulus}@{self.shift}"


@dataclass(frozen=True)
class Union:
    left: object
    right: object

    def contains(self, n: int) -> bool:
        return self.left.contains(n) or self.right.contains(n)

    def moduli(self):
        yield from self.left.moduli()
        yield from self.right.moduli()

    def __str__(self):
        # Parenthesize a right-nested union so printing round-trips
        # through the left-associative parser.
        right = f"({self.right})" if isinstance(self.right, Union) else str(self.right)
        return f"{self.left}|{right}"


@dataclass(frozen=True)
class Intersection:
    left: object
    right: object

    def contains(self, n: int) -> bool:
        return self.left.contains(n) and self.right.contains(n)

    def moduli(self):
        yield from self.left.moduli()
        yield from self.right.moduli()

    def __str__(self):
        right = self.right
        if isinstance(right, (Union, Intersection)):
            right_s = f"({right})"
        else:
            right_s = str(right)
        return f"{_wrap(self.left)}&{right_s}"


@dataclass(frozen=True)
class Complement:
    child: object

    def contains(self, n: int) -> bool:
        return not self.child.contains(n)

    def moduli(self):
        yield from self.child.moduli()

    def __str__(self):
        if isinstance(self.child, Residue):
            return f"!{self.child}"
        return f"!({self.child})"


def _wrap(node) -> str:
    # Union inside an intersection needs parentheses.
    if isinstance(node, Union):
        return f"({node})"
    return str(node)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise SieveSyntaxError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected integer")
        return int(self.text[start : self.pos])

    def expr(self):
        node = self.term()
        while self.peek() == "|":
            self.pos += 1
            node = Union(node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() == "&":
            self.pos += 1
            node = Intersection(node, self.factor())
        return node

    def factor(self):
        ch = self.peek()
        if ch == "!":
            self.pos += 1
            return Complement(self.factor())
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch is None:
            self.error("unexpected end of input")
        if not ch.isdigit():
            self.error(f"unexpected character {ch!r}")
        modulus = self.integer()
        self.expect("@")
        shift = self.integer()
        return Residue(modulus, shift)


def parse_sieve(text: str):
    """Parse a sieve expression; raises SieveSyntaxError with position."""
    p = _Parser(text)
    node = p.expr()
    if p.peek() is not None:
        p.error(f"trailing input {p.text[p.pos]!r}")
    return node


def contains(expr, n: int) -> bool:
    return expr.contains(n)


def period(expr) -> int:
    """The lcm of all leaf moduli: always a period, not necessarily minimal."""
    return math.lcm(*expr.moduli())


def generate(expr, lo: int, hi: int) -> list[int]:
    """All members of the sieve in [lo, hi], ascending."""
    if lo > hi:
        raise SieveDomainError(f"empty range {lo}..{hi}")
    return [n for n in range(lo, hi + 1) if expr.contains(n)]


def intervals(points: list[int]) -> list[int]:
    """Successive differences of an ascending point set."""
    if len(points) < 2:
        raise SieveError("need at least two points")
    return [b - a for a, b in zip(points, points[1:])]


def scale(expr) -> tuple[list[int], int]:
    """One period of the sieve starting at 0, with the period length."""
    p = period(expr)
    return generate(expr, 0, p - 1), p


def to_pitch(expr, degree: int, base_midi: int = 48) -> int:
    """Map a scale degree to a MIDI note, wrapping by whole periods.

    Degree n of a k-note scale plays scale step n mod k, transposed up
    one period per completed wrap; the result is clamped to 0..127.
    """
    if degree < 0:
        raise SieveDomainError("degree must be >= 0")
    if not 0 <= base_midi <= 127:
        raise SieveDomainError("base_midi must be in 0..127")
    steps, p = scale(expr)
    if not steps:
        raise EmptyScaleError("sieve generates no pitches")
    n = len(steps)
    pitch = base_midi + steps[degree % n] + p * (degree // n)
    return max(0, min(127, pitch))
