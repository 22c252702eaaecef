"""Multivariate integer polynomials with exact arithmetic and a small parser.

Coefficients and evaluation use Python integers throughout, so results are
exact for any input size (no bit-width limit). Unknowns range over the
non-negative integers, matching their encoding as occupation numbers.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError

__all__ = ["Monomial", "Polynomial", "parse"]


@dataclass(frozen=True)
class Monomial:
    """One term: coefficient times a product of variable powers."""

    coefficient: int
    exponents: tuple[int, ...]

    @property
    def total_degree(self) -> int:
        return sum(self.exponents)


def _grlex_key(mono: Monomial):
    return (mono.total_degree, mono.exponents)


class Polynomial:
    """Canonical multivariate polynomial over the integers.

    Monomials are merged, zero terms dropped, and the remainder sorted by
    graded-lexicographic order (highest total degree first). Instances are
    immutable and safe to share between threads.
    """

    __slots__ = ("variables", "monomials")

    def __init__(self, variables: Sequence[str], terms: Iterable[tuple[int, Sequence[int]]]):
        variables = tuple(variables)
        merged: dict[tuple[int, ...], int] = {}
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError(
                    f"exponent vector of length {len(exps)} does not match "
                    f"{len(variables)} variables"
                )
            if any(e < 0 for e in exps):
                raise ValueError("exponents must be non-negative")
            merged[exps] = merged.get(exps, 0) + int(coeff)
        monomials = [Monomial(c, e) for e, c in merged.items() if c != 0]
        monomials.sort(key=_grlex_key, reverse=True)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "monomials", tuple(monomials))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def constant(cls, value: int, variables: Sequence[str] = ()) -> "Polynomial":
        k = len(variables)
        return cls(variables, [(value, (0,) * k)])

    @classmethod
    def variable(cls, name: str, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if sum(exps) != 1:
            raise ValueError(f"unknown variable {name!r}")
        return cls(variables, [(1, exps)])

    # -- core operations -----------------------------------------------------

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    def evaluate(self, point: Sequence[int]) -> int:
        """Exact value at a tuple of non-negative integers."""
        if len(point) != len(self.variables):
            raise ValueError(
                f"point of length {len(point)} does not match "
                f"{len(self.variables)} variables"
            )
        values = [operator.index(x) for x in point]
        if any(v < 0 for v in values):
            raise ValueError("evaluation points must be non-negative")
        total = 0
        for mono in self.monomials:
            term = mono.coefficient
            for value, exp in zip(values, mono.exponents):
                if exp:
                    term *= value**exp
            total += term
        return total

    def degree_bounds(self) -> tuple[int, ...]:
        """Componentwise maximum exponent over all monomials."""
        bounds = [0] * len(self.variables)
        for mono in self.monomials:
            for i, e in enumerate(mono.exponents):
                if e > bounds[i]:
                    bounds[i] = e
        return tuple(bounds)

    # -- ring arithmetic -----------------------------------------------------

    def _aligned(self, other: "Polynomial") -> tuple[tuple[str, ...], "Polynomial", "Polynomial"]:
        if self.variables == other.variables:
            return self.variables, self, other
        variables = list(self.variables)
        for v in other.variables:
            if v not in variables:
                variables.append(v)
        variables = tuple(variables)
        return variables, self._remap(variables), other._remap(variables)

    def _remap(self, variables: tuple[str, ...]) -> "Polynomial":
        if variables == self.variables:
            return self
        position = {v: i for i, v in enumerate(variables)}
        terms = []
        for mono in self.monomials:
            exps = [0] * len(variables)
            for v, e in zip(self.variables, mono.exponents):
                exps[position[v]] = e
            terms.append((mono.coefficient, tuple(exps)))
        return Polynomial(variables, terms)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return Polynomial.constant(other, self.variables)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        variables, a, b = self._aligned(other)
        terms = [(m.coefficient, m.exponents) for m in a.monomials]
        terms += [(m.coefficient, m.exponents) for m in b.monomials]
        return Polynomial(variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, [(-m.coefficient, m.exponents) for m in self.monomials])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        variables, a, b = self._aligned(other)
        terms = []
        for ma in a.monomials:
            for mb in b.monomials:
                exps = tuple(x + y for x, y in zip(ma.exponents, mb.exponents))
                terms.append((ma.coefficient * mb.coefficient, exps))
        return Polynomial(variables, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(1, self.variables)
        for _ in range(exponent):
            result = result * self
        return result

    # -- equality, rendering, serialization -----------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.monomials == other.monomials

    def __hash__(self):
        return hash((self.variables, self.monomials))

    def render(self) -> str:
        """Canonical text form; ``parse(render(p)) == p``."""
        if not self.monomials:
            return "0"
        pieces = []
        for i, mono in enumerate(self.monomials):
            coeff = mono.coefficient
            sign = "-" if coeff < 0 else "+"
            factors = []
            for v, e in zip(self.variables, mono.exponents):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            magnitude = abs(coeff)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)
            if i == 0:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Polynomial({self.render()!r})"

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "monomials": [[m.coefficient, list(m.exponents)] for m in self.monomials],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Polynomial":
        return cls(data["variables"], [(c, tuple(e)) for c, e in data["monomials"]])


# -- parsing ------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_pos = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad_pos]!r}", bad_pos)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    return tokens


class _Parser:
    """Recursive-descent parser producing a Polynomial directly.

    expression = ["+"|"-"] term { ("+"|"-") term }
    term       = factor { "*" factor }
    factor     = base [ "^" integer ]
    base       = integer | identifier | "(" expression ")"

    Implicit multiplication is rejected: "2y" must be written "2*y".
    """

    def __init__(self, tokens, variables, text_length):
        self.tokens = tokens
        self.variables = variables
        self.i = 0
        self.end = text_length

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def expect_op(self, symbol):
        tok = self.take()
        if tok is None:
            raise ParseError(f"expected {symbol!r} but input ended", self.end)
        if tok[0] != "op" or tok[1] != symbol:
            raise ParseError(f"expected {symbol!r}, found {tok[1]!r}", tok[2])
        return tok

    def expression(self):
        sign = 1
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        result = self.term() * sign
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] not in "+-":
                return result
            self.take()
            rhs = self.term()
            result = result + rhs if tok[1] == "+" else result - rhs

    def term(self):
        result = self.factor()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] != "*":
                return result
            self.take()
            result = result * self.factor()

    def factor(self):
        base = self.base()
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.take()
            exp_tok = self.take()
            if exp_tok is None:
                raise ParseError("exponent must be an integer literal but input ended", self.end)
            if exp_tok[0] != "int":
                raise ParseError(
                    f"exponent must be a non-negative integer literal, found {exp_tok[1]!r}",
                    exp_tok[2],
                )
            return base ** int(exp_tok[1])
        return base

    def base(self):
        tok = self.take()
        if tok is None:
            raise ParseError("expected a value but input ended", self.end)
        kind, value, pos = tok
        if kind == "int":
            return Polynomial.constant(int(value), self.variables)
        if kind == "ident":
            return Polynomial.variable(value, self.variables)
        if kind == "op" and value == "(":
            inner = self.expression()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str) -> Polynomial:
    """Parse an expression such as ``"x^2 - 2*y^2"`` into canonical form.

    An optional ``= 0`` suffix is accepted and stripped. Variable order is
    first appearance in the text. Raises :class:`ParseError` with the
    offending position on malformed input.
    """
    body = text
    if "=" in text:
        lhs, _, rhs = text.partition("=")
        if "=" in rhs:
            raise ParseError("multiple '=' signs", text.index("=", text.index("=") + 1))
        if rhs.strip() != "0":
            raise ParseError("only an '= 0' suffix is supported", text.index("=") + 1)
        body = lhs
    tokens = _tokenize(body)
    if not tokens:
        raise ParseError("empty expression", 0)
    variables = []
    for kind, value, _ in tokens:
        if kind == "ident" and value not in variables:
            variables.append(value)
    parser = _Parser(tokens, tuple(variables), len(body))
    result = parser.expression()
    trailing = parser.peek()
    if trailing is not None:
        raise ParseError(f"unexpected token {trailing[1]!r}", trailing[2])
    return result._remap(tuple(variables))
