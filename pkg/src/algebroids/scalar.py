"""Exact rational functions over a coordinate chart.

The coefficient field for everything else in this package: fractions of
multivariate polynomials in the chart coordinates, with rational-number
coefficients and a canonical representation, so equality is literal
comparison and printing is deterministic.

Canonical form: numerator and denominator coprime (primitive-PRS gcd),
denominator monic under graded-lexicographic order (total degree first,
ties broken lexicographically with the first coordinate biggest).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

# A polynomial is a dict mapping exponent tuples to nonzero Fractions.
# All tuples in one dict have the chart's length. {} is the zero polynomial.

_F0 = Fraction(0)
_F1 = Fraction(1)


class ParseError(ValueError):
    """Syntax or name error in the expression language, with position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class BaseChart:
    """Ordered tuple of base coordinate names."""

    names: tuple[str, ...]

    def __post_init__(self):
        if isinstance(self.names, list):
            object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise ValueError("chart needs at least one coordinate")
        seen = set()
        for name in self.names:
            if not _IDENT.match(name):
                raise ValueError(f"bad coordinate name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate coordinate name {name!r}")
            seen.add(name)

    @property
    def m(self) -> int:
        return len(self.names)

    def axis(self, name: str) -> int:
        """0-based position of a coordinate name."""
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a chart coordinate") from None


def _grlex(mono: tuple) -> tuple:
    return (sum(mono), mono)


def _plead(p: dict) -> tuple:
    return max(p, key=_grlex)


def _padd(a: dict, b: dict) -> dict:
    r = dict(a)
    for m, c in b.items():
        s = r.get(m, _F0) + c
        if s:
            r[m] = s
        else:
            r.pop(m, None)
    return r


def _pneg(a: dict) -> dict:
    return {m: -c for m, c in a.items()}


def _psub(a: dict, b: dict) -> dict:
    return _padd(a, _pneg(b))


def _pmul(a: dict, b: dict) -> dict:
    r: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            s = r.get(m, _F0) + ca * cb
            if s:
                r[m] = s
            else:
                r.pop(m, None)
    return r


def _pscale(a: dict, c: Fraction) -> dict:
    if not c:
        return {}
    return {m: q * c for m, q in a.items()}


def _pmonic(p: dict) -> dict:
    if not p:
        return p
    lc = p[_plead(p)]
    if lc == 1:
        return dict(p)
    return {m: c / lc for m, c in p.items()}


def _pvars(p: dict) -> set:
    return {i for m in p for i, e in enumerate(m) if e}


def _pdeg_in(p: dict, v: int) -> int:
    return max((m[v] for m in p), default=0)


def _pdiv_exact(a: dict, b: dict) -> dict:
    """Exact quotient a/b. Internal: callers guarantee divisibility."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q: dict = {}
    r = dict(a)
    lb = _plead(b)
    cb = b[lb]
    while r:
        lr = _plead(r)
        m = tuple(x - y for x, y in zip(lr, lb))
        if any(e < 0 for e in m):
            raise ArithmeticError("inexact polynomial division")
        cq = r[lr] / cb
        q[m] = cq
        for mb, c in b.items():
            mm = tuple(x + y for x, y in zip(m, mb))
            s = r.get(mm, _F0) - cq * c
            if s:
                r[mm] = s
            else:
                r.pop(mm, None)
    return q


def _split_var(p: dict, v: int) -> dict:
    """View p as a univariate polynomial in coordinate v: exponent -> poly."""
    out: dict = {}
    for m, c in p.items():
        mm = m[:v] + (0,) + m[v + 1 :]
        out.setdefault(m[v], {})[mm] = c
    return out


def _content(p: dict, v: int) -> dict:
    cont: dict = {}
    for q in _split_var(p, v).values():
        cont = _pgcd(cont, q)
        if len(cont) == 1 and not any(_plead(cont)) and cont[_plead(cont)] == 1:
            break
    return cont


def _prem(a: dict, b: dict, v: int) -> dict:
    """Pseudo-remainder of a by b in the variable v (content noise allowed)."""
    db = _pdeg_in(b, v)
    sb = _split_var(b, v)
    lb = sb[db]
    r = dict(a)
    while r and _pdeg_in(r, v) >= db:
        dr = _pdeg_in(r, v)
        lr = _split_var(r, v)[dr]
        # r <- lb*r - lr * x_v^(dr-db) * b ; kills the degree-dr head.
        shift = {m[:v] + (m[v] + dr - db,) + m[v + 1 :]: c for m, c in b.items()}
        r = _psub(_pmul(lb, r), _pmul(lr, shift))
    return r


def _pgcd(a: dict, b: dict) -> dict:
    """Monic gcd of two polynomials (primitive PRS)."""
    if not a:
        return _pmonic(b)
    if not b:
        return _pmonic(a)
    present = _pvars(a) | _pvars(b)
    if not present:
        return {next(iter(a)): _F1}
    v = max(present)
    da, db = _pdeg_in(a, v), _pdeg_in(b, v)
    if da == 0 or db == 0:
        ca = a if da == 0 else _content(a, v)
        cb = b if db == 0 else _content(b, v)
        return _pgcd(ca, cb)
    ca, cb = _content(a, v), _content(b, v)
    c = _pgcd(ca, cb)
    big = _pdiv_exact(a, ca)
    small = _pdiv_exact(b, cb)
    if _pdeg_in(big, v) < _pdeg_in(small, v):
        big, small = small, big
    while True:
        r = _prem(big, small, v)
        if not r:
            g = small
            break
        if _pdeg_in(r, v) == 0:
            return _pmonic(c)
        big, small = small, _pdiv_exact(r, _content(r, v))
    return _pmonic(_pmul(c, g))


class ScalarField:
    """One exact rational function; immutable, canonical on construction."""

    __slots__ = ("chart", "num", "den")

    def __init__(self, chart: BaseChart, num: dict, den: dict | None = None):
        if den is None:
            den = {(0,) * chart.m: _F1}
        if not den:
            raise ZeroDivisionError("scalar division by zero")
        if not num:
            den = {(0,) * chart.m: _F1}
        else:
            g = _pgcd(num, den)
            if not (len(g) == 1 and not any(_plead(g))):
                num = _pdiv_exact(num, g)
                den = _pdiv_exact(den, g)
            lc = den[_plead(den)]
            if lc != 1:
                num = _pscale(num, 1 / lc)
                den = _pscale(den, 1 / lc)
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("ScalarField is immutable")

    # construction helpers

    @staticmethod
    def const(chart: BaseChart, value) -> "ScalarField":
        q = Fraction(value)
        return ScalarField(chart, {(0,) * chart.m: q} if q else {})

    @staticmethod
    def coord(chart: BaseChart, name: str) -> "ScalarField":
        i = chart.axis(name)
        mono = tuple(1 if j == i else 0 for j in range(chart.m))
        return ScalarField(chart, {mono: _F1})

    @staticmethod
    def zero(chart: BaseChart) -> "ScalarField":
        return ScalarField(chart, {})

    @staticmethod
    def one(chart: BaseChart) -> "ScalarField":
        return ScalarField.const(chart, 1)

    # predicates and views

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and not any(_plead(self.den))

    def constant_value(self) -> Fraction:
        """The value of a constant; raises if not constant."""
        if self.is_zero:
            return _F0
        if self.is_polynomial and len(self.num) == 1 and not any(_plead(self.num)):
            return self.num[_plead(self.num)]
        raise ValueError(f"not a constant: {self}")

    def total_degree(self) -> int:
        """Total degree of a polynomial value; -1 for zero."""
        if not self.is_polynomial:
            raise ValueError(f"not a polynomial: {self}")
        if self.is_zero:
            return -1
        return max(sum(m) for m in self.num)

    def monomials(self) -> Iterator[tuple[tuple, Fraction]]:
        """Numerator terms of a polynomial value, descending grlex."""
        if not self.is_polynomial:
            raise ValueError(f"not a polynomial: {self}")
        for m in sorted(self.num, key=_grlex, reverse=True):
            yield m, self.num[m]

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, ScalarField):
            if other.chart != self.chart:
                raise ValueError("chart mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return ScalarField.const(self.chart, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        num = _padd(_pmul(self.num, o.den), _pmul(o.num, self.den))
        return ScalarField(self.chart, num, _pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        f = ScalarField.__new__(ScalarField)
        object.__setattr__(f, "chart", self.chart)
        object.__setattr__(f, "num", _pneg(self.num))
        object.__setattr__(f, "den", self.den)
        return f

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ScalarField(self.chart, _pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("scalar division by zero")
        return ScalarField(self.chart, _pmul(self.num, o.den), _pmul(self.den, o.num))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ScalarField.one(self.chart) / self ** (-k)
        out = ScalarField.one(self.chart)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarField.const(self.chart, other)
        if not isinstance(other, ScalarField):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash(
            (
                self.chart,
                frozenset(self.num.items()),
                frozenset(self.den.items()),
            )
        )

    def __bool__(self):
        return not self.is_zero

    def partial(self, a) -> "ScalarField":
        """Exact partial derivative; a is a 1-based index or coordinate name."""
        if isinstance(a, str):
            v = self.chart.axis(a)
        else:
            if not 1 <= a <= self.chart.m:
                raise IndexError(f"coordinate index {a} out of range")
            v = a - 1

        def d(p: dict) -> dict:
            r: dict = {}
            for m, c in p.items():
                if m[v]:
                    mm = m[:v] + (m[v] - 1,) + m[v + 1 :]
                    s = r.get(mm, _F0) + c * m[v]
                    if s:
                        r[mm] = s
                    else:
                        r.pop(mm, None)
            return r

        num = _psub(_pmul(d(self.num), self.den), _pmul(self.num, d(self.den)))
        return ScalarField(self.chart, num, _pmul(self.den, self.den))

    # printing

    def _poly_str(self, p: dict) -> str:
        if not p:
            return "0"
        pieces = []
        for m in sorted(p, key=_grlex, reverse=True):
            c = p[m]
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(self.chart.names[i])
                elif e > 1:
                    factors.append(f"{self.chart.names[i]}^{e}")
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            if not pieces:
                pieces.append(body if c > 0 else "-" + body)
            else:
                pieces.append(("+ " if c > 0 else "- ") + body)
        return " ".join(pieces)

    def __str__(self):
        if self.is_polynomial:
            return self._poly_str(self.num)
        return f"({self._poly_str(self.num)})/({self._poly_str(self.den)})"

    def __repr__(self):
        return f"<ScalarField {self}>"


# expression parser, shared by the scalar and super layers

_TOKEN = re.compile(r"[A-Za-z][A-Za-z0-9_]*|\d+|[-+*^()/]|\S")


def _tokenize(text: str):
    toks = []
    line = 1
    start = 0
    for match in re.finditer(r"\S+|\n", text):
        if match.group() == "\n":
            line += 1
            start = match.end()
            continue
        for t in _TOKEN.finditer(match.group()):
            toks.append((t.group(), line, match.start() + t.start() - start + 1))
    return toks


class _Parser:
    """Recursive descent over the shared grammar.

    expr   := ('-')? term (('+'|'-') ('-')? term)*
    term   := factor ('*' factor)*
    factor := atom ('^' nonneg-int)?
    atom   := IDENT | INT | INT '/' POSINT | '(' expr ')'

    '/' only builds rational literals; quotients of polynomials are not
    part of the input language.
    """

    def __init__(self, text: str, resolve: Callable, const: Callable):
        self.toks = _tokenize(text)
        self.pos = 0
        self.resolve = resolve
        self.const = const
        if not self.toks:
            raise ParseError("empty expression", 1, 1)

    def peek(self):
        if self.pos < len(self.toks):
            return self.toks[self.pos][0]
        return None

    def loc(self):
        if self.pos < len(self.toks):
            _, line, col = self.toks[self.pos]
        else:
            _, line, col = self.toks[-1]
        return line, col

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str):
        raise ParseError(message, *self.loc())

    def parse(self):
        value = self.expr()
        if self.peek() is not None:
            if self.peek() == "/":
                self.fail("'/' is only allowed in rational literals")
            self.fail(f"unexpected {self.peek()!r}")
        return value

    def expr(self):
        negate = False
        if self.peek() == "-":
            self.take()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            negate = False
            if self.peek() == "-":
                self.take()
                negate = True
            rhs = self.term()
            if negate:
                rhs = -rhs
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek() == "*":
            self.take()
            value = value * self.factor()
        return value

    def factor(self):
        value = self.atom()
        if self.peek() == "^":
            self.take()
            if self.peek() is None or not self.peek().isdigit():
                self.fail("expected a nonnegative integer exponent after '^'")
            value = value ** int(self.take()[0])
        return value

    def atom(self):
        if self.peek() is None:
            self.fail("unexpected end of expression")
        tok, line, col = self.take()
        if tok == "(":
            value = self.expr()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return value
        if tok.isdigit():
            numerator = int(tok)
            if self.peek() == "/":
                self.take()
                if self.peek() is None or not self.peek().isdigit():
                    self.fail("expected a positive integer after '/'")
                dtok, dline, dcol = self.take()
                if int(dtok) == 0:
                    raise ParseError("zero denominator", dline, dcol)
                return self.const(Fraction(numerator, int(dtok)))
            return self.const(Fraction(numerator))
        if _IDENT.match(tok):
            return self.resolve(tok, line, col)
        raise ParseError(f"unexpected {tok!r}", line, col)


def parse_expression(text: str, resolve: Callable, const: Callable):
    """Parse under the shared grammar with caller-supplied atom semantics."""
    return _Parser(text, resolve, const).parse()


def parse_scalar(text: str, chart: BaseChart) -> ScalarField:
    """Parse an expression in the chart coordinates to canonical form."""

    def resolve(name: str, line: int, col: int) -> ScalarField:
        if name not in chart.names:
            raise ParseError(f"unknown identifier {name!r}", line, col)
        return ScalarField.coord(chart, name)

    return parse_expression(text, resolve, lambda q: ScalarField.const(chart, q))


def scalar_arith(a: ScalarField, b: ScalarField, op: str) -> ScalarField:
    """Dispatch helper mirroring the library's operator surface."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def scalar_partial(f: ScalarField, a) -> ScalarField:
    return f.partial(a)
