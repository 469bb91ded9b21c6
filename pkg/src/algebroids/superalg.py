"""Supercommutative polynomial kernel over the scalar field.

Generators live in a table: odd names of degree 1 and even names of
degree 2, on top of a base chart whose coordinates have degree 0. Odd
monomials are stored with strictly increasing generator indices; any
reordering sign (the Koszul rule) is absorbed into the coefficient, so
equality is literal comparison of term dictionaries.

Odd derivatives are left derivatives throughout: d/dtheta kills terms
without theta and otherwise removes theta with the sign (-1)^(number of
odd factors standing before it).

The divergence of a vector field X with parity |X| is

    div(X) = sum_a d(X^{x_a})/dx_a + sum_q d(X^q)/dq
             - (-1)^{|X|} sum_theta d(X^theta)/dtheta

where q runs over the even degree-2 generators and theta over the odd
ones. The sign block is forced: degree-2 even generators must take the
same sign as the base coordinates or the commutator rule
div([X,Y]) = X(div Y) - (-1)^{|X||Y|} Y(div X) fails on mixed fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalar import _IDENT, BaseChart, ParseError, ScalarField, parse_expression


@dataclass(frozen=True)
class GeneratorTable:
    """Base chart plus the graded generators living over it."""

    chart: BaseChart
    odd: tuple[str, ...]
    even2: tuple[str, ...] = ()

    def __post_init__(self):
        if isinstance(self.odd, list):
            object.__setattr__(self, "odd", tuple(self.odd))
        if isinstance(self.even2, list):
            object.__setattr__(self, "even2", tuple(self.even2))
        seen = set(self.chart.names)
        for name in self.odd + self.even2:
            if not _IDENT.match(name):
                raise ValueError(f"bad generator name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate generator name {name!r}")
            seen.add(name)

    def role(self, name: str) -> tuple[str, int]:
        """("coord"|"odd"|"even2", position) for a known name."""
        if name in self.odd:
            return "odd", self.odd.index(name)
        if name in self.even2:
            return "even2", self.even2.index(name)
        if name in self.chart.names:
            return "coord", self.chart.axis(name)
        raise KeyError(f"unknown generator {name!r}")

    def degree_of(self, name: str) -> int:
        kind = self.role(name)[0]
        return {"coord": 0, "odd": 1, "even2": 2}[kind]


def _merge_odd(a: tuple, b: tuple):
    """Koszul sign and merged index tuple; sign 0 when an index repeats."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    inversions = 0
    for i in a:
        for j in b:
            if i == j:
                return 0, ()
            if i > j:
                inversions += 1
    sign = -1 if inversions & 1 else 1
    return sign, tuple(sorted(a + b))


def _term_key(key: tuple) -> tuple:
    odd, even = key
    return (len(odd), odd, even)


class SuperPoly:
    """Element of the graded algebra; immutable, canonical term dict."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: dict):
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "terms", {k: c for k, c in terms.items() if not c.is_zero})

    def __setattr__(self, name, value):
        raise AttributeError("SuperPoly is immutable")

    @staticmethod
    def zero(table: GeneratorTable) -> "SuperPoly":
        return SuperPoly(table, {})

    @staticmethod
    def from_scalar(table: GeneratorTable, f) -> "SuperPoly":
        if not isinstance(f, ScalarField):
            f = ScalarField.const(table.chart, f)
        key = ((), (0,) * len(table.even2))
        return SuperPoly(table, {key: f})

    @staticmethod
    def coordinate(table: GeneratorTable, name: str) -> "SuperPoly":
        return SuperPoly.from_scalar(table, ScalarField.coord(table.chart, name))

    @staticmethod
    def generator(table: GeneratorTable, name: str) -> "SuperPoly":
        kind, i = table.role(name)
        one = ScalarField.one(table.chart)
        zeros = (0,) * len(table.even2)
        if kind == "odd":
            return SuperPoly(table, {((i,), zeros): one})
        if kind == "even2":
            even = tuple(1 if j == i else 0 for j in range(len(table.even2)))
            return SuperPoly(table, {((), even): one})
        return SuperPoly.coordinate(table, name)

    # structure

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def parity(self) -> int:
        """0 or 1; raises on parity-mixed values. Zero counts as even."""
        parities = {len(odd) & 1 for odd, _ in self.terms}
        if len(parities) > 1:
            raise ValueError("mixed parity")
        return parities.pop() if parities else 0

    def degree(self) -> int:
        """Total degree of a homogeneous value; -1 for zero."""
        degrees = {len(odd) + 2 * sum(even) for odd, even in self.terms}
        if not degrees:
            return -1
        if len(degrees) > 1:
            raise ValueError("inhomogeneous degree")
        return degrees.pop()

    def parity_split(self) -> tuple["SuperPoly", "SuperPoly"]:
        even = {k: c for k, c in self.terms.items() if not len(k[0]) & 1}
        odd = {k: c for k, c in self.terms.items() if len(k[0]) & 1}
        return SuperPoly(self.table, even), SuperPoly(self.table, odd)

    def degree_part(self, d: int) -> "SuperPoly":
        terms = {
            (odd, even): c
            for (odd, even), c in self.terms.items()
            if len(odd) + 2 * sum(even) == d
        }
        return SuperPoly(self.table, terms)

    def generator_names(self) -> set:
        out = set()
        for odd, even in self.terms:
            out.update(self.table.odd[i] for i in odd)
            out.update(n for n, e in zip(self.table.even2, even) if e)
        return out

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, SuperPoly):
            if other.table != self.table:
                raise ValueError("generator table mismatch")
            return other
        if isinstance(other, (int, Fraction, ScalarField)):
            return SuperPoly.from_scalar(self.table, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for k, c in o.terms.items():
            s = terms.get(k)
            s = c if s is None else s + c
            if s.is_zero:
                terms.pop(k, None)
            else:
                terms[k] = s
        return SuperPoly(self.table, terms)

    __radd__ = __add__

    def __neg__(self):
        return SuperPoly(self.table, {k: -c for k, c in self.terms.items()})

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
        terms: dict = {}
        for (oa, ea), ca in self.terms.items():
            for (ob, eb), cb in o.terms.items():
                sign, odd = _merge_odd(oa, ob)
                if sign == 0:
                    continue
                key = (odd, tuple(x + y for x, y in zip(ea, eb)))
                c = ca * cb
                if sign < 0:
                    c = -c
                s = terms.get(key)
                s = c if s is None else s + c
                if s.is_zero:
                    terms.pop(key, None)
                else:
                    terms[key] = s
        return SuperPoly(self.table, terms)

    def __rmul__(self, other):
        # scalars are central, so left and right coercion agree
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarField.const(self.table.chart, other)
        if not isinstance(other, ScalarField):
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by the zero scalar")
        inv = 1 / other
        return SuperPoly(self.table, {k: c * inv for k, c in self.terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = SuperPoly.from_scalar(self.table, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, SuperPoly) else other
        if o is None or not isinstance(o, SuperPoly):
            return NotImplemented
        return self.table == o.table and self.terms == o.terms

    def __bool__(self):
        return not self.is_zero

    # calculus

    def left_partial(self, name: str) -> "SuperPoly":
        """Left derivative by any generator or chart coordinate name."""
        kind, i = self.table.role(name)
        terms: dict = {}
        if kind == "coord":
            for k, c in self.terms.items():
                d = c.partial(name)
                if not d.is_zero:
                    terms[k] = d
        elif kind == "odd":
            for (odd, even), c in self.terms.items():
                if i not in odd:
                    continue
                pos = odd.index(i)
                key = (odd[:pos] + odd[pos + 1 :], even)
                dc = -c if pos & 1 else c
                s = terms.get(key)
                s = dc if s is None else s + dc
                if s.is_zero:
                    terms.pop(key, None)
                else:
                    terms[key] = s
        else:
            for (odd, even), c in self.terms.items():
                e = even[i]
                if not e:
                    continue
                key = (odd, even[:i] + (e - 1,) + even[i + 1 :])
                s = terms.get(key)
                dc = c * e
                s = dc if s is None else s + dc
                if s.is_zero:
                    terms.pop(key, None)
                else:
                    terms[key] = s
        return SuperPoly(self.table, terms)

    def subst_odd(self, images: dict) -> "SuperPoly":
        """Algebra morphism sending odd generators to given values.

        Unlisted generators stay put. Images must live on the same table.
        """
        table = self.table
        gens = {}
        for name, img in images.items():
            kind, i = table.role(name)
            if kind != "odd":
                raise ValueError(f"{name!r} is not an odd generator")
            if not isinstance(img, SuperPoly) or img.table != table:
                raise ValueError("image table mismatch")
            gens[i] = img
        out = SuperPoly.zero(table)
        zeros = (0,) * len(table.even2)
        for (odd, even), c in self.terms.items():
            piece = SuperPoly(table, {((), zeros): c})
            for i in odd:
                factor = gens.get(i)
                if factor is None:
                    factor = SuperPoly(table, {((i,), zeros): ScalarField.one(table.chart)})
                piece = piece * factor
            if any(even):
                piece = piece * SuperPoly(table, {((), even): ScalarField.one(table.chart)})
            out = out + piece
        return out

    # printing

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for key in sorted(self.terms, key=_term_key):
            odd, even = key
            c = self.terms[key]
            factors = [self.table.odd[i] for i in odd]
            for name, e in zip(self.table.even2, even):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            negative = False
            if c.is_polynomial and len(c.num) == 1:
                mono, q = next(iter(c.num.items()))
                negative = q < 0
                text = str(-c) if negative else str(c)
            else:
                text = f"({c})"
            if factors and text == "1":
                body = "*".join(factors)
            elif factors:
                body = "*".join([text] + factors)
            else:
                body = text
            if not pieces:
                pieces.append("-" + body if negative else body)
            else:
                pieces.append(("- " if negative else "+ ") + body)
        return " ".join(pieces)

    def __repr__(self):
        return f"<SuperPoly {self}>"


def transport(f: SuperPoly, table: GeneratorTable, rename: dict | None = None) -> SuperPoly:
    """Move a value onto another table over the same chart, by name.

    Every generator appearing in f must map (via rename, default identity)
    to a generator of the same kind in the target table; index reordering
    signs are accounted for.
    """
    if f.table.chart != table.chart:
        raise ValueError("charts differ")
    rename = rename or {}
    terms: dict = {}
    for (odd, even), c in f.terms.items():
        new = [table.role(rename.get(f.table.odd[i], f.table.odd[i])) for i in odd]
        if any(kind != "odd" for kind, _ in new):
            raise ValueError("odd generator mapped onto a non-odd name")
        idx = [i for _, i in new]
        if len(set(idx)) != len(idx):
            raise ValueError("generator renaming is not injective")
        inversions = sum(
            1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b]
        )
        ee = [0] * len(table.even2)
        for name, e in zip(f.table.even2, even):
            if e:
                kind, i = table.role(rename.get(name, name))
                if kind != "even2":
                    raise ValueError("even generator mapped onto a non-even name")
                ee[i] += e
        key = (tuple(sorted(idx)), tuple(ee))
        cc = -c if inversions & 1 else c
        s = terms.get(key)
        s = cc if s is None else s + cc
        if s.is_zero:
            terms.pop(key, None)
        else:
            terms[key] = s
    return SuperPoly(table, terms)


class SuperVectorField:
    """Graded derivation given by its components on coordinates/generators."""

    __slots__ = ("table", "components", "parity", "degree")

    def __init__(self, table: GeneratorTable, components: dict):
        comps = {}
        parities = set()
        degrees = set()
        for name, value in components.items():
            kind = table.role(name)[0]
            if not isinstance(value, SuperPoly) or value.table != table:
                raise ValueError(f"component for {name!r} has the wrong table")
            if value.is_zero:
                continue
            d = table.degree_of(name)
            parities.add((value.parity() - d) & 1)
            try:
                degrees.add(value.degree() - d)
            except ValueError:
                degrees.add(None)
            comps[name] = value
        if len(parities) > 1:
            raise ValueError("components of mixed parity")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "parity", parities.pop() if parities else 0)
        if len(degrees) == 1 and None not in degrees:
            object.__setattr__(self, "degree", degrees.pop())
        elif not degrees:
            object.__setattr__(self, "degree", 0)
        else:
            object.__setattr__(self, "degree", None)

    def __setattr__(self, name, value):
        raise AttributeError("SuperVectorField is immutable")

    def component(self, name: str) -> SuperPoly:
        return self.components.get(name, SuperPoly.zero(self.table))

    @property
    def is_zero(self) -> bool:
        return not self.components

    def apply(self, f: SuperPoly) -> SuperPoly:
        if f.table != self.table:
            raise ValueError("generator table mismatch")
        out = SuperPoly.zero(self.table)
        for name, comp in self.components.items():
            out = out + comp * f.left_partial(name)
        return out

    def __add__(self, other):
        if not isinstance(other, SuperVectorField) or other.table != self.table:
            return NotImplemented
        names = set(self.components) | set(other.components)
        return SuperVectorField(
            self.table, {n: self.component(n) + other.component(n) for n in names}
        )

    def __neg__(self):
        return SuperVectorField(self.table, {n: -c for n, c in self.components.items()})

    def __sub__(self, other):
        if not isinstance(other, SuperVectorField) or other.table != self.table:
            return NotImplemented
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, SuperVectorField):
            return NotImplemented
        return self.table == other.table and self.components == other.components

    def __str__(self):
        if not self.components:
            return "0"
        order = (*self.table.chart.names, *self.table.odd, *self.table.even2)
        pieces = []
        for name in order:
            if name in self.components:
                pieces.append(f"({self.components[name]}) d/d{name}")
        return " + ".join(pieces)

    def __repr__(self):
        return f"<SuperVectorField {self}>"


def super_mul(f: SuperPoly, g: SuperPoly) -> SuperPoly:
    return f * g


def left_partial(f: SuperPoly, gen: str) -> SuperPoly:
    return f.left_partial(gen)


def apply_field(X: SuperVectorField, f: SuperPoly) -> SuperPoly:
    return X.apply(f)


def commutator(X: SuperVectorField, Y: SuperVectorField) -> SuperVectorField:
    """Graded commutator [X, Y] = XY - (-1)^{|X||Y|} YX."""
    if X.table != Y.table:
        raise ValueError("generator table mismatch")
    table = X.table
    sign = -1 if X.parity and Y.parity else 1
    comps = {}
    for name in (*table.chart.names, *table.odd, *table.even2):
        a = X.apply(Y.component(name))
        b = Y.apply(X.component(name))
        comps[name] = a - b if sign > 0 else a + b
    return SuperVectorField(table, comps)


def divergence(X: SuperVectorField) -> SuperPoly:
    """Berezinian coordinate divergence under the standard gauge."""
    table = X.table
    out = SuperPoly.zero(table)
    for name in table.chart.names:
        out = out + X.component(name).left_partial(name)
    for name in table.even2:
        out = out + X.component(name).left_partial(name)
    odd_sign = 1 if X.parity else -1
    for name in table.odd:
        piece = X.component(name).left_partial(name)
        out = out + piece if odd_sign > 0 else out - piece
    return out


def gauge_divergence(X: SuperVectorField, g: ScalarField) -> SuperPoly:
    """Divergence against the gauge rescaled by a nonzero factor g."""
    if g.is_zero:
        raise ZeroDivisionError("zero gauge factor")
    moved = X.apply(SuperPoly.from_scalar(X.table, g))
    return divergence(X) + moved / g


def parse_super(text: str, table: GeneratorTable) -> SuperPoly:
    """Parse an expression over the chart coordinates and generators."""

    def resolve(name: str, line: int, col: int) -> SuperPoly:
        try:
            table.role(name)
        except KeyError:
            raise ParseError(f"unknown identifier {name!r}", line, col) from None
        return SuperPoly.generator(table, name)

    return parse_expression(text, resolve, lambda q: SuperPoly.from_scalar(table, q))
