"""Skew and Lie algebroids over a single chart.

Structure data is a rank, antisymmetric structure functions c (stored
for i<j only) and anchor components rho. Three encodings share the
kernel: sections of the bundle are coefficient tuples over the frame
e_1..e_n; forms are polynomials in odd generators y1..yn (y^i dual to
e_i); multivectors are polynomials in a second odd frame xi1..xin
(xi_i standing for e_i). Chart coordinate names must stay clear of the
generated names y*, xi*, p*.

The structure vector field is

    d = -(sum_{i<j} c_{ij}^k y^i y^j) d/dy^k + (rho_i^b y^i) d/dx^b

an odd degree-1 derivation on forms; the algebroid is Lie exactly when
d squares to zero, and [d, d] is the Jacobi obstruction certificate.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InternalConsistencyError
from .linalg import invert_matrix
from .scalar import BaseChart, ScalarField
from .superalg import GeneratorTable, SuperPoly, SuperVectorField, commutator, transport


def _coerce_scalar(chart: BaseChart, value) -> ScalarField:
    if isinstance(value, ScalarField):
        if value.chart != chart:
            raise ValueError("chart mismatch")
        return value
    if isinstance(value, (int, Fraction)):
        return ScalarField.const(chart, value)
    raise TypeError(f"cannot use {value!r} as a scalar")


class SkewAlgebroid:
    """Rank, structure functions c_{ij}^k (i<j), anchor rho_i^a."""

    __slots__ = ("chart", "rank", "c", "rho", "_memo")

    def __init__(self, chart: BaseChart, rank: int, c: dict | None = None, rho: dict | None = None):
        if rank < 1:
            raise ValueError("rank must be positive")
        cc = {}
        for (i, j, k), value in (c or {}).items():
            if not (1 <= i < j <= rank and 1 <= k <= rank):
                raise ValueError(f"bad structure index ({i},{j},{k})")
            f = _coerce_scalar(chart, value)
            if not f.is_zero:
                cc[(i, j, k)] = f
        rr = {}
        for (i, a), value in (rho or {}).items():
            if not (1 <= i <= rank and 1 <= a <= chart.m):
                raise ValueError(f"bad anchor index ({i},{a})")
            f = _coerce_scalar(chart, value)
            if not f.is_zero:
                rr[(i, a)] = f
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "c", cc)
        object.__setattr__(self, "rho", rr)
        object.__setattr__(self, "_memo", {})

    def __setattr__(self, name, value):
        raise AttributeError("SkewAlgebroid is immutable")

    def c_at(self, i: int, j: int, k: int) -> ScalarField:
        """Antisymmetric extension of the stored i<j entries."""
        if i == j:
            return ScalarField.zero(self.chart)
        if i < j:
            return self.c.get((i, j, k), ScalarField.zero(self.chart))
        return -self.c.get((j, i, k), ScalarField.zero(self.chart))

    def rho_at(self, i: int, a: int) -> ScalarField:
        return self.rho.get((i, a), ScalarField.zero(self.chart))

    def table(self) -> GeneratorTable:
        """Form generators y1..yn over the chart."""
        if "table" not in self._memo:
            names = tuple(f"y{i}" for i in range(1, self.rank + 1))
            self._memo["table"] = GeneratorTable(self.chart, odd=names)
        return self._memo["table"]

    def mv_table(self) -> GeneratorTable:
        """Multivector generators xi1..xin over the chart."""
        if "mv_table" not in self._memo:
            names = tuple(f"xi{i}" for i in range(1, self.rank + 1))
            self._memo["mv_table"] = GeneratorTable(self.chart, odd=names)
        return self._memo["mv_table"]

    def section(self, values) -> tuple:
        """Coerce a length-n sequence into section encoding."""
        values = tuple(_coerce_scalar(self.chart, v) for v in values)
        if len(values) != self.rank:
            raise ValueError("section length does not match the rank")
        return values

    def frame_section(self, i: int) -> tuple:
        return tuple(
            ScalarField.one(self.chart) if j == i else ScalarField.zero(self.chart)
            for j in range(1, self.rank + 1)
        )

    def anchor_action(self, X, f: ScalarField) -> ScalarField:
        """rho(X) applied to a base function."""
        X = self.section(X)
        out = ScalarField.zero(self.chart)
        for i, coeff in enumerate(X, start=1):
            if coeff.is_zero:
                continue
            for a in range(1, self.chart.m + 1):
                r = self.rho_at(i, a)
                if not r.is_zero:
                    out = out + coeff * r * f.partial(a)
        return out

    def de_rham_field(self) -> SuperVectorField:
        if "field" not in self._memo:
            table = self.table()
            comps = {}
            for k in range(1, self.rank + 1):
                acc = SuperPoly.zero(table)
                for (i, j, kk), f in self.c.items():
                    if kk != k:
                        continue
                    yi = SuperPoly.generator(table, table.odd[i - 1])
                    yj = SuperPoly.generator(table, table.odd[j - 1])
                    acc = acc - f * yi * yj
                comps[table.odd[k - 1]] = acc
            for b in range(1, self.chart.m + 1):
                acc = SuperPoly.zero(table)
                for i in range(1, self.rank + 1):
                    r = self.rho_at(i, b)
                    if not r.is_zero:
                        acc = acc + r * SuperPoly.generator(table, table.odd[i - 1])
                comps[self.chart.names[b - 1]] = acc
            self._memo["field"] = SuperVectorField(table, comps)
        return self._memo["field"]

    def jacobi_obstruction(self) -> SuperVectorField:
        """[d, d]; zero exactly for Lie algebroids."""
        if "jacobi" not in self._memo:
            d = self.de_rham_field()
            self._memo["jacobi"] = commutator(d, d)
        return self._memo["jacobi"]

    def is_lie(self) -> bool:
        if "is_lie" not in self._memo:
            self._memo["is_lie"] = self.jacobi_obstruction().is_zero
        return self._memo["is_lie"]


def de_rham_field(A: SkewAlgebroid) -> SuperVectorField:
    return A.de_rham_field()


def is_lie(A: SkewAlgebroid):
    """(flag, certificate): certificate is [d,d] when nonzero."""
    obstruction = A.jacobi_obstruction()
    if obstruction.is_zero:
        return True, None
    return False, obstruction


def bracket_sections(A: SkewAlgebroid, X, Y) -> tuple:
    """Anchored antisymmetric bracket on section encodings."""
    X = A.section(X)
    Y = A.section(Y)
    out = []
    for k in range(1, A.rank + 1):
        v = ScalarField.zero(A.chart)
        for i in range(1, A.rank + 1):
            if X[i - 1].is_zero:
                continue
            for j in range(1, A.rank + 1):
                if Y[j - 1].is_zero:
                    continue
                ck = A.c_at(i, j, k)
                if not ck.is_zero:
                    v = v + X[i - 1] * Y[j - 1] * ck
        v = v + A.anchor_action(X, Y[k - 1]) - A.anchor_action(Y, X[k - 1])
        out.append(v)
    return tuple(out)


def interior_product(A: SkewAlgebroid, X, omega: SuperPoly) -> SuperPoly:
    """Contraction of a form with a section, ScalarField-linear in X."""
    X = A.section(X)
    table = A.table()
    if omega.table != table:
        raise ValueError("omega must live on the form table")
    out = SuperPoly.zero(table)
    for i, coeff in enumerate(X):
        if not coeff.is_zero:
            out = out + coeff * omega.left_partial(table.odd[i])
    return out


def lie_derivative_form(A: SkewAlgebroid, X, omega: SuperPoly) -> SuperPoly:
    """Cartan formula: contract-then-differentiate plus the reverse."""
    d = A.de_rham_field()
    return interior_product(A, X, d.apply(omega)) + d.apply(interior_product(A, X, omega))


def schouten(A: SkewAlgebroid, U: SuperPoly, V: SuperPoly) -> SuperPoly:
    """Multivector bracket, degree -1, via the derived bracket upstairs."""
    from . import courant

    setup = A._memo.get("schouten")
    if setup is None:
        space = courant.split_space(A.chart, A.rank)
        mu = courant.algebroid_hamiltonian(A, space)
        setup = (space, mu.value)
        A._memo["schouten"] = setup
    space, mu = setup
    lifted_u = transport(U, space.table)
    lifted_v = transport(V, space.table)
    inner = courant.poisson_bracket(lifted_u, mu, space)
    outer = courant.poisson_bracket(inner, lifted_v, space)
    try:
        return transport(outer, A.mv_table())
    except ValueError as exc:
        raise InternalConsistencyError(
            "multivector bracket left the multivector algebra"
        ) from exc


class AlgebroidMorphism:
    """Base-preserving bundle map e_i -> sum_j Phi_i^j e_j between
    algebroids over one chart."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: SkewAlgebroid, target: SkewAlgebroid, matrix: dict):
        if source.chart != target.chart:
            raise ValueError("morphisms must be base-preserving over one chart")
        entries = {}
        for (i, j), value in matrix.items():
            if not (1 <= i <= source.rank and 1 <= j <= target.rank):
                raise ValueError(f"bad matrix index ({i},{j})")
            f = _coerce_scalar(source.chart, value)
            if not f.is_zero:
                entries[(i, j)] = f
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", entries)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebroidMorphism is immutable")

    def entry(self, i: int, j: int) -> ScalarField:
        return self.matrix.get((i, j), ScalarField.zero(self.source.chart))

    def push_section(self, X) -> tuple:
        """Image coefficients of a source section in the target frame."""
        X = self.source.section(X)
        return tuple(
            sum(
                (X[i - 1] * self.entry(i, j) for i in range(1, self.source.rank + 1)),
                ScalarField.zero(self.source.chart),
            )
            for j in range(1, self.target.rank + 1)
        )


def pullback(phi: AlgebroidMorphism, omega: SuperPoly) -> SuperPoly:
    """Substitute target frame forms along the morphism matrix."""
    tgt = phi.target.table()
    src = phi.source.table()
    if omega.table != tgt:
        raise ValueError("omega must live on the target form table")
    images = []
    for j in range(1, phi.target.rank + 1):
        img = SuperPoly.zero(src)
        for i in range(1, phi.source.rank + 1):
            f = phi.entry(i, j)
            if not f.is_zero:
                img = img + f * SuperPoly.generator(src, src.odd[i - 1])
        images.append(img)
    out = SuperPoly.zero(src)
    for (odd, _even), coeff in omega.terms.items():
        piece = SuperPoly.from_scalar(src, coeff)
        for j in odd:
            piece = piece * images[j]
        out = out + piece
    return out


def is_morphism(phi: AlgebroidMorphism):
    """(flag, certificate); checks the intertwining law on generators."""
    d1 = phi.source.de_rham_field()
    d2 = phi.target.de_rham_field()
    src, tgt = phi.source.table(), phi.target.table()
    for a in phi.source.chart.names:
        lhs = pullback(phi, d2.apply(SuperPoly.coordinate(tgt, a)))
        rhs = d1.apply(SuperPoly.coordinate(src, a))
        if lhs != rhs:
            return False, (a, lhs - rhs)
    for name in tgt.odd:
        omega = SuperPoly.generator(tgt, name)
        lhs = pullback(phi, d2.apply(omega))
        rhs = d1.apply(pullback(phi, omega))
        if lhs != rhs:
            return False, (name, lhs - rhs)
    return True, None


def conjugate_frame(A: SkewAlgebroid, G: list) -> SkewAlgebroid:
    """The same algebroid written in the frame e'_i = sum_j G_i^j e_j.

    G must be invertible over the scalar field; the new structure data
    is recovered from section brackets of the new frame.
    """
    n = A.rank
    rows = [[_coerce_scalar(A.chart, G[i][j]) for j in range(n)] for i in range(n)]
    inv = invert_matrix(rows, ScalarField.zero(A.chart), ScalarField.one(A.chart))
    if inv is None:
        raise ValueError("frame matrix is singular")
    c = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            bracket = bracket_sections(A, rows[i - 1], rows[j - 1])
            for k in range(1, n + 1):
                v = ScalarField.zero(A.chart)
                for l in range(1, n + 1):
                    v = v + bracket[l - 1] * inv[l - 1][k - 1]
                if not v.is_zero:
                    c[(i, j, k)] = v
    rho = {}
    for i in range(1, n + 1):
        for a in range(1, A.chart.m + 1):
            v = ScalarField.zero(A.chart)
            for l in range(1, n + 1):
                v = v + rows[i - 1][l - 1] * A.rho_at(l, a)
            if not v.is_zero:
                rho[(i, a)] = v
    return SkewAlgebroid(A.chart, n, c, rho)
