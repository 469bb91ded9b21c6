"""Modular cocycles of skew algebroids and their exactness.

The modular cocycle measures how the structure differential distorts
the coordinate Berezin volume: it is the divergence of that odd field,
and it comes out linear in the frame generators with components

    phi_i = sum_k c_{ik}^k + sum_a d(rho_i^a)/dx^a.

For a Lie algebroid this cochain is closed and its class is the
obstruction to the existence of an invariant volume; changing the base
volume by a positive factor g shifts the representative by the
anchor-logarithmic term rho_i(g)/g, which does not move the class.
A skew algebroid that fails the Jacobi identity still has a modular
cocycle, but closedness can fail, and the library deliberately keeps
that failure observable.

Every public entry point recomputes its answer along two independent
routes and raises InternalConsistencyError when they disagree.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .algebroid import SkewAlgebroid, bracket_sections, is_morphism, pullback, _coerce_scalar
from .errors import InternalConsistencyError
from .linalg import solve_linear
from .scalar import ScalarField
from .superalg import SuperPoly, divergence, gauge_divergence


class Cocycle1:
    """A frame-linear 1-cochain; closedness is enforced on Lie algebroids."""

    __slots__ = ("algebroid", "value")

    def __init__(self, algebroid: SkewAlgebroid, value: SuperPoly):
        if value.table != algebroid.table():
            raise ValueError("cochain must live on the algebroid's form generators")
        if not value.is_zero and value.degree() != 1:
            raise ValueError("1-cochains must be homogeneous of degree 1")
        if algebroid.is_lie():
            residual = algebroid.de_rham_field().apply(value)
            if not residual.is_zero:
                raise ValueError(f"cochain is not closed: d gives {residual}")
        object.__setattr__(self, "algebroid", algebroid)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Cocycle1 is immutable")

    def component(self, i: int) -> ScalarField:
        """Coefficient of the i-th frame generator, 1-based."""
        key = ((i - 1,), ())
        return self.value.terms.get(key, ScalarField.zero(self.algebroid.chart))

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero

    def __add__(self, other):
        if not isinstance(other, Cocycle1) or other.algebroid is not self.algebroid:
            return NotImplemented
        return Cocycle1(self.algebroid, self.value + other.value)

    def __sub__(self, other):
        if not isinstance(other, Cocycle1) or other.algebroid is not self.algebroid:
            return NotImplemented
        return Cocycle1(self.algebroid, self.value - other.value)

    def __neg__(self):
        return Cocycle1(self.algebroid, -self.value)

    def __eq__(self, other):
        if not isinstance(other, Cocycle1):
            return NotImplemented
        return self.algebroid is other.algebroid and self.value == other.value

    def __str__(self):
        return str(self.value)


def _structure_trace(A: SkewAlgebroid, i: int) -> ScalarField:
    out = ScalarField.zero(A.chart)
    for k in range(1, A.rank + 1):
        out = out + A.c_at(i, k, k)
    for a in range(1, A.chart.m + 1):
        out = out + A.rho_at(i, a).partial(a)
    return out


def _anchor_log(A: SkewAlgebroid, i: int, g: ScalarField) -> ScalarField:
    out = ScalarField.zero(A.chart)
    for a in range(1, A.chart.m + 1):
        r = A.rho_at(i, a)
        if not r.is_zero:
            out = out + r * g.partial(a)
    return out / g


def modular_cocycle(A: SkewAlgebroid, gauge=None) -> Cocycle1:
    """Divergence of the structure differential, cross-checked against
    the structure-constant trace formula."""
    table = A.table()
    if gauge is None:
        div = divergence(A.de_rham_field())
    else:
        g = _coerce_scalar(A.chart, gauge)
        div = gauge_divergence(A.de_rham_field(), g)
    closed_form = SuperPoly.zero(table)
    for i in range(1, A.rank + 1):
        coeff = _structure_trace(A, i)
        if gauge is not None:
            coeff = coeff + _anchor_log(A, i, _coerce_scalar(A.chart, gauge))
        if not coeff.is_zero:
            closed_form = closed_form + coeff * SuperPoly.generator(table, table.odd[i - 1])
    if div != closed_form:
        raise InternalConsistencyError("modular cocycle paths disagree")
    return Cocycle1(A, div)


def characteristic_form(A: SkewAlgebroid, gauge=None) -> Cocycle1:
    """Frame-trace route: adjoint trace through the section bracket plus
    the anchor divergence, per frame direction."""
    table = A.table()
    value = SuperPoly.zero(table)
    for i in range(1, A.rank + 1):
        e_i = A.frame_section(i)
        coeff = ScalarField.zero(A.chart)
        for k in range(1, A.rank + 1):
            coeff = coeff + bracket_sections(A, e_i, A.frame_section(k))[k - 1]
        for a in range(1, A.chart.m + 1):
            coeff = coeff + A.rho_at(i, a).partial(a)
        if gauge is not None:
            coeff = coeff + _anchor_log(A, i, _coerce_scalar(A.chart, gauge))
        if not coeff.is_zero:
            value = value + coeff * SuperPoly.generator(table, table.odd[i - 1])
    return Cocycle1(A, value)


def _monomial_scalar(chart, expo) -> ScalarField:
    out = ScalarField.one(chart)
    for name, e in zip(chart.names, expo):
        for _ in range(e):
            out = out * ScalarField.coord(chart, name)
    return out


def d_of_function(A: SkewAlgebroid, f: ScalarField) -> SuperPoly:
    """The structure differential applied to a base function."""
    return A.de_rham_field().apply(SuperPoly.from_scalar(A.table(), f))


def is_exact(A: SkewAlgebroid, alpha, bound: int | None = None):
    """Search for a polynomial potential alpha = d f up to a degree bound.

    Returns (True, f) with one witness, or (False, None) when no
    polynomial of total degree <= bound works. The default bound is the
    coefficient degree of alpha plus two. Data must be polynomial; the
    witness search is a finite exact linear solve, so a NO answer is a
    proof only relative to the bound.
    """
    value = alpha.value if isinstance(alpha, Cocycle1) else alpha
    if value.table != A.table():
        raise ValueError("cochain must live on the algebroid's form generators")
    chart = A.chart
    components = []
    for i in range(1, A.rank + 1):
        comp = value.terms.get(((i - 1,), ()), ScalarField.zero(chart))
        if not comp.is_polynomial:
            raise ValueError("exactness search needs polynomial components")
        components.append(comp)
    for key in A.rho:
        if not A.rho[key].is_polynomial:
            raise ValueError("exactness search needs a polynomial anchor")
    if value.is_zero:
        return True, ScalarField.zero(chart)
    if bound is None:
        bound = max(comp.total_degree() for comp in components) + 2
    monos = []
    for total in range(1, bound + 1):
        for combo in combinations_with_replacement(range(chart.m), total):
            expo = [0] * chart.m
            for v in combo:
                expo[v] += 1
            monos.append(tuple(expo))
    images = []
    for expo in monos:
        base = _monomial_scalar(chart, expo)
        images.append([_anchor_poly(A, i, base) for i in range(1, A.rank + 1)])
    keys = set()
    for i, comp in enumerate(components):
        keys.update(m for m, _ in comp.monomials())
        for img in images:
            keys.update(m for m, _ in img[i].monomials())
    rows, rhs = [], []
    for i in range(A.rank):
        for key in sorted(keys):
            rows.append([Fraction(img[i].num.get(key, 0)) for img in images])
            rhs.append(Fraction(components[i].num.get(key, 0)))
    solution = solve_linear(rows, rhs, Fraction(0))
    if solution is None:
        return False, None
    f = ScalarField.zero(chart)
    for q, expo in zip(solution, monos):
        if q:
            f = f + ScalarField.const(chart, q) * _monomial_scalar(chart, expo)
    if d_of_function(A, f) != value:
        raise InternalConsistencyError("exactness witness fails verification")
    return True, f


def _anchor_poly(A: SkewAlgebroid, i: int, f: ScalarField) -> ScalarField:
    out = ScalarField.zero(A.chart)
    for a in range(1, A.chart.m + 1):
        r = A.rho_at(i, a)
        if not r.is_zero:
            out = out + r * f.partial(a)
    return out


def modular_class_of_morphism(phi) -> Cocycle1:
    """Relative representative: source cocycle minus the pulled-back
    target cocycle along a checked morphism."""
    ok, certificate = is_morphism(phi)
    if not ok:
        raise ValueError(f"not an algebroid morphism, fails at {certificate[0]}")
    src_mod = modular_cocycle(phi.source).value
    tgt_mod = modular_cocycle(phi.target).value
    return Cocycle1(phi.source, src_mod - pullback(phi, tgt_mod))
