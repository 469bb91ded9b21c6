"""Degree-2 graded symplectic spaces and cubic Hamiltonians.

A space carries odd degree-1 generators zeta^1..zeta^N with a constant
symmetric invertible pairing g, plus momenta p_1..p_m of degree 2
conjugate to the chart coordinates. The graded Poisson bracket is the
even degree-(-2) biderivation fixed by

    {x^a, p_b} = delta^a_b      {zeta^i, zeta^j} = g^{ij}  (inverse pairing)

computed as {F,G} = sum (right derivative of F) * (left derivative of G)
over conjugate generator pairs; for odd generators the right derivative
of F is (-1)^(|F|+1) times the left one. All residual sign freedom is
pinned by the frame-bracket identities tested downstream: with the
algebroid Hamiltonian below, {{xi_i, mu}, xi_j} = c_{ij}^k xi_k and
{{xi_i, mu}, x^a} = rho_i^a.

Split spaces mark N = 2n with zeta = (y^1..y^n, xi_1..xi_n) and the
off-diagonal block pairing, so {y^i, xi_j} = delta^i_j. Cubic
Hamiltonians on a split space decompose by monomial type:

    mu:  {y y xi, y p}     gamma: {xi xi y, xi p}
    phi: {y y y}           psi:   {xi xi xi}

Under the generator weights y = (0,1), xi = (1,0), p = (1,1) these
parts have bidegrees (1,2), (2,1), (0,3), (3,0); a weight convention
swapping the roles of y and xi relabels mu and gamma as (2,1) and
(1,2) and phi, psi as (3,0), (0,3). Only the monomial types matter
here, and the yyy part is the one acting as a 3-form on the algebroid
(a section of the third exterior power of the dual bundle).
"""

from __future__ import annotations

from collections import namedtuple
from fractions import Fraction

from .algebroid import SkewAlgebroid, _coerce_scalar
from .errors import InternalConsistencyError
from .linalg import invert_matrix
from .scalar import BaseChart, ScalarField
from .superalg import GeneratorTable, SuperPoly, SuperVectorField, transport


class SymplecticSpace2:
    """Chart, odd generators with constant pairing, and momenta."""

    __slots__ = ("chart", "zeta", "momenta", "pairing", "pairing_inv", "split_rank", "table")

    def __init__(self, chart: BaseChart, zeta: tuple, pairing, split_rank: int | None = None):
        zeta = tuple(zeta)
        g = [[Fraction(v) for v in row] for row in pairing]
        n = len(zeta)
        if len(g) != n or any(len(row) != n for row in g):
            raise ValueError("pairing shape does not match the generators")
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise ValueError("pairing must be symmetric")
        inv = invert_matrix(g, Fraction(0), Fraction(1))
        if inv is None:
            raise ValueError("pairing must be invertible")
        if split_rank is not None:
            if n != 2 * split_rank:
                raise ValueError("split marking needs exactly 2n odd generators")
            for i in range(split_rank):
                for j in range(n):
                    want = Fraction(1 if j == i + split_rank else 0)
                    if g[i][j] != want or g[i + split_rank][j] != (
                        Fraction(1) if j == i else Fraction(0)
                    ):
                        raise ValueError("split marking needs the block pairing")
        momenta = tuple(f"p{a}" for a in range(1, chart.m + 1))
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "momenta", momenta)
        object.__setattr__(self, "pairing", tuple(tuple(row) for row in g))
        object.__setattr__(self, "pairing_inv", tuple(tuple(row) for row in inv))
        object.__setattr__(self, "split_rank", split_rank)
        object.__setattr__(self, "table", GeneratorTable(chart, odd=zeta, even2=momenta))

    def __setattr__(self, name, value):
        raise AttributeError("SymplecticSpace2 is immutable")

    def __eq__(self, other):
        if not isinstance(other, SymplecticSpace2):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.zeta == other.zeta
            and self.pairing == other.pairing
            and self.split_rank == other.split_rank
        )

    @property
    def is_split(self) -> bool:
        return self.split_rank is not None

    def y_name(self, i: int) -> str:
        return self.zeta[i - 1]

    def xi_name(self, i: int) -> str:
        return self.zeta[self.split_rank + i - 1]


def split_space(chart: BaseChart, n: int) -> SymplecticSpace2:
    """T*[2]E[1]-style space: zeta = (y^1..y^n, xi_1..xi_n)."""
    names = tuple(f"y{i}" for i in range(1, n + 1)) + tuple(f"xi{i}" for i in range(1, n + 1))
    g = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        g[i][n + i] = Fraction(1)
        g[n + i][i] = Fraction(1)
    return SymplecticSpace2(chart, names, g, split_rank=n)


def poisson_bracket(F: SuperPoly, G: SuperPoly, space: SymplecticSpace2) -> SuperPoly:
    """The graded symplectic bracket; even, degree -2."""
    if F.table != space.table or G.table != space.table:
        raise ValueError("generator table mismatch")
    table = space.table
    out = SuperPoly.zero(table)
    even_part, odd_part = F.parity_split()
    for part, parity in ((even_part, 0), (odd_part, 1)):
        if part.is_zero:
            continue
        for a, (x_name, p_name) in enumerate(zip(space.chart.names, space.momenta)):
            dxF = part.left_partial(x_name)
            if not dxF.is_zero:
                out = out + dxF * G.left_partial(p_name)
            dpF = part.left_partial(p_name)
            if not dpF.is_zero:
                out = out - dpF * G.left_partial(x_name)
        zeta_sign = 1 if parity else -1
        for i, zi in enumerate(space.zeta):
            dziF = part.left_partial(zi)
            if dziF.is_zero:
                continue
            for j, zj in enumerate(space.zeta):
                gij = space.pairing_inv[i][j]
                if not gij:
                    continue
                piece = dziF * G.left_partial(zj) * gij
                out = out + piece if zeta_sign > 0 else out - piece
    return out


class Hamiltonian:
    """A degree-3 element generating the derived bracket calculus."""

    __slots__ = ("space", "value")

    def __init__(self, space: SymplecticSpace2, value: SuperPoly):
        if value.table != space.table:
            raise ValueError("value does not live on the space")
        if not value.is_zero and value.degree() != 3:
            raise ValueError("Hamiltonians must be homogeneous of degree 3")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Hamiltonian is immutable")

    def __eq__(self, other):
        if not isinstance(other, Hamiltonian):
            return NotImplemented
        return self.space == other.space and self.value == other.value


def algebroid_hamiltonian(A: SkewAlgebroid, space: SymplecticSpace2 | None = None) -> Hamiltonian:
    """The cubic Hamiltonian whose derived bracket is the algebroid's.

    mu = -(sum_{i<j} c_{ij}^k y^i y^j xi_k) - rho_i^b y^i p_b; the
    momentum-term sign pairs with {x,p} = +delta to give anchors +rho.
    """
    if space is None:
        space = split_space(A.chart, A.rank)
    elif space.split_rank != A.rank or space.chart != A.chart:
        raise ValueError("space does not match the algebroid")
    table = space.table
    value = SuperPoly.zero(table)
    for (i, j, k), f in A.c.items():
        mono = (
            SuperPoly.generator(table, space.y_name(i))
            * SuperPoly.generator(table, space.y_name(j))
            * SuperPoly.generator(table, space.xi_name(k))
        )
        value = value - f * mono
    for (i, b), r in A.rho.items():
        mono = SuperPoly.generator(table, space.y_name(i)) * SuperPoly.generator(
            table, space.momenta[b - 1]
        )
        value = value - r * mono
    return Hamiltonian(space, value)


def standard_hamiltonian(space: SymplecticSpace2, rho: dict, phi: dict) -> Hamiltonian:
    """General-pairing builder: anchor rows rho[(i,a)] and a totally
    antisymmetric cubic phi[(i,j,k)] given for i<j<k."""
    table = space.table
    value = SuperPoly.zero(table)
    for (i, a), r in rho.items():
        mono = SuperPoly.generator(table, space.zeta[i - 1]) * SuperPoly.generator(
            table, space.momenta[a - 1]
        )
        value = value - _coerce_scalar(space.chart, r) * mono
    for (i, j, k), f in phi.items():
        if not i < j < k:
            raise ValueError("phi indices must be strictly increasing")
        mono = (
            SuperPoly.generator(table, space.zeta[i - 1])
            * SuperPoly.generator(table, space.zeta[j - 1])
            * SuperPoly.generator(table, space.zeta[k - 1])
        )
        value = value - _coerce_scalar(space.chart, f) * mono
    return Hamiltonian(space, value)


def hamiltonian_square(H: Hamiltonian) -> SuperPoly:
    """{H, H}; zero exactly when the derived bracket calculus closes."""
    return poisson_bracket(H.value, H.value, H.space)


def derived_bracket(X: SuperPoly, Y: SuperPoly, H: Hamiltonian) -> SuperPoly:
    """Dorfman-style bracket {{X, H}, Y} on degree-1 elements."""
    inner = poisson_bracket(X, H.value, H.space)
    return poisson_bracket(inner, Y, H.space)


def anchor_apply(X: SuperPoly, f, H: Hamiltonian) -> SuperPoly:
    """Anchor action {{X, H}, f} on a degree-0 function."""
    if isinstance(f, ScalarField):
        f = SuperPoly.from_scalar(H.space.table, f)
    inner = poisson_bracket(X, H.value, H.space)
    return poisson_bracket(inner, f, H.space)


def hamiltonian_field(H: Hamiltonian) -> SuperVectorField:
    """The derivation {H, .} packaged by its generator components."""
    table = H.space.table
    comps = {}
    for name in (*table.chart.names, *table.odd, *table.even2):
        comps[name] = poisson_bracket(H.value, SuperPoly.generator(table, name), H.space)
    return SuperVectorField(table, comps)


def _monomial_type(space: SymplecticSpace2, key: tuple) -> tuple:
    odd, even = key
    n = space.split_rank
    ny = sum(1 for i in odd if i < n)
    nxi = len(odd) - ny
    return (ny, nxi, sum(even))


BidegreeParts = namedtuple("BidegreeParts", "mu gamma phi psi")

_MU_TYPES = {(2, 1, 0), (1, 0, 1)}
_GAMMA_TYPES = {(1, 2, 0), (0, 1, 1)}
_PHI_TYPE = (3, 0, 0)
_PSI_TYPE = (0, 3, 0)


def bidegree_split(H: Hamiltonian) -> BidegreeParts:
    """Monomial-type decomposition of a cubic on a split space."""
    space = H.space
    if not space.is_split:
        raise ValueError("bidegree split needs a split space")
    buckets = {"mu": {}, "gamma": {}, "phi": {}, "psi": {}}
    for key, c in H.value.terms.items():
        t = _monomial_type(space, key)
        if t in _MU_TYPES:
            buckets["mu"][key] = c
        elif t in _GAMMA_TYPES:
            buckets["gamma"][key] = c
        elif t == _PHI_TYPE:
            buckets["phi"][key] = c
        else:
            buckets["psi"][key] = c
    return BidegreeParts(
        **{name: Hamiltonian(space, SuperPoly(space.table, terms)) for name, terms in buckets.items()}
    )


def is_projectable(H: Hamiltonian) -> bool:
    """gamma = psi = 0; cross-checked against the direct field criterion."""
    parts = bidegree_split(H)
    by_type = parts.gamma.value.is_zero and parts.psi.value.is_zero
    space = H.space
    table = space.table
    allowed = set(space.zeta[: space.split_rank])
    by_field = True
    for name in (*space.chart.names, *space.zeta[: space.split_rank]):
        comp = poisson_bracket(H.value, SuperPoly.generator(table, name), space)
        if not comp.generator_names() <= allowed:
            by_field = False
            break
    if by_type != by_field:
        raise InternalConsistencyError("projectability criteria disagree")
    return by_type


Projection = namedtuple("Projection", "field algebroid homological")


def project_to_E(H: Hamiltonian) -> Projection:
    """Push the Hamiltonian field down to the (x, y) generators.

    Returns the projected field, the algebroid read off from it, and
    whether {H,H} = 0 (the projection is computed either way).
    """
    if not is_projectable(H):
        raise ValueError("Hamiltonian is not projectable")
    space = H.space
    n = space.split_rank
    table = space.table
    form_table = GeneratorTable(space.chart, odd=space.zeta[:n])
    comps = {}
    for name in (*space.chart.names, *space.zeta[:n]):
        comp = poisson_bracket(H.value, SuperPoly.generator(table, name), space)
        comps[name] = transport(comp, form_table)
    field = SuperVectorField(form_table, comps)
    c = {}
    for k in range(1, n + 1):
        comp = comps[space.y_name(k)]
        for (odd, _even), coeff in comp.terms.items():
            i, j = odd[0] + 1, odd[1] + 1
            c[(i, j, k)] = -coeff
    rho = {}
    for b, x_name in enumerate(space.chart.names, start=1):
        comp = comps[x_name]
        for (odd, _even), coeff in comp.terms.items():
            rho[(odd[0] + 1, b)] = coeff
    algebroid = SkewAlgebroid(space.chart, n, c, rho)
    return Projection(field, algebroid, hamiltonian_square(H).is_zero)
