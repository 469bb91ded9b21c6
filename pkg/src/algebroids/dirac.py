"""Isotropic frames and bivector graphs on split quadratic phase spaces.

A bivector is stored as the quadratic element P = sum_{i<j} P^{ij} xi_i xi_j;
its graph frame D_a = y^a + P^{aj} xi_j is the time-1 flow of the Hamiltonian
vector field of P applied to the dual frame.  All span and closure questions
are decided by linear algebra over the rational-function field, so every
answer is generic: valid away from the finitely many hypersurfaces where a
frame minor or a denominator vanishes.

Sign pinning.  With the bracket conventions of the quadratic layer,
{P, y^i} = -P^{ij} xi_j, and the cubic part of a generator enters twisted
formulas with a global flip: writing H = mu + phi (phi the pure-y cubic part
of H), the covector bracket produced by the twisted generator
{P, mu} + 1/2 {P, {P, phi}} matches

    L_{P#a} b - L_{P#b} a - d(P(a, b)) - i_{P#b} i_{P#a} phi

where phi is contracted as the raw stored cubic.  Both sides are computed on
every call and compared, so the convention cannot drift silently.
"""

from collections import namedtuple
from fractions import Fraction

from .algebroid import (
    AlgebroidMorphism,
    SkewAlgebroid,
    _coerce_scalar,
    bracket_sections,
    interior_product,
    is_morphism,
    lie_derivative_form,
    schouten,
)
from .courant import (
    Hamiltonian,
    SymplecticSpace2,
    anchor_apply,
    bidegree_split,
    derived_bracket,
    is_projectable,
    poisson_bracket,
    project_to_E,
    split_space,
)
from .errors import DiracClosureError, InternalConsistencyError
from .linalg import matrix_rank, solve_linear
from .modular import Cocycle1, modular_class_of_morphism, modular_cocycle
from .scalar import ScalarField
from .superalg import SuperPoly, transport


class Bivector:
    """Antisymmetric quadratic P = sum_{i<j} P^{ij} xi_i xi_j on a split space."""

    __slots__ = ("space", "entries")

    def __init__(self, space: SymplecticSpace2, entries: dict | None = None):
        if not space.is_split:
            raise ValueError("bivectors need a split space")
        n = space.split_rank
        cleaned = {}
        for (i, j), value in (entries or {}).items():
            if not (1 <= i < j <= n):
                raise ValueError(f"bad bivector index ({i},{j})")
            f = _coerce_scalar(space.chart, value)
            if not f.is_zero:
                cleaned[(i, j)] = f
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "entries", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError("Bivector is immutable")

    def at(self, i: int, j: int) -> ScalarField:
        """Full antisymmetric matrix entry P^{ij}."""
        if i == j:
            return ScalarField.zero(self.space.chart)
        if i < j:
            return self.entries.get((i, j), ScalarField.zero(self.space.chart))
        return -self.entries.get((j, i), ScalarField.zero(self.space.chart))

    @property
    def value(self) -> SuperPoly:
        table = self.space.table
        out = SuperPoly.zero(table)
        for (i, j), f in self.entries.items():
            xi_i = SuperPoly.generator(table, self.space.xi_name(i))
            xi_j = SuperPoly.generator(table, self.space.xi_name(j))
            out = out + f * xi_i * xi_j
        return out

    def __neg__(self) -> "Bivector":
        return Bivector(self.space, {k: -f for k, f in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, Bivector):
            return NotImplemented
        return self.space == other.space and self.entries == other.entries

    def sharp(self, alpha) -> tuple:
        """Section components of P#(alpha): X_j = sum_i alpha_i P^{ij}."""
        n = self.space.split_rank
        alpha = _component_tuple(self.space.chart, n, alpha)
        return tuple(
            sum(
                (alpha[i - 1] * self.at(i, j) for i in range(1, n + 1)),
                ScalarField.zero(self.space.chart),
            )
            for j in range(1, n + 1)
        )

    def pairing(self, alpha, beta) -> ScalarField:
        """P(alpha, beta) = sum alpha_i P^{ij} beta_j."""
        n = self.space.split_rank
        beta = _component_tuple(self.space.chart, n, beta)
        image = self.sharp(alpha)
        return sum(
            (image[j - 1] * beta[j - 1] for j in range(1, n + 1)),
            ScalarField.zero(self.space.chart),
        )

    def __str__(self):
        if not self.entries:
            return "0"
        bits = []
        for (i, j) in sorted(self.entries):
            bits.append(f"({self.entries[(i, j)]})*{self.space.xi_name(i)}*{self.space.xi_name(j)}")
        return " + ".join(bits)


def _component_tuple(chart, n: int, values) -> tuple:
    values = tuple(_coerce_scalar(chart, v) for v in values)
    if len(values) != n:
        raise ValueError("component count does not match the rank")
    return values


class DiracFrame:
    """A rank-n isotropic frame D_a = X_a^i xi_i + eta^a_i y^i.

    Validation is generic over the rational-function field: the n x 2n
    coefficient matrix must have full rank as a matrix of rational
    functions, so independence may fail on the (excluded) vanishing locus
    of a minor.
    """

    __slots__ = ("space", "sections", "matrix")

    def __init__(self, space: SymplecticSpace2, sections):
        if not space.is_split:
            raise ValueError("frames need a split space")
        n = space.split_rank
        sections = tuple(sections)
        if len(sections) != n:
            raise ValueError(f"expected {n} frame members, got {len(sections)}")
        zeros = (0,) * len(space.table.even2)
        matrix = []
        for s in sections:
            if not isinstance(s, SuperPoly) or s.table != space.table:
                raise ValueError("frame members must live on the space table")
            if s.is_zero or s != s.degree_part(1):
                raise ValueError("frame members must be homogeneous of degree 1")
            matrix.append(
                tuple(
                    s.terms.get(((g,), zeros), ScalarField.zero(space.chart))
                    for g in range(2 * n)
                )
            )
        for a in range(n):
            for b in range(a, n):
                if not poisson_bracket(sections[a], sections[b], space).is_zero:
                    raise ValueError(f"frame is not isotropic at pair ({a + 1},{b + 1})")
        if matrix_rank(matrix) != n:
            raise ValueError("frame drops rank over the function field")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "sections", sections)
        object.__setattr__(self, "matrix", tuple(matrix))

    def __setattr__(self, name, value):
        raise AttributeError("DiracFrame is immutable")

    @property
    def rank(self) -> int:
        return self.space.split_rank

    def e_components(self, a: int) -> tuple:
        """xi-coefficients X_a^i of the a-th member, 1-based."""
        n = self.rank
        return self.matrix[a - 1][n:]

    def dual_components(self, a: int) -> tuple:
        """y-coefficients eta^a_i of the a-th member, 1-based."""
        return self.matrix[a - 1][: self.rank]

    def is_graph(self) -> bool:
        """Whether the y-part is exactly the dual frame (eta = identity)."""
        n = self.rank
        one = ScalarField.one(self.space.chart)
        zero = ScalarField.zero(self.space.chart)
        for a in range(1, n + 1):
            dual = self.dual_components(a)
            for i in range(1, n + 1):
                if dual[i - 1] != (one if i == a else zero):
                    return False
        return True

    def bivector(self) -> Bivector:
        """Read the bivector off a graph frame; isotropy forces antisymmetry."""
        if not self.is_graph():
            raise ValueError("frame is not the graph of a bivector")
        n = self.rank
        entries = {}
        for i in range(1, n + 1):
            row = self.e_components(i)
            for j in range(i + 1, n + 1):
                entries[(i, j)] = row[j - 1]
        return Bivector(self.space, entries)


def graph_frame(P: Bivector) -> DiracFrame:
    """The frame D_a = y^a + sum_j P^{aj} xi_j."""
    space = P.space
    table = space.table
    n = space.split_rank
    sections = []
    for a in range(1, n + 1):
        s = SuperPoly.generator(table, space.y_name(a))
        for j in range(1, n + 1):
            f = P.at(a, j)
            if not f.is_zero:
                s = s + f * SuperPoly.generator(table, space.xi_name(j))
        sections.append(s)
    return DiracFrame(space, sections)


def gauge_transform(F: SuperPoly, P: Bivector) -> SuperPoly:
    """exp(ad_P) F = sum_k (1/k!) {P, ... {P, F} ... }.

    Each bracket with P trades a y or a momentum for xi factors, so the sum
    terminates within degree(F) + 1 steps; tripping the guard means a kernel
    bug, not bad input.
    """
    space = P.space
    if F.table != space.table:
        raise ValueError("argument must live on the space table")
    if F.is_zero:
        return F
    guard = max(len(odd) + 2 * sum(even) for odd, even in F.terms) + 1
    total = F
    term = F
    k = 0
    while True:
        k += 1
        term = poisson_bracket(P.value, term, space) / k
        if term.is_zero:
            return total
        if k > guard:
            raise InternalConsistencyError("gauge series failed to terminate")
        total = total + term


def sharp_substitution(P: Bivector, F: SuperPoly) -> SuperPoly:
    """Substitute y^i -> sum_j P^{ij} xi_j; the wedge power of the sharp map."""
    space = P.space
    table = space.table
    if F.table != table:
        raise ValueError("argument must live on the space table")
    n = space.split_rank
    images = {}
    for i in range(1, n + 1):
        img = SuperPoly.zero(table)
        for j in range(1, n + 1):
            f = P.at(i, j)
            if not f.is_zero:
                img = img + f * SuperPoly.generator(table, space.xi_name(j))
        images[space.y_name(i)] = img
    return F.subst_odd(images)


def _xi_restriction(space: SymplecticSpace2, F: SuperPoly) -> SuperPoly:
    """Set y = 0 and p = 0, keeping the pure (x, xi) part."""
    n = space.split_rank
    kept = {
        key: c
        for key, c in F.terms.items()
        if all(g >= n for g in key[0]) and not any(key[1])
    }
    return SuperPoly(space.table, kept)


def quasi_poisson_check(P: Bivector, H: Hamiltonian):
    """(flag, obstruction): does the gauge flow of H vanish on the xi locus?

    The obstruction is computed twice: by restricting gauge_transform(H, P)
    to y = p = 0, and independently as -1/2 [[P, P]] - (sharp^3) phi via the
    multivector bracket; a mismatch raises.
    """
    space = H.space
    if P.space != space:
        raise ValueError("bivector and Hamiltonian live on different spaces")
    if not is_projectable(H):
        raise ValueError("Hamiltonian is not projectable")
    flowed = gauge_transform(H.value, P)
    path1 = _xi_restriction(space, flowed)

    A = project_to_E(H).algebroid
    pmv = transport(P.value, A.mv_table())
    square = schouten(A, pmv, pmv)
    phi_raw = bidegree_split(H).phi.value
    path2 = transport(square, space.table) * Fraction(-1, 2) - sharp_substitution(P, phi_raw)
    if path1 != path2:
        raise InternalConsistencyError("twist obstruction paths disagree")
    return path1.is_zero, path1


TwistedStructure = namedtuple("TwistedStructure", "value algebroid")


def twisted_hamiltonian(P: Bivector, H: Hamiltonian) -> TwistedStructure:
    """Dual-side generator {P, mu} + 1/2 {P, {P, phi}} and its algebroid.

    The result has monomial types {xi xi y, xi p} only; reading xi as the
    dual frame gives structure functions c'^{ij}_k = -coeff(xi_i xi_j y^k)
    and anchor rho'^{ib} = -coeff(xi_i p_b).
    """
    ok, obstruction = quasi_poisson_check(P, H)
    if not ok:
        raise ValueError(f"pair fails the compatibility check; obstruction {obstruction}")
    space = H.space
    n = space.split_rank
    parts = bidegree_split(H)
    value = poisson_bracket(P.value, parts.mu.value, space)
    phi = parts.phi.value
    if not phi.is_zero:
        inner = poisson_bracket(P.value, poisson_bracket(P.value, phi, space), space)
        value = value + inner * Fraction(1, 2)
    c = {}
    rho = {}
    for (odd, even), coeff in value.terms.items():
        ny = sum(1 for g in odd if g < n)
        npp = sum(even)
        if (ny, len(odd) - ny, npp) == (1, 2, 0):
            k, i, j = odd[0] + 1, odd[1] - n + 1, odd[2] - n + 1
            c[(i, j, k)] = -coeff
        elif (ny, len(odd) - ny, npp) == (0, 1, 1):
            i = odd[0] - n + 1
            b = even.index(1) + 1
            rho[(i, b)] = -coeff
        else:
            raise InternalConsistencyError("twisted generator has an illegal monomial type")
    return TwistedStructure(value, SkewAlgebroid(space.chart, n, c, rho))


def _form_components(A: SkewAlgebroid, omega) -> tuple:
    """Coefficient tuple of a y-linear form, or coerce a plain sequence."""
    if isinstance(omega, SuperPoly):
        table = A.table()
        if omega.table != table:
            raise ValueError("covector must live on the form table")
        if not (omega.is_zero or omega == omega.degree_part(1)):
            raise ValueError("covector must be homogeneous of degree 1")
        comps = []
        for i in range(A.rank):
            comps.append(omega.terms.get(((i,), ()), ScalarField.zero(A.chart)))
        return tuple(comps)
    return A.section(omega)


def _components_to_form(A: SkewAlgebroid, comps) -> SuperPoly:
    table = A.table()
    out = SuperPoly.zero(table)
    for i, f in enumerate(comps):
        if not f.is_zero:
            out = out + f * SuperPoly.generator(table, table.odd[i])
    return out


def twisted_bracket(P: Bivector, H: Hamiltonian, alpha, beta) -> SuperPoly:
    """Covector bracket of the twisted dual structure, as a y-linear form.

    Computed twice: through section brackets of the extracted dual algebroid,
    and through the Cartan formula on the base (see the module docstring for
    the pinned phi sign); a mismatch raises.
    """
    tw = twisted_hamiltonian(P, H)
    A = project_to_E(H).algebroid
    table = A.table()
    a = _form_components(A, alpha)
    b = _form_components(A, beta)

    derived_form = _components_to_form(A, bracket_sections(tw.algebroid, a, b))

    xa = P.sharp(a)
    xb = P.sharp(b)
    alpha_f = _components_to_form(A, a)
    beta_f = _components_to_form(A, b)
    pair = SuperPoly.from_scalar(table, P.pairing(a, b))
    phi_form = transport(bidegree_split(H).phi.value, table)
    cartan = (
        lie_derivative_form(A, xa, beta_f)
        - lie_derivative_form(A, xb, alpha_f)
        - A.de_rham_field().apply(pair)
        - interior_product(A, xb, interior_product(A, xa, phi_form))
    )
    if cartan != derived_form:
        raise InternalConsistencyError("twisted bracket paths disagree")
    return derived_form


def solve_twist(P: Bivector, A: SkewAlgebroid) -> SuperPoly | None:
    """Pure-y cubic phi with sharp_substitution(phi) = -1/2 [[P, P]], or None.

    The linear system is solved over the rational-function field, so the
    witness may have denominators; they vanish nowhere on the generic locus.
    """
    space = P.space
    if A.chart != space.chart or A.rank != space.split_rank:
        raise ValueError("bivector and algebroid do not match")
    n = A.rank
    table = space.table
    pmv = transport(P.value, A.mv_table())
    target = transport(schouten(A, pmv, pmv), table) * Fraction(-1, 2)
    combos = []
    columns = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                mono = (
                    SuperPoly.generator(table, space.y_name(i))
                    * SuperPoly.generator(table, space.y_name(j))
                    * SuperPoly.generator(table, space.y_name(k))
                )
                combos.append(mono)
                columns.append(sharp_substitution(P, mono))
    keys = sorted(set(target.terms) | {key for col in columns for key in col.terms})
    zero = ScalarField.zero(A.chart)
    if not combos:
        return SuperPoly.zero(table) if target.is_zero else None
    rows = [[col.terms.get(key, zero) for col in columns] for key in keys]
    rhs = [target.terms.get(key, zero) for key in keys]
    solution = solve_linear(rows, rhs, zero)
    if solution is None:
        return None
    phi = SuperPoly.zero(table)
    for coeff, mono in zip(solution, combos):
        if not coeff.is_zero:
            phi = phi + coeff * mono
    if sharp_substitution(P, phi) != target:
        raise InternalConsistencyError("twist solver produced a non-solution")
    return phi


def _pivot_rows(matrix, zero) -> list:
    """Indices of a maximal independent row set, by Gauss-Jordan elimination."""
    work = [list(row) for row in matrix]
    ncols = len(work[0]) if work else 0
    pivots = []
    used = set()
    for col in range(ncols):
        pivot = next(
            (r for r in range(len(work)) if r not in used and work[r][col]), None
        )
        if pivot is None:
            continue
        pivots.append(pivot)
        used.add(pivot)
        head = work[pivot][col]
        work[pivot] = [v / head for v in work[pivot]]
        for r in range(len(work)):
            if r != pivot and work[r][col]:
                factor = work[r][col]
                work[r] = [v - factor * w for v, w in zip(work[r], work[pivot])]
    return pivots


def induced_algebroid(D: DiracFrame, H: Hamiltonian) -> SkewAlgebroid:
    """Structure carried by the frame when it closes under the derived bracket.

    Span membership is decided over the rational-function field; a bracket
    leaving the span raises DiracClosureError carrying the offending pair
    and the full bracket as residual evidence.
    """
    space = D.space
    if H.space != space:
        raise ValueError("frame and Hamiltonian live on different spaces")
    n = space.split_rank
    chart = space.chart
    zero = ScalarField.zero(chart)
    zeros = (0,) * len(space.table.even2)
    # columns index frame members, rows index the 2n odd generators
    full = [[D.matrix[c][g] for c in range(n)] for g in range(2 * n)]
    pivots = _pivot_rows(full, zero)
    c = {}
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            bracket = derived_bracket(D.sections[a - 1], D.sections[b - 1], H)
            rhs = [
                bracket.terms.get(((g,), zeros), zero) for g in range(2 * n)
            ]
            coeffs = solve_linear(
                [full[g] for g in pivots], [rhs[g] for g in pivots], zero
            )
            residual = bracket
            for t, section in zip(coeffs, D.sections):
                if not t.is_zero:
                    residual = residual - t * section
            if not residual.is_zero:
                raise DiracClosureError(
                    f"bracket of frame members ({a},{b}) leaves the frame span",
                    (a, b),
                    residual,
                )
            for k, t in enumerate(coeffs, start=1):
                if not t.is_zero:
                    c[(a, b, k)] = t
    rho = {}
    for a in range(1, n + 1):
        for bb, name in enumerate(chart.names, start=1):
            acted = anchor_apply(
                D.sections[a - 1], SuperPoly.coordinate(space.table, name), H
            )
            f = acted.terms.get(((), zeros), zero)
            if acted != SuperPoly.from_scalar(space.table, f):
                raise InternalConsistencyError("frame anchor is not a base function")
            if not f.is_zero:
                rho[(a, bb)] = f
    return SkewAlgebroid(chart, n, c, rho)


def relative_modular_class(D: DiracFrame, H: Hamiltonian) -> Cocycle1:
    """Class of the projection-to-base morphism on the induced algebroid.

    The projection sends D_a to its xi-part X_a; it must be a bracket
    morphism for conformant input, so a failed morphism check raises
    InternalConsistencyError rather than ValueError.  For graph frames the
    result is independently recomputed from the twisted dual structure.
    Everything is generic over the function field: frames whose projection
    drops rank on a hypersurface get the class away from that locus.
    """
    ind = induced_algebroid(D, H)
    A = project_to_E(H).algebroid
    n = D.rank
    matrix = {}
    for a in range(1, n + 1):
        row = D.e_components(a)
        for i in range(1, n + 1):
            if not row[i - 1].is_zero:
                matrix[(a, i)] = row[i - 1]
    projection = AlgebroidMorphism(ind, A, matrix)
    ok, certificate = is_morphism(projection)
    if not ok:
        raise InternalConsistencyError(
            f"frame projection fails the morphism law at {certificate[0]}"
        )
    rel = modular_class_of_morphism(projection)
    if D.is_graph():
        P = D.bivector()
        tw = twisted_hamiltonian(P, H)
        dual_mod = modular_cocycle(tw.algebroid)
        base_mod = modular_cocycle(A)
        table = ind.table()
        cross = transport(dual_mod.value, table)
        for a in range(1, n + 1):
            s = ScalarField.zero(A.chart)
            for i in range(1, n + 1):
                s = s + base_mod.component(i) * P.at(i, a)
            if not s.is_zero:
                cross = cross + s * SuperPoly.generator(table, table.odd[a - 1])
        if rel.value != cross:
            raise InternalConsistencyError("relative class paths disagree")
    return rel


def verify_morphism_cor53(P: Bivector, H: Hamiltonian):
    """(flag, certificate): is the sharp map a morphism from the twisted dual?

    The matrix P^{ij} is checked as a bracket morphism from the twisted
    dual algebroid to the base one; a certificate names the first generator
    where the intertwining law breaks.
    """
    tw = twisted_hamiltonian(P, H)
    A = project_to_E(H).algebroid
    n = P.space.split_rank
    matrix = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            f = P.at(i, j)
            if not f.is_zero:
                matrix[(i, j)] = f
    return is_morphism(AlgebroidMorphism(tw.algebroid, A, matrix))
