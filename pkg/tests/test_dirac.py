"""Bivector graphs, gauge flows, twists, induced brackets, relative classes."""

import random

from fractions import Fraction

import pytest

from algebroids.algebroid import SkewAlgebroid, bracket_sections
from algebroids.courant import (
    Hamiltonian,
    algebroid_hamiltonian,
    hamiltonian_square,
    poisson_bracket,
    split_space,
)
from algebroids.dirac import (
    Bivector,
    DiracFrame,
    gauge_transform,
    graph_frame,
    induced_algebroid,
    quasi_poisson_check,
    relative_modular_class,
    sharp_substitution,
    solve_twist,
    twisted_bracket,
    twisted_hamiltonian,
    verify_morphism_cor53,
)
from algebroids.errors import DiracClosureError
from algebroids.modular import modular_cocycle
from algebroids.scalar import BaseChart, ScalarField, parse_scalar
from algebroids.superalg import SuperPoly, parse_super

from genlib import (
    quasi_poisson_instances,
    rand_bivector,
    rand_lie,
    rand_poly,
    rand_super_homogeneous,
)

CH1 = BaseChart(("x1",))
CH2 = BaseChart(("x1", "x2"))
CH3 = BaseChart(("x1", "x2", "x3"))
CH4 = BaseChart(("x1", "x2", "x3", "x4"))


def tangent(chart):
    m = chart.m
    return SkewAlgebroid(chart, m, {}, {(a, a): 1 for a in range(1, m + 1)})


TM2 = tangent(CH2)
TM3 = tangent(CH3)
TM4 = tangent(CH4)
SO3 = SkewAlgebroid(CH1, 3, {(1, 2, 3): 1, (2, 3, 1): 1, (1, 3, 2): -1}, {})
AFF1 = SkewAlgebroid(CH1, 2, {(1, 2, 2): 1}, {})

SP2 = split_space(CH2, 2)
SP4 = split_space(CH4, 4)


def sp(space, text):
    return parse_super(text, space.table)


def x(chart, name):
    return ScalarField.coord(chart, name)


def mu_ham(A, space):
    return algebroid_hamiltonian(A, space)


def book_bivector():
    return Bivector(SP4, {(1, 2): 1, (3, 4): ScalarField.one(CH4) + x(CH4, "x1")})


def test_bivector_basics():
    P = Bivector(SP2, {(1, 2): x(CH2, "x1")})
    assert P.at(1, 2) == x(CH2, "x1")
    assert P.at(2, 1) == -x(CH2, "x1")
    assert P.at(1, 1).is_zero
    assert P.value == sp(SP2, "x1*xi1*xi2")
    assert (-P).value == -P.value
    one = ScalarField.one(CH2)
    zero = ScalarField.zero(CH2)
    assert P.sharp((one, zero)) == (zero, x(CH2, "x1"))
    assert P.pairing((one, zero), (zero, one)) == x(CH2, "x1")
    assert P.pairing((one, zero), (one, zero)).is_zero
    with pytest.raises(ValueError):
        Bivector(SP2, {(2, 1): 1})
    with pytest.raises(ValueError):
        Bivector(SP2, {(1, 3): 1})


def test_graph_frame_values():
    zero_frame = graph_frame(Bivector(SP2, {}))
    assert zero_frame.sections == (sp(SP2, "y1"), sp(SP2, "y2"))
    D = graph_frame(Bivector(SP2, {(1, 2): 1}))
    assert D.sections == (sp(SP2, "y1 + xi2"), sp(SP2, "y2 - xi1"))
    assert D.is_graph()
    assert D.bivector().entries == {(1, 2): ScalarField.one(CH2)}


def test_graph_frame_random_isotropy():
    rng = random.Random(701)
    for _ in range(8):
        chart = rng.choice([CH2, CH3])
        n = rng.randrange(2, 5)
        space = split_space(chart, n)
        P = rand_bivector(rng, space)
        D = graph_frame(P)
        for a in range(n):
            for b in range(a, n):
                assert poisson_bracket(D.sections[a], D.sections[b], space).is_zero


def test_frame_validation():
    y1 = sp(SP2, "y1")
    with pytest.raises(ValueError, match="frame members"):
        DiracFrame(SP2, (y1,))
    with pytest.raises(ValueError, match="degree 1"):
        DiracFrame(SP2, (y1, sp(SP2, "y1*y2")))
    with pytest.raises(ValueError, match="isotropic"):
        DiracFrame(SP2, (sp(SP2, "y1 + xi1"), sp(SP2, "y2")))
    with pytest.raises(ValueError, match="rank"):
        DiracFrame(SP2, (y1, sp(SP2, "x1*y1")))
    with pytest.raises(ValueError, match="table"):
        DiracFrame(SP2, (y1, parse_super("y2", TM2.table())))
    # the E-frame itself is isotropic and full rank
    D = DiracFrame(SP2, (sp(SP2, "xi1"), sp(SP2, "xi2")))
    assert not D.is_graph()
    with pytest.raises(ValueError, match="graph"):
        D.bivector()


def test_gauge_transform_values():
    P = Bivector(SP2, {(1, 2): x(CH2, "x1")})
    inert = sp(SP2, "x2*xi1*xi2 + xi1")
    assert gauge_transform(inert, P) == inert
    assert gauge_transform(sp(SP2, "y1"), P) == sp(SP2, "y1 - x1*xi2")
    assert gauge_transform(sp(SP2, "y2"), P) == sp(SP2, "y2 + x1*xi1")
    rng = random.Random(702)
    for _ in range(6):
        n = rng.randrange(2, 4)
        space = split_space(CH2, n)
        Q = rand_bivector(rng, space)
        D = graph_frame(Q)
        flows = tuple(
            gauge_transform(SuperPoly.generator(space.table, space.y_name(a)), -Q)
            for a in range(1, n + 1)
        )
        assert flows == D.sections


def test_gauge_transform_is_algebra_morphism():
    rng = random.Random(703)
    space = split_space(CH2, 2)
    for _ in range(6):
        P = rand_bivector(rng, space)
        F = rand_super_homogeneous(rng, space.table, rng.randrange(1, 3))
        G = rand_super_homogeneous(rng, space.table, rng.randrange(1, 3))
        assert gauge_transform(F * G, P) == gauge_transform(F, P) * gauge_transform(G, P)
        assert gauge_transform(F + G, P) == gauge_transform(F, P) + gauge_transform(G, P)


def test_gauge_transform_truncates_cubics():
    rng = random.Random(704)
    space = split_space(CH2, 2)
    P = rand_bivector(rng, space)
    H = mu_ham(TM2, space).value
    total = SuperPoly.zero(space.table)
    term = H
    weight = Fraction(1)
    for k in range(4):
        if k:
            term = poisson_bracket(P.value, term, space)
            weight = weight / k
        total = total + term * weight
    assert gauge_transform(H, P) == total


def test_sharp_substitution_book_value():
    P = book_bivector()
    mono = sp(SP4, "y1*y3*y4")
    g = ScalarField.one(CH4) + x(CH4, "x1")
    assert sharp_substitution(P, mono) == (g * g) * sp(SP4, "xi2*xi3*xi4")
    # substitution is an algebra morphism on the y generators
    assert sharp_substitution(P, sp(SP4, "y1")) == sp(SP4, "xi2")
    assert sharp_substitution(P, sp(SP4, "y2")) == -sp(SP4, "xi1")


def test_quasi_poisson_fixed_cases():
    for entry in ({(1, 2): 1}, {(1, 2): x(CH2, "x1")}):
        P = Bivector(SP2, entry)
        ok, obstruction = quasi_poisson_check(P, mu_ham(TM2, SP2))
        assert ok and obstruction.is_zero
    # the rational rank-4 bivector without its twist fails, with the
    # obstruction pinned by the multivector-bracket oracle
    P = book_bivector()
    ok, obstruction = quasi_poisson_check(P, mu_ham(TM4, SP4))
    assert not ok
    assert obstruction == sp(SP4, "xi2*xi3*xi4")


def test_quasi_poisson_catalog_instances():
    rng = random.Random(705)
    instances = quasi_poisson_instances(rng)
    assert len(instances) >= 10
    for A, P, H in instances:
        ok, obstruction = quasi_poisson_check(P, H)
        assert ok and obstruction.is_zero


def test_quasi_poisson_input_errors():
    P = Bivector(SP2, {(1, 2): 1})
    bad = Hamiltonian(SP2, sp(SP2, "xi1*xi2*y1"))
    with pytest.raises(ValueError, match="projectable"):
        quasi_poisson_check(P, bad)
    with pytest.raises(ValueError, match="different spaces"):
        quasi_poisson_check(P, mu_ham(TM4, SP4))


def test_obstruction_paths_on_random_data():
    # the internal cross-check is the assertion: restriction of the gauge
    # flow must match the multivector-bracket expression for any skew data
    rng = random.Random(706)
    for _ in range(10):
        n = rng.randrange(2, 4)
        space = split_space(CH2, n)
        A = rng.choice([rand_lie(rng, CH2), tangent(CH2) if n == 2 else rand_lie(rng, CH2)])
        if A.rank != n:
            A = SkewAlgebroid(CH2, n, {}, {(1, 1): rand_poly(rng, CH2, deg=1)})
        phi = rand_super_homogeneous(rng, A.table(), 3) if n >= 3 else SuperPoly.zero(A.table())
        from algebroids.superalg import transport

        H = Hamiltonian(space, mu_ham(A, space).value + transport(phi, space.table))
        P = rand_bivector(rng, space)
        quasi_poisson_check(P, H)


def test_solve_twist():
    P = book_bivector()
    phi = solve_twist(P, TM4)
    g = ScalarField.one(CH4) + x(CH4, "x1")
    expected = (ScalarField.one(CH4) / (g * g)) * sp(SP4, "y1*y3*y4")
    assert phi == expected
    # rank 2 has no room for a cubic: the zero form works
    assert solve_twist(Bivector(SP2, {(1, 2): x(CH2, "x1")}), TM2).is_zero
    # degenerate sharp map with a nonzero bracket square: no solution
    sp3 = split_space(CH3, 3)
    bad = Bivector(sp3, {(1, 2): x(CH3, "x1"), (1, 3): 1})
    assert solve_twist(bad, TM3) is None
    ok, obstruction = quasi_poisson_check(bad, mu_ham(TM3, sp3))
    assert not ok and not obstruction.is_zero


def test_twisted_hamiltonian_koszul_frozen():
    P = Bivector(SP2, {(1, 2): x(CH2, "x1")})
    tw = twisted_hamiltonian(P, mu_ham(TM2, SP2))
    assert tw.value == sp(SP2, "x1*xi2*p1 - x1*xi1*p2 - xi1*xi2*y1")
    assert tw.algebroid.c == {(1, 2, 1): ScalarField.one(CH2)}
    assert tw.algebroid.rho == {(1, 2): x(CH2, "x1"), (2, 1): -x(CH2, "x1")}
    assert tw.algebroid.is_lie()


def test_twisted_hamiltonian_zero_bivector():
    space = split_space(CH1, 3)
    P = Bivector(space, {})
    tw = twisted_hamiltonian(P, mu_ham(SO3, space))
    assert tw.value.is_zero
    assert tw.algebroid.c == {} and tw.algebroid.rho == {}


def test_twisted_hamiltonian_instances_are_lie():
    rng = random.Random(707)
    for A, P, H in quasi_poisson_instances(rng):
        tw = twisted_hamiltonian(P, H)
        assert tw.algebroid.is_lie()


def test_twisted_hamiltonian_precondition():
    with pytest.raises(ValueError, match="obstruction"):
        twisted_hamiltonian(book_bivector(), mu_ham(TM4, SP4))


def test_twisted_bracket_koszul_frozen():
    P = Bivector(SP2, {(1, 2): x(CH2, "x1")})
    H = mu_ham(TM2, SP2)
    table = TM2.table()
    e1 = parse_super("y1", table)
    e2 = parse_super("y2", table)
    assert twisted_bracket(P, H, e1, e2) == e1
    assert twisted_bracket(P, H, e2, e1) == -e1
    assert twisted_bracket(P, H, e1, e1).is_zero
    # tuple input encodes the same covectors
    one = ScalarField.one(CH2)
    zero = ScalarField.zero(CH2)
    assert twisted_bracket(P, H, (one, zero), (zero, one)) == e1


def test_twisted_bracket_zero_bivector():
    space = split_space(CH1, 3)
    P = Bivector(space, {})
    H = mu_ham(SO3, space)
    table = SO3.table()
    for i in ("y1", "y2", "y3"):
        for j in ("y1", "y2", "y3"):
            assert twisted_bracket(P, H, parse_super(i, table), parse_super(j, table)).is_zero


def test_twisted_bracket_instances():
    rng = random.Random(708)
    for A, P, H in quasi_poisson_instances(rng):
        table = A.table()
        names = table.odd
        i, j = rng.randrange(A.rank), rng.randrange(A.rank)
        a = parse_super(names[i], table)
        b = parse_super(names[j], table)
        lhs = twisted_bracket(P, H, a, b)
        rhs = twisted_bracket(P, H, b, a)
        assert lhs == -rhs
    P = Bivector(SP2, {(1, 2): 1})
    with pytest.raises(ValueError, match="degree 1"):
        twisted_bracket(P, mu_ham(TM2, SP2), parse_super("y1*y2", TM2.table()), parse_super("y1", TM2.table()))


def test_induced_algebroid_e_frame():
    rng = random.Random(709)
    pool = [SO3, AFF1, TM2, rand_lie(rng, CH2)]
    for A in pool:
        space = split_space(A.chart, A.rank)
        frame = DiracFrame(
            space,
            tuple(
                SuperPoly.generator(space.table, space.xi_name(i))
                for i in range(1, A.rank + 1)
            ),
        )
        ind = induced_algebroid(frame, mu_ham(A, space))
        assert ind.c == A.c
        assert ind.rho == A.rho


def test_induced_graph_matches_twisted():
    rng = random.Random(710)
    for A, P, H in quasi_poisson_instances(rng):
        ind = induced_algebroid(graph_frame(P), H)
        tw = twisted_hamiltonian(P, H)
        assert ind.c == tw.algebroid.c
        assert ind.rho == tw.algebroid.rho
        assert ind.is_lie()


def test_induced_closure_failure():
    P = book_bivector()
    D = graph_frame(P)
    with pytest.raises(DiracClosureError) as err:
        induced_algebroid(D, mu_ham(TM4, SP4))
    assert err.value.pair in {(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}
    assert not err.value.residual.is_zero


def test_relative_modular_e_frame_is_zero():
    rng = random.Random(711)
    for A in [SO3, AFF1, rand_lie(rng, CH2)]:
        space = split_space(A.chart, A.rank)
        frame = DiracFrame(
            space,
            tuple(
                SuperPoly.generator(space.table, space.xi_name(i))
                for i in range(1, A.rank + 1)
            ),
        )
        rel = relative_modular_class(frame, mu_ham(A, space))
        assert rel.is_zero


def test_relative_modular_koszul_frozen():
    # cotangent-side class of the rank-2 linear bivector is twice the
    # divergence class of its sharp image; the base class vanishes
    P = Bivector(SP2, {(1, 2): x(CH2, "x1")})
    rel = relative_modular_class(graph_frame(P), mu_ham(TM2, SP2))
    assert rel.value == parse_super("-2*y2", rel.algebroid.table())


def test_relative_modular_constant_symplectic_zero():
    P = Bivector(SP2, {(1, 2): 1})
    rel = relative_modular_class(graph_frame(P), mu_ham(TM2, SP2))
    assert rel.is_zero


def test_relative_modular_affine_cancellation():
    # both summands are nonzero but cancel: the twisted class is -x1*y2
    # while the pulled-back base class contributes +x1*y2
    space = split_space(CH1, 2)
    P = Bivector(space, {(1, 2): x(CH1, "x1")})
    H = mu_ham(AFF1, space)
    tw = twisted_hamiltonian(P, H)
    assert not modular_cocycle(tw.algebroid).is_zero
    assert not modular_cocycle(AFF1).is_zero
    rel = relative_modular_class(graph_frame(P), H)
    assert rel.is_zero


def test_relative_modular_instances():
    rng = random.Random(712)
    for A, P, H in quasi_poisson_instances(rng):
        rel = relative_modular_class(graph_frame(P), H)
        assert rel.algebroid.c == twisted_hamiltonian(P, H).algebroid.c


def test_verify_cor53():
    cases = [
        (Bivector(split_space(CH1, 3), {}), mu_ham(SO3, split_space(CH1, 3))),
        (Bivector(SP2, {(1, 2): x(CH2, "x1")}), mu_ham(TM2, SP2)),
        (Bivector(SP2, {(1, 2): 1}), mu_ham(TM2, SP2)),
    ]
    for P, H in cases:
        ok, certificate = verify_morphism_cor53(P, H)
        assert ok and certificate is None
    rng = random.Random(713)
    for A, P, H in quasi_poisson_instances(rng):
        ok, certificate = verify_morphism_cor53(P, H)
        assert ok and certificate is None


def test_bfield_frame_induces_base_structure():
    # graph of a closed 2-form over E: closes, projects isomorphically,
    # and carries a vanishing relative class
    D = DiracFrame(SP2, (sp(SP2, "xi1 + x1*y2"), sp(SP2, "xi2 - x1*y1")))
    H = mu_ham(TM2, SP2)
    ind = induced_algebroid(D, H)
    assert ind.c == {}
    assert ind.rho == TM2.rho
    rel = relative_modular_class(D, H)
    assert rel.is_zero
