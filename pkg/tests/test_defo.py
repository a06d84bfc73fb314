import random
from fractions import Fraction
from functools import lru_cache

import pytest

from dgnerve.amod import affine_line, line_bundle_sheaf, projective_space, skyscraper_sheaf
from dgnerve.cech import build_L, replacement
from dgnerve.dgmod import DegreeBox
from dgnerve.defo import (GlobalView, H1Datum, H1Functor, _identity, _op_compose, _op_exp, basis_tensors,
                          bch, deform, end_tangent, gauge_act, gauge_conjugate, gauge_formula, h1_tangent,
                          mc_check, mc_operator_check, t_add, t_clean, t_d, t_is_zero, t_scale,
                          tangent_and_classes)
from dgnerve.homcx import end_dgla
from dgnerve.rings import dual_numbers, truncated_poly

P1 = projective_space(1)
A1 = affine_line()


@lru_cache(maxsize=None)
def end_view(name):
    sh = {"O+O2": line_bundle_sheaf(P1, [0, 2]), "pt": skyscraper_sheaf(A1),
          "O": line_bundle_sheaf(P1, [0])}[name]
    Q = replacement(sh)
    return Q, GlobalView(end_dgla(Q))


def random_elem(g, A, degree, weights, rng):
    x = {}
    for u in basis_tensors(g, degree, weights):
        for k in range(1, A.dim):
            c = rng.randint(-2, 2)
            if c:
                x = t_add(x, {(k, w, key): f for (_, w, key), f in u.items()}, c)
    return t_clean(x)


def eq(x, y):
    return t_is_zero(t_add(x, y, -1))


def op_log(g, A, z):
    one = _identity(g, A)
    Z = t_add(z, one, -1)
    out, p = {}, dict(one)
    for k in range(1, A.nu + 1):
        p = _op_compose(g, A, Z, p)
        out = t_add(out, p, Fraction((-1) ** (k + 1), k))
    return t_clean(out)


WEIGHTS = [(0,), (1,), (-1,), (2,)]


def test_bch_low_orders():
    _, g = end_view("O+O2")
    rng = random.Random(1)
    A2 = dual_numbers()
    x, y = random_elem(g, A2, 0, WEIGHTS, rng), random_elem(g, A2, 0, WEIGHTS, rng)
    assert eq(bch(g, A2, x, y), t_add(x, y))
    A3 = truncated_poly(3)
    x, y = random_elem(g, A3, 0, WEIGHTS, rng), random_elem(g, A3, 0, WEIGHTS, rng)
    from dgnerve.defo import t_bracket
    expect = t_add(t_add(x, y), t_bracket(g, A3, x, y), Fraction(1, 2))
    assert eq(bch(g, A3, x, y), expect)
    assert eq(bch(g, A3, x, {}), x)
    assert eq(bch(g, A3, {}, y), y)


def test_bch_is_log_of_product():
    _, g = end_view("O+O2")
    A = truncated_poly(4)
    rng = random.Random(2)
    x, y = random_elem(g, A, 0, WEIGHTS, rng), random_elem(g, A, 0, WEIGHTS, rng)
    prod = _op_compose(g, A, _op_exp(g, A, x), _op_exp(g, A, y))
    assert eq(bch(g, A, x, y), op_log(g, A, prod))


@pytest.mark.parametrize("name", ["O+O2", "pt"])
def test_gauge_formula_matches_conjugation(name):
    _, g = end_view(name)
    A = truncated_poly(3)
    rng = random.Random(3)
    for _ in range(3):
        a = random_elem(g, A, 0, WEIGHTS, rng)
        l = random_elem(g, A, 1, WEIGHTS, rng)
        assert eq(gauge_formula(g, A, a, l), gauge_conjugate(g, A, a, l))
    assert eq(gauge_act(g, A, {}, l), l)


def test_gauge_first_order():
    _, g = end_view("O+O2")
    A = dual_numbers()
    a = random_elem(g, A, 0, WEIGHTS, random.Random(4))
    l = random_elem(g, A, 1, WEIGHTS, random.Random(5))
    assert eq(gauge_formula(g, A, a, l), t_add(l, t_d(g, a), -1))


def test_gauge_group_law():
    _, g = end_view("O+O2")
    rng = random.Random(6)
    for nu in (2, 3):
        A = truncated_poly(nu)
        a, b = random_elem(g, A, 0, WEIGHTS, rng), random_elem(g, A, 0, WEIGHTS, rng)
        l = random_elem(g, A, 1, WEIGHTS, rng)
        left = gauge_formula(g, A, a, gauge_formula(g, A, b, l))
        right = gauge_formula(g, A, bch(g, A, a, b), l)
        assert eq(left, right)


def test_gauge_preserves_mc():
    _, g = end_view("pt")
    A = truncated_poly(3)
    rng = random.Random(8)
    for _ in range(4):
        a = random_elem(g, A, 0, [(0,), (1,), (-1,)], rng)
        assert mc_check(g, A, gauge_act(g, A, a, {})).status == "yes"


def skyscraper_eta():
    Q, g = end_view("pt")
    (e,) = g.E.space((-1,)).basis(1)
    return Q, g, {(1, (-1,), ()): e.scale(-1)}


def test_skyscraper_deformation():
    Q, g, eta = skyscraper_eta()
    A = truncated_poly(2)
    assert mc_check(g, A, eta).status == "yes"
    assert mc_operator_check(g, A, eta)
    (alpha,) = list(Q.values)
    dc = deform(Q, A, eta)[alpha]
    # d + eta on the degree -1 generator: u * p0 - t * p0
    terms = dc.terms[-1]
    assert terms[(0, (0,))].cols == [{0: 1}]
    assert terms[(1, (-1,))].cols == [{0: -1}]
    assert dc.rank_over_A() == 2


def test_zero_is_trivial_deformation():
    Q, g = end_view("O+O2")
    A = dual_numbers()
    assert mc_check(g, A, {}).status == "yes"
    out = deform(Q, A, {})
    assert all(set(dc.terms.get(i, {})) <= {(0, (0,))} for dc in out.values() for i in dc.terms)


def test_non_mc_rejected():
    # on P^2, Q_X has length three and End^1 has non-closed elements
    Q = replacement(line_bundle_sheaf(projective_space(2), [0]))
    g = GlobalView(end_dgla(Q))
    A = dual_numbers()
    f = g.E.space((0, 0)).basis(1)[0]
    assert not g.d(f).is_zero()
    bad = {(1, (0, 0), ()): f}
    assert mc_check(g, A, bad).status == "no"
    with pytest.raises(ValueError):
        deform(Q, A, bad)


@pytest.mark.parametrize("name,dim", [("O", 0), ("O+O2", 1), ("pt", 1)])
def test_tangent_dimensions(name, dim):
    Q, _ = end_view(name)
    d, _, conv = end_tangent(Q, DegreeBox.cube(1, 2))
    assert conv and d == dim
    assert tangent_and_classes(Q, DegreeBox.cube(1, 2))["dim"] == dim
    with pytest.raises(ValueError):
        tangent_and_classes(Q, DegreeBox.cube(1, 1), mode="enumerate")


@pytest.mark.parametrize("name,dim", [("O", 0), ("O+O2", 1), ("pt", 1)])
def test_h1_tangent_matches_total_complex(name, dim):
    Q, _ = end_view(name)
    V = build_L(Q)
    d, _, conv = h1_tangent(V, DegreeBox.cube(1, 2))
    assert conv and d == dim


@lru_cache(maxsize=None)
def h1_setup():
    Q, _ = end_view("O+O2")
    V = build_L(Q)
    A = truncated_poly(3)
    return V, A, H1Functor(V, A, [(0,), (1,), (-1,)])


def test_zero_datum_and_self_equivalence():
    V, A, H = h1_setup()
    assert H.z1_check(H1Datum({}, {})).status == "yes"
    l1, m1 = H.transform({}, {}, {}, {})
    assert l1 == {} and m1 == {}


def test_gauge_transformed_datum_is_cocycle_and_equivalent():
    V, A, H = h1_setup()
    rng = random.Random(9)
    a = random_elem(H.g[0], A, 0, [(0,), (1,)], rng)
    b = random_elem(H.g[1], A, -1, [(0,), (1,)], rng)
    l1, m1 = H.transform({}, {}, a, b)
    assert l1 or m1
    assert H.z1_check(H1Datum(l1, m1)).status == "yes"
    found = H.h1_equiv(H1Datum({}, {}), H1Datum(l1, m1))
    assert found.status == "yes"
    r1, r2 = H.equiv_residual(H1Datum({}, {}), H1Datum(l1, m1), found.data["a"], found.data["b"])
    assert not r1 and not r2


def test_broken_datum_rejected():
    V, A, H = h1_setup()
    rng = random.Random(10)
    a = random_elem(H.g[0], A, 0, [(0,)], rng)
    l1, m1 = H.transform({}, {}, a, {})
    extra = random_elem(H.g[1], A, 0, [(0,)], rng)
    assert H.z1_check(H1Datum(l1, t_add(m1, extra))).status == "no"


def test_linearized_equations_are_total_cocycle_condition():
    from dgnerve.cech import TotalComplex, totals_equal
    Q, _ = end_view("O+O2")
    V = build_L(Q)
    A = dual_numbers()
    H = H1Functor(V, A, [(1,)])
    rng = random.Random(12)
    w = (1,)
    for _ in range(5):
        l = random_elem(H.g[0], A, 1, [w], rng)
        m = random_elem(H.g[1], A, 0, [w], rng)
        n = random_elem(H.g[2], A, -1, [w], rng)

        def level(x):
            return {key: f for (_, _, key), f in x.items()}

        D = TotalComplex(V, w).D({0: level(l), 1: level(m), 2: level(t_scale(n, -1))})
        assert totals_equal({0: level(H.eq1(l))}, {0: D.get(0, {})})
        assert totals_equal({1: level(t_scale(H.eq2(l, m), -1))}, {1: D.get(1, {})})
        assert totals_equal({2: level(H.eq3(l, m, n))}, {2: D.get(2, {})})
