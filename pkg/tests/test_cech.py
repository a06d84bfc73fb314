import random
from functools import lru_cache

import pytest

from dgnerve.amod import (affine_line, line_bundle_sheaf, locally_free_resolution, projective_space,
                          skyscraper_sheaf)
from dgnerve.cech import (TotalComplex, build_h, build_L, ext_dims, full_total_D, replacement, totals_equal,
                          tw_lift, whitney_element, whitney_integrate, _under)
from dgnerve.dgmod import DegreeBox
from dgnerve.oracle import cech_oracle

P1 = projective_space(1)
P2 = projective_space(2)
A1 = affine_line()

SHEAVES = {
    "O_P1": lambda: line_bundle_sheaf(P1, [0]),
    "O2_P1": lambda: line_bundle_sheaf(P1, [2]),
    "Om1_P1": lambda: line_bundle_sheaf(P1, [-1]),
    "O+O2_P1": lambda: line_bundle_sheaf(P1, [0, 2]),
    "pt_A1": lambda: skyscraper_sheaf(A1),
    "pt_P1": lambda: skyscraper_sheaf(P1),
}


@lru_cache(maxsize=None)
def system(name, kind):
    sh = SHEAVES[name]()
    if kind == "L":
        return build_L(replacement(sh))
    return build_h(locally_free_resolution(sh))


def weights(V):
    return DegreeBox.cube(V.rank, 1).points()


def level_elements(V, n, weight, limit=6):
    out = []
    for t in V.tuples(n, strict=False):
        sp = V.space(_under(t), weight)
        for p in sp.degrees:
            for b in sp.basis(p):
                out.append({t: b})
    return out[:limit]


def same(a, b):
    return totals_equal({0: a}, {0: b})


@pytest.mark.parametrize("name", ["O+O2_P1", "pt_P1", "pt_A1"])
@pytest.mark.parametrize("kind", ["L", "h"])
def test_coface_identities(name, kind):
    V = system(name, kind)
    for w in weights(V):
        for n in (1, 2):
            for x in level_elements(V, n - 1, w):
                for j in range(n + 1):
                    for i in range(j):
                        left = V.coface(j, V.coface(i, x, n, strict=False), n + 1, strict=False)
                        right = V.coface(i, V.coface(j - 1, x, n, strict=False), n + 1, strict=False)
                        assert same(left, right), (n, i, j)


@pytest.mark.parametrize("name", sorted(SHEAVES))
@pytest.mark.parametrize("kind", ["L", "h"])
def test_total_differential_squares_to_zero(name, kind):
    V = system(name, kind)
    for w in weights(V):
        assert TotalComplex(V, w).square_zero()
        assert TotalComplex(V, w, level_cap=2, strict=False).square_zero()


@pytest.mark.parametrize("name", sorted(SHEAVES))
def test_no_negative_cohomology(name):
    V = system(name, "L")
    for w in DegreeBox.cube(V.rank, 2).points():
        assert all(p >= 0 for p in TotalComplex(V, w).cohomology())


@pytest.mark.parametrize("name", ["O_P1", "O2_P1", "Om1_P1", "O+O2_P1"])
def test_three_models_match_oracle(name):
    sh = SHEAVES[name]()
    box = DegreeBox.cube(1, 1)
    expected, conv = cech_oracle(sh, box)
    assert conv
    for model in ("end_of_Q", "C_of_L", "C_of_h"):
        table, _, ok = ext_dims(sh, model, box)
        assert ok and table == expected, model


def test_skyscraper_models_agree():
    sh = SHEAVES["pt_A1"]()
    tables = {m: ext_dims(sh, m, DegreeBox.cube(1, 1))[0] for m in ("end_of_Q", "C_of_L", "C_of_h")}
    assert all(t == {0: 1, 1: 1} for t in tables.values())


# --- Thom-Whitney ------------------------------------------------------------

def scalar(kind):
    if kind == "psi":
        return lambda P: P.psi()
    if kind == "dpsi":
        return lambda P: P.d(P.psi())
    return None


def random_tw(V, weight, cap, rng, terms=2, total=None):
    """A random homogeneous sum of Whitney elements of total degree `total`."""
    total = rng.randint(-1, 2) if total is None else total
    x = None
    for _ in range(terms):
        k = rng.randint(0, cap)
        kind = rng.choice(["none", "psi", "dpsi"])
        s = rng.choice(V.tuples(k, strict=False))
        p = total - k - (1 if kind == "dpsi" else 0)
        basis = V.space(_under(s), weight).basis(p)
        if not basis:
            continue
        v = rng.choice(basis).scale(rng.randint(1, 3))
        e = whitney_element(V, k, s, v, weight, cap, scalar(kind))
        x = e if x is None else x + e
    return x


def test_thom_whitney_samples():
    rng = random.Random(7)
    V = system("O+O2_P1", "L")
    cap = 2  # cover size
    count = 0
    for weight in [(0,), (1,), (2,)]:
        while count < 35 * (1 + [(0,), (1,), (2,)].index(weight)):
            x = random_tw(V, weight, cap, rng)
            if x is None:
                continue
            assert x.poly_degree() <= 3
            assert x.compatibility_defects() == []
            assert x.d().compatibility_defects() == []
            # integration is a chain map to the full total complex
            assert totals_equal(whitney_integrate(x.d()), full_total_D(V, whitney_integrate(x), cap))
            count += 1
    assert count >= 100


def test_integration_of_lift_is_inclusion():
    V = system("O+O2_P1", "L")
    from dgnerve.homcx import end_dgla
    E = end_dgla(V.Q)
    for w in [(0,), (1,)]:
        for p in E.space(w).degrees:
            for f in E.basis(p, w):
                lifted = tw_lift(V, f, w, 2)
                assert lifted.compatibility_defects() == []
                assert totals_equal(whitney_integrate(lifted), {0: V.include(f)})


def test_bracket_is_graded_symmetric_and_compatible():
    rng = random.Random(11)
    V = system("pt_A1", "L")
    checked = 0
    for _ in range(40):
        a, b = rng.randint(-1, 2), rng.randint(-1, 2)
        x = random_tw(V, (0,), 1, rng, terms=1, total=a)
        y = random_tw(V, (1,), 1, rng, terms=1, total=b)
        if x is None or y is None:
            continue
        xy, yx = x.bracket(y), y.bracket(x)
        assert xy.compatibility_defects() == []
        sign = -1 if (a * b) % 2 else 1
        assert (xy + yx.scale(sign)).is_zero()
        checked += 1
    assert checked >= 5
