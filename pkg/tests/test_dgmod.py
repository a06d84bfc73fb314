import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dgnerve.dgmod import (DegreeBox, GMap, GradedDGModule, GradedModule, ChainMap, cone,
                           cocone, base_change, cohomology_dims, direct_sum, free_module,
                           graded_piece, identity_chain, identity_map, is_quasi_iso,
                           poset_colimit, shift, free_certificate, left_inverse,
                           BoxOverflow)
from dgnerve.linalg import rank
from dgnerve.rings import chart_ring

KU = chart_ring([[1]])
KUI = chart_ring([[-1]])
LAU = chart_ring([[1], [-1]])


def single(M):
    return GradedDGModule(M.ring, {0: M})


def koszul(ring=KU):
    F1, F0 = free_module(ring, [(1,)]), free_module(ring, [(0,)])
    return GradedDGModule(ring, {-1: F1, 0: F0}, {-1: GMap(F1, F0, [{0: 1}])})


def point_module(ring=KU):
    return GradedModule(ring, [(0,)], [((1,), {0: 1})])


def test_pieces():
    assert graded_piece(single(free_module(KU, [(0,)])), (3,)).dims == {0: 1}
    o2 = free_module(KUI, [(2,)])
    assert o2.piece_dim((3,)) == 0 and o2.piece_dim((1,)) == 1
    q = point_module()
    assert q.piece_dim((0,)) == 1 and q.piece_dim((1,)) == 0


def test_box_overflow():
    with pytest.raises(BoxOverflow):
        graded_piece(koszul(), (9,), DegreeBox((-2,), (2,)))


def test_cohomology_examples():
    F = free_module(KU, [(0,)])
    G = free_module(KU, [(0,)])
    idc = GradedDGModule(KU, {-1: F, 0: G}, {-1: GMap(F, G, [{0: 1}])})
    assert cohomology_dims(idc, DegreeBox((-3,), (3,))) == {}
    assert cohomology_dims(koszul(), DegreeBox((-3,), (3,))) == {(0, (0,)): 1}


def test_simplicial_complex_over_laurent():
    from dgnerve.nerve import chain_complex
    c = chain_complex((0, 1, 2))
    terms = {-r: free_module(LAU, [(0,)] * c.rank(r)) for r in range(3)}
    diff = {}
    for r in range(1, 3):
        mat = c.boundary[r]
        cols = [{i: mat[i][j] for i in range(len(mat)) if mat[i][j]} for j in range(c.rank(r))]
        diff[-r] = GMap(terms[-r], terms[-r + 1], cols)
    M = GradedDGModule(LAU, terms, diff)
    dims = cohomology_dims(M, DegreeBox((-3,), (3,)))
    assert dims == {(0, (m,)): 1 for m in range(-3, 4)}


def test_base_change():
    F = single(free_module(KU, [(0,)]))
    assert base_change(F, LAU).piece((-4,)).dims == {0: 1}
    Q = single(point_module())
    bc = base_change(Q, LAU)
    assert all(bc.piece((m,)).dims.get(0, 0) == 0 for m in range(-3, 4))
    S, _, _ = direct_sum([Q, F])
    bs = base_change(S, LAU)
    for m in range(-3, 4):
        assert bs.piece((m,)).dims.get(0, 0) == base_change(F, LAU).piece((m,)).dims.get(0, 0)


def test_cone_examples():
    K = koszul()
    box = DegreeBox((-3,), (4,))
    assert cohomology_dims(cone(identity_chain(K)), box) == {}
    zero = GradedDGModule(KU, {})
    c0 = cone(ChainMap(zero, K, {}))
    assert cohomology_dims(c0, box) == cohomology_dims(K, box)
    F0, F1 = free_module(KU, [(0,)]), free_module(KU, [(1,)])
    mu = ChainMap(single(F1), single(F0), {0: GMap(F1, F0, [{0: 1}])})
    assert cohomology_dims(cone(mu), box) == {(0, (0,)): 1}
    assert cohomology_dims(cocone(mu), box) == {(1, (0,)): 1}


def test_cone_rejects_non_chain_map():
    K = koszul()
    F0 = K.term(0)
    bad = ChainMap(K, K, {0: identity_map(F0)})
    with pytest.raises(ValueError):
        cone(bad)


def test_quasi_iso_verdicts():
    K = koszul()
    box = DegreeBox((-2,), (2,))
    assert is_quasi_iso(identity_chain(K), box).status == "yes"
    C = cone(identity_chain(K))
    zero = GradedDGModule(KU, {})
    assert is_quasi_iso(ChainMap(zero, C, {}), box).status == "yes"
    F0, F1 = free_module(KU, [(0,)]), free_module(KU, [(1,)])
    inc = ChainMap(single(F1), single(F0), {0: GMap(F1, F0, [{0: 1}])})
    v = is_quasi_iso(inc, box)
    assert v.status == "no" and v.witness == (0,)


def test_colimits():
    M, N = single(free_module(KU, [(0,)])), single(point_module())
    C, univ = poset_colimit(["a", "b"], {"a": M, "b": N}, {}, KU)
    S, _, _ = direct_sum([M, N])
    for m in range(-2, 4):
        assert C.piece((m,)).dims == S.piece((m,)).dims
    # connected poset a < c > b with identities: colimit is the value
    idm = identity_chain(M)
    C2, _ = poset_colimit(["a", "b", "c"], {"a": M, "b": M, "c": M},
                          {("a", "c"): idm, ("b", "c"): idm}, KU)
    for m in range(-2, 4):
        assert C2.piece((m,)).dims == M.piece((m,)).dims
    # poset with a maximum: colimit equals value at the maximum
    Q = koszul()
    C3, _ = poset_colimit(["a", "top"], {"a": Q, "top": Q}, {("a", "top"): identity_chain(Q)}, KU)
    for m in range(-2, 4):
        assert C3.piece((m,)).cohomology() == Q.piece((m,)).cohomology()


def test_free_certificate_and_left_inverse():
    # K[u]e0 + K[u]e1 / (e1 - u e0) is free on e0
    M = GradedModule(KU, [(0,), (1,)], [((1,), {1: 1, 0: -1})])
    T, F, j, s = free_certificate(M)
    assert T == [0]
    assert free_certificate(point_module()) is None
    F0, F1 = free_module(KU, [(0,)]), free_module(KU, [(1,)])
    assert left_inverse(GMap(F1, F0, [{0: 1}])) is None
    A, B = free_module(KU, [(0,)]), free_module(KU, [(0,), (2,)])
    r = left_inverse(GMap(A, B, [{0: 1, 1: 0}]))
    assert r is not None and r.compose(GMap(A, B, [{0: 1}])).cols == [{0: 1}]


# random presented modules and maps over K[u, v]
KUV = chart_ring([[1, 0], [0, 1]])


def random_module(rng, ngens, nrels):
    degs = [(rng.randint(0, 2), rng.randint(0, 2)) for _ in range(ngens)]
    rels = []
    for _ in range(nrels):
        d = (rng.randint(1, 3), rng.randint(1, 3))
        co = {g: Fraction(rng.randint(-2, 2)) for g in range(ngens) if KUV.contains((d[0] - degs[g][0], d[1] - degs[g][1]))}
        rels.append((d, co))
    return GradedModule(KUV, degs, rels)


def random_map(rng, M, N):
    cols = []
    for a in M.degrees:
        cols.append({h: Fraction(rng.randint(-2, 2)) for h, b in enumerate(N.degrees)
                     if KUV.contains((a[0] - b[0], a[1] - b[1]))})
    return GMap(M, N, cols)


BOX2 = DegreeBox((0, 0), (4, 4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_piece_rank_nullity_and_cone_euler(seed):
    rng = random.Random(seed)
    F = free_module(KUV, [(rng.randint(0, 2), rng.randint(0, 2)) for _ in range(3)])
    N = random_module(rng, 3, 2)
    f = random_map(rng, F, N)
    phi = ChainMap(single(F), single(N), {0: f})
    C = cone(phi)
    for m in BOX2.points():
        pc = C.piece(m)
        assert pc.square_zero()
        mat = f.piece_matrix(m)
        r = rank(mat, len(mat[0])) if mat and mat[0] else 0
        n = F.piece_dim(m)
        ker = n - r
        assert ker + r == n
        chi = lambda P: sum((-1) ** i * d for i, d in P.piece(m).dims.items())
        assert chi(C) == chi(single(N)) - chi(single(F))
        h = pc.cohomology()
        assert h.get(0, 0) == N.piece_dim(m) - r
        assert h.get(-1, 0) == ker


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_base_change_matches_localization(seed):
    # invert u: pieces of the base change equal the stable image of
    # multiplication by a high power of u on pieces of the original module
    rng = random.Random(seed)
    M = random_module(rng, 3, 3)
    loc = chart_ring([[1, 0], [-1, 0], [0, 1]])
    B = base_change(single(M), loc)
    for m in DegreeBox((-2, 0), (2, 3)).points():
        k = 8
        src = (m[0] + k, m[1])
        tgt = (m[0] + 2 * k, m[1])
        sp, tp = M.piece(src), M.piece(tgt)
        cols = [tp.project(sp.lift_unit(i)) for i in range(sp.dim)]
        mat = [[c[i] for c in cols] for i in range(tp.dim)]
        r = rank(mat, sp.dim) if mat and sp.dim else 0
        assert B.piece(m).dims.get(0, 0) == r


def test_identity_base_change_and_shift():
    K = koszul()
    bc = base_change(K, KU)
    sh = shift(shift(K, 1), -1)
    for m in range(-2, 4):
        assert bc.piece((m,)).dims == K.piece((m,)).dims
        assert sh.piece((m,)).cohomology() == K.piece((m,)).cohomology()
    assert shift(K, 1).piece((0,)).cohomology() == {-1: 1}
