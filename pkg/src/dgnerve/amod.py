"""Modules over the diagram of chart rings indexed by the nerve.

Structure maps are stored in adjoint form: for alpha < beta the map
F_alpha (x) A_beta -> F_beta, kept as coefficient data on the generators of
F_alpha.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .dgmod import (ChainMap, GMap, GradedDGModule, GradedModule, MapUnknowns, Verdict,
                    base_change, free_certificate, free_module,
                    identity_chain, is_quasi_iso, left_inverse, ordered_points,
                    poset_colimit)
from .linalg import Echelon, ONE, ZERO, nullspace, solve
from .nerve import CoverDescription, build_nerve, chain_complex, strict_subfaces
from .rings import chart_ring, ring_sum, vadd, vsub


class CocycleError(ValueError):
    pass


class ReplacementError(RuntimeError):
    pass


class AModule:
    """Values F_alpha over A_alpha and structure maps F_alpha -> F_beta."""

    def __init__(self, nerve, rings, values, maps, check=True):
        self.nerve = nerve
        self.rings = rings
        self.values = values
        self.maps = maps
        if check:
            self.check()

    def value(self, alpha):
        return self.values[tuple(alpha)]

    def map(self, alpha, beta):
        if alpha == beta:
            return identity_chain(self.values[alpha])
        return self.maps[(alpha, beta)]

    def simplices(self):
        return [s for s in self.nerve if s in self.values]

    def check(self):
        for (a, b), f in self.maps.items():
            if not f.is_chain_map():
                raise CocycleError(f"structure map {a} -> {b} is not a chain map")
        if not self.cocycle_holds():
            raise CocycleError("structure maps violate the cocycle condition")

    def cocycle_holds(self):
        sims = self.simplices()
        for a in sims:
            for b in sims:
                if not (len(a) < len(b) and set(a) <= set(b)):
                    continue
                for c in sims:
                    if len(b) < len(c) and set(b) <= set(c):
                        if not self.maps[(b, c)].compose(self.maps[(a, b)]).equals(self.maps[(a, c)]):
                            return False
        return True

    def degrees(self):
        return sorted({i for F in self.values.values() for i in F.degrees()})

    def is_pointwise_free(self):
        return all(F.is_free() for F in self.values.values())

    def __repr__(self):
        return "AModule(" + "; ".join(f"{a}:{self.values[a]!r}" for a in self.simplices()) + ")"


class AModuleMap:
    """comps[alpha]: src_alpha -> tgt_alpha of fixed degree and weight."""

    def __init__(self, src, tgt, comps, degree=0, weight=None):
        self.src, self.tgt, self.comps = src, tgt, comps
        self.degree = degree
        self.weight = tuple(weight) if weight is not None else (0,) * next(iter(src.rings.values())).rank

    def commutes(self):
        for (a, b), f in self.src.maps.items():
            g = self.tgt.maps[(a, b)]
            if not g.compose(self.comps[a]).equals(self.comps[b].compose(f)):
                return False
        return True

    def is_morphism(self):
        return self.commutes() and all(c.is_chain_map() for c in self.comps.values())

    def surjective(self):
        return all(c.surjective() for c in self.comps.values())


def _chain_from_cols(src, tgt, colmap, degree=0, weight=None):
    comps = {i: GMap(src.term(i), tgt.term(i + degree), cols, weight, check=False)
             for i, cols in colmap.items() if i in src.terms}
    return ChainMap(src, tgt, comps, degree, weight)


# --- schemes ---------------------------------------------------------------

@dataclass
class Scheme:
    """A toric cover: the nerve plus the monomial ring of every simplex."""

    name: str
    nerve: object
    rings: dict

    @property
    def rank(self):
        return self.rings[self.nerve.simplices[0]].rank


def custom_scheme(name, charts, intersections=None, names=None):
    """Charts given by monoid generators; intersections take monoid sums."""
    names = names or [f"U{i}" for i in range(len(charts))]
    nerve = build_nerve(CoverDescription(tuple(names), intersections))
    base = [chart_ring(g, rank=len(charts[0][0]) if charts[0] else None, name=n)
            for g, n in zip(charts, names)]
    rings = {a: base[a[0]] if len(a) == 1 else ring_sum([base[j] for j in a]) for a in nerve}
    return Scheme(name, nerve, rings)


def projective_space(n):
    """P^n with its standard torus invariant charts in the lattice Z^n."""
    e = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    charts = [list(e)]
    for j in range(1, n + 1):
        gens = [tuple(-x for x in e[j - 1])]
        gens += [vsub(e[i - 1], e[j - 1]) for i in range(1, n + 1) if i != j]
        charts.append(gens)
    return custom_scheme(f"P{n}", charts)


def affine_line():
    return custom_scheme("A1", [[(1,)]])


def builtin_scheme(name):
    if name == "A1":
        return affine_line()
    if len(name) == 2 and name[0] == "P" and name[1].isdigit() and int(name[1]) >= 1:
        return projective_space(int(name[1]))
    raise ValueError(f"unknown builtin scheme {name!r}")


def twist_degrees(scheme, d):
    """Chart degrees of O(d) on P^n: a_0 = 0, a_j = d e_j."""
    n = scheme.rank
    out = {0: (0,) * n}
    for j in range(1, n + 1):
        out[j] = tuple(d if k == j - 1 else 0 for k in range(n))
    return out


def line_bundle_sheaf(scheme, twists):
    return SheafDescription("toric_line_bundle", scheme,
                            {"degrees": [twist_degrees(scheme, d) for d in twists]},
                            label=" + ".join(f"O({d})" for d in twists))


def skyscraper_sheaf(scheme, chart=0):
    return SheafDescription("skyscraper", scheme, {"chart": chart}, label=f"point at chart {chart}")


# --- basic A-modules -------------------------------------------------------

def structure_sheaf(nerve, rings):
    """The A-module alpha -> A_alpha with identity structure maps."""
    rank = rings[nerve.simplices[0]].rank
    return line_bundle(nerve, rings, {j: (0,) * rank for j in nerve.vertices})


def line_bundle(nerve, rings, chart_degrees):
    """Monomial line bundle: on U_alpha generated in degree a_{min alpha}.

    chart_degrees[j] is the degree of the local generator on U_j; for every
    simplex the differences must be units of its ring.
    """
    vals, maps = {}, {}
    for a in nerve:
        ring = rings[a]
        for j in a:
            if not ring.is_unit(vsub(chart_degrees[j], chart_degrees[a[0]])):
                raise CocycleError(f"transition between charts {a[0]} and {j} is not a unit on {a}")
        M = free_module(ring, [tuple(chart_degrees[a[0]])])
        vals[a] = GradedDGModule(ring, {0: M})
    for a, b in nerve.pairs():
        src = base_change(vals[a], rings[b])
        maps[(a, b)] = _chain_from_cols(src, vals[b], {0: [{0: ONE}]})
    return AModule(nerve, rings, vals, maps)


def direct_sum_amod(mods):
    from .dgmod import direct_sum
    first = mods[0]
    vals, incl = {}, {}
    for a in first.nerve:
        S, inc, _ = direct_sum([M.value(a) for M in mods])
        vals[a] = S
        incl[a] = inc
    maps = {}
    for (a, b) in first.maps:
        src = base_change(vals[a], first.rings[b])
        colmap = {}
        for i in vals[a].degrees():
            cols = []
            for k, M in enumerate(mods):
                f = M.maps[(a, b)].comp(i)
                inc = incl[b][k].comp(i)
                cols += [inc.image(c) for c in f.cols]
            colmap[i] = cols
        maps[(a, b)] = _chain_from_cols(src, vals[b], colmap)
    return AModule(first.nerve, first.rings, vals, maps)


def point_sheaf(nerve, rings, chart):
    """Skyscraper at the torus fixed point (origin) of chart U_chart.

    On alpha containing the chart, A_alpha modulo the non-unit generators of
    A_chart; zero elsewhere.
    """
    base = rings[(chart,)]
    kill = [g for g in base.gens if not base.is_unit(g)]
    vals, maps = {}, {}
    for a in nerve:
        ring = rings[a]
        if chart in a:
            M = GradedModule(ring, [(0,) * ring.rank], [(g, {0: ONE}) for g in kill])
            vals[a] = GradedDGModule(ring, {0: M}) if any(M.piece_dim(m) for m in _probe(ring)) \
                else GradedDGModule(ring, {})
        else:
            vals[a] = GradedDGModule(ring, {})
    for a, b in nerve.pairs():
        src = base_change(vals[a], rings[b])
        if vals[a].terms and vals[b].terms:
            maps[(a, b)] = _chain_from_cols(src, vals[b], {0: [{0: ONE}]})
        else:
            maps[(a, b)] = ChainMap(src, vals[b], {})
    return AModule(nerve, rings, vals, maps)


def _probe(ring):
    # a module generated in degree 0 is zero iff its degree-0 piece is zero
    return [(0,) * ring.rank]


@dataclass
class SheafDescription:
    """What the user describes: line bundle sums, a point sheaf, or explicit.

    kind "toric_line_bundle": data["degrees"] is a list of summands, each a dict
    chart -> generator degree.  kind "skyscraper": data["chart"].  kind
    "explicit": data["module"] is a ready AModule.  An optional locally free
    resolution (an AModule with free values and invertible transitions) can
    be attached for the Cech model.
    """

    kind: str
    scheme: object
    data: dict = field(default_factory=dict)
    resolution: object = None
    label: str = ""

    def is_locally_free(self):
        return self.kind == "toric_line_bundle"


def upsilon_star(sheaf):
    sch = sheaf.scheme
    if sheaf.kind == "toric_line_bundle":
        parts = [line_bundle(sch.nerve, sch.rings, d) for d in sheaf.data["degrees"]]
        return parts[0] if len(parts) == 1 else direct_sum_amod(parts)
    if sheaf.kind == "skyscraper":
        return point_sheaf(sch.nerve, sch.rings, sheaf.data.get("chart", 0))
    if sheaf.kind == "explicit":
        return sheaf.data["module"]
    raise ValueError(f"unknown sheaf kind {sheaf.kind!r}")


def locally_free_resolution(sheaf):
    """A complex of line bundle sums resolving the sheaf, as an AModule."""
    if sheaf.resolution is not None:
        return sheaf.resolution
    if sheaf.kind == "toric_line_bundle":
        return upsilon_star(sheaf)
    if sheaf.kind == "skyscraper":
        return koszul_point_resolution(sheaf.scheme, sheaf.data.get("chart", 0))
    raise ValueError("no locally free resolution known for this sheaf")


def koszul_point_resolution(scheme, chart):
    """[L --s--> O] resolving the origin of a one-dimensional chart.

    L has local generator of degree g on the chart (g the non-unit generator
    of that chart) and degree 0 elsewhere, s sends generator to generator.
    """
    nerve, rings = scheme.nerve, scheme.rings
    base = rings[(chart,)]
    kill = [g for g in base.gens if not base.is_unit(g)]
    if len(kill) != 1:
        raise ValueError("point resolution implemented for one-dimensional charts only")
    g = kill[0]
    zero = (0,) * base.rank
    degs = {j: (g if j == chart else zero) for j in nerve.vertices}
    L = line_bundle(nerve, rings, degs)
    O = structure_sheaf(nerve, rings)
    vals, maps = {}, {}
    for a in nerve:
        ring = rings[a]
        A1 = L.value(a).term(0)
        A0 = O.value(a).term(0)
        T1 = GradedModule(ring, A1.degrees)
        T0 = GradedModule(ring, A0.degrees)
        vals[a] = GradedDGModule(ring, {-1: T1, 0: T0}, {-1: GMap(T1, T0, [{0: ONE}])})
    for a, b in nerve.pairs():
        src = base_change(vals[a], rings[b])
        maps[(a, b)] = _chain_from_cols(src, vals[b], {-1: [{0: ONE}], 0: [{0: ONE}]})
    return AModule(nerve, rings, vals, maps)


# --- quasi-coherence and latching ------------------------------------------

def check_quasi_coherent(F, box):
    for (a, b), f in sorted(F.maps.items()):
        v = is_quasi_iso(f, box)
        if v.status != "yes":
            return Verdict(v.status, (a, b), f"structure map {a} -> {b}: {v.detail}")
    return Verdict("yes", detail="every structure map is a quasi-isomorphism in the box")


def latching(F, alpha):
    """Latching object at alpha with its map to F_alpha.

    Returns (L, iota, universal maps from base changed lower values).
    """
    alpha = tuple(alpha)
    ring = F.rings[alpha]
    lower = [g for g in strict_subfaces(F.nerve, alpha) if g in F.values]
    mods = {g: base_change(F.value(g), ring) for g in lower}
    maps = {}
    for g in lower:
        for h in lower:
            if len(g) < len(h) and set(g) <= set(h):
                f = F.map(g, h)
                maps[(g, h)] = ChainMap(mods[g], mods[h], {
                    i: GMap(mods[g].term(i), mods[h].term(i), c.cols, check=False)
                    for i, c in f.comps.items()})
    L, univ = poset_colimit(lower, mods, maps, ring)
    if alpha not in F.values:
        return L, None, univ
    target = F.value(alpha)
    colmap = {}
    for i in L.degrees():
        cols = []
        for g in lower:
            cols += list(F.map(g, alpha).comp(i).cols) if i in mods[g].terms else []
        colmap[i] = cols
    iota = _chain_from_cols(L, target, colmap)
    return L, iota, univ


def cokernel_module(f):
    """Presentation of tgt / image(f) for a degree zero module map."""
    T = f.tgt
    rels = list(T.relations)
    for g, col in enumerate(f.cols):
        if col:
            rels.append((vadd(f.src.degrees[g], f.weight), dict(col)))
    return GradedModule(T.ring, T.degrees, rels)


def check_cofibrant(F, box=None):
    """Latching maps degreewise split injective with free cokernels.

    Exact: the left inverse and the freeness of the cokernel are certified by
    finite linear systems on generator degrees.  data["cokernels"][alpha] is
    the list of (cohomological degree, Z^n degree) of a cokernel basis.
    """
    cok = {}
    for a in F.nerve:
        if a not in F.values:
            continue
        L, iota, _ = latching(F, a)
        cok[a] = []
        for i in sorted(set(L.degrees()) | set(F.value(a).degrees())):
            comp = iota.comp(i)
            if L.term(i).ngens and left_inverse(comp) is None:
                return Verdict("no", (a, i), f"latching map at {a} not split injective in degree {i}",
                               {"cokernels": cok})
            cert = free_certificate(cokernel_module(comp))
            if cert is None:
                return Verdict("no", (a, i), f"latching cokernel at {a} not free in degree {i}",
                               {"cokernels": cok})
            T, Fr, _, _ = cert
            cok[a] += [(i, d) for d in Fr.degrees]
    return Verdict("yes", detail="all latching maps are cofibrations", data={"cokernels": cok})


def is_pointwise_cofibrant(F):
    return all(free_certificate(T) is not None for V in F.values.values() for T in V.terms.values())


# --- replacements ----------------------------------------------------------

def qx_replacement(nerve, rings):
    """Q_X with augmentation to the structure sheaf.

    Q_alpha^{-r} is free on the r-faces of alpha, all in Z^n degree 0, with
    the simplicial boundary as differential.
    """
    O = structure_sheaf(nerve, rings)
    vals, faces = {}, {}
    for a in nerve:
        ring = rings[a]
        c = chain_complex(a)
        faces[a] = c.faces
        terms = {-r: free_module(ring, [(0,) * ring.rank] * c.rank(r), labels=c.faces[r])
                 for r in range(c.top + 1)}
        diff = {}
        for r in range(1, c.top + 1):
            mat = c.boundary[r]
            cols = [{i: Fraction(mat[i][j]) for i in range(len(mat)) if mat[i][j]}
                    for j in range(c.rank(r))]
            diff[-r] = GMap(terms[-r], terms[-r + 1], cols, check=False)
        vals[a] = GradedDGModule(ring, terms, diff, check=False)
    maps = {}
    for a, b in nerve.pairs():
        src = base_change(vals[a], rings[b])
        colmap = {}
        for r, fs in faces[a].items():
            idx = {s: k for k, s in enumerate(faces[b][r])}
            colmap[-r] = [{idx[s]: ONE} for s in fs]
        maps[(a, b)] = _chain_from_cols(src, vals[b], colmap)
    Q = AModule(nerve, rings, vals, maps, check=False)
    pi = {a: _chain_from_cols(vals[a], O.value(a), {0: [{0: ONE}] * len(faces[a][0])})
          for a in nerve}
    return AModuleMap(Q, O, pi)


def locally_free_replacement(E):
    """Q_E = Q_X (x) E with structure maps twisted by the transitions of E."""
    nerve, rings = E.nerve, E.rings
    for V in E.values.values():
        if not V.is_free():
            raise ValueError("locally free replacement needs pointwise free values")
    vals, index = {}, {}
    for a in nerve:
        ring = rings[a]
        c = chain_complex(a)
        V = E.value(a)
        gens, idx = {}, {}
        for r in range(c.top + 1):
            for j in V.degrees():
                for si, s in enumerate(c.faces[r]):
                    for g, d in enumerate(V.term(j).degrees):
                        k = j - r
                        gens.setdefault(k, []).append(d)
                        idx[(r, s, j, g)] = (k, len(gens[k]) - 1)
        terms = {k: free_module(ring, ds) for k, ds in gens.items()}
        cols = {k: [None] * len(ds) for k, ds in gens.items()}
        for (r, s, j, g), (k, pos) in idx.items():
            img = {}
            if r >= 1:
                for t in range(len(s)):
                    face = s[:t] + s[t + 1:]
                    tk, tp = idx[(r - 1, face, j, g)]
                    img[tp] = img.get(tp, ZERO) + (-1) ** t
            sign = -1 if r % 2 else 1
            for h, cf in V.d(j).cols[g].items():
                tk, tp = idx[(r, s, j + 1, h)]
                img[tp] = img.get(tp, ZERO) + sign * cf
            cols[k][pos] = img
        diff = {k: GMap(terms[k], terms[k + 1], cols[k], check=False) for k in terms if k + 1 in terms}
        vals[a] = GradedDGModule(ring, terms, diff, check=False)
        index[a] = idx
    maps = {}
    for a, b in nerve.pairs():
        src = base_change(vals[a], rings[b])
        colmap = {k: [None] * T.ngens for k, T in vals[a].terms.items()}
        for (r, s, j, g), (k, pos) in index[a].items():
            f = E.map(a, b).comp(j)
            colmap[k][pos] = {index[b][(r, s, j, h)][1]: c for h, c in f.cols[g].items()}
        maps[(a, b)] = _chain_from_cols(src, vals[b], colmap)
    Q = AModule(nerve, rings, vals, maps, check=False)
    pi = {}
    for a in nerve:
        colmap = {k: [{} for _ in range(T.ngens)] for k, T in vals[a].terms.items()}
        for (r, s, j, g), (k, pos) in index[a].items():
            if r == 0:
                colmap[k][pos] = {g: ONE}
        pi[a] = _chain_from_cols(vals[a], E.value(a), colmap)
    return AModuleMap(Q, E, pi)


class _Cells:
    """A free complex over one ring, grown by attaching cells."""

    def __init__(self, ring, F):
        self.ring = ring
        self.F = F
        self.gens = {}
        self.dcols = {}
        self.pcols = {}

    def add(self, i, deg, dcol, pcol):
        self.gens.setdefault(i, []).append(tuple(deg))
        self.dcols.setdefault(i, []).append(dict(dcol))
        self.pcols.setdefault(i, []).append(dict(pcol))

    def module(self, i):
        return free_module(self.ring, self.gens.get(i, []))

    def build(self):
        terms = {i: free_module(self.ring, ds) for i, ds in self.gens.items() if ds}
        diff = {i: GMap(terms[i], terms[i + 1], self.dcols[i], check=False)
                for i in terms if i + 1 in terms}
        Q = GradedDGModule(self.ring, terms, diff, check=False)
        pi = ChainMap(Q, self.F, {i: GMap(terms[i], self.F.term(i), self.pcols[i], check=False)
                                  for i in terms})
        return Q, pi

    def matrices(self, i, m):
        """Piece matrices at m: d: Q^i -> Q^{i+1} and pi: Q^i -> F^i."""
        Qi, Qn = self.module(i), self.module(i + 1)
        src = Qi.piece(m)
        tgt = Qn.piece(m)
        fp = self.F.term(i).piece(m)
        dm, pm = [], []
        for k in range(src.dim):
            g = src.present[k]
            x = self.dcols[i][g]
            dm.append(tgt.project(x))
            pm.append(fp.project(self.pcols[i][g]))
        return src, dm, pm


def _columns_to_rows(cols, nrows):
    return [[c[r] for c in cols] for r in range(nrows)]


def cofibrant_replace(F, box, depth_cap=6):
    """Reedy-style cofibrant replacement Q -> F.

    Simplices are treated by increasing degree.  At alpha the latching object
    L (made free) is extended by free cells: first to make the augmentation
    surjective on generators, then to kill the cohomology of its kernel piece
    by piece over the box, one cohomological degree at a time from the top.
    """
    nerve, rings = F.nerve, F.rings
    Qvals, Qmaps, pis = {}, {}, {}
    partial = AModule(nerve, rings, Qvals, Qmaps, check=False)
    order = sorted(F.values, key=lambda s: (len(s), s))
    trace = {}
    for a in order:
        ring = rings[a]
        Fa = F.value(a)
        L, _, univ = latching(partial, a)
        cells = _Cells(ring, Fa)
        # make the latching object free, keep its isomorphism data
        s_maps = {}
        for i in L.degrees():
            cert = free_certificate(L.term(i))
            if cert is None:
                raise ReplacementError(f"latching object at {a} is not free in degree {i}")
            T, Fr, j, s = cert
            s_maps[i] = (T, j, s)
        for i in sorted(s_maps):
            T, j, s = s_maps[i]
            for k, t in enumerate(T):
                x = L.d(i).cols[t] if i in L.diff else {}
                dcol = s_maps[i + 1][2].image(x) if i + 1 in s_maps else {}
                # augmentation on a latching generator: through the lower piece
                pcol = _lower_augmentation(partial, pis, F, a, L, univ, i, t)
                cells.add(i, L.term(i).degrees[t], dcol, pcol)
        lat_count = {i: len(s_maps[i][0]) for i in s_maps}
        degs = set(Fa.degrees()) | set(s_maps)
        if not degs:
            Q, pi = cells.build()
        else:
            top, bottom = max(degs), min(degs)
            i = top
            while True:
                added = _surject(cells, Fa, i)
                added += _kill(cells, Fa, i, box, ring)
                if i < bottom and not cells.gens.get(i):
                    break
                if i < bottom - depth_cap:
                    raise ReplacementError(f"depth cap {depth_cap} exhausted at {a}")
                i -= 1
            Q, pi = cells.build()
        trace[a] = {i: len(cells.gens.get(i, [])) - lat_count.get(i, 0) for i in cells.gens}
        Qvals[a] = Q
        pis[a] = pi
        for g in strict_subfaces(nerve, a):
            src = base_change(Qvals[g], ring)
            colmap = {}
            for i in Qvals[g].degrees():
                cols = []
                for col in univ[g].comp(i).cols:
                    cols.append(s_maps[i][2].image(col))
                colmap[i] = cols
            Qmaps[(g, a)] = _chain_from_cols(src, Q, colmap)
    Q = AModule(nerve, rings, Qvals, Qmaps, check=True)
    aug = AModuleMap(Q, F, pis)
    aug.trace = trace
    return aug


def _lower_augmentation(partial, pis, F, a, L, univ, i, t):
    """Image in F_a of latching generator t (degree i)."""
    for g, u in univ.items():
        comp = u.comp(i)
        for k, col in enumerate(comp.cols):
            if col == {t: ONE}:
                x = pis[g].comp(i).cols[k]
                return F.map(g, a).comp(i).image(x)
    return {}


def _surject(cells, Fa, i):
    """Attach cells in degree i so that the augmentation hits every generator."""
    T = Fa.term(i)
    added = 0
    ring = cells.ring
    l = ring.grading_functional()
    order = sorted(range(T.ngens), key=lambda g: (sum(x * y for x, y in zip(l, T.degrees[g])), g))
    for f in order:
        m = T.degrees[f]
        src, dm, pm = cells.matrices(i, m)
        fp = T.piece(m)
        e = Echelon(fp.dim)
        for col in pm:
            e.add(col)
        if e.contains(fp.project({f: ONE})):
            continue
        # a cycle z in Q^{i+1} with pi(z) = d_F f
        nsrc, ndm, npm = cells.matrices(i + 1, m)
        target = Fa.term(i + 1).piece(m).project(Fa.d(i).cols[f]) if Fa.term(i + 1).ngens else []
        rows = _columns_to_rows(npm, len(target)) + _columns_to_rows(ndm, len(ndm[0]) if ndm else 0)
        rhs = list(target) + [ZERO] * (len(rows) - len(target))
        z = solve(rows, nsrc.dim, rhs) if nsrc.dim else ([] if not any(target) else None)
        if z is None:
            raise ReplacementError(f"no cycle lifts d(f) in degree {i + 1} at {m}")
        dcol = {nsrc.present[k]: c for k, c in enumerate(z) if c}
        cells.add(i, m, dcol, {f: ONE})
        added += 1
    return added


def _kill(cells, Fa, i, box, ring):
    """Attach cells in degree i killing the kernel cohomology in degree i+1."""
    added = 0
    for m in ordered_points(box, ring):
        nsrc, ndm, npm = cells.matrices(i + 1, m)
        if not nsrc.dim:
            continue
        rows = _columns_to_rows(npm, len(npm[0]) if npm else 0) + \
            _columns_to_rows(ndm, len(ndm[0]) if ndm else 0)
        Z, _ = nullspace(rows, nsrc.dim)
        if not Z:
            continue
        src, dm, pm = cells.matrices(i, m)
        K, _ = nullspace(_columns_to_rows(pm, len(pm[0]) if pm else 0), src.dim) if src.dim else ([], [])
        e = Echelon(nsrc.dim)
        for v in K:
            e.add([sum((v[k] * dm[k][r] for k in range(src.dim) if v[k]), ZERO)
                   for r in range(nsrc.dim)])
        for z in Z:
            if e.add(z):
                cells.add(i, m, {nsrc.present[k]: c for k, c in enumerate(z) if c}, {})
                added += 1
    return added


def augmentation_report(aug, box):
    """Per simplex: surjectivity and quasi-isomorphism verdicts."""
    out = {}
    for a, p in aug.comps.items():
        out[a] = (p.surjective(), is_quasi_iso(p, box).status)
    return out


# --- lifting ---------------------------------------------------------------

class FamilySystem:
    """Unknown families {phi_k} of maps src[k] -> tgt[k] of one degree and
    weight, subject to compatibility squares.

    compat lists (k, h, fs, ft) asking ft o phi_k = phi_h o fs, where fs:
    src[k] -> src[h] and ft: tgt[k] -> tgt[h] are chain maps (coefficient
    data over the ring of h).  If `cdeg` is given only the components on
    cohomological degree cdeg are unknown.
    """

    def __init__(self, src, tgt, compat, degree, weight, cdeg=None):
        self.src, self.tgt = src, tgt
        self.degree = degree
        self.weight = tuple(weight)
        self.units = {}
        pos = 0
        for k in src:
            for i in src[k].degrees():
                if cdeg is not None and i != cdeg:
                    continue
                u = MapUnknowns(src[k].term(i), tgt[k].term(i + degree), self.weight, pos)
                self.units[(k, i)] = u
                pos = u.end
        self.size = pos
        self.rows = []
        self.rhs = []
        for (k, i), u in self.units.items():
            for deg, coeffs in u.src.relations:
                self._add(u.apply_rows(coeffs, deg))
        for k, h, fs, ft in compat:
            for i in src[k].degrees():
                u = self.units.get((k, i))
                if u is None:
                    continue
                v = self.units.get((h, i))
                post = ft.comp(i + degree)
                fcol = fs.comp(i)
                for s in range(u.src.ngens):
                    a = u.src.degrees[s]
                    left = u.apply_rows({s: ONE}, a, post=post)
                    right = v.apply_rows(fcol.cols[s], a) if v is not None else [{} for _ in left]
                    self._add([_row_sub(lr, rr) for lr, rr in zip(left, right)])

    def _add(self, rows, rhs=None):
        for k, r in enumerate(rows):
            b = rhs[k] if rhs is not None else ZERO
            if r or b:
                self.rows.append(r)
                self.rhs.append(b)

    def add_equation(self, rows, rhs):
        self._add(rows, rhs)

    def kernel(self):
        return nullspace(self.rows, self.size)

    def particular(self):
        return solve(self.rows, self.size, self.rhs)

    def to_family(self, vec):
        fam = {}
        for (k, i), u in self.units.items():
            fam.setdefault(k, {})[i] = u.to_gmap(vec)
        return fam

    def from_family(self, fam):
        vec = [ZERO] * self.size
        for (k, i), u in self.units.items():
            f = fam.get(k, {}).get(i)
            if f is not None:
                vec[u.offset:u.end] = u.from_gmap(f)
        return vec


def _row_sub(a, b):
    row = dict(a)
    for k, c in b.items():
        v = row.get(k, ZERO) - c
        if v:
            row[k] = v
        else:
            row.pop(k, None)
    return row


def module_compat(F, G, simplices):
    """Compatibility squares of the structure maps among `simplices`."""
    ss = list(simplices)
    return [(g, h, F.map(g, h), G.map(g, h)) for g in ss for h in ss
            if len(g) < len(h) and set(g) <= set(h)]


def amodule_system(F, G, simplices, degree, weight, cdeg=None):
    ss = [g for g in simplices if g in F.values]
    return FamilySystem({g: F.value(g) for g in ss}, {g: G.value(g) for g in ss},
                        module_compat(F, G, ss), degree, weight, cdeg)


def lift_against_surjection(f, pi):
    """h: Q -> P with pi h = f, solved one cohomological degree at a time.

    f: AModuleMap Q -> R, pi: AModuleMap P -> R of degree 0.  Returns an
    AModuleMap Q -> P (a *-morphism: no compatibility with d is asked) or
    None when some degree has no solution.
    """
    Q, P = f.src, pi.src
    comps = {}
    for i in Q.degrees():
        sysm = amodule_system(Q, P, list(Q.values), f.degree, f.weight, cdeg=i)
        for (g, ii), u in sysm.units.items():
            post = pi.comps[g].comp(ii + f.degree)
            fc = f.comps[g].comp(ii)
            for s in range(u.src.ngens):
                a = u.src.degrees[s]
                rows = u.apply_rows({s: ONE}, a, post=post)
                tp = fc.tgt.piece(vadd(a, f.weight))
                sysm.add_equation(rows, tp.project(fc.cols[s]))
        sol = sysm.particular()
        if sol is None:
            return None
        for g, d in sysm.to_family(sol).items():
            comps.setdefault(g, {}).update(d)
    out = {g: ChainMap(Q.value(g), P.value(g), comps.get(g, {}), f.degree, f.weight) for g in Q.values}
    return AModuleMap(Q, P, out, f.degree, f.weight)
