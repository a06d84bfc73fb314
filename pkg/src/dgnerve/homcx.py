"""Hom complexes of A-modules and the endomorphism DG-Lie algebra.

Every Hom space splits by Z^n weight, and each weight piece is finite
dimensional because the values are finitely generated.  A HomComplex is one
weight piece; tables over a degree box sum them up.
"""

from .amod import FamilySystem, module_compat
from .dgmod import stabilized
from .linalg import ONE, ZERO, rank
from .nerve import opens_above
from .rings import vadd


class Family:
    """A family of module maps comps[key][i]: src[key]^i -> tgt[key]^{i+degree}.

    Missing components are zero.
    """

    __slots__ = ("degree", "weight", "comps")

    def __init__(self, degree, weight, comps):
        self.degree = degree
        self.weight = tuple(weight)
        self.comps = comps

    def compose(self, other):
        """self o other."""
        comps = {}
        for k, g in other.comps.items():
            f = self.comps.get(k)
            if not f:
                continue
            out = {}
            for i, gi in g.items():
                fi = f.get(i + other.degree)
                if fi is not None:
                    out[i] = fi.compose(gi)
            if out:
                comps[k] = out
        return Family(self.degree + other.degree, vadd(self.weight, other.weight), comps)

    def scale(self, c):
        if not c:
            return Family(self.degree, self.weight, {})
        return Family(self.degree, self.weight,
                      {k: {i: m.scale(c) for i, m in f.items()} for k, f in self.comps.items()})

    def __add__(self, other):
        if self.degree != other.degree or self.weight != other.weight:
            raise ValueError("adding families of different degree or weight")
        comps = {k: dict(f) for k, f in self.comps.items()}
        for k, f in other.comps.items():
            mine = comps.setdefault(k, {})
            for i, m in f.items():
                mine[i] = mine[i] + m if i in mine else m
        return Family(self.degree, self.weight, comps)

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self):
        return all(m.is_zero() for f in self.comps.values() for m in f.values())

    def restrict(self, keys, rename=None):
        rename = rename or (lambda k: k)
        return Family(self.degree, self.weight,
                      {rename(k): f for k, f in self.comps.items() if k in keys})


def differential_family(mods):
    """The family of differentials of the complexes mods[key]."""
    rank_ = next(iter(mods.values())).ring.rank if mods else 0
    return Family(1, (0,) * rank_, {k: dict(M.diff) for k, M in mods.items()})


def identity_family(mods):
    from .dgmod import identity_map
    rank_ = next(iter(mods.values())).ring.rank if mods else 0
    return Family(0, (0,) * rank_, {k: {i: identity_map(T) for i, T in M.terms.items()}
                                    for k, M in mods.items()})


class HomComplex:
    """Weight-w piece of the complex of compatible families src -> tgt.

    The differential is df = f d_src - (-1)^p d_tgt f.  Each degree p keeps
    the solution space of the compatibility system; coordinates of a
    solution are its values on the free columns of that system.
    """

    def __init__(self, src, tgt, compat, weight):
        self.src, self.tgt, self.compat = src, tgt, compat
        self.weight = tuple(weight)
        self.dsrc = differential_family(src)
        self.dtgt = differential_family(tgt)
        lo = [j - i for k in src for i in src[k].degrees() for j in tgt[k].degrees()]
        self.degrees = list(range(min(lo), max(lo) + 1)) if lo else []
        self._sys, self._basis, self._free = {}, {}, {}
        for p in self.degrees:
            sysm = FamilySystem(src, tgt, compat, p, self.weight)
            basis, free = sysm.kernel()
            self._sys[p], self._basis[p], self._free[p] = sysm, basis, free

    def dim(self, p):
        return len(self._basis.get(p, ()))

    def basis(self, p):
        sysm = self._sys.get(p)
        return [Family(p, self.weight, sysm.to_family(v)) for v in self._basis.get(p, ())]

    def coords(self, f):
        """Coordinates of a compatible family in the stored basis."""
        sysm = self._sys.get(f.degree)
        if sysm is None:
            return []
        vec = sysm.from_family(f.comps)
        return [vec[c] for c in self._free[f.degree]]

    def contains(self, f):
        """True if f satisfies the compatibility system."""
        sysm = self._sys.get(f.degree)
        if sysm is None:
            return f.is_zero()
        vec = sysm.from_family(f.comps)
        return all(sum((c * vec[k] for k, c in r.items()), ZERO) == b for r, b in zip(sysm.rows, sysm.rhs))

    def differential(self, f):
        sign = -ONE if f.degree % 2 else ONE
        return f.compose(self.dsrc) - self.dtgt.compose(f).scale(sign)

    def matrix(self, p):
        """Rows index Hom^{p+1}, columns Hom^p."""
        cols = [self.coords(self.differential(b)) for b in self.basis(p)]
        n = self.dim(p + 1)
        return [[c[r] for c in cols] for r in range(n)]

    def cohomology(self):
        rk = {}
        for p in self.degrees:
            m = self.matrix(p)
            rk[p] = rank(m, self.dim(p)) if m and self.dim(p) else 0
        return {p: self.dim(p) - rk[p] - rk.get(p - 1, 0) for p in self.degrees
                if self.dim(p) - rk[p] - rk.get(p - 1, 0)}


def hom_weight(F, G, weight, simplices=None):
    """Weight piece of Hom*(F, G) over the given simplices (default all)."""
    ss = [g for g in (simplices if simplices is not None else F.nerve.simplices) if g in F.values]
    return HomComplex({g: F.value(g) for g in ss}, {g: G.value(g) for g in ss},
                      module_compat(F, G, ss), weight)


def local_hom(F, G, alpha, weight):
    """Families over V_alpha = {gamma >= alpha}."""
    return hom_weight(F, G, weight, opens_above(F.nerve, tuple(alpha)))


def restrict_local(f, nerve, beta):
    """Restriction of a family over V_alpha to V_beta, beta >= alpha."""
    return f.restrict(set(opens_above(nerve, tuple(beta))))


def hom_table(F, G, box, simplices=None):
    """Sum over the weights of the box of the cohomology of Hom*(F, G)."""
    total = {}
    for w in box.points():
        for p, h in hom_weight(F, G, w, simplices).cohomology().items():
            total[p] = total.get(p, 0) + h
    return total


def hom_complex(F, G, box, simplices=None):
    """Stabilized cohomology table of Hom*(F, G): (table, box used, converged)."""
    return stabilized(lambda b: hom_table(F, G, b, simplices), box)


def module_maps(F, G, weight):
    """Degree zero chain maps F -> G commuting with structure maps, found by
    solving the chain condition and the squares directly (no Hom complex)."""
    from .linalg import nullspace
    H = hom_weight(F, G, weight)
    sysm = H._sys.get(0)
    if sysm is None:
        return []
    rows = list(sysm.rows)
    size = sysm.size
    # d f - f d = 0 expressed on generators of each degree
    for (k, i), u in sysm.units.items():
        dG = G.value(k).d(i)
        v = sysm.units.get((k, i + 1))
        dF = F.value(k).d(i)
        for s in range(u.src.ngens):
            a = u.src.degrees[s]
            left = u.apply_rows({s: ONE}, a, post=dG)
            right = v.apply_rows(dF.cols[s], a) if v is not None else [{} for _ in left]
            for lr, rr in zip(left, right):
                row = dict(lr)
                for c, x in rr.items():
                    row[c] = row.get(c, ZERO) - x
                row = {c: x for c, x in row.items() if x}
                if row:
                    rows.append(row)
    basis, _ = nullspace(rows, size)
    return [Family(0, weight, sysm.to_family(v)) for v in basis]


class EndDGLA:
    """End*(Q) over a set of keys, with commutator bracket and d = [d_Q, -].

    `space` is a HomComplex with equal source and target; its stored basis
    gives the elements on which the axioms are checked.
    """

    def __init__(self, mods, compat, rank_):
        self.mods = mods
        self.compat = compat
        self.rank = rank_
        self.dQ = differential_family(mods)
        self.one = identity_family(mods)
        self._spaces = {}

    def space(self, weight):
        weight = tuple(weight)
        if weight not in self._spaces:
            self._spaces[weight] = HomComplex(self.mods, self.mods, self.compat, weight)
        return self._spaces[weight]

    def zero(self, degree, weight=None):
        return Family(degree, weight or (0,) * self.rank, {})

    def bracket(self, f, g):
        return graded_commutator(f, g)

    def d(self, f):
        return graded_commutator(self.dQ, f)

    def basis(self, degree, weight):
        return self.space(weight).basis(degree)

    def cohomology(self, weight):
        return self.space(weight).cohomology()

    def check_axioms(self, elements, triples=None):
        """Antisymmetry and Leibniz on all pairs, d^2 = 0, and Jacobi on all
        triples (or on the given index triples)."""
        failures = []
        for x in elements:
            if not self.d(self.d(x)).is_zero():
                failures.append(("d2", x))
        for x in elements:
            for y in elements:
                s = -ONE if (x.degree * y.degree) % 2 else ONE
                if not _plus(self.bracket(x, y), self.bracket(y, x).scale(s)).is_zero():
                    failures.append(("antisymmetry", x, y))
                sx = -ONE if x.degree % 2 else ONE
                lhs = self.d(self.bracket(x, y))
                rhs = _plus(self.bracket(self.d(x), y), self.bracket(x, self.d(y)).scale(sx))
                if not _minus(lhs, rhs).is_zero():
                    failures.append(("leibniz", x, y))
        if triples is None:
            n = len(elements)
            triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
        for i, j, k in triples:
            x, y, z = elements[i], elements[j], elements[k]
            a, b, c = x.degree, y.degree, z.degree
            t1 = self.bracket(x, self.bracket(y, z)).scale(_sgn(a * c))
            t2 = self.bracket(y, self.bracket(z, x)).scale(_sgn(b * a))
            t3 = self.bracket(z, self.bracket(x, y)).scale(_sgn(c * b))
            if not _plus(_plus(t1, t2), t3).is_zero():
                failures.append(("jacobi", x, y, z))
        return failures


def _sgn(k):
    return -ONE if k % 2 else ONE


def _plus(a, b):
    """Sum of two families of equal degree, allowing unequal weights only
    when one side is empty."""
    if a.weight != b.weight:
        if not b.comps:
            return a
        if not a.comps:
            return b
    return a + b


def _minus(a, b):
    return _plus(a, -b)


def graded_commutator(f, g):
    sign = _sgn(f.degree * g.degree)
    return _plus(f.compose(g), g.compose(f).scale(-sign))


def end_dgla(Q, alpha=None):
    """End*(Q) globally, or over V_alpha when alpha is given."""
    ss = [g for g in (opens_above(Q.nerve, tuple(alpha)) if alpha is not None else Q.nerve.simplices)
          if g in Q.values]
    mods = {g: Q.value(g) for g in ss}
    rank_ = next(iter(Q.rings.values())).rank
    return EndDGLA(mods, module_compat(Q, Q, ss), rank_)


def end_table(Q, box, alpha=None):
    E = end_dgla(Q, alpha)

    def table(b):
        total = {}
        for w in b.points():
            for p, h in E.cohomology(w).items():
                total[p] = total.get(p, 0) + h
        return total

    return stabilized(table, box)
