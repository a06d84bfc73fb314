"""Deformations over Artin rings: Maurer-Cartan elements, gauge action, BCH
product, the H^1 functor of a semicosimplicial DGLA, and tangent spaces.

An element of g (x) A is a dict {(k, weight, key): Family}: k indexes the
basis of A, key selects a factor of the DGLA (the tuple of a level, or ()
for a global End complex).  Elements of g (x) m_A have no k = 0 terms.
"""

from fractions import Fraction
from math import factorial

from .cech import _under
from .dgmod import Verdict
from .homcx import graded_commutator
from .linalg import ONE, ZERO, nullspace, rank, solve
from .rings import vadd


# --- DGLA views ------------------------------------------------------------

class GlobalView:
    """End*(Q) as a DGLA with the single factor key ()."""

    def __init__(self, E):
        self.E = E
        self.rank = E.rank

    def keys(self):
        return [()]

    def space(self, key, weight):
        return self.E.space(weight)

    def d(self, f):
        return self.E.d(f)

    def bracket(self, f, g):
        return graded_commutator(f, g)

    def dfam(self, key):
        return self.E.dQ


class LevelView:
    """Level n of a semicosimplicial DGLA (normalized tuples)."""

    def __init__(self, V, n):
        self.V, self.n = V, n
        self.rank = V.rank

    def keys(self):
        return self.V.tuples(self.n)

    def space(self, key, weight):
        return self.V.space(_under(key), weight)

    def d(self, f):
        return self.V.d(f)

    def bracket(self, f, g):
        return graded_commutator(f, g)

    def dfam(self, key):
        return self.V.dfam


# --- tensor elements -------------------------------------------------------

def _fadd(a, b):
    if a.weight != b.weight:
        if not b.comps:
            return a
        if not a.comps:
            return b
    return a + b


def t_add(x, y, c=ONE):
    out = dict(x)
    for key, f in y.items():
        g = f.scale(c) if c != ONE else f
        out[key] = _fadd(out[key], g) if key in out else g
    return out


def t_scale(x, c):
    return {k: f.scale(c) for k, f in x.items()} if c else {}


def t_is_zero(x):
    return all(f.is_zero() for f in x.values())


def t_clean(x):
    return {k: f for k, f in x.items() if not f.is_zero()}


def t_bracket(g, A, x, y, op=None):
    """[x (x) a, y (x) b] = [x, y] (x) ab; op replaces the bracket (e.g. compose)."""
    op = op or g.bracket
    out = {}
    for (k1, w1, key1), f in x.items():
        for (k2, w2, key2), h in y.items():
            if key1 != key2:
                continue
            prod = A.mult[k1][k2]
            if not any(prod):
                continue
            b = op(f, h)
            for k3, c in enumerate(prod):
                if c:
                    key = (k3, vadd(w1, w2), key1)
                    term = b.scale(c)
                    out[key] = _fadd(out[key], term) if key in out else term
    return t_clean(out)


def t_d(g, x):
    return t_clean({k: g.d(f) for k, f in x.items()})


def t_coords(g, x, degree):
    """Sparse coordinates {(k, w, key, j): value}."""
    out = {}
    for (k, w, key), f in x.items():
        sp = g.space(key, w)
        if f.degree != degree:
            raise ValueError("mixed degrees in a tensor element")
        for j, v in enumerate(sp.coords(f)):
            if v:
                out[(k, w, key, j)] = v
    return out


def t_push(V, x, i, n):
    """Apply the coface delta^i (level n-1 -> n) to each (k, w) part."""
    groups = {}
    for (k, w, key), f in x.items():
        groups.setdefault((k, w), {})[key] = f
    out = {}
    for (k, w), lev in groups.items():
        for t, f in V.coface(i, lev, n).items():
            out[(k, w, t)] = f
    return t_clean(out)


# --- BCH and gauge ---------------------------------------------------------

def _compositions(total, parts):
    """Sequences (r1, s1, ..., rn, sn) with r_i + s_i >= 1 summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for r in range(total + 1):
        for s in range(total - r + 1):
            if r + s == 0:
                continue
            for rest in _compositions(total - r - s, parts - 1):
                yield (r, s) + rest


def bch(g, A, x, y):
    """x . y = log(e^x e^y) by the Dynkin series, words of length < nu."""
    out = {}
    for L in range(1, A.nu):
        for n in range(1, L + 1):
            for seq in _compositions(L, n):
                word = []
                denom = n * L
                for i in range(0, len(seq), 2):
                    r, s = seq[i], seq[i + 1]
                    word += [x] * r + [y] * s
                    denom *= factorial(r) * factorial(s)
                term = word[-1]
                for letter in reversed(word[:-1]):
                    term = t_bracket(g, A, letter, term)
                    if not term:
                        break
                if term:
                    out = t_add(out, term, Fraction((-1) ** (n - 1), denom))
    return t_clean(out)


def gauge_formula(g, A, a, l):
    """e^a * l = l + sum_k ad_a^k([a, l] - da) / (k+1)!."""
    out = dict(l)
    term = t_add(t_bracket(g, A, a, l), t_d(g, a), -ONE)
    k = 0
    while term and k < A.nu + 1:
        out = t_add(out, term, Fraction(1, factorial(k + 1)))
        term = t_bracket(g, A, a, term)
        k += 1
    return t_clean(out)


def _op_compose(g, A, x, y):
    return t_bracket(g, A, x, y, op=lambda f, h: f.compose(h))


def _op_exp(g, A, a, sign=ONE):
    """e^{sign a} as an operator (identity part included)."""
    one = _identity(g, A)
    out = dict(one)
    term = dict(one)
    for k in range(1, A.nu + 1):
        term = t_scale(_op_compose(g, A, t_scale(a, sign), term), Fraction(1, k))
        if not term:
            break
        out = t_add(out, term)
    return out


def _identity(g, A):
    return {(0, (0,) * g.rank, key): _identity_family_for(g, key) for key in g.keys()}


def _identity_family_for(g, key):
    from .homcx import identity_family
    if isinstance(g, GlobalView):
        return identity_family(g.E.mods)
    V = g.V
    if hasattr(V, "Q"):
        from .nerve import opens_above
        mods = {s: V.Q.value(s) for s in opens_above(V.nerve, _under(key)) if s in V.Q.values}
    else:
        mods = {_under(key): V.E.value(_under(key))}
    return identity_family(mods)


def _d_operator(g):
    return {(0, (0,) * g.rank, key): _restricted_d(g, key) for key in g.keys()}


def _restricted_d(g, key):
    ident = _identity_family_for(g, key)
    return g.dfam(key).compose(ident)


def gauge_conjugate(g, A, a, l):
    """e^a (d + l) e^{-a} - d, computed with operators."""
    D = t_add(_d_operator(g), l)
    conj = _op_compose(g, A, _op_compose(g, A, _op_exp(g, A, a), D), _op_exp(g, A, a, -ONE))
    return t_clean(t_add(conj, _d_operator(g), -ONE))


def mc_residual(g, A, eta):
    return t_clean(t_add(t_d(g, eta), t_bracket(g, A, eta, eta), Fraction(1, 2)))


def mc_check(g, A, eta):
    r = mc_residual(g, A, eta)
    if not r:
        return Verdict("yes", detail="d eta + 1/2 [eta, eta] = 0")
    return Verdict("no", sorted(r)[0], "Maurer-Cartan residual is nonzero", {"residual": r})


def mc_operator_check(g, A, eta):
    """(d + eta)^2 = 0 as operators."""
    D = t_add(_d_operator(g), eta)
    return t_is_zero(_op_compose(g, A, D, D))


class DeformedComplex:
    """(Q_alpha (x) A, d + eta_alpha): differential terms (k, weight) -> GMap
    per cohomological degree.  The underlying module is Q_alpha (x)_K A, free
    over A_alpha (x) A of rank = number of generators of Q_alpha."""

    def __init__(self, value, terms):
        self.value = value
        self.terms = terms

    def rank_over_A(self):
        return self.value.total_gens()


def deform(Q, A, eta, g=None):
    """The deformed complexes of a cofibrant Q by an MC element eta of End*(Q)."""
    from .homcx import end_dgla
    g = g or GlobalView(end_dgla(Q))
    v = mc_check(g, A, eta)
    if v.status != "yes":
        raise ValueError("not a Maurer-Cartan element: " + v.detail)
    if not mc_operator_check(g, A, eta):
        raise RuntimeError("MC equation holds but (d + eta)^2 != 0")
    out = {}
    for alpha in Q.values:
        V = Q.value(alpha)
        terms = {i: {(0, (0,) * g.rank): d} for i, d in V.diff.items()}
        for (k, w, key), f in eta.items():
            for i, m in f.comps.get(alpha, {}).items():
                terms.setdefault(i, {})[(k, w)] = m
        out[alpha] = DeformedComplex(V, terms)
    # structure maps remain chain maps for d + eta
    for (a, b), fmap in Q.maps.items():
        for (k, w, key), f in eta.items():
            for i, m in f.comps.get(a, {}).items():
                left = fmap.comp(i + 1).compose(m)
                mb = f.comps.get(b, {}).get(i)
                right = mb.compose(fmap.comp(i)) if mb is not None else None
                diff = left if right is None else left - right
                if not diff.is_zero():
                    raise RuntimeError(f"deformed structure map {a} -> {b} is not a chain map")
    return out


# --- filtered solving ------------------------------------------------------

def filtered_solve(A, unknowns, residual, start=None):
    """Solve residual(x) = 0 for x in span(unknowns) (x) m_A, order by order
    in the m_A-adic filtration.

    unknowns are elements of g (k = 0 placeholders); residual(x) returns
    sparse coordinates {(k, ...): value}.  At order j the correction lies in
    m^j, so the residual changes linearly modulo m^{j+1} and one linear solve
    clears the order-j part.  Assumes the basis of A is adapted to the
    filtration.  Returns x, or None when some order has no solution.
    """
    return _filtered(A, unknowns, residual, start or {}, lambda u, k: _lift(u, k))


def _filtered(A, unknowns, residual, x, lift):
    orders = A.order
    for level in range(1, A.nu):
        ks = [k for k in range(1, A.dim) if orders[k] == level]
        if not ks:
            continue
        base = residual(x)
        units, cols = [], []
        for u in unknowns:
            for k in ks:
                ut = lift(u, k)
                r = residual(_tagged_add(x, ut))
                col = {}
                for key in set(r) | set(base):
                    if orders[key[0]] <= level:
                        v = r.get(key, ZERO) - base.get(key, ZERO)
                        if v:
                            col[key] = v
                cols.append(col)
                units.append(ut)
        targets = sorted({key for key in base if orders[key[0]] <= level} |
                         {key for c in cols for key in c}, key=repr)
        if not targets:
            continue
        index = {key: i for i, key in enumerate(targets)}
        rows = [dict() for _ in targets]
        for j, c in enumerate(cols):
            for key, v in c.items():
                rows[index[key]][j] = v
        rhs = [-base.get(key, ZERO) for key in targets]
        sol = solve(rows, len(units), rhs)
        if sol is None:
            return None
        for c, ut in zip(sol, units):
            if c:
                x = _tagged_add(x, {k: f.scale(c) for k, f in ut.items()})
    if any(residual(x).values()):
        return None
    return {k: f for k, f in x.items() if not f.is_zero()}


def _tagged_add(x, y):
    out = dict(x)
    for k, f in y.items():
        out[k] = _fadd(out[k], f) if k in out else f
    return out


def _lift(u, k):
    return {(k, w, key): f for (_, w, key), f in u.items()}


def basis_tensors(g, degree, weights):
    """Basis elements of g^degree at the given weights, as k = 0 tensors."""
    out = []
    for w in weights:
        for key in g.keys():
            for f in g.space(key, w).basis(degree):
                out.append({(0, tuple(w), key): f})
    return out


# --- H^1 of a semicosimplicial DGLA -----------------------------------------

class H1Datum:
    """(l, m) with l in g_0^1 (x) m_A and m in g_1^0 (x) m_A; optional n."""

    def __init__(self, l, m, n=None):
        self.l, self.m, self.n = l, m, n


class H1Functor:
    """Z^1_g and its equivalence for g = a semicosimplicial DGLA V."""

    def __init__(self, V, A, weights):
        self.V, self.A = V, A
        self.weights = [tuple(w) for w in weights]
        self.g = {n: LevelView(V, n) for n in range(3)}

    def push(self, x, i, n):
        return t_push(self.V, x, i, n)

    def eq1(self, l):
        return mc_residual(self.g[0], self.A, l)

    def eq2(self, l, m):
        lhs = self.push(l, 1, 1)
        rhs = gauge_formula(self.g[1], self.A, m, self.push(l, 0, 1))
        return t_clean(t_add(lhs, rhs, -ONE))

    def eq3_lhs(self, m):
        g2, A = self.g[2], self.A
        x = bch(g2, A, self.push(m, 0, 2), t_scale(self.push(m, 1, 2), -ONE))
        return bch(g2, A, x, self.push(m, 2, 2))

    def eq3(self, l, m, n):
        g2 = self.g[2]
        L = self.push(self.push(l, 0, 1), 2, 2)
        rhs = t_add(t_d(g2, n), t_bracket(g2, self.A, L, n))
        return t_clean(t_add(self.eq3_lhs(m), rhs, -ONE))

    def solve_n(self, l, m):
        unknowns = basis_tensors(self.g[2], -1, self._window(m))
        return filtered_solve(self.A, unknowns,
                              lambda n: t_coords(self.g[2], self.eq3(l, m, n), 0))

    def _window(self, *elems):
        ws = set(self.weights)
        for e in elems:
            ws |= {w for (_, w, _) in e}
        return sorted(ws)

    def z1_check(self, datum):
        r1 = self.eq1(datum.l)
        if r1:
            return Verdict("no", ("eq1", sorted(r1)[0]), "d l + 1/2 [l, l] != 0")
        r2 = self.eq2(datum.l, datum.m)
        if r2:
            return Verdict("no", ("eq2", sorted(r2)[0]), "delta^1 l != e^m * delta^0 l")
        if datum.n is not None and not self.eq3(datum.l, datum.m, datum.n):
            return Verdict("yes", detail="all three equations hold", data={"n": datum.n})
        n = self.solve_n(datum.l, datum.m)
        if n is None:
            return Verdict("no", "eq3", "no n in the weight window solves the third equation")
        return Verdict("yes", detail="all three equations hold", data={"n": n})

    def transform(self, l0, m0, a, b):
        """The datum (l1, m1) related to (l0, m0) by (a, b)."""
        g1, A = self.g[1], self.A
        l1 = gauge_formula(self.g[0], A, a, l0)
        R = t_add(t_d(g1, b), t_bracket(g1, A, self.push(l0, 0, 1), b))
        m1 = bch(g1, A, bch(g1, A, bch(g1, A, self.push(a, 1, 1), m0), R),
                 t_scale(self.push(a, 0, 1), -ONE))
        return l1, m1

    def equiv_residual(self, d0, d1, a, b):
        g1, A = self.g[1], self.A
        r1 = t_add(gauge_formula(self.g[0], A, a, d0.l), d1.l, -ONE)
        lhs = bch(g1, A, t_scale(d0.m, -ONE), t_scale(self.push(a, 1, 1), -ONE))
        lhs = bch(g1, A, bch(g1, A, lhs, d1.m), self.push(a, 0, 1))
        R = t_add(t_d(g1, b), t_bracket(g1, A, self.push(d0.l, 0, 1), b))
        r2 = t_add(lhs, R, -ONE)
        return t_clean(r1), t_clean(r2)

    def h1_equiv(self, d0, d1):
        """Search (a, b) with e^a * l0 = l1 and the m-equation, order by order."""
        ws = self._window(d0.l, d0.m, d1.l, d1.m)
        ua = basis_tensors(self.g[0], 0, ws)
        ub = basis_tensors(self.g[1], -1, ws)
        tag_a = [("a", u) for u in ua] + [("b", u) for u in ub]

        def residual(x):
            a = {k[1:]: f for k, f in x.items() if k[0] == "a"}
            b = {k[1:]: f for k, f in x.items() if k[0] == "b"}
            r1, r2 = self.equiv_residual(d0, d1, a, b)
            out = {}
            for (k, w, key, j), v in t_coords(self.g[0], r1, 1).items():
                out[(k, "l", w, key, j)] = v
            for (k, w, key, j), v in t_coords(self.g[1], r2, 0).items():
                out[(k, "m", w, key, j)] = v
            return out

        unknowns = [{(tag,) + key: f for key, f in u.items()} for tag, u in tag_a]

        def lift(u, k):
            return {(tag, k, w, key): f for (tag, _, w, key), f in u.items()}

        sol = _filtered(self.A, unknowns, residual, {}, lift)
        if sol is None:
            return Verdict("no", None, "no gauge pair found in the weight window")
        a = {k[1:]: f for k, f in sol.items() if k[0] == "a"}
        b = {k[1:]: f for k, f in sol.items() if k[0] == "b"}
        return Verdict("yes", detail="gauge pair found", data={"a": a, "b": b})


# --- tangent spaces --------------------------------------------------------

def _rank_of(cols):
    keys = sorted({k for c in cols for k in c}, key=repr)
    rows = [[c.get(k, ZERO) for c in cols] for k in keys]
    return rank(rows, len(cols)) if rows and cols else 0


def end_tangent_dim(g, A, weight):
    """dim of {MC over A} / gauge at one weight, for A = K[eps], computed by
    running the MC and gauge code on basis vectors."""
    eps = 1
    ones = basis_tensors(g, 1, [weight])
    zeros = basis_tensors(g, 0, [weight])
    mc_cols = [t_coords(g, mc_residual(g, A, _lift(u, eps)), 2) for u in ones]
    keys = sorted({k for c in mc_cols for k in c}, key=repr)
    rows = [{j: c[k] for j, c in enumerate(mc_cols) if k in c} for k in keys]
    Z, _ = nullspace(rows, len(ones))
    gauge_cols = [t_coords(g, gauge_formula(g, A, _lift(u, eps), {}), 1) for u in zeros]
    # express gauge images in the basis of g^1 coordinates
    zc = [_combine(ones, v, eps, g) for v in Z]
    bdim = _rank_of(gauge_cols)
    total = _rank_of(zc + gauge_cols)
    if total != len(Z):
        raise RuntimeError("gauge orbit of 0 leaves the MC locus")
    return len(Z) - bdim


def _combine(basis, vec, k, g):
    x = {}
    for c, u in zip(vec, basis):
        if c:
            x = t_add(x, _lift(u, k), c)
    return t_coords(g, x, 1)


def end_tangent(Q, box, A=None):
    """Sum over weights of dim MC(K[eps]) / gauge for End*(Q), stabilized."""
    from .dgmod import stabilized
    from .homcx import end_dgla
    from .rings import dual_numbers
    A = A or dual_numbers()
    g = GlobalView(end_dgla(Q))

    def table(b):
        return sum(end_tangent_dim(g, A, w) for w in b.points())

    return stabilized(table, box)


def h1_tangent_dim(V, A, weight):
    """dim H^1_V(K[eps]) at one weight by linearizing the Z^1 equations and
    the equivalence transform."""
    eps = 1
    H = H1Functor(V, A, [weight])
    ul = basis_tensors(H.g[0], 1, [weight])
    um = basis_tensors(H.g[1], 0, [weight])
    un = basis_tensors(H.g[2], -1, [weight])
    cols = []
    for kind, u in [("l", v) for v in ul] + [("m", v) for v in um] + [("n", v) for v in un]:
        l = _lift(u, eps) if kind == "l" else {}
        m = _lift(u, eps) if kind == "m" else {}
        n = _lift(u, eps) if kind == "n" else {}
        col = {}
        for key, v in t_coords(H.g[0], H.eq1(l), 2).items():
            col[("1",) + key] = v
        for key, v in t_coords(H.g[1], H.eq2(l, m), 1).items():
            col[("2",) + key] = v
        for key, v in t_coords(H.g[2], H.eq3(l, m, n), 0).items():
            col[("3",) + key] = v
        cols.append(col)
    keys = sorted({k for c in cols for k in c}, key=repr)
    rows = [{j: c[k] for j, c in enumerate(cols) if k in c} for k in keys]
    K, _ = nullspace(rows, len(cols))
    nlm = len(ul) + len(um)
    zdim = rank([v[:nlm] for v in K], nlm) if K and nlm else 0
    # equivalences of the zero datum
    ua = basis_tensors(H.g[0], 0, [weight])
    ub = basis_tensors(H.g[1], -1, [weight])
    bcols = []
    for kind, u in [("a", v) for v in ua] + [("b", v) for v in ub]:
        a = _lift(u, eps) if kind == "a" else {}
        b = _lift(u, eps) if kind == "b" else {}
        l1, m1 = H.transform({}, {}, a, b)
        col = {("l",) + k: v for k, v in t_coords(H.g[0], l1, 1).items()} if l1 else {}
        if m1:
            col.update({("m",) + k: v for k, v in t_coords(H.g[1], m1, 0).items()})
        bcols.append(col)
    return zdim - _rank_of(bcols)


def h1_tangent(V, box, A=None):
    from .dgmod import stabilized
    from .rings import dual_numbers
    A = A or dual_numbers()
    return stabilized(lambda b: sum(h1_tangent_dim(V, A, w) for w in b.points()), box)


def gauge_act(g, A, a, l, method="auto"):
    """e^a * l: by conjugation when g is an End complex, else by the formula."""
    if method == "conjugate" or (method == "auto" and isinstance(g, GlobalView)):
        return gauge_conjugate(g, A, a, l)
    return gauge_formula(g, A, a, l)


def tangent_and_classes(obj, box, A=None, mode="dimension"):
    """Tangent data of the deformation functor of obj (an A-module Q giving
    End*(Q), or a semicosimplicial DGLA giving H^1).  Only dimensions are
    reported: the base field is Q, so the sets of classes are infinite.

    Returns {"dim": d, "box": box used, "converged": bool}.
    """
    if mode != "dimension":
        raise ValueError("class enumeration needs a finite base field; only dimensions over Q")
    if hasattr(obj, "tuples"):
        dim, used, conv = h1_tangent(obj, box, A)
    else:
        dim, used, conv = end_tangent(obj, box, A)
    return {"dim": dim, "box": used, "converged": conv}
