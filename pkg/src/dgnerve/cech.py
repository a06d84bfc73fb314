"""Semicosimplicial DG-Lie algebras over the nerve, their total complexes,
Ext through three models, and a truncated Thom-Whitney totalization.

Level n of a semicosimplicial object V is a product over ordered tuples
(j_0..j_n) whose underlying set is a simplex; the normalized view keeps only
strictly increasing tuples.  An element of a level is a dict tuple -> Family.
The coface delta^k sends x to the level whose component at t is the push of
x at t minus its k-th entry.
"""

from itertools import combinations

from .amod import (locally_free_replacement, locally_free_resolution, module_compat,
                   upsilon_star, cofibrant_replace)
from .dgmod import left_inverse, stabilized
from .forms import PolyForms
from .homcx import Family, HomComplex, differential_family, graded_commutator
from .linalg import ONE, ZERO, rank
from .nerve import opens_above, ordered_nerve


def _under(t):
    return tuple(sorted(set(t)))


def _drop(t, k):
    return t[:k] + t[k + 1:]


class SemiCosimplicial:
    """Common machinery; subclasses define spaces and pushes."""

    def __init__(self, nerve, rank_):
        self.nerve = nerve
        self.rank = rank_
        self._spaces = {}

    def tuples(self, n, strict=True):
        return ordered_nerve(self.nerve, n, strict=strict)

    def space(self, simplex, weight):
        key = (tuple(simplex), tuple(weight))
        if key not in self._spaces:
            self._spaces[key] = self._make_space(*key)
        return self._spaces[key]

    def d(self, f):
        return graded_commutator(self.dfam, f)

    def bracket(self, f, g):
        return graded_commutator(f, g)

    def coface(self, k, x, n, strict=True):
        """delta^k from level n-1 to level n."""
        out = {}
        for t in self.tuples(n, strict):
            s = _drop(t, k)
            if s in x:
                out[t] = self.push(_under(s), _under(t), x[s])
        return out

    def pushforward(self, f, x, n, strict=False):
        """f_* for an injective monotone f: [k] -> [n] (tuple of images)."""
        out = {}
        for t in self.tuples(n, strict):
            s = tuple(t[i] for i in f)
            if s in x:
                out[t] = self.push(_under(s), _under(t), x[s])
        return out

    def level_basis(self, n, p, weight, strict=True):
        """Basis of level n in internal degree p: (tuple, Family) pairs."""
        out = []
        for t in self.tuples(n, strict):
            for b in self.space(_under(t), weight).basis(p):
                out.append((t, b))
        return out


class LocalEndSystem(SemiCosimplicial):
    """L: level n is the product of End*(Q)_alpha over tuples, cofaces restrict."""

    def __init__(self, Q):
        super().__init__(Q.nerve, next(iter(Q.rings.values())).rank)
        self.Q = Q
        self.dfam = differential_family({g: Q.value(g) for g in Q.values})

    def _make_space(self, simplex, weight):
        ss = [g for g in opens_above(self.nerve, simplex) if g in self.Q.values]
        mods = {g: self.Q.value(g) for g in ss}
        return HomComplex(mods, mods, module_compat(self.Q, self.Q, ss), weight)

    def push(self, beta, alpha, f):
        if beta == alpha:
            return f
        return f.restrict(set(opens_above(self.nerve, alpha)))

    def include(self, f):
        """g: End*(Q) -> level 0, restriction to each V_i."""
        return {t: self.push((), t, f) for t in self.tuples(0)}


class ChartEndSystem(SemiCosimplicial):
    """h: level n is the product of End(E_alpha) over tuples, cofaces
    conjugate by the transition maps of E."""

    def __init__(self, E):
        super().__init__(E.nerve, next(iter(E.rings.values())).rank)
        self.E = E
        for V in E.values.values():
            if not V.is_free():
                raise ValueError("chart End system needs pointwise free values")
        self.dfam = differential_family({g: E.value(g) for g in E.values})
        self._inv = {}

    def _make_space(self, simplex, weight):
        mods = {simplex: self.E.value(simplex)}
        return HomComplex(mods, mods, [], weight)

    def transition(self, beta, alpha):
        """(t, t^{-1}) per cohomological degree for beta < alpha."""
        if (beta, alpha) not in self._inv:
            f = self.E.map(beta, alpha)
            inv = {}
            for i, c in f.comps.items():
                r = left_inverse(c)
                if r is None:
                    raise ValueError(f"transition {beta} -> {alpha} is not invertible")
                inv[i] = r
            self._inv[(beta, alpha)] = (f, inv)
        return self._inv[(beta, alpha)]

    def push(self, beta, alpha, f):
        if beta == alpha:
            return f
        t, inv = self.transition(beta, alpha)
        comps = {}
        for i, m in f.comps.get(beta, {}).items():
            if i in inv and i + f.degree in t.comps:
                comps[i] = t.comps[i + f.degree].compose(m).compose(inv[i])
        return Family(f.degree, f.weight, {alpha: comps} if comps else {})

    def check_invertible(self):
        for (b, a) in self.E.maps:
            t, inv = self.transition(b, a)
            for i, r in inv.items():
                one = t.comps[i].compose(r)
                for g, col in enumerate(one.cols):
                    if not one.tgt.piece(one.tgt.degrees[g]).project(col) == \
                            one.tgt.piece(one.tgt.degrees[g]).project({g: ONE}):
                        return False
        return True


def build_L(Q):
    return LocalEndSystem(Q)


def build_h(E):
    return ChartEndSystem(E)


# --- total complex ---------------------------------------------------------

class TotalComplex:
    """C(V) at one weight: C^p = sum over n of level n in degree p - n.

    D(x)_n = (-1)^n d x_n + sum_i (-1)^i delta^i x_{n-1}.
    """

    def __init__(self, V, weight, level_cap=None, strict=True):
        self.V = V
        self.weight = tuple(weight)
        self.strict = strict
        self.cap = level_cap if level_cap is not None else V.nerve.max_deg()
        self._blocks = {}

    def internal_degrees(self):
        degs = set()
        for n in range(self.cap + 1):
            for t in self.V.tuples(n, self.strict):
                degs |= set(self.V.space(_under(t), self.weight).degrees)
        return degs

    def degrees(self):
        ds = self.internal_degrees()
        if not ds:
            return []
        return list(range(min(ds), max(ds) + self.cap + 1))

    def basis(self, p):
        if p not in self._blocks:
            out = []
            for n in range(self.cap + 1):
                for t, b in self.V.level_basis(n, p - n, self.weight, self.strict):
                    out.append((n, t, b))
            self._blocks[p] = out
        return self._blocks[p]

    def D(self, x):
        """x: dict n -> level element (dict tuple -> Family)."""
        out = {}
        for n in range(self.cap + 1):
            comp = {}
            sign = -ONE if n % 2 else ONE
            for t, f in x.get(n, {}).items():
                _acc(comp, t, self.V.d(f).scale(sign))
            if n >= 1 and n - 1 in x:
                for i in range(n + 1):
                    s = -ONE if i % 2 else ONE
                    for t, f in self.V.coface(i, x[n - 1], n, self.strict).items():
                        _acc(comp, t, f.scale(s))
            if comp:
                out[n] = comp
        return out

    def coords(self, x, p):
        """Coordinates of x (total degree p) in basis(p)."""
        out = []
        seen = set()
        for n, t, _ in self.basis(p):
            if (n, t) in seen:
                continue
            seen.add((n, t))
            sp = self.V.space(_under(t), self.weight)
            f = x.get(n, {}).get(t)
            dim = sp.dim(p - n)
            out += sp.coords(f) if f is not None else [ZERO] * dim
        return out

    def matrix(self, p):
        cols = [self.coords(self.D({n: {t: b}}), p + 1) for n, t, b in self.basis(p)]
        nrows = len(self.basis(p + 1))
        return [[c[r] for c in cols] for r in range(nrows)]

    def cohomology(self):
        degs = self.degrees()
        rk = {}
        for p in degs:
            m = self.matrix(p)
            rk[p] = rank(m, len(self.basis(p))) if m and self.basis(p) else 0
        out = {}
        for p in degs:
            h = len(self.basis(p)) - rk[p] - rk.get(p - 1, 0)
            if h:
                out[p] = h
        return out

    def square_zero(self):
        for p in self.degrees():
            for n, t, b in self.basis(p):
                dd = self.D(self.D({n: {t: b}}))
                if any(not f.is_zero() for comp in dd.values() for f in comp.values()):
                    return False
        return True


def _acc(comp, t, f):
    if t in comp:
        comp[t] = _fam_add(comp[t], f)
    else:
        comp[t] = f


def _fam_add(a, b):
    if a.weight != b.weight:
        if not b.comps:
            return a
        if not a.comps:
            return b
    return a + b


def total_complex(V, weight, level_cap=None):
    return TotalComplex(V, weight, level_cap)


def total_table(V, box, level_cap=None):
    def table(b):
        out = {}
        for w in b.points():
            for p, h in TotalComplex(V, w, level_cap).cohomology().items():
                out[p] = out.get(p, 0) + h
        return out
    return stabilized(table, box)


# --- Ext through the three models ------------------------------------------

MODELS = ("end_of_Q", "C_of_L", "C_of_h")


def replacement(sheaf, box=None):
    """A cofibrant replacement of the sheaf: the locally free replacement of
    a known locally free resolution, else Reedy cell attachment."""
    try:
        E = locally_free_resolution(sheaf)
    except ValueError:
        if box is None:
            raise
        return cofibrant_replace(upsilon_star(sheaf), box).src
    return locally_free_replacement(E).src


def ext_dims(sheaf, model, box):
    """Ext^k(F, F) table summed over the weights of the box, stabilized.

    Returns (table, box used, converged).
    """
    if model == "end_of_Q":
        from .homcx import end_table
        return end_table(replacement(sheaf, box), box)
    if model == "C_of_L":
        return total_table(build_L(replacement(sheaf, box)), box)
    if model == "C_of_h":
        return total_table(build_h(locally_free_resolution(sheaf)), box)
    raise ValueError(f"unknown model {model!r}")


# --- Thom-Whitney totalization ---------------------------------------------

class TWElement:
    """levels[n][t] = {form key: Family}: the Omega_n (x) V_n part at tuple t."""

    def __init__(self, V, weight, cap, levels=None):
        self.V, self.weight, self.cap = V, tuple(weight), cap
        self.levels = levels or {n: {} for n in range(cap + 1)}

    def add_term(self, n, t, form, fam):
        slot = self.levels.setdefault(n, {}).setdefault(t, {})
        for key, c in form.items():
            f = fam.scale(c)
            slot[key] = _fam_add(slot[key], f) if key in slot else f

    def __add__(self, other):
        out = TWElement(self.V, self.weight, self.cap)
        for x in (self, other):
            for n, lev in x.levels.items():
                for t, terms in lev.items():
                    for key, f in terms.items():
                        out.add_term(n, t, {key: ONE}, f)
        return out

    def scale(self, c):
        out = TWElement(self.V, self.weight, self.cap)
        for n, lev in self.levels.items():
            for t, terms in lev.items():
                for key, f in terms.items():
                    out.add_term(n, t, {key: c}, f)
        return out

    def d(self):
        """(d_Omega (x) 1 + 1 (x) d_V) with the Koszul sign on the second term."""
        out = TWElement(self.V, self.weight, self.cap)
        for n, lev in self.levels.items():
            P = PolyForms(n)
            for t, terms in lev.items():
                for key, f in terms.items():
                    out.add_term(n, t, P.d({key: ONE}), f)
                    sign = -ONE if len(key[1]) % 2 else ONE
                    out.add_term(n, t, {key: sign}, self.V.d(f))
        return out

    def bracket(self, other):
        """(w (x) x)(e (x) y) -> (-1)^{|x||e|} w e (x) [x, y]."""
        out = TWElement(self.V, self.weight, self.cap)
        for n, lev in self.levels.items():
            P = PolyForms(n)
            olev = other.levels.get(n, {})
            for t, terms in lev.items():
                for k1, f in terms.items():
                    for k2, g in olev.get(t, {}).items():
                        sign = -ONE if (f.degree * len(k2[1])) % 2 else ONE
                        form = P.scale(P.mul({k1: ONE}, {k2: ONE}), sign)
                        out.add_term(n, t, form, self.V.bracket(f, g))
        return out

    def is_zero(self):
        return all(f.is_zero() for lev in self.levels.values() for terms in lev.values()
                   for f in terms.values())

    def poly_degree(self):
        return max((sum(k[0]) for lev in self.levels.values() for terms in lev.values()
                    for k in terms), default=0)

    def compatibility_defects(self):
        """Triples (n, k, t) where (delta_k^* (x) 1) x_n != (1 (x) delta^k) x_{n-1}."""
        bad = []
        for n in range(1, self.cap + 1):
            P = PolyForms(n)
            for k in range(n + 1):
                left = {}
                for t, terms in self.levels.get(n, {}).items():
                    for key, f in terms.items():
                        for k2, c in P.face(k, {key: ONE}).items():
                            _acc_terms(left, t, k2, f.scale(c))
                right = {}
                prev = {}
                for s, terms in self.levels.get(n - 1, {}).items():
                    for key, f in terms.items():
                        prev.setdefault(key, {})[s] = f
                for key, x in prev.items():
                    for t, f in self.V.coface(k, x, n, strict=False).items():
                        _acc_terms(right, t, key, f)
                for t in set(left) | set(right):
                    keys = set(left.get(t, {})) | set(right.get(t, {}))
                    for key in keys:
                        a = left.get(t, {}).get(key)
                        b = right.get(t, {}).get(key)
                        diff = a if b is None else (b.scale(-ONE) if a is None else _fam_add(a, -b))
                        if not diff.is_zero():
                            bad.append((n, k, t))
                            break
        return bad


def _acc_terms(store, t, key, f):
    slot = store.setdefault(t, {})
    slot[key] = _fam_add(slot[key], f) if key in slot else f


def whitney_integrate(x):
    """Component n: integral over Delta^n of the top-degree part of x_n."""
    out = {}
    for n, lev in x.levels.items():
        P = PolyForms(n)
        comp = {}
        for t, terms in lev.items():
            for key, f in terms.items():
                c = P.integrate({key: ONE})
                if c:
                    _acc(comp, t, f.scale(c))
        if comp:
            out[n] = comp
    return out


def tw_lift(V, w, weight, cap):
    """g-hat(w) = (1 (x) g(w), 1 (x) delta g(w), ...) for g = inclusion into level 0."""
    x = TWElement(V, weight, cap)
    g = V.include(w)
    for n in range(cap + 1):
        lev = V.pushforward((0,), {(j,): g[(j,)] for j in V.nerve.vertices}, n) if n else g
        for t, f in lev.items():
            x.add_term(n, t, PolyForms(n).one(), f)
    return x


def whitney_element(V, k, s, v, weight, cap, scalar=None):
    """E(v) = sum over injective monotone f: [k] -> [n] of w_f (x) f_* v, for v
    at tuple s of level k, optionally multiplied by a compatible scalar
    family scalar(P) of forms (such as psi or d psi)."""
    x = TWElement(V, weight, cap)
    for n in range(k, cap + 1):
        P = PolyForms(n)
        for f in combinations(range(n + 1), k + 1):
            form = P.whitney(f)
            if scalar is not None:
                form = P.mul(scalar(P), form)
            if not form:
                continue
            for t, fam in V.pushforward(f, {s: v}, n).items():
                x.add_term(n, t, form, fam)
    return x


def full_total_D(V, y, cap):
    """D on the full (repeated tuple) total complex, components n <= cap."""
    T = TotalComplex(V, (0,) * V.rank, cap, strict=False)
    return T.D(y)


def totals_equal(a, b):
    for n in set(a) | set(b):
        A, B = a.get(n, {}), b.get(n, {})
        for t in set(A) | set(B):
            x, y = A.get(t), B.get(t)
            if x is None:
                if not y.is_zero():
                    return False
            elif y is None:
                if not x.is_zero():
                    return False
            elif not _fam_add(x, -y).is_zero():
                return False
    return True
