"""Monomial chart rings and finite dimensional Artin coefficient rings."""

from collections import deque
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .linalg import Echelon, ZERO, ONE


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vneg(a):
    return tuple(-x for x in a)


class MonomialRing:
    """K[S] for a finitely generated submonoid S of Z^n, K = Q.

    Membership in S is decided by breadth first search over lattice points
    of a window around 0 and the target, padded by rank * max generator
    norm + 1; by a Steinitz-type reordering argument any representation can
    be walked inside that window.
    """

    def __init__(self, generators, rank=None, name=None):
        gens = [tuple(int(x) for x in g) for g in generators]
        if rank is None:
            if not gens:
                raise ValueError("rank needed when there are no generators")
            rank = len(gens[0])
        if any(len(g) != rank for g in gens):
            raise ValueError("generators of mixed length")
        self.rank = rank
        self.gens = tuple(sorted(set(g for g in gens if any(g))))
        self.name = name or "K[" + ",".join(str(g) for g in self.gens) + "]"
        self._cache = {}
        self._norm = max((max(abs(x) for x in g) for g in self.gens), default=0)

    def __repr__(self):
        return f"MonomialRing({self.name})"

    def __eq__(self, other):
        return isinstance(other, MonomialRing) and self.rank == other.rank and \
            self.gens == other.gens

    def __hash__(self):
        return hash((self.rank, self.gens))

    def contains(self, m):
        m = tuple(m)
        hit = self._cache.get(m)
        if hit is None:
            hit = self._search(m)
            self._cache[m] = hit
        return hit

    def _search(self, m):
        if not any(m):
            return True
        if not self.gens:
            return False
        pad = self.rank * self._norm + 1
        lo = tuple(min(0, x) - pad for x in m)
        hi = tuple(max(0, x) + pad for x in m)
        zero = (0,) * self.rank
        seen = {zero}
        queue = deque([zero])
        while queue:
            p = queue.popleft()
            for g in self.gens:
                q = vadd(p, g)
                if q == m:
                    return True
                if q in seen or any(x < a or x > b for x, a, b in zip(q, lo, hi)):
                    continue
                seen.add(q)
                queue.append(q)
        return False

    def is_unit(self, m):
        return self.contains(m) and self.contains(vneg(m))

    def piece_dim(self, m):
        return 1 if self.contains(m) else 0

    def unit_gens(self):
        return [g for g in self.gens if self.is_unit(g)]

    def grading_functional(self):
        """An integer vector l with l(g) >= 0 on generators, > 0 on non-units.

        Used to order work so that divisors are visited before multiples.
        """
        return _functional(self.gens, tuple(self.is_unit(g) for g in self.gens), self.rank)

    def includes(self, other):
        return self.rank == other.rank and all(self.contains(g) for g in other.gens)


@lru_cache(maxsize=None)
def _functional(gens, units, rank):
    best = None
    for r in range(0, 4):
        for l in product(range(-r, r + 1), repeat=rank):
            vals = [sum(a * b for a, b in zip(l, g)) for g in gens]
            if all(v >= 0 for v in vals) and all(v > 0 for v, u in zip(vals, units) if not u):
                key = (sum(abs(x) for x in l), l)
                if best is None or key < best[0]:
                    best = (key, l)
        if best is not None:
            return best[1]
    return (0,) * rank


def chart_ring(generators, rank=None, name=None):
    return MonomialRing(generators, rank=rank, name=name)


def ring_sum(rings, name=None):
    """Monoid sum of several charts: the ring of their intersection."""
    gens = [g for r in rings for g in r.gens]
    return MonomialRing(gens, rank=rings[0].rank, name=name)


class RingMap:
    """Inclusion K[S] -> K[T] for S contained in T."""

    def __init__(self, source, target):
        if source.rank != target.rank:
            raise ValueError("lattice rank mismatch")
        if not target.includes(source):
            raise ValueError("source monoid not contained in target monoid")
        self.source = source
        self.target = target

    def is_identity(self):
        return self.source.includes(self.target)


# --- Artin rings -----------------------------------------------------------

class ArtinError(ValueError):
    pass


class ArtinRing:
    """Finite dimensional local K-algebra, basis index 0 is the unit.

    mult[i][j] is the coordinate vector of e_i e_j.  Elements are tuples of
    Fractions of length dim.
    """

    def __init__(self, names, mult):
        self.names = tuple(names)
        self.dim = len(self.names)
        self.mult = [[tuple(Fraction(x) for x in mult[i][j]) for j in range(self.dim)]
                     for i in range(self.dim)]
        self._validate()
        self.nu = self._nilpotency()
        self.order = self._orders()

    def unit(self):
        return self.basis(0)

    def basis(self, i):
        return tuple(ONE if k == i else ZERO for k in range(self.dim))

    def zero(self):
        return (ZERO,) * self.dim

    def mul(self, a, b):
        out = [ZERO] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                for k, z in enumerate(self.mult[i][j]):
                    if z:
                        out[k] += x * y * z
        return tuple(out)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _validate(self):
        d = self.dim
        e = [self.basis(i) for i in range(d)]
        for i in range(d):
            if self.mul(e[0], e[i]) != e[i] or self.mul(e[i], e[0]) != e[i]:
                raise ArtinError("basis element 0 is not a unit")
        for i in range(d):
            for j in range(d):
                if self.mul(e[i], e[j]) != self.mul(e[j], e[i]):
                    raise ArtinError("not commutative")
                for k in range(d):
                    if self.mul(self.mul(e[i], e[j]), e[k]) != self.mul(e[i], self.mul(e[j], e[k])):
                        raise ArtinError("not associative")
        # maximal ideal = span(e_1..): must be closed and carry no unit part
        for i in range(1, d):
            for j in range(1, d):
                if self.mult[i][j][0]:
                    raise ArtinError("products in the maximal ideal leave it")

    def _nilpotency(self):
        """Smallest nu with m^nu = 0."""
        d = self.dim
        if d == 1:
            return 1
        cur = [self.basis(i) for i in range(1, d)]
        k = 1
        while True:
            nxt = Echelon(d)
            for a in cur:
                for i in range(1, d):
                    nxt.add(list(self.mul(a, self.basis(i))))
            k += 1
            if len(nxt) == 0:
                return k
            if k > d + 1:
                raise ArtinError("maximal ideal is not nilpotent")
            cur = [tuple(v) for v in nxt.basis()]

    def _orders(self):
        """m-adic order of each basis element (largest k with e_i in m^k)."""
        d = self.dim
        powers = [None, Echelon(d)]
        for i in range(1, d):
            powers[1].add(list(self.basis(i)))
        for k in range(2, self.nu + 1):
            e = Echelon(d)
            for v in powers[k - 1].basis():
                for i in range(1, d):
                    e.add(list(self.mul(tuple(v), self.basis(i))))
            powers.append(e)
        out = [0]
        for i in range(1, d):
            k = 1
            while k + 1 < len(powers) and powers[k + 1].contains(list(self.basis(i))):
                k += 1
            out.append(k)
        return tuple(out)

    def __repr__(self):
        return f"ArtinRing({', '.join(self.names)}; nu={self.nu})"


def truncated_poly(k, var="t"):
    """K[t]/t^k."""
    names = ["1"] + [var if i == 1 else f"{var}^{i}" for i in range(1, k)]
    mult = [[[1 if c == i + j else 0 for c in range(k)] if i + j < k else [0] * k
             for j in range(k)] for i in range(k)]
    return ArtinRing(names, mult)


def dual_numbers():
    return truncated_poly(2, "eps")


def artin_ring(kind, k=None, names=None, table=None):
    if kind == "dual_numbers":
        return dual_numbers()
    if kind == "truncated_poly":
        if k is None or k < 1:
            raise ArtinError("truncated_poly needs k >= 1")
        return truncated_poly(k)
    if kind == "explicit":
        return ArtinRing(names, table)
    raise ArtinError(f"unknown Artin ring kind {kind!r}")


def square_zero(nvars, var_names=None):
    """K[x_1..x_r]/(all degree-two monomials)."""
    var_names = var_names or [f"x{i}" for i in range(1, nvars + 1)]
    d = nvars + 1
    mult = [[[0] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        mult[0][i][i] = 1
        mult[i][0][i] = 1
    return ArtinRing(["1"] + list(var_names), mult)
