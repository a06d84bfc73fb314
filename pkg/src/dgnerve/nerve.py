"""Nerve of a finite open cover and the combinatorics built on it.

A simplex is a sorted tuple of open indices.  The index order used for
orientation is the natural order of the integers 0..N-1, fixed when the
cover is described.
"""

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

from .linalg import smith_diagonal


class NerveError(ValueError):
    pass


@dataclass(frozen=True)
class CoverDescription:
    """Open names plus the nonempty intersections (None means all of them)."""

    open_names: tuple
    nonempty_intersections: frozenset = None

    def __post_init__(self):
        object.__setattr__(self, "open_names", tuple(self.open_names))
        if self.nonempty_intersections is not None:
            sets = frozenset(tuple(sorted(s)) for s in self.nonempty_intersections)
            object.__setattr__(self, "nonempty_intersections", sets)


@dataclass(frozen=True)
class Nerve:
    names: tuple
    simplices: tuple
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.simplices)})

    @property
    def size(self):
        return len(self.names)

    @property
    def vertices(self):
        return tuple(range(len(self.names)))

    def __contains__(self, alpha):
        return tuple(alpha) in self._index

    def __iter__(self):
        return iter(self.simplices)

    def __len__(self):
        return len(self.simplices)

    @staticmethod
    def deg(alpha):
        return len(alpha) - 1

    @staticmethod
    def le(alpha, beta):
        return set(alpha) <= set(beta)

    def index(self, alpha):
        return self._index[tuple(alpha)]

    def max_deg(self):
        return max(len(s) for s in self.simplices) - 1

    def of_degree(self, k):
        return [s for s in self.simplices if len(s) == k + 1]

    def pairs(self):
        """All pairs alpha < beta (strict containment)."""
        return [(a, b) for a in self.simplices for b in self.simplices
                if len(a) < len(b) and set(a) <= set(b)]


def _order_key(s):
    return (len(s), s)


def build_nerve(cover):
    n = len(cover.open_names)
    if n < 1:
        raise NerveError("a cover needs at least one open")
    if cover.nonempty_intersections is None:
        sims = [c for k in range(1, n + 1) for c in combinations(range(n), k)]
    else:
        sims = set(cover.nonempty_intersections)
        for s in list(sims):
            if not s or any(i < 0 or i >= n for i in s):
                raise NerveError(f"bad intersection {s}")
        sims |= {(i,) for i in range(n)}
        for s in sims:
            for k in range(1, len(s)):
                for f in combinations(s, k):
                    if f not in sims:
                        raise NerveError(f"{s} listed but its face {f} is not")
    return Nerve(tuple(cover.open_names), tuple(sorted(sims, key=_order_key)))


def full_nerve(n, names=None):
    names = names or tuple(f"U{i}" for i in range(n))
    return build_nerve(CoverDescription(names))


def ordered_nerve(nerve, n, strict=False):
    """Tuples (j_0..j_n) whose underlying set is a simplex, lexicographic.

    With strict=True only strictly increasing tuples are kept (the
    normalized view).
    """
    if n < 0:
        return []
    if strict:
        return [s for s in sorted(nerve.simplices) if len(s) == n + 1]
    out = []
    for t in product(nerve.vertices, repeat=n + 1):
        if tuple(sorted(set(t))) in nerve:
            out.append(t)
    return out


def coface_map(k, n):
    """The map delta^k: [n-1] -> [n] skipping k, as a tuple of images."""
    if not 0 <= k <= n:
        raise ValueError("coface index out of range")
    return tuple(i if i < k else i + 1 for i in range(n))


def coface_reindex(f, tup):
    """Pull a tuple back along a monotone map f: [n] -> [m]."""
    f = tuple(f)
    if any(f[i] > f[i + 1] for i in range(len(f) - 1)):
        raise ValueError(f"map {f} is not monotone")
    if f and (f[0] < 0 or f[-1] >= len(tup)):
        raise ValueError("map image outside the tuple")
    return tuple(tup[i] for i in f)


def strict_subfaces(nerve, alpha):
    a = set(alpha)
    return [s for s in nerve.simplices if set(s) < a]


def opens_above(nerve, alpha):
    a = set(alpha)
    return [s for s in nerve.simplices if a <= set(s)]


@dataclass(frozen=True)
class SimplicialChainComplex:
    """Oriented chains on the faces of one simplex.

    faces[r] lists the (r+1)-element subsets in lexicographic order;
    boundary[r] is the integer matrix C_r -> C_{r-1} (rows index C_{r-1}).
    """

    simplex: tuple
    faces: dict
    boundary: dict

    @property
    def top(self):
        return len(self.simplex) - 1

    def rank(self, r):
        return len(self.faces.get(r, ()))

    def op_rank(self, i):
        """Rank of the cochain reindexing, (C^op)^i = C_{-i}."""
        return self.rank(-i)

    def check_square_zero(self):
        for r in range(2, self.top + 1):
            a, b = self.boundary[r - 1], self.boundary[r]
            for i in range(len(a)):
                for j in range(len(b[0])):
                    if sum(a[i][k] * b[k][j] for k in range(len(b))):
                        return False
        return True

    def homology_ranks(self):
        """Free ranks of H_r computed through Smith normal forms."""
        out = {}
        for r in range(self.top + 1):
            n = self.rank(r)
            rk_out = len(smith_diagonal(self.boundary[r])) if r >= 1 else 0
            rk_in = len(smith_diagonal(self.boundary[r + 1])) if r + 1 <= self.top else 0
            out[r] = n - rk_out - rk_in
        return out

    def torsion(self):
        return [x for r in range(1, self.top + 1)
                for x in smith_diagonal(self.boundary[r]) if x != 1]


def chain_complex(alpha, nerve=None):
    alpha = tuple(sorted(alpha))
    if nerve is not None and alpha not in nerve:
        raise NerveError(f"{alpha} is not a simplex")
    k = len(alpha) - 1
    faces = {r: list(combinations(alpha, r + 1)) for r in range(k + 1)}
    boundary = {}
    for r in range(1, k + 1):
        idx = {s: i for i, s in enumerate(faces[r - 1])}
        mat = [[0] * len(faces[r]) for _ in faces[r - 1]]
        for j, s in enumerate(faces[r]):
            for i in range(len(s)):
                mat[idx[s[:i] + s[i + 1:]]][j] += (-1) ** i
        boundary[r] = mat
    for r in range(k + 1):
        assert len(faces[r]) == comb(k + 1, r + 1)
    return SimplicialChainComplex(alpha, faces, boundary)
