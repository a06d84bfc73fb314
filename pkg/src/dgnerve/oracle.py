"""Independent brute-force cohomology of monomial line bundles.

The alternating Cech complex of the cover is written down weight by weight
straight from the chart monoids, and ranks are taken with sympy.  Nothing
here goes through A-modules, Hom complexes or the package's own elimination.
"""

from itertools import product

import sympy


def _members(scheme):
    return [s for s in scheme.nerve.simplices]


def line_bundle_cohomology_at(scheme, degrees, m):
    """dims of H^k of the line bundle with chart degrees `degrees` at weight m."""
    sims = _members(scheme)
    by_size = {}
    for s in sims:
        if scheme.rings[s].contains(tuple(x - y for x, y in zip(m, degrees[s[0]]))):
            by_size.setdefault(len(s), []).append(s)
    top = max(len(s) for s in sims)
    dims = {k: len(by_size.get(k + 1, [])) for k in range(top)}
    ranks = {}
    for k in range(top - 1):
        rows, cols = by_size.get(k + 2, []), by_size.get(k + 1, [])
        if not rows or not cols:
            ranks[k] = 0
            continue
        col_index = {s: j for j, s in enumerate(cols)}
        mat = sympy.zeros(len(rows), len(cols))
        for i, s in enumerate(rows):
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                if face in col_index:
                    mat[i, col_index[face]] += (-1) ** j
        ranks[k] = mat.rank()
    return {k: dims[k] - ranks.get(k, 0) - ranks.get(k - 1, 0) for k in range(top)}


def _box_points(lower, upper):
    return list(product(*[range(a, b + 1) for a, b in zip(lower, upper)]))


def line_bundle_cohomology(scheme, degrees, lower, upper):
    total = {}
    for m in _box_points(lower, upper):
        for k, h in line_bundle_cohomology_at(scheme, degrees, m).items():
            if h:
                total[k] = total.get(k, 0) + h
    return total


def cech_oracle(sheaf, box, mode="ext", grow=6):
    """Ext^k(F, F) (mode "ext") or H^k(F) (mode "h") for a sum of monomial
    line bundles, summed over weights; the box grows until two consecutive
    tables agree.  Returns (table, converged)."""
    if sheaf.kind != "toric_line_bundle":
        raise ValueError("the oracle handles sums of line bundles only")
    scheme = sheaf.scheme
    summands = sheaf.data["degrees"]
    if mode == "ext":
        pairs = [{j: tuple(b - a for a, b in zip(A[j], B[j])) for j in A} for A in summands for B in summands]
    elif mode == "h":
        pairs = summands
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")
    lower, upper = list(box.lower), list(box.upper)

    def table(lo, hi):
        out = {}
        for deg in pairs:
            for k, h in line_bundle_cohomology(scheme, deg, lo, hi).items():
                out[k] = out.get(k, 0) + h
        return out

    prev = table(lower, upper)
    for _ in range(grow):
        lower = [x - 1 for x in lower]
        upper = [x + 1 for x in upper]
        cur = table(lower, upper)
        if cur == prev:
            return cur, True
        prev = cur
    return prev, False


def koszul_ext_on_line(wmin=-4, wmax=4):
    """Ext*_{K[u]}(K, K) by direct elimination on End of [K[u] -u-> K[u]].

    Hom^p per weight w: the four matrix entries with their monomial degrees
    (generator degrees 1 in cohomological degree -1 and 0 in degree 0).
    """
    degs = {-1: 1, 0: 0}
    total = {}
    for w in range(wmin, wmax + 1):
        # basis of Hom^p_w: maps from gen in degree i to gen in degree i+p
        # present when target degree <= source degree + w (monomial u^k, k >= 0)
        space = {}
        for i, j in product(degs, degs):
            if degs[i] + w - degs[j] >= 0:
                space.setdefault(j - i, []).append((i, j))
        dims = {p: len(v) for p, v in space.items()}
        ranks = {}
        for p, basis in space.items():
            target = space.get(p + 1, [])
            if not target:
                ranks[p] = 0
                continue
            mat = sympy.zeros(len(target), len(basis))
            for c, (i, j) in enumerate(basis):
                # f: e_i -> e_j.  df = f d - (-1)^p d f, d: e_{-1} -> e_0 by u
                if i == 0 and (-1, j) in target:
                    mat[target.index((-1, j)), c] += 1
                if j == -1 and (i, 0) in target:
                    mat[target.index((i, 0)), c] -= (-1) ** p
            ranks[p] = mat.rank()
        for p in dims:
            h = dims[p] - ranks.get(p, 0) - ranks.get(p - 1, 0)
            if h:
                total[p] = total.get(p, 0) + h
    return total
