"""Exact linear algebra over the rationals.

Vectors are dense lists of Fraction; matrices are lists of rows.  The
elimination works on sparse row dictionaries internally because nearly
every matrix this package builds is very sparse.
"""

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def _sparse(row):
    if isinstance(row, dict):
        return {c: Fraction(v) for c, v in row.items() if v}
    return {c: Fraction(v) for c, v in enumerate(row) if v}


class Echelon:
    """Incrementally maintained reduced row echelon basis of a span."""

    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = {}  # pivot column -> row dict with 1 at the pivot

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residual of `vec` modulo the span, as a sparse dict."""
        r = _sparse(vec)
        for p in sorted(r):
            if p in self.rows and p in r:
                c = r[p]
                for k, v in self.rows[p].items():
                    nv = r.get(k, ZERO) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        return r

    def add(self, vec):
        """Insert `vec`; return True if it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {k: v * inv for k, v in r.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                for k, v in r.items():
                    nv = row.get(k, ZERO) - c * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        self.rows[p] = r
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    def pivots(self):
        return sorted(self.rows)

    def basis(self):
        out = []
        for p in sorted(self.rows):
            v = [ZERO] * self.ncols
            for k, c in self.rows[p].items():
                v[k] = c
            out.append(v)
        return out


def dense(d, n):
    v = [ZERO] * n
    for k, c in d.items():
        v[k] = c
    return v


def rank(rows, ncols=None):
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0]) if not isinstance(rows[0], dict) else 1 + max(
            (max(r) for r in rows if r), default=-1)
    e = Echelon(ncols)
    for r in rows:
        e.add(r)
    return len(e)


def rref(rows, ncols):
    """Return (basis rows, pivot columns) of the row space."""
    e = Echelon(ncols)
    for r in rows:
        e.add(r)
    return e.basis(), e.pivots()


def nullspace(rows, ncols):
    """Basis of {x : A x = 0}.

    Basis vector k has a 1 in its free column and 0 in the other free
    columns, so coordinates of a kernel vector are read off the free columns
    returned alongside.
    """
    e = Echelon(ncols)
    for r in rows:
        e.add(r)
    piv = set(e.rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for p, row in e.rows.items():
            c = row.get(f)
            if c:
                v[p] = -c
        basis.append(v)
    return basis, free


def solve(rows, ncols, rhs):
    """One solution x of A x = rhs, or None."""
    aug = []
    for r, b in zip(rows, rhs):
        d = _sparse(r)
        if b:
            d[ncols] = Fraction(b)
        aug.append(d)
    e = Echelon(ncols + 1)
    for r in aug:
        e.add(r)
    if ncols in e.rows:
        return None
    x = [ZERO] * ncols
    for p, row in e.rows.items():
        x[p] = row.get(ncols, ZERO)
    return x


def matmul(a, b):
    """Dense product; `a` is m x k and `b` is k x n (lists of rows)."""
    if not a:
        return []
    n = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [ZERO] * n
        for k, c in enumerate(row):
            if c:
                for j, v in enumerate(b[k]):
                    if v:
                        acc[j] += c * v
        out.append(acc)
    return out


def matvec(a, v):
    return [sum((c * x for c, x in zip(row, v) if c and x), ZERO) for row in a]


def is_zero_matrix(a):
    return all(not c for row in a for c in row)


def smith_diagonal(mat):
    """Nonzero invariant factors of an integer matrix (Smith normal form)."""
    a = [[int(x) for x in row] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # pick smallest nonzero entry as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        done = False
        while not done:
            done = True
            p = a[t][t]
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    done = False
                    break
            if not done:
                continue
            p = a[t][t]
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                    done = False
                    break
            if not done:
                continue
            # divisibility of the remaining block
            p = a[t][t]
            for i in range(t + 1, m):
                if any(x % p for x in a[i][t + 1:]):
                    a[t] = [x + y for x, y in zip(a[t], a[i])]
                    done = False
                    break
        diag.append(abs(a[t][t]))
        t += 1
    return diag
