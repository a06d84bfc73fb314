"""Polynomial differential forms on the standard simplices.

A form on Delta^n is a dict {(exponents, dts): coeff} where exponents is a
tuple of length n (powers of t_1..t_n) and dts a strictly increasing tuple of
indices in 1..n.  The coordinate t_0 = 1 - (t_1 + ... + t_n) is eliminated.
"""

from fractions import Fraction
from math import factorial

from .linalg import ONE, ZERO


def _clean(d):
    return {k: v for k, v in d.items() if v}


def _merge_sign(a, b):
    """Sign of sorting the concatenation a + b, or 0 on a repeated index."""
    if set(a) & set(b):
        return 0
    inv = sum(1 for x in a for y in b if x > y)
    return -1 if inv % 2 else 1


class PolyForms:
    """Omega_n with product, d, face pullbacks and integration."""

    def __init__(self, n):
        self.n = n

    def one(self):
        return {((0,) * self.n, ()): ONE}

    def t(self, i):
        """Barycentric coordinate t_i, i in 0..n."""
        z = (0,) * self.n
        if i == 0:
            out = {(z, ()): ONE}
            for j in range(1, self.n + 1):
                out[(self._unit(j), ())] = -ONE
            return out
        return {(self._unit(i), ()): ONE}

    def dt(self, i):
        z = (0,) * self.n
        if i == 0:
            return {(z, (j,)): -ONE for j in range(1, self.n + 1)}
        return {(z, (i,)): ONE}

    def _unit(self, i):
        return tuple(1 if j == i - 1 else 0 for j in range(self.n))

    @staticmethod
    def degree(form):
        degs = {len(k[1]) for k, v in form.items() if v}
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs.pop() if degs else 0

    @staticmethod
    def add(a, b, c=ONE):
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, ZERO) + c * v
        return _clean(out)

    @staticmethod
    def scale(a, c):
        return _clean({k: c * v for k, v in a.items()})

    @staticmethod
    def mul(a, b):
        out = {}
        for (ea, da), x in a.items():
            for (eb, db), y in b.items():
                s = _merge_sign(da, db)
                if not s:
                    continue
                key = (tuple(p + q for p, q in zip(ea, eb)), tuple(sorted(da + db)))
                out[key] = out.get(key, ZERO) + s * x * y
        return _clean(out)

    def d(self, a):
        out = {}
        for (e, dts), c in a.items():
            for j in range(1, self.n + 1):
                p = e[j - 1]
                if not p or j in dts:
                    continue
                sign = -1 if sum(1 for i in dts if i < j) % 2 else 1
                key = (tuple(x - (1 if i == j - 1 else 0) for i, x in enumerate(e)),
                       tuple(sorted(dts + (j,))))
                out[key] = out.get(key, ZERO) + sign * p * c
        return _clean(out)

    def face(self, k, a):
        """Pullback along the face map Delta^{n-1} -> Delta^n missing vertex k."""
        low = PolyForms(self.n - 1)
        # images of t_1..t_n and dt_1..dt_n in Omega_{n-1}
        timg, dimg = {}, {}
        for j in range(1, self.n + 1):
            if j == k:
                timg[j], dimg[j] = {}, {}
            elif k == 0 and j == 1:
                timg[j], dimg[j] = low.t(0), low.dt(0)
            elif j < k:
                timg[j], dimg[j] = low.t(j), low.dt(j)
            else:
                timg[j], dimg[j] = low.t(j - 1), low.dt(j - 1)
        out = {}
        for (e, dts), c in a.items():
            term = low.scale(low.one(), c)
            for j, p in enumerate(e, start=1):
                for _ in range(p):
                    term = low.mul(term, timg[j])
            for j in dts:
                term = low.mul(term, dimg[j])
            out = low.add(out, term)
        return out

    def integrate(self, a):
        """Integral over Delta^n oriented by dt_1 ... dt_n."""
        top = tuple(range(1, self.n + 1))
        total = ZERO
        for (e, dts), c in a.items():
            if dts == top:
                num = 1
                for p in e:
                    num *= factorial(p)
                total += c * Fraction(num, factorial(sum(e) + self.n))
        return total

    def whitney(self, idx):
        """Whitney elementary form of the vertices idx (increasing):
        k! sum_j (-1)^j t_{i_j} dt_{i_0} .. (omit j) .. dt_{i_k}."""
        k = len(idx) - 1
        out = {}
        for j, i in enumerate(idx):
            term = self.t(i)
            for m, i2 in enumerate(idx):
                if m != j:
                    term = self.mul(term, self.dt(i2))
            out = self.add(out, term, Fraction((-1) ** j * factorial(k)))
        return out

    def psi(self):
        """The compatible family sum_i t_i^2."""
        out = {}
        for i in range(self.n + 1):
            out = self.add(out, self.mul(self.t(i), self.t(i)))
        return out

    @staticmethod
    def poly_degree(a):
        return max((sum(e) for (e, _), v in a.items() if v), default=0)
