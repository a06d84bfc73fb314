"""Small invariant suites run by the selftest command."""

from fractions import Fraction


def _forms(rng):
    from .forms import PolyForms
    P, L = PolyForms(2), PolyForms(1)
    a = {((rng.randint(0, 2), rng.randint(0, 2)), (1,)): Fraction(rng.randint(1, 5))}
    b = {((rng.randint(0, 2), 0), ()): Fraction(rng.randint(1, 5))}
    ok = P.d(P.d(b)) == {} and all(
        P.face(k, P.mul(a, b)) == L.mul(P.face(k, a), P.face(k, b)) for k in range(3))
    stokes = P.integrate(P.d(a)) == sum(((-1) ** i * L.integrate(P.face(i, a)) for i in range(3)),
                                       Fraction(0))
    return ok and stokes, ""


def _cofibrant(rng):
    from .amod import check_cofibrant, projective_space, qx_replacement
    X = projective_space(rng.choice([1, 2]))
    v = check_cofibrant(qx_replacement(X.nerve, X.rings).src)
    return v.status == "yes", X.name


def _dgla(rng):
    from .amod import line_bundle_sheaf, projective_space
    from .cech import replacement
    from .homcx import end_dgla
    E = end_dgla(replacement(line_bundle_sheaf(projective_space(1), [0, 2])))
    w = (rng.randint(-1, 1),)
    elems = [b for p in E.space(w).degrees for b in E.basis(p, w)][:5]
    return E.check_axioms(elems) == [], f"weight {w}"


def _total(rng):
    from .amod import affine_line, skyscraper_sheaf
    from .cech import TotalComplex, build_L, replacement
    V = build_L(replacement(skyscraper_sheaf(affine_line())))
    w = (rng.randint(-1, 1),)
    T = TotalComplex(V, w)
    return T.square_zero() and all(p >= 0 for p in T.cohomology()), f"weight {w}"


def _ext(rng):
    from .amod import line_bundle_sheaf, projective_space
    from .cech import ext_dims
    from .dgmod import DegreeBox
    from .oracle import cech_oracle
    sh = line_bundle_sheaf(projective_space(1), [0, rng.choice([-1, 2])])
    box = DegreeBox.cube(1, 1)
    want, _ = cech_oracle(sh, box)
    got = [ext_dims(sh, m, box)[0] for m in ("end_of_Q", "C_of_L", "C_of_h")]
    return all(t == want for t in got), str(want)


def _gauge(rng):
    from .amod import affine_line, skyscraper_sheaf
    from .cech import replacement
    from .defo import GlobalView, basis_tensors, bch, gauge_conjugate, gauge_formula, t_add, t_is_zero
    from .homcx import end_dgla
    from .rings import truncated_poly
    g = GlobalView(end_dgla(replacement(skyscraper_sheaf(affine_line()))))
    A = truncated_poly(3)

    def rand(deg):
        x = {}
        for u in basis_tensors(g, deg, [(0,), (1,), (-1,)]):
            k = rng.randint(1, 2)
            (key, f), = u.items()
            x = t_add(x, {(k, key[1], key[2]): f}, rng.randint(-2, 2) or 1)
        return x

    a, b, l = rand(0), rand(0), rand(1)
    same = t_is_zero(t_add(gauge_formula(g, A, a, l), gauge_conjugate(g, A, a, l), -1))
    law = t_is_zero(t_add(gauge_formula(g, A, a, gauge_formula(g, A, b, l)),
                          gauge_formula(g, A, bch(g, A, a, b), l), -1))
    return same and law, ""


SUITES = [("forms: d^2, faces, Stokes", _forms), ("cofibrancy of Q_X", _cofibrant),
          ("DGLA axioms on End*(Q)", _dgla), ("total complex D^2 and H^{<0}", _total),
          ("Ext models vs oracle", _ext), ("gauge formula vs conjugation, group law", _gauge)]


def run_suites(rng):
    """[(name, passed, detail)]."""
    out = []
    for name, fn in SUITES:
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crashing suite counts as a failure
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
