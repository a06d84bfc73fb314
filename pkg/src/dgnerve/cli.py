"""Command-line front end.

Input documents are flat key = value sections:

    [scheme]        builtin = P1 | P2 | A1 ..., or charts = U0 U1 with
                    chart.U0 = (1,0) (0,1) and optional intersections = U0 U1; ...
    [sheaf]         kind = line_bundles (twists = 0 2, or summand = U0:(0) U1:(2))
                    or kind = skyscraper (chart = U0)
    [coefficients]  ring = dual_numbers | truncated_poly (k = 3) | square_zero (vars = 2)
    [task]          command, degree_box, level_cap, polycap, depth_cap, model, policy
    [output]        path, format

Reports are a human-readable table followed by a block of key = value lines.
"""

import argparse
import random
import re
import sys
import time

from .amod import (SheafDescription, builtin_scheme, check_cofibrant, check_quasi_coherent, custom_scheme,
                   skyscraper_sheaf, twist_degrees, upsilon_star)
from .dgmod import DegreeBox, Verdict
from .rings import ArtinError, artin_ring, square_zero

SECTIONS = ("scheme", "sheaf", "coefficients", "task", "output")
COMMANDS = ("nerve", "qcoh-check", "cofibrant-check", "replace", "ext", "mc", "selftest")
MODEL_FLAGS = {"endQ": "end_of_Q", "CL": "C_of_L", "Ch": "C_of_h"}

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_INVARIANT = 0, 1, 2, 3


class InputError(ValueError):
    def __init__(self, line, col, msg):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col = line, col


class InvariantError(RuntimeError):
    pass


# --- parsing ---------------------------------------------------------------

class Entry:
    """A value with the position it came from."""

    def __init__(self, value, line, col):
        self.value, self.line, self.col = value, line, col

    def fail(self, msg):
        raise InputError(self.line, self.col, msg)


def parse_document(text):
    """{section: {key: [Entry, ...]}}; repeated keys accumulate."""
    doc = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        col0 = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise InputError(lineno, col0 + len(stripped), "missing ']' after section name")
            section = stripped[1:-1].strip()
            if section not in SECTIONS:
                raise InputError(lineno, col0 + 1, f"unknown section [{section}]")
            doc.setdefault(section, {})
            continue
        if section is None:
            raise InputError(lineno, col0, "key outside of any section")
        if "=" not in line:
            raise InputError(lineno, col0, "expected 'key = value'")
        key, value = line.split("=", 1)
        if not key.strip():
            raise InputError(lineno, col0, "empty key")
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        doc[section].setdefault(key.strip(), []).append(Entry(value.strip(), lineno, vcol))
    return doc


def _one(sec, key, default=None):
    entries = sec.get(key)
    if not entries:
        return default
    if len(entries) > 1:
        entries[1].fail(f"key {key!r} given twice")
    return entries[0]


VEC = re.compile(r"\(\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*\)")


def parse_vectors(entry):
    text = entry.value
    out, pos = [], 0
    for m in VEC.finditer(text):
        gap = text[pos:m.start()]
        if gap.strip():
            raise InputError(entry.line, entry.col + pos + len(gap) - len(gap.lstrip()),
                             f"unexpected {gap.strip()!r}; vectors look like (1,-1)")
        body = m.group(1)
        out.append(tuple(int(x) for x in body.split(",")) if body else ())
        pos = m.end()
    if text[pos:].strip():
        raise InputError(entry.line, entry.col + pos, f"unexpected {text[pos:].strip()!r}")
    return out


def parse_int(entry, lo=None):
    try:
        v = int(entry.value)
    except ValueError:
        entry.fail(f"expected an integer, got {entry.value!r}")
    if lo is not None and v < lo:
        entry.fail(f"expected an integer >= {lo}")
    return v


def parse_box(text, rank, policy="auto", where=None):
    """'lo..hi' for every coordinate, or one range per coordinate."""
    parts = [p for p in re.split(r"[\s,;]+", text.strip()) if p]
    ranges = []
    for p in parts:
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", p)
        if not m:
            _box_fail(where, f"bad range {p!r}; expected lo..hi")
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            _box_fail(where, f"range {p!r} has lo > hi")
        ranges.append((lo, hi))
    if len(ranges) == 1:
        ranges = ranges * rank
    if len(ranges) != rank:
        _box_fail(where, f"box has {len(ranges)} ranges but the lattice has rank {rank}")
    return DegreeBox(tuple(r[0] for r in ranges), tuple(r[1] for r in ranges), policy)


def _box_fail(where, msg):
    if where is None:
        raise ValueError(msg)
    where.fail(msg)


class Task:
    """A resolved input document."""

    def __init__(self, scheme, sheaf, ring, params, output, echo):
        self.scheme, self.sheaf, self.ring = scheme, sheaf, ring
        self.params, self.output, self.echo = params, output, echo


def resolve(doc, box_flag=None, model_flag=None):
    echo = []
    sch = doc.get("scheme")
    if sch is None:
        raise InputError(1, 1, "missing [scheme] section")
    scheme = _resolve_scheme(sch, echo)
    sheaf = _resolve_sheaf(doc.get("sheaf", {}), scheme, echo)
    ring = _resolve_ring(doc.get("coefficients", {}), echo)
    task = doc.get("task", {})
    params = {}
    e = _one(task, "command")
    params["command"] = e.value if e else None
    if e and e.value not in COMMANDS:
        e.fail(f"unknown command {e.value!r}")
    policy = _one(task, "policy")
    pol = policy.value if policy else "auto"
    if pol not in ("auto", "fixed"):
        policy.fail("policy is auto or fixed")
    e = _one(task, "degree_box")
    if box_flag is not None:
        params["box"] = parse_box(box_flag, scheme.rank, pol)
    elif e is not None:
        params["box"] = parse_box(e.value, scheme.rank, pol, e)
    else:
        params["box"] = DegreeBox.cube(scheme.rank, 1, pol)
    for key, default, lo in (("level_cap", None, 0), ("polycap", 3, 0), ("depth_cap", 6, 1)):
        e = _one(task, key)
        params[key] = parse_int(e, lo) if e else default
    e = _one(task, "model")
    model = model_flag or (e.value if e else "endQ")
    model = {v: k for k, v in MODEL_FLAGS.items()}.get(model, model)
    if model not in MODEL_FLAGS:
        if e is not None and not model_flag:
            e.fail(f"model is one of {', '.join(MODEL_FLAGS)}")
        raise InputError(0, 0, f"model is one of {', '.join(MODEL_FLAGS)}")
    params["model"] = MODEL_FLAGS[model]
    out = doc.get("output", {})
    path = _one(out, "path")
    fmt = _one(out, "format")
    if fmt and fmt.value != "text":
        fmt.fail("only format = text is supported")
    echo.append(("task.box", str(params["box"])))
    echo.append(("task.model", params["model"]))
    return Task(scheme, sheaf, ring, params, path.value if path else None, echo)


def _resolve_scheme(sec, echo):
    b = _one(sec, "builtin")
    if b is not None:
        try:
            scheme = builtin_scheme(b.value)
        except ValueError as exc:
            b.fail(str(exc))
        echo.append(("scheme", b.value))
        return scheme
    c = _one(sec, "charts")
    if c is None:
        raise InputError(1, 1, "[scheme] needs builtin = ... or charts = ...")
    names = c.value.split()
    if not names or len(set(names)) != len(names):
        c.fail("chart names must be distinct and nonempty")
    charts = []
    rank = None
    for n in names:
        e = _one(sec, f"chart.{n}")
        if e is None:
            c.fail(f"chart {n!r} has no chart.{n} line")
        gens = parse_vectors(e)
        for g in gens:
            if rank is None:
                rank = len(g)
            elif len(g) != rank:
                e.fail(f"generator {g} has length {len(g)}, expected {rank}")
        charts.append(gens)
    if rank is None:
        c.fail("at least one chart generator is needed to fix the lattice rank")
    inter = None
    e = _one(sec, "intersections")
    if e is not None:
        inter = []
        for group in e.value.split(";"):
            ids = group.split()
            for x in ids:
                if x not in names:
                    e.fail(f"unknown chart {x!r} in intersections")
            if ids:
                inter.append(tuple(sorted(names.index(x) for x in ids)))
    name = _one(sec, "name")
    try:
        scheme = custom_scheme(name.value if name else "custom", charts, inter, names)
    except ValueError as exc:
        c.fail(str(exc))
    echo.append(("scheme", scheme.name))
    echo.append(("scheme.charts", " ".join(names)))
    return scheme


def _chart_index(scheme, entry, token):
    names = list(scheme.nerve.names)
    if token in names:
        return names.index(token)
    if token.isdigit() and int(token) < len(names):
        return int(token)
    entry.fail(f"unknown chart {token!r}")


def _resolve_sheaf(sec, scheme, echo):
    kind = _one(sec, "kind")
    k = kind.value if kind else "line_bundles"
    if k == "skyscraper":
        c = _one(sec, "chart")
        chart = _chart_index(scheme, c, c.value) if c else 0
        echo.append(("sheaf", f"skyscraper at {scheme.nerve.names[chart]}"))
        return skyscraper_sheaf(scheme, chart)
    if k != "line_bundles":
        kind.fail("kind is line_bundles or skyscraper")
    summands = []
    t = _one(sec, "twists")
    if t is not None:
        if not scheme.name.startswith("P"):
            t.fail("twists are defined for the builtin projective spaces; use summand = ...")
        try:
            twists = [int(x) for x in t.value.split()]
        except ValueError:
            t.fail("twists are integers")
        summands += [twist_degrees(scheme, d) for d in twists]
        echo.append(("sheaf", "line_bundles " + " ".join(f"O({d})" for d in twists)))
    for e in sec.get("summand", []):
        degs = {}
        for m in re.finditer(r"\S+", e.value):
            tok, col = m.group(), e.col + m.start()
            if ":" not in tok:
                raise InputError(e.line, col, f"expected chart:(vector), got {tok!r}")
            ch, vec = tok.split(":", 1)
            vs = parse_vectors(Entry(vec, e.line, col + len(ch) + 1))
            v = vs[0] if len(vs) == 1 else None
            if v is None or len(v) != scheme.rank:
                e.fail(f"degree for chart {ch} must have length {scheme.rank}")
            degs[_chart_index(scheme, e, ch)] = v
        if set(degs) != set(scheme.nerve.vertices):
            e.fail("a summand needs a degree on every chart")
        summands.append(degs)
        echo.append(("sheaf.summand", e.value))
    if not summands:
        summands = [twist_degrees(scheme, 0)] if scheme.name.startswith("P") else \
            [{j: (0,) * scheme.rank for j in scheme.nerve.vertices}]
        echo.append(("sheaf", "structure sheaf"))
    sheaf = SheafDescription("toric_line_bundle", scheme, {"degrees": summands})
    try:
        upsilon_star(sheaf)
    except ValueError as exc:
        line = (kind or t or sec.get("summand", [Entry("", 1, 1)])[0])
        line.fail(str(exc))
    return sheaf


def _resolve_ring(sec, echo):
    r = _one(sec, "ring")
    kind = r.value if r else "dual_numbers"
    try:
        if kind == "square_zero":
            e = _one(sec, "vars")
            ring = square_zero(parse_int(e, 1) if e else 1)
        elif kind == "truncated_poly":
            e = _one(sec, "k")
            if e is None:
                r.fail("truncated_poly needs k = ...")
            ring = artin_ring(kind, parse_int(e, 1))
        else:
            ring = artin_ring(kind)
    except ArtinError as exc:
        (r or Entry("", 1, 1)).fail(str(exc))
    echo.append(("coefficients", repr(ring)))
    return ring


# --- reports ---------------------------------------------------------------

class Report:
    def __init__(self, command, echo):
        self.command = command
        self.lines = []
        self.machine = [("command", command)] + list(echo)
        self.inconclusive = []

    def text(self, s=""):
        self.lines.append(s)

    def kv(self, key, value):
        self.machine.append((key, value))

    def verdict(self, key, v):
        self.kv(key, v.status)
        if v.witness is not None:
            self.kv(key + ".witness", v.witness)
        if v.status == "inconclusive":
            self.inconclusive.append(key)

    def converged(self, key, ok):
        self.kv(key + ".converged", ok)
        if not ok:
            self.inconclusive.append(key)

    def render(self):
        out = [f"dgnerve report: {self.command}", ""] + self.lines + ["", "[result]"]
        out += [f"{k} = {_fmt(v)}" for k, v in self.machine]
        return "\n".join(out) + "\n"


def _fmt(v):
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in sorted(v.items())) + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def table_lines(table):
    if not table:
        return ["  (all zero)"]
    return [f"  {k:>3} | {table[k]}" for k in sorted(table)]


# --- commands --------------------------------------------------------------

def cmd_nerve(task, rep):
    nerve = task.scheme.nerve
    rep.text("simplex | ring generators")
    for s in nerve:
        name = "".join(nerve.names[i] for i in s) if len(nerve.names) else str(s)
        rep.text(f"  {str(s):<12} {name:<10} {list(task.scheme.rings[s].gens)}")
    rep.kv("nerve.size", len(nerve.names))
    rep.kv("nerve.simplices", len(nerve))
    rep.kv("nerve.max_degree", nerve.max_deg())


def cmd_qcoh(task, rep):
    F = upsilon_star(task.sheaf)
    v = check_quasi_coherent(F, task.params["box"])
    rep.text(f"quasi-coherent: {v.status} ({v.detail})")
    rep.verdict("qcoh", v)


def cmd_cofibrant(task, rep):
    from .cech import replacement
    F = upsilon_star(task.sheaf)
    v = check_cofibrant(F)
    rep.text(f"input cofibrant: {v.status} ({v.detail})")
    rep.verdict("cofibrant.input", v)
    Q = replacement(task.sheaf, task.params["box"])
    w = check_cofibrant(Q)
    rep.text(f"replacement cofibrant: {w.status}")
    rep.verdict("cofibrant.replacement", w)
    if w.status == "no":
        raise InvariantError("the replacement is not cofibrant")
    for a, cells in sorted(w.data["cokernels"].items()):
        rep.text(f"  latching cokernel at {a}: {cells}")


def cmd_replace(task, rep):
    from .amod import augmentation_report, cofibrant_replace, locally_free_replacement, \
        locally_free_resolution
    box = task.params["box"]
    F = upsilon_star(task.sheaf)
    try:
        E = locally_free_resolution(task.sheaf)
        aug = locally_free_replacement(E)
        how = "locally free replacement of a line bundle resolution"
        checks = augmentation_report(aug, box) if task.sheaf.kind == "toric_line_bundle" else None
    except ValueError:
        aug = cofibrant_replace(F, box, task.params["depth_cap"])
        how = "Reedy cell attachment"
        checks = augmentation_report(aug, box)
    Q = aug.src
    rep.text(f"method: {how}")
    for a in Q.nerve:
        V = Q.value(a)
        rep.text(f"  {str(a):<12} " + "  ".join(f"{i}:{V.term(i).degrees}" for i in sorted(V.degrees())))
    rep.kv("replace.method", how)
    rep.kv("replace.generators", sum(Q.value(a).total_gens() for a in Q.values))
    if checks is not None:
        surj = all(s for s, _ in checks.values())
        qis = {q for _, q in checks.values()}
        rep.kv("replace.surjective", surj)
        status = "yes" if qis == {"yes"} else ("no" if "no" in qis else "inconclusive")
        rep.verdict("replace.quasi_iso", Verdict(status))
        if not surj or status == "no":
            raise InvariantError("augmentation is not a surjective quasi-isomorphism")
    cof = check_cofibrant(Q)
    rep.verdict("replace.cofibrant", cof)
    if cof.status == "no":
        raise InvariantError("replacement is not cofibrant")


def cmd_ext(task, rep):
    from .cech import ext_dims
    from .oracle import cech_oracle
    model = task.params["model"]
    table, used, conv = ext_dims(task.sheaf, model, task.params["box"])
    rep.text(f"Ext^k(F, F) via {model}, box {used}")
    for line in table_lines(table):
        rep.text(line)
    rep.kv("ext.model", model)
    rep.kv("ext.table", table)
    rep.kv("ext.box", str(used))
    rep.converged("ext", conv)
    if task.sheaf.kind == "toric_line_bundle":
        oracle, oconv = cech_oracle(task.sheaf, task.params["box"])
        rep.kv("ext.oracle", oracle)
        rep.kv("ext.oracle_agrees", oracle == table)
        if conv and oconv and oracle != table:
            raise InvariantError(f"Ext table {table} disagrees with the Cech oracle {oracle}")


def cmd_mc(task, rep):
    from .cech import replacement
    from .defo import GlobalView, end_tangent, end_tangent_dim, mc_check
    from .homcx import end_dgla
    from .rings import dual_numbers
    Q = replacement(task.sheaf, task.params["box"])
    dim, used, conv = end_tangent(Q, task.params["box"])
    rep.text(f"tangent space of Def_F (MC(K[eps]) modulo gauge): dim {dim}, box {used}")
    rep.kv("mc.tangent_dim", dim)
    rep.converged("mc.tangent", conv)
    # sample first-order MC representatives, one per weight carrying tangent
    g = GlobalView(end_dgla(Q))
    eps = dual_numbers()
    samples = []
    for w in used.points():
        if end_tangent_dim(g, eps, w):
            for f in g.E.space(w).basis(1):
                if g.d(f).is_zero():
                    v = mc_check(g, eps, {(1, tuple(w), ()): f})
                    if v.status != "yes":
                        raise InvariantError("a closed first-order element fails the MC check")
                    samples.append(tuple(w))
                    break
    rep.text(f"sample MC representatives over K[eps] at weights {samples}")
    rep.kv("mc.sample_weights", samples)
    if task.ring.dim > 2:
        rep.text(f"coefficient ring {task.ring!r}: dimension mode reports the K[eps] tangent only")
    rep.kv("mc.ring", repr(task.ring))


def cmd_selftest(task, rep, seed=0):
    from .selftest import run_suites
    results = run_suites(random.Random(seed))
    passed = sum(1 for _, ok, _ in results if ok)
    for name, ok, detail in results:
        rep.text(f"  {'pass' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    rep.kv("selftest.passed", passed)
    rep.kv("selftest.failed", len(results) - passed)
    if passed != len(results):
        raise InvariantError(f"{len(results) - passed} self-test suite(s) failed")


DISPATCH = {"nerve": cmd_nerve, "qcoh-check": cmd_qcoh, "cofibrant-check": cmd_cofibrant,
            "replace": cmd_replace, "ext": cmd_ext, "mc": cmd_mc}


def default_task():
    return resolve(parse_document("[scheme]\nbuiltin = P1\n"))


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    ap = argparse.ArgumentParser(prog="dgnerve", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("--input", help="input document")
    ap.add_argument("--output", help="report path (default: [output] path, else stdout)")
    ap.add_argument("--strict", action="store_true", help="exit 2 on inconclusive results")
    ap.add_argument("--threads", type=int, default=1, help="worker count (computations run sequentially)")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized self-tests")
    ap.add_argument("--box", help="degree box, 'lo..hi' or one range per coordinate")
    ap.add_argument("--model", choices=sorted(MODEL_FLAGS), help="Ext model")
    ap.add_argument("--timings", action="store_true", help="append elapsed time to the report")
    args = ap.parse_args(argv)
    start = time.perf_counter()
    try:
        if args.input:
            try:
                with open(args.input) as fh:
                    text = fh.read()
            except OSError as exc:
                raise InputError(0, 0, f"cannot read {args.input}: {exc.strerror}")
            task = resolve(parse_document(text), args.box, args.model)
        elif args.command == "selftest":
            task = default_task()
        else:
            raise InputError(0, 0, "--input is required for this command")
        command = args.command or task.params["command"]
        if command is None:
            raise InputError(0, 0, "no command given (argument or [task] command)")
        rep = Report(command, task.echo)
        if command == "selftest":
            cmd_selftest(task, rep, args.seed)
        else:
            DISPATCH[command](task, rep)
    except InputError as exc:
        print(f"dgnerve: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"dgnerve: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantError, RuntimeError) as exc:
        print(f"dgnerve: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.timings:
        rep.text(f"elapsed: {time.perf_counter() - start:.2f} s")
    text = rep.render()
    path = args.output or task.output
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.strict and rep.inconclusive:
        print(f"dgnerve: inconclusive: {', '.join(rep.inconclusive)}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def main():
    sys.exit(run())
