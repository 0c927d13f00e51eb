"""Combinatorial input model of a projective normal crossing
degeneration: per-stratum rational cohomology rings, restriction and
Gysin maps, traces and ample classes, with validation and fixtures.

Conventions baked into the data model:
  - the stratum Y_sigma of the components indexed by sigma has
    dimension n - |sigma| + 1;
  - H^0 bases are component idempotents, the ring unit is the all-ones
    vector in H^0 coordinates;
  - the trace functional t_sigma carries Tate twist -dim Y_sigma and is
    normalized so that t(point class) = 1 per connected component;
  - the Gysin map g: H^j(Y_{sigma+nu}) -> H^{j+2}(Y_sigma) carries
    twist +1 and satisfies the adjunction
    t_sigma(g(a).b) = -t_{sigma+nu}(a.restrict(b)).
"""

import json
from fractions import Fraction as Q

from .exactlin import (
    Matrix, rank, rat_to_str, rat_from_str, is_positive_definite, kernel,
)
from .cubical import IndexSet


class StrataError(ValueError):
    """Structural error in a strata datum (missing maps, bad shapes)."""


class Ring:
    """Graded ring table: dims[i] = dim H^i, mult[(i, j)] a Matrix of
    shape (dims[i+j], dims[i]*dims[j]) with column index
    x_index * dims[j] + y_index."""

    def __init__(self, dims, mult):
        self.dims = list(dims)
        self.top = len(dims) - 1
        self.mult = dict(mult)

    def dim(self, i):
        if 0 <= i <= self.top:
            return self.dims[i]
        return 0

    @property
    def unit(self):
        return [Q(1)] * self.dim(0)

    def table(self, i, j):
        if self.dim(i) == 0 or self.dim(j) == 0 or self.dim(i + j) == 0:
            return Matrix.zero(self.dim(i + j), self.dim(i) * self.dim(j))
        m = self.mult.get((i, j))
        if m is None:
            raise StrataError("missing product table (%d,%d)" % (i, j))
        return m

    def mul(self, i, j, x, y):
        """Product of x in H^i and y in H^j, a vector in H^{i+j}."""
        if self.dim(i + j) == 0:
            return []
        t = self.table(i, j)
        v = [Q(0)] * (self.dim(i) * self.dim(j))
        for a, xa in enumerate(x):
            if xa == 0:
                continue
            for b, yb in enumerate(y):
                if yb == 0:
                    continue
                v[a * self.dim(j) + b] = xa * yb
        return t.matvec(v)

    def mult_operator(self, x, i, j):
        """The matrix of (y -> x.y): H^j -> H^{i+j} for x in H^i."""
        out = Matrix.zero(self.dim(i + j), self.dim(j))
        for b in range(self.dim(j)):
            e = [Q(0)] * self.dim(j)
            e[b] = Q(1)
            col = self.mul(i, j, x, e)
            for r in range(self.dim(i + j)):
                out.a[r][b] = col[r]
        return out


class StrataDatum:
    def __init__(self, n, labels, nerve, rings, restrictions, gysin,
                 traces, ample, hodge_tate=True):
        self.n = n
        self.ix = IndexSet(labels)
        self.nerve = {frozenset(s) for s in nerve}
        self.rings = {frozenset(s): r for s, r in rings.items()}
        self.restrictions = {(frozenset(a), frozenset(b)): m
                             for (a, b), m in restrictions.items()}
        self.gysin = {(frozenset(a), nu): m
                      for (a, nu), m in gysin.items()}
        self.traces = {frozenset(s): list(t) for s, t in traces.items()}
        self.ample = {frozenset(s): list(v) for s, v in ample.items()}
        self.hodge_tate = hodge_tate
        self._structural_check()
        self._derive_missing_gysin()

    # basic accessors

    def stratum_dim(self, sigma):
        return self.n - len(sigma) + 1

    def ring(self, sigma):
        return self.rings[frozenset(sigma)]

    def trace_vec(self, sigma):
        return self.traces[frozenset(sigma)]

    def trace(self, sigma, x):
        t = self.trace_vec(sigma)
        return sum((a * b for a, b in zip(t, x)), Q(0))

    def restrict_mat(self, sigma, tau, deg):
        """Matrix of a*: H^deg(Y_sigma) -> H^deg(Y_tau), sigma <= tau,
        composed along covering steps."""
        sigma, tau = frozenset(sigma), frozenset(tau)
        assert sigma <= tau
        rs, rt = self.ring(sigma), self.ring(tau)
        if sigma == tau:
            return Matrix.identity(rs.dim(deg))
        added = self.ix.sort(tau - sigma)
        cur = sigma
        out = Matrix.identity(rs.dim(deg))
        for x in added:
            nxt = cur | {x}
            step = self.restrictions.get((cur, nxt), {}).get(deg)
            if step is None:
                step = Matrix.zero(self.ring(nxt).dim(deg),
                                   self.ring(cur).dim(deg))
            out = step * out
            cur = nxt
        return out

    def gysin_mat(self, sigma, nu, deg):
        """Matrix of g: H^deg(Y_{sigma+nu}) -> H^{deg+2}(Y_sigma)."""
        sigma = frozenset(sigma)
        m = self.gysin.get((sigma, nu), {}).get(deg)
        if m is None:
            m = Matrix.zero(self.ring(sigma).dim(deg + 2),
                            self.ring(sigma | {nu}).dim(deg))
        return m

    def ample_op(self, sigma, deg):
        r = self.ring(sigma)
        return r.mult_operator(self.ample[frozenset(sigma)], 2, deg)

    def strata_of_size(self, k):
        return sorted((s for s in self.nerve if len(s) == k),
                      key=self.ix.subset_key)

    def euler_open(self, label):
        """chi of the open stratum of the component, by inclusion and
        exclusion over the nerve."""
        tot = Q(0)
        for s in self.nerve:
            if label in s:
                chi_s = sum(self.ring(s).dims)
                tot += Q(-1) ** (len(s) - 1) * chi_s
        return tot

    def _structural_check(self):
        for s in self.nerve:
            if not s or not s <= set(self.ix.labels):
                raise StrataError("bad nerve subset %r" % (sorted(s),))
            for x in s:
                if len(s) > 1 and (s - {x}) not in self.nerve:
                    raise StrataError("nerve not subset-closed at %r"
                                      % (sorted(s),))
            if s not in self.rings:
                raise StrataError("missing ring for %r" % (sorted(s),))
            d = self.stratum_dim(s)
            ring = self.rings[s]
            if ring.top != 2 * d:
                raise StrataError(
                    "ring degree range of %r should end at %d"
                    % (sorted(s), 2 * d))
            if s not in self.traces:
                raise StrataError("missing trace for %r" % (sorted(s),))
            if len(self.traces[s]) != ring.dim(2 * d):
                raise StrataError("trace length mismatch at %r"
                                  % (sorted(s),))
            if s not in self.ample:
                raise StrataError("missing ample class for %r"
                                  % (sorted(s),))
            if len(self.ample[s]) != ring.dim(2):
                raise StrataError("ample length mismatch at %r"
                                  % (sorted(s),))
        for s in self.nerve:
            for x in self.ix.labels:
                if x in s:
                    continue
                t = s | {x}
                if t in self.nerve and (s, t) not in self.restrictions:
                    raise StrataError("missing restriction %r -> %r"
                                      % (sorted(s), sorted(t)))


    def _derive_missing_gysin(self):
        """Fill in omitted Gysin maps from Poincaré duality and the
        trace adjunction t_s(g(a).b) = -t_{s+nu}(a.restrict(b)), which
        determines g uniquely once traces and products are fixed."""
        from .exactlin import solve
        for sigma in self.nerve:
            for nu in self.ix.labels:
                if nu in sigma:
                    continue
                tau = sigma | {nu}
                if tau not in self.nerve or (sigma, nu) in self.gysin:
                    continue
                rs, rt = self.ring(sigma), self.ring(tau)
                ds, dt = self.stratum_dim(sigma), self.stratum_dim(tau)
                mats = {}
                for i in range(0, 2 * dt + 1):
                    out_deg = i + 2
                    comp_deg = 2 * ds - out_deg
                    rows = rs.dim(out_deg)
                    cols = rt.dim(i)
                    m = Matrix.zero(rows, cols)
                    if rows and cols and 0 <= comp_deg <= 2 * ds:
                        # pairing P[c][b] = t_s(e_c . e_b)
                        pmat = Matrix.zero(rows, rs.dim(comp_deg))
                        for c in range(rows):
                            for b in range(rs.dim(comp_deg)):
                                prod = rs.mul(out_deg, comp_deg,
                                              unit_vec(rows, c),
                                              unit_vec(rs.dim(comp_deg),
                                                       b))
                                pmat.a[c][b] = self.trace(sigma, prod)
                        rmat = self.restrict_mat(sigma, tau, comp_deg)
                        for a in range(cols):
                            xa = unit_vec(cols, a)
                            rhs = []
                            for b in range(rs.dim(comp_deg)):
                                rb = rmat.matvec(
                                    unit_vec(rs.dim(comp_deg), b))
                                val = -self.trace(
                                    tau, rt.mul(i, comp_deg, xa, rb))
                                rhs.append(val)
                            x = solve(pmat.transpose(), rhs)
                            if x is None:
                                raise StrataError(
                                    "cannot derive gysin at %r|%s deg %d"
                                    % (sorted(sigma), nu, i))
                            for r_ in range(rows):
                                m.a[r_][a] = x[r_]
                    mats[i] = m
                self.gysin[(sigma, nu)] = mats


def validate(datum, fail_fast=False):
    """Run checks (a)-(h); returns a list of dicts with keys
    check, where, ok, witness."""
    report = []

    def add(check, where, ok, witness=""):
        report.append({"check": check, "where": where, "ok": bool(ok),
                       "witness": witness if not ok else ""})

    for sigma in sorted(datum.nerve, key=datum.ix.subset_key):
        key = ",".join(datum.ix.sort(sigma))
        ring = datum.ring(sigma)
        d = datum.stratum_dim(sigma)
        # (a) unit, graded commutativity, associativity
        ok = True
        wit = ""
        for j in range(0, 2 * d + 1):
            for b in range(ring.dim(j)):
                e = unit_vec(ring.dim(j), b)
                if ring.mul(0, j, ring.unit, e) != e \
                        or ring.mul(j, 0, e, ring.unit) != e:
                    ok, wit = False, "unit fails in degree %d" % j
        for i in range(0, 2 * d + 1):
            for j in range(0, 2 * d + 1 - i):
                for a in range(ring.dim(i)):
                    for b in range(ring.dim(j)):
                        x = unit_vec(ring.dim(i), a)
                        y = unit_vec(ring.dim(j), b)
                        lhs = ring.mul(i, j, x, y)
                        rhs = ring.mul(j, i, y, x)
                        sgn = Q(-1) ** (i * j)
                        if lhs != [sgn * v for v in rhs]:
                            ok = False
                            wit = "commutativity fails at (%d,%d)" % (i, j)
        for i in range(0, 2 * d + 1):
            for j in range(0, 2 * d + 1 - i):
                for k in range(0, 2 * d + 1 - i - j):
                    for a in range(ring.dim(i)):
                        for b in range(ring.dim(j)):
                            for c in range(ring.dim(k)):
                                x = unit_vec(ring.dim(i), a)
                                y = unit_vec(ring.dim(j), b)
                                z = unit_vec(ring.dim(k), c)
                                lhs = ring.mul(i + j, k,
                                               ring.mul(i, j, x, y), z)
                                rhs = ring.mul(i, j + k, x,
                                               ring.mul(j, k, y, z))
                                if lhs != rhs:
                                    ok = False
                                    wit = ("associativity fails at "
                                           "(%d,%d,%d)" % (i, j, k))
        add("ring-axioms", key, ok, wit)
        # (e) Poincaré duality
        ok = True
        wit = ""
        for k in range(0, 2 * d + 1):
            dk, dk2 = ring.dim(k), ring.dim(2 * d - k)
            if dk != dk2:
                ok, wit = False, "betti asymmetry at degree %d" % k
                continue
            pair = Matrix.zero(dk, dk)
            for a in range(dk):
                for b in range(dk):
                    prod = ring.mul(k, 2 * d - k, unit_vec(dk, a),
                                    unit_vec(dk, b))
                    pair.a[a][b] = datum.trace(sigma, prod)
            if rank(pair) != dk:
                ok, wit = False, "degenerate pairing in degree %d" % k
        add("poincare-duality", key, ok, wit)
        # (f) hard Lefschetz
        ok = True
        wit = ""
        ell = datum.ample[frozenset(sigma)]
        for k in range(1, d + 1):
            op = Matrix.identity(ring.dim(d - k))
            for step in range(k):
                op = ring.mult_operator(ell, 2, d - k + 2 * step) * op
            if ring.dim(d - k) != ring.dim(d + k) \
                    or rank(op) != ring.dim(d - k):
                ok, wit = False, "l^%d not an isomorphism" % k
        add("hard-lefschetz", key, ok, wit)
        # (g) Hodge-Riemann on primitive parts (Hodge-Tate case)
        ok = True
        wit = ""
        if datum.hodge_tate:
            for p in range(0, d // 2 + 1):
                k = 2 * p
                if ring.dim(k) == 0:
                    continue
                op = Matrix.identity(ring.dim(k))
                for step in range(d - k + 1):
                    op = ring.mult_operator(ell, 2, k + 2 * step) * op
                prim = kernel(op)
                if prim.dim == 0:
                    continue
                form = Matrix.zero(prim.dim, prim.dim)
                lpow = Matrix.identity(ring.dim(k))
                for step in range(d - k):
                    lpow = ring.mult_operator(ell, 2, k + 2 * step) * lpow
                for a in range(prim.dim):
                    xa = prim.basis.row(a)
                    la = lpow.matvec(xa)
                    for b in range(prim.dim):
                        xb = prim.basis.row(b)
                        prod = ring.mul(2 * d - k, k, la, xb)
                        form.a[a][b] = Q(-1) ** p * datum.trace(sigma,
                                                                prod)
                if not is_positive_definite(form):
                    ok, wit = False, \
                        "primitive form not positive in degree %d" % k
        add("hodge-riemann", key, ok, wit)

    # (b) restriction functoriality and ring maps; (h) ample restriction
    for sigma in sorted(datum.nerve, key=datum.ix.subset_key):
        key = ",".join(datum.ix.sort(sigma))
        for x in datum.ix.labels:
            if x in sigma:
                continue
            tau = sigma | {x}
            if tau not in datum.nerve:
                continue
            tkey = ",".join(datum.ix.sort(tau))
            rs, rt = datum.ring(sigma), datum.ring(tau)
            ok = True
            wit = ""
            r0 = datum.restrict_mat(sigma, tau, 0)
            if r0.matvec(rs.unit) != rt.unit:
                ok, wit = False, "unit not preserved"
            dt = datum.stratum_dim(tau)
            for i in range(0, 2 * dt + 1):
                for j in range(0, 2 * dt + 1 - i):
                    ri = datum.restrict_mat(sigma, tau, i)
                    rj = datum.restrict_mat(sigma, tau, j)
                    rij = datum.restrict_mat(sigma, tau, i + j)
                    for a in range(rs.dim(i)):
                        for b in range(rs.dim(j)):
                            xa = unit_vec(rs.dim(i), a)
                            yb = unit_vec(rs.dim(j), b)
                            lhs = rij.matvec(rs.mul(i, j, xa, yb))
                            rhs = rt.mul(i, j, ri.matvec(xa),
                                         rj.matvec(yb))
                            if lhs != rhs:
                                ok = False
                                wit = ("not a ring map at degrees "
                                       "(%d,%d)" % (i, j))
            add("restriction-ring-map", "%s->%s" % (key, tkey), ok, wit)
            # (h)
            okh = datum.restrict_mat(sigma, tau, 2).matvec(
                datum.ample[sigma]) == datum.ample[tau]
            add("ample-restriction", "%s->%s" % (key, tkey), okh,
                "" if okh else "restricted ample class differs")
        # functoriality over two-step extensions
        for x in datum.ix.labels:
            for y in datum.ix.labels:
                if x >= y or x in sigma or y in sigma:
                    continue
                tau = sigma | {x, y}
                if tau not in datum.nerve:
                    continue
                ok = True
                wit = ""
                for deg in range(0, 2 * datum.stratum_dim(tau) + 1):
                    via_x = datum.restrict_mat(sigma | {x}, tau, deg) * \
                        datum.restrict_mat(sigma, sigma | {x}, deg)
                    via_y = datum.restrict_mat(sigma | {y}, tau, deg) * \
                        datum.restrict_mat(sigma, sigma | {y}, deg)
                    if via_x != via_y:
                        ok, wit = False, "paths differ in degree %d" % deg
                add("restriction-functoriality",
                    "%s->%s" % (key, ",".join(datum.ix.sort(tau))),
                    ok, wit)

    # (c) projection formula and (d) Gysin-trace adjunction
    for sigma in sorted(datum.nerve, key=datum.ix.subset_key):
        key = ",".join(datum.ix.sort(sigma))
        for nu in datum.ix.labels:
            if nu in sigma:
                continue
            tau = sigma | {nu}
            if tau not in datum.nerve:
                continue
            wkey = "%s|%s" % (key, nu)
            rs, rt = datum.ring(sigma), datum.ring(tau)
            d_s = datum.stratum_dim(sigma)
            dt = datum.stratum_dim(tau)
            okc = True
            okd = True
            witc = witd = ""
            for i in range(0, 2 * dt + 1):
                for j in range(0, 2 * d_s + 1):
                    g_i = datum.gysin_mat(sigma, nu, i)
                    for a in range(rt.dim(i)):
                        xa = unit_vec(rt.dim(i), a)
                        for b in range(rs.dim(j)):
                            yb = unit_vec(rs.dim(j), b)
                            rb = datum.restrict_mat(sigma, tau,
                                                    j).matvec(yb)
                            # (c): g(a . r(b)) = g(a) . b
                            if i + j <= 2 * dt:
                                lhs = datum.gysin_mat(
                                    sigma, nu, i + j).matvec(
                                        rt.mul(i, j, xa, rb))
                                rhs = rs.mul(i + 2, j, g_i.matvec(xa),
                                             yb)
                                if lhs != rhs:
                                    okc = False
                                    witc = ("projection formula fails "
                                            "at (%d,%d)" % (i, j))
                            # (d): t(g(a).b) = -t(a.r(b))
                            if i + j == 2 * dt:
                                lhs = datum.trace(
                                    sigma, rs.mul(i + 2, j,
                                                  g_i.matvec(xa), yb))
                                rhs = -datum.trace(
                                    tau, rt.mul(i, j, xa, rb))
                                if lhs != rhs:
                                    okd = False
                                    witd = ("adjunction fails at "
                                            "(%d,%d): %s != %s"
                                            % (i, j, lhs, rhs))
            add("projection-formula", wkey, okc, witc)
            add("gysin-trace-adjunction", wkey, okd, witd)

    if fail_fast:
        for r in report:
            if not r["ok"]:
                raise StrataError("%s at %s: %s"
                                  % (r["check"], r["where"], r["witness"]))
    return report


def all_checks_pass(report):
    return all(r["ok"] for r in report)


def unit_vec(n, i):
    v = [Q(0)] * n
    v[i] = Q(1)
    return v


# fixtures

def fixture_projective_space(n):
    """Single smooth component P^n."""
    assert n >= 1
    label = "X"
    dims = [1 if i % 2 == 0 else 0 for i in range(2 * n + 1)]
    mult = {}
    for i in range(0, 2 * n + 1, 2):
        for j in range(0, 2 * n + 1 - i, 2):
            val = Q(1) if i + j <= 2 * n else Q(0)
            mult[(i, j)] = Matrix(dims[i + j], 1, [[val]]) \
                if dims[i + j] else Matrix.zero(0, 1)
    ring = Ring(dims, mult)
    return StrataDatum(
        n=n, labels=[label], nerve=[{label}],
        rings={frozenset({label}): ring},
        restrictions={}, gysin={},
        traces={frozenset({label}): [Q(1)]},
        ample={frozenset({label}): [Q(1)]},
    )


def point_ring():
    return Ring([1], {(0, 0): Matrix(1, 1, [[1]])})


def p1_ring():
    dims = [1, 0, 1]
    mult = {
        (0, 0): Matrix(1, 1, [[1]]),
        (0, 2): Matrix(1, 1, [[1]]),
        (2, 0): Matrix(1, 1, [[1]]),
        (2, 2): Matrix.zero(0, 1),
    }
    return Ring(dims, mult)


def fixture_cycle_of_p1(n_components):
    """Cycle of N projective lines meeting in N points (N >= 3): the
    special fiber of a degenerating elliptic curve."""
    if n_components < 3:
        raise ValueError("need at least 3 components")
    N = n_components
    labels = ["C%d" % i for i in range(N)]
    nerve = [{labels[i]} for i in range(N)]
    pairs = []
    for i in range(N):
        j = (i + 1) % N
        pairs.append(frozenset({labels[i], labels[j]}))
    nerve += [set(p) for p in pairs]
    rings = {}
    traces = {}
    ample = {}
    for i in range(N):
        s = frozenset({labels[i]})
        rings[s] = p1_ring()
        traces[s] = [Q(1)]
        ample[s] = [Q(1)]
    for p in pairs:
        rings[p] = point_ring()
        traces[p] = [Q(1)]
        ample[p] = []
    restrictions = {}
    gysin = {}
    for p in pairs:
        for lab in p:
            s = frozenset({lab})
            restrictions[(s, p)] = {0: Matrix(1, 1, [[1]]),
                                    2: Matrix.zero(0, 1)}
            other = next(x for x in p if x != lab)
            # adjunction t_s(g(a).b) = -t_p(a.restrict(b)) forces
            # g(1) = -(point class)
            gysin[(s, other)] = {0: Matrix(1, 1, [[-1]])}
    return StrataDatum(
        n=1, labels=labels, nerve=nerve, rings=rings,
        restrictions=restrictions, gysin=gysin, traces=traces,
        ample=ample,
    )


def fixture_product_with_p1(datum):
    """Künneth product of every stratum with P^1 (all classes are of
    even degree, so no Koszul signs enter)."""
    f = p1_ring()
    rings = {}
    traces = {}
    ample = {}
    restrictions = {}
    gysin = {}
    for s, r in datum.rings.items():
        d = datum.stratum_dim(s)
        new_top = 2 * (d + 1)
        dims = [0] * (new_top + 1)
        for i in range(r.top + 1):
            for u in (0, 2):
                dims[i + u] += r.dim(i) * f.dim(u)
        # basis of degree k: blocks (i, u) with i + u = k, u in {0, 2},
        # ordered by u ascending
        def offsets(k, rr=r):
            out = {}
            pos = 0
            for u in (0, 2):
                i = k - u
                if 0 <= i <= rr.top and rr.dim(i) and f.dim(u):
                    out[(i, u)] = pos
                    pos += rr.dim(i)
            return out

        mult = {}
        for i in range(0, new_top + 1):
            for j in range(0, new_top + 1 - i):
                di, dj, dij = dims[i], dims[j], dims[i + j]
                m = Matrix.zero(dij, di * dj)
                offi, offj, offij = offsets(i), offsets(j), \
                    offsets(i + j)
                for (i1, u1), o1 in offi.items():
                    for (i2, u2), o2 in offj.items():
                        if u1 + u2 > 2:
                            continue
                        tgt = offij.get((i1 + i2, u1 + u2))
                        if tgt is None:
                            continue
                        base = r.table(i1, i2)
                        for rr_ in range(base.rows):
                            for a in range(r.dim(i1)):
                                for b in range(r.dim(i2)):
                                    c = base.a[rr_][a * r.dim(i2) + b]
                                    if c == 0:
                                        continue
                                    m.a[tgt + rr_][
                                        (o1 + a) * dj + o2 + b] += c
                mult[(i, j)] = m
        nr = Ring(dims, mult)
        rings[s] = nr
        # trace: t(x (x) fiber point class) = t(x)
        tv = [Q(0)] * dims[new_top]
        offt = offsets(new_top)
        if (r.top, 2) in offt:
            o = offt[(r.top, 2)]
            for a, c in enumerate(datum.traces[s]):
                tv[o + a] = c
        traces[s] = tv
        # ample: l (x) 1 + 1 (x) h
        av = [Q(0)] * dims[2]
        off2 = offsets(2)
        if (2, 0) in off2:
            for a, c in enumerate(datum.ample[s]):
                av[off2[(2, 0)] + a] = c
        if (0, 2) in off2:
            for a, c in enumerate(r.unit):
                av[off2[(0, 2)] + a] += c
        ample[s] = av
    for (s, t), mats in datum.restrictions.items():
        new = {}
        rs, rt = datum.rings[s], datum.rings[t]
        ds = datum.stratum_dim(s)
        for k in range(0, 2 * (datum.stratum_dim(t) + 1) + 1):
            rows = rings[t].dim(k)
            cols = rings[s].dim(k)
            m = Matrix.zero(rows, cols)
            for u in (0, 2):
                i = k - u
                if i < 0:
                    continue
                base = mats.get(i)
                if base is None or base.rows == 0 or base.cols == 0:
                    continue
                so = _kunneth_offset(rs, i, u)
                to = _kunneth_offset(rt, i, u)
                if so is None or to is None:
                    continue
                for rr_ in range(base.rows):
                    for cc in range(base.cols):
                        if base.a[rr_][cc] != 0:
                            m.a[to + rr_][so + cc] = base.a[rr_][cc]
            new[k] = m
        restrictions[(s, t)] = new
    for (s, nu), mats in datum.gysin.items():
        new = {}
        t = s | {nu}
        rs, rt = datum.rings[s], datum.rings[t]
        for k in range(0, 2 * (datum.stratum_dim(t) + 1) + 1):
            rows = rings[s].dim(k + 2)
            cols = rings[t].dim(k)
            m = Matrix.zero(rows, cols)
            for u in (0, 2):
                i = k - u
                if i < 0:
                    continue
                base = mats.get(i)
                if base is None or base.rows == 0 or base.cols == 0:
                    continue
                so = _kunneth_offset(rt, i, u)
                to = _kunneth_offset(rs, i + 2, u)
                if so is None or to is None:
                    continue
                for rr_ in range(base.rows):
                    for cc in range(base.cols):
                        if base.a[rr_][cc] != 0:
                            m.a[to + rr_][so + cc] = base.a[rr_][cc]
            new[k] = m
        gysin[(s, nu)] = new
    return StrataDatum(
        n=datum.n + 1, labels=list(datum.ix.labels),
        nerve=[set(s) for s in datum.nerve], rings=rings,
        restrictions=restrictions, gysin=gysin, traces=traces,
        ample=ample,
    )


def _kunneth_offset(base_ring, i, u):
    """Offset of the (i, u) block in degree i+u of ring (x) H(P^1);
    the (k, 0) block precedes the (k-2, 2) block."""
    if not (0 <= i <= base_ring.top) or base_ring.dim(i) == 0:
        return None
    if u == 0:
        return 0
    k = i + u
    return base_ring.dim(k) if 0 <= k <= base_ring.top else 0


# JSON round trip

def skey(ix, sigma):
    return ",".join(ix.sort(sigma))


def save(datum, path):
    with open(path, "w") as fh:
        fh.write(dumps(datum))


def dumps(datum):
    ix = datum.ix
    out = {
        "n": datum.n,
        "components": list(ix.labels),
        "hodge_tate": datum.hodge_tate,
        "strata": {},
        "restrictions": {},
        "gysin": {},
    }
    for s in sorted(datum.nerve, key=ix.subset_key):
        ring = datum.ring(s)
        out["strata"][skey(ix, s)] = {
            "dims": ring.dims,
            "products": {"%d,%d" % ij: m.to_json()
                         for ij, m in sorted(ring.mult.items())},
            "trace": [rat_to_str(x) for x in datum.traces[s]],
            "ample": [rat_to_str(x) for x in datum.ample[s]],
        }
    for (s, t), mats in sorted(datum.restrictions.items(),
                               key=lambda kv: (ix.subset_key(kv[0][0]),
                                               ix.subset_key(kv[0][1]))):
        out["restrictions"]["%s|%s" % (skey(ix, s), skey(ix, t))] = {
            str(deg): m.to_json() for deg, m in sorted(mats.items())}
    for (s, nu), mats in sorted(datum.gysin.items(),
                                key=lambda kv: (ix.subset_key(kv[0][0]),
                                                kv[0][1])):
        out["gysin"]["%s|%s" % (skey(ix, s), nu)] = {
            str(deg): m.to_json() for deg, m in sorted(mats.items())}
    return json.dumps(out, indent=1, sort_keys=True)


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise StrataError("invalid JSON: %s" % e)
    for field in ("n", "components", "strata"):
        if field not in data:
            raise StrataError("missing field %r" % field)
    labels = data["components"]
    labelset = set(labels)
    rings = {}
    traces = {}
    ample = {}
    nerve = []
    for key, entry in data["strata"].items():
        parts = key.split(",")
        for p in parts:
            if p not in labelset:
                raise StrataError("strata/%s: unknown label %r"
                                  % (key, p))
        s = frozenset(parts)
        nerve.append(s)
        for field in ("dims", "products", "trace", "ample"):
            if field not in entry:
                raise StrataError("strata/%s/%s missing" % (key, field))
        dims = entry["dims"]
        mult = {}
        for ij, m in entry["products"].items():
            i, j = (int(x) for x in ij.split(","))
            mult[(i, j)] = Matrix.from_json(
                m, rows=dims[i + j] if i + j < len(dims) else 0,
                cols=dims[i] * dims[j])
        rings[s] = Ring(dims, mult)
        traces[s] = [rat_from_str(x) for x in entry["trace"]]
        ample[s] = [rat_from_str(x) for x in entry["ample"]]
    restrictions = {}
    for key, mats in data.get("restrictions", {}).items():
        a, b = key.split("|")
        s, t = frozenset(a.split(",")), frozenset(b.split(","))
        restrictions[(s, t)] = {
            int(deg): Matrix.from_json(
                m, rows=rings[t].dim(int(deg)),
                cols=rings[s].dim(int(deg)))
            for deg, m in mats.items()}
    gysin = {}
    for key, mats in data.get("gysin", {}).items():
        a, nu = key.split("|")
        s = frozenset(a.split(","))
        gysin[(s, nu)] = {
            int(deg): Matrix.from_json(
                m, rows=rings[s].dim(int(deg) + 2),
                cols=rings[s | {nu}].dim(int(deg)))
            for deg, m in mats.items()}
    return StrataDatum(
        n=data["n"], labels=labels, nerve=nerve, rings=rings,
        restrictions=restrictions, gysin=gysin, traces=traces,
        ample=ample, hodge_tate=data.get("hodge_tate", True),
    )
