"""Limit mixed Hodge structure of a projective normal crossing
degeneration, computed in exact arithmetic from a StrataDatum.

Two E1 pages are built from the strata data:

  - the A page (variant "A"): the weight-graded page of the quotient
    model, whose cell (m, q) is the direct sum of H^{q-m-2r}(Y_sigma)
    over u-degrees r and subsets sigma of m+2r+1 components whose
    intersection is non-empty;
  - the K page (variant "K"): the weight-graded page of the Cech model
    of the twisted de Rham complex, whose summands carry a Cech subset
    A, a u-degree r and a residue subset sigma with A + sigma in the
    nerve (sigma may meet A).

Cells are indexed by (m, q): m is the centered weight index, q the
cohomological degree, and d1 maps (m, q) -> (m-1, q+1).  The spectral
sequences degenerate at E2; the limit cohomology H^q is the direct sum
of the E2 cells (m, q) with weight w = q + m and Hodge type
((q+m)/2, (q+m)/2) in the Hodge-Tate case.

Normalization conventions (all certified by machine checks):
  - each summand is read in its twist-normalized rational basis; a
    pairing component is admissible only when the twists balance;
  - the A-page d1 carries global signs s_G = s_R = -1 on its Gysin and
    restriction parts, the K-page parts carry (-1)^k relative to the
    Cech degree k; these are pinned jointly by d1*d1 = 0, the vanishing
    of trace_theta composed with d1, and the chain-map property of the
    comparison map phi;
  - the Lefschetz operator acts as +(ample class) on every summand;
  - the trace of a point class is +1.
"""

from fractions import Fraction as Q
from itertools import combinations

from .exactlin import (
    Matrix, kernel, rank, vstack, is_positive_definite,
)
from .homalg import Complex
from .cubical import chi, wedge_insert_sign, contract_sign
from .strata import unit_vec


def eps(a):
    """The sign (-1)^(a(a-1)/2), for any integer a."""
    return -1 if (a * (a - 1) // 2) % 2 else 1


def _add_block(big, roff, coff, mat, coeff):
    for i, row in enumerate(mat.a):
        for j, v in enumerate(row):
            if v:
                big.a[roff + i][coff + j] += coeff * v


class SummandA:
    """Summand H^c(Y_sigma) of an A-page cell: subset sigma of size
    m+2r+1, u-degree r, carried degree c, twist m+r."""

    __slots__ = ("sigma", "r", "c", "dim", "offset")

    def __init__(self, sigma, r, c, dim):
        self.sigma = frozenset(sigma)
        self.r = r
        self.c = c
        self.dim = dim
        self.offset = 0

    @property
    def key(self):
        return (self.sigma, self.r)

    @property
    def m(self):
        return len(self.sigma) - 1 - 2 * self.r

    @property
    def tw(self):
        return self.m + self.r


class SummandK:
    """Summand H^c(Y_{A+sigma}) of a K-page cell: Cech subset A (of
    size k+1), u-degree r >= 0 and residue subset sigma of size
    m+k-2r; sigma may intersect A."""

    __slots__ = ("cech", "r", "sigma", "c", "dim", "offset")

    def __init__(self, cech, r, sigma, c, dim):
        self.cech = frozenset(cech)
        self.r = r
        self.sigma = frozenset(sigma)
        self.c = c
        self.dim = dim
        self.offset = 0

    @property
    def key(self):
        return (self.cech, self.r, self.sigma)

    @property
    def tau(self):
        return self.cech | self.sigma

    @property
    def m(self):
        return len(self.sigma) - (len(self.cech) - 1) + 2 * self.r


class E1Page:
    """E1 page of one of the two weight spectral sequences.

    cells maps (m, q) to the ordered summand list; d1, n_mat and l_mat
    return the cellwise matrices of the differential, the monodromy
    operator N and the Lefschetz operator l.  For the K variant the
    page is truncated at m <= m_max (the u-tower is infinite in m);
    cohomology is reliable for m <= m_max - 1.
    """

    def __init__(self, variant, datum, cells, m_max=None):
        self.variant = variant
        self.datum = datum
        self.n = datum.n
        self.cells = cells
        self.m_max = m_max
        self._lookup = {}
        for cell, lst in cells.items():
            table = {}
            off = 0
            for s in lst:
                s.offset = off
                off += s.dim
                table[s.key] = s
            self._lookup[cell] = (table, off)
        self._d1 = {}
        self._selfcls = {}

    def summands(self, m, q):
        return self.cells.get((m, q), [])

    def dim(self, m, q):
        entry = self._lookup.get((m, q))
        return entry[1] if entry else 0

    def find(self, m, q, key):
        entry = self._lookup.get((m, q))
        return entry[0].get(key) if entry else None

    def cell_keys(self):
        return sorted(self.cells)

    # differentials and operators

    def d1(self, m, q):
        if (m, q) not in self._d1:
            out = Matrix.zero(self.dim(m - 1, q + 1), self.dim(m, q))
            for s in self.summands(m, q):
                if self.variant == "A":
                    self._d1_from_a(s, m, q, out)
                else:
                    self._d1_from_k(s, m, q, out)
            self._d1[(m, q)] = out
        return self._d1[(m, q)]

    def _d1_from_a(self, s, m, q, out):
        dat, ix = self.datum, self.datum.ix
        if len(s.sigma) > 1:
            for nu in ix.sort(s.sigma):
                tgt = self.find(m - 1, q + 1, (s.sigma - {nu}, s.r))
                if tgt is None:
                    continue
                mat = dat.gysin_mat(s.sigma - {nu}, nu, s.c)
                _add_block(out, tgt.offset, s.offset, mat,
                           -contract_sign(ix, nu, s.sigma))
        for nu in ix.labels:
            if nu in s.sigma or (s.sigma | {nu}) not in dat.nerve:
                continue
            tgt = self.find(m - 1, q + 1, (s.sigma | {nu}, s.r + 1))
            if tgt is None:
                continue
            mat = dat.restrict_mat(s.sigma, s.sigma | {nu}, s.c)
            _add_block(out, tgt.offset, s.offset, mat,
                       -wedge_insert_sign(ix, nu, s.sigma))

    def _d1_from_k(self, s, m, q, out):
        dat, ix = self.datum, self.datum.ix
        tau = s.tau
        ksign = -1 if (len(s.cech) - 1) % 2 else 1
        # stratumwise Gysin; a residue label inside the Cech subset
        # contributes the cup product with the self-intersection class
        for nu in ix.sort(s.sigma):
            tgt = self.find(m - 1, q + 1, (s.cech, s.r, s.sigma - {nu}))
            if tgt is None:
                continue
            if nu in s.cech:
                mat = dat.ring(tau).mult_operator(
                    self._self_class(nu, tau), 2, s.c)
            else:
                mat = dat.gysin_mat(tau - {nu}, nu, s.c)
            _add_block(out, tgt.offset, s.offset, mat,
                       ksign * contract_sign(ix, nu, s.sigma))
        # dlog-t part: lowers the u-degree, adds a residue label
        if s.r >= 1:
            for nu in ix.labels:
                if nu in s.sigma or (tau | {nu}) not in dat.nerve:
                    continue
                tgt = self.find(m - 1, q + 1,
                                (s.cech, s.r - 1, s.sigma | {nu}))
                if tgt is None:
                    continue
                mat = dat.restrict_mat(tau, tau | {nu}, s.c)
                _add_block(out, tgt.offset, s.offset, mat,
                           ksign * wedge_insert_sign(ix, nu, s.sigma))
        # Cech coface
        for nu in ix.labels:
            if nu in s.cech or (tau | {nu}) not in dat.nerve:
                continue
            tgt = self.find(m - 1, q + 1, (s.cech | {nu}, s.r, s.sigma))
            if tgt is None:
                continue
            mat = dat.restrict_mat(tau, tau | {nu}, s.c)
            _add_block(out, tgt.offset, s.offset, mat,
                       wedge_insert_sign(ix, nu, s.cech))

    def _self_class(self, nu, tau):
        """Degree-2 self-intersection class of the nu-th component on
        Y_tau.  The restrictions of all components to Y_nu sum to zero
        in the ambient family, so the self-restriction equals minus the
        sum of the Gysin images g_mu(1) over the other components."""
        key = (nu, tau)
        if key not in self._selfcls:
            dat, ix = self.datum, self.datum.ix
            single = frozenset({nu})
            acc = [Q(0)] * dat.ring(single).dim(2)
            for mu in ix.labels:
                if mu == nu or frozenset({nu, mu}) not in dat.nerve:
                    continue
                g = dat.gysin_mat(single, mu, 0)
                v = g.matvec(dat.ring(frozenset({nu, mu})).unit)
                acc = [a - b for a, b in zip(acc, v)]
            self._selfcls[key] = dat.restrict_mat(single, tau, 2) \
                .matvec(acc)
        return self._selfcls[key]

    def n_mat(self, m, q):
        """Monodromy operator cell (m, q) -> (m-2, q): the u-degree
        shift, identity on matching summands, zero where the target
        summand is absent."""
        out = Matrix.zero(self.dim(m - 2, q), self.dim(m, q))
        for s in self.summands(m, q):
            if self.variant == "A":
                key = (s.sigma, s.r + 1)
            else:
                if s.r == 0:
                    continue
                key = (s.cech, s.r - 1, s.sigma)
            tgt = self.find(m - 2, q, key)
            if tgt is None:
                continue
            _add_block(out, tgt.offset, s.offset,
                       Matrix.identity(s.dim), 1)
        return out

    def l_mat(self, m, q):
        """Lefschetz operator cell (m, q) -> (m, q+2): multiplication
        by the ample class on every summand."""
        out = Matrix.zero(self.dim(m, q + 2), self.dim(m, q))
        for s in self.summands(m, q):
            if self.variant == "A":
                stratum, key = s.sigma, (s.sigma, s.r)
            else:
                stratum, key = s.tau, s.key
            tgt = self.find(m, q + 2, key)
            if tgt is None:
                continue
            _add_block(out, tgt.offset, s.offset,
                       self.datum.ample_op(stratum, s.c), 1)
        return out


def build_e1_A(datum):
    """E1 page of the quotient-model weight spectral sequence."""
    ix = datum.ix
    cells = {}
    for sigma in sorted(datum.nerve, key=ix.subset_key):
        ring = datum.ring(sigma)
        size = len(sigma)
        for r in range(size):
            m = size - 1 - 2 * r
            for c in range(ring.top + 1):
                if ring.dim(c) == 0:
                    continue
                cells.setdefault((m, c + size - 1), []).append(
                    SummandA(sigma, r, c, ring.dim(c)))
    for lst in cells.values():
        lst.sort(key=lambda s: (s.r, ix.subset_key(s.sigma)))
    return E1Page("A", datum, cells)


def build_e1_K(datum, m_max=None):
    """E1 page of the Cech-model weight spectral sequence, truncated
    at weight index m <= m_max (default 2n+2: the u-tower extends to
    arbitrarily large m but E2 is supported in |m| <= 2n - |q - n|)."""
    if m_max is None:
        m_max = 2 * datum.n + 2
    ix = datum.ix
    cells = {}
    for tau in sorted(datum.nerve, key=ix.subset_key):
        ring = datum.ring(tau)
        members = ix.sort(tau)
        degs = [c for c in range(ring.top + 1) if ring.dim(c)]
        for asize in range(1, len(members) + 1):
            for cech_t in combinations(members, asize):
                cech = frozenset(cech_t)
                k = asize - 1
                rest = tau - cech
                for rsize in range(asize + 1):
                    for rho_t in combinations(ix.sort(cech), rsize):
                        sigma = rest | frozenset(rho_t)
                        r = 0
                        while len(sigma) - k + 2 * r <= m_max:
                            m = len(sigma) - k + 2 * r
                            for c in degs:
                                cells.setdefault(
                                    (m, c + len(sigma) + k), []).append(
                                    SummandK(cech, r, sigma, c,
                                             ring.dim(c)))
                            r += 1
    for lst in cells.values():
        lst.sort(key=lambda s: (ix.subset_key(s.cech), s.r,
                                ix.subset_key(s.sigma)))
    return E1Page("K", datum, cells, m_max=m_max)


def operator_N(page):
    """Cellwise matrices of the monodromy operator, (m,q) -> (m-2,q)."""
    return {cell: page.n_mat(*cell) for cell in page.cell_keys()}


def operator_l(page, datum=None):
    """Cellwise matrices of the Lefschetz operator, (m,q) -> (m,q+2)."""
    assert datum is None or datum is page.datum
    return {cell: page.l_mat(*cell) for cell in page.cell_keys()}


class PhiMap:
    """Comparison chain map from the A page to the K page."""

    def __init__(self, page_a, page_k, comps):
        self.page_a = page_a
        self.page_k = page_k
        self.comps = comps

    def comp(self, m, q):
        mat = self.comps.get((m, q))
        if mat is None:
            mat = Matrix.zero(self.page_k.dim(m, q),
                              self.page_a.dim(m, q))
        return mat


def phi_e1(datum, page_a=None, page_k=None):
    """The comparison map: the A-summand (sigma, r) is sent, for every
    subset A of sigma with |A| >= r+1, to the K-summand
    (A, |A|-1-r, sigma - A) carried by the same stratum cohomology,
    with coefficient (-1)^(|A|-1) chi(A, sigma - A)."""
    if page_a is None:
        page_a = build_e1_A(datum)
    if page_k is None:
        page_k = build_e1_K(datum)
    ix = datum.ix
    comps = {}
    for (m, q), lst in page_a.cells.items():
        out = Matrix.zero(page_k.dim(m, q), page_a.dim(m, q))
        for s in lst:
            members = ix.sort(s.sigma)
            for asize in range(s.r + 1, len(members) + 1):
                for cech_t in combinations(members, asize):
                    cech = frozenset(cech_t)
                    k = asize - 1
                    tgt = page_k.find(m, q,
                                      (cech, k - s.r, s.sigma - cech))
                    assert tgt is not None, (m, q, s.key, cech_t)
                    ksign = -1 if k % 2 else 1
                    coeff = ksign * chi(ix, cech, s.sigma - cech)
                    _add_block(out, tgt.offset, s.offset,
                               Matrix.identity(s.dim), coeff)
        comps[(m, q)] = out
    return PhiMap(page_a, page_k, comps)


def trace_theta(page):
    """The trace functional on the K-page cell (0, 2n), as a 1 x dim
    row matrix.  Nonzero only on summands with r = 0 and sigma = A
    minus one label nu; the component is
    eps(k) (-1)^k contract_sign(nu, A) times the stratum trace."""
    assert page.variant == "K"
    dat, ix, n = page.datum, page.datum.ix, page.n
    row = Matrix.zero(1, page.dim(0, 2 * n))
    for s in page.summands(0, 2 * n):
        if s.r != 0 or not s.sigma <= s.cech \
                or len(s.sigma) != len(s.cech) - 1:
            continue
        nu = next(iter(s.cech - s.sigma))
        k = len(s.cech) - 1
        ksign = -1 if k % 2 else 1
        coeff = eps(k) * ksign * contract_sign(ix, nu, s.cech)
        tv = dat.trace_vec(s.cech)
        assert len(tv) == s.dim
        for j, v in enumerate(tv):
            row.a[0][s.offset + j] += coeff * v
    return row


def _trace_row_a(page):
    """The trace functional on the A-page cell (0, 2n): the sum of the
    stratum traces over the r = 0 single-component summands."""
    assert page.variant == "A"
    dat, n = page.datum, page.n
    row = Matrix.zero(1, page.dim(0, 2 * n))
    for s in page.summands(0, 2 * n):
        if s.r != 0:
            continue
        tv = dat.trace_vec(s.sigma)
        assert len(tv) == s.dim
        for j, v in enumerate(tv):
            row.a[0][s.offset + j] += v
    return row


class Columns:
    """The complexes (E1 cells, d1) along the lines m + q = const,
    giving E2 = cohomology with explicit projection and section."""

    def __init__(self, page):
        self.page = page
        self._cx = {}

    def complex(self, s):
        if s not in self._cx:
            ms = [m for (m, q) in self.page.cells if m + q == s]
            if not ms:
                self._cx[s] = None
            else:
                lo, hi = -max(ms), -min(ms)
                dims = {p: self.page.dim(-p, s + p)
                        for p in range(lo, hi + 1)}
                diffs = {p: self.page.d1(-p, s + p)
                         for p in range(lo, hi + 1)}
                self._cx[s] = Complex(dims, diffs)
        return self._cx[s]

    def cohomology(self, m, q):
        """(dim, proj, sec) of the E2 cell (m, q)."""
        cx = self.complex(m + q)
        if cx is None or cx.dim(-m) == 0:
            d = self.page.dim(m, q)
            return 0, Matrix.zero(0, d), Matrix.zero(d, 0)
        return cx.cohomology(-m)


def _pairing_e1(page, m, q):
    """Matrix P of the rational pairing between the E1 cells (m, q)
    and (-m, 2n-q): the summand (sigma, r) pairs only with
    (sigma, r+m), through the stratum cup product and trace, with
    coefficient (-1)^(m(q+1)) eps(m)."""
    assert page.variant == "A"
    dat, n = page.datum, page.n
    out = Matrix.zero(page.dim(m, q), page.dim(-m, 2 * n - q))
    kap = eps(m) * (-1 if (m * (q + 1)) % 2 else 1)
    for s in page.summands(m, q):
        part = page.find(-m, 2 * n - q, (s.sigma, s.r + m))
        if part is None:
            continue
        # twist balance: tw_x + tw_y + (c_x + c_y)/2 = n
        assert s.tw + part.tw + (s.c + part.c) // 2 == n, \
            ("twist imbalance", m, q, s.key)
        ring = dat.ring(s.sigma)
        for a in range(s.dim):
            ea = unit_vec(s.dim, a)
            for b in range(part.dim):
                prod = ring.mul(s.c, part.c, ea,
                                unit_vec(part.dim, b))
                out.a[s.offset + a][part.offset + b] = \
                    kap * dat.trace(s.sigma, prod)
    return out


def pairing_descent_defect(page, m, q):
    """Q(d1 u, v) + (-1)^q Q(u, d1 v) as a matrix on the E1 cells
    (m+1, q-1) x (-m, 2n-q); zero exactly when the pairing descends
    to E2."""
    n = page.n
    d_left = page.d1(m + 1, q - 1)
    d_right = page.d1(-m, 2 * n - q)
    p_here = _pairing_e1(page, m, q)
    p_up = _pairing_e1(page, m + 1, q - 1)
    sgn = -1 if q % 2 else 1
    return d_left.transpose() * p_here + (p_up * d_right).scale(sgn)


class LimitMHS:
    """The limit mixed Hodge structure: E2 cells of the A page with
    weights, Hodge types, the operators N and l, the rational pairing
    and the trace, all descended to E2."""

    def __init__(self, datum):
        self.datum = datum
        self.n = datum.n
        self.page = build_e1_A(datum)
        self.cols = Columns(self.page)
        self.e2 = {}
        for cell in self.page.cell_keys():
            dim, proj, sec = self.cols.cohomology(*cell)
            if dim:
                self.e2[cell] = (dim, proj, sec)
        self.weights = {}
        self.hodge = {}
        for (m, q), (dim, _, _) in sorted(self.e2.items()):
            w = q + m
            self.weights.setdefault(q, {})
            self.weights[q][w] = self.weights[q].get(w, 0) + dim
            self.hodge.setdefault(q, {})
            p = Q(w, 2)
            self.hodge[q][p] = self.hodge[q].get(p, 0) + dim
        # descend N and l to E2
        self.N = {}
        self.l = {}
        for (m, q), (dim, _, sec) in self.e2.items():
            tn = self.e2.get((m - 2, q))
            self.N[(m, q)] = (tn[1] * self.page.n_mat(m, q) * sec) \
                if tn else Matrix.zero(0, dim)
            tl = self.e2.get((m, q + 2))
            self.l[(m, q)] = (tl[1] * self.page.l_mat(m, q) * sec) \
                if tl else Matrix.zero(0, dim)
        # descend the pairing
        self.Q = {}
        for (m, q), (dim, _, sec) in self.e2.items():
            part = self.e2.get((-m, 2 * self.n - q))
            if part is None:
                continue
            p1 = _pairing_e1(self.page, m, q)
            self.Q[(m, q)] = sec.transpose() * p1 * part[2]
        # the trace on H^{2n}
        top = self.e2.get((0, 2 * self.n))
        self.tr = (_trace_row_a(self.page) * top[2]) if top \
            else Matrix.zero(1, 0)
        self.verdicts = self._basic_verdicts()

    def dim(self, m, q):
        entry = self.e2.get((m, q))
        return entry[0] if entry else 0

    def h(self, q):
        return sum(d for (m, qq), (d, _, _) in self.e2.items()
                   if qq == q)

    def proj(self, m, q):
        entry = self.e2.get((m, q))
        return entry[1] if entry else \
            Matrix.zero(0, self.page.dim(m, q))

    def sec(self, m, q):
        entry = self.e2.get((m, q))
        return entry[2] if entry else \
            Matrix.zero(self.page.dim(m, q), 0)

    def n_block(self, m, q):
        blk = self.N.get((m, q))
        if blk is None:
            blk = Matrix.zero(self.dim(m - 2, q), self.dim(m, q))
        return blk

    def l_block(self, m, q):
        blk = self.l.get((m, q))
        if blk is None:
            blk = Matrix.zero(self.dim(m, q + 2), self.dim(m, q))
        return blk

    def q_block(self, m, q):
        blk = self.Q.get((m, q))
        if blk is None:
            blk = Matrix.zero(self.dim(m, q),
                              self.dim(-m, 2 * self.n - q))
        return blk

    def n_power(self, m, q, i):
        mat = Matrix.identity(self.dim(m, q))
        cur = m
        for _ in range(i):
            mat = self.n_block(cur, q) * mat
            cur -= 2
        return mat

    def l_power(self, m, q, j):
        mat = Matrix.identity(self.dim(m, q))
        cur = q
        for _ in range(j):
            mat = self.l_block(m, cur) * mat
            cur += 2
        return mat

    def _basic_verdicts(self):
        report = []
        n = self.n
        # Euler oracle against open-stratum characteristics
        euler = sum((-1 if q % 2 else 1) * self.h(q)
                    for q in range(2 * n + 1))
        oracle = sum(self.datum.euler_open(x)
                     for x in self.datum.ix.labels)
        report.append({
            "check": "euler-oracle", "where": "total",
            "ok": euler == oracle,
            "witness": "" if euler == oracle
            else "%s != %s" % (euler, oracle)})
        # weight-support bounds
        bad = [(m, q) for (m, q) in self.e2
               if not (-q <= m <= q
                       and -2 * n + q <= m <= 2 * n - q)]
        report.append({
            "check": "weight-bounds", "where": "all cells",
            "ok": not bad,
            "witness": "" if not bad else "cell %r" % (bad[0],)})
        # H^{2n}: single weight 2n, trace defined and rational
        top_ok = all(m == 0 for (m, q) in self.e2 if q == 2 * n)
        report.append({
            "check": "top-weight", "where": "q=%d" % (2 * n),
            "ok": top_ok,
            "witness": "" if top_ok else "weight spread in top degree"})
        return report


def compute_limit(datum):
    return LimitMHS(datum)


def trace_tr(limit):
    """The trace functional on H^{2n}, as a 1 x dim row matrix."""
    return limit.tr


class HLModule:
    """The weight-graded Lefschetz module of a limit: pieces
    L^{i,j} = gr-weight n+j-i part of H^{n+j} (the E2 cell (-i, n+j)),
    the bracket pairing L^{-i,-j} x L^{i,j}, primitive pieces and the
    primitive forms."""

    def __init__(self, limit):
        self.limit = limit
        self.n = limit.n
        self.checks = []

    def piece_dim(self, i, j):
        return self.limit.dim(-i, self.n + j)

    def bracket(self, i, j):
        """Pairing matrix L^{-i,-j} x L^{i,j} -> Q."""
        return self.limit.q_block(i, self.n - j).scale(eps(j - self.n))

    def s_form(self, q, m):
        """The form S_q(x, y) = eps(q) Q(x, l^{n-q} y) between the
        weight pieces E2(m, q) and E2(-m, q), for q <= n."""
        lim = self.limit
        lp = lim.l_power(-m, q, self.n - q)
        return (lim.q_block(m, q) * lp).scale(eps(q))

    def primitive(self, q, i):
        """P_i inside E2(i, q): kernel of N^{i+1} and of l^{n-q+1}."""
        lim = self.limit
        m1 = lim.n_power(i, q, i + 1)
        m2 = lim.l_power(i, q, self.n - q + 1)
        return kernel(vstack([m1, m2]))

    def primitive_form(self, q, i):
        """The rational form x -> eps(q) Q(x, l^{n-q} N^i x) on the
        primitive piece P_i of H^q, in the basis of primitive(q, i)."""
        lim = self.limit
        prim = self.primitive(q, i)
        op = lim.l_power(-i, q, self.n - q) * lim.n_power(i, q, i)
        qmat = lim.q_block(i, q)
        form = Matrix.zero(prim.dim, prim.dim)
        for a in range(prim.dim):
            xa = prim.basis.row(a)
            for b in range(prim.dim):
                yb = op.matvec(prim.basis.row(b))
                form.a[a][b] = eps(q) * sum(
                    (u * v for u, v in zip(xa, qmat.matvec(yb))), Q(0))
        return prim, form


def pairing(limit):
    """Assemble the Lefschetz-module pairing data and certify the
    pairing identities; the verdicts land in the returned module's
    .checks list."""
    hl = HLModule(limit)
    n = limit.n
    page = limit.page

    def add(check, where, ok, witness=""):
        hl.checks.append({"check": check, "where": where,
                          "ok": bool(ok),
                          "witness": witness if not ok else ""})

    cells = sorted(limit.e2)
    for (m, q) in cells:
        where = "m=%d,q=%d" % (m, q)
        partner = (-m, 2 * n - q)
        # descent: the E1 pairing is d1-adjoint up to (-1)^q
        defect = pairing_descent_defect(page, m, q)
        add("Q-descent", where, defect.is_zero(),
            "adjointness defect nonzero")
        if partner not in limit.e2:
            add("Q-perfect", where, False, "partner cell missing")
            continue
        qmat = limit.q_block(m, q)
        qback = limit.q_block(*partner)
        sgn = -1 if q % 2 else 1
        add("Q-symmetry", where,
            qback == qmat.transpose().scale(sgn),
            "Q(y,x) != (-1)^q Q(x,y)")
        add("Q-perfect", where,
            qmat.rows == qmat.cols and rank(qmat) == qmat.rows,
            "pairing not perfect")
        # F- and W-orthogonality: nonzero components only pair Hodge
        # levels p and n-p and weights w and 2n-w
        px = Q(q + m, 2)
        py = Q(2 * n - q - m, 2)
        add("Q-orthogonality", where, px + py == n,
            "Hodge levels do not balance")
        # N-antisymmetry: Q(Nx, y) + Q(x, Ny) = 0 with
        # x in E2(m,q), y in E2(2-m, 2n-q)
        src_y = (2 - m, 2 * n - q)
        nx = limit.n_block(m, q)
        ny = limit.n_block(*src_y)
        lhs = nx.transpose() * limit.q_block(m - 2, q)
        rhs = limit.q_block(m, q) * ny
        add("Q-N-antisymmetry", where, (lhs + rhs).is_zero(),
            "Q(Nx,y) + Q(x,Ny) != 0")
    return hl


def verify_polarized(limit):
    """Full polarization report: N-nilpotence, the weight symmetry
    N^i: gr-weight (q+i) -> (q-i), hard Lefschetz across the middle
    degree, and positive definiteness of the primitive forms."""
    report = []
    n = limit.n
    hl = HLModule(limit)

    def add(check, where, ok, witness=""):
        report.append({"check": check, "where": where, "ok": bool(ok),
                       "witness": witness if not ok else ""})

    for q in range(0, 2 * n + 1):
        ms = sorted(m for (m, qq) in limit.e2 if qq == q)
        if not ms:
            continue
        # (i) N^{q+1} = 0 on H^q
        ok = all(limit.n_power(m, q, q + 1).is_zero() for m in ms)
        add("N-nilpotent", "q=%d" % q, ok, "N^%d != 0" % (q + 1))
        # (ii) N^i: weight q+i -> weight q-i is an isomorphism
        for i in range(1, max(ms, default=0) + 1):
            da, db = limit.dim(i, q), limit.dim(-i, q)
            if da == 0 and db == 0:
                continue
            mat = limit.n_power(i, q, i)
            add("weight-symmetry", "N^%d at q=%d" % (i, q),
                da == db and rank(mat) == da,
                "N^%d: dim %d -> dim %d rank %d"
                % (i, da, db, rank(mat)))
    # (iii) hard Lefschetz l^{n-q}: H^q -> H^{2n-q} blockwise
    for q in range(0, n + 1):
        for m in sorted(m for (m, qq) in limit.e2 if qq == q):
            da = limit.dim(m, q)
            db = limit.dim(m, 2 * n - q)
            mat = limit.l_power(m, q, n - q)
            add("hard-lefschetz", "l^%d at m=%d,q=%d" % (n - q, m, q),
                da == db and rank(mat) == da,
                "l^%d: dim %d -> dim %d rank %d"
                % (n - q, da, db, rank(mat)))
    # (iv)+(v) primitive pieces and positivity
    for q in range(0, n + 1):
        for i in range(0, q + 1):
            if limit.dim(i, q) == 0:
                continue
            prim, form = hl.primitive_form(q, i)
            if prim.dim == 0:
                continue
            where = "P_%d at q=%d" % (i, q)
            add("primitive-symmetric", where,
                form == form.transpose(), "form not symmetric")
            add("HL-positivity", where, is_positive_definite(form),
                "form not positive definite on a %d-dim piece"
                % prim.dim)
    return report


def compare_pages(datum, page_a=None, page_k=None):
    """Cross-certification of the two pages: d1 squares to zero, the
    comparison map is a chain map commuting with N and l, the trace
    functional kills d1 and pulls back to the stratum trace sum, and
    the induced map on E2 is a cellwise isomorphism."""
    if page_a is None:
        page_a = build_e1_A(datum)
    if page_k is None:
        page_k = build_e1_K(datum)
    phi = phi_e1(datum, page_a, page_k)
    n = datum.n
    report = []

    def add(check, where, ok, witness=""):
        report.append({"check": check, "where": where, "ok": bool(ok),
                       "witness": witness if not ok else ""})

    for (m, q) in page_a.cell_keys():
        ok = (page_a.d1(m - 1, q + 1) * page_a.d1(m, q)).is_zero()
        add("d1-squared-A", "m=%d,q=%d" % (m, q), ok)
    for (m, q) in page_k.cell_keys():
        ok = (page_k.d1(m - 1, q + 1) * page_k.d1(m, q)).is_zero()
        add("d1-squared-K", "m=%d,q=%d" % (m, q), ok)
    for (m, q) in page_a.cell_keys():
        where = "m=%d,q=%d" % (m, q)
        lhs = page_k.d1(m, q) * phi.comp(m, q)
        rhs = phi.comp(m - 1, q + 1) * page_a.d1(m, q)
        add("phi-chain-map", where, lhs == rhs)
        lhs = page_k.n_mat(m, q) * phi.comp(m, q)
        rhs = phi.comp(m - 2, q) * page_a.n_mat(m, q)
        add("phi-N-commute", where, lhs == rhs)
        lhs = page_k.l_mat(m, q) * phi.comp(m, q)
        rhs = phi.comp(m, q + 2) * page_a.l_mat(m, q)
        add("phi-l-commute", where, lhs == rhs)
    theta = trace_theta(page_k)
    add("theta-d1", "cell (1,%d)" % (2 * n - 1),
        (theta * page_k.d1(1, 2 * n - 1)).is_zero(),
        "trace functional does not kill d1")
    add("theta-phi-trace", "cell (0,%d)" % (2 * n),
        theta * phi.comp(0, 2 * n) == _trace_row_a(page_a),
        "theta pulled back along phi differs from the stratum traces")
    cols_a = Columns(page_a)
    cols_k = Columns(page_k)
    cell_dims = {}
    trusted = set(page_a.cells) | {
        (m, q) for (m, q) in page_k.cells if m <= page_k.m_max - 1}
    for (m, q) in sorted(trusted):
        da, pa_proj, sa = cols_a.cohomology(m, q)
        dk, pk_proj, sk = cols_k.cohomology(m, q)
        cell_dims[(m, q)] = (da, dk)
        if da == 0 and dk == 0:
            continue
        induced = pk_proj * phi.comp(m, q) * sa
        add("E2-iso", "m=%d,q=%d" % (m, q),
            da == dk and rank(induced) == da,
            "E2 dims %d vs %d, induced rank %d"
            % (da, dk, rank(induced)))
    return report, cell_dims


def all_ok(report):
    return all(r["ok"] for r in report)
