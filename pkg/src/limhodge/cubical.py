"""Index combinatorics and Čech complexes of co-cubical complexes.

A co-cubical complex assigns a cochain complex K(sigma) to every
nonempty subset sigma of a finite label set and a compatible map
K(iota): K(sigma) -> K(tau) to every inclusion sigma <= tau.  Its Čech
complex carries the differential delta + (-1)^k partial on the cell of
Čech degree k, the filtrations W and deltaW, and the product tau.

Two models are provided: the ordered model (cells indexed by injective
tuples; hosts tau) and the alternating model (cells indexed by subsets
with orientation twists; used by the geometric pipeline).

All signs flow through the orientation bookkeeping relative to each
subset's reference generator; the label order is serialization
metadata only.
"""

from fractions import Fraction as Q
from itertools import permutations, combinations
from math import factorial

from .exactlin import Matrix, Subspace
from .homalg import (
    Complex, ChainMap, FilteredComplex, tensor, tensor_offsets, tensor_map,
)


class IndexSet:
    def __init__(self, labels):
        labels = list(labels)
        assert labels, "empty index set"
        assert len(set(labels)) == len(labels), "labels not distinct"
        self.labels = labels
        self._pos = {x: i for i, x in enumerate(labels)}

    def pos(self, label):
        return self._pos[label]

    def sort(self, labels):
        return tuple(sorted(labels, key=self.pos))

    def subsets(self, size):
        return [frozenset(c) for c in combinations(self.labels, size)]

    def subset_key(self, sigma):
        return tuple(self.pos(x) for x in self.sort(sigma))

    def tuples(self, length):
        """Injective tuples, lexicographic in label positions."""
        return sorted(permutations(self.labels, length),
                      key=lambda t: tuple(self.pos(x) for x in t))


# tuple operations

def tuple_d(lam):
    return len(lam) - 1


def tuple_underlying(lam):
    return frozenset(lam)


def tuple_drop(lam, i):
    if not 0 <= i <= tuple_d(lam):
        raise IndexError(i)
    return lam[:i] + lam[i + 1:]


def tuple_head(lam, i):
    if not 0 <= i <= tuple_d(lam):
        raise IndexError(i)
    return lam[:i + 1]


def tuple_tail(lam, i):
    if not 0 <= i <= tuple_d(lam):
        raise IndexError(i)
    return lam[i:]


def tuple_injective(lam):
    return len(set(lam)) == len(lam)


# orientation bookkeeping: e_lam = sign(lam) * e_{sorted(lam)}

def orientation_sign(ix, lam):
    """Sign of the injective tuple relative to the reference generator
    e_{sorted(underlying set)}."""
    if not tuple_injective(lam):
        raise ValueError("repeated labels in %r" % (lam,))
    pos = [ix.pos(x) for x in lam]
    sign = 1
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            if pos[i] > pos[j]:
                sign = -sign
    return sign


def chi(ix, a, b):
    """Sign s with e_A wedge e_B = s * e_{A union B}; A, B disjoint
    subsets with reference generators."""
    a, b = frozenset(a), frozenset(b)
    if a & b:
        raise ValueError("subsets not disjoint")
    lam = ix.sort(a) + ix.sort(b)
    return orientation_sign(ix, lam)


def wedge_insert_sign(ix, nu, a):
    """Sign s with e_nu wedge e_A = s * e_{A union {nu}}."""
    return chi(ix, (nu,), a)


def contract_sign(ix, nu, a):
    """Sign s with e_A = s * (e_nu wedge e_{A minus nu}); the inverse of
    e_nu wedge applied to e_A is s * e_{A minus nu}."""
    a = frozenset(a)
    if nu not in a:
        raise ValueError("label not in subset")
    return chi(ix, (nu,), a - {nu})


def theta(ix, sigma, lam, mu):
    """theta(sigma)(e_lam (x) e_mu) for two orderings of sigma; the
    diagonal is sent to 1."""
    assert frozenset(lam) == frozenset(mu) == frozenset(sigma)
    return orientation_sign(ix, lam) * orientation_sign(ix, mu)


class CoCubicalComplex:
    """complexes: {frozenset: Complex}; cover_maps: {(sigma, tau):
    ChainMap} for tau = sigma + one label.  General inclusion maps are
    composites; path independence is the functoriality check."""

    def __init__(self, ix, complexes, cover_maps, check=True):
        self.ix = ix
        self.complexes = dict(complexes)
        self.cover_maps = dict(cover_maps)
        self._map_cache = {}
        if check:
            self._check_functorial()

    def complex(self, sigma):
        return self.complexes[frozenset(sigma)]

    def map(self, sigma, tau):
        """The matrix family of K(iota): K(sigma) -> K(tau)."""
        sigma, tau = frozenset(sigma), frozenset(tau)
        assert sigma <= tau
        key = (sigma, tau)
        if key in self._map_cache:
            return self._map_cache[key]
        src = self.complex(sigma)
        if sigma == tau:
            out = {p: Matrix.identity(src.dim(p)) for p in src.degrees()}
        else:
            added = self.ix.sort(tau - sigma)
            cur = sigma
            out = {p: Matrix.identity(src.dim(p)) for p in src.degrees()}
            for x in added:
                nxt = cur | {x}
                step = self.cover_maps[(cur, nxt)]
                tgt_c = self.complex(nxt)
                cur_c = self.complex(cur)
                out = {
                    p: step.comp(p) * out.get(
                        p, Matrix.zero(cur_c.dim(p), src.dim(p)))
                    for p in tgt_c.degrees()
                }
                cur = nxt
        self._map_cache[key] = out
        return out

    def _check_functorial(self):
        for (sigma, tau), f in self.cover_maps.items():
            assert f.source is self.complexes[sigma]
            assert f.target is self.complexes[tau]
        for sigma in self.complexes:
            for x in self.ix.labels:
                for y in self.ix.labels:
                    if x == y or x in sigma or y in sigma:
                        continue
                    tau = sigma | {x, y}
                    if tau not in self.complexes:
                        continue
                    via_x = self._compose((sigma, sigma | {x}),
                                          (sigma | {x}, tau))
                    via_y = self._compose((sigma, sigma | {y}),
                                          (sigma | {y}, tau))
                    for p in self.complexes[tau].degrees():
                        assert via_x.get(p) == via_y.get(p), \
                            ("functoriality fails", sigma, tau, p)

    def _compose(self, step1, step2):
        f1 = self.cover_maps[step1]
        f2 = self.cover_maps[step2]
        return {p: f2.comp(p) * f1.comp(p)
                for p in self.complexes[step2[1]].degrees()}


def tensor_cocubical(k, l, check=False):
    """The co-cubical complex sigma -> K(sigma) (x) L(sigma)."""
    assert k.ix is l.ix or k.ix.labels == l.ix.labels
    complexes = {s: tensor(k.complexes[s], l.complexes[s])
                 for s in k.complexes}
    cover = {}
    for key in k.cover_maps:
        fm = tensor_map(k.cover_maps[key], l.cover_maps[key])
        # rebuild on the shared complex objects
        cover[key] = ChainMap(complexes[key[0]], complexes[key[1]],
                              fm.f, check=False)
    return CoCubicalComplex(k.ix, complexes, cover, check=check)


class CechComplex:
    """Total Čech complex with cell bookkeeping.

    blocks[n] is the ordered list of (k, idx, l, offset, size) with
    k + l = n; idx is an injective tuple (ordered model) or a frozenset
    (alternating model).
    """

    def __init__(self, K, model):
        assert model in ("ordered", "alternating")
        self.K = K
        self.model = model
        self.ix = K.ix
        nlab = len(self.ix.labels)
        cells = []
        for k in range(nlab):
            if model == "ordered":
                idxs = [t for t in self.ix.tuples(k + 1)
                        if frozenset(t) in K.complexes]
            else:
                idxs = sorted(
                    (s for s in self.ix.subsets(k + 1)
                     if s in K.complexes),
                    key=self.ix.subset_key)
            for idx in idxs:
                cells.append((k, idx))
        self.cells = cells
        degs = set()
        for k, idx in cells:
            c = K.complex(idx if isinstance(idx, frozenset)
                          else frozenset(idx))
            for l in c.degrees():
                if c.dim(l) > 0:
                    degs.add(k + l)
        if not degs:
            self.total = Complex({0: 0}, {})
            self.blocks = {}
            return
        lo, hi = min(degs), max(degs)
        self.blocks = {}
        dims = {}
        for n in range(lo, hi + 1):
            blks = []
            off = 0
            for k, idx in cells:
                l = n - k
                c = self._stalk(idx)
                sz = c.dim(l)
                if sz > 0:
                    blks.append((k, idx, l, off, sz))
                    off += sz
            self.blocks[n] = blks
            dims[n] = off
        diffs = {}
        for n in range(lo, hi + 1):
            diffs[n] = self._build_diff(n, dims)
        self.total = Complex(dims, diffs)

    def _stalk(self, idx):
        return self.K.complex(idx if isinstance(idx, frozenset)
                              else frozenset(idx))

    def block_offset(self, n, k, idx):
        for kk, ii, l, off, sz in self.blocks.get(n, []):
            if kk == k and ii == idx:
                return off, sz
        return None

    def _build_diff(self, n, dims):
        rows = dims.get(n + 1, 0)
        cols = dims.get(n, 0)
        m = Matrix.zero(rows, cols)
        tgt_blocks = {(k, idx): (off, sz)
                      for k, idx, l, off, sz in self.blocks.get(n + 1, [])}
        for k, idx, l, off, sz in self.blocks.get(n, []):
            stalk = self._stalk(idx)
            # (-1)^k partial: same cell index, l -> l+1
            t = tgt_blocks.get((k, idx))
            if t is not None:
                s = Q(1) if k % 2 == 0 else Q(-1)
                dmat = stalk.diff(l)
                for i in range(dmat.rows):
                    for j in range(sz):
                        if dmat.a[i][j] != 0:
                            m.a[t[0] + i][off + j] += s * dmat.a[i][j]
            # delta part: Čech degree k -> k+1
            if self.model == "ordered":
                self._delta_ordered(m, n, k, idx, l, off, sz, tgt_blocks)
            else:
                self._delta_alternating(m, n, k, idx, l, off, sz,
                                        tgt_blocks)
        return m

    def _delta_ordered(self, m, n, k, lam, l, off, sz, tgt_blocks):
        # component of delta(f) at mu with mu_i = lam: insert any label
        # at position i
        for mu_k, mu in [(kk, ii) for (kk, ii) in tgt_blocks
                         if kk == k + 1]:
            for i in range(len(mu)):
                if tuple_drop(mu, i) == lam:
                    sgn = Q(1) if i % 2 == 0 else Q(-1)
                    kmap = self.K.map(frozenset(lam), frozenset(mu))
                    mat = kmap.get(l)
                    if mat is None:
                        continue
                    toff, _ = tgt_blocks[(k + 1, mu)]
                    for r in range(mat.rows):
                        for c in range(sz):
                            if mat.a[r][c] != 0:
                                m.a[toff + r][off + c] += sgn * mat.a[r][c]

    def _delta_alternating(self, m, n, k, a, l, off, sz, tgt_blocks):
        for nu in self.ix.labels:
            if nu in a:
                continue
            b = a | {nu}
            t = tgt_blocks.get((k + 1, b))
            if t is None:
                continue
            sgn = Q(wedge_insert_sign(self.ix, nu, a))
            mat = self.K.map(a, b).get(l)
            if mat is None:
                continue
            for r in range(mat.rows):
                for c in range(sz):
                    if mat.a[r][c] != 0:
                        m.a[t[0] + r][off + c] += sgn * mat.a[r][c]


def cech(K, model):
    return CechComplex(K, model)


def cech_filtration(cechc, filts, delta=False):
    """Filtered structure on the Čech total complex.

    filts: {frozenset: FilteredComplex over K(sigma)}.  W_m of cell
    (k, l) is W_m K^l; with delta=True it is W_{m+k} K^l (the deltaW
    filtration).
    """
    lows = [f.w_weights[0] for f in filts.values()]
    highs = [f.w_weights[-1] for f in filts.values()]
    maxk = max((k for k, _ in cechc.cells), default=0)
    lo = min(lows) - (maxk if delta else 0)
    hi = max(highs)
    w = {}
    for mlevel in range(lo, hi + 1):
        layer = {}
        for n, blks in cechc.blocks.items():
            rows = []
            dimn = cechc.total.dim(n)
            for k, idx, l, off, sz in blks:
                sigma = idx if isinstance(idx, frozenset) else frozenset(idx)
                eff = mlevel + (k if delta else 0)
                sub = filts[sigma].w_sub(eff, l)
                for brow in sub.basis.to_lists():
                    v = [Q(0)] * dimn
                    for j, x in enumerate(brow):
                        v[off + j] = x
                    rows.append(v)
            layer[n] = Subspace(dimn, rows)
        w[mlevel] = layer
    return FilteredComplex(cechc.total, w)


def antisymmetrize(cech_ord, cech_alt):
    """The chain map ordered -> alternating model:
    f_A = (1/(k+1)!) sum over orderings lam of A of sign(lam) f_lam."""
    assert cech_ord.model == "ordered" and cech_alt.model == "alternating"
    ix = cech_ord.ix
    comps = {}
    for n in cech_ord.total.degrees():
        m = Matrix.zero(cech_alt.total.dim(n), cech_ord.total.dim(n))
        tgt = {(k, idx): (off, sz)
               for k, idx, l, off, sz in cech_alt.blocks.get(n, [])}
        for k, lam, l, off, sz in cech_ord.blocks.get(n, []):
            a = frozenset(lam)
            t = tgt.get((k, a))
            if t is None:
                continue
            coeff = Q(orientation_sign(ix, lam), factorial(k + 1))
            for i in range(sz):
                m.a[t[0] + i][off + i] += coeff
        comps[n] = m
    return ChainMap(cech_ord.total, cech_alt.total, comps)


def tau(cech_k, cech_l, cech_kl):
    """The product morphism C(K) (x) C(L) -> C(K (x) L) (ordered model).

    tau_{k,l}(f (x) g)_lam = K(iota)(f_{h_k(lam)}) (x)
    L(iota)(g_{t_k(lam)}), totaled with the sign (-1)^{(p-k)l} where p
    is the total degree of f and k, l the Čech degrees.
    """
    assert cech_k.model == cech_l.model == cech_kl.model == "ordered"
    src = tensor(cech_k.total, cech_l.total)
    tgt = cech_kl.total
    comps = {}
    for n in src.degrees():
        m = Matrix.zero(tgt.dim(n), src.dim(n))
        soff = tensor_offsets(cech_k.total, cech_l.total, n)
        tgt_blocks = {(k, idx): (off, sz, l)
                      for k, idx, l, off, sz in cech_kl.blocks.get(n, [])}
        for (p, q), so in soff.items():
            for kf, mu, a, offk, szk in cech_k.blocks.get(p, []):
                for lg, nu, b, offl, szl in cech_l.blocks.get(q, []):
                    if mu[-1] != nu[0]:
                        continue
                    lam = mu + nu[1:]
                    if not tuple_injective(lam):
                        continue
                    key = (kf + lg, lam)
                    if key not in tgt_blocks:
                        continue
                    toff, tsz, tl = tgt_blocks[key]
                    assert tl == a + b
                    sgn = Q(1) if ((p - kf) * lg) % 2 == 0 else Q(-1)
                    sig = frozenset(lam)
                    kmat = cech_k.K.map(frozenset(mu), sig).get(a)
                    lmat = cech_l.K.map(frozenset(nu), sig).get(b)
                    if kmat is None or lmat is None:
                        continue
                    # position inside the stalk tensor (K (x) L)(lam)^
                    # {a+b}: summand (a, b)
                    kl_stalk_k = cech_k.K.complex(sig)
                    kl_stalk_l = cech_l.K.complex(sig)
                    stoff = tensor_offsets(kl_stalk_k, kl_stalk_l,
                                           a + b)[(a, b)]
                    dlb = kl_stalk_l.dim(b)
                    for i1 in range(kmat.rows):
                        for j1 in range(szk):
                            c1 = kmat.a[i1][j1]
                            if c1 == 0:
                                continue
                            for i2 in range(lmat.rows):
                                for j2 in range(szl):
                                    c2 = lmat.a[i2][j2]
                                    if c2 == 0:
                                        continue
                                    row = toff + stoff + i1 * dlb + i2
                                    col = so + (offk + j1) * \
                                        cech_l.total.dim(q) + offl + j2
                                    m.a[row][col] += sgn * c1 * c2
        comps[n] = m
    return ChainMap(src, tgt, comps)


def constant_cocubical(ix, check=True):
    """K(sigma) = Q in degree 0 with identity maps."""
    complexes = {}
    for size in range(1, len(ix.labels) + 1):
        for s in ix.subsets(size):
            complexes[s] = Complex({0: 1}, {})
    cover = {}
    for s in complexes:
        for x in ix.labels:
            if x in s:
                continue
            t = s | {x}
            cover[(s, t)] = ChainMap(complexes[s], complexes[t],
                                     {0: Matrix.identity(1)})
    return CoCubicalComplex(ix, complexes, cover, check=check)
