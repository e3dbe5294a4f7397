"""Derived local cohomology, derived completion, and what is built from them.

All functors are taken in the finely graded model: completion is graded
completion, the Matlis dual is the graded vector-space dual with degrees
negated, and the dualizing complex is Σ^n S(-1,...,-1).

Derived completion is computed on flat (atom) representatives.  For an atom
S_σ(-g) and a degree d, (a^t S_σ(-g))_d is either the whole line or zero, so
the descending chain (a^t F)_d is determined by one integer per atom: the
a-adic order of x^(d-g) in S_σ.  The chain is constant once t exceeds the
largest finite order, which gives an exact stabilization stage.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .complexes import (Atom, AtomComplex, ChainMap, CohomologyTable, ConeComplex, DegreeBox,
                        DegreewiseComplex, HomologyBasis, as_complex, cech, cohomology_table,
                        hom_from_free, homology_basis, homology_table, induced_matrix, tensor)
from .errors import Inconclusive, InvalidInput
from .linalg import Matrix, QuotientSpace, rank, stable_image
from .monomial import ModulePresentation, MonomialIdeal, RingSpec, add, sub

DEFAULT_STAGES = 12
DEFAULT_PLATEAU = 3


def ring_of(X) -> RingSpec:
    ring = getattr(X, "ring", None)
    if ring is None:
        raise InvalidInput(f"cannot determine the ring of {X!r}")
    return ring


# --- a-adic orders ---------------------------------------------------------

@lru_cache(maxsize=None)
def _projected_generators(a: MonomialIdeal, sigma: frozenset):
    """Generators with the σ-coordinates zeroed, or None when some generator
    becomes a unit in S_σ (then a S_σ = S_σ)."""
    out = []
    for g in a.generators:
        p = tuple(0 if j in sigma else c for j, c in enumerate(g))
        if not any(p):
            return None
        out.append(p)
    return tuple(sorted(set(out)))


@lru_cache(maxsize=None)
def _order(gens: tuple, e: tuple) -> int:
    best = 0
    for g in gens:
        if all(x >= y for x, y in zip(e, g)):
            best = max(best, 1 + _order(gens, tuple(x - y for x, y in zip(e, g))))
    return best


def adic_order(a: MonomialIdeal, sigma: frozenset, e) -> int | None:
    """Largest t with x^e in a^t S_σ; None means every t (infinite order).

    Assumes x^e lies in S_σ, i.e. e_j >= 0 off σ.
    """
    gens = _projected_generators(a, frozenset(sigma))
    if gens is None:
        return None
    e = tuple(0 if j in sigma else c for j, c in enumerate(e))
    return _order(gens, e)


# --- RΓ ----------------------------------------------------------------------

def rgamma(b: MonomialIdeal, X) -> DegreewiseComplex:
    """X ⊗ Č(b); modules are replaced by their free resolutions first.

    The zero ideal gives back (the representative of) X: Γ_0 is the identity.
    """
    P = as_complex(X)
    if b.is_unit():
        raise InvalidInput("local cohomology at the unit ideal is not supported")
    if b.is_zero():
        return P
    return tensor(P, cech(b, P.ring))


# --- LΛ by degreewise completion -----------------------------------------

class Completion(DegreewiseComplex):
    """Λ^a(F) = lim_t F/a^t F for a flat atom complex F, degree by degree.

    At (i, d) the kept basis consists of the atoms of finite a-adic order; the
    atoms of infinite order span ∩_t (a^t F)_d, a subcomplex.  A cell is
    certified when its chain (a^t F)_d is constant for ``plateau`` stages
    inside the first ``stages`` stages; otherwise Inconclusive is raised.
    """

    def __init__(self, F: AtomComplex, a: MonomialIdeal, stages: int = DEFAULT_STAGES,
                 plateau: int = DEFAULT_PLATEAU):
        if not isinstance(F, AtomComplex):
            raise InvalidInput("completion needs a flat (atom) representative")
        super().__init__(F.ring, F.lo, F.hi)
        self.F, self.a = F, a
        self.stages, self.plateau = stages, plateau
        self._kept_cache = {}
        self._hmask = {}
        self._atoms = {}

    def _atom_data(self, i):
        data = self._atoms.get(i)
        if data is None:
            data = []
            for atom in self.F.atoms(i):
                gens = _projected_generators(self.a, atom.sigma)
                keep = tuple(j not in atom.sigma for j in range(self.F.ring.n))
                data.append((gens, atom.gen, keep))
            self._atoms[i] = data
        return data

    def _kept(self, i, d):
        key = (i, d)
        hit = self._kept_cache.get(key)
        if hit is not None:
            return hit
        data = self._atom_data(i)
        mask = 0
        stage = 0
        for k in self.F.present(i, d):
            gens, g, keep = data[k]
            if gens is None:
                continue
            o = _order(gens, tuple(x - y if c else 0 for x, y, c in zip(d, g, keep)))
            mask |= 1 << k
            if o >= stage:
                stage = o + 1
        hit = (mask, stage)
        self._kept_cache[key] = hit
        return hit

    def stage(self, i, d) -> int:
        """Stage from which the chain (a^t F_i)_d is constant."""
        return self._kept(i, tuple(d))[1]

    def _mask(self, i, d):
        if i < self.lo or i > self.hi:
            return 0
        mask, stage = self._kept(i, d)
        if stage + self.plateau > self.stages:
            raise Inconclusive("completion chain (a^t F)_d", index=i, degree=d, stage=stage,
                               bound=self.stages,
                               detail=f"needs at least {stage + self.plateau} stages")
        return mask

    def kept(self, i, d) -> list[int]:
        return AtomComplex._bits(self._mask(i, tuple(d)))

    def dim(self, i, d):
        return bin(self._mask(i, tuple(d))).count("1")

    def diff(self, i, d):
        d = tuple(d)
        return self.F._diff_masked(i, self._mask(i, d), self._mask(i - 1, d))

    def mult(self, i, d, v):
        d = tuple(d)
        src, tgt = self.kept(i, d), self.kept(i, add(d, v))
        pos = {k: r for r, k in enumerate(tgt)}
        data = [[0] * len(src) for _ in tgt]
        for c, k in enumerate(src):
            if k in pos:
                data[pos[k]][c] = 1
        return Matrix(len(tgt), len(src), data, self.field)

    def homology_dim(self, i, d):
        d = tuple(d)
        mi = self._mask(i, d)
        if not mi:
            return 0
        mo, mu = self._mask(i - 1, d), self._mask(i + 1, d)
        key = (i, mu, mi, mo)
        h = self._hmask.get(key)
        if h is None:
            F = self.F
            h = (bin(mi).count("1") - rank(F._diff_masked(i, mi, mo))
                 - rank(F._diff_masked(i + 1, mu, mi)))
            self._hmask[key] = h
        return h

    def projection(self) -> ChainMap:
        """θ: F -> Λ^a(F)."""
        F = self.F

        def realize(i, d):
            present = F.present(i, d)
            kept = self.kept(i, d)
            pos = {k: c for c, k in enumerate(present)}
            data = [[0] * len(present) for _ in kept]
            for r, k in enumerate(kept):
                data[r][pos[k]] = 1
            return Matrix(len(kept), len(present), data, self.field)

        return ChainMap(F, self, realize)


def llambda(a: MonomialIdeal, F, stages: int = DEFAULT_STAGES, plateau: int = DEFAULT_PLATEAU) -> Completion:
    """LΛ^a(F) for a flat representative F (modules are free-resolved)."""
    F = as_complex(F)
    return Completion(F, a, stages, plateau)


def formal_complex(a: MonomialIdeal, b: MonomialIdeal, X, stages: int = DEFAULT_STAGES,
                   plateau: int = DEFAULT_PLATEAU) -> Completion:
    """𝔉_{a,b}(X) = LΛ^a(RΓ_b(X))."""
    return Completion(rgamma(b, X), a, stages, plateau)


def _with_certificates(table: CohomologyTable, C: Completion, cohomological: bool):
    for (i, d) in table.entries:
        j = -i if cohomological else i
        table.certificates[(i, d)] = max(C.stage(k, d) for k in (j - 1, j, j + 1)
                                         if C.lo <= k <= C.hi)
    table.meta.update(stages=C.stages, plateau=C.plateau)
    return table


def formal_table(a, b, X, box: DegreeBox, stages=DEFAULT_STAGES, plateau=DEFAULT_PLATEAU,
                 indices=None) -> CohomologyTable:
    """Table of 𝔉^i_{a,b}(X) (cohomological indexing)."""
    C = formal_complex(a, b, X, stages, plateau)
    t = cohomology_table(C, box, indices, route="completion")
    return _with_certificates(t, C, True)


def local_cohomology(b: MonomialIdeal, X, box: DegreeBox, indices=None) -> CohomologyTable:
    """Table of H^i_b(X)."""
    return cohomology_table(rgamma(b, X), box, indices, route="cech")


def local_homology(a: MonomialIdeal, X, box: DegreeBox, stages=DEFAULT_STAGES,
                   plateau=DEFAULT_PLATEAU, indices=None) -> CohomologyTable:
    """Table of H_i^a(X) = H_i(LΛ^a(X)) (homological indexing)."""
    C = llambda(a, X, stages, plateau)
    t = homology_table(C, box, indices, route="completion")
    return _with_certificates(t, C, False)


# --- Matlis duality and the dualizing complex -----------------------------

class MatlisDual(DegreewiseComplex):
    """(C^∨)_i(d) = dual of C_{-i}(-d); differentials and multiplications transpose."""

    def __init__(self, C: DegreewiseComplex):
        super().__init__(C.ring, -C.hi, -C.lo)
        self.C = C

    @staticmethod
    def _neg(d):
        return tuple(-x for x in d)

    def dim(self, i, d):
        return self.C.dim(-i, self._neg(d))

    def diff(self, i, d):
        # C^∨_i -> C^∨_{i-1} is the transpose of C_{1-i} -> C_{-i}
        return self.C.diff(1 - i, self._neg(d)).transpose()

    def mult(self, i, d, v):
        return self.C.mult(-i, sub(self._neg(d), v), v).transpose()


def matlis_dual(T):
    """Graded Matlis dual of a table (index and degrees negated) or complex."""
    if isinstance(T, DegreewiseComplex):
        return MatlisDual(T)
    if isinstance(T, CohomologyTable):
        neg = lambda d: tuple(-x for x in d)
        lo, hi = T.indices
        return CohomologyTable(T.kind, T.box.reflected(), (-hi, -lo),
                               {(-i, neg(d)): v for (i, d), v in T.entries.items()},
                               T.route + ("+dual" if T.route else "dual"),
                               {(-i, neg(d)): v for (i, d), v in T.certificates.items()},
                               dict(T.meta))
    raise InvalidInput(f"cannot dualize {T!r}")


def dualizing_complex(ring: RingSpec) -> AtomComplex:
    """Σ^n S(-1,...,-1): the canonical module ω in homological degree n."""
    return AtomComplex(ring, {ring.n: [Atom(frozenset(), (1,) * ring.n)]}, {})


def dagger(X) -> AtomComplex:
    """X† = Hom(P_X, D) for a free representative P_X."""
    P = as_complex(X)
    if not (isinstance(P, AtomComplex) and P.is_free()):
        raise InvalidInput("dagger needs a module or a finite complex of free modules")
    return hom_from_free(P, dualizing_complex(P.ring))


def duality_formula(a: MonomialIdeal, X, box: DegreeBox, indices=None) -> CohomologyTable:
    """𝔉^i_a(X)_d = dim H^{-i}_a(X†)_{-d}."""
    Xd = dagger(X)
    inner = None if indices is None else (-indices[1], -indices[0])
    t = cohomology_table(rgamma(a, Xd), box.reflected(), inner, route="duality")
    out = matlis_dual(t)
    out.route = "duality"
    return out


# --- the limit formula ----------------------------------------------------

def _subsets(n):
    return [frozenset(c) for k in range(n + 1) for c in combinations(range(n), k)]


class _LimitCell:
    """Čech complexes of the modules M/a^t M at one degree d, for all t."""

    def __init__(self, M: ModulePresentation, a: MonomialIdeal, d):
        self.M, self.a, self.d = M, a, tuple(d)
        ring = M.ring
        self.field = ring.field
        n = ring.n
        self.sigmas = _subsets(n)
        self.present = {}
        self.rel_span = {}
        self.orders = {}
        for s in self.sigmas:
            tau = [j for j in range(n) if j not in s]
            pres = [k for k, g in enumerate(M.target_shifts) if all(self.d[j] >= g[j] for j in tau)]
            pos = {k: r for r, k in enumerate(pres)}
            rels = []
            for r in M.relations:
                if all(self.d[j] >= r.source[j] for j in tau):
                    v = [0] * len(pres)
                    for row, c in r.entries:
                        v[pos[row]] = c
                    rels.append(v)
            self.present[s] = pres
            self.rel_span[s] = rels
            self.orders[s] = [adic_order(a, s, sub(self.d, M.target_shifts[k])) for k in pres]
        finite = [o for os in self.orders.values() for o in os if o is not None]
        self.stage = max(finite) + 1 if finite else 1
        self._pieces = {}
        self._cx = {}

    def _killed(self, s, t):
        return tuple(r for r, o in enumerate(self.orders[s]) if o is None or o >= t)

    def piece(self, s, t) -> QuotientSpace:
        key = (s, self._killed(s, t))
        q = self._pieces.get(key)
        if q is None:
            n = len(self.present[s])
            cols = list(self.rel_span[s])
            for r in key[1]:
                e = [0] * n
                e[r] = 1
                cols.append(e)
            span = Matrix.from_columns(cols, n, self.field) if cols else None
            q = QuotientSpace(n, span, self.field)
            self._pieces[key] = q
        return q

    def _natural(self, s, s2, t, t2) -> Matrix:
        """(N_{t})_{x_s} -> (N_{t2})_{x_s2} for s ⊆ s2, t >= t2, in quotient coordinates."""
        p1, p2 = self.present[s], self.present[s2]
        q1, q2 = self.piece(s, t), self.piece(s2, t2)
        pos = {k: r for r, k in enumerate(p2)}
        incl = Matrix(len(p2), len(p1), [[1 if pos[k] == r else 0 for k in p1]
                                          for r in range(len(p2))], self.field)
        return q2.project_matrix() @ incl @ q1.lift_matrix()

    def complex(self, t):
        """(dims, diffs) of the Čech complex of M/a^tM at d; index = -|σ|."""
        key = tuple(self._killed(s, t) for s in self.sigmas)
        hit = self._cx.get(key)
        if hit is not None:
            return hit
        n = self.M.ring.n
        by_size = {k: [s for s in self.sigmas if len(s) == k] for k in range(n + 1)}
        dims = {-k: [self.piece(s, t).dim for s in by_size[k]] for k in range(n + 1)}
        diffs = {}
        for k in range(n):
            src, tgt = by_size[k], by_size[k + 1]
            rows = [[None] * len(src) for _ in tgt]
            for c, s in enumerate(src):
                for r, s2 in enumerate(tgt):
                    if s <= s2:
                        (m,) = tuple(s2 - s)
                        sign = (-1) ** sum(1 for j in s if j < m)
                        rows[r][c] = self._natural(s, s2, t, t).scaled(sign)
            from .linalg import block
            diffs[-k] = block(rows, dims[-k - 1], dims[-k], self.field)
        hit = (dims, diffs, by_size)
        self._cx[key] = hit
        return hit

    def homology(self, i, t) -> HomologyBasis:
        """H^i_m(M/a^tM)_d."""
        dims, diffs, _ = self.complex(t)
        n = sum(dims.get(-i, []))
        zero = lambda r, c: Matrix.zero(r, c, self.field)
        out_ = diffs.get(-i) if -i in diffs else zero(0, n)
        in_ = diffs.get(-i + 1) if -i + 1 in diffs else zero(n, 0)
        return HomologyBasis(out_, in_, n, self.field)

    def transition(self, i, t) -> Matrix:
        """Chain-level map of M/a^{t+1}M -> M/a^tM in cohomological degree i."""
        _, _, by_size = self.complex(t)
        sig = by_size.get(i, [])
        dims_src = [self.piece(s, t + 1).dim for s in sig]
        dims_tgt = [self.piece(s, t).dim for s in sig]
        from .linalg import block
        rows = [[self._natural(s, s, t + 1, t) if r == c else None for c, s in enumerate(sig)]
                for r in range(len(sig))]
        return block(rows, dims_tgt, dims_src, self.field)


def limit_formula(a: MonomialIdeal, M: ModulePresentation, box: DegreeBox,
                  stages: int = DEFAULT_STAGES, plateau: int = DEFAULT_PLATEAU,
                  indices=None) -> CohomologyTable:
    """lim_t H^i_m(M/a^t M), degree by degree, via stable images.

    At each degree the tower is computed for t = 1 .. stage + plateau, where
    ``stage`` is the exact point after which M/a^tM no longer changes in that
    degree.  The limit is the stable image of the tail of the tower starting
    at ``stage``.  Exceeding the stage bound raises Inconclusive.
    """
    if not isinstance(M, ModulePresentation):
        raise InvalidInput("the limit formula needs a module")
    n = M.ring.n
    lo, hi = indices if indices is not None else (0, n)
    entries, certs = {}, {}
    for d in box.degrees():
        cell = _LimitCell(M, a, d)
        s = cell.stage
        top = s + plateau
        if top > stages:
            raise Inconclusive("tower H^i_m(M/a^tM)", degree=d, stage=s, bound=stages,
                               detail=f"needs at least {top} stages")
        for i in range(max(lo, 0), min(hi, n) + 1):
            bases = {t: cell.homology(i, t) for t in range(s, top + 1)}
            if bases[s].dim == 0:
                continue
            tower = [induced_matrix(cell.transition(i, t), bases[t + 1], bases[t])
                     for t in range(s, top)]
            res = stable_image(tower, plateau, base_dim=bases[s].dim)
            if res.dim:
                entries[(i, d)] = res.dim
                certs[(i, d)] = s + res.stage
    return CohomologyTable("cohomological", box, (lo, hi), entries, "limit", certs,
                           {"stages": stages, "plateau": plateau})


# --- Tate cohomology ----------------------------------------------------------

class TateData:
    """T(X) = Cone(θ: G -> Λ^a(G)) with G = X ⊗ Č(a)."""

    def __init__(self, a: MonomialIdeal, X, stages=DEFAULT_STAGES, plateau=DEFAULT_PLATEAU):
        self.a = a
        self.G = rgamma(a, X)
        self.L = Completion(self.G, a, stages, plateau)
        self.theta = self.L.projection()
        self.T = ConeComplex(self.theta)

    def _incl(self, j, d):
        """Λ(G)_j -> T_j = G_{j-1} ⊕ Λ(G)_j."""
        ng, nl = self.G.dim(j - 1, d), self.L.dim(j, d)
        data = [[0] * nl for _ in range(ng)] + [[1 if r == c else 0 for c in range(nl)] for r in range(nl)]
        return Matrix(ng + nl, nl, data, self.G.field)

    def _proj(self, j, d):
        """T_j -> G_{j-1}."""
        ng, nl = self.G.dim(j - 1, d), self.L.dim(j, d)
        data = [[1 if r == c else 0 for c in range(ng + nl)] for r in range(ng)]
        return Matrix(ng, ng + nl, data, self.G.field)

    def les_nodes(self, i, d):
        """Exactness data for H^i_a -> H^a_{-i} -> Ĥ^i -> H^{i+1}_a -> H^a_{-i-1}.

        Returns a list of (node name, dim, rank in, rank out); the node is
        exact when dim - rank out == rank in.
        """
        d = tuple(d)
        j = -i
        hg = homology_basis(self.G, j, d)
        hl = homology_basis(self.L, j, d)
        ht = homology_basis(self.T, j, d)
        hg1 = homology_basis(self.G, j - 1, d)
        hl1 = homology_basis(self.L, j - 1, d)
        hgp = homology_basis(self.G, j + 1, d)
        htp = homology_basis(self.T, j + 1, d)
        th = induced_matrix(self.theta.at(j, d), hg, hl)
        inc = induced_matrix(self._incl(j, d), hl, ht)
        # connecting map T_j -> G_{j-1} realizes H_j(T) -> H_{j-1}(G)
        con = induced_matrix(self._proj(j, d), ht, hg1)
        th1 = induced_matrix(self.theta.at(j - 1, d), hg1, hl1)
        conp = induced_matrix(self._proj(j + 1, d), htp, hg)
        r = lambda m: rank(m) if m.rows and m.cols else 0
        return [
            ("H^i_a", hg.dim, r(conp), r(th)),
            ("H^a_-i", hl.dim, r(th), r(inc)),
            ("Tate^i", ht.dim, r(inc), r(con)),
            ("H^i+1_a", hg1.dim, r(con), r(th1)),
        ]


def tate_complex(a: MonomialIdeal, X, stages=DEFAULT_STAGES, plateau=DEFAULT_PLATEAU) -> ConeComplex:
    return TateData(a, X, stages, plateau).T


def tate_table(a, X, box: DegreeBox, stages=DEFAULT_STAGES, plateau=DEFAULT_PLATEAU,
               indices=None) -> CohomologyTable:
    """Table of Ĥ^i_a(X) := H_{-i}(T(X))."""
    return cohomology_table(tate_complex(a, X, stages, plateau), box, indices, route="tate-cone")
