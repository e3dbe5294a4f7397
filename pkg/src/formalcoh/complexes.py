"""Degreewise chain complexes over a finely graded polynomial ring.

Two families of complexes live here.

``AtomComplex`` is a bounded complex whose terms are finite direct sums of
atoms S_σ(-g): the localization of S at the variables in σ, with generator in
degree g.  Its degree-d piece has one basis vector x^d per atom with
(d - g)_j >= 0 for every j outside σ, and every structure map between atoms
is a scalar times the forced Laurent monomial.  Koszul, Čech, telescopes,
resolutions and everything built from them by tensor/Hom/cone stay in this
family, and their realization at d depends only on which atoms are present,
so realizations are memoized by presence pattern.

``DegreewiseComplex`` is the general interface (dimension, differential and
multiplication maps at a degree) used for completions, duals, and cones of
degreewise chain maps.

Indices are homological; H^i := H_{-i}.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, NamedTuple, Sequence

from .errors import DimensionMismatch, InvalidInput, NotAChainMap
from .linalg import Matrix, block, rank, sparse_rank
from .monomial import (FreeResolution, ModulePresentation, MonomialIdeal, RingSpec, add,
                       leq, sub, syzygy_resolution)


class Atom(NamedTuple):
    sigma: frozenset  # inverted variables
    gen: tuple        # degree of the generator

    def present_at(self, d) -> bool:
        return all(j in self.sigma or dj >= gj for j, (dj, gj) in enumerate(zip(d, self.gen)))

    def is_free(self):
        return not self.sigma


def _valid_entry(src: Atom, tgt: Atom) -> bool:
    if not src.sigma <= tgt.sigma:
        return False
    return all(j in tgt.sigma or a >= b for j, (a, b) in enumerate(zip(src.gen, tgt.gen)))


# --- boxes and tables ------------------------------------------------------

@dataclass(frozen=True)
class DegreeBox:
    bounds: tuple  # ((lo, hi), ...) per coordinate

    def __post_init__(self):
        b = tuple((int(lo), int(hi)) for lo, hi in self.bounds)
        if not b or any(lo > hi for lo, hi in b):
            raise InvalidInput(f"empty degree box {b}")
        object.__setattr__(self, "bounds", b)

    @classmethod
    def cube(cls, n, lo, hi):
        return cls(((lo, hi),) * n)

    @property
    def n(self):
        return len(self.bounds)

    def degrees(self):
        return [tuple(p) for p in product(*(range(lo, hi + 1) for lo, hi in self.bounds))]

    def __contains__(self, d):
        return all(lo <= x <= hi for x, (lo, hi) in zip(d, self.bounds))

    def __len__(self):
        out = 1
        for lo, hi in self.bounds:
            out *= hi - lo + 1
        return out

    def enlarged(self, k: int) -> "DegreeBox":
        return DegreeBox(tuple((lo - k, hi + k) for lo, hi in self.bounds))

    def reflected(self) -> "DegreeBox":
        return DegreeBox(tuple((-hi, -lo) for lo, hi in self.bounds))

    def radius(self) -> int:
        return max(max(abs(lo), abs(hi)) for lo, hi in self.bounds)

    def __str__(self):
        return "x".join(f"[{lo},{hi}]" for lo, hi in self.bounds)


@dataclass
class CohomologyTable:
    """Nonzero dimensions indexed by (index, degree).

    ``kind`` is "homological" (H_i) or "cohomological" (H^i = H_{-i}).
    ``certificates`` maps cells to the stage at which their stabilization
    chain became constant (for routes that use one).
    """

    kind: str
    box: DegreeBox
    indices: tuple  # (lo, hi) inclusive range examined
    entries: dict = dc_field(default_factory=dict)
    route: str = ""
    certificates: dict = dc_field(default_factory=dict)
    meta: dict = dc_field(default_factory=dict)

    def dim(self, i, d) -> int:
        return self.entries.get((i, tuple(d)), 0)

    def nonzero_indices(self, box: DegreeBox | None = None) -> list[int]:
        return sorted({i for (i, d) in self.entries if box is None or d in box})

    def restricted(self, box: DegreeBox) -> "CohomologyTable":
        return CohomologyTable(self.kind, box, self.indices,
                               {k: v for k, v in self.entries.items() if k[1] in box},
                               self.route, {k: v for k, v in self.certificates.items() if k[1] in box},
                               dict(self.meta))

    def row(self, i) -> dict:
        return {d: v for (j, d), v in self.entries.items() if j == i}

    def is_empty(self) -> bool:
        return not self.entries

    def same_cells(self, other: "CohomologyTable") -> bool:
        return self.entries == other.entries

    def differences(self, other: "CohomologyTable", limit=5):
        keys = sorted(set(self.entries) | set(other.entries))
        out = [(k, self.entries.get(k, 0), other.entries.get(k, 0)) for k in keys
               if self.entries.get(k, 0) != other.entries.get(k, 0)]
        return out[:limit]

    def sorted_cells(self):
        return sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1]))


# --- the general interface ----------------------------------------------

class DegreewiseComplex:
    """Bounded complex realizable degree by degree as finite matrices."""

    def __init__(self, ring: RingSpec, lo: int, hi: int):
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self._hcache = {}

    @property
    def field(self):
        return self.ring.field

    def indices(self):
        return range(self.lo, self.hi + 1)

    def dim(self, i, d) -> int:
        raise NotImplementedError

    def diff(self, i, d) -> Matrix:
        """C_i(d) -> C_{i-1}(d)."""
        raise NotImplementedError

    def mult(self, i, d, v) -> Matrix:
        """Multiplication by x^v: C_i(d) -> C_i(d + v), v >= 0."""
        raise NotImplementedError

    def _zero(self, rows, cols):
        return Matrix.zero(rows, cols, self.field)

    def homology_dim(self, i, d) -> int:
        d = tuple(d)
        key = (i, d)
        hit = self._hcache.get(key)
        if hit is not None:
            return hit
        n = self.dim(i, d)
        out = 0
        if n:
            out = n - rank(self.diff(i, d)) - rank(self.diff(i + 1, d))
        self._hcache[key] = out
        return out

    def is_flat(self) -> bool:
        return False

    def euler_terms(self, d):
        return sum((-1) ** i * self.dim(i, d) for i in self.indices())


def _check_square_zero(C: DegreewiseComplex, d):
    for i in range(C.lo + 1, C.hi + 1):
        a, b = C.diff(i - 1, d), C.diff(i, d)
        if a.cols and b.rows and not (a @ b).is_zero():
            return i
    return None


# --- atom complexes ------------------------------------------------------

class AtomComplex(DegreewiseComplex):
    """Complex of finite sums of atoms with scalar structure constants.

    ``diffs[i]`` maps C_i -> C_{i-1}; keys are (row, col) atom positions.
    """

    def __init__(self, ring: RingSpec, terms: dict, diffs: dict | None = None, check: bool = True):
        terms = {i: list(t) for i, t in terms.items() if t}
        self.terms = terms
        if terms:
            lo, hi = min(terms), max(terms)
        else:
            lo, hi = 0, 0
        super().__init__(ring, lo, hi)
        self.diffs = {}
        field = ring.field
        for i, ent in (diffs or {}).items():
            ent = {k: field.coerce(v) for k, v in ent.items() if v}
            ent = {k: v for k, v in ent.items() if v}
            if ent:
                self.diffs[i] = ent
        if check:
            self._validate()
        self._axes = {}
        self._mask_cache = {}
        self._diff_cache = {}
        self._rank_cache = {}
        self._hpattern = {}

    def _validate(self):
        n = self.ring.n
        for i, atoms in self.terms.items():
            for a in atoms:
                if len(a.gen) != n:
                    raise InvalidInput(f"atom {a} has wrong degree length")
        for i, ent in self.diffs.items():
            src, tgt = self.terms.get(i, []), self.terms.get(i - 1, [])
            for (r, c) in ent:
                if r >= len(tgt) or c >= len(src):
                    raise InvalidInput(f"differential entry {(r, c)} out of range at index {i}")
                if not _valid_entry(src[c], tgt[r]):
                    raise InvalidInput(f"entry {src[c]} -> {tgt[r]} at index {i} is not a "
                                       "degree-compatible monomial map")
        for i in self.diffs:
            if i - 1 in self.diffs:
                if _compose(self.diffs[i - 1], self.diffs[i], self.ring.field.characteristic):
                    raise InvalidInput(f"d∘d != 0 at index {i}")

    def is_flat(self):
        return True

    def is_free(self):
        return all(a.is_free() for t in self.terms.values() for a in t)

    def is_zero_complex(self):
        return not self.terms

    def atoms(self, i):
        return self.terms.get(i, [])

    # presence masks: bit k set iff atom k of C_i is nonzero in degree d
    def _axis(self, i, j):
        key = (i, j)
        ax = self._axes.get(key)
        if ax is None:
            always = 0
            pairs = []
            for k, a in enumerate(self.atoms(i)):
                if j in a.sigma:
                    always |= 1 << k
                else:
                    pairs.append((a.gen[j], 1 << k))
            pairs.sort()
            thresholds = [p[0] for p in pairs]
            prefix = []
            acc = always
            for _, bit in pairs:
                acc |= bit
                prefix.append(acc)
            ax = (always, thresholds, prefix)
            self._axes[key] = ax
        return ax

    def mask(self, i, d) -> int:
        if i not in self.terms:
            return 0
        key = (i, d)
        m = self._mask_cache.get(key)
        if m is not None:
            return m
        m = -1
        for j, v in enumerate(d):
            always, thr, prefix = self._axis(i, j)
            pos = bisect_right(thr, v)
            m &= prefix[pos - 1] if pos else always
            if not m:
                break
        m = max(m, 0)
        if len(self._mask_cache) < 500000:
            self._mask_cache[key] = m
        return m

    @staticmethod
    def _bits(mask):
        out = []
        k = 0
        while mask:
            if mask & 1:
                out.append(k)
            mask >>= 1
            k += 1
        return out

    def present(self, i, d) -> list[int]:
        return self._bits(self.mask(i, tuple(d)))

    def dim(self, i, d) -> int:
        return bin(self.mask(i, tuple(d))).count("1")

    def _diff_masked(self, i, mi, mo) -> Matrix:
        key = (i, mi, mo)
        m = self._diff_cache.get(key)
        if m is None:
            cols = self._bits(mi)
            rows = self._bits(mo)
            f = self.field
            ent = self.diffs.get(i, {})
            rpos = {r: k for k, r in enumerate(rows)}
            data = [[f.coerce(0)] * len(cols) for _ in rows]
            for c_k, c in enumerate(cols):
                for r_k, r in enumerate(rows):
                    v = ent.get((r, c))
                    if v:
                        data[r_k][c_k] = f.coerce(v)
            m = Matrix._raw(len(rows), len(cols), data, f)
            self._diff_cache[key] = m
        return m

    def _rank_masked(self, i, mi, mo) -> int:
        if not mi or not mo:
            return 0
        key = (i, mi, mo)
        r = self._rank_cache.get(key)
        if r is None:
            rows = {}
            for (row, col), v in self.diffs.get(i, {}).items():
                if (mi >> col) & 1 and (mo >> row) & 1:
                    rows.setdefault(row, {})[col] = v
            r = sparse_rank(list(rows.values()), self.field)
            self._rank_cache[key] = r
        return r

    def diff(self, i, d) -> Matrix:
        d = tuple(d)
        return self._diff_masked(i, self.mask(i, d), self.mask(i - 1, d))

    def mult(self, i, d, v) -> Matrix:
        d = tuple(d)
        src = self.present(i, d)
        tgt = self.present(i, add(d, v))
        pos = {a: k for k, a in enumerate(tgt)}
        data = [[0] * len(src) for _ in tgt]
        for c, a in enumerate(src):
            data[pos[a]][c] = 1
        return Matrix(len(tgt), len(src), data, self.field)

    def homology_dim(self, i, d) -> int:
        d = tuple(d)
        mi = self.mask(i, d)
        if not mi:
            return 0
        mo = self.mask(i - 1, d)
        mu = self.mask(i + 1, d)
        key = (i, mu, mi, mo)
        h = self._hpattern.get(key)
        if h is None:
            n = bin(mi).count("1")
            h = n - self._rank_masked(i, mi, mo) - self._rank_masked(i + 1, mu, mi)
            self._hpattern[key] = h
        return h

    def critical_degrees(self, inverted: frozenset = frozenset()):
        """Representatives of every presence pattern of the complex localized
        at ``inverted``: homology there is decided by finitely many degrees."""
        n = self.ring.n
        axes = []
        for j in range(n):
            vals = sorted({a.gen[j] for t in self.terms.values() for a in t if j not in a.sigma})
            if j in inverted or not vals:
                axes.append([vals[-1] if vals else 0])
            else:
                axes.append([vals[0] - 1] + vals)
        return [tuple(p) for p in product(*axes)]

    def localized(self, inverted: frozenset) -> "AtomComplex":
        inv = frozenset(inverted)
        terms = {i: [Atom(a.sigma | inv, a.gen) for a in t] for i, t in self.terms.items()}
        return AtomComplex(self.ring, terms, self.diffs, check=False)

    def max_shift(self) -> int:
        return max((abs(c) for t in self.terms.values() for a in t for c in a.gen), default=0)


def _compose(after: dict, before: dict, q: int = 0) -> dict:
    """Sparse product after∘before, reduced mod q when q > 0."""
    by_row = {}
    for (r, c), v in before.items():
        by_row.setdefault(r, []).append((c, v))
    out = {}
    for (r2, m), w in after.items():
        for c, v in by_row.get(m, []):
            out[(r2, c)] = out.get((r2, c), 0) + w * v
    if q:
        out = {k: v % q for k, v in out.items()}
    return {k: v for k, v in out.items() if v}


def zero_complex(ring) -> AtomComplex:
    return AtomComplex(ring, {}, {})


def unit_complex(ring, shift=None) -> AtomComplex:
    """S (or S(-shift)) in homological degree 0."""
    g = tuple(shift) if shift is not None else ring.zero_degree()
    return AtomComplex(ring, {0: [Atom(frozenset(), g)]}, {})


def as_complex(X, ring: RingSpec | None = None) -> DegreewiseComplex:
    """Modules are replaced by their free resolutions."""
    if isinstance(X, DegreewiseComplex):
        return X
    if isinstance(X, ModulePresentation):
        return syzygy_resolution(X).complex()
    if isinstance(X, FreeResolution):
        return X.complex()
    raise InvalidInput(f"cannot interpret {X!r} as a complex")


# --- chain maps ----------------------------------------------------------

class ChainMap:
    """Degree-preserving map of complexes realized degreewise."""

    def __init__(self, src: DegreewiseComplex, tgt: DegreewiseComplex, realize: Callable):
        self.src = src
        self.tgt = tgt
        self._realize = realize

    def at(self, i, d) -> Matrix:
        return self._realize(i, tuple(d))

    def check_at(self, i, d):
        """Raise NotAChainMap unless d_tgt f_i = f_{i-1} d_src at (i, d)."""
        lhs = self.tgt.diff(i, d) @ self.at(i, d)
        rhs = self.at(i - 1, d) @ self.src.diff(i, d)
        if lhs != rhs:
            raise NotAChainMap(i, d)


class AtomMap(ChainMap):
    """Map of atom complexes with scalar entries ``blocks[i][(row, col)]``."""

    def __init__(self, src: AtomComplex, tgt: AtomComplex, blocks: dict, check: bool = True):
        f = src.ring.field
        self.blocks = {i: {k: f.coerce(v) for k, v in b.items() if v} for i, b in blocks.items()}
        self.blocks = {i: {k: v for k, v in b.items() if v} for i, b in self.blocks.items()}
        super().__init__(src, tgt, self._atom_realize)
        if check:
            for i, b in self.blocks.items():
                for (r, c) in b:
                    s, t = src.atoms(i), tgt.atoms(i)
                    if r >= len(t) or c >= len(s) or not _valid_entry(s[c], t[r]):
                        raise InvalidInput(f"map entry {(r, c)} at index {i} is not degree-compatible")
            lo = min(src.lo, tgt.lo)
            hi = max(src.hi, tgt.hi)
            for i in range(lo, hi + 2):
                q = f.characteristic
                lhs = _compose(tgt.diffs.get(i, {}), self.blocks.get(i, {}), q)
                rhs = _compose(self.blocks.get(i - 1, {}), src.diffs.get(i, {}), q)
                keys = set(lhs) | set(rhs)
                diff = {k: lhs.get(k, 0) - rhs.get(k, 0) for k in keys}
                bad = [k for k, v in diff.items() if (v % q if q else v)]
                if bad:
                    r, c = bad[0]
                    raise NotAChainMap(i, src.atoms(i)[c].gen)

    def _atom_realize(self, i, d):
        src = self.src.present(i, d)
        tgt = self.tgt.present(i, d)
        b = self.blocks.get(i, {})
        f = self.src.field
        data = [[f.coerce(b.get((r, c), 0)) for c in src] for r in tgt]
        return Matrix._raw(len(tgt), len(src), data, f)


def identity_map(C: AtomComplex) -> AtomMap:
    return AtomMap(C, C, {i: {(k, k): 1 for k in range(len(t))} for i, t in C.terms.items()}, check=False)


def multiplication_map(C: AtomComplex, monomial) -> AtomMap:
    """x^v : C(-v) -> C."""
    v = tuple(monomial)
    src = shift_grading(C, v)
    return AtomMap(src, C, {i: {(k, k): 1 for k in range(len(t))} for i, t in C.terms.items()})


def shift_grading(C: AtomComplex, v) -> AtomComplex:
    """Internal shift C(-v): generators move up by v."""
    terms = {i: [Atom(a.sigma, add(a.gen, v)) for a in t] for i, t in C.terms.items()}
    return AtomComplex(C.ring, terms, C.diffs, check=False)


# --- constructions on atom complexes ------------------------------------

def koszul(monomials: Sequence[Sequence[int]], ring: RingSpec) -> AtomComplex:
    """Koszul complex on the given monomials, homological degrees 0..r."""
    gens = [tuple(m) for m in monomials]
    if not gens:
        raise InvalidInput("koszul needs at least one element")
    r = len(gens)
    subsets = [list(combinations(range(r), k)) for k in range(r + 1)]

    def deg(J):
        out = ring.zero_degree()
        for j in J:
            out = add(out, gens[j])
        return out

    terms = {k: [Atom(frozenset(), deg(J)) for J in subsets[k]] for k in range(r + 1)}
    diffs = {}
    for k in range(1, r + 1):
        index = {J: i for i, J in enumerate(subsets[k - 1])}
        ent = {}
        for c, J in enumerate(subsets[k]):
            for pos in range(k):
                ent[(index[J[:pos] + J[pos + 1:]], c)] = (-1) ** pos
        diffs[k] = ent
    return AtomComplex(ring, terms, diffs)


def cech(a: MonomialIdeal, ring: RingSpec) -> AtomComplex:
    """Čech complex S -> ⊕ S_{a_i} -> ... placed in homological degrees 0..-r."""
    if a.is_zero():
        raise InvalidInput("the Čech complex needs a nonzero ideal")
    gens = a.generators
    r = len(gens)
    supp = [a.support(g) for g in gens]
    subsets = [list(combinations(range(r), k)) for k in range(r + 1)]
    zero = ring.zero_degree()

    def sigma(J):
        out = frozenset()
        for j in J:
            out |= supp[j]
        return out

    terms = {-k: [Atom(sigma(J), zero) for J in subsets[k]] for k in range(r + 1)}
    diffs = {}
    for k in range(r):
        index = {J: i for i, J in enumerate(subsets[k + 1])}
        ent = {}
        for c, J in enumerate(subsets[k]):
            for m in range(r):
                if m in J:
                    continue
                pos = sum(1 for j in J if j < m)
                K = tuple(sorted(J + (m,)))
                ent[(index[K], c)] = (-1) ** pos
        diffs[-k] = ent
    return AtomComplex(ring, terms, diffs)


def shift(C, k: int):
    """Suspension Σ^k: (Σ^k C)_i = C_{i-k}, differential (-1)^k d."""
    if isinstance(C, AtomComplex):
        s = (-1) ** k
        terms = {i + k: t for i, t in C.terms.items()}
        diffs = {i + k: {key: s * v for key, v in e.items()} for i, e in C.diffs.items()}
        return AtomComplex(C.ring, terms, diffs, check=False)
    return ShiftedComplex(C, k)


def direct_sum(*cs: AtomComplex) -> AtomComplex:
    ring = cs[0].ring
    terms, diffs = {}, {}
    offsets = []
    for C in cs:
        off = {i: len(terms.get(i, [])) for i in C.terms}
        offsets.append(off)
        for i, t in C.terms.items():
            terms.setdefault(i, []).extend(t)
    for C, off in zip(cs, offsets):
        for i, e in C.diffs.items():
            tgt = diffs.setdefault(i, {})
            for (r, c), v in e.items():
                tgt[(r + off.get(i - 1, 0), c + off[i])] = v
    return AtomComplex(ring, terms, diffs, check=False)


def _tensor_layout(C: AtomComplex, D: AtomComplex):
    layout = {}
    for p, ta in C.terms.items():
        for q, tb in D.terms.items():
            for ia, a in enumerate(ta):
                for ib, b in enumerate(tb):
                    layout.setdefault(p + q, []).append((p, ia, q, ib))
    return layout


def tensor(C, D):
    """Total tensor complex, Koszul sign (-1)^|c| on the second differential.

    Both atom complexes: computed structurally (S_σ ⊗ S_τ = S_{σ∪τ}).  One
    atom complex of free modules with a general degreewise complex: computed
    degreewise.  Anything else is rejected.
    """
    if isinstance(C, ModulePresentation) or isinstance(D, ModulePresentation):
        C, D = as_complex(C), as_complex(D)
    if isinstance(C, AtomComplex) and isinstance(D, AtomComplex):
        return _tensor_atoms(C, D)
    if isinstance(C, AtomComplex) and C.is_free():
        return TensorFreeComplex(C, D)
    if isinstance(D, AtomComplex) and D.is_free():
        return TensorFreeComplex(D, C)
    raise InvalidInput("tensor needs a flat (atom) argument; neither argument is flat")


def _tensor_atoms(C: AtomComplex, D: AtomComplex) -> AtomComplex:
    layout = _tensor_layout(C, D)
    terms = {}
    index = {}
    for k, lst in layout.items():
        terms[k] = []
        for pos, (p, ia, q, ib) in enumerate(lst):
            a, b = C.terms[p][ia], D.terms[q][ib]
            terms[k].append(Atom(a.sigma | b.sigma, add(a.gen, b.gen)))
            index[(p, ia, q, ib)] = pos
    diffs = {}
    for k, lst in layout.items():
        ent = {}
        for col, (p, ia, q, ib) in enumerate(lst):
            for (r, c), v in C.diffs.get(p, {}).items():
                if c == ia:
                    ent[(index[(p - 1, r, q, ib)], col)] = v
            sign = (-1) ** p
            for (r, c), v in D.diffs.get(q, {}).items():
                if c == ib:
                    key = (index[(p, ia, q - 1, r)], col)
                    ent[key] = ent.get(key, 0) + sign * v
        diffs[k] = ent
    return AtomComplex(C.ring, terms, diffs, check=False)


def tensor_maps(f: AtomMap, g: AtomMap) -> AtomMap:
    """f ⊗ g between the structural tensor complexes."""
    src = _tensor_atoms(f.src, g.src)
    tgt = _tensor_atoms(f.tgt, g.tgt)
    ls, lt = _tensor_layout(f.src, g.src), _tensor_layout(f.tgt, g.tgt)
    blocks = {}
    for k, lst in ls.items():
        tindex = {key: pos for pos, key in enumerate(lt.get(k, []))}
        ent = {}
        for col, (p, ia, q, ib) in enumerate(lst):
            for (r1, c1), v1 in f.blocks.get(p, {}).items():
                if c1 != ia:
                    continue
                for (r2, c2), v2 in g.blocks.get(q, {}).items():
                    if c2 == ib:
                        ent[(tindex[(p, r1, q, r2)], col)] = v1 * v2
        blocks[k] = ent
    return AtomMap(src, tgt, blocks, check=False)


def hom_from_free(F, C):
    """Hom complex Hom(F, C) for a finite free F.

    Grading: Hom(S(-g), N) = N(g), i.e. Hom(S(-g), N)_d = N_{d+g}.
    Differential: ∂f = ∂_C f - (-1)^|f| f ∂_F.
    """
    if isinstance(F, (ModulePresentation, FreeResolution)):
        F = as_complex(F)
    if isinstance(C, ModulePresentation):
        C = as_complex(C)
    if not isinstance(F, AtomComplex) or not F.is_free():
        raise InvalidInput("hom_from_free needs a finite complex of free modules as first argument")
    if isinstance(C, AtomComplex):
        return _hom_atoms(F, C)
    return HomFreeComplex(F, C)


def _hom_layout(F: AtomComplex, C: AtomComplex):
    layout = {}
    for p, tf in F.terms.items():
        for q, tc in C.terms.items():
            for ia in range(len(tf)):
                for ib in range(len(tc)):
                    layout.setdefault(q - p, []).append((p, ia, q, ib))
    return layout


def _hom_atoms(F: AtomComplex, C: AtomComplex) -> AtomComplex:
    layout = _hom_layout(F, C)
    terms, index = {}, {}
    for k, lst in layout.items():
        terms[k] = []
        for pos, (p, ia, q, ib) in enumerate(lst):
            a, b = F.terms[p][ia], C.terms[q][ib]
            terms[k].append(Atom(b.sigma, sub(b.gen, a.gen)))
            index[(p, ia, q, ib)] = pos
    diffs = {}
    for k, lst in layout.items():
        ent = {}
        sign = -((-1) ** k)
        for col, (p, ia, q, ib) in enumerate(lst):
            for (r, c), v in C.diffs.get(q, {}).items():
                if c == ib:
                    key = (index[(p, ia, q - 1, r)], col)
                    ent[key] = ent.get(key, 0) + v
            for (r, c), v in F.diffs.get(p + 1, {}).items():
                if r == ia:
                    key = (index[(p + 1, c, q, ib)], col)
                    ent[key] = ent.get(key, 0) + sign * v
        diffs[k] = {key: v for key, v in ent.items() if v}
    return AtomComplex(F.ring, terms, diffs, check=False)


def cone(f: ChainMap):
    """Mapping cone: Cone_i = A_{i-1} ⊕ B_i, d(a, b) = (-∂a, f(a) + ∂b)."""
    if isinstance(f, AtomMap):
        return _cone_atoms(f)
    return ConeComplex(f)


def _cone_atoms(f: AtomMap) -> AtomComplex:
    A, B = f.src, f.tgt
    idx = set(i + 1 for i in A.terms) | set(B.terms)
    terms = {}
    for i in idx:
        terms[i] = list(A.atoms(i - 1)) + list(B.atoms(i))
    diffs = {}
    for i in idx:
        na_src = len(A.atoms(i - 1))
        na_tgt = len(A.atoms(i - 2))
        ent = {}
        for (r, c), v in A.diffs.get(i - 1, {}).items():
            ent[(r, c)] = -v
        for (r, c), v in f.blocks.get(i - 1, {}).items():
            ent[(na_tgt + r, c)] = v
        for (r, c), v in B.diffs.get(i, {}).items():
            ent[(na_tgt + r, na_src + c)] = v
        diffs[i] = ent
    return AtomComplex(A.ring, terms, diffs, check=False)


def telescope(stages: Sequence[AtomComplex], maps: Sequence[AtomMap]) -> AtomComplex:
    """Truncated telescope of K^1 -> K^2 -> ... -> K^T.

    Cone of φ: ⊕_{t<T} K^t -> ⊕_{t<=T} K^t, φ(x) = x - ψ(x); quasi-isomorphic
    to K^T.  The truncation length T = len(stages) is always explicit.
    """
    T = len(stages)
    if T < 1:
        raise InvalidInput("telescope needs at least one stage")
    if len(maps) != T - 1:
        raise InvalidInput("telescope needs one map between consecutive stages")
    for t, m in enumerate(maps):
        if m.src is not stages[t] or m.tgt is not stages[t + 1]:
            raise InvalidInput(f"map {t} does not connect stages {t} and {t + 1}")
        AtomMap(m.src, m.tgt, m.blocks)  # re-validates the chain map property
    ring = stages[0].ring
    if T == 1:
        return stages[0]
    src = direct_sum(*stages[:-1])
    tgt = direct_sum(*stages)
    # offsets of each stage inside the sums, per index
    def offsets(cs):
        offs, run = [], {}
        for C in cs:
            offs.append({i: run.get(i, 0) for i in C.terms})
            for i, t in C.terms.items():
                run[i] = run.get(i, 0) + len(t)
        return offs

    so, to = offsets(stages[:-1]), offsets(stages)
    blocks = {}
    for t in range(T - 1):
        C = stages[t]
        for i, atoms in C.terms.items():
            b = blocks.setdefault(i, {})
            for k in range(len(atoms)):
                b[(to[t][i] + k, so[t][i] + k)] = 1
            for (r, c), v in maps[t].blocks.get(i, {}).items():
                b[(to[t + 1][i] + r, so[t][i] + c)] = b.get((to[t + 1][i] + r, so[t][i] + c), 0) - v
    phi = AtomMap(src, tgt, blocks, check=False)
    return _cone_atoms(phi)


def koszul_cochain_tower(g, ring: RingSpec, T: int):
    """Stages [S -> S(t g)] (degrees 0, -1, differential g^t) with maps
    identity in degree 0 and multiplication by g in degree -1."""
    g = tuple(g)
    stages = []
    for t in range(1, T + 1):
        neg = tuple(-t * c for c in g)
        stages.append(AtomComplex(ring, {0: [Atom(frozenset(), ring.zero_degree())],
                                         -1: [Atom(frozenset(), neg)]}, {0: {(0, 0): 1}}))
    maps = [AtomMap(stages[t], stages[t + 1], {0: {(0, 0): 1}, -1: {(0, 0): 1}}) for t in range(T - 1)]
    return stages, maps


def _augmentation(Tel: AtomComplex, stages, ring) -> AtomMap:
    """Tel -> S summing the degree-0 copies of S coming from the target sum."""
    S = unit_complex(ring)
    n_src0 = sum(len(s.atoms(-1)) for s in stages[:-1]) if len(stages) > 1 else 0
    b = {}
    if len(stages) == 1:
        b = {(0, k): 1 for k in range(len(Tel.atoms(0)))}
    else:
        for k in range(n_src0, len(Tel.atoms(0))):
            b[(0, k)] = 1
    return AtomMap(Tel, S, {0: b})


def stable_koszul_trunc(a: MonomialIdeal, ring: RingSpec, T: int) -> AtomComplex:
    return _stable_koszul(a, ring, T)[0]


def _stable_koszul(a, ring, T):
    if T < 1:
        raise InvalidInput("telescope truncation T must be >= 1")
    if a.is_zero():
        raise InvalidInput("stabilized Koszul complex needs a nonzero ideal")
    result, aug = None, None
    for g in a.generators:
        stages, maps = koszul_cochain_tower(g, ring, T)
        tel = telescope(stages, maps)
        eps = _augmentation(tel, stages, ring)
        if result is None:
            result, aug = tel, eps
        else:
            aug = tensor_maps(aug, eps)
            result = aug.src
    return result, aug


def stable_cech_trunc(a: MonomialIdeal, ring: RingSpec, T: int) -> AtomComplex:
    """Cone of the augmentation K(a^∞)_T -> S."""
    K, aug = _stable_koszul(a, ring, T)
    S = unit_complex(ring)
    aug = AtomMap(K, S, aug.blocks)
    return _cone_atoms(aug)


# --- general degreewise complexes ---------------------------------------

class ShiftedComplex(DegreewiseComplex):
    def __init__(self, C: DegreewiseComplex, k: int):
        super().__init__(C.ring, C.lo + k, C.hi + k)
        self.C, self.k = C, k

    def dim(self, i, d):
        return self.C.dim(i - self.k, d)

    def diff(self, i, d):
        m = self.C.diff(i - self.k, d)
        return -m if self.k % 2 else m

    def mult(self, i, d, v):
        return self.C.mult(i - self.k, d, v)


class ConeComplex(DegreewiseComplex):
    """Cone of a degreewise chain map; commutation is checked at every
    degree where the cone is realized."""

    def __init__(self, f: ChainMap):
        A, B = f.src, f.tgt
        super().__init__(A.ring, min(A.lo + 1, B.lo), max(A.hi + 1, B.hi))
        self.f = f
        self._checked = set()

    def _check(self, i, d):
        key = (i, d)
        if key not in self._checked:
            self.f.check_at(i, d)
            self._checked.add(key)

    def dim(self, i, d):
        return self.f.src.dim(i - 1, d) + self.f.tgt.dim(i, d)

    def diff(self, i, d):
        d = tuple(d)
        A, B = self.f.src, self.f.tgt
        self._check(i - 1, d)
        self._check(i, d)
        ra, ca = A.dim(i - 2, d), A.dim(i - 1, d)
        rb, cb = B.dim(i - 1, d), B.dim(i, d)
        return block([[-A.diff(i - 1, d), None], [self.f.at(i - 1, d), B.diff(i, d)]],
                     [ra, rb], [ca, cb], self.field)

    def mult(self, i, d, v):
        A, B = self.f.src, self.f.tgt
        d2 = add(d, v)
        return block([[A.mult(i - 1, d, v), None], [None, B.mult(i, d, v)]],
                     [A.dim(i - 1, d2), B.dim(i, d2)], [A.dim(i - 1, d), B.dim(i, d)], self.field)


class TensorFreeComplex(DegreewiseComplex):
    """F ⊗ N for F an atom complex of free modules: (S(-g) ⊗ N)_d = N_{d-g}."""

    def __init__(self, F: AtomComplex, N: DegreewiseComplex):
        super().__init__(F.ring, F.lo + N.lo, F.hi + N.hi)
        self.F, self.N = F, N

    def _layout(self, k, d):
        out = []
        for p, atoms in self.F.terms.items():
            q = k - p
            if q < self.N.lo or q > self.N.hi:
                continue
            for ia, a in enumerate(atoms):
                e = sub(d, a.gen)
                out.append((p, ia, q, e, self.N.dim(q, e)))
        return out

    def dim(self, k, d):
        return sum(x[-1] for x in self._layout(k, tuple(d)))

    def diff(self, k, d):
        d = tuple(d)
        src, tgt = self._layout(k, d), self._layout(k - 1, d)
        tpos = {}
        off = 0
        for (p, ia, q, e, n) in tgt:
            tpos[(p, ia, q)] = off
            off += n
        rows = off
        blocks = []
        f = self.field
        data = [[f.coerce(0)] * sum(x[-1] for x in src) for _ in range(rows)]
        col = 0
        for (p, ia, q, e, n) in src:
            if n == 0:
                continue
            for (r, c), v in self.F.diffs.get(p, {}).items():
                if c != ia:
                    continue
                tgt_atom = self.F.terms[p - 1][r]
                off = tpos.get((p - 1, r, q))
                if off is None:
                    continue
                m = self.N.mult(q, e, sub(self.F.terms[p][ia].gen, tgt_atom.gen))
                _add_block(data, off, col, m, f.coerce(v))
            if q - 1 >= self.N.lo:
                off = tpos.get((p, ia, q - 1))
                if off is not None:
                    m = self.N.diff(q, e)
                    _add_block(data, off, col, m, f.coerce((-1) ** p))
            col += n
        return Matrix._raw(rows, col, data, f)

    def mult(self, k, d, v):
        d = tuple(d)
        d2 = add(d, v)
        src, tgt = self._layout(k, d), self._layout(k, d2)
        tpos, off = {}, 0
        for (p, ia, q, e, n) in tgt:
            tpos[(p, ia, q)] = off
            off += n
        f = self.field
        data = [[f.coerce(0)] * sum(x[-1] for x in src) for _ in range(off)]
        col = 0
        for (p, ia, q, e, n) in src:
            if n:
                _add_block(data, tpos[(p, ia, q)], col, self.N.mult(q, e, v), f.coerce(1))
            col += n
        return Matrix._raw(off, col, data, f)


class HomFreeComplex(DegreewiseComplex):
    """Hom(F, N) for F an atom complex of free modules: Hom(S(-g), N)_d = N_{d+g}."""

    def __init__(self, F: AtomComplex, N: DegreewiseComplex):
        super().__init__(F.ring, N.lo - F.hi, N.hi - F.lo)
        self.F, self.N = F, N

    def _layout(self, k, d):
        out = []
        for p, atoms in self.F.terms.items():
            q = p + k
            if q < self.N.lo or q > self.N.hi:
                continue
            for ia, a in enumerate(atoms):
                e = add(d, a.gen)
                out.append((p, ia, q, e, self.N.dim(q, e)))
        return out

    def dim(self, k, d):
        return sum(x[-1] for x in self._layout(k, tuple(d)))

    def diff(self, k, d):
        d = tuple(d)
        src, tgt = self._layout(k, d), self._layout(k - 1, d)
        tpos, off = {}, 0
        for (p, ia, q, e, n) in tgt:
            tpos[(p, ia, q)] = off
            off += n
        rows = off
        f = self.field
        data = [[f.coerce(0)] * sum(x[-1] for x in src) for _ in range(rows)]
        sign = -((-1) ** k)
        col = 0
        for (p, ia, q, e, n) in src:
            if n == 0:
                continue
            off = tpos.get((p, ia, q - 1))
            if off is not None:
                _add_block(data, off, col, self.N.diff(q, e), f.coerce(1))
            for (r, c), v in self.F.diffs.get(p + 1, {}).items():
                if r != ia:
                    continue
                off = tpos.get((p + 1, c, q))
                if off is None:
                    continue
                shift_v = sub(self.F.terms[p + 1][c].gen, self.F.terms[p][ia].gen)
                _add_block(data, off, col, self.N.mult(q, e, shift_v), f.coerce(sign * v))
            col += n
        return Matrix._raw(rows, col, data, f)

    def mult(self, k, d, v):
        d = tuple(d)
        d2 = add(d, v)
        src, tgt = self._layout(k, d), self._layout(k, d2)
        tpos, off = {}, 0
        for (p, ia, q, e, n) in tgt:
            tpos[(p, ia, q)] = off
            off += n
        f = self.field
        data = [[f.coerce(0)] * sum(x[-1] for x in src) for _ in range(off)]
        col = 0
        for (p, ia, q, e, n) in src:
            if n:
                _add_block(data, tpos[(p, ia, q)], col, self.N.mult(q, e, v), f.coerce(1))
            col += n
        return Matrix._raw(off, col, data, f)


def _add_block(data, r0, c0, m: Matrix, scale):
    if not scale:
        return
    p = m.field.characteristic
    for i, row in enumerate(m.data):
        tgt = data[r0 + i]
        for j, x in enumerate(row):
            if x:
                v = tgt[c0 + j] + scale * x
                tgt[c0 + j] = v % p if p else v


# --- homology -----------------------------------------------------------

def homology_table(C: DegreewiseComplex, box: DegreeBox, indices=None, route: str = "homology") -> CohomologyTable:
    lo, hi = indices if indices is not None else (C.lo, C.hi)
    entries = {}
    for d in box.degrees():
        for i in range(max(lo, C.lo), min(hi, C.hi) + 1):
            h = C.homology_dim(i, d)
            if h:
                entries[(i, d)] = h
    return CohomologyTable("homological", box, (lo, hi), entries, route)


def cohomology_table(C: DegreewiseComplex, box: DegreeBox, indices=None, route: str = "") -> CohomologyTable:
    """Table of H^i := H_{-i}."""
    if indices is None:
        lo, hi = -C.hi, -C.lo
    else:
        lo, hi = indices
    h = homology_table(C, box, (-hi, -lo), route)
    entries = {(-i, d): v for (i, d), v in h.entries.items()}
    certs = {(-i, d): v for (i, d), v in h.certificates.items()}
    return CohomologyTable("cohomological", box, (lo, hi), entries, route, certs)


def square_zero_failure(C: DegreewiseComplex, box: DegreeBox):
    """First (index, degree) with ∂∂ != 0 in the box, or None."""
    for d in box.degrees():
        i = _check_square_zero(C, d)
        if i is not None:
            return i, d
    return None


# --- homology with explicit bases ---------------------------------------

class HomologyBasis:
    """H = ker(d_out) / im(d_in) at one node, with chosen representatives.

    ``reps`` holds cycles whose classes form a basis; ``coords`` expresses
    any cycle in that basis.
    """

    def __init__(self, d_out: Matrix, d_in: Matrix, n: int, field):
        from .linalg import QuotientSpace, kernel_basis, rref, select, solve
        self.n = n
        self.field = field
        Z = kernel_basis(d_out) if d_out.rows else Matrix.identity(n, field)
        B = d_in if d_in.cols else None
        self._q = QuotientSpace(n, B, field)
        P = self._q.project_matrix()
        Zr = P @ Z
        _, piv = rref(Zr) if Zr.rows else ([], [])
        self.reps = select(Z, cols=piv)
        self._basis = select(Zr, cols=piv)
        self._P = P
        self._solve = solve

    @property
    def dim(self):
        return self.reps.cols

    def coords(self, v):
        red = (self._P @ Matrix.from_columns([v], self.n, self.field)).column(0)
        x = self._solve(self._basis, red)
        if x is None:
            raise AssertionError("vector is not a cycle")
        return x


def induced_matrix(f: Matrix, src: HomologyBasis, tgt: HomologyBasis) -> Matrix:
    """Matrix of the map on homology induced by the chain-level matrix ``f``."""
    cols = []
    for j in range(src.dim):
        img = (f @ Matrix.from_columns([src.reps.column(j)], src.n, src.field)).column(0)
        cols.append(tgt.coords(img))
    return Matrix.from_columns(cols, tgt.dim, src.field) if cols else Matrix.zero(tgt.dim, 0, src.field)


def homology_basis(C: DegreewiseComplex, i, d) -> HomologyBasis:
    d = tuple(d)
    return HomologyBasis(C.diff(i, d), C.diff(i + 1, d), C.dim(i, d), C.field)


def induced_map(f: ChainMap, i, d):
    """(H_i(src)_d basis, H_i(tgt)_d basis, matrix of H_i(f)_d)."""
    s, t = homology_basis(f.src, i, d), homology_basis(f.tgt, i, d)
    return s, t, induced_matrix(f.at(i, d), s, t)
