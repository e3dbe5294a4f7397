"""Monomial ideals and finely graded monomial module presentations.

Degrees are tuples in Z^n with deg(x_i) = e_i.  A module is the cokernel of a
matrix whose nonzero entries are scalar multiples of monomials; since the
monomial in each entry is forced by the row and column shifts, only the scalar
is stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from threading import Lock
from typing import Iterable, Sequence

from .errors import InvalidInput
from .linalg import QQ, FieldSpec, Matrix, QuotientSpace, kernel_basis, rank

Degree = tuple


def leq(u, v) -> bool:
    return all(a <= b for a, b in zip(u, v))


def join(u, v):
    return tuple(max(a, b) for a, b in zip(u, v))


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def unit_vector(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


@dataclass(frozen=True)
class RingSpec:
    num_vars: int
    field: FieldSpec = QQ
    names: tuple = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise InvalidInput("a polynomial ring needs at least one variable")
        if not self.names:
            default = ("x", "y", "z", "w") if self.num_vars <= 4 else ()
            names = default[: self.num_vars] or tuple(f"x{i + 1}" for i in range(self.num_vars))
            object.__setattr__(self, "names", tuple(names))
        if len(self.names) != self.num_vars:
            raise InvalidInput("one name per variable")

    @property
    def n(self):
        return self.num_vars

    def zero_degree(self):
        return (0,) * self.num_vars

    def format_monomial(self, v) -> str:
        parts = []
        for name, e in zip(self.names, v):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"


def _minimalize(gens: Iterable[tuple]) -> tuple:
    gens = sorted(set(gens), key=lambda g: (sum(g), g))
    out = []
    for g in gens:
        if not any(leq(h, g) for h in out):
            out.append(g)
    return tuple(sorted(out))


class MonomialIdeal:
    """Ideal generated by monomials, stored by its minimal generators."""

    def __init__(self, n: int, generators: Iterable[Sequence[int]] = ()):
        gens = [tuple(int(c) for c in g) for g in generators]
        for g in gens:
            if len(g) != n or min(g, default=0) < 0:
                raise InvalidInput(f"bad exponent vector {g} for {n} variables")
        self.n = n
        self.generators = _minimalize(gens)

    @classmethod
    def maximal(cls, n):
        return cls(n, [unit_vector(n, i) for i in range(n)])

    def is_zero(self):
        return not self.generators

    def is_unit(self):
        return (0,) * self.n in self.generators

    def contains(self, v) -> bool:
        return any(leq(g, v) for g in self.generators)

    def max_generator_degree(self) -> int:
        return max((sum(g) for g in self.generators), default=0)

    def support(self, g):
        return frozenset(i for i, e in enumerate(g) if e)

    def __eq__(self, other):
        return isinstance(other, MonomialIdeal) and self.n == other.n and self.generators == other.generators

    def __hash__(self):
        return hash((self.n, self.generators))

    def __repr__(self):
        return f"MonomialIdeal({self.n}, {list(self.generators)})"

    def minimal_primes(self) -> list[frozenset]:
        """Minimal monomial primes over the ideal, as sets of variable indices."""
        if self.is_zero():
            return [frozenset()]
        if self.is_unit():
            return []
        supports = [self.support(g) for g in self.generators]
        covers = []
        for k in range(1, self.n + 1):
            for c in combinations(range(self.n), k):
                cs = frozenset(c)
                if all(s & cs for s in supports) and not any(p <= cs for p in covers):
                    covers.append(cs)
        return covers


def ideal_power(a: MonomialIdeal, t: int) -> MonomialIdeal:
    if t < 1:
        raise InvalidInput("ideal power exponent must be positive")
    gens = a.generators
    cur = gens
    for _ in range(t - 1):
        cur = _minimalize(add(u, g) for u in cur for g in gens)
    return MonomialIdeal(a.n, cur)


def ideal_product(a: MonomialIdeal, b: MonomialIdeal) -> MonomialIdeal:
    return MonomialIdeal(a.n, [add(u, v) for u in a.generators for v in b.generators])


def height(a: MonomialIdeal) -> int:
    if a.is_zero() or a.is_unit():
        raise InvalidInput("height needs a nonzero proper ideal")
    return min(len(p) for p in a.minimal_primes())


# --- modules -------------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """One relation column: a free generator in degree ``source`` mapped to
    sum(scalar * x^(source - target_shift[row]) * e_row)."""

    source: tuple
    entries: tuple  # ((row, scalar), ...)


class ModulePresentation:
    """Cokernel of a scalar-monomial matrix  ⊕ S(-source_j) -> ⊕ S(-target_k)."""

    def __init__(self, ring: RingSpec, target_shifts: Sequence[Sequence[int]],
                 relations: Sequence = ()):
        self.ring = ring
        n = ring.n
        self.target_shifts = tuple(tuple(int(c) for c in s) for s in target_shifts)
        for s in self.target_shifts:
            if len(s) != n:
                raise InvalidInput(f"shift {s} has wrong length")
        rels = []
        for r in relations:
            if not isinstance(r, Relation):
                source, entries = r
                if isinstance(entries, dict):
                    entries = entries.items()
                r = Relation(tuple(source), tuple(sorted((int(k), Fraction(c)) for k, c in entries)))
            for row, c in r.entries:
                if not 0 <= row < len(self.target_shifts):
                    raise InvalidInput(f"relation refers to missing generator {row}")
                if not leq(self.target_shifts[row], r.source):
                    raise InvalidInput(
                        f"relation in degree {r.source} cannot hit generator {row} of degree "
                        f"{self.target_shifts[row]}: entry monomial would have negative exponent")
            r = Relation(r.source, tuple((row, c) for row, c in r.entries if c != 0))
            rels.append(r)
        self.relations = tuple(rels)

    @classmethod
    def free(cls, ring, shifts=None):
        return cls(ring, shifts if shifts is not None else [ring.zero_degree()])

    @classmethod
    def quotient(cls, ring, ideal: MonomialIdeal, shift=None):
        s = tuple(shift) if shift is not None else ring.zero_degree()
        return cls(ring, [s], [(add(s, g), {0: 1}) for g in ideal.generators])

    @classmethod
    def direct_sum(cls, *mods):
        ring = mods[0].ring
        shifts, rels, off = [], [], 0
        for m in mods:
            shifts.extend(m.target_shifts)
            for r in m.relations:
                rels.append(Relation(r.source, tuple((row + off, c) for row, c in r.entries)))
            off += len(m.target_shifts)
        return cls(ring, shifts, rels)

    def with_relations(self, extra) -> "ModulePresentation":
        return ModulePresentation(self.ring, self.target_shifts, list(self.relations) + list(extra))

    def quotient_by_ideal(self, a: MonomialIdeal) -> "ModulePresentation":
        """M / aM."""
        extra = [(add(s, g), {k: 1}) for k, s in enumerate(self.target_shifts) for g in a.generators]
        return self.with_relations(extra)

    def all_shifts(self):
        return list(self.target_shifts) + [r.source for r in self.relations]

    def __repr__(self):
        return f"ModulePresentation(gens={list(self.target_shifts)}, relations={len(self.relations)})"

    def __eq__(self, other):
        return (isinstance(other, ModulePresentation) and self.ring == other.ring
                and self.target_shifts == other.target_shifts and self.relations == other.relations)

    def __hash__(self):
        return hash((self.target_shifts, self.relations))

    def relation_vectors(self, d, present):
        """Relation columns present in degree d, in coordinates of ``present``."""
        pos = {k: i for i, k in enumerate(present)}
        field = self.ring.field
        cols = []
        for r in self.relations:
            if leq(r.source, d):
                v = [field.coerce(0)] * len(present)
                for row, c in r.entries:
                    v[pos[row]] = field.coerce(c)
                cols.append(v)
        return cols

    def is_zero_module(self):
        return all(dim == 0 for dim in (basis_at(self, d).dim for d in critical_degrees(self)))


@dataclass
class BasisData:
    """Degree-d piece of a presented module."""

    degree: tuple
    present: list            # free generators living in degree d
    quotient: QuotientSpace  # coordinates on F0_d / relations
    mult: dict = dc_field(default_factory=dict)  # variable index -> Matrix into degree d + e_i

    @property
    def dim(self):
        return self.quotient.dim


def _piece(M: ModulePresentation, d):
    present = [k for k, s in enumerate(M.target_shifts) if leq(s, d)]
    vecs = M.relation_vectors(d, present)
    field = M.ring.field
    span = Matrix.from_columns(vecs, len(present), field) if vecs else None
    return present, QuotientSpace(len(present), span, field)


def basis_at(M: ModulePresentation, d, with_mult: bool = False) -> BasisData:
    d = tuple(d)
    present, q = _piece(M, d)
    data = BasisData(d, present, q)
    if with_mult:
        for i in range(M.ring.n):
            d2 = add(d, unit_vector(M.ring.n, i))
            present2, q2 = _piece(M, d2)
            data.mult[i] = module_map(M, present, q, present2, q2)
    return data


def module_map(M, present, q, present2, q2) -> Matrix:
    """Matrix of the natural map M_d -> M_d' (d <= d'), i.e. multiplication by
    x^(d'-d), in the chosen quotient coordinates."""
    field = M.ring.field
    pos2 = {k: i for i, k in enumerate(present2)}
    incl = Matrix(len(present2), len(present),
                  [[1 if pos2[k] == r else 0 for k in present] for r in range(len(present2))], field)
    return q2.project_matrix() @ incl @ q.lift_matrix()


def critical_degrees(M: ModulePresentation, inverted: frozenset = frozenset()):
    """Representative degrees for every distinct shape of M_d (or of its
    localization at the variables in ``inverted``)."""
    n = M.ring.n
    shifts = M.all_shifts() or [M.ring.zero_degree()]
    axes = []
    for j in range(n):
        vals = sorted({s[j] for s in shifts})
        if j in inverted:
            axes.append([vals[-1]])
        else:
            axes.append([vals[0] - 1] + vals)
    return [tuple(p) for p in product(*axes)]


def localization_nonzero(M: ModulePresentation, inverted: frozenset) -> bool:
    for d in critical_degrees(M, inverted):
        if basis_at(M, d).dim:
            return True
    return False


def module_support(M: ModulePresentation) -> list[frozenset]:
    """Minimal monomial primes of Supp M, each as the set of variable indices
    it contains (the empty set is the zero ideal)."""
    n = M.ring.n
    supp = []
    for k in range(n + 1):
        for c in combinations(range(n), k):
            prime = frozenset(c)
            if any(p <= prime for p in supp):
                continue
            inverted = frozenset(range(n)) - prime
            if localization_nonzero(M, inverted):
                supp.append(prime)
    return supp


def support_primes(M: ModulePresentation) -> list[frozenset]:
    """All monomial primes in Supp M (closed under enlarging)."""
    n = M.ring.n
    mins = module_support(M)
    return [frozenset(c) for k in range(n + 1) for c in combinations(range(n), k)
            if any(p <= frozenset(c) for p in mins)]


NEG_INF = float("-inf")
POS_INF = float("inf")


def krull_dim(M: ModulePresentation):
    mins = module_support(M)
    if not mins:
        return NEG_INF
    return max(M.ring.n - len(p) for p in mins)


# --- free resolutions ----------------------------------------------------

@dataclass
class FreeResolution:
    """F_0 <- F_1 <- ... ; ``maps[k]`` is F_{k+1} -> F_k as a list of columns,
    each a dict row -> scalar."""

    ring: RingSpec
    shifts: list
    maps: list

    @property
    def length(self):
        return len(self.shifts) - 1

    def ranks(self):
        return [len(s) for s in self.shifts]

    def complex(self):
        from .complexes import AtomComplex, Atom
        terms = {k: [Atom(frozenset(), tuple(s)) for s in sh] for k, sh in enumerate(self.shifts)}
        diffs = {}
        for k, cols in enumerate(self.maps):
            entries = {}
            for c, col in enumerate(cols):
                for r, v in col.items():
                    if v:
                        entries[(r, c)] = Fraction(v)
            diffs[k + 1] = entries
        return AtomComplex(self.ring, terms, diffs)


def taylor_resolution(a: MonomialIdeal, ring: RingSpec | None = None) -> FreeResolution:
    ring = ring or RingSpec(a.n)
    gens = a.generators
    r = len(gens)
    zero = ring.zero_degree()

    def lcm_of(J):
        out = zero
        for j in J:
            out = join(out, gens[j])
        return out

    subsets = [list(combinations(range(r), k)) for k in range(r + 1)]
    shifts = [[lcm_of(J) for J in subsets[k]] for k in range(r + 1)]
    maps = []
    for k in range(1, r + 1):
        index = {J: i for i, J in enumerate(subsets[k - 1])}
        cols = []
        for J in subsets[k]:
            col = {}
            for pos in range(len(J)):
                col[index[J[:pos] + J[pos + 1:]]] = (-1) ** pos
            cols.append(col)
        maps.append(cols)
    return FreeResolution(ring, shifts, maps)


def _join_closure(degrees):
    closure = set(degrees)
    frontier = set(degrees)
    while frontier:
        new = set()
        for u in frontier:
            for v in list(closure):
                w = join(u, v)
                if w not in closure:
                    new.add(w)
        closure |= new
        frontier = new
    return sorted(closure, key=lambda d: (sum(d), d))


def _syzygies(ring, source_shifts, columns, target_count):
    """Minimal generators of the kernel of a scalar-monomial map."""
    field = ring.field
    new_shifts, new_cols = [], []
    found_vectors = []  # (degree, dense vector over all sources)
    for d in _join_closure(source_shifts):
        present = [j for j, s in enumerate(source_shifts) if leq(s, d)]
        rows = sorted({r for j in present for r in columns[j]})
        rpos = {r: i for i, r in enumerate(rows)}
        A = Matrix(len(rows), len(present), None, field)
        for c, j in enumerate(present):
            for r, v in columns[j].items():
                A.data[rpos[r]][c] = field.coerce(v)
        K = kernel_basis(A)
        if K.cols == 0:
            continue
        lower = [vec for deg, vec in found_vectors if leq(deg, d)]
        span = [[vec[j] for j in present] for vec in lower]
        base = rank(Matrix.from_rows(span, field, len(present))) if span else 0
        for col in K.columns():
            trial = span + [col]
            rk = rank(Matrix.from_rows(trial, field, len(present)))
            if rk > base:
                span, base = trial, rk
                full = [field.coerce(0)] * len(source_shifts)
                for c, j in enumerate(present):
                    full[j] = col[c]
                found_vectors.append((d, full))
                new_shifts.append(d)
                new_cols.append({j: v for j, v in enumerate(full) if v})
    return new_shifts, new_cols


_resolution_cache: dict = {}
_resolution_lock = Lock()


def syzygy_resolution(M: ModulePresentation) -> FreeResolution:
    """Free resolution by iterated minimal syzygies (generators of each kernel
    are taken in the lcm lattice of the current shifts)."""
    key = (M.ring, M.target_shifts, M.relations)
    with _resolution_lock:
        if key in _resolution_cache:
            return _resolution_cache[key]
    ring = M.ring
    shifts = [list(M.target_shifts)]
    maps = []
    rel_shifts = [r.source for r in M.relations]
    rel_cols = [dict(r.entries) for r in M.relations]
    if rel_shifts:
        shifts.append(rel_shifts)
        maps.append(rel_cols)
        cur_shifts, cur_cols = rel_shifts, rel_cols
        for _ in range(ring.n + 2):
            s, c = _syzygies(ring, cur_shifts, cur_cols, len(shifts[-2]))
            if not s:
                break
            shifts.append(s)
            maps.append(c)
            cur_shifts, cur_cols = s, c
    res = FreeResolution(ring, shifts, maps)
    with _resolution_lock:
        _resolution_cache.setdefault(key, res)
        return _resolution_cache[key]
