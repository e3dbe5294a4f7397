"""Numerical invariants and executable checks of the vanishing theorems.

Homology of an atom complex at degree d depends only on which atoms are
present at d, and finitely many degrees realize every presence pattern.  So
depth, cd and dim (all read off atom complexes) are decided exactly.
Completed complexes have no such finiteness; their rows are read on a box
grown twice by the margin δ = (max generator degree) + n, and the two
readings must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

from .complexes import (AtomComplex, CohomologyTable, DegreeBox, as_complex, cech, cohomology_table,
                        homology_table, hom_from_free, koszul, shift, tensor, unit_complex)
from .derived import (DEFAULT_PLATEAU, DEFAULT_STAGES, TateData, dagger, duality_formula,
                      formal_complex, formal_table, limit_formula, local_cohomology, local_homology,
                      rgamma, tate_table)
from .errors import Inconclusive, InvalidInput, RouteDisagreement
from .monomial import (NEG_INF, POS_INF, ModulePresentation, MonomialIdeal, RingSpec, height,
                       krull_dim, taylor_resolution)


@dataclass
class InvariantReport:
    name: str
    value: object                  # int, POS_INF or NEG_INF
    witness: tuple | None = None   # (index, degree) of a nonzero cell
    route: str = ""
    box: DegreeBox | None = None   # box (after margins) on which vanishing was read
    detail: dict = dc_field(default_factory=dict)

    def __str__(self):
        v = self.value
        if v == POS_INF:
            v = "+inf"
        elif v == NEG_INF:
            v = "-inf"
        s = f"{self.name} = {v}"
        if self.witness is not None:
            s += f"  (witness index {self.witness[0]}, degree {self.witness[1]})"
        if self.route:
            s += f"  [route {self.route}]"
        if self.box is not None:
            s += f"  [box {self.box}]"
        return s


# --- policies ------------------------------------------------------------

def stage_policy(box: DegreeBox, plateau: int = DEFAULT_PLATEAU, shift: int = 0) -> int:
    """Stage bound sufficient for completions read on ``box``.

    An atom's a-adic order at degree d is at most the sum of the positive
    parts of d - g, so n * (radius + |shifts|) + 1 stages reach the last
    change; ``plateau`` more certify it.
    """
    return box.n * (box.radius() + shift) + plateau + 2


def max_shift(*objs) -> int:
    out = 0
    for X in objs:
        if X is None:
            continue
        if isinstance(X, MonomialIdeal):
            out = max(out, X.max_generator_degree())
            continue
        if isinstance(X, ModulePresentation):
            vals = [abs(c) for s in X.all_shifts() for c in s]
            out = max(out, max(vals, default=0))
            continue
        if isinstance(X, AtomComplex):
            out = max(out, X.max_shift())
    return out


def margin(n: int, *objs) -> int:
    """δ = max generator degree + n."""
    return max_shift(*objs) + n


def _rows(table_fn, box: DegreeBox, delta: int):
    """Nonzero rows of a table read on box+δ and box+2δ; they must agree."""
    # homology at a degree does not depend on the box, so the inner reading
    # is a restriction of the outer one
    t2 = table_fn(box.enlarged(2 * delta))
    t1 = t2.restricted(box.enlarged(delta))
    r1, r2 = t1.nonzero_indices(), t2.nonzero_indices()
    if r1 != r2:
        raise Inconclusive("vanishing under the margin policy",
                           detail=f"rows {r1} on {t1.box} but {r2} on {t2.box}")
    return r2, t2


def _witness(table: CohomologyTable, i):
    cells = sorted(d for (j, d) in table.entries if j == i)
    return (i, cells[0]) if cells else None


# --- exact nonvanishing for atom complexes -----------------------------------

def atom_homology_rows(C: AtomComplex, inverted: frozenset = frozenset()):
    """{homological index: witness degree} of all nonzero H_i(C[x_inverted^-1])."""
    L = C.localized(inverted) if inverted else C
    rows = {}
    for d in L.critical_degrees(frozenset(inverted)):
        for i in L.indices():
            if i not in rows and L.homology_dim(i, d):
                rows[i] = d
    return rows


def _all_primes(n):
    return [frozenset(c) for k in range(n + 1) for c in combinations(range(n), k)]


def homology_support(C: AtomComplex, i=None) -> list[frozenset]:
    """Monomial primes p (as variable sets) with H_i(C)_p != 0; all i if None."""
    n = C.ring.n
    out = []
    for p in _all_primes(n):
        inv = frozenset(range(n)) - p
        rows = atom_homology_rows(C, inv)
        if (i is None and rows) or (i is not None and i in rows):
            out.append(p)
    return out


# --- invariants ------------------------------------------------------------

def depth(a: MonomialIdeal, X) -> InvariantReport:
    """depth(a, X) = -sup RHom(S/a, X), via Hom(Taylor(a), P_X)."""
    P = as_complex(X)
    if a.is_zero():
        raise InvalidInput("depth needs a nonzero ideal")
    T = taylor_resolution(a, P.ring).complex()
    H = hom_from_free(T, P)
    rows = atom_homology_rows(H)
    if not rows:
        return InvariantReport("depth", POS_INF, route="hom-taylor", detail={"exact": True})
    top = max(rows)
    return InvariantReport("depth", -top, (-top, rows[top]), "hom-taylor", detail={"exact": True})


def cd(a: MonomialIdeal, X) -> InvariantReport:
    """Largest i with H^i_a(X) != 0 (−inf when all vanish)."""
    P = as_complex(X)
    C = rgamma(a, P)
    rows = atom_homology_rows(C)
    if not rows:
        return InvariantReport("cd", NEG_INF, route="cech", detail={"exact": True})
    low = min(rows)
    rep = InvariantReport("cd", -low, (-low, rows[low]), "cech", detail={"exact": True})
    dim = dim_complex(P).value
    if rep.value > dim:
        raise RouteDisagreement(f"cd {rep.value} exceeds dim {dim}", rep.value, dim)
    return rep


def dim_complex(X) -> InvariantReport:
    """sup_i (dim H_i(X) - i), supports decided by localization."""
    P = as_complex(X)
    n = P.ring.n
    best, wit = NEG_INF, None
    for p in _all_primes(n):
        inv = frozenset(range(n)) - p
        rows = atom_homology_rows(P, inv)
        for i, d in rows.items():
            v = n - len(p) - i
            if v > best:
                best, wit = v, (i, d)
    return InvariantReport("dim", best, wit, "support", detail={"exact": True})


def cd_of_support(a: MonomialIdeal, X) -> InvariantReport:
    """cd_a(H(X)^♯) as the largest cd_a(S/p) over p in the support of H(X)."""
    P = as_complex(X)
    ring = P.ring
    primes = homology_support(P)
    if not primes:
        return InvariantReport("cd_a(H#)", NEG_INF, route="support")
    best, arg = NEG_INF, None
    for p in primes:
        Sp = ModulePresentation.quotient(ring, MonomialIdeal(ring.n, [_unit(ring.n, j) for j in p]))
        v = cd(a, Sp).value if not a.is_zero() else 0
        if v > best:
            best, arg = v, p
    return InvariantReport("cd_a(H#)", best, route="support", detail={"prime": sorted(arg)})


def _unit(n, j):
    return tuple(1 if k == j else 0 for k in range(n))


def is_cohen_macaulay(X) -> tuple[bool, InvariantReport, InvariantReport]:
    P = as_complex(X)
    m = MonomialIdeal.maximal(P.ring.n)
    dp, dm = depth(m, P), dim_complex(P)
    if dm.value == NEG_INF:
        raise InvalidInput("the Cohen-Macaulay property needs a non-trivial complex")
    return dp.value == dm.value, dp, dm


_formal_cache: dict = {}


def _formal_rows(a, b, X, box, stages, plateau):
    # modules are keyed by value; complexes by identity, pinned in the entry
    # so that the id cannot be reused while the entry lives
    key = (a, b, X if isinstance(X, ModulePresentation) else id(X), box, stages, plateau)
    hit = _formal_cache.get(key)
    if hit is None or hit[0] is not X:
        hit = (X, _formal_rows_uncached(a, b, X, box, stages, plateau))
        _formal_cache[key] = hit
    return hit[1]


def _formal_rows_uncached(a, b, X, box, stages, plateau):
    P = as_complex(X)
    delta = margin(P.ring.n, a, b, P)

    def table(bx):
        st = max(stages, stage_policy(bx, plateau, max_shift(P)))
        return formal_table(a, b, P, bx, st, plateau)

    return _rows(table, box, delta)


def fdepth(a: MonomialIdeal, b: MonomialIdeal, X, box: DegreeBox, stages=DEFAULT_STAGES,
           plateau=DEFAULT_PLATEAU, cross_check=True) -> InvariantReport:
    """inf{i : 𝔉^i_{a,b}(X) != 0}; for b = m also -cd_a(X†), which must agree."""
    P = as_complex(X)
    rows, t = _formal_rows(a, b, X, box, stages, plateau)
    if not rows:
        value, wit = POS_INF, None
    else:
        value = rows[0]
        wit = _witness(t, value)
    rep = InvariantReport("fdepth", value, wit, "completion", t.box)
    if cross_check and b == MonomialIdeal.maximal(P.ring.n):
        other = _neg(cd(a, dagger(P)).value) if not a.is_zero() else _neg(_cd_zero(dagger(P)))
        rep.detail["-cd_a(X†)"] = other
        if other != value:
            raise RouteDisagreement(f"fdepth {value} from the completion table but {other} "
                                    "from -cd_a(X†)", value, other)
    return rep


def _cd_zero(C):
    rows = atom_homology_rows(C)
    return -min(rows) if rows else NEG_INF


def _neg(v):
    if v == POS_INF:
        return NEG_INF
    if v == NEG_INF:
        return POS_INF
    return -v


def sup_formal(a: MonomialIdeal, b: MonomialIdeal, X, box: DegreeBox, stages=DEFAULT_STAGES,
               plateau=DEFAULT_PLATEAU) -> InvariantReport:
    """sup{i : 𝔉^i_{a,b}(X) != 0} with cd_b(K(a) ⊗ X) and dim X/aX alongside."""
    P = as_complex(X)
    rows, t = _formal_rows(a, b, X, box, stages, plateau)
    value = rows[-1] if rows else NEG_INF
    KX = _koszul_tensor(a, P)
    rep = InvariantReport("sup_formal", value, _witness(t, value) if rows else None, "completion", t.box)
    rep.detail["cd_b(K(a)⊗X)"] = cd(b, KX).value if not b.is_zero() else _cd_zero(KX)
    rep.detail["dim X/aX"] = dim_complex(KX).value
    return rep


def _koszul_tensor(a, P):
    if a.is_zero():
        return P
    return tensor(koszul(list(a.generators), P.ring), P)


def sup_local_homology(a: MonomialIdeal, X, box: DegreeBox, stages=DEFAULT_STAGES,
                       plateau=DEFAULT_PLATEAU) -> InvariantReport:
    """sup LΛ^a(X) (largest nonzero homological index)."""
    P = as_complex(X)
    delta = margin(P.ring.n, a, P)

    def table(bx):
        st = max(stages, stage_policy(bx, plateau, max_shift(P)))
        return local_homology(a, P, bx, st, plateau)

    rows, t = _rows(table, box, delta)
    value = rows[-1] if rows else NEG_INF
    return InvariantReport("sup LΛ", value, _witness(t, value) if rows else None, "completion", t.box)
