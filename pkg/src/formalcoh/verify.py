"""Executable checks of the isomorphisms, exact sequences and bounds.

Each checker takes an ``Instance`` and a ``CheckConfig`` and returns a
``VerificationOutcome``.  A failing outcome names a concrete cell or the
pair of integers that disagree.  Checkers whose hypotheses do not hold for
an instance are skipped by ``applicable``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .complexes import (AtomComplex, DegreeBox, HomFreeComplex, TensorFreeComplex, as_complex,
                        cech, cohomology_table, hom_from_free, homology_table, koszul, shift, tensor)
from .derived import (DEFAULT_PLATEAU, DEFAULT_STAGES, TateData, dagger, duality_formula,
                      formal_complex, formal_table, limit_formula, llambda, local_cohomology,
                      local_homology, rgamma, tate_table)
from .errors import FormalCohError, Inconclusive, RouteDisagreement
from .invariants import (NEG_INF, POS_INF, atom_homology_rows, cd, cd_of_support, depth,
                         dim_complex, fdepth, homology_support, is_cohen_macaulay, margin,
                         max_shift, stage_policy, sup_formal, sup_local_homology)
from .monomial import ModulePresentation, MonomialIdeal, height, support_primes


@dataclass
class CheckConfig:
    box: DegreeBox
    stages: int = DEFAULT_STAGES
    plateau: int = DEFAULT_PLATEAU

    def stages_for(self, box: DegreeBox, *objs) -> int:
        """The configured bound, raised to the stage policy for ``box``."""
        return max(self.stages, stage_policy(box, self.plateau, max_shift(*objs)))


@dataclass
class Instance:
    a: MonomialIdeal
    X: object                  # ModulePresentation or AtomComplex
    b: MonomialIdeal | None = None
    label: str = ""

    @property
    def ring(self):
        return self.X.ring

    @property
    def m(self):
        return MonomialIdeal.maximal(self.ring.n)

    @property
    def is_module(self):
        return isinstance(self.X, ModulePresentation)


@dataclass
class VerificationOutcome:
    theorem: str
    instance: str
    status: str                # pass | fail | inconclusive
    evidence: dict = dc_field(default_factory=dict)
    counterexample: object = None

    def record(self) -> str:
        ev = "; ".join(f"{k}={_fmt(v)}" for k, v in self.evidence.items())
        ce = f"\tcounterexample={_fmt(self.counterexample)}" if self.counterexample is not None else ""
        return f"{self.theorem}\t{self.instance}\t{self.status}\t{ev}{ce}"


def _fmt(v):
    if v == POS_INF:
        return "+inf"
    if v == NEG_INF:
        return "-inf"
    return str(v).replace("\t", " ")


def _first_diff(t1, t2):
    diffs = t1.differences(t2, limit=1)
    return diffs[0] if diffs else None


def _outcome(name, inst, ok, evidence, counterexample=None):
    return VerificationOutcome(name, inst.label, "pass" if ok else "fail", evidence,
                               None if ok else counterexample)


def _table_check(name, inst, t1, t2, labels):
    diff = _first_diff(t1, t2)
    ev = {labels[0]: len(t1.entries), labels[1]: len(t2.entries), "box": str(t1.box)}
    return _outcome(name, inst, diff is None, ev, diff)


def _reindex(table, f):
    from .complexes import CohomologyTable
    return CohomologyTable(table.kind, table.box, table.indices,
                           {(f(i), d): v for (i, d), v in table.entries.items()}, table.route)


# --- section 2 ---------------------------------------------------------------

def check_route_agreement(inst: Instance, cfg: CheckConfig):
    st = cfg.stages_for(cfg.box, inst.X)
    L = limit_formula(inst.a, inst.X, cfg.box, st, cfg.plateau)
    D = duality_formula(inst.a, inst.X, cfg.box)
    F = formal_table(inst.a, inst.m, inst.X, cfg.box, st, cfg.plateau)
    for other, tag in ((D, "duality"), (F, "completion")):
        diff = _first_diff(L, other)
        if diff is not None:
            return VerificationOutcome("route_agreement", inst.label, "fail",
                                       {"pair": f"limit/{tag}", "box": str(cfg.box)}, diff)
    return VerificationOutcome("route_agreement", inst.label, "pass",
                               {"cells": len(L.entries), "rows": L.nonzero_indices(),
                                "max_stage": max(L.certificates.values(), default=0),
                                "stages": st, "box": str(cfg.box)})


def check_cor_3_2(inst: Instance, cfg: CheckConfig):
    try:
        r = fdepth(inst.a, inst.m, inst.X, cfg.box, cfg.stages, cfg.plateau)
    except RouteDisagreement as e:
        return VerificationOutcome("cor_3_2", inst.label, "fail", {}, (e.left, e.right))
    return _outcome("cor_3_2", inst, True, {"fdepth": r.value, "-cd_a(X†)": r.detail["-cd_a(X†)"]})


def _index_window(inst):
    n = inst.ring.n
    return range(-n - 2, n + 3)


def check_prop_2_9(inst: Instance, cfg: CheckConfig):
    st = cfg.stages_for(cfg.box, inst.X)
    TD = TateData(inst.a, inst.X, st, cfg.plateau)
    nodes = 0
    for d in cfg.box.degrees():
        for i in _index_window(inst):
            for name, dim, rin, rout in TD.les_nodes(i, d):
                nodes += 1
                if dim - rout != rin:
                    return VerificationOutcome("prop_2_9", inst.label, "fail", {"node": name},
                                               (i, d, dim, rin, rout))
    return VerificationOutcome("prop_2_9", inst.label, "pass", {"nodes_checked": nodes, "box": str(cfg.box)})


def prop_2_9_records(inst: Instance, cfg: CheckConfig):
    """One node-exactness outcome per degree of the box."""
    try:
        TD = TateData(inst.a, inst.X, cfg.stages_for(cfg.box, inst.X), cfg.plateau)
        for d in cfg.box.degrees():
            label = f"{inst.label}; d={d}"
            nodes, bad = 0, None
            for i in _index_window(inst):
                for name, dim, rin, rout in TD.les_nodes(i, d):
                    nodes += 1
                    if bad is None and dim - rout != rin:
                        bad = (name, i, dim, rin, rout)
            if bad is None:
                yield VerificationOutcome("prop_2_9", label, "pass", {"nodes": nodes})
            else:
                yield VerificationOutcome("prop_2_9", label, "fail", {"node": bad[0]}, bad[1:])
    except Inconclusive as e:
        yield VerificationOutcome("prop_2_9", inst.label, "inconclusive", {"reason": str(e)})


def _tate_and_friends(inst, cfg):
    st = cfg.stages_for(cfg.box, inst.X)
    w = _index_window(inst)
    idx = (w.start, w.stop - 1)
    T = tate_table(inst.a, inst.X, cfg.box, st, cfg.plateau, idx)
    H = local_cohomology(inst.a, inst.X, cfg.box, idx)
    L = local_homology(inst.a, inst.X, cfg.box, st, cfg.plateau, idx)
    return T, H, L


def check_cor_2_10(inst: Instance, cfg: CheckConfig):
    T, H, L = _tate_and_friends(inst, cfg)
    dp = depth(inst.a, inst.X).value
    c = cd(inst.a, inst.X).value
    checked = []
    for i in _index_window(inst):
        if i < dp - 1 or i > c:
            checked.append(i)
            for d in cfg.box.degrees():
                if T.dim(i, d) != L.dim(-i, d):
                    return _outcome("cor_2_10", inst, False, {"depth": dp, "cd": c},
                                    (i, d, T.dim(i, d), L.dim(-i, d)))
    return _outcome("cor_2_10", inst, True, {"depth": dp, "cd": c, "indices": f"{checked[0]}..{checked[-1]}"
                                             if checked else "none"})


def check_cor_2_11(inst: Instance, cfg: CheckConfig):
    T, H, L = _tate_and_friends(inst, cfg)
    n = inst.ring.n
    # i > 0 is the statement; i <= -2 follows from H^a_{-i}(M) = 0 for i != 0
    indices = [i for i in _index_window(inst) if i not in (0, -1) and i <= n + 1]
    for i in indices:
        for d in cfg.box.degrees():
            if T.dim(i, d) != H.dim(i + 1, d):
                return _outcome("cor_2_11", inst, False, {}, (i, d, T.dim(i, d), H.dim(i + 1, d)))
    return _outcome("cor_2_11", inst, True, {"indices": f"{indices[0]}..{indices[-1]} except 0,-1",
                                             "tate_cells": len(T.entries)})


def _supported_in(X, ideal: MonomialIdeal) -> bool:
    """Supp X ⊆ V(ideal), with primes given as variable sets."""
    P = as_complex(X)
    for p in homology_support(P):
        for g in ideal.generators:
            if not any(g[j] for j in p):
                return False
    return True


def check_prop_2_5(inst: Instance, cfg: CheckConfig):
    a, b = inst.a, inst.b or inst.m
    st = cfg.stages_for(cfg.box, inst.X)
    ev = {}
    Faa = formal_table(a, a, inst.X, cfg.box, st, cfg.plateau)
    LH = _reindex(local_homology(a, inst.X, cfg.box, st, cfg.plateau), lambda i: -i)
    diff = _first_diff(Faa, LH)
    if diff is not None:
        return _outcome("prop_2_5", inst, False, {"part": "i"}, diff)
    ev["i"] = "pass"
    Fab = formal_table(a, b, inst.X, cfg.box, st, cfg.plateau)
    if _supported_in(inst.X, b):
        diff = _first_diff(Fab, LH)
        if diff is not None:
            return _outcome("prop_2_5", inst, False, {"part": "ii"}, diff)
        ev["ii"] = "pass"
    else:
        ev["ii"] = "n/a"
    if _supported_in(inst.X, a):
        G = local_cohomology(b, inst.X, cfg.box)
        diff = _first_diff(Fab, G)
        if diff is not None:
            return _outcome("prop_2_5", inst, False, {"part": "iii"}, diff)
        ev["iii"] = "pass"
    else:
        ev["iii"] = "n/a"
    return _outcome("prop_2_5", inst, True, ev)


def check_prop_2_6(inst: Instance, cfg: CheckConfig):
    """Finite free X := K(a); Y := the instance complex."""
    a, b = inst.a, inst.b or inst.m
    ring = inst.ring
    F = koszul(list(a.generators), ring)
    Y = as_complex(inst.X)
    st = cfg.stages_for(cfg.box, Y, F)
    idx = (-2 * ring.n - 2, 2 * ring.n + 2)
    FY = formal_complex(a, b, Y, st, cfg.plateau)
    lhs = formal_complex(a, b, hom_from_free(F, Y), st, cfg.plateau)
    rhs = HomFreeComplex(F, FY)
    t1 = homology_table(lhs, cfg.box, idx)
    t2 = homology_table(rhs, cfg.box, idx)
    diff = _first_diff(t1, t2)
    if diff is not None:
        return _outcome("prop_2_6", inst, False, {"part": "i"}, diff)
    lhs = formal_complex(a, b, tensor(F, Y), st, cfg.plateau)
    rhs = TensorFreeComplex(F, FY)
    t3 = homology_table(lhs, cfg.box, idx)
    t4 = homology_table(rhs, cfg.box, idx)
    diff = _first_diff(t3, t4)
    return _outcome("prop_2_6", inst, diff is None,
                    {"i": "pass", "ii": "pass" if diff is None else "fail", "hom_cells": len(t1.entries),
                     "tensor_cells": len(t3.entries)}, diff)


# --- section 3 ---------------------------------------------------------------

def _cd_R(inst):
    return cd(inst.a, ModulePresentation.free(inst.ring)).value


def check_thm_3_3(inst: Instance, cfg: CheckConfig):
    a, b = inst.a, inst.b or inst.m
    ev = {}
    f_aa = fdepth(a, a, inst.X, cfg.box, cfg.stages, cfg.plateau, cross_check=False).value
    sup_l = sup_local_homology(a, inst.X, cfg.box, cfg.stages, cfg.plateau).value
    ev["i"] = f"{_fmt(f_aa)} = -({_fmt(sup_l)})"
    if f_aa != -sup_l:
        return _outcome("thm_3_3", inst, False, ev, ("i", f_aa, sup_l))
    f_ab = fdepth(a, b, inst.X, cfg.box, cfg.stages, cfg.plateau).value
    dp = depth(b, inst.X).value
    cdr = _cd_R(inst)
    ev["ii"] = f"{_fmt(f_ab)} >= {_fmt(dp)} - {cdr}"
    if not f_ab >= dp - cdr:
        return _outcome("thm_3_3", inst, False, ev, ("ii", f_ab, dp, cdr))
    rep = sup_formal(a, b, inst.X, cfg.box, cfg.stages, cfg.plateau)
    cdk, dimq = rep.detail["cd_b(K(a)⊗X)"], rep.detail["dim X/aX"]
    ev["iii"] = f"{_fmt(rep.value)} = {_fmt(cdk)} <= {_fmt(dimq)}"
    ok = rep.value == cdk and cdk <= dimq
    if ok and b == inst.m:
        ok = rep.value == dimq
    return _outcome("thm_3_3", inst, ok, ev, None if ok else ("iii", rep.value, cdk, dimq))


def check_cor_3_4(inst: Instance, cfg: CheckConfig):
    sup_l = sup_local_homology(inst.a, inst.X, cfg.box, cfg.stages, cfg.plateau).value
    bound = _cd_R(inst) - depth(inst.a, inst.X).value
    return _outcome("cor_3_4", inst, sup_l <= bound, {"sup LΛ": sup_l, "cd_a(R)-depth(a,X)": bound},
                    (sup_l, bound))


def check_lemma_3_5(inst: Instance, cfg: CheckConfig):
    lhs = cd(inst.a, inst.X).value
    rhs = cd_of_support(inst.a, inst.X).value
    return _outcome("lemma_3_5", inst, lhs == rhs, {"cd_a(M)": lhs, "sup cd_a(S/p)": rhs}, (lhs, rhs))


def _sandwich(inst, cfg):
    m = inst.m
    f = fdepth(inst.a, m, inst.X, cfg.box, cfg.stages, cfg.plateau).value
    dp = depth(m, inst.X).value
    dm = dim_complex(inst.X).value
    c = cd_of_support(inst.a, inst.X).value
    return f, dp, dm, c


def check_thm_3_6(inst: Instance, cfg: CheckConfig):
    f, dp, dm, c = _sandwich(inst, cfg)
    ok = dp - c <= f <= dm - c
    return _outcome("thm_3_6", inst, ok, {"lower": dp - c, "fdepth": f, "upper": dm - c},
                    (dp - c, f, dm - c))


def check_cor_3_7(inst: Instance, cfg: CheckConfig, ideals=()):
    cm, dp, dm = is_cohen_macaulay(inst.X)
    zero = MonomialIdeal(inst.ring.n)
    f0 = fdepth(zero, inst.m, inst.X, cfg.box, cfg.stages, cfg.plateau)
    cd0 = cd_of_support(zero, inst.X).value
    iii = f0.value == dm.value - cd0
    ii_vals = {}
    for name, a in ideals:
        g = fdepth(a, inst.m, inst.X, cfg.box, cfg.stages, cfg.plateau).value
        ii_vals[name] = g == dm.value - cd_of_support(a, inst.X).value
    ii = all(ii_vals.values()) if ii_vals else None
    ev = {"i (CM)": cm, "ii": ii if ii is not None else "n/a", "iii": iii,
          "fdepth(0,X)": f0.value, "dim X": dm.value, "cd_0(H#)": cd0}
    if not iii:
        ev["iii_witnesses"] = f"fdepth cell {f0.witness}, dim cell {dm.witness}"
    ok = (cm == iii) and (not cm or ii in (True, None))
    return _outcome("cor_3_7", inst, ok, ev, (cm, ii, iii))


def _regular_sequence(a: MonomialIdeal) -> bool:
    gens = a.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if any(x and y for x, y in zip(gens[i], gens[j])):
                return False
    return not a.is_zero()


def check_remark_3_8_i(inst: Instance, cfg: CheckConfig):
    K = koszul(list(inst.a.generators), inst.ring)
    f = fdepth(inst.a, inst.m, K, cfg.box, cfg.stages, cfg.plateau).value
    rhs = depth(inst.m, ModulePresentation.free(inst.ring)).value - height(inst.a)
    return _outcome("remark_3_8_i", inst, f == rhs, {"fdepth(a,K)": f, "depth R - Ht a": rhs}, (f, rhs))


def check_remark_3_8_ii(inst: Instance, cfg: CheckConfig):
    P = as_complex(inst.X)
    d = dim_complex(P).value
    st = cfg.stages_for(cfg.box, P)
    G = rgamma(inst.m, P)
    rows = atom_homology_rows(G)
    if set(rows) != {-d}:
        return _outcome("remark_3_8_ii", inst, False, {"H_m rows": sorted(-i for i in rows)}, rows)
    Y = shift(G, d)  # H_0(Y) = H^d_m(X)
    LH = local_homology(inst.a, Y, cfg.box, st, cfg.plateau)
    rhs = _reindex(LH, lambda j: d - j)
    lhs = duality_formula(inst.a, P, cfg.box)
    return _table_check("remark_3_8_ii", inst, lhs, rhs, ("F cells", "H^a_{d-i}(H^d_m) cells"))


def check_remark_3_8_iii(inst: Instance, cfg: CheckConfig):
    ring = inst.ring
    omega = ModulePresentation.free(ring, [(1,) * ring.n])
    t = ring.n - height(inst.a)
    P = as_complex(omega)
    delta = margin(ring.n, inst.a, P)
    big = cfg.box.enlarged(2 * delta)
    rows = []
    for bx in (cfg.box.enlarged(delta), big):
        st = cfg.stages_for(bx, P)
        tab = formal_table(inst.a, inst.m, P, bx, st, cfg.plateau)
        rows.append(tab.nonzero_indices())
    if rows[0] != rows[1]:
        raise Inconclusive("vanishing under the margin policy", detail=str(rows))
    ok = rows[1] == [t]
    return _outcome("remark_3_8_iii", inst, ok, {"t = dim R/a": t, "rows": rows[1], "box": str(big)},
                    rows[1])


def check_remark_3_8_iv(inst: Instance, cfg: CheckConfig):
    S = ModulePresentation.free(inst.ring)
    f = fdepth(inst.a, inst.m, S, cfg.box, cfg.stages, cfg.plateau).value
    rhs = inst.ring.n - _cd_R(inst)
    return _outcome("remark_3_8_iv", inst, f == rhs, {"fdepth(a,S)": f, "dim S - cd_a(S)": rhs}, (f, rhs))


def check_remark_3_8_v(inst: Instance, cfg: CheckConfig):
    cm, _, _ = is_cohen_macaulay(inst.X)
    f, dp, dm, c = _sandwich(inst, cfg)
    ok = (not cm) and f == dm - c
    return _outcome("remark_3_8_v", inst, ok, {"CM": cm, "fdepth": f, "dim - cd_a(H#)": dm - c},
                    (cm, f, dm - c))


# --- registry ----------------------------------------------------------------

def _is_cm(inst):
    try:
        return is_cohen_macaulay(inst.X)[0]
    except FormalCohError:
        return False


def _nontrivial(inst):
    return dim_complex(inst.X).value != NEG_INF


CHECKS = {
    "route_agreement": (check_route_agreement, lambda i: i.is_module),
    "cor_3_2": (check_cor_3_2, lambda i: True),
    "prop_2_5": (check_prop_2_5, lambda i: True),
    "prop_2_6": (check_prop_2_6, lambda i: True),
    "prop_2_9": (check_prop_2_9, lambda i: True),
    "cor_2_10": (check_cor_2_10, lambda i: True),
    "cor_2_11": (check_cor_2_11, lambda i: i.is_module),
    "thm_3_3": (check_thm_3_3, lambda i: True),
    "cor_3_4": (check_cor_3_4, lambda i: True),
    "lemma_3_5": (check_lemma_3_5, lambda i: i.is_module),
    "thm_3_6": (check_thm_3_6, _nontrivial),
    "cor_3_7": (check_cor_3_7, _nontrivial),
    "remark_3_8_i": (check_remark_3_8_i, lambda i: _regular_sequence(i.a)),
    "remark_3_8_ii": (check_remark_3_8_ii, lambda i: _nontrivial(i) and _is_cm(i)),
    "remark_3_8_iii": (check_remark_3_8_iii,
                       lambda i: not i.a.is_zero() and _cd_R(i) == height(i.a)),
    "remark_3_8_iv": (check_remark_3_8_iv, lambda i: not i.a.is_zero()),
    "remark_3_8_v": (check_remark_3_8_v, lambda i: _nontrivial(i) and not _is_cm(i)
                     and i.ring.n == 1),
}

# checks that depend only on (a, ring), not on X
PER_IDEAL = {"remark_3_8_i", "remark_3_8_iii", "remark_3_8_iv"}


def run_check(name: str, inst: Instance, cfg: CheckConfig, **kw) -> VerificationOutcome:
    fn, _ = CHECKS[name]
    try:
        return fn(inst, cfg, **kw)
    except Inconclusive as e:
        return VerificationOutcome(name, inst.label, "inconclusive", {"reason": str(e)})
    except RouteDisagreement as e:
        return VerificationOutcome(name, inst.label, "fail", {"reason": str(e)}, (e.left, e.right))
