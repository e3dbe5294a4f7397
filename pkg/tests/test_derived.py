import pytest

from formalcoh.complexes import (Atom, AtomComplex, CohomologyTable, DegreeBox, cech,
                                 cohomology_table, homology_table, koszul)
from formalcoh.derived import (TateData, adic_order, dagger, duality_formula, formal_table,
                               limit_formula, llambda, local_cohomology, local_homology,
                               matlis_dual, rgamma, tate_table)
from formalcoh.errors import Inconclusive, InvalidInput
from formalcoh.monomial import ModulePresentation, MonomialIdeal, RingSpec
from oracles import formal_limit_dim, local_cohomology_dim

R1, R2 = RingSpec(1), RingSpec(2)
B1, B2 = DegreeBox.cube(1, -4, 4), DegreeBox.cube(2, -3, 3)
X, Y = (1, 0), (0, 1)
x1 = MonomialIdeal(1, [(1,)])
x2, m2 = MonomialIdeal(2, [X]), MonomialIdeal.maximal(2)
S1, S2 = ModulePresentation.free(R1), ModulePresentation.free(R2)


def quo(ring, *gens):
    return ModulePresentation.quotient(ring, MonomialIdeal(ring.n, gens))


def nonneg(box):
    return [d for d in box.degrees() if all(c >= 0 for c in d)]


# frozen tables; each is reproduced by an oracle in test_oracles.py
F_X_M_S2 = {(1, d): 1 for d in B2.degrees() if d[0] >= 0 and d[1] <= -1}
H_M_S2 = {(2, d): 1 for d in B2.degrees() if d[0] <= -1 and d[1] <= -1}


# --- local cohomology ------------------------------------------------------

def test_local_cohomology_examples():
    assert local_cohomology(x1, S1, B1).entries == {(1, (d,)): 1 for d in range(-4, 0)}
    assert local_cohomology(x1, quo(R1, (1,)), B1).entries == {(0, (0,)): 1}
    assert local_cohomology(m2, S2, B2).entries == H_M_S2


def test_local_cohomology_zero_ideal_is_identity():
    assert local_cohomology(MonomialIdeal(2), S2, B2).entries == {(0, d): 1 for d in nonneg(B2)}


def test_local_cohomology_matches_oracle_on_quotient():
    I = [(2, 0), (1, 1)]
    t = local_cohomology(MonomialIdeal(2, [(1, 1)]), quo(R2, *I), B2)
    for d in B2.degrees():
        for i in range(3):
            assert t.dim(i, d) == local_cohomology_dim(I, [(1, 1)], d, i)


# --- completion and local homology ------------------------------------------

def test_adic_order():
    assert adic_order(x1, frozenset(), (3,)) == 3
    assert adic_order(x1, frozenset({0}), (3,)) is None  # x is a unit in S_x


def test_llambda_examples():
    assert homology_table(llambda(x1, S1), B1).entries == {(0, (d,)): 1 for d in range(0, 5)}
    Sx = AtomComplex(R1, {0: [Atom(frozenset({0}), (0,))]}, {})
    assert homology_table(llambda(x1, Sx), B1).entries == {}
    C = llambda(x1, cech(x1, R1), stages=14)
    assert homology_table(C, B1).entries == {(0, (d,)): 1 for d in range(0, 5)}


def test_local_homology_of_module_is_concentrated():
    M = quo(R2, (2, 0), (1, 1))
    t = local_homology(x2, M, B2, stages=16)
    assert t.nonzero_indices() == [0]


def test_completion_inconclusive_when_stage_bound_too_small():
    with pytest.raises(Inconclusive):
        formal_table(x2, m2, S2, B2, stages=2)


# --- formal cohomology: three routes ----------------------------------------

def test_formal_examples():
    assert formal_table(x1, x1, S1, B1, 14).entries == {(0, (d,)): 1 for d in range(0, 5)}
    assert formal_table(x2, m2, S2, B2, 16).entries == F_X_M_S2
    zero = AtomComplex(R2, {}, {})
    assert formal_table(x2, m2, zero, B2).entries == {}


def test_limit_examples():
    assert limit_formula(x1, S1, B1, 14).entries == {(0, (d,)): 1 for d in range(0, 5)}
    t = limit_formula(x2, quo(R2, X), B2, 16)
    assert t.entries == {(1, (0, d2)): 1 for d2 in range(-3, 0)}
    assert t.entries == local_cohomology(m2, quo(R2, X), B2).entries


@pytest.mark.parametrize("a,M", [
    (x2, S2), (x2, quo(R2, (2, 0), (1, 1))), (MonomialIdeal(2, [(1, 1)]), quo(R2, (0, 1))),
    (m2, quo(R2, X)),
])
def test_three_routes_agree(a, M):
    L = limit_formula(a, M, B2, 16)
    D = duality_formula(a, M, B2)
    F = formal_table(a, m2, M, B2, 16)
    assert L.entries == D.entries == F.entries


def test_duality_examples():
    assert duality_formula(x1, S1, B1).entries == limit_formula(x1, S1, B1, 14).entries
    assert duality_formula(x2, S2, B2).entries == F_X_M_S2
    k = quo(R2, X, Y)
    assert duality_formula(x2, k, B2).entries == {(0, (0, 0)): 1}


# --- Matlis duality and dagger --------------------------------------------

def test_matlis_dual_table():
    t = CohomologyTable("cohomological", B1, (0, 0), {(0, (d,)): 1 for d in range(0, 5)})
    u = matlis_dual(t)
    assert u.entries == {(0, (d,)): 1 for d in range(-4, 1)}
    assert matlis_dual(u).entries == t.entries


def test_matlis_dual_of_finite_length_module():
    from formalcoh.complexes import as_complex
    C = matlis_dual(as_complex(quo(R1, (1,))))
    assert homology_table(C, B1).entries == {(0, (0,)): 1}


def test_dagger_examples():
    # S† = S(-1,-1) sitting in homological degree 2
    assert homology_table(dagger(S2), B2).entries == \
        {(2, d): 1 for d in B2.degrees() if d[0] >= 1 and d[1] >= 1}
    assert homology_table(dagger(quo(R2, X, Y)), B2).entries == {(0, (0, 0)): 1}
    t = homology_table(dagger(quo(R2, X)), B2)
    assert t.nonzero_indices() == [1]


def test_dagger_rejects_non_free():
    with pytest.raises(InvalidInput):
        dagger(cech(x1, R1))


# --- Tate cohomology ---------------------------------------------------------

def test_tate_les_exact_and_shift():
    TD = TateData(x1, S1, 14)
    for d in B1.degrees():
        for i in range(-2, 3):
            for name, dim, rin, rout in TD.les_nodes(i, d):
                assert dim - rout == rin, (name, i, d)
    M = quo(R2, (2, 0), (1, 1))
    T = tate_table(m2, M, B2, 16)
    H = local_cohomology(m2, M, B2)
    for i in range(1, 4):
        for d in B2.degrees():
            assert T.dim(i, d) == H.dim(i + 1, d)


def test_rgamma_zero_is_input():
    from formalcoh.complexes import as_complex
    P = as_complex(S2)
    assert rgamma(MonomialIdeal(2), P) is P


@pytest.mark.parametrize("p", [2, 3])
def test_routes_agree_in_positive_characteristic(p):
    from formalcoh.linalg import FieldSpec
    R = RingSpec(2, FieldSpec(p))
    M = ModulePresentation.quotient(R, MonomialIdeal(2, [(2, 0), (1, 1)]))
    box = DegreeBox.cube(2, -2, 2)
    L = limit_formula(x2, M, box, 16)
    assert L.entries == duality_formula(x2, M, box).entries == formal_table(x2, m2, M, box, 16).entries


@pytest.mark.parametrize("I,a,frozen", [
    ([X], [X], {(1, (0, d2)): 1 for d2 in range(-3, 0)}),
    ([(2, 0), (1, 1)], [X], {(0, (1, 0)): 1, **{(1, (0, d2)): 1 for d2 in range(-3, 0)}}),
    ([Y], [(1, 1)], {(1, (d1, 0)): 1 for d1 in range(-3, 0)}),
])
def test_formal_cohomology_of_quotients_frozen(I, a, frozen):
    M = ModulePresentation.quotient(R2, MonomialIdeal(2, I))
    assert formal_table(MonomialIdeal(2, a), m2, M, B2, 16).entries == frozen
