import pytest

from formalcoh.complexes import DegreeBox, homology_table
from formalcoh.errors import InvalidInput
from formalcoh.monomial import (NEG_INF, ModulePresentation, MonomialIdeal, RingSpec, basis_at,
                                height, ideal_power, krull_dim, module_support, syzygy_resolution,
                                taylor_resolution)

R1, R2 = RingSpec(1), RingSpec(2)
X, Y = (1, 0), (0, 1)


def I2(*g):
    return MonomialIdeal(2, g)


def test_ideal_power():
    assert ideal_power(MonomialIdeal(1, [(1,)]), 3) == MonomialIdeal(1, [(3,)])
    assert ideal_power(I2(X, Y), 2) == I2((2, 0), (1, 1), (0, 2))
    assert ideal_power(MonomialIdeal(2), 4).is_zero()


def test_generators_are_minimalized():
    assert I2((2, 0), (1, 0), (1, 1)) == I2(X)


def test_support_and_dim():
    S = ModulePresentation.free(R2)
    assert module_support(S) == [frozenset()]
    assert module_support(ModulePresentation.quotient(R2, I2(X))) == [frozenset({0})]
    assert module_support(ModulePresentation.quotient(R2, I2(X, Y))) == [frozenset({0, 1})]
    assert krull_dim(S) == 2
    assert krull_dim(ModulePresentation.quotient(R2, I2(X))) == 1
    assert krull_dim(ModulePresentation.quotient(R2, I2((0, 0)))) == NEG_INF


def test_height():
    assert height(I2(X)) == 1
    assert height(I2(X, Y)) == 2
    assert height(I2((1, 1))) == 1


def test_taylor_resolution():
    T = taylor_resolution(MonomialIdeal(1, [(1,)]), R1)
    assert T.ranks() == [1, 1]
    T = taylor_resolution(I2(X, Y), R2)
    assert T.ranks() == [1, 2, 1] and list(T.shifts[2]) == [(1, 1)]
    T = taylor_resolution(I2((2, 0), (1, 1)), R2)
    assert T.ranks() == [1, 2, 1] and list(T.shifts[2]) == [(2, 1)]


def test_syzygy_resolution():
    assert syzygy_resolution(ModulePresentation.free(R2)).length == 0
    r = syzygy_resolution(ModulePresentation.quotient(R1, MonomialIdeal(1, [(1,)])))
    assert r.ranks() == [1, 1]
    coker = ModulePresentation(R2, [(0, 0)], [(X, {0: 1}), (Y, {0: 1})])
    assert syzygy_resolution(coker).ranks() == [1, 2, 1]


def test_resolution_is_exact_with_correct_cokernel():
    M = ModulePresentation.quotient(R2, I2((2, 0), (1, 1)))
    C = syzygy_resolution(M).complex()
    t = homology_table(C, DegreeBox.cube(2, -1, 3))
    assert t.nonzero_indices() == [0]
    for d in DegreeBox.cube(2, -1, 3).degrees():
        assert t.dim(0, d) == basis_at(M, d).dim


def test_graded_pieces():
    assert basis_at(ModulePresentation.quotient(R1, MonomialIdeal(1, [(1,)])), (0,)).dim == 1
    assert basis_at(ModulePresentation.quotient(R1, MonomialIdeal(1, [(1,)])), (1,)).dim == 0
    assert basis_at(ModulePresentation.free(R2, [X]), X).dim == 1
    M = ModulePresentation.quotient(R2, I2((2, 0), (1, 1)))
    assert basis_at(M, (1, 0)).dim == 1 and basis_at(M, (2, 0)).dim == 0


def test_relation_must_have_nonnegative_exponents():
    with pytest.raises(InvalidInput):
        ModulePresentation(R2, [(1, 0)], [((0, 1), {0: 1})])
