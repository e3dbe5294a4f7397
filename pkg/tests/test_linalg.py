from fractions import Fraction

import pytest

from formalcoh.errors import DimensionMismatch, Inconclusive, InvalidInput
from formalcoh.linalg import (FieldSpec, Matrix, QQ, QuotientSpace, chain_stage, image_basis,
                              kernel_basis, rank, rref, solve, stable_image)


def M(rows, field=QQ):
    return Matrix.from_rows(rows, field)


def test_rank_examples():
    assert rank(Matrix.identity(2)) == 2
    assert rank(Matrix.zero(3, 4)) == 0
    assert rank(M([[1, 2], [2, 4]])) == 1


def test_rank_fractions_and_prime_field():
    assert rank(M([[Fraction(1, 2), 1], [1, 2]])) == 1
    # 2 - 2*1 vanishes only modulo 2... and [[1,1],[1,3]] has det 2
    assert rank(M([[1, 1], [1, 3]])) == 2
    assert rank(M([[1, 1], [1, 3]], FieldSpec(2))) == 1


def test_field_rejects_composite_characteristic():
    with pytest.raises(InvalidInput):
        FieldSpec(4)


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(2)).cols == 0
    assert kernel_basis(Matrix.zero(2, 3)).cols == 3
    k = kernel_basis(M([[1, 1]]))
    assert k.cols == 1
    v = [k[0, 0], k[1, 0]]
    assert v[0] == -v[1] and v[0] != 0


def test_image_examples():
    assert image_basis(Matrix.identity(2)).cols == 2
    assert image_basis(Matrix.zero(2, 2)).cols == 0
    im = image_basis(M([[1], [2]]))
    assert im.cols == 1 and im[1, 0] == 2 * im[0, 0]


def test_matmul_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Matrix.identity(2) @ Matrix.identity(3)


def test_solve_and_rref():
    a = M([[1, 2], [3, 4]])
    x = solve(a, [5, 6])
    assert [sum(a[i, j] * x[j] for j in range(2)) for i in range(2)] == [5, 6]
    assert solve(M([[1, 1], [1, 1]]), [1, 2]) is None
    R, piv = rref(M([[0, 2], [1, 1]]))
    assert piv == [0, 1]


def test_quotient_space():
    Q = QuotientSpace(3, M([[1], [1], [0]]))
    assert Q.dim == 2
    assert Q.reduce([1, 1, 0]) == Q.reduce([0, 0, 0])


def test_stable_image_examples():
    ident = Matrix.identity(2)
    s = stable_image([ident] * 5, plateau=3)
    assert s.dim == 2 and s.stage == 0
    z = Matrix.zero(2, 2)
    s = stable_image([z] * 5, plateau=3)
    assert s.dim == 0 and s.stage == 1
    one, zero = Matrix.identity(1), Matrix.zero(1, 1)
    # V_t = k, maps x1 for t < 5 then x0: chain dims 1,1,1,1,1,0,0,0
    tower = [one] * 4 + [zero] * 4
    s = stable_image(tower, plateau=3)
    assert s.dim == 0
    assert s.dims[:6] == (1, 1, 1, 1, 1, 0)


def test_stable_image_inconclusive_without_plateau():
    one, zero = Matrix.identity(1), Matrix.zero(1, 1)
    with pytest.raises(Inconclusive):
        stable_image([one, one, zero], plateau=3)


def test_chain_stage():
    assert chain_stage([3, 2, 2, 2], 3) == 1
    assert chain_stage([3, 2, 1], 3) is None
