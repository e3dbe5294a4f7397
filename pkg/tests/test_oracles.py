"""Frozen values checked against the independent brute-force oracles.

The engine tests compare against the same frozen literals, so a value is
trusted only when oracle and engine reach it separately.
"""

from itertools import product

import pytest

from oracles import formal_limit_dim, koszul_homology_dim, local_cohomology_dim
from test_derived import F_X_M_S2, H_M_S2

X, Y = (1, 0), (0, 1)
BOX2 = [d for d in product(range(-3, 4), repeat=2)]


def test_oracle_local_cohomology_of_plane():
    got = {(i, d): v for d in BOX2 for i in range(3) if (v := local_cohomology_dim([], [X, Y], d, i))}
    assert got == H_M_S2


def test_oracle_local_cohomology_of_line():
    got = {(i, d): v for d in product(range(-4, 5)) for i in range(2)
           if (v := local_cohomology_dim([], [(1,)], d, i))}
    assert got == {(1, (d,)): 1 for d in range(-4, 0)}


def test_oracle_formal_cohomology_of_plane():
    got = {(i, d): v for d in BOX2 for i in range(3) if (v := formal_limit_dim([], [X], d, i, t=8))}
    assert got == F_X_M_S2


@pytest.mark.parametrize("I,a,frozen", [
    # a kills S/(x): the tower is constant and the limit is H_m(S/(x))
    ([X], [X], {(1, (0, d2)): 1 for d2 in range(-3, 0)}),
    # S/(x^2, xy): socle x in degree (1,0) survives in F^0
    ([(2, 0), (1, 1)], [X], {(0, (1, 0)): 1, **{(1, (0, d2)): 1 for d2 in range(-3, 0)}}),
    # S/(y) with a = (xy): F^1 along (d1 <= -1, 0)
    ([Y], [(1, 1)], {(1, (d1, 0)): 1 for d1 in range(-3, 0)}),
])
def test_oracle_formal_cohomology_of_quotients(I, a, frozen):
    got = {(i, d): v for d in BOX2 for i in range(3) if (v := formal_limit_dim(I, a, d, i, t=8))}
    assert got == frozen


def test_oracle_koszul_nonregular():
    assert koszul_homology_dim([(2, 0), (1, 1)], (2, 1), 1, 2) == 1
    assert koszul_homology_dim([X, Y], (0, 0), 0, 2) == 1
    assert koszul_homology_dim([X, Y], (1, 1), 1, 2) == 0
