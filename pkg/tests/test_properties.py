"""Randomized identities: exact rank, rank-nullity, d∘d = 0, Euler characteristic."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from formalcoh.complexes import (Atom, AtomComplex, DegreeBox, cone, multiplication_map,
                                 square_zero_failure, tensor)
from formalcoh.linalg import (FieldSpec, Matrix, _bareiss_rank, kernel_basis, rank, rref,
                              sparse_rank)
from formalcoh.monomial import RingSpec

small = st.integers(min_value=-4, max_value=4)


@st.composite
def int_matrices(draw):
    r = draw(st.integers(0, 6))
    c = draw(st.integers(0, 6))
    return [[draw(small) for _ in range(c)] for _ in range(r)], c


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_bareiss_matches_rref(mc):
    rows, c = mc
    m = Matrix.from_rows(rows, cols=c)
    assert _bareiss_rank([list(r) for r in rows], c) == len(rref(m)[1])


@settings(max_examples=100, deadline=None)
@given(int_matrices(), st.sampled_from([0, 2, 3, 5]))
def test_rank_nullity(mc, p):
    rows, c = mc
    m = Matrix.from_rows(rows, FieldSpec(p), cols=c)
    K = kernel_basis(m)
    assert rank(m) + K.cols == c
    if K.cols and m.rows:
        assert (m @ K).is_zero()


@settings(max_examples=100, deadline=None)
@given(int_matrices(), st.sampled_from([0, 2, 3, 5]))
def test_sparse_rank_matches_dense(mc, p):
    rows, c = mc
    field = FieldSpec(p)
    sparse = [{j: field.coerce(v) for j, v in enumerate(r) if field.coerce(v)} for r in rows]
    assert sparse_rank(sparse, field) == rank(Matrix.from_rows(rows, field, cols=c))


# --- random scalar-monomial complexes ------------------------------------------

N = 2
RING = RingSpec(N)
exps = st.tuples(*[st.integers(0, 2)] * N)
scalars = st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(lambda q: q != 0)


@st.composite
def two_term(draw):
    """S_sigma(-g) --λ x^g--> S_sigma in homological degrees 1, 0."""
    g = draw(exps)
    sigma = frozenset(draw(st.sets(st.integers(0, N - 1), max_size=N)))
    lam = draw(scalars)
    return AtomComplex(RING, {0: [Atom(sigma, (0,) * N)], 1: [Atom(sigma, g)]}, {1: {(0, 0): lam}})


@st.composite
def random_complex(draw):
    factors = draw(st.lists(two_term(), min_size=1, max_size=3))
    C = factors[0]
    for F in factors[1:]:
        C = tensor(C, F)
    if draw(st.booleans()):
        C = cone(multiplication_map(C, draw(exps)))
    return C


BOX = DegreeBox.cube(N, -2, 3)


@settings(max_examples=100, deadline=None)
@given(random_complex())
def test_square_zero_and_euler_characteristic(C):
    assert square_zero_failure(C, BOX) is None
    for d in BOX.degrees():
        chi_c = sum((-1) ** i * C.dim(i, d) for i in range(C.lo, C.hi + 1))
        chi_h = sum((-1) ** i * C.homology_dim(i, d) for i in range(C.lo, C.hi + 1))
        assert chi_c == chi_h
