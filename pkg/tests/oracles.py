"""Independent brute-force oracles for frozen test values.

Nothing here imports the engine.  Modules are monomial quotients S/I given
by generator exponent tuples; linear algebra is sympy's.  Everything is
computed on one degree at a time from monomial bases.
"""

from itertools import combinations

import sympy


def rank(rows, ncols):
    if not rows or not ncols:
        return 0
    return sympy.Matrix(rows).rank()


def divides(g, e):
    return all(a <= b for a, b in zip(g, e))


def ideal_power(gens, t, n):
    if t == 0:
        return [tuple([0] * n)]
    out = {tuple([0] * n)}
    for _ in range(t):
        out = {tuple(a + b for a, b in zip(u, g)) for u in out for g in gens}
    return [u for u in out if not any(v != u and divides(v, u) for v in out)]


def in_localized_quotient(I, sigma, d):
    """x^d spans (S/I)_{x_sigma} in degree d (else the piece is zero)."""
    n = len(d)
    if any(d[j] < 0 for j in range(n) if j not in sigma):
        return False
    # x^d * x_sigma^k lies in I for large k iff some generator divides off sigma
    return not any(all(g[j] <= d[j] for j in range(n) if j not in sigma) for g in I)


def cech_pieces(I, a_gens, d):
    """Čech cochain pieces C^p_d: lists of index subsets T with a present basis vector."""
    n = len(d)
    r = len(a_gens)
    pieces = {}
    for p in range(r + 1):
        pieces[p] = []
        for T in combinations(range(r), p):
            sigma = {j for t in T for j in range(n) if a_gens[t][j] > 0}
            if in_localized_quotient(I, sigma, d):
                pieces[p].append(T)
    return pieces


def cech_matrix(pieces, p):
    """C^p -> C^{p+1}, sign (-1)^k for inserting the k-th smallest index."""
    src, tgt = pieces.get(p, []), pieces.get(p + 1, [])
    pos = {T: i for i, T in enumerate(tgt)}
    rows = [[0] * len(src) for _ in tgt]
    for c, T in enumerate(src):
        for U in tgt:
            if set(T) < set(U):
                extra = (set(U) - set(T)).pop()
                k = sorted(U).index(extra)
                rows[pos[U]][c] = (-1) ** k
    return rows


def local_cohomology_dim(I, a_gens, d, i):
    """dim H^i_a(S/I)_d from the Čech complex on the generators of a."""
    pieces = cech_pieces(I, a_gens, d)
    dim = len(pieces.get(i, []))
    out = rank(cech_matrix(pieces, i), dim) if dim and pieces.get(i + 1) else 0
    inc = rank(cech_matrix(pieces, i - 1), len(pieces.get(i - 1, []))) if i > 0 and pieces.get(i - 1) and dim else 0
    return dim - out - inc


def _cocycles_and_coboundaries(I, m_gens, d, i):
    pieces = cech_pieces(I, m_gens, d)
    basis = pieces.get(i, [])
    dout = sympy.Matrix(cech_matrix(pieces, i)) if pieces.get(i + 1) and basis else None
    Z = dout.nullspace() if dout is not None else [sympy.eye(len(basis))[:, k] for k in range(len(basis))]
    B = []
    if i > 0 and pieces.get(i - 1) and basis:
        M = sympy.Matrix(cech_matrix(pieces, i - 1))
        B = [M[:, k] for k in range(M.cols)]
    return basis, Z, B


def formal_limit_dim(I, a_gens, d, i, t, s=3):
    """dim of the image of H^i_m(S/(I + a^(t+s)))_d -> H^i_m(S/(I + a^t))_d.

    For t past the point where the tower stops changing in degree d this is
    the dimension of lim_t H^i_m(M / a^t M)_d.
    """
    n = len(d)
    m_gens = [tuple(1 if k == j else 0 for k in range(n)) for j in range(n)]
    lo = list(I) + ideal_power(a_gens, t, n)
    hi = list(I) + ideal_power(a_gens, t + s, n)
    basis_lo, Z_lo, B_lo = _cocycles_and_coboundaries(lo, m_gens, d, i)
    basis_hi, Z_hi, _ = _cocycles_and_coboundaries(hi, m_gens, d, i)
    if not basis_lo or not Z_hi:
        return 0
    # the projection is the identity on Čech basis vectors present in both
    pos = {T: k for k, T in enumerate(basis_lo)}
    P = sympy.zeros(len(basis_lo), len(basis_hi))
    for c, T in enumerate(basis_hi):
        if T in pos:
            P[pos[T], c] = 1
    images = [P * z for z in Z_hi]
    rb = sympy.Matrix.hstack(*B_lo).rank() if B_lo else 0
    both = sympy.Matrix.hstack(*(images + B_lo)).rank()
    return both - rb


def koszul_homology_dim(gens, d, i, n):
    """dim H_i(K(gens))_d over S = k[x_1..x_n], from monomial bases."""
    r = len(gens)

    def basis(p):
        out = []
        for T in combinations(range(r), p):
            shift = [sum(gens[t][j] for t in T) for j in range(n)]
            if all(d[j] >= shift[j] for j in range(n)):
                out.append(T)
        return out

    def mat(p):
        src, tgt = basis(p), basis(p - 1)
        pos = {T: k for k, T in enumerate(tgt)}
        rows = [[0] * len(src) for _ in tgt]
        for c, T in enumerate(src):
            for k, t in enumerate(T):
                U = T[:k] + T[k + 1:]
                if U in pos:
                    rows[pos[U]][c] = (-1) ** k
        return rows, len(src)

    dim = len(basis(i))
    if not dim:
        return 0
    out = rank(*mat(i)) if i > 0 and basis(i - 1) else 0
    inc = rank(*mat(i + 1)) if i < r and basis(i + 1) else 0
    return dim - out - inc
