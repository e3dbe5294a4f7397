"""Exact linear algebra over the rationals and prime fields.

Matrices are small (one row/column per basis element of a graded piece), so a
dense list-of-rows layout is used throughout.  Nothing here touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import DimensionMismatch, Inconclusive, InvalidInput


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: characteristic 0 is QQ, a prime p is GF(p)."""

    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if c != 0 and not _is_prime(c):
            raise InvalidInput(f"characteristic must be 0 or prime, got {c}")

    def coerce(self, x):
        if self.characteristic == 0:
            return Fraction(x)
        p = self.characteristic
        x = Fraction(x)
        if x.denominator % p == 0:
            raise InvalidInput(f"{x} is not defined in characteristic {p}")
        return x.numerator * pow(x.denominator, -1, p) % p

    def inv(self, x):
        if self.characteristic == 0:
            return 1 / x
        return pow(x, -1, self.characteristic)

    def __str__(self):
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"


QQ = FieldSpec(0)


class Matrix:
    """Dense exact matrix; ``data`` is a list of rows of field elements."""

    __slots__ = ("rows", "cols", "data", "field")

    def __init__(self, rows: int, cols: int, data=None, field: FieldSpec = QQ):
        self.rows = rows
        self.cols = cols
        self.field = field
        if data is None:
            z = field.coerce(0)
            data = [[z] * cols for _ in range(rows)]
        else:
            data = [[field.coerce(x) for x in row] for row in data]
            if len(data) != rows or any(len(r) != cols for r in data):
                raise DimensionMismatch(f"data does not have shape {rows}x{cols}")
        self.data = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: FieldSpec = QQ, cols: int | None = None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows, field)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int, field: FieldSpec = QQ):
        data = [[col[i] for col in columns] for i in range(nrows)]
        return cls(nrows, len(columns), data, field)

    @classmethod
    def identity(cls, n: int, field: FieldSpec = QQ):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)], field)

    @classmethod
    def zero(cls, rows: int, cols: int, field: FieldSpec = QQ):
        return cls(rows, cols, None, field)

    @classmethod
    def _raw(cls, rows, cols, data, field):
        m = cls.__new__(cls)
        m.rows, m.cols, m.data, m.field = rows, cols, data, field
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def column(self, j):
        return [row[j] for row in self.data]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        return Matrix._raw(self.cols, self.rows, [list(c) for c in zip(*self.data)] if self.rows else
                           [[] for _ in range(self.cols)], self.field)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        p = self.field.characteristic
        zero = self.field.coerce(0)
        ocols = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for row in self.data:
            nz = [(k, a) for k, a in enumerate(row) if a]
            r = []
            for col in ocols:
                s = zero
                for k, a in nz:
                    b = col[k]
                    if b:
                        s += a * b
                r.append(s % p if p else s)
            out.append(r)
        return Matrix._raw(self.rows, other.cols, out, self.field)

    def __neg__(self):
        p = self.field.characteristic
        return Matrix._raw(self.rows, self.cols,
                           [[(-x) % p if p else -x for x in row] for row in self.data], self.field)

    def scaled(self, c) -> "Matrix":
        c = self.field.coerce(c)
        p = self.field.characteristic
        return Matrix._raw(self.rows, self.cols,
                           [[(c * x) % p if p else c * x for x in row] for row in self.data], self.field)

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.data)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self.data})"

    def tolist(self):
        return [list(r) for r in self.data]


def block(blocks: Sequence[Sequence[Matrix]], row_sizes, col_sizes, field: FieldSpec = QQ) -> Matrix:
    """Assemble a block matrix; ``None`` entries are zero blocks."""
    z = field.coerce(0)
    data = []
    for bi, rs in enumerate(row_sizes):
        for r in range(rs):
            row = []
            for bj, cs in enumerate(col_sizes):
                b = blocks[bi][bj]
                row.extend(b.data[r] if b is not None else [z] * cs)
            data.append(row)
    return Matrix._raw(sum(row_sizes), sum(col_sizes), data, field)


def select(m: Matrix, rows=None, cols=None) -> Matrix:
    rows = range(m.rows) if rows is None else rows
    cols = range(m.cols) if cols is None else cols
    data = [[m.data[i][j] for j in cols] for i in rows]
    return Matrix._raw(len(data), len(cols), data, m.field)


# --- elimination ---------------------------------------------------------

def rref(m: Matrix):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    f = m.field
    p = f.characteristic
    a = [list(r) for r in m.data]
    pivots = []
    r = 0
    for c in range(m.cols):
        piv = None
        for i in range(r, m.rows):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = f.inv(a[r][c])
        a[r] = [(x * inv) % p if p else x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c]:
                fac = a[i][c]
                ri = a[r]
                a[i] = [((x - fac * y) % p if p else x - fac * y) for x, y in zip(a[i], ri)]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return a[:r], pivots


def _bareiss_rank(rows: list[list[int]], ncols: int) -> int:
    # fraction-free elimination on integer rows
    a = [list(r) for r in rows if any(r)]
    n = len(a)
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = None
        for i in range(rank, n):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pr = a[rank]
        pc = pr[c]
        for i in range(rank + 1, n):
            ri = a[i]
            fac = ri[c]
            a[i] = [(pc * x - fac * y) // prev for x, y in zip(ri, pr)]
        prev = pc
        rank += 1
        if rank == n:
            break
    return rank


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.field.characteristic == 0:
        rows = []
        for row in m.data:
            den = 1
            for x in row:
                if x.denominator != 1:
                    den = lcm(den, x.denominator)
            rows.append([int(x * den) for x in row])
        return _bareiss_rank(rows, m.cols)
    return len(rref(m)[1])


def sparse_rank(rows, field: FieldSpec = QQ) -> int:
    """Rank of a sparse matrix given as a list of {column: nonzero value} rows.

    Rows are echelonized one at a time against pivots keyed by their leading
    column, shortest rows first; combinatorial differentials stay sparse.
    """
    p = field.characteristic
    pivots = {}
    for row in sorted(rows, key=len):
        r = {c: v for c, v in row.items() if v}
        while r:
            c = min(r)
            piv = pivots.get(c)
            if piv is None:
                if p:
                    inv = pow(int(r[c]), -1, p)
                    pivots[c] = {k: v * inv % p for k, v in r.items()}
                else:
                    lead = r[c]
                    pivots[c] = {k: Fraction(v) / lead for k, v in r.items()}
                break
            f = r[c]
            for k, v in piv.items():
                x = r.get(k, 0) - f * v
                if p:
                    x %= p
                if x:
                    r[k] = x
                else:
                    r.pop(k, None)
    return len(pivots)


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of the null space of ``m``."""
    f = m.field
    R, pivots = rref(m)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    p = f.characteristic
    cols = []
    for j in free:
        v = [f.coerce(0)] * m.cols
        v[j] = f.coerce(1)
        for r, pc in enumerate(pivots):
            x = R[r][j]
            if x:
                v[pc] = (-x) % p if p else -x
        cols.append(v)
    return Matrix._raw(m.cols, len(cols), [[c[i] for c in cols] for i in range(m.cols)], f)


def image_basis(m: Matrix) -> Matrix:
    """A subset of the columns of ``m`` forming a basis of its column space."""
    _, pivots = rref(m) if m.rows else ([], [])
    return select(m, cols=pivots)


def column_space_rref(vectors: Matrix):
    """Row-reduced basis (as rows) of the span of the columns of ``vectors``."""
    return rref(vectors.transpose())


def solve(a: Matrix, b: Sequence):
    """One solution x of a x = b, or None when b is outside the column space."""
    f = a.field
    aug = Matrix._raw(a.rows, a.cols + 1, [list(r) + [f.coerce(v)] for r, v in zip(a.data, b)], f)
    R, pivots = rref(aug)
    if pivots and pivots[-1] == a.cols:
        return None
    x = [f.coerce(0)] * a.cols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][a.cols]
    return x


class QuotientSpace:
    """Coordinates on k^N / W for a subspace W given by spanning columns.

    ``project`` maps ambient vectors to quotient coordinates; ``lift`` sends
    quotient coordinates to representatives (non-pivot coordinate vectors).
    """

    def __init__(self, ambient_dim: int, spanning: Matrix | None, field: FieldSpec = QQ):
        self.field = field
        self.ambient_dim = ambient_dim
        if spanning is None or spanning.cols == 0:
            R, pivots = [], []
        else:
            R, pivots = rref(spanning.transpose())
        self._R = R
        self._pivots = pivots
        pset = set(pivots)
        self.free = [j for j in range(ambient_dim) if j not in pset]
        self.dim = len(self.free)

    def reduce(self, v):
        p = self.field.characteristic
        v = list(v)
        for row, pc in zip(self._R, self._pivots):
            c = v[pc]
            if c:
                v = [(x - c * y) % p if p else x - c * y for x, y in zip(v, row)]
        return v

    def project_matrix(self) -> Matrix:
        f = self.field
        cols = []
        for j in range(self.ambient_dim):
            e = [f.coerce(0)] * self.ambient_dim
            e[j] = f.coerce(1)
            r = self.reduce(e)
            cols.append([r[k] for k in self.free])
        return Matrix._raw(self.dim, self.ambient_dim,
                           [[c[i] for c in cols] for i in range(self.dim)] if cols else
                           [[] for _ in range(self.dim)], f)

    def lift_matrix(self) -> Matrix:
        f = self.field
        data = [[f.coerce(1 if self.free[k] == i else 0) for k in range(self.dim)]
                for i in range(self.ambient_dim)]
        return Matrix._raw(self.ambient_dim, self.dim, data, f)


# --- inverse systems -----------------------------------------------------

@dataclass(frozen=True)
class StableImage:
    basis: Matrix          # columns span the stable image inside V_0
    stage: int             # first stage from which the image chain is constant
    dims: tuple            # dimensions of the image chain, stage 0 = V_0

    @property
    def dim(self):
        return self.basis.cols


def chain_stage(dims: Sequence[int], plateau: int):
    """Index where a weakly decreasing chain last changed, or None if the
    constant tail is shorter than ``plateau`` entries."""
    stage = 0
    for t in range(1, len(dims)):
        if dims[t] != dims[t - 1]:
            stage = t
    if len(dims) - stage < plateau:
        return None
    return stage


def stable_image(tower: Sequence[Matrix], plateau: int = 3, base_dim: int | None = None) -> StableImage:
    """Eventual image in V_0 of a tower V_0 <- V_1 <- V_2 <- ...

    ``tower[t]`` is the matrix of V_{t+1} -> V_t.  The image chain
    im(V_t -> V_0) is descending; the answer is certified once that chain has
    been constant for ``plateau`` consecutive stages at the end of the tower.
    Raises Inconclusive otherwise.
    """
    if plateau < 1:
        raise InvalidInput("plateau must be >= 1")
    for t in range(len(tower) - 1):
        if tower[t].cols != tower[t + 1].rows:
            raise DimensionMismatch(f"map {t} has {tower[t].cols} columns but map {t + 1} has "
                                    f"{tower[t + 1].rows} rows")
    if tower:
        field = tower[0].field
        n0 = tower[0].rows
    else:
        field = QQ
        n0 = base_dim or 0
    if base_dim is not None and tower and base_dim != n0:
        raise DimensionMismatch("base dimension disagrees with the first map")
    comp = Matrix.identity(n0, field)
    dims = [n0]
    images = [comp]
    for f in tower:
        comp = comp @ f
        img = image_basis(comp)
        dims.append(img.cols)
        images.append(img)
    for t in range(1, len(dims)):
        if dims[t] > dims[t - 1]:
            raise AssertionError("image chain is not descending")
    stage = chain_stage(dims, plateau)
    if stage is None:
        raise Inconclusive("stable image", stage=len(dims) - 1, bound=len(tower),
                           detail=f"image dimensions {dims}")
    return StableImage(images[-1], stage, tuple(dims))
