"""Exact matrix algebra over a supported ring.

Smith normal form with recorded transforms and their inverses, linear
solving with ring-divisibility, kernel bases, and cokernel invariants.
Matrices are immutable row-major tuples; every operation returns a new
matrix with canonical entries.

Over the localized integer rings the normal form is computed by clearing
denominators (the scale is a unit), running an integer reduction with
pivoting on the entry of minimal unit-normalized size (ties broken by
position), and folding the leftover diagonal units into the left
transform.  Entry growth is accepted; everything stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from .errors import ShapeMismatch
from .rings import Ring, _odd_part, _p_valuation


@dataclass(frozen=True)
class Matrix:
    ring: Ring
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ShapeMismatch("entry grid does not match declared shape")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def make(ring: Ring, data) -> "Matrix":
        rows = [[ring.el(x) for x in row] for row in data]
        ncols = len(rows[0]) if rows else 0
        return Matrix(ring, len(rows), ncols, tuple(tuple(r) for r in rows))

    @staticmethod
    def from_shape(ring: Ring, rows: int, cols: int, data) -> "Matrix":
        if rows and not cols:
            return Matrix(ring, rows, 0, tuple(() for _ in range(rows)))
        if not rows:
            return Matrix(ring, 0, cols, ())
        m = Matrix.make(ring, data)
        if (m.rows, m.cols) != (rows, cols):
            raise ShapeMismatch(f"expected {rows}x{cols}, got {m.rows}x{m.cols}")
        return m

    @staticmethod
    def zeros(ring: Ring, rows: int, cols: int) -> "Matrix":
        z = ring.zero
        return Matrix(ring, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(ring: Ring, n: int) -> "Matrix":
        o, z = ring.one, ring.zero
        return Matrix(ring, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    # -- basic queries ------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_zero(self) -> bool:
        z = self.ring.zero
        return all(x == z for row in self.entries for x in row)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == Matrix.identity(self.ring, self.rows)

    def column(self, j: int) -> "Matrix":
        return Matrix(self.ring, self.rows, 1, tuple((row[j],) for row in self.entries))

    def select_columns(self, js) -> "Matrix":
        return Matrix(self.ring, self.rows, len(js), tuple(tuple(row[j] for j in js) for row in self.entries))

    def select_rows(self, iis) -> "Matrix":
        return Matrix(self.ring, len(iis), self.cols, tuple(self.entries[i] for i in iis))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        add = self.ring.add
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(add(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        sub = self.ring.sub
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(sub(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(neg(a) for a in row) for row in self.entries))

    def scale(self, c) -> "Matrix":
        c = self.ring.el(c)
        mul = self.ring.mul
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(mul(c, a) for a in row) for row in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ring = self.ring
        if self.cols == 0:
            return Matrix.zeros(ring, self.rows, other.cols)
        if ring.kind == "fp":
            p = ring.p
            ot = list(zip(*other.entries)) if other.cols else []
            data = tuple(tuple(sum(a * b for a, b in zip(row, col)) % p for col in ot)
                         for row in self.entries)
        else:
            ot = list(zip(*other.entries)) if other.cols else []
            data = tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in ot)
                         for row in self.entries)
        return Matrix(ring, self.rows, other.cols, data)

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else
                      tuple(() for _ in range(self.cols)))

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols) or self.ring != other.ring:
            raise ShapeMismatch("shape or ring mismatch")


def hstack(*ms: Matrix) -> Matrix:
    ms = [m for m in ms]
    rows = ms[0].rows
    if any(m.rows != rows for m in ms):
        raise ShapeMismatch("hstack needs equal row counts")
    data = tuple(tuple(x for m in ms for x in m.entries[i]) for i in range(rows))
    return Matrix(ms[0].ring, rows, sum(m.cols for m in ms), data)


def vstack(*ms: Matrix) -> Matrix:
    cols = ms[0].cols
    if any(m.cols != cols for m in ms):
        raise ShapeMismatch("vstack needs equal column counts")
    return Matrix(ms[0].ring, sum(m.rows for m in ms), cols,
                  tuple(row for m in ms for row in m.entries))


def block_diag(*ms: Matrix) -> Matrix:
    ring = ms[0].ring
    rows = sum(m.rows for m in ms)
    cols = sum(m.cols for m in ms)
    out = [[ring.zero] * cols for _ in range(rows)]
    ro = co = 0
    for m in ms:
        for i in range(m.rows):
            for j in range(m.cols):
                out[ro + i][co + j] = m.entries[i][j]
        ro += m.rows
        co += m.cols
    return Matrix(ring, rows, cols, tuple(tuple(r) for r in out))


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ M @ V == D with U, V invertible and D diagonal.

    ``diagonal`` lists the canonical unit-normalized diagonal entries (zeros
    included); ``invariant_factors`` are the nonzero ones.  Explicit inverses
    of the transforms are carried along.
    """
    U: Matrix
    D: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix
    diagonal: tuple
    invariant_factors: tuple

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


# -- integer reduction core --------------------------------------------------


def _round_div(b: int, a: int) -> int:
    q, r = divmod(b, a)
    if 2 * abs(r) > abs(a):
        q += 1
    return q


def _int_pivot_key(ring: Ring, x: int):
    if ring.kind == "zloc":
        return (ring.p ** _p_valuation(x, ring.p), abs(x))
    if ring.kind == "z-half":
        return (_odd_part(x), abs(x))
    return (1, 1)  # fields: any nonzero entry is as good as any other


def _int_ring_divides(ring: Ring, a: int, b: int) -> bool:
    if ring.is_field():
        return True
    if ring.kind == "zloc":
        return _p_valuation(a, ring.p) <= _p_valuation(b, ring.p) if b else True
    return b % _odd_part(a) == 0


class _Transforms:
    """Row/column operation tracker; arithmetic is injected so the integer
    path uses raw ints and the field path stays reduced."""

    def __init__(self, n, m, add, sub, mul):
        self.add, self.sub, self.mul = add, sub, mul
        self.U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        self.Ui = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        self.V = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
        self.Vi = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def row_swap(self, A, i, j):
        A[i], A[j] = A[j], A[i]
        self.U[i], self.U[j] = self.U[j], self.U[i]
        for r in self.Ui:
            r[i], r[j] = r[j], r[i]

    def col_swap(self, A, i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in self.V:
            row[i], row[j] = row[j], row[i]
        self.Vi[i], self.Vi[j] = self.Vi[j], self.Vi[i]

    def row_add(self, A, i, j, c):
        # row_i += c * row_j ; inverse op on Ui columns
        add, sub, mul = self.add, self.sub, self.mul
        A[i] = [add(a, mul(c, b)) for a, b in zip(A[i], A[j])]
        self.U[i] = [add(a, mul(c, b)) for a, b in zip(self.U[i], self.U[j])]
        for r in self.Ui:
            r[j] = sub(r[j], mul(c, r[i]))

    def col_add(self, A, i, j, c):
        # col_i += c * col_j ; inverse op on Vi rows
        add, sub, mul = self.add, self.sub, self.mul
        for row in A:
            row[i] = add(row[i], mul(c, row[j]))
        for row in self.V:
            row[i] = add(row[i], mul(c, row[j]))
        self.Vi[j] = [sub(a, mul(c, b)) for a, b in zip(self.Vi[j], self.Vi[i])]


def _snf_core(ring: Ring, A: list[list], n: int, m: int, field: bool) -> _Transforms:
    """In-place diagonalization; returns the transform tracker."""
    if field:
        tr = _Transforms(n, m, ring.add, ring.sub, ring.mul)
    else:
        tr = _Transforms(n, m, lambda a, b: a + b, lambda a, b: a - b, lambda a, b: a * b)
    t = 0
    while t < min(n, m):
        # pivot of minimal key, ties by position
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if A[i][j] != 0:
                    k = (1,) if field else _int_pivot_key(ring, A[i][j])
                    if best is None or k < best[0]:
                        best = (k, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            tr.row_swap(A, bi, t)
        if bj != t:
            tr.col_swap(A, bj, t)
        if field:
            pinv = ring.inv(A[t][t])
            for i in range(t + 1, n):
                if A[i][t] != 0:
                    tr.row_add(A, i, t, ring.neg(ring.mul(A[i][t], pinv)))
            for j in range(t + 1, m):
                if A[t][j] != 0:
                    tr.col_add(A, j, t, ring.neg(ring.mul(A[t][j], pinv)))
            t += 1
            continue
        # integer euclid sweep until row and column are clear
        while True:
            dirty = False
            for i in range(t + 1, n):
                if A[i][t] != 0:
                    q = _round_div(A[i][t], A[t][t])
                    if q:
                        tr.row_add(A, i, t, -q)
                    if A[i][t] != 0:
                        tr.row_swap(A, i, t)
                        dirty = True
            for j in range(t + 1, m):
                if A[t][j] != 0:
                    q = _round_div(A[t][j], A[t][t])
                    if q:
                        tr.col_add(A, j, t, -q)
                    if A[t][j] != 0:
                        tr.col_swap(A, j, t)
                        dirty = True
            if not dirty:
                break
        # enforce ring-divisibility of the pivot into the remaining block
        fixed = True
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if A[i][j] != 0 and not _int_ring_divides(ring, A[t][t], A[i][j]):
                    tr.row_add(A, t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            t += 1
    return tr


@lru_cache(maxsize=100_000)
def smith_normal_form(M: Matrix) -> SmithDecomposition:
    ring = M.ring
    field = ring.is_field()
    if field:
        A = [list(row) for row in M.entries]
        tr = _snf_core(ring, A, M.rows, M.cols, True)
    else:
        scale = lcm(*(x.denominator for row in M.entries for x in row)) if M.rows and M.cols else 1
        A = [[int(x * scale) for x in row] for row in M.entries]
        tr = _snf_core(ring, A, M.rows, M.cols, False)

    # unit-normalize the diagonal, folding units into U (and U_inv)
    n, m = M.rows, M.cols
    U = [[ring.el(x) for x in row] for row in tr.U]
    Ui = [[ring.el(x) for x in row] for row in tr.Ui]
    diag = []
    for t in range(min(n, m)):
        x = ring.el(A[t][t]) if field else ring.el(Fraction(A[t][t], scale))
        if x == ring.zero:
            diag.append(ring.zero)
            continue
        c = ring.canonical_factor(x)
        u = ring.exact_div(x, c)
        uinv = ring.inv(u)
        U[t] = [ring.mul(uinv, a) for a in U[t]]
        for r in Ui:
            r[t] = ring.mul(u, r[t])
        diag.append(c)
    Dm = Matrix(ring, n, m,
                tuple(tuple(diag[i] if i == j and i < len(diag) else ring.zero
                            for j in range(m)) for i in range(n)))
    dec = SmithDecomposition(
        U=Matrix.make(ring, U) if n else Matrix.zeros(ring, 0, 0),
        D=Dm,
        V=Matrix.make(ring, tr.V) if m else Matrix.zeros(ring, 0, 0),
        U_inv=Matrix.make(ring, Ui) if n else Matrix.zeros(ring, 0, 0),
        V_inv=Matrix.make(ring, tr.Vi) if m else Matrix.zeros(ring, 0, 0),
        diagonal=tuple(diag),
        invariant_factors=tuple(x for x in diag if x != ring.zero),
    )
    return dec


# -- derived operations -------------------------------------------------------


def solve_matrix(M: Matrix, B: Matrix) -> Matrix | None:
    """Some X with M @ X == B over the ring, or None when unsolvable."""
    if M.rows != B.rows or M.ring != B.ring:
        raise ShapeMismatch("solve needs matching row counts")
    ring = M.ring
    dec = smith_normal_form(M)
    C = dec.U @ B
    k = min(M.rows, M.cols)
    Y = [[ring.zero] * B.cols for _ in range(M.cols)]
    for i in range(M.rows):
        d = dec.diagonal[i] if i < k else ring.zero
        for j in range(B.cols):
            c = C.entries[i][j]
            if d == ring.zero:
                if c != ring.zero:
                    return None
            else:
                if not ring.divides(d, c):
                    return None
                Y[i][j] = ring.exact_div(c, d)
    X = dec.V @ Matrix.make(ring, Y) if M.cols else Matrix.zeros(ring, 0, B.cols)
    return X


def solve_linear(M: Matrix, b: Matrix) -> Matrix | None:
    """Column-vector version of solve_matrix."""
    return solve_matrix(M, b)


def kernel_basis(M: Matrix) -> Matrix:
    """Columns form a module basis of ker(M); free over the supported rings."""
    dec = smith_normal_form(M)
    k = min(M.rows, M.cols)
    free = [j for j in range(M.cols) if j >= k or dec.diagonal[j] == M.ring.zero]
    return dec.V.select_columns(free)


def column_span_basis(M: Matrix) -> Matrix:
    """Columns form a basis of the column span of M (a free submodule)."""
    ring = M.ring
    dec = smith_normal_form(M)
    cols = []
    for i, f in enumerate(dec.diagonal):
        if f != ring.zero:
            cols.append([ring.mul(f, dec.U_inv.entries[r][i]) for r in range(M.rows)])
    if not cols:
        return Matrix.zeros(ring, M.rows, 0)
    return Matrix.make(ring, [list(r) for r in zip(*cols)])


def cokernel_invariants(M: Matrix) -> tuple[int, tuple]:
    """(free rank, nonunit invariant factors) of coker(M)."""
    ring = M.ring
    dec = smith_normal_form(M)
    factors = tuple(f for f in dec.invariant_factors if not ring.is_unit(f))
    return M.rows - len(dec.invariant_factors), factors


def is_invertible(M: Matrix) -> bool:
    if M.rows != M.cols:
        return False
    dec = smith_normal_form(M)
    return len(dec.invariant_factors) == M.rows and all(M.ring.is_unit(f) for f in dec.invariant_factors)


def inverse(M: Matrix) -> Matrix:
    if not is_invertible(M):
        raise ShapeMismatch("matrix is not invertible over its ring")
    dec = smith_normal_form(M)
    # U M V = I  =>  M^{-1} = V U
    return dec.V @ dec.U
