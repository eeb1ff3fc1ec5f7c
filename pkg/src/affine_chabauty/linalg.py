"""Exact rational matrices and precision-aware linear algebra over Qp."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotSymmetric, PrecisionLoss
from .padics import INF, PadicNumber


class RationalMatrix:
    """Dense matrix over Q with exact arithmetic."""

    def __init__(self, rows):
        self.rows = [[Fraction(x) for x in r] for r in rows]
        self.m = len(self.rows)
        self.n = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.n for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n):
        return cls([[Fraction(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def transpose(self):
        return RationalMatrix([[self.rows[i][j] for i in range(self.m)] for j in range(self.n)])

    def __mul__(self, other):
        if isinstance(other, RationalMatrix):
            assert self.n == other.m
            return RationalMatrix([
                [sum(self.rows[i][k] * other.rows[k][j] for k in range(self.n))
                 for j in range(other.n)]
                for i in range(self.m)])
        return RationalMatrix([[x * Fraction(other) for x in r] for r in self.rows])

    def __sub__(self, other):
        return RationalMatrix([[a - b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def is_symmetric(self):
        return self.m == self.n and all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.m) for j in range(i))

    def matvec(self, v):
        return [sum(self.rows[i][j] * Fraction(v[j]) for j in range(self.n))
                for i in range(self.m)]

    def rref(self):
        """Reduced row echelon form; returns (rref rows, pivot columns)."""
        a = [row[:] for row in self.rows]
        piv_cols = []
        r = 0
        for c in range(self.n):
            piv = next((i for i in range(r, self.m) if a[i][c] != 0), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            inv = 1 / a[r][c]
            a[r] = [x * inv for x in a[r]]
            for i in range(self.m):
                if i != r and a[i][c] != 0:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            piv_cols.append(c)
            r += 1
            if r == self.m:
                break
        return a, piv_cols

    def rank(self):
        return len(self.rref()[1])

    def inverse(self):
        assert self.m == self.n
        aug = RationalMatrix([row + list(ident_row) for row, ident_row in
                              zip(self.rows, RationalMatrix.identity(self.n).rows)])
        red, piv = aug.rref()
        if piv != list(range(self.n)):
            raise ZeroDivisionError("singular matrix")
        return RationalMatrix([row[self.n:] for row in red])

    def __repr__(self):
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows)


def moore_penrose(M: RationalMatrix) -> RationalMatrix:
    """Exact Moore-Penrose pseudoinverse of a symmetric rational matrix.

    Uses the full-rank factorization M = B C with B the pivot columns and C
    the nonzero rows of the reduced echelon form; then
    M+ = C^T (C C^T)^(-1) (B^T B)^(-1) B^T.
    """
    if not M.is_symmetric():
        raise NotSymmetric("pseudoinverse input must be symmetric")
    red, piv_cols = M.rref()
    r = len(piv_cols)
    if r == 0:
        return RationalMatrix([[Fraction(0)] * M.m for _ in range(M.n)])
    B = RationalMatrix([[M.rows[i][c] for c in piv_cols] for i in range(M.m)])
    C = RationalMatrix(red[:r])
    Bt = B.transpose()
    Ct = C.transpose()
    left = Ct * (C * Ct).inverse()
    right = (Bt * B).inverse() * Bt
    return left * right


@dataclass
class PadicKernel:
    basis: list            # kernel vectors, each a list of PadicNumber
    rank: int
    loss: int              # worst pivot valuation encountered (precision digits lost)


PIVOT_GUARD = 2  # entries within this many digits of their precision cannot pivot


def padic_kernel(rows, guard: int = PIVOT_GUARD) -> PadicKernel:
    """Kernel basis of a matrix over Qp by echelon reduction.

    Pivots are chosen with minimal valuation (maximal p-adic size) to control
    precision loss.  Kernel vectors are normalized so that their first entry
    of minimal valuation is exactly 1.  Raises PrecisionLoss when the rank is
    not certifiable at the working precision.
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    p = next((x.p for r in a for x in r if isinstance(x, PadicNumber)), None)
    if p is None:
        raise ValueError("empty matrix")
    piv_cols: list[int] = []
    piv_rows: list[int] = []
    loss = 0
    free_rows = list(range(m))
    for _ in range(min(m, n)):
        best = None
        for i in free_rows:
            for j in range(n):
                if j in piv_cols:
                    continue
                x = a[i][j]
                if x.is_zero():
                    continue
                if best is None or x.v < best[2]:
                    best = (i, j, x.v)
        if best is None:
            break
        i0, j0, v0 = best
        pivot = a[i0][j0]
        if pivot.N - pivot.v <= guard:
            raise PrecisionLoss(
                f"pivot candidate at ({i0},{j0}) has only {pivot.N - pivot.v} digits")
        loss = max(loss, v0)
        piv_cols.append(j0)
        piv_rows.append(i0)
        free_rows.remove(i0)
        inv = pivot.inverse()
        for i in range(m):
            if i == i0 or a[i][j0].is_zero():
                continue
            f = a[i][j0] * inv
            a[i] = [x - f * y for x, y in zip(a[i], a[i0])]
    # remaining rows must be indistinguishable from zero
    for i in free_rows:
        for x in a[i]:
            if not x.is_zero():
                raise PrecisionLoss("residual row is nonzero after elimination")
    rank = len(piv_cols)
    one_prec = max((x.N for r in a for x in r if x.N < INF), default=12) + 4
    basis = []
    for jf in range(n):
        if jf in piv_cols:
            continue
        vec = [None] * n
        vec[jf] = PadicNumber.from_int(1, p, one_prec)  # exact by choice of representative
        for k, i in enumerate(piv_rows):
            vec[piv_cols[k]] = -(a[i][jf] / a[i][piv_cols[k]])
        for j in range(n):
            if vec[j] is None:
                vec[j] = PadicNumber.exact_zero(p)
        basis.append(_normalize_kernel_vector(vec))
    return PadicKernel(basis=basis, rank=rank, loss=loss)


def _normalize_kernel_vector(vec):
    vmin, idx = INF, None
    for j, x in enumerate(vec):
        if not x.is_zero() and x.v < vmin:
            vmin, idx = x.v, j
    if idx is None:
        return vec
    inv = vec[idx].inverse()
    out = []
    for j, x in enumerate(vec):
        if j == idx:
            out.append(PadicNumber.from_int(1, x.p, max(x.N - x.v, 2)))
        else:
            out.append(x * inv)
    return out


def padic_solve(rows, rhs, guard: int = PIVOT_GUARD):
    """Solve A x = b over Qp for square nonsingular A (same pivoting rules)."""
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    n = len(a)
    perm_cols: list[int] = []
    used_rows: list[int] = []
    for _ in range(n):
        best = None
        for i in range(n):
            if i in used_rows:
                continue
            for j in range(n):
                if j in perm_cols:
                    continue
                x = a[i][j]
                if x.is_zero():
                    continue
                if best is None or x.v < best[2]:
                    best = (i, j, x.v)
        if best is None:
            raise PrecisionLoss("matrix is singular to working precision")
        i0, j0, _ = best
        used_rows.append(i0)
        perm_cols.append(j0)
        inv = a[i0][j0].inverse()
        for i in range(n):
            if i == i0 or a[i][j0].is_zero():
                continue
            f = a[i][j0] * inv
            a[i] = [x - f * y for x, y in zip(a[i], a[i0])]
    x = [None] * n
    for i0, j0 in zip(used_rows, perm_cols):
        x[j0] = a[i0][n] / a[i0][j0]
    return x


def padic_det(rows):
    """Determinant over Qp with min-valuation pivoting."""
    a = [list(r) for r in rows]
    n = len(a)
    p = a[0][0].p
    prec0 = max((x.N for r in a for x in r if x.N < INF), default=12) + 8
    det = PadicNumber.from_int(1, p, prec0)
    sign = 1
    used = []
    perm = []
    for _ in range(n):
        best = None
        for i in range(n):
            if i in used:
                continue
            for j in range(n):
                if j in perm:
                    continue
                x = a[i][j]
                if x.is_zero():
                    continue
                if best is None or x.v < best[2]:
                    best = (i, j, x.v)
        if best is None:
            # remaining block indistinguishable from zero: det is a zero class
            prec = min(x.N for i in range(n) for x in a[i] if i not in used)
            out = PadicNumber.unknown_zero(p, prec)
            for i0, j0 in zip(used, perm):
                out = out * a[i0][j0]
            return out
        i0, j0, _ = best
        used.append(i0)
        perm.append(j0)
        inv = a[i0][j0].inverse()
        for i in range(n):
            if i in used or a[i][j0].is_zero():
                continue
            f = a[i][j0] * inv
            a[i] = [x - f * y for x, y in zip(a[i], a[i0])]
    for i0, j0 in zip(used, perm):
        det = det * a[i0][j0]
    # parity of the permutation row->col
    order = [perm[used.index(i)] for i in sorted(used)]
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        ln, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = order[j]
            ln += 1
        if ln % 2 == 0:
            sign = -sign
    return det * sign
