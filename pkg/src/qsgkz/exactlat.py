"""Exact integer and rational linear algebra.

Matrices are small (d <= 12), so everything is plain Python ``int`` and
``fractions.Fraction``.  ``IntMatrix`` is an immutable row-major wrapper.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import (
    NotGaleDual,
    NotSaturated,
    QuasiSymmetryViolation,
    ZeroColumn,
    ZeroSumViolation,
)


class IntMatrix:
    __slots__ = ("rows", "shape")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if data:
            widths = {len(r) for r in data}
            if len(widths) != 1:
                raise ValueError("ragged matrix")
            c = widths.pop()
        else:
            c = 0 if ncols is None else ncols
        if ncols is not None and c != ncols:
            raise ValueError("column count mismatch")
        self.rows = data
        self.shape = (len(data), c)

    @classmethod
    def zeros(cls, r, c):
        return cls([[0] * c for _ in range(r)], ncols=c)

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def from_columns(cls, cols, nrows):
        cols = [tuple(c) for c in cols]
        return cls([[c[i] for c in cols] for i in range(nrows)], ncols=len(cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.rows]})"

    @property
    def T(self):
        r, c = self.shape
        return IntMatrix([[self.rows[i][j] for i in range(r)] for j in range(c)], ncols=r)

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def cols(self):
        return [self.col(j) for j in range(self.shape[1])]

    def tolist(self):
        return [list(r) for r in self.rows]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.shape[1] != other.shape[0]:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            oc = other.T.rows
            return IntMatrix(
                [[sum(a * b for a, b in zip(r, c)) for c in oc] for r in self.rows],
                ncols=other.shape[1],
            )
        v = tuple(other)
        if len(v) != self.shape[1]:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def is_identity(self):
        r, c = self.shape
        return r == c and all(self.rows[i][j] == int(i == j) for i in range(r) for j in range(c))


def as_matrix(M) -> IntMatrix:
    if isinstance(M, IntMatrix):
        return M
    M = [list(r) for r in M]
    return IntMatrix(M)


# --------------------------------------------------------------------------
# normal forms


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def hermite_form(M) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.  Returns (H, U) with U @ M == H.

    H is in row echelon form, pivots positive, entries above a pivot reduced
    into [0, pivot).  U is unimodular.
    """
    M = as_matrix(M)
    r, c = M.shape
    H = [list(row) for row in M.rows]
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    piv_row = 0
    for col in range(c):
        if piv_row >= r:
            break
        # euclid down the column
        while True:
            nz = [i for i in range(piv_row, r) if H[i][col] != 0]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(H[i][col]))
            _swap_rows(H, piv_row, k)
            _swap_rows(U, piv_row, k)
            done = True
            for i in range(piv_row + 1, r):
                if H[i][col]:
                    q = H[i][col] // H[piv_row][col]
                    H[i] = [a - q * b for a, b in zip(H[i], H[piv_row])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[piv_row])]
                    if H[i][col]:
                        done = False
            if done:
                break
        if all(H[i][col] == 0 for i in range(piv_row, r)):
            continue
        if H[piv_row][col] < 0:
            H[piv_row] = [-a for a in H[piv_row]]
            U[piv_row] = [-a for a in U[piv_row]]
        p = H[piv_row][col]
        for i in range(piv_row):
            q = H[i][col] // p
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[piv_row])]
                U[i] = [a - q * b for a, b in zip(U[i], U[piv_row])]
        piv_row += 1
    return IntMatrix(H, ncols=c), IntMatrix(U, ncols=r)


def smith_form(M) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form.  Returns (D, U, V) with U @ M @ V == D.

    D is diagonal with nonnegative entries d_1 | d_2 | ... .
    """
    M = as_matrix(M)
    r, c = M.shape
    D = [list(row) for row in M.rows]
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(c)] for i in range(c)]

    def col_op(j, k, q):  # col_j -= q * col_k
        for row in D:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]

    def swap_cols(j, k):
        for row in D:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    t = 0
    while t < min(r, c):
        nz = [(abs(D[i][j]), i, j) for i in range(t, r) for j in range(t, c) if D[i][j]]
        if not nz:
            break
        _, i0, j0 = min(nz)
        _swap_rows(D, t, i0)
        _swap_rows(U, t, i0)
        swap_cols(t, j0)
        while True:
            changed = False
            for i in range(t + 1, r):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    D[i] = [a - q * b for a, b in zip(D[i], D[t])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[t])]
                    if D[i][t]:
                        _swap_rows(D, t, i)
                        _swap_rows(U, t, i)
                        changed = True
            for j in range(t + 1, c):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    col_op(j, t, q)
                    if D[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # divisibility condition on the remaining block
            bad = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if D[i][j] % D[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            D[t] = [a + b for a, b in zip(D[t], D[bad])]
            U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return IntMatrix(D, ncols=c), IntMatrix(U, ncols=r), IntMatrix(V, ncols=c)


@dataclass(frozen=True)
class NormalForms:
    hermite: IntMatrix
    smith: IntMatrix
    transforms: tuple  # (U, V) with U @ M @ V == smith
    hermite_transform: IntMatrix  # U_h with U_h @ M == hermite


def normal_forms(M) -> NormalForms:
    M = as_matrix(M)
    H, Uh = hermite_form(M)
    D, U, V = smith_form(M)
    return NormalForms(hermite=H, smith=D, transforms=(U, V), hermite_transform=Uh)


def elementary_divisors(M) -> list[int]:
    D, _, _ = smith_form(M)
    r, c = D.shape
    return [D[i, i] for i in range(min(r, c)) if D[i, i] != 0]


def int_det(M) -> int:
    """Bareiss fraction-free determinant."""
    M = as_matrix(M)
    n, c = M.shape
    if n != c:
        raise ValueError("square matrix required")
    if n == 0:
        return 1
    A = [list(r) for r in M.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rank(M) -> int:
    M = as_matrix(M)
    H, _ = hermite_form(M)
    return sum(1 for row in H.rows if any(row))


def integer_kernel(M) -> IntMatrix:
    """Rows form a basis of the saturated lattice {x in Z^c : M x = 0}."""
    M = as_matrix(M)
    r, c = M.shape
    H, U = hermite_form(M.T)
    rows = [U.rows[i] for i in range(c) if not any(H.rows[i])]
    return IntMatrix(rows, ncols=c)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def line_key(v: Sequence[int]) -> tuple[int, ...]:
    """Primitive vector spanning the line of v, first nonzero entry positive."""
    p = primitive(v)
    for x in p:
        if x != 0:
            return p if x > 0 else tuple(-y for y in p)
    return p


# --------------------------------------------------------------------------
# rational linear algebra


def rational_solve(M, b) -> list[Fraction] | None:
    """One solution of M x = b over Q (free variables set to 0), or None."""
    M = [[Fraction(x) for x in row] for row in (M.rows if isinstance(M, IntMatrix) else M)]
    r = len(M)
    c = len(M[0]) if r else 0
    aug = [row + [Fraction(bi)] for row, bi in zip(M, b)]
    pivots = []
    pr = 0
    for col in range(c):
        k = next((i for i in range(pr, r) if aug[i][col] != 0), None)
        if k is None:
            continue
        aug[pr], aug[k] = aug[k], aug[pr]
        p = aug[pr][col]
        aug[pr] = [x / p for x in aug[pr]]
        for i in range(r):
            if i != pr and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[pr])]
        pivots.append(col)
        pr += 1
        if pr == r:
            break
    for i in range(pr, r):
        if aug[i][c] != 0:
            return None
    x = [Fraction(0)] * c
    for i, col in enumerate(pivots):
        x[col] = aug[i][c]
    return x


def rational_inverse(M) -> list[list[Fraction]]:
    M = as_matrix(M)
    n = M.shape[0]
    cols = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        x = rational_solve(M, e)
        if x is None:
            raise ZeroDivisionError("singular matrix")
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def rational_kernel_vector(rows: Sequence[Sequence[int]], dim: int) -> tuple[int, ...]:
    """Primitive integer generator of a one-dimensional kernel."""
    K = integer_kernel(IntMatrix(rows, ncols=dim)) if rows else IntMatrix.identity(dim)
    if K.shape[0] != 1:
        raise ValueError("kernel is not one-dimensional")
    return primitive(K.rows[0])


# --------------------------------------------------------------------------
# Gale duality and splittings


def _check_saturated(B: IntMatrix):
    n = B.shape[0]
    divs = elementary_divisors(B)
    if len(divs) != n or any(x != 1 for x in divs):
        raise NotSaturated(f"row lattice of B is not saturated: elementary divisors {divs}")


def gale_dual(B) -> IntMatrix:
    """Canonical Gale dual: Hermite-reduced basis of the integer kernel of B."""
    B = as_matrix(B)
    _check_saturated(B)
    ker = integer_kernel(B)
    if ker.shape[0] == 0:
        return IntMatrix([], ncols=B.shape[1])
    H, _ = hermite_form(ker)
    return IntMatrix([r for r in H.rows if any(r)], ncols=B.shape[1])


@dataclass(frozen=True)
class Splittings:
    S_iota: IntMatrix  # d x n, B S = I
    K: IntMatrix  # d x m, A K = I, S^T K = 0
    P: IntMatrix  # m x d, P = K^T


def _iota_section(B: IntMatrix) -> IntMatrix:
    n, d = B.shape
    # lowest column indices first: a unimodular n-subset gives a sparse section
    for I in itertools.combinations(range(d), n):
        sub = IntMatrix([[B[i, j] for j in I] for i in range(n)], ncols=n)
        if abs(int_det(sub)) == 1:
            inv = rational_inverse(sub)
            S = [[0] * n for _ in range(d)]
            for a, j in enumerate(I):
                for b in range(n):
                    S[j][b] = int(inv[a][b])
            return IntMatrix(S, ncols=n)
    D, U, V = smith_form(B)
    Vn = IntMatrix([r[:n] for r in V.rows], ncols=n)
    return Vn @ U


def choose_splittings(B, A) -> Splittings:
    B = as_matrix(B)
    A = as_matrix(A)
    n, d = B.shape
    m = A.shape[0]
    S = _iota_section(B)
    Q = IntMatrix(list(S.T.rows) + list(A.rows), ncols=d)
    Qinv = rational_inverse(Q)
    if any(x.denominator != 1 for row in Qinv for x in row):
        raise NotGaleDual("[S^T; A] is not unimodular")
    K = IntMatrix([[int(Qinv[i][n + j]) for j in range(m)] for i in range(d)], ncols=m)
    return Splittings(S_iota=S, K=K, P=K.T)


# --------------------------------------------------------------------------
# validated configuration


@dataclass(frozen=True)
class WeightConfig:
    B: IntMatrix
    A: IntMatrix
    S_iota: IntMatrix
    K: IntMatrix
    P: IntMatrix
    h_cov: tuple[int, ...]
    quasi_symmetric: bool
    lattice_surjective: bool
    zero_sum: bool
    name: str = ""

    @property
    def n(self):
        return self.B.shape[0]

    @property
    def d(self):
        return self.B.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def b(self):
        return self.B.cols()

    @property
    def a(self):
        return self.A.cols()

    def decompose(self, chi: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """chi in Z^d -> (B chi, P chi)."""
        return self.B @ chi, self.P @ chi

    def iota(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.S_iota @ v

    def to_dict(self):
        return {
            "name": self.name,
            "B": self.B.tolist(),
            "A": self.A.tolist(),
            "S_iota": self.S_iota.tolist(),
            "K": self.K.tolist(),
            "P": self.P.tolist(),
            "h_cov": list(self.h_cov),
            "flags": {
                "quasi_symmetric": self.quasi_symmetric,
                "lattice_surjective": self.lattice_surjective,
                "zero_sum": self.zero_sum,
            },
        }


def line_groups(B) -> dict[tuple[int, ...], list[int]]:
    B = as_matrix(B)
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, col in enumerate(B.cols()):
        groups.setdefault(line_key(col), []).append(i)
    return groups


def _check_gale_pair(B: IntMatrix, A: IntMatrix):
    n, d = B.shape
    if A.shape[1] != d or A.shape[0] != d - n:
        raise NotGaleDual(f"A has shape {A.shape}, expected {(d - n, d)}")
    if any(x != 0 for row in (A @ B.T).rows for x in row):
        raise NotGaleDual("A B^T != 0")
    divs = elementary_divisors(A)
    if len(divs) != d - n or any(x != 1 for x in divs):
        raise NotGaleDual(f"A is not surjective onto Z^m: elementary divisors {divs}")


def validate_config(B, A=None, name: str = "") -> WeightConfig:
    """Validate B and derive the Gale dual and splittings.

    ``A`` may be supplied to pin a particular Gale dual; it is checked, not
    trusted.
    """
    B = as_matrix(B)
    n, d = B.shape
    if n == 0 or d == 0:
        raise ValueError("B must have at least one row and one column")
    zero_cols = [i + 1 for i, c in enumerate(B.cols()) if not any(c)]
    if zero_cols:
        raise ZeroColumn(f"zero columns at indices {zero_cols}")
    for key, idx in line_groups(B).items():
        s = [sum(B[r, i] for i in idx) for r in range(n)]
        if any(s):
            raise QuasiSymmetryViolation(
                f"line spanned by {list(key)}: columns {[i + 1 for i in idx]} sum to {s}"
            )
    total = [sum(row) for row in B.rows]
    if any(total):
        raise ZeroSumViolation(f"columns sum to {total}")
    _check_saturated(B)
    if A is None:
        A = gale_dual(B)
    else:
        A = as_matrix(A)
        _check_gale_pair(B, A)
    sp = choose_splittings(B, A)
    h = sp.P @ ([1] * d)
    if tuple(x for x in (A.T @ h)) != tuple([1] * d):
        raise NotGaleDual("no covector h with h.a_i = 1")
    return WeightConfig(
        B=B,
        A=A,
        S_iota=sp.S_iota,
        K=sp.K,
        P=sp.P,
        h_cov=tuple(h),
        quasi_symmetric=True,
        lattice_surjective=True,
        zero_sum=True,
        name=name,
    )
