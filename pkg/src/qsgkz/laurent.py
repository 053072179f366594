"""Sparse Laurent polynomials over Z and label-indexed matrices.

``GroupRingElement`` models Z[X(H)] = Z[u_1^{+-1}, ..., u_m^{+-1}].  Matrices
are indexed by labels (lattice points), never by bare positions, and every
product checks that the inner label lists agree.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from .errors import ShapeMismatch, ZeroCoordinate

Exp = tuple  # exponent vector


class GroupRingElement:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        t = {}
        if terms:
            for e, c in terms.items():
                if c:
                    e = tuple(int(x) for x in e)
                    if len(e) != nvars:
                        raise ValueError("exponent length mismatch")
                    t[e] = t.get(e, 0) + int(c)
            t = {e: c for e, c in t.items() if c}
        self.terms = t

    # constructors
    @classmethod
    def zero(cls, m):
        return cls(m)

    @classmethod
    def one(cls, m):
        return cls(m, {(0,) * m: 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: int = 1):
        exp = tuple(int(x) for x in exp)
        return cls(len(exp), {exp: coeff})

    @classmethod
    def const(cls, m, c: int):
        return cls(m, {(0,) * m: c})

    # basics
    def is_zero(self):
        return not self.terms

    def is_monomial(self):
        return len(self.terms) == 1

    def is_unit_monomial(self):
        return len(self.terms) == 1 and abs(next(iter(self.terms.values()))) == 1

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def copy(self):
        g = GroupRingElement(self.nvars)
        g.terms = dict(self.terms)
        return g

    def _coerce(self, other):
        if isinstance(other, GroupRingElement):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, int):
            return GroupRingElement.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        g = GroupRingElement(self.nvars)
        g.terms = t
        return g

    __radd__ = __add__

    def __neg__(self):
        g = GroupRingElement(self.nvars)
        g.terms = {e: -c for e, c in self.terms.items()}
        return g

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        g = GroupRingElement(self.nvars)
        g.terms = {e: c for e, c in t.items() if c}
        return g

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_unit_monomial():
                raise ValueError("only unit monomials are invertible")
            (e, c), = self.terms.items()
            return GroupRingElement.monomial(tuple(-x * -k for x in e), c ** (-k))
        r = GroupRingElement.one(self.nvars)
        for _ in range(k):
            r = r * self
        return r

    def __eq__(self, other):
        if isinstance(other, int):
            other = GroupRingElement.const(self.nvars, other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "*".join(
                (f"u{i + 1}" if x == 1 else f"u{i + 1}^{x}") for i, x in enumerate(e) if x
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # ring maps
    def negate_exponents(self):
        g = GroupRingElement(self.nvars)
        g.terms = {tuple(-x for x in e): c for e, c in self.terms.items()}
        return g

    def shift(self, exp: Sequence[int]):
        g = GroupRingElement(self.nvars)
        g.terms = {tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()}
        return g

    def evaluate(self, point: Sequence[complex]) -> complex:
        point = [complex(z) for z in point]
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        if any(z == 0 for z in point):
            raise ZeroCoordinate("evaluation point has a zero coordinate")
        s = 0j
        for e, c in self.terms.items():
            v = complex(c)
            for z, k in zip(point, e):
                if k:
                    v *= z ** k
            s += v
        return s

    def evaluate_log(self, logs: Sequence[complex]) -> complex:
        """Evaluate at u_l = exp(logs_l); avoids branch issues for fractional data."""
        s = 0j
        for e, c in self.terms.items():
            s += c * cmath.exp(sum(k * L for k, L in zip(e, logs)))
        return s

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def to_json(self):
        return [{"coeff": c, "exp": list(e)} for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, m, data):
        return cls(m, {tuple(t["exp"]): t["coeff"] for t in data})

    # exact division by a binomial 1 - u^v
    def divide_by_binomial(self, v: Sequence[int]):
        """Return q with self == (1 - u^v) q, or None if not divisible."""
        v = tuple(v)
        if not any(v):
            return None
        # group exponents into cosets e + Z v, parametrized by position along v
        k0 = next(i for i, x in enumerate(v) if x)
        cosets: dict = {}
        for e, c in self.terms.items():
            # e = base + t v with base[k0] in [0, |v_k0|)
            t, r = divmod(e[k0], v[k0])
            base = tuple(a - t * b for a, b in zip(e, v))
            cosets.setdefault(base, {})[t] = c
        q: dict = {}
        for base, poly in cosets.items():
            if sum(poly.values()) != 0:
                return None
            ts = sorted(poly)
            acc = 0
            # p(t) = (1 - T) q(T): q_k = sum_{j <= k} p_j
            for t in range(ts[0], ts[-1]):
                acc += poly.get(t, 0)
                if acc:
                    q[tuple(a + t * b for a, b in zip(base, v))] = acc
        return GroupRingElement(self.nvars, q)


# --------------------------------------------------------------------------
# coefficient rings


@dataclass(frozen=True)
class Ring:
    name: str
    zero: Callable[[], Any]
    one: Callable[[], Any]
    eq: Callable[[Any, Any], bool]
    is_zero: Callable[[Any], bool]


def laurent_ring(m: int) -> Ring:
    return Ring(
        name=f"Z[X(H)] (m={m})",
        zero=lambda: GroupRingElement.zero(m),
        one=lambda: GroupRingElement.one(m),
        eq=lambda a, b: a == b,
        is_zero=lambda a: a.is_zero(),
    )


INTEGERS = Ring("Z", lambda: 0, lambda: 1, lambda a, b: a == b, lambda a: a == 0)


def complex_ring(tol: float = 1e-9) -> Ring:
    def eq(a, b):
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))

    return Ring(f"C (tol={tol:g})", lambda: 0j, lambda: 1 + 0j, eq, lambda a: abs(a) <= tol)


# --------------------------------------------------------------------------
# labeled matrices


class LabeledMatrix:
    """Matrix with hashable row/column labels over a coefficient ring."""

    __slots__ = ("ring", "row_labels", "col_labels", "entries", "_rindex", "_cindex")

    def __init__(self, ring: Ring, row_labels, col_labels, entries=None):
        self.ring = ring
        self.row_labels = [tuple(x) if isinstance(x, (list, tuple)) else x for x in row_labels]
        self.col_labels = [tuple(x) if isinstance(x, (list, tuple)) else x for x in col_labels]
        self._rindex = {lab: i for i, lab in enumerate(self.row_labels)}
        self._cindex = {lab: j for j, lab in enumerate(self.col_labels)}
        if len(self._rindex) != len(self.row_labels) or len(self._cindex) != len(self.col_labels):
            raise ShapeMismatch("duplicate labels")
        if entries is None:
            entries = [[ring.zero() for _ in self.col_labels] for _ in self.row_labels]
        self.entries = [list(r) for r in entries]
        if len(self.entries) != len(self.row_labels) or any(
            len(r) != len(self.col_labels) for r in self.entries
        ):
            raise ShapeMismatch("entries do not match label counts")

    @classmethod
    def identity(cls, ring, labels):
        labels = list(labels)
        M = cls(ring, labels, labels)
        for i in range(len(labels)):
            M.entries[i][i] = ring.one()
        return M

    @property
    def shape(self):
        return (len(self.row_labels), len(self.col_labels))

    def get(self, r, c):
        return self.entries[self._rindex[r]][self._cindex[c]]

    def set(self, r, c, value):
        self.entries[self._rindex[r]][self._cindex[c]] = value

    def add_to(self, r, c, value):
        i, j = self._rindex[r], self._cindex[c]
        self.entries[i][j] = self.entries[i][j] + value

    def has_row(self, r):
        return r in self._rindex

    def column(self, c):
        j = self._cindex[c]
        return {self.row_labels[i]: self.entries[i][j] for i in range(len(self.row_labels))}

    def reindexed(self, row_labels, col_labels):
        """Same matrix with rows/columns permuted into the given label order."""
        if set(row_labels) != set(self.row_labels) or set(col_labels) != set(self.col_labels):
            raise ShapeMismatch("label sets differ")
        return LabeledMatrix(
            self.ring,
            row_labels,
            col_labels,
            [[self.get(r, c) for c in col_labels] for r in row_labels],
        )

    def __matmul__(self, other: "LabeledMatrix"):
        if set(self.col_labels) != set(other.row_labels) or len(self.col_labels) != len(
            other.row_labels
        ):
            raise ShapeMismatch(
                f"label mismatch in product: {self.col_labels} vs {other.row_labels}"
            )
        other = other.reindexed(self.col_labels, other.col_labels)
        zero = self.ring.zero
        out = []
        for row in self.entries:
            new = []
            for j in range(len(other.col_labels)):
                s = zero()
                for k, a in enumerate(row):
                    if self.ring.is_zero(a):
                        continue
                    b = other.entries[k][j]
                    if self.ring.is_zero(b):
                        continue
                    s = s + a * b
                new.append(s)
            out.append(new)
        return LabeledMatrix(self.ring, self.row_labels, other.col_labels, out)

    def map(self, f: Callable, ring: Ring | None = None):
        return LabeledMatrix(
            ring or self.ring,
            self.row_labels,
            self.col_labels,
            [[f(x) for x in r] for r in self.entries],
        )

    def transpose(self):
        return LabeledMatrix(
            self.ring,
            self.col_labels,
            self.row_labels,
            [[self.entries[i][j] for i in range(len(self.row_labels))] for j in range(len(self.col_labels))],
        )

    def relabel(self, row_map: Callable, col_map: Callable):
        return LabeledMatrix(
            self.ring,
            [row_map(x) for x in self.row_labels],
            [col_map(x) for x in self.col_labels],
            self.entries,
        )

    def equals(self, other: "LabeledMatrix") -> bool:
        if set(self.row_labels) != set(other.row_labels) or set(self.col_labels) != set(
            other.col_labels
        ):
            return False
        other = other.reindexed(self.row_labels, self.col_labels)
        return all(
            self.ring.eq(a, b) for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
        )

    def is_identity(self) -> bool:
        if set(self.row_labels) != set(self.col_labels):
            return False
        return self.equals(LabeledMatrix.identity(self.ring, self.row_labels))

    def differences(self, other: "LabeledMatrix"):
        other = other.reindexed(self.row_labels, self.col_labels)
        out = []
        for i, r in enumerate(self.row_labels):
            for j, c in enumerate(self.col_labels):
                if not self.ring.eq(self.entries[i][j], other.entries[i][j]):
                    out.append((r, c))
        return out

    def to_numpy(self):
        import numpy as np

        return np.array([[complex(x) for x in r] for r in self.entries], dtype=complex)

    def to_json(self, encode: Callable | None = None):
        if encode is None:
            encode = _default_encode
        return {
            "row_labels": [list(x) if isinstance(x, tuple) else x for x in self.row_labels],
            "col_labels": [list(x) if isinstance(x, tuple) else x for x in self.col_labels],
            "entries": [[encode(x) for x in r] for r in self.entries],
        }

    def __repr__(self):
        return f"LabeledMatrix(rows={self.row_labels}, cols={self.col_labels}, entries={self.entries})"


def _default_encode(x):
    if isinstance(x, GroupRingElement):
        return x.to_json()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def determinant(M: LabeledMatrix):
    """Division-free determinant (Berkowitz) over any commutative ring."""
    n = len(M.row_labels)
    if n != len(M.col_labels):
        raise ShapeMismatch("determinant of a non-square matrix")
    ring = M.ring
    if n == 0:
        return ring.one()
    A = [row[:] for row in M.entries]
    zero, one = ring.zero, ring.one

    def mat_vec(X, v):
        return [_dot(row, v, zero) for row in X]

    # characteristic polynomial coefficients via Berkowitz
    vect = [one(), -A[0][0]]
    for r in range(1, n):
        R = A[r][:r]
        S = [A[i][r] for i in range(r)]
        Asub = [row[:r] for row in A[:r]]
        c = A[r][r]
        col = [one(), -c]
        powS = S
        for _ in range(r - 1):
            col.append(-_dot(R, powS, zero))
            powS = mat_vec(Asub, powS)
        col.append(-_dot(R, powS, zero))
        # Toeplitz product: new[i] = sum_j col[i - j] * vect[j]
        new = []
        for i in range(r + 2):
            s = zero()
            for j in range(min(i, len(vect) - 1) + 1):
                s = s + col[i - j] * vect[j]
            new.append(s)
        vect = new
    det = vect[n]
    return det if n % 2 == 0 else -det


def _dot(a, b, zero):
    s = zero()
    for x, y in zip(a, b):
        s = s + x * y
    return s
