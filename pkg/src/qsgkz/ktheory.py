"""Graded Hom series between projective classes, their inverses, and pairings.

For labels a, b in Z^n the Hom series is

    H(a, b) = sum over m in N^d with B m = b - a of u^{P m}.

Writing m = S_iota (b - a) + A^T h shows each exponent h occurs at most once.
A term of H(a, b) has *order* |m| = <theta, h> + w(b) - w(a), where
theta = sum_i a_i and w(x) = sum of the entries of S_iota x.  Orders add under
matrix multiplication, so every matrix below is Id plus terms of order >= 1,
and truncating at order N is compatible with products.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import PoleAtH, TriangulationTooLarge, TruncationUnstable
from .exactlat import WeightConfig
from .laurent import GroupRingElement, LabeledMatrix, laurent_ring
from .resonance import dual_cone_rays


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def theta(cfg: WeightConfig) -> tuple[int, ...]:
    return tuple(sum(a[k] for a in cfg.a) for k in range(cfg.m))


def label_weight(cfg: WeightConfig, x: Sequence[int]) -> int:
    return sum(cfg.S_iota @ tuple(x))


def term_order(cfg: WeightConfig, h, row, col) -> int:
    return _dot(theta(cfg), h) + label_weight(cfg, col) - label_weight(cfg, row)


# --------------------------------------------------------------------------
# monomial enumeration


@lru_cache(maxsize=64)
def _buckets(B_rows: tuple, P_rows: tuple, N: int):
    """Map B m -> list of (P m, |m|) over m in N^d with |m| <= N."""
    d = len(B_rows[0])
    out: dict = {}
    for t in range(N + 1):
        for combo in itertools.combinations_with_replacement(range(d), t):
            m = [0] * d
            for i in combo:
                m[i] += 1
            key = tuple(_dot(r, m) for r in B_rows)
            h = tuple(_dot(r, m) for r in P_rows)
            out.setdefault(key, []).append((h, t))
    return out


def _bucket(cfg: WeightConfig, N: int):
    return _buckets(tuple(cfg.B.rows), tuple(cfg.P.rows), N)


@dataclass(frozen=True)
class TruncatedSeries:
    series: GroupRingElement
    N: int
    offset: int  # order of u^h is <theta, h> + offset

    def order(self, h, cfg: WeightConfig):
        return _dot(theta(cfg), h) + self.offset


def hilbert_entry(cfg: WeightConfig, chi1, chi2, N: int, sign: int = 1) -> TruncatedSeries:
    """H(chi1, chi2) truncated at order N.  ``sign=-1`` negates exponents (used in tests)."""
    v = tuple(b - a for a, b in zip(chi1, chi2))
    terms = {}
    for h, _ in _bucket(cfg, N).get(v, []):
        h = tuple(sign * x for x in h)
        terms[h] = terms.get(h, 0) + 1
    off = label_weight(cfg, chi2) - label_weight(cfg, chi1)
    return TruncatedSeries(GroupRingElement(cfg.m, terms), N, off)


# --------------------------------------------------------------------------
# truncated matrices


class TruncMatrix:
    """Label-indexed matrix of Laurent polynomials truncated at order N."""

    def __init__(self, cfg: WeightConfig, rows, cols, N: int, data=None):
        self.cfg = cfg
        self.rows = [tuple(r) for r in rows]
        self.cols = [tuple(c) for c in cols]
        self.N = N
        self.data = dict(data or {})
        self._theta = theta(cfg)
        self._wr = {x: label_weight(cfg, x) for x in self.rows}
        self._wc = {x: label_weight(cfg, x) for x in self.cols}

    def get(self, r, c) -> GroupRingElement:
        return self.data.get((tuple(r), tuple(c)), GroupRingElement.zero(self.cfg.m))

    def _truncate(self, g: GroupRingElement, r, c):
        off = self._wr[r] - self._wc[c]
        g.terms = {h: k for h, k in g.terms.items() if _dot(self._theta, h) - off <= self.N}
        return g

    def graded(self):
        """(r, c) -> {order: {h: coeff}} for the stored entries."""
        out = {}
        for (r, c), g in self.data.items():
            off = self._wc[c] - self._wr[r]
            byo: dict = {}
            for h, k in g.terms.items():
                byo.setdefault(_dot(self._theta, h) + off, {})[h] = k
            out[(r, c)] = byo
        return out

    @classmethod
    def from_graded(cls, cfg, rows, cols, N, graded, wr=None, wc=None):
        out = cls(cfg, rows, cols, N)
        if wr is not None:
            out._wr = wr
        if wc is not None:
            out._wc = wc
        m = cfg.m
        for key, byo in graded.items():
            terms: dict = {}
            for o, t in byo.items():
                if o <= N:
                    for h, k in t.items():
                        terms[h] = terms.get(h, 0) + k
            g = GroupRingElement(m, terms)
            if not g.is_zero():
                out.data[key] = g
        return out

    def __matmul__(self, other: "TruncMatrix") -> "TruncMatrix":
        if self.cols != other.rows:
            raise ValueError("inner labels differ")
        N = min(self.N, other.N)
        A, B = self.graded(), other.graded()
        res = {}
        for r in self.rows:
            for c in other.cols:
                acc: dict = {}
                for k in self.cols:
                    a = A.get((r, k))
                    b = B.get((k, c))
                    if a is None or b is None:
                        continue
                    _graded_mul_into(acc, a, b, N)
                if acc:
                    res[(r, c)] = acc
        return TruncMatrix.from_graded(self.cfg, self.rows, other.cols, N, res, self._wr, other._wc)

    def __sub__(self, other):
        out = TruncMatrix(self.cfg, self.rows, self.cols, min(self.N, other.N))
        out._wr, out._wc = self._wr, self._wc
        for key in set(self.data) | set(other.data):
            g = self.data.get(key, GroupRingElement.zero(self.cfg.m)) - other.data.get(
                key, GroupRingElement.zero(self.cfg.m)
            )
            if not g.is_zero():
                out.data[key] = g
        return out

    @classmethod
    def identity(cls, cfg, labels, N):
        labels = [tuple(x) for x in labels]
        return cls(cfg, labels, labels, N, {(x, x): GroupRingElement.one(cfg.m) for x in labels})

    def truncated(self, N):
        out = TruncMatrix(self.cfg, self.rows, self.cols, N)
        out._wr, out._wc = self._wr, self._wc
        for (r, c), g in self.data.items():
            g = GroupRingElement(self.cfg.m, dict(g.terms))
            g = out._truncate(g, r, c)
            if not g.is_zero():
                out.data[(r, c)] = g
        return out

    def equals(self, other) -> bool:
        keys = set(self.data) | set(other.data)
        return self.rows == other.rows and self.cols == other.cols and all(
            self.get(*k) == other.get(*k) for k in keys
        )

    def is_identity(self) -> bool:
        return self.equals(TruncMatrix.identity(self.cfg, self.rows, self.N)) and self.rows == self.cols

    def to_labeled(self) -> LabeledMatrix:
        M = LabeledMatrix(laurent_ring(self.cfg.m), self.rows, self.cols)
        for (r, c), g in self.data.items():
            M.set(r, c, g)
        return M

    def evaluate_u1(self):
        return np.array([[self.get(r, c).augmentation() for c in self.cols] for r in self.rows])


def hom_matrix(cfg: WeightConfig, rows, cols, N: int, sign: int = 1) -> TruncMatrix:
    M = TruncMatrix(cfg, rows, cols, N)
    for r in M.rows:
        for c in M.cols:
            g = hilbert_entry(cfg, r, c, N, sign).series
            if not g.is_zero():
                M.data[(r, c)] = g
    return M


def face_labels(cx, face) -> list[tuple[int, ...]]:
    """Basis labels of a face: the negated lattice point set."""
    return sorted(tuple(-x for x in p) for p in cx.lattice_points(face))


def psi_matrix(cfg: WeightConfig, labels, N: int, sign: int = 1) -> TruncMatrix:
    return hom_matrix(cfg, labels, labels, N, sign)


def _graded_mul_into(acc, a, b, N):
    """acc += a * b for graded polynomials, dropping orders above N."""
    for o1, t1 in a.items():
        for o2, t2 in b.items():
            o = o1 + o2
            if o > N:
                continue
            dst = acc.setdefault(o, {})
            for h1, k1 in t1.items():
                for h2, k2 in t2.items():
                    h = tuple(x + y for x, y in zip(h1, h2))
                    v = dst.get(h, 0) + k1 * k2
                    if v:
                        dst[h] = v
                    else:
                        dst.pop(h, None)


def neumann_inverse(M: TruncMatrix) -> TruncMatrix:
    """Inverse of Id + X with X of order >= 1, solved order by order.

    Phi_0 = Id and Phi_k = -sum_{j=1..k} X_j Phi_{k-j}.
    """
    labels = M.rows
    G = M.graded()
    X = {}
    for key, byo in G.items():
        rest = {o: t for o, t in byo.items() if o > 0}
        if 0 in byo:
            want = {(0,) * M.cfg.m: 1} if key[0] == key[1] else {}
            if byo[0] != want:
                raise ValueError("matrix is not Id plus positive order terms")
        if rest:
            X[key] = rest
    for r in labels:
        if (r, r) not in G or G[(r, r)].get(0) != {(0,) * M.cfg.m: 1}:
            raise ValueError("matrix is not Id plus positive order terms")
    # per-row lists of X entries
    Xrow = {r: [(k, X[(r, k)]) for k in labels if (r, k) in X] for r in labels}
    Phi = {(r, r): {0: {(0,) * M.cfg.m: 1}} for r in labels}
    for order in range(1, M.N + 1):
        new = {}
        for r in labels:
            for c in labels:
                acc: dict = {}
                for k, xg in Xrow[r]:
                    pg = Phi.get((k, c))
                    if pg is None:
                        continue
                    for o1, t1 in xg.items():
                        t2 = pg.get(order - o1)
                        if t2 is None:
                            continue
                        for h1, k1 in t1.items():
                            for h2, k2 in t2.items():
                                h = tuple(x + y for x, y in zip(h1, h2))
                                v = acc.get(h, 0) - k1 * k2
                                if v:
                                    acc[h] = v
                                else:
                                    acc.pop(h, None)
                if acc:
                    new[(r, c)] = acc
        for key, t in new.items():
            Phi.setdefault(key, {})[order] = t
    return TruncMatrix.from_graded(M.cfg, labels, labels, M.N, Phi, M._wr, M._wc)


def phi_matrix(cfg: WeightConfig, labels, N: int) -> TruncMatrix:
    """Phi = Psi^{-1}; the simple class s_mu is the column sum_nu Phi[nu, mu] P_nu."""
    return neumann_inverse(psi_matrix(cfg, labels, N))


def pairing_gram(cfg: WeightConfig, labels, N: int, sign: int = 1) -> TruncMatrix:
    """Twisted Gram matrix G[chi, nu] = H(-chi, nu), chi in -labels, nu in labels.

    The duality sends P_chi to P_{-chi}, so G is Psi with its rows reflected.
    """
    rows = sorted(tuple(-x for x in l) for l in labels)
    G = TruncMatrix(cfg, rows, labels, N)
    G._wr = {r: label_weight(cfg, tuple(-x for x in r)) for r in rows}
    for r in G.rows:
        for c in G.cols:
            g = hilbert_entry(cfg, tuple(-x for x in r), c, N, sign).series
            if not g.is_zero():
                G.data[(r, c)] = g
    return G


def dual_basis_check(cfg: WeightConfig, labels, N: int, sign: int = 1) -> bool:
    """G . Phi equals the reflection chi -> -chi to order N.

    ``sign`` only affects G; a wrong exponent sign makes the check fail.
    """
    labels = [tuple(x) for x in labels]
    G = pairing_gram(cfg, labels, N, sign)
    Phi = phi_matrix(cfg, labels, N)
    GP = G @ Phi
    for r in GP.rows:
        for c in GP.cols:
            want = GroupRingElement.one(cfg.m) if tuple(-x for x in r) == c else GroupRingElement.zero(cfg.m)
            if GP.get(r, c) != want:
                return False
    return True


def check_inverse(cfg: WeightConfig, labels, N: int) -> bool:
    Psi = psi_matrix(cfg, labels, N)
    Phi = neumann_inverse(Psi)
    return (Psi @ Phi).is_identity() and (Phi @ Psi).is_identity()


# --------------------------------------------------------------------------
# adjoint maps


def adjoint_gamma(cfg: WeightConfig, source_labels, target_labels, N: int, check: bool = True) -> TruncMatrix:
    """The map gamma: E_source -> E_target adjoint to the label inclusion delta.

    gamma is pinned by <P_mu, gamma X> = <delta P_mu, X> for all target
    labels mu, i.e. Psi_target . gamma = H(target, source), so
    gamma = Phi_target . H(target, source).  On labels shared by both faces it
    is the identity.  Entries are Laurent polynomials; with ``check`` the
    result must agree at orders N and N+1.
    """

    def build(Nk):
        Hm = hom_matrix(cfg, target_labels, source_labels, Nk)
        return phi_matrix(cfg, target_labels, Nk) @ Hm

    g1 = build(N)
    if check:
        g2 = build(N + 1)
        if any(g2.get(*k) != g1.get(*k) for k in set(g1.data) | set(g2.data)):
            raise TruncationUnstable(f"adjoint map changes between orders {N} and {N + 1}")
    return g1


# --------------------------------------------------------------------------
# exact rational entries


@dataclass(frozen=True)
class RationalSeries:
    numerator: GroupRingElement
    rays: tuple  # denominator prod_j (1 - u^{r_j})
    offset: int
    degree_bound: int

    def denominator(self) -> GroupRingElement:
        m = self.numerator.nvars
        D = GroupRingElement.one(m)
        for r in self.rays:
            D = D * (GroupRingElement.one(m) - GroupRingElement.monomial(r))
        return D

    def expand(self, N: int, th) -> GroupRingElement:
        """Power series expansion up to order N (order = <theta,h> + offset)."""
        m = self.numerator.nvars
        terms = dict(self.numerator.terms)
        for r in self.rays:
            step = _dot(th, r)
            new: dict = {}
            for h, c in terms.items():
                k = 0
                while _dot(th, h) + k * step + self.offset <= N:
                    e = tuple(a + k * b for a, b in zip(h, r))
                    new[e] = new.get(e, 0) + c
                    k += 1
            terms = new
        return GroupRingElement(
            m, {h: c for h, c in terms.items() if _dot(th, h) + self.offset <= N}
        )

    def evaluate_alpha(self, alpha, tol: float = 1e-12) -> complex:
        """Value at u = exp(-2 pi i alpha); exact pole test for rational alpha."""
        exact = all(isinstance(a, (int, Fraction)) for a in alpha)
        for r in self.rays:
            s = sum(Fraction(x) * a for x, a in zip(r, alpha)) if exact else sum(x * complex(a) for x, a in zip(r, alpha))
            if exact:
                pole = Fraction(s).denominator == 1
            else:
                pole = abs(1 - np.exp(-2j * np.pi * s)) <= tol
            if pole:
                raise PoleAtH(f"factor 1 - u^{list(r)} vanishes at h", factor=tuple(r))
        logs = [-2j * np.pi * complex(a) for a in alpha]
        num = self.numerator.evaluate_log(logs)
        den = 1.0 + 0j
        for r in self.rays:
            den *= 1 - np.exp(sum(x * L for x, L in zip(r, logs)))
        return num / den

    def evaluate(self, h, tol: float = 1e-12) -> complex:
        for r in self.rays:
            val = 1 - GroupRingElement.monomial(r).evaluate(h)
            if abs(val) <= tol:
                raise PoleAtH(f"factor 1 - u^{list(r)} vanishes at h", factor=tuple(r))
        return self.numerator.evaluate(h) / self.denominator().evaluate(h)


MAX_EXACT_RAYS = 10
MAX_EXACT_ORDER = 16  # enumeration order needed for the numerator


def _numerator_degree_bound(cfg: WeightConfig, c, rays) -> int | None:
    """Upper bound for <theta, beta> over the support of the numerator.

    A monomial u^beta can only survive if beta lies in the polyhedron
    {<a_i, beta> >= c_i} and, for some index set I with sum_I a_i interior to
    sigma, <a_i, beta> < c_i + R_i for i in I (R_i = sum_j <r_j, a_i>).
    Each such set is a polytope; the bound is the max of LPs over them.
    """
    a = cfg.a
    d, m = cfg.d, cfg.m
    th = theta(cfg)
    R = [sum(_dot(r, ai) for r in rays) for ai in a]
    best = None
    A_ub_base = [[-x for x in ai] for ai in a]
    b_ub_base = [-ci for ci in c]
    for size in range(1, d + 1):
        for I in itertools.combinations(range(d), size):
            s = [sum(a[i][k] for i in I) for k in range(m)]
            if not all(_dot(r, s) > 0 for r in rays):
                continue
            A_ub = A_ub_base + [list(a[i]) for i in I]
            b_ub = b_ub_base + [c[i] + R[i] - 1 for i in I]
            res = linprog(
                c=[-x for x in th], A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * m, method="highs"
            )
            if res.status == 2:
                continue
            if res.status != 0:
                raise TriangulationTooLarge(f"LP for the numerator bound failed: {res.message}")
            val = math.floor(-res.fun + 1e-6)
            best = val if best is None else max(best, val)
    return best


def exact_rational_entry(cfg: WeightConfig, chi1, chi2, rays=None, max_order: int = MAX_EXACT_ORDER) -> RationalSeries:
    rays = tuple(dual_cone_rays(cfg)) if rays is None else tuple(rays)
    if len(rays) > MAX_EXACT_RAYS:
        raise TriangulationTooLarge(f"{len(rays)} rays; exact mode is limited to {MAX_EXACT_RAYS}")
    v = tuple(b - a for a, b in zip(chi1, chi2))
    c = [-x for x in cfg.S_iota @ v]
    off = label_weight(cfg, chi2) - label_weight(cfg, chi1)
    th = theta(cfg)
    bound = _numerator_degree_bound(cfg, c, rays)
    m = cfg.m
    if bound is None:
        return RationalSeries(GroupRingElement.zero(m), rays, off, 0)
    Nm = max(bound + off, 0)
    if Nm > max_order:
        raise TriangulationTooLarge(f"numerator needs order {Nm}; exact mode is limited to {max_order}")
    f = hilbert_entry(cfg, chi1, chi2, Nm).series
    K = f
    for r in rays:
        K = K * (GroupRingElement.one(m) - GroupRingElement.monomial(r))
    K = GroupRingElement(m, {h: k for h, k in K.terms.items() if _dot(th, h) <= bound})
    return RationalSeries(K, rays, off, bound)


def exact_rational_psi(cfg: WeightConfig, labels, max_order: int = MAX_EXACT_ORDER) -> dict:
    rays = tuple(dual_cone_rays(cfg))
    return {
        (tuple(r), tuple(c)): exact_rational_entry(cfg, r, c, rays, max_order) for r in labels for c in labels
    }


@dataclass
class InvertibilityReport:
    F_value: complex
    finite: bool
    invertible: bool
    det: complex
    min_singular_value: float

    def to_dict(self):
        return {
            "F_value": [self.F_value.real, self.F_value.imag],
            "finite": self.finite,
            "invertible": self.invertible,
            "det": [self.det.real, self.det.imag],
            "min_singular_value": self.min_singular_value,
        }


def specialization_invertibility(cfg: WeightConfig, labels, alpha, tol: float = 1e-10) -> InvertibilityReport:
    """Evaluate Psi at h = exp(-2 pi i alpha) from the rational forms.

    Raises PoleAtH if a denominator factor vanishes at h.
    """
    from .resonance import F_element

    labels = [tuple(x) for x in labels]
    ex = exact_rational_psi(cfg, labels)
    M = np.array([[ex[(r, c)].evaluate_alpha(alpha) for c in labels] for r in labels], dtype=complex)
    logs = [-2j * np.pi * complex(a) for a in alpha]
    Fv = F_element(cfg).evaluate_log(logs)
    det = complex(np.linalg.det(M))
    sv = float(np.linalg.svd(M, compute_uv=False).min())
    return InvertibilityReport(Fv, bool(np.all(np.isfinite(M))), sv > tol, det, sv)
