"""Generic Kapranov-Schechtman data on a finite window of faces.

A datum assigns a labeled free module E_C to each face and, for C' <= C,
maps gamma_{C'C}: E_{C'} -> E_C and delta_{CC'}: E_C -> E_{C'}.  The axioms
checked here are

  (m) gamma_{C'C} delta_{CC'} = id,
  (f) gamma and delta compose along chains,
  (i) phi_{C1C2} = gamma_{C'C2} delta_{C1C'} is invertible for faces of equal
      dimension and affine span sharing a facet C',
  (t) phi_{C1C3} = phi_{C2C3} phi_{C1C2} on collinear triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import AxiomsFailed, NoCommonFace, ShapeMismatch
from .laurent import (
    INTEGERS,
    GroupRingElement,
    LabeledMatrix,
    Ring,
    complex_ring,
    determinant,
)


@dataclass
class KSDatum:
    faces: list
    leq: Callable[[Any, Any], bool]
    labels: dict
    gamma: dict  # (small, big) -> matrix E_small -> E_big
    delta: dict  # (big, small) -> matrix E_big -> E_small
    ring: Ring
    dim: dict = field(default_factory=dict)

    def identity(self, f):
        return LabeledMatrix.identity(self.ring, self.labels[f])

    def g(self, small, big):
        return self.identity(small) if small == big else self.gamma[(small, big)]

    def d(self, big, small):
        return self.identity(big) if small == big else self.delta[(big, small)]

    def lower_bounds(self, *fs):
        return [c for c in self.faces if all(c == f or self.leq(c, f) for f in fs)]


@dataclass
class EquivKSDatum:
    ks: KSDatum
    translate_face: Callable
    translation_matrix: Callable  # (mu, face) -> matrix E_face -> E_{face + mu}
    n: int
    cross_check_failures: list = field(default_factory=list)


@dataclass
class AxiomReport:
    violations: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def add(self, axiom, where, detail=""):
        self.violations.append({"axiom": axiom, "where": where, "detail": detail})

    def tick(self, axiom):
        self.counts[axiom] = self.counts.get(axiom, 0) + 1

    def to_dict(self):
        return {"ok": self.ok, "checked": self.counts, "violations": self.violations}


def _name(f):
    return f.short() if hasattr(f, "short") else repr(f)


# --------------------------------------------------------------------------
# invertibility


def is_invertible(M: LabeledMatrix, binomials=(), cond_max: float = 1e10) -> bool:
    """Invertibility over the ring of M.

    Laurent matrices: det must be +-monomial after dividing out factors
    1 - u^r for r in ``binomials`` (the localization at F).  Integers: det
    = +-1.  Complex: condition number below ``cond_max``.
    """
    if M.shape[0] != M.shape[1]:
        return False
    if M.shape[0] == 0:
        return True
    sample = M.entries[0][0]
    if isinstance(sample, GroupRingElement):
        det = determinant(M)
        if det.is_zero():
            return False
        changed = True
        while changed and not det.is_unit_monomial():
            changed = False
            for r in binomials:
                q = det.divide_by_binomial(r)
                if q is not None and not q.is_zero():
                    det, changed = q, True
        return det.is_unit_monomial()
    if isinstance(sample, complex) or M.ring.name.startswith("C"):
        import numpy as np

        A = M.to_numpy()
        return bool(np.isfinite(A).all() and np.linalg.cond(A) < cond_max)
    det = determinant(M)
    return det in (1, -1)


# --------------------------------------------------------------------------
# axioms


def phi(ks: KSDatum, c1, c2, check_independence: bool = True) -> LabeledMatrix:
    """gamma_{C'C2} delta_{C1C'} for a common lower bound C'."""
    lows = ks.lower_bounds(c1, c2)
    if not lows:
        raise NoCommonFace(f"{_name(c1)} and {_name(c2)} have no common lower face in the window")
    lows.sort(key=lambda f: -ks.dim.get(f, 0))
    mats = []
    for cp in lows if check_independence else lows[:1]:
        mats.append(ks.g(cp, c2) @ ks.d(c1, cp))
    for M in mats[1:]:
        if not M.equals(mats[0]):
            raise AxiomsFailed(f"phi({_name(c1)}, {_name(c2)}) depends on the lower bound")
    return mats[0]


def _same_span_pairs(ks: KSDatum, span_key: Callable):
    out = []
    for c1, c2 in itertools.permutations(ks.faces, 2):
        k = ks.dim[c1]
        if ks.dim[c2] != k or k == 0 or span_key(c1) != span_key(c2):
            continue
        shared = [f for f in ks.lower_bounds(c1, c2) if ks.dim[f] == k - 1]
        if shared:
            out.append((c1, c2, shared[0]))
    return out


def check_axioms(
    ks: KSDatum,
    triples=(),
    span_key: Callable | None = None,
    binomials=(),
    eks: EquivKSDatum | None = None,
    shifts=(),
    functoriality: bool = True,
) -> AxiomReport:
    rep = AxiomReport()
    for (small, big), G in ks.gamma.items():
        D = ks.delta.get((big, small))
        if D is None:
            rep.add("m", [_name(small), _name(big)], "missing delta")
            continue
        if G.shape != (D.shape[1], D.shape[0]):
            raise ShapeMismatch(f"gamma/delta shapes {G.shape} vs {D.shape}")
        rep.tick("m")
        if not (G @ D).is_identity():
            rep.add("m", [_name(small), _name(big)], "gamma delta != id")
    if functoriality:
        for a, b, c in itertools.permutations(ks.faces, 3):
            if (a, b) in ks.gamma and (b, c) in ks.gamma and (a, c) in ks.gamma:
                rep.tick("f")
                if not (ks.gamma[(b, c)] @ ks.gamma[(a, b)]).equals(ks.gamma[(a, c)]):
                    rep.add("f", [_name(a), _name(b), _name(c)], "gamma not functorial")
                if not (ks.delta[(b, a)] @ ks.delta[(c, b)]).equals(ks.delta[(c, a)]):
                    rep.add("f", [_name(a), _name(b), _name(c)], "delta not functorial")
    if span_key is not None:
        for c1, c2, cp in _same_span_pairs(ks, span_key):
            rep.tick("i")
            M = ks.g(cp, c2) @ ks.d(c1, cp)
            if not is_invertible(M, binomials):
                rep.add("i", [_name(c1), _name(c2)], "phi not invertible")
    fset = set(ks.faces)
    for c1, c2, c3 in triples:
        if not all(c in fset for c in (c1, c2, c3)):
            continue
        rep.tick("t")
        try:
            lhs = phi(ks, c1, c3)
            rhs = phi(ks, c2, c3) @ phi(ks, c1, c2)
        except (NoCommonFace, AxiomsFailed) as e:
            rep.add("t", [_name(c1), _name(c2), _name(c3)], str(e))
            continue
        if not lhs.equals(rhs):
            rep.add("t", [_name(c1), _name(c2), _name(c3)], "phi13 != phi23 phi12")
    if eks is not None:
        _check_equivariance(eks, shifts, rep)
    return rep


def _check_equivariance(eks: EquivKSDatum, shifts, rep: AxiomReport):
    ks = eks.ks
    fset = set(ks.faces)
    zero = tuple([0] * eks.n)
    for f in ks.faces:
        rep.tick("equivariance")
        if not eks.translation_matrix(zero, f).is_identity():
            rep.add("equivariance", [_name(f)], "phi_{e,C} != id")
        for mu, nu in itertools.product(shifts, repeat=2):
            tot = tuple(a + b for a, b in zip(mu, nu))
            lhs = eks.translation_matrix(nu, eks.translate_face(f, mu)) @ eks.translation_matrix(mu, f)
            if not lhs.equals(eks.translation_matrix(tot, f)):
                rep.add("equivariance", [_name(f), list(mu), list(nu)], "cocycle")
    for (small, big), G in ks.gamma.items():
        for mu in shifts:
            s2, b2 = eks.translate_face(small, mu), eks.translate_face(big, mu)
            if (s2, b2) not in ks.gamma:
                continue
            rep.tick("equivariance")
            lhs = ks.gamma[(s2, b2)] @ eks.translation_matrix(mu, small)
            rhs = eks.translation_matrix(mu, big) @ G
            if not lhs.equals(rhs):
                rep.add("equivariance", [_name(small), _name(big), list(mu)], "gamma square")
            lhs = ks.delta[(b2, s2)] @ eks.translation_matrix(mu, big)
            rhs = eks.translation_matrix(mu, small) @ ks.delta[(big, small)]
            if not lhs.equals(rhs):
                rep.add("equivariance", [_name(small), _name(big), list(mu)], "delta square")


# --------------------------------------------------------------------------
# duality, specialization, restriction


def dual(ks: KSDatum, twist: bool = False) -> KSDatum:
    """Transpose and swap gamma/delta; ``twist`` also negates exponents."""

    def tr(M):
        M = M.transpose()
        if twist:
            M = M.map(lambda g: g.negate_exponents())
        return M

    return KSDatum(
        faces=ks.faces,
        leq=ks.leq,
        labels=ks.labels,
        gamma={(s, b): tr(D) for (b, s), D in ks.delta.items()},
        delta={(b, s): tr(G) for (s, b), G in ks.gamma.items()},
        ring=ks.ring,
        dim=ks.dim,
    )


def same_datum(a: KSDatum, b: KSDatum) -> bool:
    if set(a.gamma) != set(b.gamma) or set(a.delta) != set(b.delta):
        return False
    return all(a.gamma[k].equals(b.gamma[k]) for k in a.gamma) and all(
        a.delta[k].equals(b.delta[k]) for k in a.delta
    )


def specialize(ks: KSDatum, alpha=None, h=None, tol: float = 1e-9) -> KSDatum:
    """Evaluate every entry at u = h, or at u = exp(-2 pi i alpha)."""
    import numpy as np

    if (alpha is None) == (h is None):
        raise ValueError("give exactly one of alpha, h")
    if alpha is not None:
        logs = [-2j * np.pi * complex(a) for a in alpha]
        f = lambda g: g.evaluate_log(logs)  # noqa: E731
    else:
        f = lambda g: g.evaluate(h)  # noqa: E731
    ring = complex_ring(tol)
    return KSDatum(
        faces=ks.faces,
        leq=ks.leq,
        labels=ks.labels,
        gamma={k: M.map(f, ring) for k, M in ks.gamma.items()},
        delta={k: M.map(f, ring) for k, M in ks.delta.items()},
        ring=ring,
        dim=ks.dim,
    )


def augmentation(ks: KSDatum) -> KSDatum:
    """Specialization at h = (1, ..., 1) as an exact integer datum."""
    return KSDatum(
        faces=ks.faces,
        leq=ks.leq,
        labels=ks.labels,
        gamma={k: M.map(lambda g: g.augmentation(), INTEGERS) for k, M in ks.gamma.items()},
        delta={k: M.map(lambda g: g.augmentation(), INTEGERS) for k, M in ks.delta.items()},
        ring=INTEGERS,
        dim=ks.dim,
    )


def restrict_to_groupoid(eks: EquivKSDatum, chambers, wall_pairs, report: AxiomReport | None = None):
    """Chamber modules, phi on shared-facet pairs, translations on unit shifts."""
    from .schober_k0 import GroupoidRep

    if report is not None and not report.ok:
        raise AxiomsFailed(f"{len(report.violations)} axiom violations")
    ks = eks.ks
    rep = GroupoidRep(cfg=None, side="ks", chambers=list(chambers), ring_name=ks.ring.name)
    for c1, c2 in wall_pairs:
        rep.walls[(c1.code, c2.code)] = phi(ks, c1, c2)
    for c in chambers:
        for k in range(eks.n):
            mu = tuple(int(i == k) for i in range(eks.n))
            rep.translations[(c.code, mu)] = eks.translation_matrix(mu, c)
    return rep


def trivial_datum(faces, leq, ring: Ring = INTEGERS, dim=None) -> KSDatum:
    """E_C = R with every map the identity."""
    labels = {f: [(0,)] for f in faces}
    gamma, delta = {}, {}
    for a, b in itertools.permutations(faces, 2):
        if leq(a, b):
            gamma[(a, b)] = LabeledMatrix.identity(ring, [(0,)])
            delta[(b, a)] = LabeledMatrix.identity(ring, [(0,)])
    return KSDatum(list(faces), leq, labels, gamma, delta, ring, dim or {f: 0 for f in faces})


# --------------------------------------------------------------------------
# stabilizer absorption


def stab_round_trip(cx, c1, c2, lifts) -> bool:
    """Compare the Z-form wall map on big-torus characters with the Z[X(H)] matrix.

    The Z-form acts on [P_xi], xi in Z^d, with the X(H)-part of xi moving
    along without changing faces.  Normalizing its output must reproduce
    u^{-h} times the column of the Z[X(H)] matrix at x, for xi = iota x + A^T h.
    """
    from .arrangement import wall_orientation
    from .ktheory import face_labels
    from .schober_k0 import common_facet, normalize_label, wall_crossing_matrix

    cfg = cx.cfg
    W = wall_crossing_matrix(cx, c1, c2, "ktheory")
    c0 = common_facet(cx, c1, c2)
    f, s = wall_orientation(cx, c0, c2)
    lam = [-s * x for x in cx.normals[f]]
    J = [j for j, b in enumerate(cfg.b) if sum(p * q for p, q in zip(lam, b)) < 0]
    tgt = set(face_labels(cx, c2))
    for x in face_labels(cx, c1):
        for h in lifts:
            xi = [a + b for a, b in zip(cfg.iota(x), cfg.A.T @ tuple(h))]
            image = {}
            if x in tgt:
                image[tuple(xi)] = 1
            else:
                for k in range(1, len(J) + 1):
                    for S in itertools.combinations(J, k):
                        e = list(xi)
                        for j in S:
                            e[j] -= 1
                        image[tuple(e)] = image.get(tuple(e), 0) + (-1) ** (k + 1)
            got = {}
            for e, c in image.items():
                lab, mono = normalize_label(cfg, e)
                got[lab] = got.get(lab, GroupRingElement.zero(cfg.m)) + mono * c
            u_h = GroupRingElement.monomial(tuple(-v for v in h))
            for lab in W.row_labels:
                want = u_h * W.get(lab, x)
                if got.get(lab, GroupRingElement.zero(cfg.m)) != want:
                    return False
    return True
