"""K-theory of the GIT schober: projective labels, Koszul classes, monodromy.

Two descriptions of the same representation live here.

* The *theorem side* uses the basis labels chi in L_C of a face C.  Crossing
  from C1 to C2 fixes the shared labels and sends chi in L_{C1} \\ L_{C2} to
  sum over nonempty S in J of (-1)^{|S|+1} q_S (chi + b_S), J the wall set of
  the crossed wall oriented toward C2.  Translation by mu sends chi to chi+mu.
* The *K-theory side* uses the labels x in -L_C of the projective classes
  [P_x].  A wall map is gamma o delta with delta the label inclusion and
  gamma computed from the Koszul class of the wall, every term brought back
  to a face label with ``normalize_label``.

The identification chi <-> -chi turns one into the other; checking this is
part of the verification suite.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arrangement import Face, FaceComplex, wall_orientation, wall_set_J
from .errors import LabelOutsideBasis, NotAdjacent, TruncationUnstable
from .exactlat import WeightConfig
from .ktheory import adjoint_gamma, face_labels
from .laurent import GroupRingElement, LabeledMatrix, complex_ring, laurent_ring

# Global conventions, echoed into every report.
EXPONENT_SIGN = -1  # [P_xi] = u^{EXPONENT_SIGN * P xi} [P_{iota B xi}]
ORIENTATION_RULE = (
    "J = {i : L0(b_i) > 0} with L the wall equation positive on the target chamber; "
    "the K-theory side uses labels -L_C and the Koszul class of lambda = -L0"
)


def conventions(cfg: WeightConfig) -> dict:
    return {
        "A": cfg.A.tolist(),
        "S_iota": cfg.S_iota.tolist(),
        "K": cfg.K.tolist(),
        "exponent_sign": EXPONENT_SIGN,
        "orientation": ORIENTATION_RULE,
        "q_j": "u^(row j of K)",
        "specialization": "u_l = exp(-2 pi i alpha_l)",
        "index_base": 0,
    }


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


# --------------------------------------------------------------------------
# labels and monomials


def normalize_label(cfg: WeightConfig, xi: Sequence[int]) -> tuple[tuple[int, ...], GroupRingElement]:
    """xi in Z^d -> (B xi, u^{-P xi}) with [P_xi] = u^{-P xi} [P_{iota B xi}]."""
    xi = tuple(int(x) for x in xi)
    Bx, Px = cfg.decompose(xi)
    return tuple(Bx), GroupRingElement.monomial(tuple(EXPONENT_SIGN * x for x in Px))


def q_monomials(cfg: WeightConfig) -> list[GroupRingElement]:
    return [GroupRingElement.monomial(row) for row in cfg.K.rows]


def specialize_value(g, alpha):
    """Evaluate a Laurent polynomial at u = exp(-2 pi i alpha)."""
    logs = [-2j * np.pi * complex(a) for a in alpha]
    return g.evaluate_log(logs)


def specialize_matrix(M: LabeledMatrix, alpha, tol: float = 1e-9) -> LabeledMatrix:
    return M.map(lambda g: specialize_value(g, alpha), complex_ring(tol))


def koszul_class(
    cfg: WeightConfig, lam: Sequence[int], chi: Sequence[int], labels=None
) -> dict[tuple[int, ...], GroupRingElement]:
    """sum over S in J_lam of (-1)^{|S|} [P_{chi - e_S}] with J_lam = {j : <lam, b_j> < 0}.

    ``chi`` is a character of the big torus (length d); the result is keyed
    by face labels.  With ``labels`` given, every label must belong to it.
    """
    J = [j for j, b in enumerate(cfg.b) if _dot(lam, b) < 0]
    out: dict = {}
    m = cfg.m
    for k in range(len(J) + 1):
        for S in itertools.combinations(J, k):
            xi = list(chi)
            for j in S:
                xi[j] -= 1
            lab, mono = normalize_label(cfg, xi)
            if labels is not None and lab not in labels:
                raise LabelOutsideBasis(f"label {lab} is not in the face basis")
            out[lab] = out.get(lab, GroupRingElement.zero(m)) + mono * ((-1) ** k)
    return {k: v for k, v in out.items() if not v.is_zero()}


def koszul_gamma(cx: FaceComplex, facet: Face, chamber: Face) -> LabeledMatrix:
    """gamma: E_facet -> E_chamber from the Koszul cone classes.

    A moving label x goes to [P_x] - [C_{lambda, x}], which only involves
    chamber labels.
    """
    cfg = cx.cfg
    f, s = wall_orientation(cx, facet, chamber)
    lam = tuple(-s * x for x in cx.normals[f])
    src = face_labels(cx, facet)
    tgt = face_labels(cx, chamber)
    tset = set(tgt)
    ring = laurent_ring(cfg.m)
    M = LabeledMatrix(ring, tgt, src)
    for x in src:
        if x in tset:
            M.set(x, x, GroupRingElement.one(cfg.m))
            continue
        cls = koszul_class(cfg, lam, cfg.iota(x))
        one = GroupRingElement.one(cfg.m)
        if cls.get(x) != one:
            raise LabelOutsideBasis("leading Koszul term is not [P_x]")
        for lab, coeff in cls.items():
            if lab == x:
                continue
            if lab not in tset:
                raise LabelOutsideBasis(f"Koszul term {lab} outside the chamber basis {tgt}")
            M.set(lab, x, -coeff)
    return M


def delta_matrix(cfg: WeightConfig, big_labels, small_labels) -> LabeledMatrix:
    """Label inclusion E_C -> E_C' for C' <= C (labels of C inside labels of C')."""
    ring = laurent_ring(cfg.m)
    M = LabeledMatrix(ring, big_labels, small_labels)
    bset = set(big_labels)
    for x in small_labels:
        if x not in bset:
            raise LabelOutsideBasis(f"{x} is not a label of the smaller face")
        M.set(x, x, GroupRingElement.one(cfg.m))
    return M


# --------------------------------------------------------------------------
# wall crossings and translations


def common_facet(cx: FaceComplex, c1: Face, c2: Face) -> Face:
    for f in cx.subfaces(c1):
        if f.dim == cx.n - 1 and cx.leq(f, c2):
            return f
    raise NotAdjacent("chambers do not share a facet")


def wall_crossing_matrix(cx: FaceComplex, c1: Face, c2: Face, side: str = "theorem", alpha=None) -> LabeledMatrix:
    """Matrix of the crossing c1 -> c2; columns are images of the source basis."""
    cfg = cx.cfg
    c0 = common_facet(cx, c1, c2)
    if side == "theorem":
        M = _theorem_wall(cx, c0, c1, c2)
    elif side == "ktheory":
        M = koszul_gamma(cx, c0, c2) @ delta_matrix(cfg, face_labels(cx, c0), face_labels(cx, c1))
    else:
        raise ValueError(f"unknown side {side!r}")
    return M if alpha is None else specialize_matrix(M, alpha)


def _theorem_wall(cx: FaceComplex, c0: Face, c1: Face, c2: Face) -> LabeledMatrix:
    cfg = cx.cfg
    src = cx.lattice_points(c1)
    tgt = cx.lattice_points(c2)
    tset = set(tgt)
    J = wall_set_J(cx, c0, c2)
    q = q_monomials(cfg)
    M = LabeledMatrix(laurent_ring(cfg.m), tgt, src)
    for chi in src:
        if chi in tset:
            M.set(chi, chi, GroupRingElement.one(cfg.m))
            continue
        for k in range(1, len(J) + 1):
            for S in itertools.combinations(J, k):
                lab = tuple(c + sum(cfg.b[j][i] for j in S) for i, c in enumerate(chi))
                if lab not in tset:
                    raise LabelOutsideBasis(f"image label {lab} not in target basis {tgt}")
                coeff = GroupRingElement.const(cfg.m, (-1) ** (k + 1))
                for j in S:
                    coeff = coeff * q[j]
                M.add_to(lab, chi, coeff)
    return M


def translation_matrix(cx: FaceComplex, mu: Sequence[int], face: Face, side: str = "theorem") -> LabeledMatrix:
    cfg = cx.cfg
    mu = tuple(mu)
    target = cx.translate(face, mu)
    ring = laurent_ring(cfg.m)
    if side == "theorem":
        src = cx.lattice_points(face)
        M = LabeledMatrix(ring, cx.lattice_points(target), src)
        for chi in src:
            M.set(tuple(a + b for a, b in zip(chi, mu)), chi, GroupRingElement.one(cfg.m))
        return M
    src = face_labels(cx, face)
    M = LabeledMatrix(ring, face_labels(cx, target), src)
    for x in src:
        xi = tuple(a - b for a, b in zip(cfg.iota(x), cfg.iota(mu)))
        lab, mono = normalize_label(cfg, xi)
        M.add_to(lab, x, mono)
    return M


def to_other_side(M: LabeledMatrix) -> LabeledMatrix:
    """Relabel chi -> -chi (theorem-side labels to K-theory labels and back)."""
    neg = lambda x: tuple(-a for a in x)  # noqa: E731
    return M.relabel(neg, neg)


# --------------------------------------------------------------------------
# galleries inside a star


def star_adjacency(cx: FaceComplex, chamber: Face, center: Face) -> list[Face]:
    out = []
    for f in cx.subfaces(chamber):
        if f.dim == cx.n - 1 and cx.leq(center, f):
            a, b = cx.chambers_of_facet(f)
            out.append(b if a == chamber else a)
    return out


def minimal_gallery(cx: FaceComplex, c1: Face, c3: Face, center: Face) -> list[Face]:
    """Shortest chain of adjacent chambers from c1 to c3 inside the star of center."""
    prev = {c1: None}
    dq = deque([c1])
    while dq:
        c = dq.popleft()
        if c == c3:
            break
        for nb in star_adjacency(cx, c, center):
            if nb not in prev:
                prev[nb] = c
                dq.append(nb)
    if c3 not in prev:
        raise NotAdjacent("no gallery inside the star")
    path = [c3]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def gallery_matrix(cx: FaceComplex, gallery: list[Face], side: str = "theorem") -> LabeledMatrix:
    cfg = cx.cfg
    labels = cx.lattice_points if side == "theorem" else (lambda f: face_labels(cx, f))
    M = LabeledMatrix.identity(laurent_ring(cfg.m), labels(gallery[0]))
    for a, b in zip(gallery, gallery[1:]):
        M = wall_crossing_matrix(cx, a, b, side) @ M
    return M


# --------------------------------------------------------------------------
# groupoid representation


@dataclass
class GroupoidRep:
    """Generators of the action groupoid on chamber classes.

    ``walls`` maps (source code, target code) to the crossing matrix;
    ``translations`` maps (chamber code, mu) to the translation matrix.
    """

    cfg: WeightConfig
    side: str
    chambers: list
    walls: dict = field(default_factory=dict)
    translations: dict = field(default_factory=dict)
    ring_name: str = ""
    metadata: dict = field(default_factory=dict)

    def specialize(self, alpha, tol: float = 1e-9) -> "GroupoidRep":
        return GroupoidRep(
            self.cfg,
            self.side,
            self.chambers,
            {k: specialize_matrix(v, alpha, tol) for k, v in self.walls.items()},
            {k: specialize_matrix(v, alpha, tol) for k, v in self.translations.items()},
            ring_name="C",
            metadata=dict(self.metadata, alpha=[[complex(a).real, complex(a).imag] for a in alpha]),
        )

    def to_json(self):
        def enc(M):
            return M.to_json()

        return {
            "side": self.side,
            "ring": self.ring_name,
            "chambers": [
                {"code": list(c.code), "rep": [str(x) for x in c.rep]} for c in self.chambers
            ],
            "walls": [
                {"source": list(s), "target": list(t), "matrix": enc(M)}
                for (s, t), M in self.walls.items()
            ],
            "translations": [
                {"chamber": list(c), "mu": list(mu), "matrix": enc(M)}
                for (c, mu), M in self.translations.items()
            ],
            "metadata": self.metadata,
        }


def build_monodromy_rep(cx: FaceComplex, side: str = "theorem", alpha=None) -> GroupoidRep:
    cfg = cx.cfg
    rep = GroupoidRep(cfg, side, list(cx.chamber_classes), ring_name=f"Z[X(H)], m={cfg.m}")
    for c1, c2, _ in cx.wall_generators():
        rep.walls[(c1.code, c2.code)] = wall_crossing_matrix(cx, c1, c2, side)
    for c in cx.chamber_classes:
        for k in range(cx.n):
            mu = tuple(int(i == k) for i in range(cx.n))
            rep.translations[(c.code, mu)] = translation_matrix(cx, mu, c, side)
    rep.metadata = {"conventions": conventions(cfg)}
    if alpha is not None:
        from .resonance import is_nonresonant

        rep = rep.specialize(alpha)
        rep.metadata["nonresonant"] = is_nonresonant(cfg, alpha)
    return rep


# --------------------------------------------------------------------------
# relation suites


def check_collinear_relations(cx: FaceComplex, side: str = "theorem", triples=None, override=None):
    """Check wall(C1->C3) = wall(C2->C3) wall(C1->C2) on collinear triples.

    Non-adjacent pairs are joined by a minimal gallery in the star of the
    common face.  ``override`` maps (code1, code2) to a replacement matrix
    (fault injection).  Returns the list of failing triples.
    """
    from .arrangement import collinear_triples

    triples = collinear_triples(cx) if triples is None else triples
    cache = {}

    def w(a, b, center):
        key = (a.code, b.code)
        if override and key in override:
            return override[key]
        if key not in cache:
            cache[key] = gallery_matrix(cx, minimal_gallery(cx, a, b, center), side)
        return cache[key]

    from .arrangement import common_lower_bound

    failures = []
    for c1, c2, c3 in triples:
        center = common_lower_bound(cx, [c1, c2, c3])
        lhs = w(c1, c3, center)
        rhs = w(c2, c3, center) @ w(c1, c2, center)
        if not lhs.equals(rhs):
            failures.append((c1, c2, c3))
    return failures, len(triples)


def check_semidirect_relations(cx: FaceComplex, side: str = "theorem", shifts=None):
    """Translations conjugate crossings to translated crossings; translations compose."""
    n = cx.n
    if shifts is None:
        shifts = [tuple(int(i == k) for i in range(n)) for k in range(n)]
        shifts += [tuple(-x for x in s) for s in shifts]
        if n > 1:
            shifts.append(tuple(1 for _ in range(n)))
    failures = []
    for c1, c2, _ in cx.wall_generators():
        W = wall_crossing_matrix(cx, c1, c2, side)
        for mu in shifts:
            d1, d2 = cx.translate(c1, mu), cx.translate(c2, mu)
            lhs = translation_matrix(cx, mu, c2, side) @ W
            rhs = wall_crossing_matrix(cx, d1, d2, side) @ translation_matrix(cx, mu, c1, side)
            if not lhs.equals(rhs):
                failures.append(("conjugation", c1.code, c2.code, mu))
    for c in cx.chamber_classes:
        for mu, nu in itertools.product(shifts, repeat=2):
            tot = tuple(a + b for a, b in zip(mu, nu))
            lhs = translation_matrix(cx, nu, cx.translate(c, mu), side) @ translation_matrix(cx, mu, c, side)
            if not lhs.equals(translation_matrix(cx, tot, c, side)):
                failures.append(("composition", c.code, mu, nu))
        back = translation_matrix(cx, tuple(-x for x in shifts[0]), cx.translate(c, shifts[0]), side)
        if not (back @ translation_matrix(cx, shifts[0], c, side)).is_identity():
            failures.append(("inverse", c.code, shifts[0]))
    return failures


def check_side_consistency(cx: FaceComplex):
    """Theorem-side and K-theory-side generators agree after chi -> -chi."""
    bad = []
    for c1, c2, _ in cx.wall_generators():
        T = to_other_side(wall_crossing_matrix(cx, c1, c2, "theorem"))
        K = wall_crossing_matrix(cx, c1, c2, "ktheory")
        if not T.equals(K):
            bad.append(("wall", c1.code, c2.code))
    for c in cx.chamber_classes:
        for k in range(cx.n):
            mu = tuple(int(i == k) for i in range(cx.n))
            T = to_other_side(translation_matrix(cx, mu, c, "theorem"))
            K = translation_matrix(cx, mu, c, "ktheory")
            if not T.equals(K):
                bad.append(("translation", c.code, mu))
    return bad


# --------------------------------------------------------------------------
# the KS datum


def ks_window(cx: FaceComplex) -> list[Face]:
    """Cofaces of the canonical representatives plus all their subfaces."""
    faces = set(cx.classes)
    for f in cx.classes:
        faces.update(cx.cofaces(f))
    for f in list(faces):
        faces.update(cx.subfaces(f))
    return sorted(faces)


def build_ks_datum(cx: FaceComplex, N: int = 6, cross_check: bool = True):
    """Equivariant KS datum over Z[X(H)] on a finite window of faces.

    delta is the label inclusion.  gamma for facet <= chamber comes from the
    Koszul classes; for every other incident pair it is the pairing adjoint of
    delta (orders N and N+1 must agree).  Where both apply they are compared.
    """
    from .ksdata import EquivKSDatum, KSDatum

    cfg = cx.cfg
    faces = ks_window(cx)
    fset = set(faces)
    labels = {f: face_labels(cx, f) for f in faces}
    ring = laurent_ring(cfg.m)
    gamma, delta = {}, {}
    cross = []
    adj_cache: dict = {}

    def adjoint(small: Face, big: Face):
        # translation invariant: compute on the class representative pair
        shift = small.shift
        key = (small.cls, cx.translate(big, tuple(-x for x in shift)).code)
        if key not in adj_cache:
            s0 = cx.translate(small, tuple(-x for x in shift))
            b0 = cx.translate(big, tuple(-x for x in shift))
            adj_cache[key] = adjoint_gamma(cfg, labels_of(s0), labels_of(b0), N).to_labeled()
        M = adj_cache[key]
        neg = tuple(-x for x in shift)
        mv = lambda x: tuple(a + b for a, b in zip(x, neg))  # noqa: E731
        return M.relabel(mv, mv)

    def labels_of(f):
        return labels[f] if f in labels else face_labels(cx, f)

    for big in faces:
        for small in cx.subfaces(big):
            if small not in fset:
                continue
            delta[(big, small)] = delta_matrix(cfg, labels[small], labels[big])
            if big.dim == cx.n and small.dim == cx.n - 1:
                g = koszul_gamma(cx, small, big)
                if cross_check:
                    ga = adjoint(small, big)
                    if not g.equals(ga.reindexed(g.row_labels, g.col_labels)):
                        cross.append((small, big))
            else:
                g = adjoint(small, big)
            gamma[(small, big)] = g.reindexed(labels[big], labels[small])
    ks = KSDatum(
        faces=faces,
        leq=cx.leq,
        labels=labels,
        gamma=gamma,
        delta=delta,
        ring=ring,
        dim={f: f.dim for f in faces},
    )
    eks = EquivKSDatum(
        ks=ks,
        translate_face=cx.translate,
        translation_matrix=lambda mu, f: translation_matrix(cx, mu, f, "ktheory"),
        n=cx.n,
    )
    eks.cross_check_failures = cross
    return eks
