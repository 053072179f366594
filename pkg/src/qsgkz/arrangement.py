"""The zonotope, the periodic hyperplane arrangement and its faces.

Every hyperplane of the arrangement belongs to a *family*: a primitive normal
lambda together with an offset c, the family being {x : <lambda,x> - c in Z}.
A face is encoded by its *code*: for each family, 2k if the face lies on the
hyperplane <lambda,x> - c = k, and 2k+1 if it lies strictly between k and
k+1.  Codes identify faces uniquely, translate by 2<lambda,mu> under x -> x+mu,
and make the closure order a coordinatewise test.

No sign is put in front of Delta when forming its translates: the weights
sum to zero, so -Delta = Delta and both choices give the same arrangement.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import DegenerateArrangement, NotAWallPair
from .exactlat import (
    IntMatrix,
    WeightConfig,
    int_det,
    line_key,
    primitive,
    rank,
    rational_inverse,
    rational_kernel_vector,
)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _floor(q: Fraction) -> int:
    return math.floor(q)


# --------------------------------------------------------------------------
# zonotope


@dataclass(frozen=True)
class Zonotope:
    """Delta = {sum beta_i b_i : beta_i in [-1/2, 0]}.

    ``families`` holds one (lambda, c) per facet direction, so that
    Delta = {x : |<lambda,x>| <= c for all families}.  ``facets`` lists the
    outward normals with offsets, both signs.
    """

    generators: tuple
    families: tuple  # ((lambda, c), ...)

    @property
    def facets(self):
        out = []
        for lam, c in self.families:
            out.append((lam, c))
            out.append((tuple(-x for x in lam), c))
        return out

    def contains(self, x, strict=False):
        for lam, c in self.families:
            v = abs(_dot(lam, x))
            if v > c or (strict and v == c):
                return False
        return True

    def bounding_radius(self):
        """Per-coordinate half-widths of the bounding box."""
        n = len(self.generators[0])
        return tuple(
            Fraction(sum(abs(b[k]) for b in self.generators), 4) for k in range(n)
        )

    def vertices(self):
        """Exact vertex list, for reports."""
        n = len(self.generators[0])
        out = set()
        fams = self.families
        for S in itertools.combinations(range(len(fams)), n):
            L = [fams[i][0] for i in S]
            if int_det(IntMatrix(L)) == 0:
                continue
            inv = rational_inverse(IntMatrix(L))
            for signs in itertools.product((1, -1), repeat=n):
                rhs = [s * fams[i][1] for s, i in zip(signs, S)]
                x = tuple(sum(inv[r][k] * rhs[k] for k in range(n)) for r in range(n))
                if self.contains(x):
                    out.add(x)
        return sorted(out)


def hyperplane_normals(cfg: WeightConfig) -> list[tuple[int, ...]]:
    """Primitive normals (first nonzero entry positive) of hyperplanes spanned by the b_i."""
    n = cfg.n
    bs = cfg.b
    if n == 1:
        return [(1,)]
    normals = set()
    for S in itertools.combinations(range(len(bs)), n - 1):
        rows = [bs[i] for i in S]
        if rank(IntMatrix(rows)) != n - 1:
            continue
        normals.add(line_key(rational_kernel_vector(rows, n)))
    return sorted(normals)


def zonotope(cfg: WeightConfig) -> Zonotope:
    fams = []
    for lam in hyperplane_normals(cfg):
        c = Fraction(sum(abs(_dot(lam, b)) for b in cfg.b), 4)
        fams.append((lam, c))
    return Zonotope(generators=tuple(cfg.b), families=tuple(fams))


# --------------------------------------------------------------------------
# exact strict feasibility (Fourier-Motzkin, homogeneous)


def _normalize_row(row):
    g = 0
    for x in row:
        g = math.gcd(g, abs(x))
    return tuple(x // g for x in row) if g else tuple(row)


def strict_feasible(rows: Sequence[Sequence[int]]) -> bool:
    """Is there z with a.z > 0 for every row a?  Exact, integer rows."""
    rows = {_normalize_row([int(x) for x in r]) for r in rows}
    if not rows:
        return True
    nvar = len(next(iter(rows)))
    for k in range(nvar):
        if any(not any(r) for r in rows):
            return False
        pos = [r for r in rows if r[k] > 0]
        neg = [r for r in rows if r[k] < 0]
        new = {r for r in rows if r[k] == 0}
        for p in pos:
            for q in neg:
                comb = [(-q[k]) * a + p[k] * b for a, b in zip(p, q)]
                new.add(_normalize_row(comb))
        rows = new
        if not rows:
            return True
    return not rows


# --------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class Face:
    code: tuple
    dim: int
    rep: tuple  # barycenter of the closure vertices, a point of the relative interior
    cls: int
    shift: tuple  # this face = class representative + shift
    vertices: tuple = field(compare=False, repr=False)

    @property
    def is_chamber(self):
        return self.cls >= 0 and self._n == self.dim

    @property
    def _n(self):
        return len(self.rep)

    def __hash__(self):
        return hash(self.code)

    def __eq__(self, other):
        return isinstance(other, Face) and self.code == other.code

    def __lt__(self, other):
        return (self.dim, self.code) < (other.dim, other.code)

    def short(self):
        return f"F{self.cls}{list(self.shift)}"


def _local_covectors(normals: list[tuple[int, ...]], n: int):
    """All (sign vector, witness direction) pairs of a central arrangement.

    The normals span R^n.  Rays come from (n-1)-subsets; every other face is
    the composition of the conformal rays in its closure.
    """
    rays = set()
    if n == 1:
        rays = {(1,), (-1,)}
    else:
        for S in itertools.combinations(range(len(normals)), n - 1):
            rows = [normals[i] for i in S]
            if rank(IntMatrix(rows)) != n - 1:
                continue
            w = rational_kernel_vector(rows, n)
            rays.add(w)
            rays.add(tuple(-x for x in w))

    def sign(w):
        return tuple((_dot(l, w) > 0) - (_dot(l, w) < 0) for l in normals)

    cov = {tuple([0] * len(normals)): tuple([0] * n)}
    frontier = {}
    for w in rays:
        s = sign(w)
        if s not in cov:
            cov[s] = w
            frontier[s] = w
    ray_items = list(frontier.items())
    while frontier:
        new = {}
        for s, w in frontier.items():
            for s2, w2 in ray_items:
                if any(a * b < 0 for a, b in zip(s, s2)):
                    continue
                comp = tuple(a if a else b for a, b in zip(s, s2))
                if comp not in cov and comp not in new:
                    new[comp] = tuple(a + b for a, b in zip(w, w2))
        cov.update(new)
        frontier = new
    return cov


class FaceComplex:
    """Faces of the periodic arrangement, modulo lattice translation."""

    def __init__(self, cfg: WeightConfig, fatten: Fraction | int | None = None):
        self.cfg = cfg
        self.n = cfg.n
        self.zonotope = zonotope(cfg)
        self.families = self.zonotope.families
        self.normals = [lam for lam, _ in self.families]
        self.offsets = [c for _, c in self.families]
        self.radius_Z = self._chamber_radius()
        if fatten is None:
            fatten = self.radius_Z + 1
        self.fatten = Fraction(fatten)
        self.outer = 3 * self.fatten
        self._build()

    # geometry helpers
    def _chamber_radius(self) -> Fraction:
        """l-infinity radius of {z : |<lambda_f, z>| <= 1}; bounds face diameters."""
        n = self.n
        best = Fraction(0)
        fams = self.normals
        for S in itertools.combinations(range(len(fams)), n):
            L = IntMatrix([fams[i] for i in S])
            if int_det(L) == 0:
                continue
            inv = rational_inverse(L)
            for signs in itertools.product((1, -1), repeat=n):
                z = [sum(inv[r][k] * signs[k] for k in range(n)) for r in range(n)]
                if all(abs(_dot(l, z)) <= 1 for l in fams):
                    best = max(best, max(abs(x) for x in z))
        return best

    def t_values(self, x):
        return [_dot(l, x) - c for l, c in self.families]

    def code_of_point(self, x) -> tuple:
        out = []
        for t in self.t_values(x):
            t = Fraction(t)
            if t.denominator == 1:
                out.append(2 * int(t))
            else:
                out.append(2 * _floor(t) + 1)
        return tuple(out)

    def dim_of_code(self, code) -> int:
        on = [self.normals[f] for f, c in enumerate(code) if c % 2 == 0]
        return self.n - (rank(IntMatrix(on)) if on else 0)

    def _translate_code(self, code, mu):
        return tuple(c + 2 * _dot(l, mu) for c, l in zip(code, self.normals))

    # enumeration
    def _build(self):
        n = self.n
        lo = -self.outer
        hi = 1 + self.outer
        fams = self.families
        verts = set()
        for S in itertools.combinations(range(len(fams)), n):
            L = IntMatrix([fams[i][0] for i in S])
            if int_det(L) == 0:
                continue
            inv = rational_inverse(L)
            ranges = []
            for i in S:
                lam, c = fams[i]
                tmin = sum(min(a * lo, a * hi) for a in lam) - c
                tmax = sum(max(a * lo, a * hi) for a in lam) - c
                ranges.append(range(math.ceil(tmin), math.floor(tmax) + 1))
            for ks in itertools.product(*ranges):
                rhs = [fams[i][1] + k for i, k in zip(S, ks)]
                x = tuple(sum(inv[r][j] * rhs[j] for j in range(n)) for r in range(n))
                if all(lo <= xi <= hi for xi in x):
                    verts.add(x)
        if not verts:
            raise DegenerateArrangement("no vertices found")
        cache: dict = {}
        face_verts: dict = {}
        for v in verts:
            ts = self.t_values(v)
            through = tuple(f for f, t in enumerate(ts) if Fraction(t).denominator == 1)
            if through not in cache:
                cache[through] = _local_covectors([self.normals[f] for f in through], n)
            base = []
            for t in ts:
                t = Fraction(t)
                base.append(2 * int(t) if t.denominator == 1 else 2 * _floor(t) + 1)
            for signs in cache[through]:
                code = list(base)
                for f, s in zip(through, signs):
                    code[f] += s
                face_verts.setdefault(tuple(code), []).append(v)
        complete_lo = lo + self.radius_Z
        complete_hi = hi - self.radius_Z
        self._faces_raw = {}
        for code, vs in face_verts.items():
            bary = tuple(sum(v[k] for v in vs) / len(vs) for k in range(n))
            if all(complete_lo <= x <= complete_hi for x in bary):
                self._faces_raw[code] = (bary, tuple(sorted(vs)))
        canon = []
        for code, (bary, vs) in self._faces_raw.items():
            if all(0 <= x < 1 for x in bary):
                canon.append((self.dim_of_code(code), code))
        canon.sort()
        if not any(dm == n for dm, _ in canon):
            raise DegenerateArrangement("no chambers found")
        self.classes: list[Face] = []
        self._class_of_code = {}
        for i, (dm, code) in enumerate(canon):
            bary, vs = self._faces_raw[code]
            f = Face(code=code, dim=dm, rep=bary, cls=i, shift=(0,) * n, vertices=vs)
            self.classes.append(f)
            self._class_of_code[code] = i
        self._located = {}

    # face access
    def translate(self, face: Face, mu) -> Face:
        mu = tuple(int(x) for x in mu)
        if not any(mu):
            return face
        return Face(
            code=self._translate_code(face.code, mu),
            dim=face.dim,
            rep=tuple(a + b for a, b in zip(face.rep, mu)),
            cls=face.cls,
            shift=tuple(a + b for a, b in zip(face.shift, mu)),
            vertices=tuple(tuple(a + b for a, b in zip(v, mu)) for v in face.vertices),
        )

    def face(self, code) -> Face:
        code = tuple(code)
        hit = self._located.get(code)
        if hit is not None:
            return hit
        if code in self._faces_raw:
            bary, _ = self._faces_raw[code]
            mu = tuple(_floor(x) for x in bary)
        else:
            mu = self._guess_shift(code)
        base = self._translate_code(code, tuple(-x for x in mu))
        if base not in self._class_of_code:
            raise KeyError(f"code {code} does not belong to a known face")
        f = self.translate(self.classes[self._class_of_code[base]], mu)
        self._located[code] = f
        return f

    def _guess_shift(self, code):
        # solve <lambda_f, x> ~ c_f + code_f / 2 on n independent families
        n = self.n
        for S in itertools.combinations(range(len(self.families)), n):
            L = IntMatrix([self.normals[i] for i in S])
            if int_det(L) != 0:
                break
        inv = rational_inverse(L)
        rhs = [self.offsets[i] + Fraction(code[i], 2) for i in S]
        x = [sum(inv[r][j] * rhs[j] for j in range(n)) for r in range(n)]
        base = tuple(_floor(xi) for xi in x)
        for d in itertools.product(range(-3, 4), repeat=n):
            mu = tuple(a + b for a, b in zip(base, d))
            c0 = self._translate_code(code, tuple(-y for y in mu))
            if c0 in self._class_of_code:
                return mu
        raise KeyError(f"cannot locate code {code}")

    def face_at_point(self, x) -> Face:
        return self.face(self.code_of_point(x))

    @property
    def chamber_classes(self) -> list[Face]:
        return [f for f in self.classes if f.dim == self.n]

    @staticmethod
    def leq(f1: Face, f2: Face) -> bool:
        """f1 <= f2, i.e. f1 lies in the closure of f2."""
        for a, b in zip(f1.code, f2.code):
            if b % 2 == 0:
                if a != b:
                    return False
            elif abs(a - b) > 1:
                return False
        return True

    @cached_property
    def _class_cofaces(self):
        out = []
        for f in self.classes:
            even = [i for i, c in enumerate(f.code) if c % 2 == 0]
            res = []
            for deltas in itertools.product((-1, 0, 1), repeat=len(even)):
                if not any(deltas):
                    continue
                code = list(f.code)
                for i, dl in zip(even, deltas):
                    code[i] += dl
                code = tuple(code)
                if code in self._faces_raw:
                    res.append(self.face(code))
            out.append(sorted(res))
        return out

    @cached_property
    def _class_subfaces(self):
        out = []
        for f in self.classes:
            odd = [i for i, c in enumerate(f.code) if c % 2 != 0]
            res = []
            for deltas in itertools.product((-1, 0, 1), repeat=len(odd)):
                if not any(deltas):
                    continue
                code = list(f.code)
                for i, dl in zip(odd, deltas):
                    code[i] += dl
                code = tuple(code)
                if code in self._faces_raw:
                    res.append(self.face(code))
            out.append(sorted(res))
        return out

    def cofaces(self, face: Face) -> list[Face]:
        """Faces strictly above ``face``."""
        return [self.translate(g, face.shift) for g in self._class_cofaces[face.cls]]

    def subfaces(self, face: Face) -> list[Face]:
        """Faces strictly below ``face``."""
        return [self.translate(g, face.shift) for g in self._class_subfaces[face.cls]]

    def star_chambers(self, face: Face) -> list[Face]:
        if face.dim == self.n:
            return [face]
        return [g for g in self.cofaces(face) if g.dim == self.n]

    def chambers_of_facet(self, facet: Face) -> list[Face]:
        ch = self.star_chambers(facet)
        if facet.dim != self.n - 1 or len(ch) != 2:
            raise NotAWallPair("not a facet with two chambers")
        return ch

    def walls(self):
        """(facet, chamber, chamber) for every facet class."""
        return [
            (f, *self.chambers_of_facet(f)) for f in self.classes if f.dim == self.n - 1
        ]

    def wall_generators(self):
        """Ordered adjacent chamber pairs (C1, C2, C0), both directions per facet class."""
        out = []
        for f, c1, c2 in self.walls():
            out.append((c1, c2, f))
            out.append((c2, c1, f))
        return out

    def hyperplanes_in_box(self, fatten=None):
        fatten = self.fatten if fatten is None else Fraction(fatten)
        lo, hi = -fatten, 1 + fatten
        out = []
        for lam, c in self.families:
            tmin = sum(min(a * lo, a * hi) for a in lam) - c
            tmax = sum(max(a * lo, a * hi) for a in lam) - c
            for k in range(math.ceil(tmin), math.floor(tmax) + 1):
                out.append((lam, c + k))
        return out

    def sign_vector(self, face: Face, hyperplanes=None):
        hyperplanes = hyperplanes or self.hyperplanes_in_box()
        out = []
        for lam, off in hyperplanes:
            t = _dot(lam, face.rep) - off
            out.append((t > 0) - (t < 0))
        return tuple(out)

    def interior_points(self, face: Face):
        """Two distinct relative-interior points (equal for vertices)."""
        p = face.rep
        v = face.vertices[0]
        return p, tuple((a + b) / 2 for a, b in zip(p, v))

    @cached_property
    def _lc_cache(self):
        return {}

    def lattice_points(self, face: Face) -> list[tuple[int, ...]]:
        base = self._lc_cache.get(face.cls)
        if base is None:
            base = self._lattice_points_class(self.classes[face.cls])
            self._lc_cache[face.cls] = base
        return sorted(tuple(a + b for a, b in zip(p, face.shift)) for p in base)

    def _lattice_points_class(self, face: Face):
        p1, p2 = self.interior_points(face)
        s1 = _lattice_points_around(self.zonotope, p1)
        s2 = _lattice_points_around(self.zonotope, p2)
        if s1 != s2:
            raise AssertionError(f"lattice point set depends on the interior point for {face}")
        return s1


def _lattice_points_around(Z: Zonotope, nu) -> list[tuple[int, ...]]:
    rad = Z.bounding_radius()
    ranges = [range(math.ceil(c - r), math.floor(c + r) + 1) for c, r in zip(nu, rad)]
    out = []
    for chi in itertools.product(*ranges):
        diff = tuple(a - b for a, b in zip(chi, nu))
        if Z.contains(diff):
            out.append(tuple(chi))
    return sorted(out)


def face_complex(cfg: WeightConfig, fatten=None) -> FaceComplex:
    return FaceComplex(cfg, fatten)


def lattice_points_LC(cx: FaceComplex, face: Face) -> list[tuple[int, ...]]:
    return cx.lattice_points(face)


def wall_orientation(cx: FaceComplex, facet: Face, chamber: Face):
    """(family index, sign) with sign*(<lambda_f,x> - c_f - k) the wall equation positive on chamber."""
    if facet.dim != cx.n - 1 or chamber.dim != cx.n or not cx.leq(facet, chamber):
        raise NotAWallPair("expected a facet of the given chamber")
    f = next(i for i, c in enumerate(facet.code) if c % 2 == 0)
    s = chamber.code[f] - facet.code[f]
    return f, s


def wall_set_J(cx: FaceComplex, facet: Face, chamber: Face) -> tuple[int, ...]:
    """0-based indices i with L_0(b_i) > 0, L the wall equation positive on ``chamber``."""
    f, s = wall_orientation(cx, facet, chamber)
    lam = cx.normals[f]
    return tuple(i for i, b in enumerate(cx.cfg.b) if s * _dot(lam, b) > 0)


def wall_partition(cx: FaceComplex, facet: Face, chamber: Face):
    f, s = wall_orientation(cx, facet, chamber)
    lam = cx.normals[f]
    vals = [s * _dot(lam, b) for b in cx.cfg.b]
    return (
        tuple(i for i, v in enumerate(vals) if v > 0),
        tuple(i for i, v in enumerate(vals) if v < 0),
        tuple(i for i, v in enumerate(vals) if v == 0),
    )


def is_collinear(cx: FaceComplex, c1: Face, c2: Face, c3: Face, common: Face | None = None) -> bool:
    """Exact test for chambers sharing a lower bound."""
    if common is None:
        common = common_lower_bound(cx, [c1, c2, c3])
        if common is None:
            return False
    if c2 == c1 or c2 == c3:
        return True
    fams = [i for i, c in enumerate(common.code) if c % 2 == 0]
    n = cx.n
    rows = []
    for f in fams:
        lam = cx.normals[f]
        s1 = c1.code[f] - common.code[f]
        s2 = c2.code[f] - common.code[f]
        s3 = c3.code[f] - common.code[f]
        rows.append([s1 * a for a in lam] + [0] * n)
        rows.append([0] * n + [s3 * a for a in lam])
        rows.append([s2 * a for a in lam] * 2)
    return strict_feasible(rows)


def common_lower_bound(cx: FaceComplex, faces: Sequence[Face]) -> Face | None:
    """The largest face below all given faces, if any."""
    cands = None
    for f in faces:
        below = set(cx.subfaces(f)) | {f}
        cands = below if cands is None else cands & below
    if not cands:
        return None
    return max(cands, key=lambda g: g.dim)


def collinear_triples(cx: FaceComplex, radius=None):
    """Collinear chamber triples in the stars of the canonical face classes."""
    out = []
    seen = set()
    for f in cx.classes:
        if f.dim == cx.n:
            continue
        star = cx.star_chambers(f)
        for c1, c2, c3 in itertools.product(star, repeat=3):
            key = (c1.code, c2.code, c3.code)
            if key in seen:
                continue
            if radius is not None and any(
                max(abs(x - Fraction(1, 2)) for x in c.rep) > Fraction(radius) + Fraction(1, 2)
                for c in (c1, c2, c3)
            ):
                continue
            if is_collinear(cx, c1, c2, c3, common=f):
                seen.add(key)
                out.append((c1, c2, c3))
    return out


def compute_zeta(cfg: WeightConfig):
    """Multiset {(|n_j|, b_j)} and the point exp(2 pi i zeta) (a positive real vector)."""
    data = []
    n = cfg.n
    point = [1.0] * n
    for b in cfg.b:
        g = 0
        for x in b:
            g = math.gcd(g, abs(x))
        data.append((g, tuple(b)))
        for k in range(n):
            point[k] *= float(g) ** b[k]
    log_weights = [sum(math.log(g) * b[k] for g, b in data) for k in range(n)]
    return {"multiset": data, "exp_2pi_i_zeta": point, "log_weights": log_weights}


def is_generic(cfg: WeightConfig, rho: Sequence) -> bool:
    return all(_dot(lam, rho) != 0 for lam in hyperplane_normals(cfg))


def union_check(cx: FaceComplex, face: Face) -> bool:
    if face.dim == cx.n:
        raise ValueError("union_check expects a non-chamber face")
    L = set(cx.lattice_points(face))
    U = set()
    for c in cx.star_chambers(face):
        U |= set(cx.lattice_points(c))
    return L == U
