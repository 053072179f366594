"""The cone sigma spanned by the a_i, its dual, non-resonance tests and volume."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .errors import NotFullDimensional
from .exactlat import IntMatrix, WeightConfig, int_det, line_key, primitive, rank, rational_kernel_vector, rational_solve
from .laurent import GroupRingElement


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class ConeDescription:
    rays: tuple  # generators of the cone
    facet_normals: tuple  # inner normals
    dim: int


def _orient_all_nonneg(mu, points):
    vals = [_dot(mu, p) for p in points]
    if all(v >= 0 for v in vals):
        return tuple(mu)
    if all(v <= 0 for v in vals):
        return tuple(-x for x in mu)
    return None


def dual_cone_rays(cfg: WeightConfig) -> list[tuple[int, ...]]:
    """Rays of sigma^dual = {y : <y, a_i> >= 0}, by incremental double description."""
    m = cfg.m
    pts = [tuple(a) for a in cfg.a]
    if m == 0:
        return []
    if rank(IntMatrix(pts)) < m:
        raise NotFullDimensional("the a_i do not span R^m")
    # start from m independent inequalities: the cone is simplicial
    basis = []
    for i, p in enumerate(pts):
        if rank(IntMatrix([pts[j] for j in basis] + [p])) > len(basis):
            basis.append(i)
        if len(basis) == m:
            break
    rays = []
    Ab = IntMatrix([pts[i] for i in basis])
    for k in range(m):
        e = [int(j == k) for j in range(m)]
        x = rational_solve(Ab, e)
        den = math.lcm(*[Fraction(v).denominator for v in x])
        rays.append(primitive([int(v * den) for v in x]))
    added = list(basis)
    for i, p in enumerate(pts):
        if i in basis:
            continue
        vals = [_dot(r, p) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        neg = [r for r, v in zip(rays, vals) if v < 0]
        zer = [r for r, v in zip(rays, vals) if v == 0]
        new = pos + zer
        for rp in pos:
            for rn in neg:
                tight = [pts[j] for j in added if _dot(pts[j], rp) == 0 and _dot(pts[j], rn) == 0]
                if (rank(IntMatrix(tight)) if tight else 0) != m - 2:
                    continue
                vp, vn = _dot(rp, p), _dot(rn, p)
                comb = [vp * b - vn * a for a, b in zip(rp, rn)]
                new.append(primitive(comb))
        rays = sorted(set(new))
        added.append(i)
    return sorted(set(rays))


def facet_normals_direct(cfg: WeightConfig) -> list[tuple[int, ...]]:
    """Inner facet normals of sigma by brute force over (m-1)-subsets."""
    m = cfg.m
    pts = [tuple(a) for a in cfg.a]
    if m == 0:
        return []
    if m == 1:
        return [_orient_all_nonneg((1,), pts)]
    out = set()
    for S in itertools.combinations(range(len(pts)), m - 1):
        rows = [pts[i] for i in S]
        if rank(IntMatrix(rows)) != m - 1:
            continue
        mu = _orient_all_nonneg(rational_kernel_vector(rows, m), pts)
        if mu is not None:
            out.add(mu)
    return sorted(out)


def spanned_hyperplane_normals(cfg: WeightConfig) -> list[tuple[int, ...]]:
    """Normals of all hyperplanes spanned by subsets of the a_i."""
    m = cfg.m
    pts = [tuple(a) for a in cfg.a]
    if m == 1:
        return [(1,)]
    out = set()
    for S in itertools.combinations(range(len(pts)), m - 1):
        rows = [pts[i] for i in S]
        if rank(IntMatrix(rows)) == m - 1:
            out.add(line_key(rational_kernel_vector(rows, m)))
    return sorted(out)


def cone_description(cfg: WeightConfig) -> ConeDescription:
    return ConeDescription(
        rays=tuple(sorted({tuple(a) for a in cfg.a})),
        facet_normals=tuple(facet_normals_direct(cfg)),
        dim=cfg.m,
    )


# --------------------------------------------------------------------------
# integrality policy


def _is_exact(x) -> bool:
    return isinstance(x, (int, Rational))


def is_integer_value(z, tol: float = 1e-9) -> bool:
    if _is_exact(z):
        return Fraction(z).denominator == 1
    z = complex(z)
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def _pairing(mu, alpha):
    if all(_is_exact(a) for a in alpha):
        return sum(Fraction(m) * Fraction(a) for m, a in zip(mu, alpha))
    return sum(m * complex(a) for m, a in zip(mu, alpha))


def is_nonresonant(cfg: WeightConfig, alpha: Sequence, tol: float = 1e-9, rays=None) -> bool:
    rays = dual_cone_rays(cfg) if rays is None else rays
    return not any(is_integer_value(_pairing(r, alpha), tol) for r in rays)


def nonresonance_conditions(cfg: WeightConfig) -> list[tuple[int, ...]]:
    """The covectors whose pairings with alpha must be non-integral."""
    return dual_cone_rays(cfg)


def is_nonresonant_direct(cfg: WeightConfig, alpha: Sequence, tol: float = 1e-9) -> bool:
    return not any(is_integer_value(_pairing(mu, alpha), tol) for mu in facet_normals_direct(cfg))


def is_totally_nonresonant(cfg: WeightConfig, alpha: Sequence, tol: float = 1e-9) -> bool:
    return not any(is_integer_value(_pairing(mu, alpha), tol) for mu in spanned_hyperplane_normals(cfg))


def re_in_negative_cone(cfg: WeightConfig, alpha: Sequence, margin: float = 1e-12) -> bool:
    """Re alpha is a combination of the a_i with all coefficients strictly negative."""
    exact = all(_is_exact(a) for a in alpha)
    re = [Fraction(a) if exact else complex(a).real for a in alpha]
    for mu in facet_normals_direct(cfg):
        v = -sum(m * r for m, r in zip(mu, re))
        if v <= (0 if exact else margin):
            return False
    return True


# --------------------------------------------------------------------------
# normalized volume



def _pulling(indices: list[int], coords: dict, k: int) -> list[tuple[int, ...]]:
    """Pulling triangulation of cone(points) of dimension k; returns index tuples of simplicial cones."""
    if k == 1:
        return [(indices[0],)]
    v0 = indices[0]
    out = []
    for facet in _cone_facets(indices, coords, k):
        if v0 in facet:
            continue
        sub = _pulling(sorted(facet), _reduce_coords(facet, coords), k - 1)
        out.extend((v0,) + s for s in sub)
    return out


def _cone_facets(indices, coords, k):
    facets = set()
    for S in itertools.combinations(indices, k - 1):
        rows = [coords[i] for i in S]
        den = math.lcm(*[Fraction(x).denominator for r in rows for x in r]) if rows else 1
        irows = [[int(x * den) for x in r] for r in rows]
        if rank(IntMatrix(irows, ncols=k)) != k - 1:
            continue
        mu = rational_kernel_vector(irows, k)
        vals = [sum(Fraction(a) * b for a, b in zip(mu, coords[i])) for i in indices]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            facets.add(frozenset(i for i, v in zip(indices, vals) if v == 0))
    return sorted(facets, key=sorted)


def _reduce_coords(facet, coords):
    idx = sorted(facet)
    pts = [coords[i] for i in idx]
    basis = []
    for j in range(len(pts)):
        trial = basis + [j]
        den = math.lcm(*[Fraction(x).denominator for t in trial for x in pts[t]])
        M = IntMatrix([[int(x * den) for x in pts[t]] for t in trial])
        if rank(M) == len(trial):
            basis = trial
    cols = [[Fraction(pts[b][r]) for b in basis] for r in range(len(pts[0]))]
    out = {}
    for i, p in zip(idx, pts):
        out[i] = tuple(_solve_frac(cols, p))
    return out


def _solve_frac(cols, p):
    den = math.lcm(*[x.denominator for r in cols for x in r], *[Fraction(x).denominator for x in p])
    M = [[int(x * den) for x in r] for r in cols]
    b = [int(Fraction(x) * den) for x in p]
    return rational_solve(M, b)


def triangulate(cfg: WeightConfig) -> list[tuple[int, ...]]:
    """Pulling triangulation of conv(a_i) as index tuples (duplicate points removed)."""
    pts = []
    idx = []
    seen = set()
    for i, a in enumerate(cfg.a):
        if tuple(a) not in seen:
            seen.add(tuple(a))
            pts.append(tuple(a))
            idx.append(i)
    coords = {i: tuple(Fraction(x) for x in p) for i, p in zip(idx, pts)}
    return _pulling(idx, coords, cfg.m)


def normalized_volume(cfg: WeightConfig) -> int:
    """Normalized volume of conv(a_i) inside <h, x> = 1."""
    if cfg.m == 0:
        return 1
    a = cfg.a
    return sum(abs(int_det(IntMatrix([a[i] for i in s]))) for s in triangulate(cfg))


def F_element(cfg: WeightConfig) -> GroupRingElement:
    m = cfg.m
    F = GroupRingElement.one(m)
    for r in dual_cone_rays(cfg):
        F = F * (GroupRingElement.one(m) - GroupRingElement.monomial(r))
    return F


def F_factors(cfg: WeightConfig) -> list[tuple[int, ...]]:
    return dual_cone_rays(cfg)
