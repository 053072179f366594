"""Numerical Mellin-Barnes integrals, Gamma series at infinity and wall monodromy.

Coordinates.  Full coordinates vhat live in C^d and restricted coordinates x
in C^n, related by vhat = S_iota x.  The MB integrand is

    exp(2 pi i (<vhat, gamma> + <B vhat, s>)) * prod_j Gamma(-gamma_j - <b_j, s>)

integrated over s in sigma + i R^n with ds = i dt (no 1/(2 pi i) prefactor).
The series attached to (I, gamma_I) is

    sum_l exp(2 pi i <x, l + iota gamma_I>) / prod_j Gamma(<b_j, l> + gamma_I,j + 1)

with l over Z^n.  Only n = 1 is supported by default; higher rank uses a tensor
Gauss-Legendre grid and must be requested with ``experimental=True``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.special import loggamma

from .arrangement import FaceComplex, Face, compute_zeta, hyperplane_normals, is_generic, wall_orientation
from .errors import (
    Diverging,
    IllConditioned,
    Infeasible,
    NotGeneric,
    NotTotallyNonResonant,
    OutsideConvergenceDomain,
    PoleOnContour,
)
from .exactlat import WeightConfig, int_det, IntMatrix
from .laurent import LabeledMatrix, complex_ring
from .resonance import is_totally_nonresonant, re_in_negative_cone
from .schober_k0 import common_facet, wall_crossing_matrix

TWO_PI_I = 2j * math.pi
PANEL_ORDER = 20
PANEL_GRADING = 5.0  # panel edges R sinh(c u) / sinh(c): fine near t = 0, coarse in the tails


def _arr(cfg: WeightConfig):
    B = np.array(cfg.B.tolist(), dtype=float)
    S = np.array(cfg.S_iota.tolist(), dtype=float)
    K = np.array(cfg.K.tolist(), dtype=float)
    A = np.array(cfg.A.tolist(), dtype=float)
    return B, S, K, A


def gamma_from_alpha(cfg: WeightConfig, alpha) -> np.ndarray:
    """The gamma with A gamma = alpha and iota gamma = 0, i.e. K alpha."""
    _, _, K, _ = _arr(cfg)
    return K @ np.asarray([complex(a) for a in alpha], dtype=complex)


# --------------------------------------------------------------------------
# contour choice


@dataclass
class MBParams:
    gamma: np.ndarray
    sigma: np.ndarray
    half_width: float = 40.0
    nodes: int = 2000
    tail_bound: float = float("nan")
    experimental: bool = False

    def exponents_re(self, cfg):
        B, *_ = _arr(cfg)
        return (self.gamma + B.T @ self.sigma).real


def choose_sigma(cfg: WeightConfig, gamma, margin: float = 1e-6) -> np.ndarray:
    """A real sigma maximizing min_j -(Re gamma_j + <b_j, sigma>), which must be positive."""
    B, *_ = _arr(cfg)
    n, d = B.shape
    g = np.real(np.asarray(gamma, dtype=complex))
    # variables (sigma, t); maximize t subject to <b_j, sigma> + t <= -Re gamma_j
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([B.T, np.ones((d, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=-g, bounds=[(-50, 50)] * n + [(None, 10.0)], method="highs")
    if res.status != 0 or -res.fun <= margin:
        raise Infeasible("no sigma makes every Re(gamma_j + <b_j, sigma>) negative")
    return np.asarray(res.x[:n], dtype=complex)


def mb_params(cfg: WeightConfig, alpha, half_width: float = 40.0, nodes: int = 2000, sigma=None, experimental=False) -> MBParams:
    if not re_in_negative_cone(cfg, alpha):
        raise Infeasible("Re alpha is not in the open negative cone over the a_i")
    gamma = gamma_from_alpha(cfg, alpha)
    if sigma is None:
        sigma = choose_sigma(cfg, gamma)
    return MBParams(gamma=gamma, sigma=np.asarray(sigma, dtype=complex), half_width=half_width, nodes=nodes, experimental=experimental)


# --------------------------------------------------------------------------
# quadrature


def _families(cfg: WeightConfig):
    out = []
    for lam in hyperplane_normals(cfg):
        c = sum(abs(sum(x * y for x, y in zip(lam, b))) for b in cfg.b) / 4
        out.append((np.array(lam, dtype=float), c))
    return out


def in_convergence_domain(cfg: WeightConfig, y_real, strict_margin: float = 0.0) -> bool:
    """Is y (a real point of R^n) in the open zonotope Delta?"""
    y = np.asarray(y_real, dtype=float)
    return all(abs(lam @ y) < c - strict_margin for lam, c in _families(cfg))


def _gl_grid(R: float, nodes: int):
    panels = max(1, nodes // PANEL_ORDER)
    x, w = np.polynomial.legendre.leggauss(PANEL_ORDER)
    c = PANEL_GRADING
    edges = R * np.sinh(c * np.linspace(-1.0, 1.0, panels + 1)) / math.sinh(c)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def _grid(n: int, R: float, nodes: int):
    t, w = _gl_grid(R, nodes)
    if n == 1:
        return t[:, None], w
    ts = np.array(list(itertools.product(t, repeat=n)))
    ws = np.prod(np.array(list(itertools.product(w, repeat=n))), axis=1)
    return ts, ws


def _check_contour(cfg, params: MBParams, tol=1e-12):
    B, *_ = _arr(cfg)
    e = params.gamma + B.T @ params.sigma
    for j, b in enumerate(cfg.b):
        if any(b):
            r = e[j].real
            if r > -tol and abs(r - round(r)) <= tol:
                raise PoleOnContour(f"Gamma factor {j} has a pole on the contour")
        elif abs(e[j].imag) <= tol and e[j].real > -tol and abs(e[j].real - round(e[j].real)) <= tol:
            raise PoleOnContour(f"Gamma factor {j} is infinite")


def _integrands(cfg, params: MBParams, vhat, factors, R, nodes):
    """Quadrature of base * factor for every factor; factors map exponents e (N x d) to arrays."""
    B, *_ = _arr(cfg)
    n = B.shape[0]
    ts, ws = _grid(n, R, nodes)
    s = params.sigma[None, :] + 1j * ts
    e = params.gamma[None, :] + s @ B  # e_j(s) = gamma_j + <b_j, s>
    logf = TWO_PI_I * (e @ vhat) + np.sum(loggamma(-e), axis=1)
    base = np.exp(logf) * (1j ** n) * ws
    out = [np.sum(base * (1.0 if f is None else f(e))) for f in factors]
    return out, (ts, np.abs(np.exp(logf)))


def _tail_estimate(ts, mag, R):
    """|f| at the edge divided by its local decay rate, summed over the boundary."""
    n = ts.shape[1]
    edge = np.max(np.abs(ts), axis=1) >= R - 1e-9 * R
    if n == 1:
        order = np.argsort(ts[:, 0])
        t, f = ts[order, 0], mag[order]
        bound = 0.0
        for side in (0, -1):
            inner = 1 if side == 0 else -2
            dt = abs(t[side] - t[inner]) or 1.0
            ratio = f[side] / f[inner] if f[inner] > 0 else 0.0
            if ratio >= 1.0 and f[side] > 1e-300:
                return float("inf")
            rate = -math.log(ratio) / dt if ratio > 0 else float("inf")
            bound += f[side] / rate if rate > 0 else 0.0
        return bound
    return float(np.max(mag[edge])) * (2 * R) ** (n - 1) if edge.any() else 0.0


def _mb_full(cfg, params: MBParams, vhat, factors, check=True):
    B, *_ = _arr(cfg)
    n = B.shape[0]
    vhat = np.asarray(vhat, dtype=complex)
    if n > 1 and not params.experimental:
        raise NotImplementedError("MB quadrature in rank > 1 requires experimental=True")
    if check and not in_convergence_domain(cfg, B @ vhat.real):
        raise OutsideConvergenceDomain(f"B Re(vhat) = {B @ vhat.real} is not inside Delta")
    _check_contour(cfg, params)
    nodes = params.nodes if n == 1 else min(params.nodes, 300)
    R = params.half_width
    vals, (ts, mag) = _integrands(cfg, params, vhat, factors, R, nodes)
    coarse, _ = _integrands(cfg, params, vhat, factors, R, max(PANEL_ORDER, nodes // 2))
    tail = _tail_estimate(ts, mag, R)
    params.tail_bound = tail
    errs = [abs(v - c) + tail for v, c in zip(vals, coarse)]
    return vals, errs


def evaluate_mb_full(cfg: WeightConfig, params: MBParams, vhat, check=True):
    (v,), (e,) = _mb_full(cfg, params, vhat, [None], check)
    return complex(v), float(e)


def evaluate_mb(cfg: WeightConfig, params: MBParams, x, check=True):
    """MB integral at the restricted point x in C^n; returns (value, error estimate)."""
    _, S, _, _ = _arr(cfg)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    return evaluate_mb_full(cfg, params, S @ x, check)


def evaluate_mb_shifted(cfg, params, x, chi):
    """hat M_chi(x) = hat M(x - chi)."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    return evaluate_mb(cfg, params, x - np.asarray(chi, dtype=float))


# --------------------------------------------------------------------------
# GKZ residuals


def _falling(e, k):
    out = np.ones_like(e)
    for r in range(k):
        out = out * (e - r)
    return out


@dataclass
class ResidualReport:
    box: list  # (l, relative residual)
    euler: list  # (phi index, relative residual)
    value: complex
    error: float

    @property
    def max_box(self):
        return max((r for _, r in self.box), default=0.0)

    @property
    def max_euler(self):
        return max((r for _, r in self.euler), default=0.0)

    @property
    def max_residual(self):
        return max(self.max_box, self.max_euler)


def gkz_residual(cfg: WeightConfig, params: MBParams, x, check=True) -> ResidualReport:
    """Box and Euler residuals of the MB integral, derivatives taken under the integral sign."""
    B, S, _, A = _arr(cfg)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    vhat = S @ x
    alpha = A @ params.gamma
    d = cfg.d
    boxes = [tuple(int(v) for v in row) for row in cfg.B.tolist()]

    def box_factor(l, positive):
        def f(e):
            out = np.ones(e.shape[0], dtype=complex)
            for i, li in enumerate(l):
                k = li if positive else -li
                if k > 0:
                    out = out * _falling(e[:, i], k) * np.exp(-TWO_PI_I * vhat[i] * k)
            return out

        return f

    def euler_factor(row):
        return lambda e: e @ row

    factors = [None]
    for l in boxes:
        factors += [box_factor(l, True), box_factor(l, False)]
    for k in range(cfg.m):
        factors.append(euler_factor(A[k].astype(complex)))
    vals, errs = _mb_full(cfg, params, vhat, factors, check)
    M = vals[0]
    out_box = []
    for idx, l in enumerate(boxes):
        t1, t2 = vals[1 + 2 * idx], vals[2 + 2 * idx]
        scale = max(abs(t1), abs(t2), abs(M))
        out_box.append((l, abs(t1 - t2) / scale))
    out_euler = []
    base = 1 + 2 * len(boxes)
    for k in range(cfg.m):
        scale = max(abs(M), abs(vals[base + k]), 1e-300)
        out_euler.append((k, abs(vals[base + k] - alpha[k] * M) / scale))
    _ = d
    return ResidualReport(out_box, out_euler, complex(M), float(errs[0]))


# --------------------------------------------------------------------------
# series at infinity


@dataclass
class SeriesParams:
    I: tuple  # 0-based indices with (b_i) a basis
    z: tuple  # integer values gamma_I,i for i in I
    t: np.ndarray  # iota gamma_I
    gamma: np.ndarray  # gamma_I, A gamma_I = alpha
    L: int = 60


def convergence_subsets(cfg: WeightConfig, rho) -> list[tuple[int, ...]]:
    """Index sets I with (b_i)_{i in I} a basis and rho in their open positive span."""
    B, *_ = _arr(cfg)
    n = cfg.n
    rho = np.asarray(rho, dtype=float)
    out = []
    for I in itertools.combinations(range(cfg.d), n):
        BI = B[:, I]
        if int_det(IntMatrix([list(cfg.b[i]) for i in I])) == 0:
            continue
        beta = np.linalg.solve(BI, rho)
        if np.all(beta > 1e-12):
            out.append(I)
    return out


def _coset_reps(cfg: WeightConfig, I):
    """Representatives z of Z^I modulo the image of t -> (<b_i, t>)_{i in I}."""
    BIt = np.array([list(cfg.b[i]) for i in I], dtype=float)  # rows b_i
    D = abs(int_det(IntMatrix([list(cfg.b[i]) for i in I])))
    inv = np.linalg.inv(BIt)
    reps = []
    for z in itertools.product(range(D), repeat=cfg.n):
        z = np.array(z, dtype=float)
        if all(not np.allclose(inv @ (z - r), np.round(inv @ (z - r)), atol=1e-9) for r in reps):
            reps.append(z)
        if len(reps) == D:
            break
    return [tuple(int(v) for v in r) for r in reps], D


def series_basis(cfg: WeightConfig, rho, alpha, L: int = 60, tol: float = 1e-9) -> list[SeriesParams]:
    rho = tuple(rho)
    if not any(rho) or not is_generic(cfg, rho):
        raise NotGeneric(f"direction {rho} lies on a hyperplane spanned by the b_i")
    if not is_totally_nonresonant(cfg, alpha, tol):
        raise NotTotallyNonResonant("alpha is resonant for some spanned hyperplane")
    B, S, K, A = _arr(cfg)
    g0 = gamma_from_alpha(cfg, alpha)
    out = []
    for I in convergence_subsets(cfg, rho):
        BIt = np.array([list(cfg.b[i]) for i in I], dtype=float)
        reps, _ = _coset_reps(cfg, I)
        for z in reps:
            t = np.linalg.solve(BIt, np.array(z, dtype=complex) - g0[list(I)])
            gam = g0 + B.T @ t
            for k, i in enumerate(I):
                gam[i] = z[k]
            out.append(SeriesParams(I=tuple(I), z=z, t=t, gamma=gam, L=L))
    return out


def _pole_mask(args, tol=1e-12):
    r = np.real(args)
    return (np.abs(np.imag(args)) <= tol) & (r < 0.5) & (np.abs(r - np.round(r)) <= tol)


def series_term(cfg: WeightConfig, sp: SeriesParams, x, l) -> complex:
    """One term; exactly 0 when some Gamma argument is a non-positive integer."""
    B, *_ = _arr(cfg)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    l = np.asarray(l, dtype=float)
    args = B.T @ l + sp.gamma + 1
    if _pole_mask(args).any():
        return 0j
    return complex(np.exp(TWO_PI_I * (x @ (l + sp.t)) - np.sum(loggamma(args))))


def _series_ls(cfg, sp: SeriesParams, L: int):
    """Lattice points l with k = B_I^T l + z in N^n, |k| <= L, grouped by |k|."""
    BIt = np.array([list(cfg.b[i]) for i in sp.I], dtype=float)
    inv = np.linalg.inv(BIt)
    z = np.array(sp.z, dtype=float)
    ls, shells = [], []
    for k in itertools.product(range(L + 1), repeat=cfg.n):
        if sum(k) > L:
            continue
        l = inv @ (np.array(k, dtype=float) - z)
        lr = np.round(l)
        if np.allclose(l, lr, atol=1e-9):
            ls.append(lr)
            shells.append(sum(k))
    return np.array(ls), np.array(shells)


def series_with_error(cfg: WeightConfig, sp: SeriesParams, x, L: int | None = None):
    """Partial sum and a term-decay error estimate."""
    B, *_ = _arr(cfg)
    L = sp.L if L is None else L
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    ls, shells = _series_ls(cfg, sp, L)
    args = ls @ B + sp.gamma[None, :] + 1
    poles = _pole_mask(args).any(axis=1)
    safe = np.where(_pole_mask(args), 1.0, args)
    logt = TWO_PI_I * ((ls + sp.t[None, :]) @ x) - np.sum(loggamma(safe), axis=1)
    terms = np.where(poles, 0.0, np.exp(logt))
    value = complex(np.sum(terms))
    mags = np.abs(terms)
    last = mags[shells >= L - 1].max(initial=0.0)
    mid = mags[(shells >= L // 2 - 1) & (shells <= L // 2)].max(initial=0.0)
    if last > max(mid, 1e-300) and last > 1e-14 * max(abs(value), 1e-300):
        raise Diverging(f"series terms grow: {mid:.3g} at |k|~{L // 2}, {last:.3g} at |k|~{L}")
    return value, float(last * 10)


def evaluate_series(cfg: WeightConfig, sp: SeriesParams, x, L: int | None = None) -> complex:
    return series_with_error(cfg, sp, x, L)[0]


# --------------------------------------------------------------------------
# connection coefficients and wall monodromy


def bridge_height(cfg: WeightConfig, extra: float = 0.5) -> float:
    """|Im zeta| + extra; the series at infinity converge beyond this height."""
    lw = compute_zeta(cfg)["log_weights"]
    return max(abs(v) for v in lw) / (2 * math.pi) + extra


def _chamber_samples(face: Face, k: int, lo=0.3, hi=0.7):
    """k points on a segment through the chamber (n = 1: its interval)."""
    verts = [np.array([float(v) for v in p]) for p in face.vertices]
    a = min(verts, key=lambda v: tuple(v))
    b = max(verts, key=lambda v: tuple(v))
    return [a + (b - a) * s for s in np.linspace(lo, hi, k)]


@dataclass
class ConnectionResult:
    labels: list
    basis: list
    coef: np.ndarray  # rows chi, columns I
    lsq_residual: float
    a: np.ndarray  # chi-independent factors a_I
    factorization_residual: float
    ratio_residual: float
    cond: float
    points: list = field(default_factory=list)


def connection_matrix(
    cx: FaceComplex,
    C: Face,
    rho,
    alpha,
    params: MBParams | None = None,
    basis: list | None = None,
    height: float | None = None,
    samples: int | None = None,
    cond_limit: float = 1e10,
) -> ConnectionResult:
    """Coefficients c_{chi,I} with hat M_chi = sum_I c_{chi,I} hat Phi_I on C x i u rho."""
    cfg = cx.cfg
    if cfg.n != 1 and not (params is not None and params.experimental):
        raise NotImplementedError("connection matrices are implemented for n = 1")
    params = mb_params(cfg, alpha) if params is None else params
    basis = series_basis(cfg, rho, alpha) if basis is None else basis
    u = bridge_height(cfg) if height is None else height
    labels = cx.lattice_points(C)
    k = samples or max(2 * len(basis), 6)
    rho_v = np.asarray(rho, dtype=float)
    pts = [p + 1j * u * rho_v / np.linalg.norm(rho_v) for p in _chamber_samples(C, k)]
    V = np.array([[evaluate_series(cfg, sp, x) for sp in basis] for x in pts])
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditioned(f"series sample matrix has condition number {cond:.3g}")
    rhs = np.array([[evaluate_mb_shifted(cfg, params, x, chi)[0] for chi in labels] for x in pts])
    coef_t, *_ = np.linalg.lstsq(V, rhs, rcond=None)
    resid = float(np.linalg.norm(V @ coef_t - rhs) / max(np.linalg.norm(rhs), 1e-300))
    coef = coef_t.T  # rows chi
    phases = np.array([[np.exp(TWO_PI_I * (np.asarray(chi, dtype=float) @ sp.t)) for sp in basis] for chi in labels])
    a_rows = coef * phases
    a = a_rows.mean(axis=0)
    fact = float(np.max(np.abs(a_rows - a[None, :]) / np.maximum(np.abs(a[None, :]), 1e-300)))
    ratio = 0.0
    for (i, chi), (j, chj) in itertools.combinations(enumerate(labels), 2):
        for c, sp in enumerate(basis):
            want = np.exp(-TWO_PI_I * ((np.asarray(chi, dtype=float) - np.asarray(chj, dtype=float)) @ sp.t))
            got = coef[i, c] / coef[j, c]
            ratio = max(ratio, abs(got - want) / abs(want))
    return ConnectionResult(labels, basis, coef, resid, a, fact, float(ratio), cond, pts)


def bridge_direction(cx: FaceComplex, c1: Face, c2: Face) -> tuple:
    """A vector l with H_0(l) > 0 for the wall equation H positive on c2."""
    facet = common_facet(cx, c1, c2)
    f, s = wall_orientation(cx, facet, c2)
    return tuple(s * v for v in cx.normals[f])


def numeric_wall_matrix(cx: FaceComplex, c1: Face, c2: Face, alpha, params: MBParams | None = None, height=None) -> LabeledMatrix:
    """Analytic continuation of the MB basis of c1 into c2 through the series basis at l.

    Entry (nu, chi) is the coefficient of hat M_nu in the continuation of hat M_chi.
    """
    cfg = cx.cfg
    if cfg.n != 1:
        raise NotImplementedError("numeric wall matrices are implemented for n = 1")
    ell = bridge_direction(cx, c1, c2)
    params = mb_params(cfg, alpha) if params is None else params
    basis = series_basis(cfg, ell, alpha)
    r1 = connection_matrix(cx, c1, ell, alpha, params, basis, height)
    r2 = connection_matrix(cx, c2, ell, alpha, params, basis, height)
    W = (r1.coef @ np.linalg.inv(r2.coef)).T
    M = LabeledMatrix(complex_ring(1e-6), r2.labels, r1.labels)
    for i, nu in enumerate(r2.labels):
        for j, chi in enumerate(r1.labels):
            M.set(nu, chi, complex(W[i, j]))
    return M


def max_relative_error(M: LabeledMatrix, ref: LabeledMatrix) -> float:
    """Entrywise error relative to the largest reference entry of the column."""
    worst = 0.0
    for c in ref.col_labels:
        scale = max(abs(complex(ref.get(r, c))) for r in ref.row_labels) or 1.0
        for r in ref.row_labels:
            worst = max(worst, abs(complex(M.get(r, c)) - complex(ref.get(r, c))) / scale)
    return worst


def transformation_law_error(cfg: WeightConfig, params: MBParams, vhat, w) -> float:
    """|M(vhat + A^T w) - e^{2 pi i <w, alpha>} M(vhat)| relative to |M(vhat)|."""
    _, _, _, A = _arr(cfg)
    alpha = A @ params.gamma
    vhat = np.asarray(vhat, dtype=complex)
    w = np.asarray(w, dtype=float)
    m0, _ = evaluate_mb_full(cfg, params, vhat)
    m1, _ = evaluate_mb_full(cfg, params, vhat + A.T @ w)
    return abs(m1 - np.exp(TWO_PI_I * (w @ alpha)) * m0) / abs(m0)


def sample_alphas(cfg: WeightConfig, count: int, seed: int = 0, imag: float = 0.15, tol: float = 1e-3) -> list[tuple]:
    """Deterministic totally non-resonant alphas with Re alpha in the negative cone."""
    rng = np.random.default_rng(seed)
    _, _, _, A = _arr(cfg)
    out = []
    while len(out) < count:
        c = rng.uniform(-0.9, -0.1, size=cfg.d)
        re = A @ c
        im = rng.uniform(-imag, imag, size=cfg.m)
        alpha = tuple(complex(a, b) for a, b in zip(re, im))
        if re_in_negative_cone(cfg, alpha) and is_totally_nonresonant(cfg, alpha, tol):
            out.append(alpha)
    return out
