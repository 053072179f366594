"""Cross-module verification suite.

``run_suite`` runs every checkable ingredient of the comparison between the
GKZ local system and the decategorified schober: lattice data, arrangement
lemmas, resonance, the groupoid relations on both sides, the K-theory
identities, the KS axioms and (for rank one with a parameter) the analytic
monodromy.  It does not construct the perverse sheaves themselves; the report
says so in its ``scope`` field.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .arrangement import (
    collinear_triples,
    face_complex,
    union_check,
    wall_set_J,
)
from .errors import PoleAtH, QsgkzError, TriangulationTooLarge
from .exactlat import WeightConfig, elementary_divisors
from .resonance import (
    dual_cone_rays,
    facet_normals_direct,
    is_nonresonant,
    is_nonresonant_direct,
    is_totally_nonresonant,
    normalized_volume,
    re_in_negative_cone,
)

SCOPE = (
    "Checks the computable ingredients only: identical monodromy on both sides "
    "and the absence of supported sub- and quotient objects.  The isomorphism "
    "of perverse sheaves is not constructed."
)
WITNESS_LIMIT = 5


@dataclass
class CheckResult:
    name: str
    reference: str
    status: str  # pass | fail | skip
    witness: object = None
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self, timing: bool = True):
        out = {"name": self.name, "reference": self.reference, "status": self.status, "detail": self.detail, "witness": self.witness}
        if timing:
            out["seconds"] = round(self.seconds, 4)
        return out


@dataclass
class VerificationReport:
    config: str
    alpha: list | None
    checks: list = field(default_factory=list)
    scope: str = SCOPE

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if c.status == "fail"]

    def get(self, name):
        return next(c for c in self.checks if c.name == name)

    def to_dict(self, timing: bool = True):
        return {
            "config": self.config,
            "alpha": self.alpha,
            "ok": self.ok,
            "scope": self.scope,
            "checks": [c.to_dict(timing) for c in self.checks],
        }


@dataclass
class VerifyOptions:
    truncation: int = 8
    ks_truncation: int = 6
    exact_order: int = 10
    exact_max_rays: int = 10
    resonance_samples: int = 100
    analytic_points: int = 5
    seed: int = 0
    include_ks: bool = True
    include_exact: bool = True
    include_analytic: bool = True
    wall_override: dict | None = None  # fault injection for the relation suite


def _face_name(f):
    return {"dim": f.dim, "code": list(f.code), "point": [str(x) for x in f.rep]}


def _limit(items):
    items = list(items)
    return items[:WITNESS_LIMIT] + ([f"... {len(items) - WITNESS_LIMIT} more"] if len(items) > WITNESS_LIMIT else [])


class _Runner:
    def __init__(self, report: VerificationReport):
        self.report = report

    def run(self, name, reference, fn):
        t = time.perf_counter()
        try:
            res = fn()
        except QsgkzError as e:
            res = ("fail", {"error": type(e).__name__, "message": str(e)}, "")
        status, witness, detail = res
        if status == "fail" and witness is None:
            witness = {"note": "check returned false"}
        self.report.checks.append(CheckResult(name, reference, status, witness, detail, time.perf_counter() - t))

    def skip(self, name, reference, reason):
        self.report.checks.append(CheckResult(name, reference, "skip", None, reason))


def _ok(cond, witness=None, detail=""):
    return ("pass" if cond else "fail", None if cond else witness, detail)


def _alpha_list(alpha):
    return None if alpha is None else [[complex(a).real, complex(a).imag] for a in alpha]


def run_suite(cfg: WeightConfig, alpha=None, options: VerifyOptions | None = None) -> VerificationReport:
    opt = options or VerifyOptions()
    rep = VerificationReport(cfg.name, _alpha_list(alpha))
    R = _Runner(rep)
    cx = face_complex(cfg)

    # ---------------- lattice data
    def lattice():
        B, A, S, K = cfg.B, cfg.A, cfg.S_iota, cfg.K
        n, m = cfg.n, cfg.m
        bad = []
        if (B @ S).tolist() != [[int(i == j) for j in range(n)] for i in range(n)]:
            bad.append("B S_iota != I")
        if (A @ K).tolist() != [[int(i == j) for j in range(m)] for i in range(m)]:
            bad.append("A K != I")
        if any(any(r) for r in (S.T @ K).tolist()):
            bad.append("S_iota^T K != 0")
        if any(any(r) for r in (A @ B.T).tolist()):
            bad.append("A B^T != 0")
        if any(e != 1 for e in elementary_divisors(B)):
            bad.append("B not saturated")
        if not cfg.quasi_symmetric:
            bad.append("not quasi-symmetric")
        return _ok(not bad, bad)

    R.run("lattice.splittings", "exact sequence of character lattices and its splittings", lattice)

    # ---------------- arrangement
    def union():
        bad = [_face_name(f) for f in cx.classes if f.dim < cx.n and not union_check(cx, f)]
        return _ok(not bad, _limit(bad), f"{sum(f.dim < cx.n for f in cx.classes)} face classes")

    R.run("arrangement.union", "L of a face is the union of L over the chambers of its star", union)

    def inC2():
        bad = []
        for c1, c2, facet in cx.wall_generators():
            J = wall_set_J(cx, facet, c2)
            L1, L2 = set(cx.lattice_points(c1)), set(cx.lattice_points(c2))
            for chi in L1 - L2:
                for k in range(1, len(J) + 1):
                    for S in itertools.combinations(J, k):
                        lab = tuple(c + sum(cfg.b[j][i] for j in S) for i, c in enumerate(chi))
                        if lab not in L2:
                            bad.append({"chi": list(chi), "S": list(S), "target": _face_name(c2)})
        return _ok(not bad, _limit(bad))

    R.run("arrangement.wall_labels", "chi + b_S lies in L of the target chamber for moving chi", inC2)

    vol = normalized_volume(cfg)

    def rank_volume():
        sizes = {len(cx.lattice_points(c)) for c in cx.chamber_classes}
        return _ok(sizes == {vol}, {"chamber_sizes": sorted(sizes), "volume": vol}, f"rank {vol}")

    R.run("arrangement.rank_volume", "|L_C| equals the normalized volume of conv(A)", rank_volume)

    # ---------------- resonance
    rays = dual_cone_rays(cfg)

    def rays_match():
        direct = facet_normals_direct(cfg)
        return _ok(sorted(rays) == sorted(direct), {"double_description": rays, "direct": direct}, f"{len(rays)} rays")

    R.run("resonance.rays", "non-resonance conditions are the facets of the cone over A", rays_match)

    def oracle():
        rng = np.random.default_rng(opt.seed)
        bad = []
        for k in range(opt.resonance_samples):
            # half the samples are pushed onto a random facet hyperplane translate
            a = rng.uniform(-2, 2, size=cfg.m)
            if k % 2 and rays:
                mu = np.array(rays[rng.integers(len(rays))], dtype=float)
                target = float(rng.integers(-2, 3))
                a = a + (target - mu @ a) * mu / (mu @ mu)
            al = tuple(float(x) for x in a)
            if is_nonresonant(cfg, al, rays=rays) != is_nonresonant_direct(cfg, al):
                bad.append(list(al))
        return _ok(not bad, _limit(bad), f"{opt.resonance_samples} samples")

    R.run("resonance.oracle", "ray test equals facet test for non-resonance", oracle)

    def F_at_one():
        from .resonance import F_element

        return _ok(F_element(cfg).augmentation() == 0, None, "F(1) = 0")

    R.run("resonance.F_at_1", "F vanishes at the trivial character", F_at_one)

    # ---------------- groupoid relations
    def relations(side):
        def go():
            fails, count = check_collinear_relations(cx, side, override=opt.wall_override)
            wit = [[_face_name(c) for c in t] for t in fails]
            return _ok(not fails, _limit(wit), f"{count} collinear triples")

        return go

    from .schober_k0 import check_collinear_relations, check_semidirect_relations, check_side_consistency

    R.run("groupoid.collinear.theorem", "collinear relations for the MB-basis representation", relations("theorem"))
    R.run("groupoid.collinear.ktheory", "collinear relations for the Koszul wall crossings", relations("ktheory"))

    def semidirect():
        bad = check_semidirect_relations(cx, "theorem") + check_semidirect_relations(cx, "ktheory")
        return _ok(not bad, _limit([str(b) for b in bad]))

    R.run("groupoid.semidirect", "translations act compatibly with crossings", semidirect)

    def sides():
        bad = check_side_consistency(cx)
        return _ok(not bad, _limit([str(b) for b in bad]))

    R.run("groupoid.sides_agree", "MB-basis monodromy equals K-theory monodromy under chi -> -chi", sides)

    nonres = alpha is not None and is_nonresonant(cfg, alpha, rays=rays)
    if alpha is None:
        R.skip("groupoid.specialization", "specialized relations", "no alpha given")
    elif not nonres:
        R.skip("groupoid.specialization", "specialized relations", "alpha is resonant")
    else:

        def spec():
            from .laurent import complex_ring
            from .schober_k0 import specialize_matrix, to_other_side, wall_crossing_matrix

            bad = []
            for c1, c2, _ in cx.wall_generators():
                T = specialize_matrix(wall_crossing_matrix(cx, c1, c2, "theorem"), alpha)
                K = specialize_matrix(wall_crossing_matrix(cx, c1, c2, "ktheory"), alpha)
                if not to_other_side(T).equals(K):
                    bad.append([_face_name(c1), _face_name(c2)])
            _ = complex_ring
            return _ok(not bad, _limit(bad))

        R.run("groupoid.specialization", "specialized relations", spec)

    # ---------------- K-theory
    from .ktheory import (
        MAX_EXACT_RAYS,
        check_inverse,
        dual_basis_check,
        exact_rational_psi,
        face_labels,
        hilbert_entry,
        specialization_invertibility,
        theta,
    )

    def kt_inverse():
        bad = [_face_name(f) for f in cx.classes if not check_inverse(cfg, face_labels(cx, f), opt.truncation)]
        return _ok(not bad, _limit(bad), f"N = {opt.truncation}")

    R.run("ktheory.psi_phi", "Phi is the inverse of the Hom matrix Psi", kt_inverse)

    def kt_dual():
        bad = [_face_name(f) for f in cx.classes if not dual_basis_check(cfg, face_labels(cx, f), opt.truncation)]
        return _ok(not bad, _limit(bad), f"N = {opt.truncation}")

    R.run("ktheory.dual_basis", "simple classes are dual to projective classes under the Euler pairing", kt_dual)

    use_exact = opt.include_exact and len(rays) <= min(MAX_EXACT_RAYS, opt.exact_max_rays)
    exact_forms = {}
    if use_exact:
        try:
            for f in cx.classes:
                exact_forms[f] = exact_rational_psi(cfg, face_labels(cx, f))
        except TriangulationTooLarge as e:
            use_exact, exact_reason = False, str(e)
    else:
        exact_reason = "exact mode disabled or too many rays"
    if not use_exact:
        R.skip("ktheory.exact_expansion", "rational Hilbert series", exact_reason)
    else:

        def exact():
            th = theta(cfg)
            bad = []
            for f in cx.classes:
                L = face_labels(cx, f)
                ex = exact_forms[f]
                for r in L:
                    for c in L:
                        if ex[(r, c)].expand(opt.exact_order, th) != hilbert_entry(cfg, r, c, opt.exact_order).series:
                            bad.append({"face": _face_name(f), "entry": [list(r), list(c)]})
            return _ok(not bad, _limit(bad), f"order {opt.exact_order}")

        R.run("ktheory.exact_expansion", "rational Hilbert series expand to the enumerated series", exact)

    if alpha is None or not use_exact:
        R.skip("ktheory.specialization", "Psi(h) invertible for non-resonant h", "no alpha or no exact mode")
    elif not nonres:

        def pole():
            try:
                specialization_invertibility(cfg, face_labels(cx, cx.chamber_classes[0]), alpha)
            except PoleAtH as e:
                return ("pass", None, f"pole detected at factor {e.factor}")
            return ("fail", {"note": "resonant alpha gave a finite Psi(h)"}, "")

        R.run("ktheory.specialization", "Psi(h) has a pole for resonant h", pole)
    else:

        def invert():
            bad = []
            for f in cx.classes:
                r = specialization_invertibility(cfg, face_labels(cx, f), alpha)
                if not (r.finite and r.invertible):
                    bad.append({"face": _face_name(f), **r.to_dict()})
            return _ok(not bad, _limit(bad))

        R.run("ktheory.specialization", "Psi(h) finite and invertible for non-resonant h", invert)

    # ---------------- KS datum
    if not opt.include_ks:
        R.skip("ksdata.axioms", "KS axioms for the schober datum", "disabled by options")
    else:

        def ks():
            from .ksdata import check_axioms
            from .schober_k0 import build_ks_datum

            eks = build_ks_datum(cx, N=opt.ks_truncation)
            span = lambda f: tuple((i, c) for i, c in enumerate(f.code) if c % 2 == 0)  # noqa: E731
            shifts = [tuple(int(i == k) for i in range(cx.n)) for k in range(cx.n)]
            r = check_axioms(eks.ks, triples=collinear_triples(cx), span_key=span, binomials=rays, eks=eks, shifts=shifts)
            cross = [[_face_name(a), _face_name(b)] for a, b in eks.cross_check_failures]
            ok = r.ok and not cross
            return _ok(ok, {"violations": _limit(r.violations), "cross_check": _limit(cross)}, str(r.counts))

        R.run("ksdata.axioms", "KS axioms (m), (f), (i), (t) and equivariance", ks)

    # ---------------- analytic
    _analytic(R, cx, alpha, opt, rays)
    return rep


def _analytic(R: _Runner, cx, alpha, opt: VerifyOptions, rays):
    cfg = cx.cfg
    names = ["analytic.gkz_residual", "analytic.transformation_law", "analytic.connection", "analytic.wall_monodromy"]
    refs = [
        "MB integral is annihilated by the box and Euler operators",
        "MB integral transforms by a character under A^T-shifts",
        "connection coefficients factor through exp(-2 pi i <chi, iota gamma_I>)",
        "numeric continuation reproduces the wall-crossing formula",
    ]
    reason = None
    if not opt.include_analytic:
        reason = "disabled by options"
    elif alpha is None:
        reason = "no alpha given"
    elif cfg.n != 1:
        reason = "numerics are implemented for n = 1"
    elif not re_in_negative_cone(cfg, alpha):
        reason = "Re alpha is outside the negative cone"
    elif not is_totally_nonresonant(cfg, alpha):
        reason = "alpha is not totally non-resonant"
    if reason:
        for nm, rf in zip(names, refs):
            R.skip(nm, rf, reason)
        return
    from . import analytic as an

    params = an.mb_params(cfg, alpha)
    rng = np.random.default_rng(opt.seed)
    fam = an._families(cfg)[0][1]

    def residual():
        worst, pts = 0.0, []
        for _ in range(opt.analytic_points):
            x = complex(rng.uniform(-0.8, 0.8) * fam, rng.uniform(-0.5, 0.5))
            r = an.gkz_residual(cfg, params, [x])
            worst = max(worst, r.max_residual)
            pts.append([x.real, x.imag, r.max_residual])
        return _ok(worst < 1e-8, pts, f"max relative residual {worst:.2e}")

    R.run(names[0], refs[0], residual)

    def tlaw():
        worst = 0.0
        shifts = [tuple(int(i == k) for i in range(cfg.m)) for k in range(min(cfg.m, 2))]
        shifts.append(tuple(1 if i % 2 == 0 else -1 for i in range(cfg.m)))
        vhat = np.zeros(cfg.d, dtype=complex)
        vhat[:] = [0.05 * (i + 1) for i in range(cfg.d)]
        vhat = vhat - np.array(cfg.S_iota.tolist(), dtype=float) @ (np.array(cfg.B.tolist(), dtype=float) @ vhat.real)
        vhat = vhat + 0.25j
        for w in shifts:
            worst = max(worst, an.transformation_law_error(cfg, params, vhat, w))
        return _ok(worst < 1e-8, {"max_error": worst}, f"max relative error {worst:.2e}")

    R.run(names[1], refs[1], tlaw)

    def connection():
        worst = 0.0
        for rho in ((1,), (-1,)):
            for c in cx.chamber_classes:
                r = an.connection_matrix(cx, c, rho, alpha, params)
                worst = max(worst, r.ratio_residual, r.factorization_residual)
        return _ok(worst < 1e-6, {"max_error": worst}, f"max ratio error {worst:.2e}")

    R.run(names[2], refs[2], connection)

    def walls():
        from .schober_k0 import wall_crossing_matrix

        worst, bad = 0.0, []
        for c1, c2, _ in cx.wall_generators():
            W = an.numeric_wall_matrix(cx, c1, c2, alpha, params)
            E = wall_crossing_matrix(cx, c1, c2, "theorem", alpha)
            err = an.max_relative_error(W, E)
            worst = max(worst, err)
            if err >= 1e-6:
                bad.append({"from": _face_name(c1), "to": _face_name(c2), "error": err})
        return _ok(not bad, _limit(bad), f"max relative error {worst:.2e}")

    R.run(names[3], refs[3], walls)
