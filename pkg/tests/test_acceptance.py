"""One test per acceptance criterion.  Each records a PASS/FAIL line that the
terminal summary prints after the run."""

import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import cached_complex, cached_config, record
from qsgkz import analytic as an
from qsgkz.arrangement import collinear_triples, face_complex, union_check
from qsgkz.errors import PoleAtH
from qsgkz.instances import BUNDLED, bundled_config
from qsgkz.ktheory import (
    check_inverse,
    dual_basis_check,
    exact_rational_psi,
    face_labels,
    hilbert_entry,
    specialization_invertibility,
    theta,
)
from qsgkz.resonance import (
    F_element,
    dual_cone_rays,
    is_nonresonant,
    is_nonresonant_direct,
    nonresonance_conditions,
    normalized_volume,
)
from qsgkz.schober_k0 import (
    check_collinear_relations,
    check_semidirect_relations,
    check_side_consistency,
    wall_crossing_matrix,
)

RANK_ONE = {"gauss": (-0.3, -0.4, -0.2), "two_one_one": (-1.4, 0.3)}
EXACT_MODE = ("gauss", "two_one_one", "squarecross")  # random2x8 exceeds the exact-mode order cap


def test_criterion_01_gauss_label_sets():
    t = time.perf_counter()
    cx = face_complex(bundled_config("gauss"))
    ok = True
    for a in range(-4, 5):
        ch = cx.face_at_point([Fraction(2 * a + 1, 2)])
        v = cx.face_at_point([Fraction(a)])
        ok &= set(face_labels(cx, ch)) == {(-a - 1,), (-a,)}
        ok &= set(face_labels(cx, v)) == {(-a - 1,), (-a,), (-a + 1,)}
    dt = time.perf_counter() - t
    record(1, ok and dt < 1, f"chambers and vertices a=-4..4 exact; {dt:.2f}s (limit 1s)")
    assert ok and dt < 1


def test_criterion_02_rank_equals_volume():
    t = time.perf_counter()
    got = {}
    for name in BUNDLED:
        cfg = bundled_config(name)
        cx = face_complex(cfg)
        sizes = {len(cx.lattice_points(c)) for c in cx.chamber_classes}
        got[name] = (sizes, normalized_volume(cfg))
    dt = time.perf_counter() - t
    want = {"gauss": 2, "two_one_one": 2, "squarecross": 3}
    ok = all(s == {v} for s, v in got.values()) and all(got[k][1] == v for k, v in want.items())
    ok &= len(got) >= 4
    record(2, ok and dt < 10, f"{ {k: v[1] for k, v in got.items()} }; {dt:.1f}s (limit 10s)")
    assert ok and dt < 10


def test_criterion_03_groupoid_relations():
    t = time.perf_counter()
    total, bad = 0, []
    for name in BUNDLED:
        cx = cached_complex(name)
        for side in ("theorem", "ktheory"):
            fails, count = check_collinear_relations(cx, side)
            total += count
            bad += fails
            bad += check_semidirect_relations(cx, side)
    dt = time.perf_counter() - t
    ok = not bad and total > 0
    record(3, ok and dt < 30, f"{total} triple checks, {len(bad)} failures; {dt:.1f}s (limit 30s)")
    assert ok and dt < 30


def test_criterion_04_sides_agree():
    bad = {name: check_side_consistency(cached_complex(name)) for name in BUNDLED}
    ok = not any(bad.values())
    record(4, ok, "walls and translations agree under chi -> -chi on " + ", ".join(bad))
    assert ok


def test_criterion_05_numeric_monodromy():
    worst, slow = 0.0, 0.0
    for name in RANK_ONE:
        cfg, cx = cached_config(name), cached_complex(name)
        t = time.perf_counter()
        for alpha in an.sample_alphas(cfg, 3, seed=1):
            for c1, c2, _ in cx.wall_generators():
                W = an.numeric_wall_matrix(cx, c1, c2, alpha)
                E = wall_crossing_matrix(cx, c1, c2, "theorem", alpha)
                worst = max(worst, an.max_relative_error(W, E))
        slow = max(slow, time.perf_counter() - t)
    ok = worst < 1e-6 and slow < 60
    record(5, ok, f"max relative error {worst:.2e} (tol 1e-6); slowest instance {slow:.1f}s (limit 60s)")
    assert ok


def test_criterion_06_gkz_annihilation():
    worst, slow = 0.0, 0.0
    rng = np.random.default_rng(11)
    for name, alpha in RANK_ONE.items():
        cfg = cached_config(name)
        t = time.perf_counter()
        p = an.mb_params(cfg, alpha)
        c = an._families(cfg)[0][1]
        for _ in range(5):
            x = complex(rng.uniform(-0.8, 0.8) * c, rng.uniform(-0.5, 0.5))
            worst = max(worst, an.gkz_residual(cfg, p, [x]).max_residual)
        slow = max(slow, time.perf_counter() - t)
    ok = worst < 1e-8 and slow < 60
    record(6, ok, f"max relative residual {worst:.2e} (tol 1e-8); {slow:.1f}s (limit 60s)")
    assert ok


def test_criterion_07_connection_ratios():
    worst = 0.0
    for name, alpha in RANK_ONE.items():
        cx = cached_complex(name)
        for C in cx.chamber_classes:
            for rho in ((1,), (-1,)):
                worst = max(worst, an.connection_matrix(cx, C, rho, alpha).ratio_residual)
    ok = worst < 1e-6
    record(7, ok, f"max ratio deviation {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_08_duality():
    bad = []
    for name in BUNDLED:
        cfg, cx = cached_config(name), cached_complex(name)
        for f in cx.classes:
            L = face_labels(cx, f)
            if not (check_inverse(cfg, L, 8) and dual_basis_check(cfg, L, 8)):
                bad.append((name, f.code))
    cfg, cx = cached_config("gauss"), cached_complex("gauss")
    th = theta(cfg)
    for f in cx.classes:
        L = face_labels(cx, f)
        for (r, c), rs in exact_rational_psi(cfg, L).items():
            if rs.expand(10, th) != hilbert_entry(cfg, r, c, 10).series:
                bad.append(("gauss exact", r, c))
    ok = not bad
    record(8, ok, f"Psi Phi = Id at N=8 on all corpus faces; exact Gauss Psi to order 10; {len(bad)} failures")
    assert ok


def test_criterion_09_nonresonance():
    rng = np.random.default_rng(2024)
    disagree = 0
    for name in BUNDLED:
        cfg = cached_config(name)
        rays = dual_cone_rays(cfg)
        for k in range(100):
            a = rng.uniform(-2, 2, size=cfg.m)
            if k % 4 == 0:  # put a quarter on a resonance hyperplane
                mu = np.array(rays[k % len(rays)], dtype=float)
                a = a + (round(mu @ a) - mu @ a) * mu / (mu @ mu)
            disagree += is_nonresonant(cfg, tuple(a)) != is_nonresonant_direct(cfg, tuple(a))
    F_ok = all(F_element(cached_config(n)).augmentation() == 0 for n in BUNDLED)
    four = len(nonresonance_conditions(cached_config("gauss"))) == 4
    ok = disagree == 0 and F_ok and four
    record(9, ok, f"{disagree} disagreements over {100 * len(BUNDLED)} alphas; F(1)=0: {F_ok}; Gauss conditions = 4: {four}")
    assert ok


def test_criterion_10_specialization():
    bad = []
    checked = 0
    for name in EXACT_MODE:
        cfg, cx = cached_config(name), cached_complex(name)
        L = face_labels(cx, cx.chamber_classes[0])
        for alpha in an.sample_alphas(cfg, 5, seed=4):
            rep = specialization_invertibility(cfg, L, alpha)
            checked += 1
            if not (rep.finite and rep.invertible):
                bad.append((name, alpha))
        rays = dual_cone_rays(cfg)
        for k in range(3):
            mu = rays[k % len(rays)]
            # rational alpha with <mu, alpha> = -(k+1), generic elsewhere
            base = [Fraction(-1, 7 + i) for i in range(cfg.m)]
            s = sum(Fraction(x) * y for x, y in zip(mu, base))
            j = next(i for i, x in enumerate(mu) if x)
            base[j] += (-(k + 1) - s) / mu[j]
            assert not is_nonresonant(cfg, tuple(base))
            try:
                specialization_invertibility(cfg, L, tuple(base))
                bad.append((name, "no pole", base))
            except PoleAtH:
                checked += 1
    ok = not bad
    record(10, ok, f"{checked} specializations on {', '.join(EXACT_MODE)}; random2x8 outside exact mode")
    assert ok


def test_criterion_11_union_lemma():
    bad, n = [], 0
    for name in BUNDLED:
        cx = cached_complex(name)
        for f in cx.classes:
            if f.dim < cx.n:
                n += 1
                if not union_check(cx, f):
                    bad.append((name, f.code))
    ok = not bad
    record(11, ok, f"{n} non-chamber face classes, {len(bad)} failures")
    assert ok


def test_criterion_12_transformation_law():
    worst = 0.0
    for name, alpha in RANK_ONE.items():
        cfg = cached_config(name)
        p = an.mb_params(cfg, alpha)
        vh = np.array(cfg.S_iota.tolist(), dtype=float) @ np.array([0.1 + 0.25j])
        for w in [(1,) + (0,) * (cfg.m - 1), (0,) * (cfg.m - 1) + (2,), tuple([-1] * cfg.m)]:
            worst = max(worst, an.transformation_law_error(cfg, p, vh, w))
    ok = worst < 1e-8
    record(12, ok, f"max relative error {worst:.2e} over 3 shifts per instance (tol 1e-8)")
    assert ok
