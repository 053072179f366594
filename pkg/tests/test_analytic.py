import json
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from conftest import cached_complex, cached_config
from mb_oracle import mb_residue_sum
from qsgkz import analytic as an
from qsgkz.errors import (
    Infeasible,
    NotGeneric,
    NotTotallyNonResonant,
    OutsideConvergenceDomain,
    PoleOnContour,
)
from qsgkz.schober_k0 import wall_crossing_matrix

ALPHA = {"gauss": (-0.3, -0.4, -0.2), "two_one_one": (-1.4, 0.3)}
FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "mb_values.json").read_text())


def params(name, **kw):
    return an.mb_params(cached_config(name), ALPHA[name], **kw)


def vhat(cfg, x):
    return np.array(cfg.S_iota.tolist(), dtype=float) @ np.atleast_1d(np.asarray(x, dtype=complex))


# -------------------------------------------------------------- contour choice


def test_gamma_solves_alpha():
    cfg = cached_config("gauss")
    g = an.gamma_from_alpha(cfg, ALPHA["gauss"])
    A = np.array(cfg.A.tolist(), dtype=float)
    S = np.array(cfg.S_iota.tolist(), dtype=float)
    assert np.allclose(A @ g, ALPHA["gauss"])
    assert np.allclose(S.T @ g, 0)


def test_sigma_makes_all_factors_admissible(name="two_one_one"):
    cfg = cached_config(name)
    p = params(name)
    assert np.all(p.exponents_re(cfg) < 0)


def test_sigma_infeasible_for_positive_gamma():
    with pytest.raises(Infeasible):
        an.choose_sigma(cached_config("gauss"), [0.5, 0, 0, 0])


def test_sigma_infeasible_with_zero_weight():
    # a zero column with Re gamma_j >= 0 cannot be fixed by any sigma
    B = np.array([[1, 0, -1]])
    stub = SimpleNamespace(B=B, S_iota=np.zeros((3, 1)), K=np.zeros((3, 2)), A=np.zeros((2, 3)))
    with pytest.raises(Infeasible):
        an.choose_sigma(stub, [-0.5, 0.2, -0.5])


def test_alpha_outside_negative_cone():
    with pytest.raises(Infeasible):
        an.mb_params(cached_config("gauss"), (0.3, -0.4, -0.2))


def test_pole_on_contour():
    p = params("gauss", sigma=[0.0])
    with pytest.raises(PoleOnContour):
        an.evaluate_mb(cached_config("gauss"), p, [0.1j])


def test_outside_domain():
    cfg = cached_config("gauss")
    with pytest.raises(OutsideConvergenceDomain):
        an.evaluate_mb(cfg, params("gauss"), [1.2 + 0.1j])


def test_rank_two_needs_flag():
    cfg = cached_config("squarecross")
    p = an.MBParams(gamma=np.full(cfg.d, -0.2 + 0j), sigma=np.zeros(2, dtype=complex))
    with pytest.raises(NotImplementedError):
        an.evaluate_mb(cfg, p, [0.05j, 0.05j])


# -------------------------------------------------------------- MB values


@pytest.mark.parametrize("pt", FIXTURE["points"], ids=lambda p: f"{p['instance']}-{p['x']}")
def test_mb_matches_residue_fixture(pt):
    cfg = cached_config(pt["instance"])
    p = an.mb_params(cfg, tuple(pt["alpha"]))
    x = complex(*pt["x"])
    v, err = an.evaluate_mb(cfg, p, [x])
    want = complex(*pt["value"])
    assert abs(v - want) <= 1e-10 * abs(want)
    assert err < 1e-8 * abs(want)


@pytest.mark.parametrize("name", ["gauss", "two_one_one"])
def test_mb_matches_residue_oracle_live(name):
    cfg = cached_config(name)
    p = params(name)
    b = [bj[0] for bj in cfg.b]
    for x in (0.05 + 0.25j, -0.1 + 0.6j):
        want = mb_residue_sum(b, p.gamma, vhat(cfg, x), x)
        v, _ = an.evaluate_mb(cfg, p, [x])
        assert abs(v - want) <= 1e-10 * abs(want)


def test_sigma_independence():
    cfg = cached_config("gauss")
    v1, _ = an.evaluate_mb(cfg, params("gauss", sigma=[-0.05]), [0.1 + 0.2j])
    v2, _ = an.evaluate_mb(cfg, params("gauss", sigma=[-0.15]), [0.1 + 0.2j])
    assert abs(v1 - v2) <= 1e-10 * abs(v1)


def test_node_doubling_within_estimate():
    cfg = cached_config("two_one_one")
    v1, e1 = an.evaluate_mb(cfg, params("two_one_one"), [0.2 + 0.1j])
    v2, _ = an.evaluate_mb(cfg, params("two_one_one", nodes=4000), [0.2 + 0.1j])
    assert abs(v1 - v2) <= max(e1, 1e-14 * abs(v1))


def test_purely_imaginary_for_real_data():
    cfg = cached_config("gauss")
    v, _ = an.evaluate_mb(cfg, params("gauss"), [0.5j])
    assert abs(v.real) <= 1e-12 * abs(v)
    assert v.imag > 0


@pytest.mark.parametrize("name", ["gauss", "two_one_one"])
def test_transformation_law(name):
    cfg = cached_config(name)
    p = params(name)
    vh = vhat(cfg, 0.15 + 0.2j)
    for w in [(1,) + (0,) * (cfg.m - 1), (0,) * (cfg.m - 1) + (-1,), tuple([1] * cfg.m)]:
        assert an.transformation_law_error(cfg, p, vh, w) < 1e-8


# -------------------------------------------------------------- GKZ residuals


@pytest.mark.parametrize("name", ["gauss", "two_one_one"])
def test_gkz_residuals(name):
    cfg = cached_config(name)
    p = params(name)
    c = an._families(cfg)[0][1]
    rng = np.random.default_rng(7)
    for _ in range(5):
        x = complex(rng.uniform(-0.8, 0.8) * c, rng.uniform(-0.5, 0.5))
        r = an.gkz_residual(cfg, p, [x])
        assert r.max_box < 1e-8 and r.max_euler < 1e-8


def test_residual_negative_control():
    # sigma = 0.1 leaves the pole at s = 0 on the wrong side of the contour
    cfg = cached_config("gauss")
    r = an.gkz_residual(cfg, params("gauss", sigma=[0.1]), [0.1 + 0.2j])
    assert r.max_box > 1e-3


# -------------------------------------------------------------- series at infinity


def test_series_basis_size_is_volume():
    for name in ("gauss", "two_one_one"):
        cfg = cached_config(name)
        assert len(an.series_basis(cfg, (1,), ALPHA[name])) == 2
        assert len(an.series_basis(cfg, (-1,), ALPHA[name])) == 2


def test_series_basis_errors():
    cfg = cached_config("gauss")
    with pytest.raises(NotGeneric):
        an.series_basis(cfg, (0,), ALPHA["gauss"])
    with pytest.raises(NotTotallyNonResonant):
        an.series_basis(cfg, (1,), (-0.5, -0.5, -1.0))


def test_series_exponents_solve_alpha():
    cfg = cached_config("two_one_one")
    A = np.array(cfg.A.tolist(), dtype=float)
    for sp in an.series_basis(cfg, (1,), ALPHA["two_one_one"]):
        assert np.allclose(A @ sp.gamma, ALPHA["two_one_one"])


@pytest.mark.parametrize("name", ["gauss", "two_one_one"])
def test_series_quasi_periodic(name):
    cfg = cached_config(name)
    u = an.bridge_height(cfg)
    x = 0.3 + 1j * (u + 0.3)
    for sp in an.series_basis(cfg, (1,), ALPHA[name]):
        f0 = an.evaluate_series(cfg, sp, [x])
        f1 = an.evaluate_series(cfg, sp, [x + 1])
        assert abs(f1 - np.exp(2j * np.pi * sp.t[0]) * f0) <= 1e-10 * abs(f0)


def test_series_term_zero_at_pole():
    cfg = cached_config("gauss")
    sp = an.series_basis(cfg, (1,), ALPHA["gauss"])[0]
    i = sp.I[0]
    b = cfg.b[i][0]
    l = (-1 - sp.z[0]) / b  # makes the Gamma argument of factor i equal to 0
    assert an.series_term(cfg, sp, [0.5j], [l]) == 0


def test_series_matches_mb_in_the_far_region():
    # the MB integral is a combination of the series; its residual in that span is tiny
    cx = cached_complex("gauss")
    res = an.connection_matrix(cx, cx.chamber_classes[0], (1,), ALPHA["gauss"])
    assert res.lsq_residual < 1e-9


# -------------------------------------------------------------- connection and walls


@pytest.mark.parametrize("name", ["gauss", "two_one_one"])
def test_connection_ratios(name):
    cx = cached_complex(name)
    for C in cx.chamber_classes:
        for rho in ((1,), (-1,)):
            res = an.connection_matrix(cx, C, rho, ALPHA[name])
            assert res.ratio_residual < 1e-6
            assert res.factorization_residual < 1e-6


@pytest.mark.parametrize("name", ["gauss", "two_one_one"])
def test_numeric_wall_matches_exact(name):
    cx = cached_complex(name)
    for c1, c2, _ in cx.wall_generators():
        W = an.numeric_wall_matrix(cx, c1, c2, ALPHA[name])
        E = wall_crossing_matrix(cx, c1, c2, "theorem", ALPHA[name])
        assert an.max_relative_error(W, E) < 1e-6


def test_sample_alphas_are_admissible():
    from qsgkz.resonance import is_totally_nonresonant, re_in_negative_cone

    cfg = cached_config("two_one_one")
    al = an.sample_alphas(cfg, 4, seed=2)
    assert al == an.sample_alphas(cfg, 4, seed=2)
    assert all(re_in_negative_cone(cfg, a) and is_totally_nonresonant(cfg, a) for a in al)
