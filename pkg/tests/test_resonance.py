import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from conftest import cached_config, cached_complex
from qsgkz.resonance import (
    F_element,
    dual_cone_rays,
    facet_normals_direct,
    is_nonresonant,
    is_nonresonant_direct,
    is_totally_nonresonant,
    nonresonance_conditions,
    normalized_volume,
    re_in_negative_cone,
)
from fractions import Fraction


def volume_oracle(cfg):
    """m! vol(conv(0, a_i)) via Qhull; the a_i lie at lattice height one."""
    pts = np.array([[0.0] * cfg.m] + [list(a) for a in cfg.a], dtype=float)
    return round(math.factorial(cfg.m) * ConvexHull(pts).volume)


def test_rays_equal_brute_force(corpus_name):
    cfg = cached_config(corpus_name)
    assert sorted(dual_cone_rays(cfg)) == sorted(facet_normals_direct(cfg))


def test_volume_against_qhull(corpus_name):
    cfg = cached_config(corpus_name)
    assert normalized_volume(cfg) == volume_oracle(cfg)


def test_rank_equals_volume(corpus_name):
    cfg, cx = cached_config(corpus_name), cached_complex(corpus_name)
    assert {len(cx.lattice_points(c)) for c in cx.chamber_classes} == {normalized_volume(cfg)}


def test_expected_volumes():
    assert [normalized_volume(cached_config(n)) for n in ("gauss", "two_one_one", "squarecross")] == [2, 2, 3]


def test_gauss_rays():
    cfg = cached_config("gauss")
    assert dual_cone_rays(cfg) == [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, -1)]
    assert len(nonresonance_conditions(cfg)) == 4


def test_oracle_agreement_random(corpus_name):
    cfg = cached_config(corpus_name)
    rng = np.random.default_rng(5)
    rays = dual_cone_rays(cfg)
    for k in range(100):
        a = rng.uniform(-2, 2, size=cfg.m)
        if k % 3 == 0:
            mu = np.array(rays[k % len(rays)], dtype=float)
            a = a + (round(mu @ a) - mu @ a) * mu / (mu @ mu)
        al = tuple(a)
        assert is_nonresonant(cfg, al) == is_nonresonant_direct(cfg, al)


def test_exact_rationals():
    cfg = cached_config("gauss")
    assert not is_nonresonant(cfg, (Fraction(-1, 2), Fraction(-1, 2), Fraction(-1)))
    assert is_nonresonant(cfg, (Fraction(-3, 10), Fraction(-2, 5), Fraction(-1, 5)))


def test_gauss_parameter():
    cfg = cached_config("gauss")
    al = (-0.3, -0.4, -0.2)
    assert is_nonresonant(cfg, al) and is_totally_nonresonant(cfg, al) and re_in_negative_cone(cfg, al)
    assert not re_in_negative_cone(cfg, (0.3, -0.4, -0.2))


def test_F_vanishes_at_one(corpus_name):
    F = F_element(cached_config(corpus_name))
    assert F.augmentation() == 0
    assert F.evaluate([1.0] * cached_config(corpus_name).m) == 0
