import functools

import numpy as np
import pytest

from conftest import cached_complex, cached_config
from qsgkz.arrangement import collinear_triples
from qsgkz.ksdata import (
    augmentation,
    check_axioms,
    dual,
    restrict_to_groupoid,
    same_datum,
    specialize,
    stab_round_trip,
    trivial_datum,
)
from qsgkz.resonance import dual_cone_rays
from qsgkz.schober_k0 import build_ks_datum, translation_matrix, wall_crossing_matrix


@functools.lru_cache(maxsize=None)
def gauss_eks():
    return build_ks_datum(cached_complex("gauss"), 6)


def span_key(f):
    return tuple((i, c) for i, c in enumerate(f.code) if c % 2 == 0)


def test_trivial_datum_axioms():
    faces = [0, 1, 2]
    leq = lambda a, b: a <= b  # noqa: E731
    ks = trivial_datum(faces, leq)
    assert check_axioms(ks).ok


@pytest.mark.parametrize("name", ["gauss", "two_one_one", "squarecross"])
def test_schober_datum_axioms(name):
    cx = cached_complex(name)
    eks = build_ks_datum(cx, 6)
    shifts = [tuple(int(i == k) for i in range(cx.n)) for k in range(cx.n)]
    rep = check_axioms(
        eks.ks,
        triples=collinear_triples(cx),
        span_key=span_key,
        binomials=dual_cone_rays(cx.cfg),
        eks=eks,
        shifts=shifts,
    )
    assert rep.ok, rep.violations[:3]
    assert not eks.cross_check_failures
    assert rep.counts["m"] > 0 and rep.counts["t"] > 0


def test_broken_gamma_is_reported():
    ks = gauss_eks().ks
    key = next(iter(ks.gamma))
    broken = dict(ks.gamma)
    broken[key] = ks.gamma[key].map(lambda g: g * 3)
    bad = type(ks)(ks.faces, ks.leq, ks.labels, broken, ks.delta, ks.ring, ks.dim)
    rep = check_axioms(bad, functoriality=False)
    assert not rep.ok and rep.violations[0]["axiom"] == "m"


def test_double_dual():
    ks = gauss_eks().ks
    assert same_datum(dual(dual(ks)), ks)
    assert same_datum(dual(dual(ks, twist=True), twist=True), ks)


def test_dual_keeps_m():
    assert check_axioms(dual(gauss_eks().ks), functoriality=False).ok


def test_augmentation_matches_specialization_at_one():
    ks = gauss_eks().ks
    aug, sp = augmentation(ks), specialize(ks, h=[1.0, 1.0, 1.0])
    for k, M in aug.gamma.items():
        assert np.allclose(M.to_numpy().astype(complex), sp.gamma[k].to_numpy())


def test_specialization_commutes_with_products():
    ks = gauss_eks().ks
    alpha = (-0.3, -0.4, -0.2)
    sp = specialize(ks, alpha=alpha)
    for (small, big), G in list(ks.gamma.items())[:20]:
        D = ks.delta[(big, small)]
        lhs = (G @ D).map(lambda g: g.evaluate_log([-2j * np.pi * a for a in alpha]))
        rhs = sp.gamma[(small, big)] @ sp.delta[(big, small)]
        assert np.allclose(lhs.to_numpy(), rhs.to_numpy())


def test_specialize_needs_one_point():
    with pytest.raises(ValueError):
        specialize(gauss_eks().ks)


def test_restriction_reproduces_generators():
    cx = cached_complex("gauss")
    pairs = [(a, b) for a, b, _ in cx.wall_generators()]
    rep = restrict_to_groupoid(gauss_eks(), cx.chamber_classes, pairs)
    for a, b in pairs:
        assert rep.walls[(a.code, b.code)].equals(wall_crossing_matrix(cx, a, b, "ktheory"))
    for c in cx.chamber_classes:
        assert rep.translations[(c.code, (1,))].equals(translation_matrix(cx, (1,), c, "ktheory"))


def test_stabilizer_round_trip():
    cx = cached_complex("gauss")
    lifts = [(0, 0, 0), (1, 0, 0), (0, -1, 2), (-1, 1, 1)]
    for a, b, _ in cx.wall_generators():
        assert stab_round_trip(cx, a, b, lifts)
