import itertools
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import cached_complex, cached_config
from qsgkz.arrangement import (
    collinear_triples,
    compute_zeta,
    is_collinear,
    union_check,
    wall_partition,
    wall_set_J,
)
from qsgkz.ktheory import face_labels


def in_delta_lp(cfg, y):
    """Oracle: y in (1/2) sum_i [-b_i, 0] via LP feasibility in the segment weights."""
    B = np.array(cfg.B.tolist(), dtype=float)
    res = linprog(np.zeros(cfg.d), A_eq=-B / 2, b_eq=np.asarray(y, dtype=float), bounds=[(0, 1)] * cfg.d, method="highs")
    return res.status == 0


def test_gauss_label_sets():
    cx = cached_complex("gauss")
    for a in range(-3, 4):
        ch = cx.face_at_point([Fraction(2 * a + 1, 2)])
        assert face_labels(cx, ch) == [(-a - 1,), (-a,)]
        v = cx.face_at_point([Fraction(a)])
        assert v.dim == 0
        assert face_labels(cx, v) == [(-a - 1,), (-a,), (-a + 1,)]


def test_lattice_points_against_lp_oracle(corpus_name):
    cfg, cx = cached_config(corpus_name), cached_complex(corpus_name)
    for f in cx.classes:
        nu = [float(x) for x in f.rep]
        # points near the face, tested against the Minkowski-sum description
        box = [range(int(np.floor(c)) - 4, int(np.ceil(c)) + 5) for c in nu]
        expected = sorted(p for p in itertools.product(*box) if in_delta_lp(cfg, np.array(p) - np.array(nu)))
        assert cx.lattice_points(f) == expected


def test_squarecross_classes():
    cx = cached_complex("squarecross")
    dims = sorted(f.dim for f in cx.classes)
    assert dims.count(2) == 2 and len(cx.classes) == 6
    assert all(len(cx.lattice_points(c)) == 3 for c in cx.chamber_classes)


def test_wall_sets_gauss():
    cx = cached_complex("gauss")
    c_up = cx.face_at_point([Fraction(1, 2)])
    c_dn = cx.face_at_point([Fraction(-1, 2)])
    facet = cx.face_at_point([0])
    assert wall_set_J(cx, facet, c_up) == (0, 1)
    assert wall_set_J(cx, facet, c_dn) == (2, 3)
    pos, neg, zero = wall_partition(cx, facet, c_up)
    assert (pos, neg, zero) == ((0, 1), (2, 3), ())


def test_wall_set_squarecross():
    cx = cached_complex("squarecross")
    facet = cx.face_at_point([Fraction(1, 3), 0])
    if facet.dim != 1:
        facet = cx.face_at_point([Fraction(1, 7), 0])
    above = [c for c in cx.cofaces(facet) if c.dim == 2 and c.rep[1] > 0][0]
    assert wall_set_J(cx, facet, above) == (2, 4)


def test_union_lemma(corpus_name):
    cx = cached_complex(corpus_name)
    for f in cx.classes:
        if f.dim < cx.n:
            assert union_check(cx, f)


def test_collinear_counts():
    assert len(collinear_triples(cached_complex("gauss"))) == 6
    assert len(collinear_triples(cached_complex("squarecross"))) == 102


def test_collinearity_is_symmetric_under_reversal():
    cx = cached_complex("squarecross")
    for c1, c2, c3 in collinear_triples(cx)[:40]:
        assert is_collinear(cx, c3, c2, c1)


def test_zeta_for_two_one_one():
    z = compute_zeta(cached_config("two_one_one"))
    assert z["exp_2pi_i_zeta"] == [4.0]
