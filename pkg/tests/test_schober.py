import pytest

from conftest import cached_complex, cached_config
from qsgkz.arrangement import collinear_triples
from qsgkz.errors import NotAdjacent
from qsgkz.laurent import GroupRingElement, LabeledMatrix, determinant, laurent_ring
from qsgkz.schober_k0 import (
    build_monodromy_rep,
    check_collinear_relations,
    check_semidirect_relations,
    check_side_consistency,
    common_facet,
    q_monomials,
    specialize_matrix,
    to_other_side,
    translation_matrix,
    wall_crossing_matrix,
)


def gauss_walls():
    cx = cached_complex("gauss")
    byrep = {c1.rep[0]: (c1, c2) for c1, c2, _ in cx.wall_generators()}
    return cx, byrep


def test_gauss_wall_by_hand():
    # crossing from (-1,0) to (0,1): J = {0,1}; label 0 stays, label -1 picks up
    # q0 + q1 on label 0 and -q0 q1 on label 1
    cx, byrep = gauss_walls()
    c1, c2 = byrep[-0.5]
    q = q_monomials(cx.cfg)
    W = wall_crossing_matrix(cx, c1, c2)
    assert W.row_labels == [(0,), (1,)] and W.col_labels == [(-1,), (0,)]
    assert W.get((0,), (-1,)) == q[0] + q[1]
    assert W.get((1,), (-1,)) == -(q[0] * q[1])
    assert W.get((0,), (0,)) == GroupRingElement.one(3)
    assert W.get((1,), (0,)).is_zero()


def test_gauss_reverse_wall_by_hand():
    cx, byrep = gauss_walls()
    c1, c2 = byrep[0.5]
    q = q_monomials(cx.cfg)
    W = wall_crossing_matrix(cx, c1, c2)
    assert W.get((0,), (1,)) == q[2] + q[3]
    assert W.get((-1,), (1,)) == -(q[2] * q[3])
    assert W.get((0,), (0,)) == GroupRingElement.one(3)


def test_wall_determinant_is_unit_monomial(corpus_name):
    cx = cached_complex(corpus_name)
    for c1, c2, _ in cx.wall_generators():
        W = wall_crossing_matrix(cx, c1, c2)
        if len(W.row_labels) <= 4:
            assert determinant(W.reindexed(W.row_labels, W.col_labels)).is_unit_monomial()


def test_nonadjacent_rejected():
    cx = cached_complex("gauss")
    c = cx.chamber_classes[0]
    far = cx.translate(c, (3,))
    with pytest.raises(NotAdjacent):
        common_facet(cx, c, far)


def test_collinear_relations(corpus_name):
    cx = cached_complex(corpus_name)
    for side in ("theorem", "ktheory"):
        fails, count = check_collinear_relations(cx, side)
        assert count == len(collinear_triples(cx)) and not fails


def test_semidirect_relations(corpus_name):
    cx = cached_complex(corpus_name)
    assert check_semidirect_relations(cx, "theorem") == []
    assert check_semidirect_relations(cx, "ktheory") == []


def test_sides_agree(corpus_name):
    assert check_side_consistency(cached_complex(corpus_name)) == []


def test_fault_injection_is_detected():
    cx = cached_complex("squarecross")
    triples = collinear_triples(cx)
    c1, c2, c3 = triples[0]
    from qsgkz.arrangement import common_lower_bound
    from qsgkz.schober_k0 import gallery_matrix, minimal_gallery

    center = common_lower_bound(cx, [c1, c2, c3])
    good = gallery_matrix(cx, minimal_gallery(cx, c1, c2, center))
    bad = good.map(lambda g: g * 2)
    fails, _ = check_collinear_relations(cx, triples=triples, override={(c1.code, c2.code): bad})
    assert (c1, c2, c3) in fails


def test_translation_inverse():
    cx = cached_complex("squarecross")
    for c in cx.chamber_classes:
        T = translation_matrix(cx, (1, 0), c, "ktheory")
        back = translation_matrix(cx, (-1, 0), cx.translate(c, (1, 0)), "ktheory")
        assert (back @ T).is_identity()


def test_specialized_rep_consistent():
    cx = cached_complex("gauss")
    alpha = (-0.3, -0.4, -0.2)
    rep = build_monodromy_rep(cx, "theorem", alpha)
    sym = build_monodromy_rep(cx, "theorem")
    for k, M in sym.walls.items():
        S = specialize_matrix(M, alpha)
        assert S.equals(rep.walls[k])
    assert rep.metadata["nonresonant"]


def test_relabel_round_trip():
    cx, byrep = gauss_walls()
    W = wall_crossing_matrix(cx, *byrep[-0.5])
    assert to_other_side(to_other_side(W)).equals(W)
