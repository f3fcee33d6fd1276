import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exlift import rings as R
from exlift.errors import GuardExceeded, InvalidSpec


def z(n):
    return R.build_ring(R.ZmodSpec(n))


def test_zmod_basics():
    z4 = z(4)
    assert z4.size == 4
    assert z4.add(1, 3) == 0
    assert z4.mul(3, 3) == 1
    assert z4.units() == (1, 3)
    assert z4.idempotents() == (0, 1)


def test_matrix_ring_size():
    m2 = R.build_ring(R.MatrixSpec(R.ZmodSpec(2), 2))
    assert m2.size == 16
    # |GL_2(F_2)| = 6 by enumeration
    assert len(m2.units()) == 6


def test_zero_ring():
    z1 = z(1)
    assert z1.zero == z1.one == 0
    assert z1.units() == (0,)
    R.verify_ring_axioms(z1)


def test_axioms_hold_on_corpus(corpus_rings):
    for entry, ring in corpus_rings:
        R.verify_ring_axioms(ring)


def test_quotient_isomorphic_to_zmod2():
    # oracle: exhaustive isomorphism search among the two bijections
    z4 = z(4)
    ideal = R.ideal_closure(z4, [2])
    q = R.quotient_by(z4, ideal).target
    z2 = z(2)
    assert q.size == 2
    found = False
    for perm in itertools.permutations(range(2)):
        ok = (perm[q.zero] == z2.zero and perm[q.one] == z2.one)
        for a in range(2):
            for b in range(2):
                ok = ok and perm[q.add(a, b)] == z2.add(perm[a], perm[b])
                ok = ok and perm[q.mul(a, b)] == z2.mul(perm[a], perm[b])
        found = found or ok
    assert found


def test_quotient_size_and_homomorphism(corpus_pairs):
    for name, ring, ideal, tags in corpus_pairs:
        qmap = R.quotient_by(ring, ideal)
        assert qmap.target.size == ring.size // len(ideal.members)
        for a in range(ring.size):
            assert qmap.pi(ring.neg(a)) == qmap.target.neg(qmap.pi(a))
            for b in range(ring.size):
                assert qmap.pi(ring.add(a, b)) == qmap.target.add(
                    qmap.pi(a), qmap.pi(b))
                assert qmap.pi(ring.mul(a, b)) == qmap.target.mul(
                    qmap.pi(a), qmap.pi(b))


def test_ideal_closure_examples():
    z4 = z(4)
    assert R.ideal_closure(z4, [2]).sorted_members == (0, 2)
    t2 = R.build_ring(R.TriangularSpec(R.ZmodSpec(2), 2))
    e12 = R.element_from_descriptor(t2, [[0, 1], [0, 0]])
    assert R.ideal_closure(t2, [e12]).sorted_members == (0, e12)
    m2 = R.build_ring(R.MatrixSpec(R.ZmodSpec(2), 2))
    e11 = R.element_from_descriptor(m2, [[1, 0], [0, 0]])
    # M_2(Z/2) is simple
    assert len(R.ideal_closure(m2, [e11]).members) == 16


def test_ideal_closure_idempotent(corpus_pairs):
    for name, ring, ideal, tags in corpus_pairs:
        again = R.ideal_closure(ring, ideal.sorted_members)
        assert again.members == ideal.members
        R.verify_ideal(ideal)


def test_units_closed_under_mul_and_inverse(corpus_rings):
    for entry, ring in corpus_rings:
        units = set(ring.units())
        for u in units:
            assert ring.inverse(u) in units
            for v in units:
                assert ring.mul(u, v) in units


def test_product_units_example():
    pr = R.build_ring(R.ProductSpec(R.ZmodSpec(2), R.MatrixSpec(R.ZmodSpec(2), 2)))
    # units are pairs (1, g) with g in GL_2(F_2)
    assert len(pr.units()) == 6


def test_regular_witness_examples():
    assert R.regular_witness(z(4), 2) is None
    assert R.regular_witness(z(6), 2) == 2
    for entry_ring in (z(4), z(6)):
        assert R.regular_witness(entry_ring, 0) == 0


def test_idempotents_examples():
    assert z(6).idempotents() == (0, 1, 3, 4)
    t2 = R.build_ring(R.TriangularSpec(R.ZmodSpec(2), 2))
    descs = sorted(R.element_from_descriptor(t2, d) for d in (
        [[0, 0], [0, 0]], [[1, 0], [0, 1]], [[1, 0], [0, 0]],
        [[0, 0], [0, 1]], [[1, 1], [0, 0]], [[0, 1], [0, 1]]))
    assert t2.idempotents() == tuple(descs)


def test_carrier_guard():
    from exlift.config import Guards
    with pytest.raises(GuardExceeded):
        R.build_ring(R.ZmodSpec(100), Guards(carrier=64))


def test_spec_parsing_rejects_unknown_fields():
    with pytest.raises(InvalidSpec):
        R.parse_ring_spec({"type": "zmod", "n": 4, "bogus": 1})
    with pytest.raises(InvalidSpec):
        R.parse_ring_spec({"type": "mystery"})
    with pytest.raises(InvalidSpec):
        R.parse_ring_spec({"type": "zmod", "n": 0})


def test_spec_roundtrip():
    spec = R.parse_ring_spec({
        "type": "quotient",
        "base": {"type": "product",
                 "left": {"type": "zmod", "n": 2},
                 "right": {"type": "triangular",
                           "base": {"type": "zmod", "n": 2}, "k": 2}},
        "ideal": {"generators": [[0, [[0, 1], [0, 0]]]]},
    })
    assert R.parse_ring_spec(R.ring_spec_obj(spec)) == spec
    ring = R.build_ring(spec)
    R.verify_ring_axioms(ring)


@given(st.integers(2, 16), st.data())
def test_element_descriptor_roundtrip_zmod(n, data):
    ring = z(n)
    idx = data.draw(st.integers(0, n - 1))
    assert R.element_from_descriptor(ring, R.element_descriptor(ring, idx)) == idx


def test_element_descriptor_roundtrip_structured(corpus_rings):
    for entry, ring in corpus_rings:
        for idx in list(range(ring.size))[:: max(1, ring.size // 8)]:
            desc = R.element_descriptor(ring, idx)
            assert R.element_from_descriptor(ring, desc) == idx


def test_corner_ring():
    t2 = R.build_ring(R.TriangularSpec(R.ZmodSpec(2), 2))
    e11 = R.element_from_descriptor(t2, [[1, 0], [0, 0]])
    corner, embed = R.corner_ring(t2, e11)
    R.verify_ring_axioms(corner)
    assert corner.one == embed.index(e11)


def test_all_ideals_zmod16():
    sizes = [len(i.members) for i in R.all_ideals(z(16))]
    assert sizes == [1, 2, 4, 8, 16]


def test_all_ideals_are_ideals(corpus_rings):
    for entry, ring in corpus_rings:
        if ring.size > 40:
            continue
        for ideal in R.all_ideals(ring):
            R.verify_ideal(ideal)
