import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kitlab import errors
from kitlab.fixtures import fixture
from kitlab.groupoid import ONE, Subgroup
from kitlab.kits import canonical_kit, enumerate_boolean_kits, orthogonal_kit
from kitlab.presheaf import (apply_profunctor, cokernel_pair, coproduct, decompose, find_presheaf_iso,
                             free_presheaf, hom_presheaves, is_natural, is_stabilized_presheaf,
                             preserves_stabilized, presheaf_orthogonal, quot_representable, quotient_family,
                             representable, set_presheaf, stab_of_family, stabilizer, terminal_presheaf)
from kitlab.profunctor import identity_profunctor, is_stabilized, random_profunctor


def all_maps_brute(X, Y):
    """Every function X -> Y respecting fibres and the action, by exhaustive search."""
    out = []
    for f in itertools.product(range(len(Y)), repeat=len(X)):
        if is_natural(X, Y, np.array(f, dtype=np.int64)):
            out.append(tuple(f))
    return sorted(out)


@pytest.mark.parametrize("order", [1, 2, 3, 6])
def test_quotiented_representable_sizes(order):
    C6 = fixture("C6")
    H = next(H for H in C6.lattice(0).subgroups if len(H) == order)
    X = quot_representable(C6, 0, H)
    X.validate()
    assert len(X) == 6 // order
    assert all(stabilizer(X, x) == H for x in range(len(X)))


def test_quotient_needs_a_subgroup():
    with pytest.raises(errors.NotSubgroup):
        quot_representable(fixture("C6"), 0, [0, 1])


def test_fixture_presheaves():
    assert len(fixture("C6_q2")) == 2 and len(fixture("C6_q3")) == 3
    assert stabilizer(fixture("C6_q2"), 0).elements == frozenset({0, 2, 4})


@pytest.mark.parametrize("pair", [("C6_q2", "C6_q3"), ("C6_q3", "C6_q3"), ("C6_q2", "C6_q2")])
def test_hom_enumeration_matches_brute_force(pair):
    X, Y = fixture(pair[0]), fixture(pair[1])
    got = sorted(tuple(int(v) for v in f) for f in hom_presheaves(X, Y))
    assert got == all_maps_brute(X, Y)


@given(st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=16, deadline=None)
def test_set_presheaf_maps_are_all_functions(k1, k2):
    X, Y = set_presheaf(ONE, [k1]), set_presheaf(ONE, [k2])
    assert len(list(hom_presheaves(X, Y))) == k2 ** k1


def test_orthogonality_of_quotients():
    C6 = fixture("C6")
    op = C6.opposite()
    subs = C6.lattice(0).subgroups
    for G, H in itertools.product(subs, repeat=2):
        r = presheaf_orthogonal(quot_representable(C6, 0, G), quot_representable(op, 0, H))
        assert bool(r) == (len(G.elements & H.elements) == 1)
        if not r:
            x, y, alpha = r.witness
            assert alpha in G.elements and alpha in H.elements


def test_terminal_stabilized_only_for_maximal():
    C6 = fixture("C6")
    for K in enumerate_boolean_kits(C6):
        full = Subgroup(0, frozenset(range(6)))
        assert bool(is_stabilized_presheaf(terminal_presheaf(C6), K)) == (full in K.family[0])


def test_decomposition_roundtrip():
    C6 = fixture("C6")
    X = coproduct(fixture("C6_q2"), fixture("C6_q3"), representable(C6, 0))
    D = decompose(X, canonical_kit(C6, "maximal"))
    assert sorted(len(H) for _, H in D.summands) == [1, 2, 3]
    Y, iso = D.reconstruct()
    assert is_natural(Y, X, iso) and sorted(iso.tolist()) == list(range(len(X)))
    with pytest.raises(errors.NotStabilized):
        decompose(X, canonical_kit(C6, "trivial"))


def test_decomposition_on_a_connected_groupoid():
    Iso = fixture("Iso2")
    X = coproduct(representable(Iso, 0), representable(Iso, 1), terminal_presheaf(Iso))
    D = decompose(X)
    assert [a for a, _ in D.summands] == [0, 0, 0]
    Y, iso = D.reconstruct()
    assert is_natural(Y, X, iso)


def test_stab_of_quotient_family_recovers_kit():
    for K in enumerate_boolean_kits(fixture("C6")):
        assert stab_of_family(quotient_family(K), K.base).family == K.family


def test_cokernel_pair_detects_surjectivity():
    C6 = fixture("C6")
    y = representable(C6, 0)
    q3 = fixture("C6_q3")
    for f in hom_presheaves(y, q3):
        Z, g, h = cokernel_pair(y, q3, f)
        assert np.array_equal(g, h)
    one = terminal_presheaf(C6)
    X = coproduct(one, one)
    Z, g, h = cokernel_pair(one, X, np.array([0]))
    assert not np.array_equal(g, h) and len(Z) == 3
    assert is_natural(X, Z, g) and is_natural(X, Z, h)


def test_apply_identity_is_identity():
    C6 = fixture("C6")
    for X in (fixture("C6_q3"), coproduct(fixture("C6_q2"), representable(C6, 0))):
        Y = apply_profunctor(identity_profunctor(C6), X)
        assert find_presheaf_iso(Y, X) is not None


def test_apply_hom_profunctor_sizes():
    Y = apply_profunctor(fixture("C6_hom"), fixture("C6_q3"))
    assert Y.sizes() == [3]


@pytest.mark.parametrize("seed", range(12))
def test_stabilized_iff_preserves(seed):
    import random
    rng = random.Random(seed)
    A, B = (fixture(rng.choice(["C2", "C3", "C6", "Iso2", "S3"])) for _ in range(2))
    P = random_profunctor(A, B, rng, max_cell=6)
    for KA in enumerate_boolean_kits(A):
        for KB in enumerate_boolean_kits(B):
            ok, w = preserves_stabilized(P, KA, KB)
            assert bool(is_stabilized(P, KA, KB)) == ok
            if not ok:
                assert w[0] in ("forward", "backward")


def test_stabilized_kit_on_the_opposite():
    C6 = fixture("C6")
    K = enumerate_boolean_kits(C6)[1]
    Ko = orthogonal_kit(K)
    X = quot_representable(Ko.base, 0, next(iter(Ko.family[0] - {Subgroup(0, frozenset([0]))})))
    assert is_stabilized_presheaf(X, Ko)


def test_free_presheaf_size():
    C2 = fixture("C2")
    assert len(free_presheaf(C2, (0, 0, 0))) == 6
