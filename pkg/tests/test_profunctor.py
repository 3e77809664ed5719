import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kitlab import errors
from kitlab.fixtures import fixture
from kitlab.kits import canonical_kit, enumerate_boolean_kits
from kitlab.profunctor import (Profunctor, compose, disjoint_union, find_iso, identity_profunctor,
                               is_equivariant_bijection, is_stabilized, naive_coend_classes, random_profunctor,
                               tensor_profunctors, transitive_profunctor)

import oracles

BASES = ["One", "C2", "C3", "Iso2", "BoolD", "S3"]


def random_pair(seed):
    rng = random.Random(seed)
    A, B, C = (fixture(rng.choice(BASES)) for _ in range(3))
    return random_profunctor(A, B, rng, max_cell=8), random_profunctor(B, C, rng, max_cell=8)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_coend_matches_bfs_oracle(seed):
    P, Q = random_pair(seed)
    P.validate()
    Q.validate()
    R = compose(P, Q)
    R.validate()
    blocks = oracles.coend_partition(P, Q)
    assert len(R) == len(blocks)
    assert naive_coend_classes(P, Q) == blocks
    # every block maps to one composite element
    for blk in blocks:
        assert len({R.class_of(p, q) for p, q in blk}) == 1


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_identity_is_a_unit(seed):
    P, _ = random_pair(seed)
    assert find_iso(compose(identity_profunctor(P.source), P), P) is not None
    assert find_iso(compose(P, identity_profunctor(P.target)), P) is not None


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_composition_is_associative_up_to_iso(seed):
    rng = random.Random(seed)
    A, B, C, D = (fixture(rng.choice(BASES[:5])) for _ in range(4))
    P = random_profunctor(A, B, rng, max_cell=6)
    Q = random_profunctor(B, C, rng, max_cell=6)
    R = random_profunctor(C, D, rng, max_cell=6)
    assert find_iso(compose(compose(P, Q), R), compose(P, compose(Q, R))) is not None


def test_identity_composite_size():
    C6 = fixture("C6")
    assert len(compose(identity_profunctor(C6), identity_profunctor(C6))) == 6


def test_dual_is_involutive():
    P = fixture("C2_fixed_biset")
    D = P.dual()
    D.validate()
    assert D.dual().source == P.source and np.array_equal(D.dual().left, P.left)


def test_biset_stability_witness():
    P = fixture("C2_fixed_biset")
    C2 = P.source
    triv, full = canonical_kit(C2, "trivial"), canonical_kit(C2, "maximal")
    r = is_stabilized(P, triv, triv)
    assert not r
    a, b, p, alpha, beta, clause = r.witness
    # the witness really is a fixed point that breaks the forward clause
    assert P.act(alpha, p, beta) == p
    assert alpha in triv.union(a) and beta not in triv.union(b) and clause == "forward"
    assert is_stabilized(P, full, full)


def test_stabilized_closed_under_composition():
    kits = {n: enumerate_boolean_kits(fixture(n)) for n in BASES}
    hits = 0
    for seed in range(60):
        rng = random.Random(seed)
        names = [rng.choice(BASES) for _ in range(3)]
        A, B, C = (fixture(n) for n in names)
        P = random_profunctor(A, B, rng, max_cell=8)
        Q = random_profunctor(B, C, rng, max_cell=8)
        R = compose(P, Q)
        for KA in kits[names[0]]:
            for KB in kits[names[1]]:
                if not is_stabilized(P, KA, KB):
                    continue
                for KC in kits[names[2]]:
                    if is_stabilized(Q, KB, KC):
                        hits += 1
                        assert is_stabilized(R, KA, KC)
    assert hits > 50


def test_transitive_profunctor_needs_a_subgroup():
    C2 = fixture("C2")
    with pytest.raises(errors.NotSubgroup):
        transitive_profunctor(C2, C2, 0, 0, [(1, 1)])
    P = transitive_profunctor(C2, C2, 0, 0, [(0, 0), (1, 1)])
    P.validate()
    assert len(P) == 2


def test_tensor_and_disjoint_union_sizes():
    P = fixture("C2_fixed_biset")
    T = tensor_profunctors(P, P)
    T.validate()
    assert len(T) == len(P) ** 2
    U = disjoint_union(P, P)
    assert len(U) == 2 * len(P)
    assert find_iso(U, P) is None


def test_equivariant_bijection_needs_both_actions():
    S3 = fixture("S3")
    P = identity_profunctor(S3)
    g = S3.mor("(01)")
    translate = np.array([S3.comp[g, p] for p in range(len(P))])
    assert is_equivariant_bijection(P, P, np.arange(len(P)))
    # g∘- commutes with precomposition but not with postcomposition in a non-abelian group
    assert not is_equivariant_bijection(P, P, translate)
    C6 = fixture("C6_hom")
    shift = (np.arange(len(C6)) + 1) % len(C6)
    assert is_equivariant_bijection(C6, C6, shift)


def test_base_mismatch_is_reported():
    P = fixture("C6_hom")
    with pytest.raises(errors.BaseMismatch):
        is_stabilized(P, canonical_kit(fixture("C2"), "trivial"), canonical_kit(fixture("C6"), "trivial"))
    assert isinstance(P, Profunctor)
