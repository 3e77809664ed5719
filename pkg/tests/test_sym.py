import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kitlab import errors
from kitlab._kernels import assoc_violation
from kitlab.fixtures import fixture
from kitlab.groupoid import ONE, check_groupoid
from kitlab.kits import canonical_kit, enumerate_boolean_kits, is_boolean
from kitlab.profunctor import identity_profunctor, is_stabilized
from kitlab.sym import (bang_kit, build_sym, build_sym_sym, coderiction, cycle_order, dereliction, digging,
                        flatten, loop_endomorphism, seely_inclusions, sym_lift, whynot_kit)


def expected_counts(G, L):
    """Objects Σ n^k, morphisms Σ_k k! · Σ_{u,v} Π |hom(a_i, b_i)| for v a permutation of u."""
    objs = sum(G.n_objects ** k for k in range(L + 1))
    hom = np.zeros((G.n_objects, G.n_objects), dtype=np.int64)
    for m in range(G.n_morphisms):
        hom[G.src[m], G.tgt[m]] += 1
    mors = 0
    for k in range(L + 1):
        for u in itertools.product(range(G.n_objects), repeat=k):
            for s in itertools.permutations(range(k)):
                for v in itertools.product(range(G.n_objects), repeat=k):
                    mors += math.prod(int(hom[u[i], v[s[i]]]) for i in range(k))
    return objs, mors


@pytest.mark.parametrize("name,L", [("One", 4), ("C2", 3), ("Iso2", 2), ("BoolD", 3), ("C3", 2)])
def test_sym_sizes_and_laws(name, L):
    G = fixture(name)
    S = build_sym(G, L)
    assert (S.n_objects, S.n_morphisms) == expected_counts(G, L)
    assert assoc_violation(S.comp) is None
    check_groupoid(S)


def test_sym_c2_endomorphisms():
    S = build_sym(fixture("C2"), 3)
    assert (S.n_objects, S.n_morphisms) == (4, 59)
    assert len(S.endo(S.obj_id((0, 0)))) == 8
    assert len(S.endo(S.obj_id((0, 0, 0)))) == 48


def test_truncation_is_reported():
    S = build_sym(fixture("C2"), 2)
    with pytest.raises(errors.BudgetExceeded):
        S.obj_id((0, 0, 0))


@given(st.permutations(list(range(6))), st.integers(0, 5))
def test_cycle_order_is_cycle_length(perm, i):
    seen, j = {i}, perm[i]
    while j != i:
        seen.add(j)
        j = perm[j]
    assert cycle_order(perm, i) == len(seen)


def test_cycle_order_rejects_bad_index():
    with pytest.raises(errors.IndexOutOfRange):
        cycle_order((1, 0), 2)


def test_loop_endomorphism_by_hand():
    C3 = fixture("C3")
    S = build_sym(C3, 2)
    g = C3.mor("g")
    # swap with components (g, g): the loop at either index is g∘g
    m = S.mor_id((1, 0), (g, g))
    assert loop_endomorphism(S, m, 0) == int(C3.comp[g, g])
    m = S.mor_id((0, 1), (g, 0))
    assert loop_endomorphism(S, m, 0) == g and loop_endomorphism(S, m, 1) == 0
    Iso = fixture("Iso2")
    SI = build_sym(Iso, 1)
    with pytest.raises(errors.NotEndo):
        loop_endomorphism(SI, SI.singleton_mor(Iso.mor("f")), 0)


@pytest.mark.parametrize("name", ["One", "C2", "BoolD", "Iso2"])
def test_bang_kits_boolean_with_singletons(name):
    for K in enumerate_boolean_kits(fixture(name)):
        B = bang_kit(K, 3)
        assert is_boolean(B)
        S = B.base
        for a in range(K.base.n_objects):
            u = S.singleton(a)
            image = {frozenset(S.singleton_mor(m) for m in H.elements) for H in K.family[a]}
            assert {H.elements for H in B.family[u]} == image


def test_bang_of_trivial_on_one_is_maximal():
    B = bang_kit(canonical_kit(ONE, "trivial"), 4)
    assert B.family == canonical_kit(B.base, "maximal").family


def test_bang_trivial_c2_at_pairs():
    """!Triv at ⟨∗,∗⟩ over C2: subgroups of End whose loops are all the identity."""
    C2 = fixture("C2")
    S = build_sym(C2, 2)
    B = bang_kit(canonical_kit(C2, "trivial"), sym=S)
    u = S.obj_id((0, 0))
    ends = [int(m) for m in S.endo(u)]
    good = {m for m in ends if all(loop_endomorphism(S, m, i) == 0 for i in range(2))}
    allowed = {H.elements for H in S.lattice(u).subgroups if H.elements <= good}
    assert {H.elements for H in B.family[u]} == allowed


def test_whynot_boolean_and_k_at_singletons():
    for K in enumerate_boolean_kits(fixture("C2")):
        W = whynot_kit(K, 3)
        assert is_boolean(W)
        S = W.base
        for a in range(K.base.n_objects):
            u = S.singleton(a)
            assert {H.elements for H in W.family[u]} == {frozenset(S.singleton_mor(m) for m in H.elements)
                                                         for H in K.family[a]}


@pytest.mark.parametrize("name", ["C2", "Iso2", "BoolD"])
def test_dereliction_and_coderiction_stabilized(name):
    for K in enumerate_boolean_kits(fixture(name)):
        S = build_sym(K.base, 3)
        B = bang_kit(K, sym=S)
        D = dereliction(K, 3)
        D.validate()
        assert is_stabilized(D, B, K)
        assert is_stabilized(coderiction(K, 3), K, B)


def test_dereliction_cells():
    C2 = fixture("C2")
    D = dereliction(C2, 2)
    S = D.source
    assert len(D.cell(0, S.obj_id((0,)))) == 2
    assert len(D.cell(0, S.obj_id((0, 0)))) == 0


def test_digging_stabilized_and_flatten_is_functorial():
    C2 = fixture("C2")
    S, SS = build_sym_sym(C2, 3)
    P = digging(C2, 3)
    P.validate()
    for K in enumerate_boolean_kits(C2):
        B = bang_kit(K, sym=S)
        assert is_stabilized(P, B, bang_kit(B, sym=SS))
    rng = np.random.default_rng(1)
    for _ in range(300):
        b2 = int(rng.integers(SS.n_morphisms))
        cands = np.nonzero(SS.src == SS.tgt[b2])[0]
        b1 = int(rng.choice(cands))
        assert flatten(SS, int(SS.comp[b1, b2])) == int(S.comp[flatten(SS, b1), flatten(SS, b2)])


def test_sym_lift_identity_is_identity_shaped():
    C2 = fixture("C2")
    P = sym_lift(identity_profunctor(C2), 2)
    P.validate()
    S = P.source
    for u in range(S.n_objects):
        assert len(P.cell(u, u)) == len(S.hom(u, u))


@pytest.mark.parametrize("pair", [("C2", "One"), ("BoolD", "One"), ("C2", "C2")])
def test_seely_inclusions(pair):
    for K1 in enumerate_boolean_kits(fixture(pair[0])):
        for K2 in enumerate_boolean_kits(fixture(pair[1])):
            assert seely_inclusions(K1, K2, 3) == []
