import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kitlab import errors
from kitlab.fixtures import C6_KITS, GROUPOIDS, fixture
from kitlab.io import FIXTURE_DIR, read_json
from kitlab.kits import (Kit, canonical_kit, double_orth, enumerate_boolean_kits, enumerate_kits, is_boolean,
                         saturation_conditions, limp_kit, orthogonal_kit, par_kit, plus_kit, tensor_kit,
                         unit_kit, validate_kit, with_kit)
from kitlab.groupoid import Subgroup, group_cap

import oracles

SMALL = [n for n in GROUPOIDS if n != "S3"] + ["S3"]


def as_sets(K):
    return {a: {H.elements for H in K.family[a]} for a in K.family}


def kit_strategy(name):
    kits = enumerate_kits(fixture(name))
    return st.sampled_from(kits)


@pytest.mark.parametrize("name", SMALL)
def test_double_orth_matches_oracle(name):
    G = fixture(name)
    for K in enumerate_kits(G):
        assert as_sets(double_orth(K)) == oracles.kit_double_orth(G, as_sets(K))


@pytest.mark.parametrize("name", SMALL)
def test_boolean_iff_two_conditions(name):
    for K in enumerate_kits(fixture(name)):
        dd = as_sets(double_orth(K)) == as_sets(K)
        assert bool(is_boolean(K)) == dd == bool(saturation_conditions(K))


@given(data=st.data(), name=st.sampled_from(["C6", "S3", "Iso2", "BoolD"]))
@settings(max_examples=60, deadline=None)
def test_galois_connection(data, name):
    K1 = data.draw(kit_strategy(name))
    K2 = data.draw(kit_strategy(name))
    assert K1.issubset(double_orth(K1))
    o = orthogonal_kit(K1)
    assert orthogonal_kit(orthogonal_kit(o)).family == o.family
    if K1.issubset(K2):
        assert orthogonal_kit(K2).issubset(orthogonal_kit(K1).on(orthogonal_kit(K2).base))


def test_c6_census_is_exactly_four():
    C6 = fixture("C6")
    got = sorted(sorted(len(H) for H in K.family[0]) for K in enumerate_boolean_kits(C6))
    assert got == [[1], [1, 2], [1, 2, 3, 6], [1, 3]]


def test_bundled_c6_kits_are_the_census():
    census = {frozenset(K.family[0]) for K in enumerate_boolean_kits(fixture("C6"))}
    assert {frozenset(fixture(n).family[0]) for n in C6_KITS} == census


def test_trivial_orth_is_maximal():
    for name in GROUPOIDS:
        G = fixture(name)
        assert orthogonal_kit(canonical_kit(G, "trivial")).family == canonical_kit(G, "maximal").family
        assert orthogonal_kit(canonical_kit(G, "maximal")).family == canonical_kit(G, "trivial").family


def test_conjugation_closure_is_enforced():
    raw = read_json(FIXTURE_DIR / "bad_Iso2_kit.json")
    with pytest.raises(errors.NotConjugationClosed):
        validate_kit(fixture("Iso2"), raw["family"])
    S3 = fixture("S3")
    with pytest.raises(errors.NotConjugationClosed):
        validate_kit(S3, {"*": [["id"], ["id", "(01)"]]})
    # the full conjugacy class is accepted
    K = validate_kit(S3, {"*": [["id"], ["id", "(01)"], ["id", "(02)"], ["id", "(12)"]]})
    assert len(K.family[0]) == 4


def test_non_boolean_kit_rejected_by_tensor():
    S3 = fixture("S3")
    K = validate_kit(S3, {"*": [["id", "(01)"], ["id", "(02)"], ["id", "(12)"]]})  # no trivial subgroup
    assert not is_boolean(K)
    with pytest.raises(errors.NotBoolean):
        tensor_kit(K, K)


def c6_triples():
    kits = enumerate_boolean_kits(fixture("C6"))
    return kits, list(itertools.product(range(4), repeat=2))


def test_limp_is_boolean_and_dual_of_tensor():
    kits, pairs = c6_triples()
    for i, j in pairs:
        L = limp_kit(kits[i], kits[j])
        assert is_boolean(L)
        assert L.family == orthogonal_kit(tensor_kit(kits[i], orthogonal_kit(kits[j]))).family


def test_tensor_is_contained_in_par():
    kits, pairs = c6_triples()
    for i, j in pairs:
        assert tensor_kit(kits[i], kits[j]).issubset(par_kit(kits[i], kits[j]))


def test_par_not_contained_in_tensor_on_c6():
    """The inclusion ⅋ ⊆ ⊗ fails already for (trivial, {1, ⟨γ³⟩}): ⟨(γ³, γ³)⟩ lies in ⅋ but not in ⊗."""
    C6 = fixture("C6")
    triv = canonical_kit(C6, "trivial")
    g3 = Kit(C6, {0: {Subgroup(0, frozenset([0])), Subgroup(0, frozenset([0, 3]))}})
    diag = Subgroup(0, frozenset([0, 3 * 6 + 3]))
    assert diag in par_kit(triv, g3).family[0]
    assert diag not in tensor_kit(triv, g3).family[0]


def test_tensor_unit():
    for K in enumerate_boolean_kits(fixture("C6")):
        T = tensor_kit(unit_kit(), K)
        assert {frozenset(H.elements) for H in T.family[0]} == {H.elements for H in K.family[0]}


def test_with_equals_plus():
    kits = enumerate_boolean_kits(fixture("C6")) + enumerate_boolean_kits(fixture("BoolD"))
    for A, B in itertools.product(kits, repeat=2):
        W, P = with_kit(A, B), plus_kit(A, B)
        assert W.base == P.base and W.family == P.family


def test_triple_tensor_needs_raised_cap():
    kits = enumerate_boolean_kits(fixture("C6"))
    with group_cap(216):
        T = tensor_kit(tensor_kit(kits[1], kits[2]), kits[3])
    assert T.base.n_morphisms == 216
