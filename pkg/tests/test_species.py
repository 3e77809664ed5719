import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kitlab import errors
from kitlab.fixtures import SET_SPECIES, fixture
from kitlab.groupoid import ONE
from kitlab.kits import canonical_kit
from kitlab.presheaf import hom_presheaves, set_presheaf
from kitlab.profunctor import is_stabilized
from kitlab.species import (Evaluation, SetSpecies, analytic_eval_set, derivative, free_species,
                            generic_elements, is_cartesian, is_free_species, is_generic, is_K_species,
                            linear_roundtrip, linear_species_view, parallel_or_fixture, parallel_or_kits,
                            parallel_or_sizes, polynomial_coefficients, species_eval, trace_roundtrip,
                            unit_element)
from kitlab.sym import bang_kit, build_sym, dereliction

import oracles

SWAP = [(1, 0)]


def set_species(name):
    return SetSpecies.from_species(fixture(name))


def test_worked_values():
    trivial = SetSpecies.from_orbits(2, [(2, SWAP)])
    free = SetSpecies.from_orbits(2, [(2, [])])
    assert analytic_eval_set(trivial, 3)["total"] == 6
    assert analytic_eval_set(free, 3)["total"] == 9
    assert oracles.species_orbits(trivial.act[2].tolist(), 2, 3) == 6
    assert oracles.species_orbits(free.act[2].tolist(), 2, 3) == 9


@pytest.mark.parametrize("name", SET_SPECIES)
def test_analytic_eval_matches_oracle(name):
    F = set_species(name)
    F.validate()
    for k in range(4):
        res = analytic_eval_set(F, k)
        for n in range(F.L + 1):
            assert res["per_n"][n] == oracles.species_orbits(F.act[n].tolist(), n, k)


@pytest.mark.parametrize("name", SET_SPECIES)
def test_free_iff_polynomial_count(name):
    F = set_species(name)
    poly = all(analytic_eval_set(F, k)["per_n"][n] * math.factorial(n) == F.size(n) * k ** n
               for k in range(5) for n in range(F.L + 1))
    assert poly == is_free_species(F) == bool(polynomial_coefficients(F))


@st.composite
def orbit_lists(draw):
    out = []
    for _ in range(draw(st.integers(0, 3))):
        n = draw(st.integers(0, 3))
        gens = draw(st.lists(st.permutations(list(range(n))), max_size=2)) if n else []
        out.append((n, [tuple(g) for g in gens]))
    return out


@given(orbit_lists(), st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_random_set_species_against_oracle(orbits, k):
    F = SetSpecies.from_orbits(3, orbits)
    F.validate()
    res = analytic_eval_set(F, k)
    for n in range(4):
        assert res["per_n"][n] == oracles.species_orbits(F.act[n].tolist(), n, k)
    # species evaluation through the coend agrees with the closed form
    assert len(species_eval(F.to_species(), set_presheaf(ONE, [k]))) == res["total"]


def test_polynomial_coefficients_and_witness():
    r = polynomial_coefficients(set_species("freeF"))
    assert r and r.coefficients == {0: 1, 1: 1, 2: 1, 3: 2}
    r = polynomial_coefficients(set_species("pairs"))
    assert not r and r.witness == (2, 0, (1, 0))


def test_k_species():
    F = set_species("pairs")
    full2 = [(0, 1), (1, 0)]
    assert is_K_species(F, {2: [full2]})
    assert not is_K_species(F, {2: [[(0, 1)]]})


@pytest.mark.parametrize("name", SET_SPECIES)
def test_stable_iff_free_at_one(name):
    P = fixture(name)
    triv = canonical_kit(ONE, "trivial")
    st_ = bool(is_stabilized(P, bang_kit(triv, sym=P.source), triv))
    assert st_ == is_free_species(set_species(name))


@pytest.mark.parametrize("name", ["freeS2", "freeF"])
@pytest.mark.parametrize("probes", ["canonical", "full"])
def test_trace_roundtrip_free_species(name, probes):
    r = trace_roundtrip(fixture(name), probes=probes)
    assert r.ok, r.witness
    for (b, u), (np_, nt) in r.sizes.items():
        assert np_ == nt


def test_trace_roundtrip_parallel_or_and_dereliction():
    assert trace_roundtrip(fixture("por")).ok
    assert trace_roundtrip(dereliction(fixture("C2"), 2)).ok


def test_generic_elements_of_a_free_species():
    """For a free species every element of T(⨿ y) built from an iso tuple is generic, others are not."""
    P = fixture("freeS2")
    gens, evs = generic_elements(P)
    S = P.source
    u2 = S.obj_id((0, 0))
    assert len(gens[(0, u2)]) == len(P.cell(0, u2))
    ev = evs[u2]
    X = ev.X
    # [p, (x0, x0)] repeats a generator, so it is not generic
    p = int(P.cell(0, u2)[0])
    e = ev.element(p, (0, 0))
    assert not is_generic(ev, e)
    assert not is_generic(ev, e, probes="full")
    assert is_generic(ev, ev.element(p, unit_element(ev, u2)))
    assert len(X) == 2


def test_probe_budget():
    P = fixture("freeF")
    S = P.source
    u = S.obj_id((0, 0, 0))
    from kitlab.species import _free_of
    ev = Evaluation(P, _free_of(S, u))
    e = ev.element(int(P.cell(0, u)[0]), unit_element(ev, u))
    with pytest.raises(errors.ProbeBudgetExceeded):
        is_generic(ev, e, probes="full", budget=5)


def test_derivative_shifts_sizes():
    for name in SET_SPECIES:
        P = fixture(name)
        F = SetSpecies.from_species(P)
        D = derivative(P)
        D.validate()
        S1 = build_sym(ONE, F.L - 1)
        assert [len(D.cell(0, S1.obj_id((0,) * n))) for n in range(F.L)] == F.sizes()[1:]


def test_derivative_of_derivative_needs_room():
    P = fixture("freeS2")
    with pytest.raises(errors.BudgetExceeded):
        derivative(P, L=P.source.L)


def test_parallel_or_sizes_exhaustive():
    P = parallel_or_fixture()
    for xf, xt, yf, yt in itertools.product(range(5), repeat=4):
        assert parallel_or_sizes(P, (xf, xt, yf, yt)) == (xf * yf, xt + yt)


def test_parallel_or_is_stable():
    P, KA, KB = parallel_or_kits(2)
    assert is_stabilized(P, bang_kit(KA, sym=P.source), KB)
    assert parallel_or_sizes(P, (2, 1, 3, 2)) == (6, 3)


def test_parallel_or_fixture_matches_construction():
    from kitlab.io import same_named
    assert same_named(fixture("por"), parallel_or_fixture())


def test_linear_trace_roundtrip():
    for name in ("C6_hom", "C2_fixed_biset"):
        ok, Lt, eta = linear_roundtrip(fixture(name))
        assert ok and len(Lt) == len(fixture(name))


def test_linear_species_view_lives_at_length_one():
    P = fixture("C2_fixed_biset")
    sizes, S = linear_species_view(P, 3)
    for (b, u), n in sizes.items():
        if S.length(u) != 1:
            assert n == 0
        else:
            assert n == len(P.cell(b, S.seqs[u][0]))


def test_cartesian_identity_and_collapse():
    maps = []
    for k1, k2 in itertools.product(range(3), repeat=2):
        X, Y = set_presheaf(ONE, [k1]), set_presheaf(ONE, [k2])
        maps += [(X, Y, f) for f in hom_presheaves(X, Y)]
    P = fixture("freeS2")
    assert is_cartesian(P, P, np.arange(len(P)), maps)
    r = is_cartesian(P, fixture("pairs"), np.zeros(len(P), dtype=np.int64), maps)
    assert not r and r.witness is not None


def test_free_species_generators():
    S = build_sym(ONE, 2)
    P = free_species(S, ONE, [(0, S.obj_id((0, 0)))])
    P.validate()
    assert is_free_species(SetSpecies.from_species(P))
    assert SetSpecies.from_species(P).sizes() == [0, 0, 2]
