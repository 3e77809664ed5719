"""Regenerate the bundled JSON fixtures under src/kitlab/fixtures."""
import itertools
from pathlib import Path

from kitlab.groupoid import ONE, cyclic_group, discrete, permutation_group, subgroup_closure
from kitlab.io import dumps, groupoid_to_raw, kit_to_raw, presheaf_to_raw, profunctor_to_raw
from kitlab.kits import enumerate_boolean_kits
from kitlab.presheaf import quot_representable
from kitlab.profunctor import identity_profunctor, transitive_profunctor
from kitlab.species import SetSpecies, parallel_or_fixture

OUT = Path(__file__).resolve().parents[1] / "src" / "kitlab" / "fixtures"


def cycle_name(p):
    seen, parts = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        c, j = [], i
        while j not in seen:
            seen.add(j)
            c.append(str(j))
            j = p[j]
        parts.append("(" + "".join(c) + ")")
    return "".join(parts) or "id"


def write(name, raw):
    (OUT / f"{name}.json").write_text(dumps(raw), encoding="utf-8")


def with_ref(raw, field, ref):
    raw = dict(raw)
    raw[field] = ref
    return raw


def main():
    OUT.mkdir(exist_ok=True)
    groupoids = {
        "One": ONE,
        "C2": cyclic_group(2),
        "C3": cyclic_group(3),
        "C6": cyclic_group(6),
        "BoolD": discrete(["f", "t"]),
    }
    perms = list(itertools.permutations(range(3)))
    groupoids["S3"] = permutation_group(perms, [cycle_name(p) for p in perms])
    for name, G in groupoids.items():
        write(name, groupoid_to_raw(G))
    write("Iso2", {
        "kind": "groupoid", "objects": ["a", "b"],
        "morphisms": [{"id": "id_a", "src": "a", "tgt": "a"}, {"id": "id_b", "src": "b", "tgt": "b"},
                      {"id": "f", "src": "a", "tgt": "b"}, {"id": "finv", "src": "b", "tgt": "a"}],
        "compose": [["id_a", "id_a", "id_a"], ["id_b", "id_b", "id_b"], ["f", "id_a", "f"],
                    ["id_b", "f", "f"], ["finv", "id_b", "finv"], ["id_a", "finv", "finv"],
                    ["finv", "f", "id_a"], ["f", "finv", "id_b"]],
        "inverse": [["id_a", "id_a"], ["id_b", "id_b"], ["f", "finv"], ["finv", "f"]],
        "identities": {"a": "id_a", "b": "id_b"},
    })

    C6 = groupoids["C6"]
    labels = {1: "trivial", 2: "g3", 3: "g2", 6: "maximal"}
    for K in enumerate_boolean_kits(C6):
        tag = labels[max(len(H) for H in K.family[0])] if len(K.family[0]) < 4 else "maximal"
        write(f"C6_kit_{tag}", with_ref(kit_to_raw(K), "groupoid", "C6"))

    for name, gens in (("q2", ["g2"]), ("q3", ["g3"])):
        H = subgroup_closure(C6, 0, [C6.mor(g) for g in gens])
        write(f"C6_{name}", with_ref(presheaf_to_raw(quot_representable(C6, 0, H)), "groupoid", "C6"))

    write("C6_hom", with_ref(with_ref(profunctor_to_raw(identity_profunctor(C6)), "source", "C6"),
                             "target", "C6"))
    C2 = groupoids["C2"]
    # one orbit C2 ⇸ C2 whose elements are fixed by (id, s): not stabilized for the trivial kits
    biset = transitive_profunctor(C2, C2, 0, 0, [(0, 0), (0, 1)])
    write("C2_fixed_biset", with_ref(with_ref(profunctor_to_raw(biset), "source", "C2"), "target", "C2"))

    swap = [(1, 0)]
    species = {
        "freeS2": SetSpecies.from_orbits(3, [(2, [])]),
        "freeF": SetSpecies.from_orbits(3, [(0, []), (1, []), (2, []), (3, []), (3, [])]),
        "pairs": SetSpecies.from_orbits(3, [(2, swap)]),
        "nonfree3": SetSpecies.from_orbits(3, [(1, []), (3, [(1, 0, 2)])]),
        "mixed": SetSpecies.from_orbits(3, [(2, []), (2, swap), (3, [(1, 2, 0)])]),
    }
    for name, F in species.items():
        raw = profunctor_to_raw(F.to_species())
        raw = with_ref(with_ref(raw, "source", "sym(One,3)"), "target", "One")
        raw["kind"] = "species"
        write(name, raw)
    por = profunctor_to_raw(parallel_or_fixture(2))
    por["kind"] = "species"
    write("por", por)

    # negative fixtures
    bad = groupoid_to_raw(C6)
    bad["compose"] = [row if row[:2] != ["g2", "g2"] else ["g2", "g2", "g5"] for row in bad["compose"]]
    write("bad_C6_nonassoc", bad)
    write("bad_Iso2_kit", {"kind": "kit", "groupoid": "Iso2", "family": {"a": [["id_a"]], "b": []}})


if __name__ == "__main__":
    main()
