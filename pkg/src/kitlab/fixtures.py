"""Bundled fixtures, loaded and validated on first use."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .io import FIXTURE_DIR, load

GROUPOIDS = ("One", "C2", "C3", "C6", "Iso2", "BoolD", "S3")
C6_KITS = ("C6_kit_trivial", "C6_kit_g3", "C6_kit_g2", "C6_kit_maximal")
PRESHEAVES = ("C6_q2", "C6_q3")
PROFUNCTORS = ("C6_hom", "C2_fixed_biset")
SET_SPECIES = ("freeS2", "freeF", "pairs", "nonfree3", "mixed")
SPECIES = SET_SPECIES + ("por",)
NEGATIVE = ("bad_C6_nonassoc", "bad_Iso2_kit")


@lru_cache(maxsize=None)
def fixture(name: str):
    """Load a bundled fixture by name (validated)."""
    return load(FIXTURE_DIR / f"{name}.json")


def fixture_names():
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))


@dataclass
class FixtureBundle:
    groupoids: dict = field(default_factory=dict)
    kits: dict = field(default_factory=dict)
    profunctors: dict = field(default_factory=dict)
    presheaves: dict = field(default_factory=dict)
    species: dict = field(default_factory=dict)


@lru_cache(maxsize=None)
def bundle() -> FixtureBundle:
    return FixtureBundle(
        groupoids={n: fixture(n) for n in GROUPOIDS},
        kits={n: fixture(n) for n in C6_KITS},
        profunctors={n: fixture(n) for n in PROFUNCTORS},
        presheaves={n: fixture(n) for n in PRESHEAVES},
        species={n: fixture(n) for n in SPECIES},
    )
