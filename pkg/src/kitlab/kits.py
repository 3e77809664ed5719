"""Kits on finite groupoids: orthogonality, Boolean closure, the Boolean lattice and the connectives."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (BaseMismatch, NotBoolean, NotConjugationClosed, NotSubgroup,
                     SearchSpaceTooLarge)
from .groupoid import ONE, Groupoid, Subgroup, conjugate_subgroup, coproduct, product


class Kit:
    """A conjugation-closed choice of subgroups at every object of ``base``."""

    def __init__(self, base: Groupoid, family, boolean=None):
        self.base = base
        self.family = {a: frozenset(family.get(a, ())) for a in range(base.n_objects)}
        self.boolean = boolean
        self._unions = {}

    def __getitem__(self, a):
        return self.family[a]

    def __eq__(self, other):
        if not isinstance(other, Kit):
            return NotImplemented
        return self.family == other.family and self.base == other.base

    def __hash__(self):
        return hash(tuple(sorted((a, len(f)) for a, f in self.family.items())))

    def __repr__(self):
        parts = []
        for a, fam in self.family.items():
            subs = sorted(fam, key=Subgroup.key)
            parts.append(f"{self.base.objects[a]}: " + ", ".join(
                "{" + ",".join(self.base.names[m] for m in H.sorted()) + "}" for H in subs))
        return "Kit(" + "; ".join(parts) + ")"

    def issubset(self, other):
        return all(self.family[a] <= other.family[a] for a in self.family)

    def union(self, a):
        """The element set ∪K(a)."""
        u = self._unions.get(a)
        if u is None:
            u = frozenset().union(*[H.elements for H in self.family[a]])
            self._unions[a] = u
        return u

    def union_mask(self, a):
        lat = self.base.lattice(a)
        return lat.element_mask(self.union(a))

    def rows(self, a):
        return self.base.lattice(a).rows(self.family[a])

    def on(self, base):
        """Same family viewed on a structurally equal groupoid (e.g. an opposite of an opposite)."""
        return Kit(base, self.family, self.boolean)


KitPair = Kit


def _fam_from_rows(G, a, rows):
    subs = G.lattice(a).subgroups
    return frozenset(subs[r] for r in rows)


# ------------------------------------------------------------- validation

def conjugation_witness(G: Groupoid, family):
    """First (α, H) with α⁻¹Hα missing from the family, or None."""
    for a in range(G.n_objects):
        for H in sorted(family.get(a, ()), key=Subgroup.key):
            for m in range(G.n_morphisms):
                if G.tgt[m] != a:
                    continue
                # α: a' -> a, so α⁻¹ H α is conjugation by α⁻¹
                C = conjugate_subgroup(G, H, int(G.inv[m]))
                if C not in family.get(C.base, ()):
                    return m, H
    return None


def validate_kit(G: Groupoid, raw_family) -> Kit:
    """Build a Kit from {object: [[morphism ids]]}; subgroup and conjugation checks only, no completion."""
    family = {}
    for o, groups in raw_family.items():
        a = G.obj(o)
        lat = G.lattice(a)
        subs = set()
        for ids in groups:
            els = frozenset(G.mor(x) for x in ids)
            if els not in lat.row:
                raise NotSubgroup(f"{[G.names[m] for m in sorted(els)]} is not a subgroup of End({G.objects[a]})")
            subs.add(lat.subgroups[lat.row[els]])
        family[a] = frozenset(subs)
    w = conjugation_witness(G, family)
    if w is not None:
        m, H = w
        raise NotConjugationClosed(
            f"conjugate of {[G.names[x] for x in H.sorted()]} along {G.names[m]} is missing")
    return Kit(G, family)


def canonical_kit(G: Groupoid, which: str) -> Kit:
    if which in ("trivial", "triv"):
        fam = {a: [Subgroup(a, frozenset([int(G.ident[a])]))] for a in range(G.n_objects)}
    elif which in ("maximal", "max", "end"):
        fam = {a: G.lattice(a).subgroups for a in range(G.n_objects)}
    else:
        raise ValueError(f"unknown canonical kit {which!r}")
    return Kit(G, fam, boolean=True)


def kit_from_rows(G, rows_by_obj, boolean=None):
    return Kit(G, {a: _fam_from_rows(G, a, r) for a, r in rows_by_obj.items()}, boolean)


# ---------------------------------------------------------- orthogonality

def orth_rows(G: Groupoid, a, rows):
    """Rows of subgroups meeting every subgroup in ``rows`` trivially."""
    lat = G.lattice(a)
    if len(rows) == 0:
        return np.arange(len(lat))
    return np.nonzero(lat.orth[:, rows].all(axis=1))[0]


def orth_family(G: Groupoid, family):
    return {a: _fam_from_rows(G, a, orth_rows(G, a, G.lattice(a).rows(family.get(a, ()))))
            for a in range(G.n_objects)}


def orthogonal_kit(K: Kit) -> Kit:
    """K^⊥, a kit on the opposite groupoid (same ids, same subgroup sets)."""
    return Kit(K.base.opposite(), orth_family(K.base, K.family), boolean=True)


def double_orth(K: Kit) -> Kit:
    return orthogonal_kit(orthogonal_kit(K))


@dataclass
class BooleanCertificate:
    boolean: bool
    missing: Subgroup | None = None          # first subgroup of K^⊥⊥ not in K
    downward_closed: bool = True             # K(a) = {H | H ⊆ ∪K(a)} everywhere
    downward_witness: tuple | None = None    # (a, H) breaking it
    saturated: bool = True
    saturation_witness: tuple | None = None  # (a, α) with Φ(α) but α ∉ ∪K(a)

    def __bool__(self):
        return self.boolean


def phi(G: Groupoid, a, alpha, union_ids) -> bool:
    """The saturation formula: for all n, αⁿ = id or some αⁿᵐ ≠ id lies in the union."""
    lat = G.lattice(a)
    x = lat.local[alpha]
    o = int(lat.orders[x])
    for n in range(1, o + 1):
        xn = lat.power(x, n)
        if xn == lat.ident:
            continue
        ok = False
        for m in range(1, o + 1):
            y = lat.power(x, n * m)
            if y != lat.ident and int(lat.elems[y]) in union_ids:
                ok = True
                break
        if not ok:
            return False
    return True


def saturation_conditions(K: Kit):
    """Evaluate the two-condition characterization independently of the double orthogonal."""
    G = K.base
    cert = BooleanCertificate(boolean=True)
    for a in range(G.n_objects):
        lat = G.lattice(a)
        U = K.union(a)
        below = frozenset(lat.subgroups[r] for r in lat.contained_in(lat.element_mask(U)))
        if below != K.family[a] and cert.downward_closed:
            cert.downward_closed = False
            diff = sorted(below ^ K.family[a], key=Subgroup.key)
            cert.downward_witness = (a, diff[0])
        if cert.saturated:
            for alpha in lat.elems:
                alpha = int(alpha)
                if alpha not in U and phi(G, a, alpha, U):
                    cert.saturated = False
                    cert.saturation_witness = (a, alpha)
                    break
    cert.boolean = cert.downward_closed and cert.saturated
    return cert


def is_boolean(K: Kit) -> BooleanCertificate:
    dd = double_orth(K)
    cert = saturation_conditions(K)
    ok = dd.family == K.family
    cert.boolean = ok
    if not ok:
        for a in range(K.base.n_objects):
            extra = sorted(dd.family[a] - K.family[a], key=Subgroup.key)
            if extra:
                cert.missing = extra[0]
                break
    K.boolean = ok
    return cert


def require_boolean(*kits):
    for K in kits:
        if K.boolean is None:
            is_boolean(K)
        if not K.boolean:
            raise NotBoolean(f"{K!r} is not Boolean")


# ------------------------------------------------------------- enumeration

def subgroup_classes(G: Groupoid, cyclic_only=False):
    """Conjugacy classes of subgroups across the whole groupoid, each a sorted list."""
    seen = set()
    classes = []
    for a in range(G.n_objects):
        lat = G.lattice(a)
        for H in lat.subgroups:
            if H in seen:
                continue
            if cyclic_only and not _is_cyclic(lat, H):
                continue
            cls = set()
            for m in range(G.n_morphisms):
                if G.src[m] == a:
                    cls.add(conjugate_subgroup(G, H, m))
            seen |= cls
            classes.append(sorted(cls, key=Subgroup.key))
    return classes


def _is_cyclic(lat, H):
    return any(int(lat.orders[lat.local[m]]) == len(H) for m in H.elements)


def kit_from_classes(G, classes):
    fam = {}
    for cls in classes:
        for H in cls:
            fam.setdefault(H.base, set()).add(H)
    return Kit(G, fam)


def enumerate_kits(G: Groupoid, max_classes=16):
    """Every conjugation-closed family (all unions of subgroup classes)."""
    classes = subgroup_classes(G)
    if len(classes) > max_classes:
        raise SearchSpaceTooLarge(f"{len(classes)} subgroup classes, 2^{len(classes)} families")
    out = []
    for bits in range(1 << len(classes)):
        out.append(kit_from_classes(G, [c for i, c in enumerate(classes) if bits >> i & 1]))
    return out


def enumerate_boolean_kits(G: Groupoid, max_subgroups=20):
    """All Boolean kits, each the closure of the cyclic-subgroup classes it contains."""
    for a in range(G.n_objects):
        if len(G.lattice(a)) > max_subgroups:
            raise SearchSpaceTooLarge(f"End({G.objects[a]}) has {len(G.lattice(a))} subgroups")
    cyc = subgroup_classes(G, cyclic_only=True)

    def close(K):
        return double_orth(K)

    def key(K):
        return tuple(sorted((a, H.key()) for a, f in K.family.items() for H in f))

    start = close(Kit(G, {}))
    found = {key(start): start}
    queue = [start]
    while queue:
        nxt = []
        for K in queue:
            for cls in cyc:
                if cls[0] in K.family[cls[0].base]:
                    continue
                fam = {a: set(f) for a, f in K.family.items()}
                for H in cls:
                    fam[H.base].add(H)
                C = close(Kit(G, fam))
                k = key(C)
                if k not in found:
                    found[k] = C
                    nxt.append(C)
        queue = nxt
    kits = list(found.values())
    for K in kits:
        K.base = G
        K.boolean = True
    kits.sort(key=lambda K: (sum(len(f) for f in K.family.values()), key(K)))
    return kits


def boolean_lattice_ops(K1: Kit, K2: Kit, op: str) -> Kit:
    if K1.base != K2.base:
        raise BaseMismatch("kits live on different groupoids")
    require_boolean(K1, K2)
    if op == "meet":
        return Kit(K1.base, {a: K1[a] & K2[a] for a in K1.family}, boolean=True)
    if op == "join":
        return double_orth(Kit(K1.base, {a: K1[a] | K2[a] for a in K1.family})).on(K1.base)
    raise ValueError(f"unknown lattice op {op!r}")


# ------------------------------------------------------------- connectives

@lru_cache(maxsize=None)
def _product(G1, G2):
    return product(G1, G2)


@lru_cache(maxsize=None)
def _coproduct(*gs):
    return coproduct(*gs)


def product_groupoid(G1, G2):
    return _product(G1, G2)


def coproduct_groupoid(*gs):
    return _coproduct(*gs)


def _product_subgroup(P, G2, a, b, H1, H2):
    m2 = G2.n_morphisms
    return Subgroup(a * G2.n_objects + b, frozenset(h1 * m2 + h2 for h1 in H1.elements for h2 in H2.elements))


def _product_family(P, G1, G2, fam1, fam2):
    fam = {}
    for a in range(G1.n_objects):
        for b in range(G2.n_objects):
            fam[a * G2.n_objects + b] = {
                _product_subgroup(P, G2, a, b, H1, H2) for H1 in fam1[a] for H2 in fam2[b]}
    return fam


def tensor_kit(A: Kit, B: Kit) -> Kit:
    """(A×B, (K1×K2)^⊥⊥)."""
    require_boolean(A, B)
    P = product_groupoid(A.base, B.base)
    fam = _product_family(P, A.base, B.base, A.family, B.family)
    return Kit(P, orth_family(P, orth_family(P, fam)), boolean=True)


def par_kit(A: Kit, B: Kit) -> Kit:
    """(A×B, (K1^⊥×K2^⊥)^⊥)."""
    require_boolean(A, B)
    P = product_groupoid(A.base, B.base)
    o1, o2 = orth_family(A.base, A.family), orth_family(B.base, B.family)
    return Kit(P, orth_family(P, _product_family(P, A.base, B.base, o1, o2)), boolean=True)


def limp_kit(A: Kit, B: Kit) -> Kit:
    """A ⊸ B on A^op × B, built elementwise from the transport condition (not via duality)."""
    require_boolean(A, B)
    G1, G2 = A.base, B.base
    P = product_groupoid(G1.opposite(), G2)
    ao, bo = orthogonal_kit(A), orthogonal_kit(B)
    m2 = G2.n_morphisms
    fam = {}
    for a in range(G1.n_objects):
        U1, U1p = A.union(a), ao.union(a)
        for b in range(G2.n_objects):
            U2, U2p = B.union(b), bo.union(b)
            o = a * G2.n_objects + b
            lat = P.lattice(o)
            good = np.zeros(len(lat.elems), dtype=bool)
            for i, m in enumerate(lat.elems):
                alpha, beta = divmod(int(m), m2)
                good[i] = ((alpha not in U1 or beta in U2)
                           and (beta not in U2p or alpha in U1p))
            fam[o] = _fam_from_rows(P, o, lat.contained_in(good))
    return Kit(P, fam)


def dual_kit(A: Kit) -> Kit:
    return orthogonal_kit(A)


def _coproduct_family(C, kits):
    fam = {}
    obj_off = 0
    mor_off = 0
    for K in kits:
        for a, subs in K.family.items():
            fam[obj_off + a] = {Subgroup(obj_off + a, frozenset(m + mor_off for m in H.elements))
                                for H in subs}
        obj_off += K.base.n_objects
        mor_off += K.base.n_morphisms
    return fam


def with_kit(*kits: Kit) -> Kit:
    """Coproduct groupoid with family (j, a) ↦ K_j(a)."""
    C = coproduct_groupoid(*[K.base for K in kits])
    boolean = True if all(K.boolean for K in kits) else None
    return Kit(C, _coproduct_family(C, kits), boolean=boolean)


def plus_kit(*kits: Kit) -> Kit:
    """(⨿ K_i^⊥)^⊥, computed through the duality rather than copied from with_kit."""
    C = coproduct_groupoid(*[K.base for K in kits])
    duals = [Kit(K.base, orth_family(K.base, K.family)) for K in kits]
    return Kit(C, orth_family(C, _coproduct_family(C, duals)), boolean=True)


def unit_kit() -> Kit:
    """(One, Triv), the monoidal unit."""
    return canonical_kit(ONE, "trivial")


def swap_map(G1: Groupoid, G2: Groupoid):
    """Morphism relabelling A×B -> B×A, (f, g) ↦ (g, f)."""
    m1, m2 = G1.n_morphisms, G2.n_morphisms
    f, g = np.divmod(np.arange(m1 * m2), m2)
    return g * m1 + f


def relabel_kit(K: Kit, target: Groupoid, mor_map, obj_map) -> Kit:
    fam = {}
    for a, subs in K.family.items():
        b = int(obj_map[a])
        fam[b] = {Subgroup(b, frozenset(int(mor_map[m]) for m in H.elements)) for H in subs}
    return Kit(target, fam)
