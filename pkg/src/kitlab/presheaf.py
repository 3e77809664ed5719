"""Finite presheaves on groupoids: stabilizers, quotiented representables, decomposition, application of profunctors."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import BaseMismatch, NotNatural, NotStabilized, NotSubgroup, UnknownElement
from .groupoid import ONE, Groupoid, Subgroup, is_subgroup, subgroup_closure
from .kits import Kit, conjugation_witness, orthogonal_kit
from .profunctor import Profunctor, compose, is_stabilized


class Presheaf:
    """X: A^op -> Set. ``obj[x]`` is the object of element x; ``act[x, α]`` is x·α (defined when tgt α = obj x)."""

    def __init__(self, base: Groupoid, obj, act, names=None, keys=None):
        self.base = base
        self.obj = np.asarray(obj, dtype=np.int64)
        n = len(self.obj)
        self.act = np.asarray(act, dtype=np.int64).reshape(n, base.n_morphisms)
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        self.keys = tuple(keys) if keys is not None else None
        self._index = None

    def __len__(self):
        return len(self.obj)

    def __repr__(self):
        return f"<Presheaf sizes={self.sizes()}>"

    def __eq__(self, other):
        if not isinstance(other, Presheaf):
            return NotImplemented
        return (self.base == other.base and np.array_equal(self.obj, other.obj)
                and np.array_equal(self.act, other.act))

    __hash__ = object.__hash__

    @classmethod
    def from_keys(cls, base, sections, act_fn, name_fn=str):
        """sections: {a: [keys]}; act_fn(key, α) gives the key of key·α (keys unique overall)."""
        keys, obj = [], []
        for a in sorted(sections):
            for k in sections[a]:
                keys.append(k)
                obj.append(a)
        idx = {k: i for i, k in enumerate(keys)}
        obj = np.array(obj, dtype=np.int64)
        act = np.full((len(keys), base.n_morphisms), -1, dtype=np.int64)
        for alpha in range(base.n_morphisms):
            for x in np.nonzero(obj == base.tgt[alpha])[0]:
                act[x, alpha] = idx[act_fn(keys[x], alpha)]
        return cls(base, obj, act, [name_fn(k) for k in keys], keys)

    @classmethod
    def from_profunctor(cls, P: Profunctor):
        """A profunctor One ⇸ A read as a presheaf on A."""
        return cls(P.target, P.cell_b, P.right, P.names, P.keys)

    def as_profunctor(self) -> Profunctor:
        left = np.arange(len(self))[None, :]
        return Profunctor(ONE, self.base, self.obj, np.zeros(len(self), dtype=np.int64),
                          left, self.act, self.names, self.keys)

    def section(self, a):
        return np.nonzero(self.obj == a)[0]

    def size(self, a):
        return int(np.count_nonzero(self.obj == a))

    def sizes(self):
        return [self.size(a) for a in range(self.base.n_objects)]

    def index(self, key):
        if self._index is None:
            self._index = {k: i for i, k in enumerate(self.keys or ())}
        try:
            return self._index[key]
        except KeyError:
            raise UnknownElement(f"no element with key {key!r}") from None

    def validate(self):
        G = self.base
        for x in range(len(self)):
            a = self.obj[x]
            if self.act[x, G.ident[a]] != x:
                raise NotNatural(f"identity does not fix element {self.names[x]}")
        for g in range(G.n_morphisms):
            for f in np.nonzero(G.comp[g] >= 0)[0]:
                xs = np.nonzero(self.obj == G.tgt[g])[0]
                if not np.array_equal(self.act[xs, G.comp[g, f]], self.act[self.act[xs, g], f]):
                    raise NotNatural(f"action is not functorial at {G.names[g]}, {G.names[f]}")
        return self

    def orbits(self):
        x, alpha = np.nonzero(self.act >= 0)
        return kern.uf_labels(len(self), x, self.act[x, alpha])


# ------------------------------------------------------------ stabilizers

def stabilizer(X: Presheaf, x) -> Subgroup:
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < len(X):
            raise UnknownElement(f"element {x} out of range")
    else:
        x = X.index(x)
    a = int(X.obj[x])
    ends = X.base.endo(a)
    return Subgroup(a, frozenset(int(m) for m in ends[X.act[x, ends] == x]))


@dataclass
class PresheafReport:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def is_stabilized_presheaf(X: Presheaf, K: Kit) -> PresheafReport:
    if K.base != X.base:
        raise BaseMismatch("kit and presheaf live on different groupoids")
    for x in range(len(X)):
        H = stabilizer(X, x)
        if H not in K.family[H.base]:
            return PresheafReport(False, (int(x), H))
    return PresheafReport(True)


def _require(X, K):
    r = is_stabilized_presheaf(X, K)
    if not r:
        x, H = r.witness
        raise NotStabilized(f"element {X.names[x]} has stabilizer {sorted(H.elements)} outside the kit",
                            witness=r.witness)


# ----------------------------------------------------------- constructions

def quot_representable(A, a, H) -> Presheaf:
    """y(a) quotiented by the subgroup H of End(a): classes Hγ of morphisms γ: a′ -> a."""
    G = A.base if isinstance(A, Kit) else A
    a = G.obj(a)
    elems = frozenset(int(h) for h in (H.elements if isinstance(H, Subgroup) else H))
    if not is_subgroup(G, a, elems):
        raise NotSubgroup(f"{sorted(elems)} is not a subgroup of End({G.objects[a]})")
    hs = np.array(sorted(elems), dtype=np.int64)
    into = np.nonzero(G.tgt == a)[0]
    cls_min = {}
    for g in into:
        cls_min[int(g)] = int(G.comp[hs, g].min())
    sections = {}
    for g, m in cls_min.items():
        if g == m:
            sections.setdefault(int(G.src[g]), []).append(m)
    return Presheaf.from_keys(G, sections, lambda k, alpha: cls_min[int(G.comp[k, alpha])],
                              lambda k: "[" + G.names[k] + "]")


def representable(A, a) -> Presheaf:
    G = A.base if isinstance(A, Kit) else A
    a = G.obj(a)
    return quot_representable(G, a, [int(G.ident[a])])


def terminal_presheaf(A) -> Presheaf:
    G = A.base if isinstance(A, Kit) else A
    return Presheaf.from_keys(G, {a: [a] for a in range(G.n_objects)},
                              lambda k, alpha: int(G.src[alpha]), lambda k: "pt")


def empty_presheaf(A) -> Presheaf:
    G = A.base if isinstance(A, Kit) else A
    return Presheaf(G, np.zeros(0, dtype=np.int64), np.zeros((0, G.n_morphisms), dtype=np.int64))


def set_presheaf(A, sizes) -> Presheaf:
    """Discrete base: X(a) = {0..sizes[a]-1} with identity actions only."""
    G = A.base if isinstance(A, Kit) else A
    if not G.is_discrete():
        raise ValueError("set_presheaf needs a discrete groupoid")
    return Presheaf.from_keys(G, {a: [(a, i) for i in range(sizes[a])] for a in range(G.n_objects)},
                              lambda k, alpha: k, lambda k: f"{G.objects[k[0]]}{k[1]}")


def coproduct(*xs: Presheaf) -> Presheaf:
    """Tagged disjoint union; element keys are (i, x) with 0-based i."""
    if not xs:
        raise ValueError("coproduct of no presheaves needs a base; use empty_presheaf")
    G = xs[0].base
    for X in xs[1:]:
        if X.base != G:
            raise BaseMismatch("coproduct of presheaves over different groupoids")
    sections = {}
    for i, X in enumerate(xs):
        for x in range(len(X)):
            sections.setdefault(int(X.obj[x]), []).append((i, x))
    return Presheaf.from_keys(G, sections, lambda k, alpha: (k[0], int(xs[k[0]].act[k[1], alpha])),
                              lambda k: f"{k[0]}:{xs[k[0]].names[k[1]]}")


def free_presheaf(G: Groupoid, seq) -> Presheaf:
    """⨿_i y(a_i); elements are (i, γ) with γ: c -> a_i."""
    sections = {}
    for i, a in enumerate(seq):
        for g in np.nonzero(G.tgt == a)[0]:
            sections.setdefault(int(G.src[g]), []).append((i, int(g)))
    return Presheaf.from_keys(G, sections, lambda k, alpha: (k[0], int(G.comp[k[1], alpha])),
                              lambda k: f"{k[0]}:{G.names[k[1]]}")


# -------------------------------------------------------- natural maps

def is_natural(X: Presheaf, Y: Presheaf, f) -> bool:
    f = np.asarray(f, dtype=np.int64)
    if len(f) != len(X) or X.base != Y.base:
        return False
    if len(X) == 0:
        return True
    if not np.array_equal(Y.obj[f], X.obj):
        return False
    mask = X.act >= 0
    fx = np.broadcast_to(f[:, None], X.act.shape)
    return bool(np.array_equal(f[X.act[mask]], Y.act[fx[mask], np.nonzero(mask)[1]]))


def orbit_representatives(X: Presheaf):
    """Least element of every orbit."""
    lab = X.orbits()
    return np.nonzero(lab == np.arange(len(X)))[0]


def hom_presheaves(X: Presheaf, Y: Presheaf, limit=None):
    """All natural maps X -> Y, as arrays; generated by sending orbit representatives to compatible elements."""
    reps = orbit_representatives(X)
    lab = X.orbits()
    # how to reach every element from its representative: x = rep·α
    reach = {}
    for r in reps:
        reach[int(r)] = int(r)
    route = np.full(len(X), -1, dtype=np.int64)
    for r in reps:
        row = X.act[r]
        for alpha in np.nonzero(row >= 0)[0]:
            if route[row[alpha]] < 0:
                route[row[alpha]] = alpha
    choices = []
    for r in reps:
        st = np.array(sorted(stabilizer(X, r).elements), dtype=np.int64)
        ys = [int(y) for y in Y.section(X.obj[r]) if np.all(Y.act[y, st] == y)]
        choices.append(ys)
    count = 0
    for pick in itertools.product(*choices):
        img = dict(zip((int(r) for r in reps), pick))
        f = np.array([Y.act[img[int(lab[x])], route[x]] for x in range(len(X))], dtype=np.int64)
        yield f
        count += 1
        if limit is not None and count >= limit:
            return


def compose_maps(g, f):
    return np.asarray(g, dtype=np.int64)[np.asarray(f, dtype=np.int64)]


def find_presheaf_iso(X: Presheaf, Y: Presheaf):
    if X.sizes() != Y.sizes():
        return None
    for f in hom_presheaves(X, Y):
        if len(set(f.tolist())) == len(f):
            return f
    return None


def cokernel_pair(X: Presheaf, Y: Presheaf, f):
    """Y ⊔_X Y with its two coprojections; they agree iff f is surjective."""
    f = np.asarray(f, dtype=np.int64)
    img = set(f.tolist())
    key = lambda side, y: (0, y) if y in img else (side, y)   # noqa: E731
    sections = {}
    for side in (1, 2):
        for y in range(len(Y)):
            k = key(side, y)
            if k not in sections.get(int(Y.obj[y]), []):
                sections.setdefault(int(Y.obj[y]), []).append(k)
    Z = Presheaf.from_keys(Y.base, sections,
                           lambda k, alpha: key(k[0] or 1, int(Y.act[k[1], alpha])),
                           lambda k: f"{k[0]}:{Y.names[k[1]]}")
    g = np.array([Z.index(key(1, y)) for y in range(len(Y))], dtype=np.int64)
    h = np.array([Z.index(key(2, y)) for y in range(len(Y))], dtype=np.int64)
    return Z, g, h


# --------------------------------------------------------- decomposition

@dataclass
class Decomposition:
    source: Presheaf
    summands: list           # [(object, Subgroup)]
    representatives: list    # element of X generating each summand

    def reconstruct(self):
        """(⨿ ŷ⟨a_i⟩G_i, iso into the source presheaf)."""
        X = self.source
        parts = [quot_representable(X.base, a, H) for a, H in self.summands]
        if not parts:
            return empty_presheaf(X.base), np.zeros(0, dtype=np.int64)
        Y = coproduct(*parts)
        iso = np.array([X.act[self.representatives[i], parts[i].keys[k]] for i, k in Y.keys],
                       dtype=np.int64)
        return Y, iso


def decompose(X: Presheaf, K: Kit | None = None) -> Decomposition:
    """One summand per orbit, anchored at the least object of its component."""
    if K is not None:
        _require(X, K)
    G = X.base
    comp = G.component_of
    anchor = {}
    for a in range(G.n_objects):
        anchor.setdefault(int(comp[a]), a)
    lab = X.orbits()
    summands, reps = [], []
    for r in orbit_representatives(X):
        a = anchor[int(comp[X.obj[r]])]
        x = int(min(x for x in np.nonzero(lab == lab[r])[0] if X.obj[x] == a))
        summands.append((a, stabilizer(X, x)))
        reps.append(x)
    return Decomposition(X, summands, reps)


# --------------------------------------------------------- orthogonality

def presheaf_orthogonal(X: Presheaf, Y: Presheaf) -> PresheafReport:
    """Is the action (x, y)·α = (x·α, α⁻¹·y) free? Y is a presheaf on the opposite groupoid."""
    if Y.base != X.base.opposite():
        raise BaseMismatch("the second presheaf must live on the opposite groupoid")
    G = X.base
    for a in range(G.n_objects):
        ends = G.endo(a)
        ys = Y.section(a)
        for x in X.section(a):
            fix_x = X.act[x, ends] == x
            for y in ys:
                # α⁻¹·y in covariant reading is y acted on by α⁻¹ in A^op
                fix = fix_x & (Y.act[y, G.inv[ends]] == y)
                fix &= ends != G.ident[a]
                if fix.any():
                    return PresheafReport(False, (int(x), int(y), int(ends[np.argmax(fix)])))
    return PresheafReport(True)


def stab_of_family(presheaves, base: Groupoid | None = None) -> Kit:
    presheaves = list(presheaves)
    if base is None:
        if not presheaves:
            raise ValueError("an empty family needs an explicit base")
        base = presheaves[0].base
    fam = {}
    for X in presheaves:
        if X.base != base:
            raise BaseMismatch("family members live on different groupoids")
        for x in range(len(X)):
            H = stabilizer(X, x)
            fam.setdefault(H.base, set()).add(H)
    K = Kit(base, fam)
    assert conjugation_witness(base, K.family) is None
    return K


def quotient_family(K: Kit):
    """{ŷ⟨a⟩G | G ∈ K(a)}."""
    return [quot_representable(K.base, a, H) for a in range(K.base.n_objects)
            for H in sorted(K.family[a], key=Subgroup.key)]


# ------------------------------------------------------------ application

class AppliedPresheaf(Presheaf):
    """P#(X) with the coend data needed to push maps of X through it."""


def apply_profunctor(P: Profunctor, X: Presheaf, KA: Kit | None = None, KB: Kit | None = None):
    """P#(X)(b) = ∫^a P(b, a) × X(a), computed as a coend over A."""
    if P.source != X.base:
        raise BaseMismatch("profunctor source differs from the presheaf base")
    if KA is not None and KB is not None:
        r = is_stabilized(P, KA, KB)
        if not r:
            raise NotStabilized("profunctor is not stabilized for the given kits", witness=r.witness)
        _require(X, KA)
    C = compose(X.as_profunctor(), P)
    Y = AppliedPresheaf(P.target, C.cell_b, C.right, C.names,
                        [(X.keys[x] if X.keys is not None else x, p) for (_, x, p) in C.representatives])
    Y.composite = C
    Y.argument = X
    Y.profunctor = P
    return Y


def push_map(Y: AppliedPresheaf, Z: AppliedPresheaf, h):
    """P#(h): P#(X) -> P#(X′) for a natural map h: X -> X′ (same profunctor)."""
    C, D = Y.composite, Z.composite
    return np.array([D.class_of(int(h[x]), p) for (_, x, p) in C.representatives], dtype=np.int64)


def quotient_probe_witness(P: Profunctor, KA: Kit, KB: Kit):
    """Search the probes ŷ⟨a⟩⟨α⟩, α ∈ ∪KA(a), for one whose image under P# leaves StPSh(KB)."""
    A = P.source
    for a in range(A.n_objects):
        for alpha in sorted(KA.union(a)):
            H = subgroup_closure(A, a, [alpha])
            Y = apply_profunctor(P, quot_representable(A, a, H))
            r = is_stabilized_presheaf(Y, KB)
            if not r:
                return (a, alpha, r.witness)
    return None


def preserves_stabilized(P: Profunctor, KA: Kit, KB: Kit):
    """Both squares: P# on StPSh(KA) and the dual on StPSh(KB^⊥). Returns (ok, witness)."""
    w = quotient_probe_witness(P, KA, KB)
    if w is not None:
        return False, ("forward",) + w
    w = quotient_probe_witness(P.dual(), orthogonal_kit(KB), orthogonal_kit(KA))
    if w is not None:
        return False, ("backward",) + w
    return True, None


__all__ = ["Presheaf", "stabilizer", "is_stabilized_presheaf", "quot_representable", "representable",
           "terminal_presheaf", "empty_presheaf", "set_presheaf", "coproduct", "free_presheaf",
           "is_natural", "hom_presheaves", "find_presheaf_iso", "cokernel_pair", "Decomposition",
           "decompose", "presheaf_orthogonal", "stab_of_family", "quotient_family", "apply_profunctor",
           "push_map", "quotient_probe_witness", "preserves_stabilized"]
