"""Finite groupoids with dense integer ids, and the subgroup machinery on endomorphism groups."""
from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels as kern
from .errors import (BadIdentity, BudgetExceeded, DanglingId, GroupTooLarge, IllTyped,
                     MissingInverse, NonAssociative, NotEndomorphism, NotSubgroup,
                     ParseError, TypeMismatch, UnknownObject)


def _env_int(name, default):
    raw = os.environ.get(name)
    return int(raw) if raw not in (None, "") else default


GROUP_CAP = _env_int("KITLAB_GROUP_CAP", 120)
MAX_MORPHISMS = _env_int("KITLAB_MAX_MORPHISMS", 4000)


@contextmanager
def group_cap(n):
    """Temporarily raise (or lower) the |End(a)| cap for subgroup lattices built inside the block."""
    global GROUP_CAP
    old, GROUP_CAP = GROUP_CAP, n
    try:
        yield
    finally:
        GROUP_CAP = old


@dataclass(frozen=True, order=True)
class Subgroup:
    base: int
    elements: frozenset

    def sorted(self):
        return tuple(sorted(self.elements))

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, m):
        return m in self.elements

    def __iter__(self):
        return iter(self.sorted())

    def __repr__(self):
        return f"Subgroup({self.base}, {list(self.sorted())})"

    def key(self):
        return (self.base, len(self.elements), self.sorted())


class Groupoid:
    """Objects 0..n-1 and morphisms 0..m-1; ``comp[g, f]`` is g∘f or -1 when not composable."""

    def __init__(self, objects, src, tgt, comp, inv, ident, names=None,
                 obj_labels=None, labels=None):
        self.objects = tuple(str(o) for o in objects)
        self.src = np.asarray(src, dtype=np.int64)
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.comp = np.asarray(comp, dtype=np.int32)
        self.inv = np.asarray(inv, dtype=np.int64)
        self.ident = np.asarray(ident, dtype=np.int64)
        m = len(self.src)
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(m))
        # structured labels, e.g. pairs for products or (tag, a) for coproducts
        self.obj_labels = tuple(obj_labels) if obj_labels is not None else self.objects
        self.labels = tuple(labels) if labels is not None else self.names
        self._op = None
        self._lattices = {}

    # -- basic access
    @property
    def n_objects(self):
        return len(self.objects)

    @property
    def n_morphisms(self):
        return len(self.src)

    def __repr__(self):
        return f"<Groupoid {self.n_objects} objects, {self.n_morphisms} morphisms>"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (self.objects == other.objects and self.names == other.names
                and np.array_equal(self.src, other.src) and np.array_equal(self.tgt, other.tgt)
                and np.array_equal(self.comp, other.comp) and np.array_equal(self.inv, other.inv)
                and np.array_equal(self.ident, other.ident))

    def __hash__(self):
        return hash((self.objects, self.n_morphisms))

    def obj(self, a):
        """Object id from an id or a name."""
        if isinstance(a, (int, np.integer)):
            if 0 <= a < self.n_objects:
                return int(a)
            raise UnknownObject(f"object id {a} out of range")
        try:
            return self.objects.index(str(a))
        except ValueError:
            pass
        if a in self.obj_labels:
            return self.obj_labels.index(a)
        raise UnknownObject(f"unknown object {a!r}")

    def mor(self, name):
        if isinstance(name, (int, np.integer)):
            if 0 <= name < self.n_morphisms:
                return int(name)
            raise DanglingId(f"morphism id {name} out of range")
        try:
            return self.names.index(str(name))
        except ValueError:
            raise DanglingId(f"unknown morphism {name!r}") from None

    def compose(self, g, f):
        gf = int(self.comp[g, f])
        if gf < 0:
            raise TypeMismatch(f"cannot compose {self.names[g]} after {self.names[f]}")
        return gf

    def identity(self, a):
        return int(self.ident[self.obj(a)])

    @cached_property
    def _homs(self):
        out = {}
        for m in range(self.n_morphisms):
            out.setdefault((int(self.src[m]), int(self.tgt[m])), []).append(m)
        return {k: np.array(v, dtype=np.int64) for k, v in out.items()}

    def hom(self, a, b):
        return self._homs.get((a, b), np.zeros(0, dtype=np.int64))

    def endo(self, a):
        return self.hom(a, a)

    @cached_property
    def component_of(self):
        labels = kern.uf_labels(self.n_objects, self.src, self.tgt)
        return np.asarray(labels, dtype=np.int64)

    def components(self):
        """Connected components as sorted object lists, ordered by least object."""
        comps = {}
        for a in range(self.n_objects):
            comps.setdefault(int(self.component_of[a]), []).append(a)
        return [comps[k] for k in sorted(comps)]

    def connecting(self, a, b):
        h = self.hom(a, b)
        return int(h[0]) if len(h) else None

    def opposite(self):
        if self._op is None:
            op = Groupoid(self.objects, self.tgt, self.src, self.comp.T.copy(), self.inv,
                          self.ident, self.names, self.obj_labels, self.labels)
            op._op = self
            # End_op(a) has the same elements and the same subgroups
            op._lattices = self._lattices
            self._op = op
        return self._op

    def is_discrete(self):
        return self.n_morphisms == self.n_objects

    # -- subgroups
    def lattice(self, a, cap=None):
        a = self.obj(a)
        lat = self._lattices.get(a)
        if lat is None:
            lat = SubgroupLattice(self, a, GROUP_CAP if cap is None else cap)
            self._lattices[a] = lat
        return lat


class SubgroupLattice:
    """All subgroups of End(a), as sorted Subgroup list plus a boolean mask matrix."""

    def __init__(self, G: Groupoid, a: int, cap: int):
        self.G = G
        self.base = a
        elems = G.endo(a)
        if len(elems) > cap:
            raise GroupTooLarge(f"|End({G.objects[a]})| = {len(elems)} exceeds cap {cap}")
        self.elems = elems
        self.local = {int(m): i for i, m in enumerate(elems)}
        pos = np.full(G.n_morphisms, -1, dtype=np.int64)
        pos[elems] = np.arange(len(elems))
        self.pos = pos
        self.table = pos[G.comp[np.ix_(elems, elems)]]
        self.ident = self.local[int(G.ident[a])]
        self._enumerate()

    def _enumerate(self):
        e = len(self.elems)
        found = {}
        cyclic_gens = []
        for x in range(e):
            mask = kern.closure(self.table, [x], self.ident)
            key = mask.tobytes()
            if key not in found:
                found[key] = (mask, [x])
                cyclic_gens.append(x)
        queue = list(found.values())
        while queue:
            nxt = []
            for mask, gens in queue:
                for c in cyclic_gens:
                    if mask[c]:
                        continue
                    joined = kern.closure(self.table, gens + [c], self.ident)
                    key = joined.tobytes()
                    if key not in found:
                        found[key] = (joined, gens + [c])
                        nxt.append(found[key])
            queue = nxt
        subs = []
        for mask, _ in found.values():
            ids = frozenset(int(m) for m in self.elems[mask])
            subs.append(Subgroup(self.base, ids))
        subs.sort(key=Subgroup.key)
        self.subgroups = subs
        self.row = {s.elements: i for i, s in enumerate(subs)}
        masks = np.zeros((len(subs), e), dtype=bool)
        for i, s in enumerate(subs):
            masks[i, [self.local[m] for m in s.elements]] = True
        self.masks = masks
        self.packed = kern.pack_rows(masks)
        # orthogonality between every pair of subgroups (rows x rows)
        self.orth = kern.meet_is_single(self.packed, self.packed)

    def __len__(self):
        return len(self.subgroups)

    def index(self, H):
        els = H.elements if isinstance(H, Subgroup) else frozenset(H)
        try:
            return self.row[els]
        except KeyError:
            raise NotSubgroup(f"{sorted(els)} is not a subgroup of End({self.base})") from None

    def rows(self, family):
        return np.array(sorted(self.index(H) for H in family), dtype=np.int64)

    def element_mask(self, ids):
        mask = np.zeros(len(self.elems), dtype=bool)
        for m in ids:
            mask[self.local[m]] = True
        return mask

    def contained_in(self, elem_mask):
        """Rows of subgroups whose elements all lie in the given element mask."""
        return np.nonzero(~(self.masks & ~elem_mask[None, :]).any(axis=1))[0]

    @cached_property
    def orders(self):
        """Order of each element (local index)."""
        out = np.zeros(len(self.elems), dtype=np.int64)
        for x in range(len(self.elems)):
            y, k = x, 1
            while y != self.ident:
                y = self.table[x, y]
                k += 1
            out[x] = k
        return out

    def power(self, x, n):
        y = self.ident
        for _ in range(n % int(self.orders[x])):
            y = self.table[x, y]
        return y


# ---------------------------------------------------------------- operations

def endo_group(G: Groupoid, a) -> Subgroup:
    a = G.obj(a)
    return Subgroup(a, frozenset(int(m) for m in G.endo(a)))


def subgroup_closure(G: Groupoid, a, gens) -> Subgroup:
    a = G.obj(a)
    gens = [G.mor(g) for g in gens]
    for g in gens:
        if G.src[g] != a or G.tgt[g] != a:
            raise NotEndomorphism(f"{G.names[g]} is not an endomorphism of {G.objects[a]}")
    elems = G.endo(a)
    pos = np.full(G.n_morphisms, -1, dtype=np.int64)
    pos[elems] = np.arange(len(elems))
    table = pos[G.comp[np.ix_(elems, elems)]]
    mask = kern.closure(table, pos[gens] if gens else np.zeros(0, np.int64), pos[G.ident[a]])
    return Subgroup(a, frozenset(int(m) for m in elems[mask]))


def enumerate_subgroups(G: Groupoid, a, cap=None) -> list:
    return list(G.lattice(a, cap).subgroups)


def is_subgroup(G: Groupoid, a, ids) -> bool:
    ids = set(ids)
    if int(G.ident[a]) not in ids:
        return False
    for g in ids:
        if G.src[g] != a or G.tgt[g] != a or int(G.inv[g]) not in ids:
            return False
        for f in ids:
            if int(G.comp[g, f]) not in ids:
                return False
    return True


def conjugate_subgroup(G: Groupoid, H: Subgroup, alpha) -> Subgroup:
    alpha = G.mor(alpha)
    if G.src[alpha] != H.base:
        raise TypeMismatch(f"{G.names[alpha]} does not start at {G.objects[H.base]}")
    ai = G.inv[alpha]
    h = np.fromiter(H.elements, dtype=np.int64)
    conj = G.comp[G.comp[alpha, h], ai]
    return Subgroup(int(G.tgt[alpha]), frozenset(int(m) for m in conj))


# ------------------------------------------------------------ constructions

def _check_size(m):
    if m > MAX_MORPHISMS:
        raise BudgetExceeded(f"{m} morphisms exceed the budget of {MAX_MORPHISMS}")


def product(G1: Groupoid, G2: Groupoid) -> Groupoid:
    """Product groupoid; the pair (f, g) gets id f*|G2| + g, objects likewise."""
    m1, m2 = G1.n_morphisms, G2.n_morphisms
    n2 = G2.n_objects
    _check_size(m1 * m2)
    f, g = np.divmod(np.arange(m1 * m2), m2)
    src = G1.src[f] * n2 + G2.src[g]
    tgt = G1.tgt[f] * n2 + G2.tgt[g]
    c1 = G1.comp.astype(np.int64)[:, None, :, None]
    c2 = G2.comp.astype(np.int64)[None, :, None, :]
    comp = np.where((c1 >= 0) & (c2 >= 0), c1 * m2 + c2, -1).reshape(m1 * m2, m1 * m2)
    inv = G1.inv[f] * m2 + G2.inv[g]
    oa, ob = np.divmod(np.arange(G1.n_objects * n2), n2)
    ident = G1.ident[oa] * m2 + G2.ident[ob]
    objects = [f"({G1.objects[x]},{G2.objects[y]})" for x, y in zip(oa, ob)]
    names = [f"({G1.names[x]},{G2.names[y]})" for x, y in zip(f, g)]
    return Groupoid(objects, src, tgt, comp, inv, ident, names,
                    obj_labels=[(G1.obj_labels[x], G2.obj_labels[y]) for x, y in zip(oa, ob)],
                    labels=[(G1.labels[x], G2.labels[y]) for x, y in zip(f, g)])


def coproduct(*gs: Groupoid) -> Groupoid:
    """Disjoint union; object (i, a) and morphism (i, f) use 1-based tags i."""
    m_off = np.cumsum([0] + [G.n_morphisms for G in gs])
    o_off = np.cumsum([0] + [G.n_objects for G in gs])
    m = int(m_off[-1])
    _check_size(m)
    comp = np.full((m, m), -1, dtype=np.int64)
    src, tgt, inv, ident, objects, names, olabels, labels = [], [], [], [], [], [], [], []
    for i, G in enumerate(gs):
        mo, oo = m_off[i], o_off[i]
        block = G.comp.astype(np.int64)
        comp[mo:mo + G.n_morphisms, mo:mo + G.n_morphisms] = np.where(block >= 0, block + mo, -1)
        src.extend(G.src + oo)
        tgt.extend(G.tgt + oo)
        inv.extend(G.inv + mo)
        ident.extend(G.ident + mo)
        objects.extend(f"({i + 1},{o})" for o in G.objects)
        names.extend(f"({i + 1},{n})" for n in G.names)
        olabels.extend((i + 1, o) for o in G.obj_labels)
        labels.extend((i + 1, n) for n in G.labels)
    return Groupoid(objects, src, tgt, comp, inv, ident, names, olabels, labels)


def opposite(G: Groupoid) -> Groupoid:
    return G.opposite()


def groupoid_constructions(op, *args):
    if op == "product":
        out = args[0]
        for G in args[1:]:
            out = product(out, G)
        return out
    if op == "coproduct":
        return coproduct(*args)
    if op == "opposite":
        (G,) = args
        return G.opposite()
    raise ValueError(f"unknown construction {op!r}")


def inverse_iso_to_opposite(G: Groupoid):
    """The identity-on-objects iso G -> G^op sending α to α⁻¹, as a morphism id map."""
    return np.asarray(G.inv)


# --------------------------------------------------------------- validation

def validate_groupoid(raw) -> Groupoid:
    """Build a Groupoid from the JSON description, checking every axiom.

    Checks run in order: ids, typing, identities, inverses, associativity.
    """
    try:
        objects = [str(o) for o in raw["objects"]]
        mors = raw["morphisms"]
        compose_rows = raw["compose"]
        inverse_rows = raw["inverse"]
        idents = raw["identities"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"groupoid description missing field {exc}") from None
    if len(set(objects)) != len(objects):
        raise DanglingId("duplicate object names")
    oidx = {o: i for i, o in enumerate(objects)}
    names, src, tgt = [], [], []
    for rec in mors:
        name = str(rec["id"])
        if name in names:
            raise DanglingId(f"duplicate morphism id {name}")
        for end in ("src", "tgt"):
            if str(rec[end]) not in oidx:
                raise DanglingId(f"morphism {name} has unknown {end} {rec[end]!r}")
        names.append(name)
        src.append(oidx[str(rec["src"])])
        tgt.append(oidx[str(rec["tgt"])])
    midx = {n: i for i, n in enumerate(names)}

    def mid(x):
        try:
            return midx[str(x)]
        except KeyError:
            raise DanglingId(f"unknown morphism id {x!r}") from None

    m = len(names)
    src = np.array(src, dtype=np.int64)
    tgt = np.array(tgt, dtype=np.int64)
    ident = np.full(len(objects), -1, dtype=np.int64)
    for o, i in idents.items():
        if str(o) not in oidx:
            raise DanglingId(f"identity for unknown object {o!r}")
        ident[oidx[str(o)]] = mid(i)
    for a, i in enumerate(ident):
        if i < 0:
            raise BadIdentity(f"object {objects[a]} has no identity")
        if src[i] != a or tgt[i] != a:
            raise BadIdentity(f"identity {names[i]} of {objects[a]} is not an endomorphism")
    comp = np.full((m, m), -1, dtype=np.int64)
    for row in compose_rows:
        g, f, gf = (mid(x) for x in row)
        if tgt[f] != src[g]:
            raise IllTyped(f"compose entry {names[g]}∘{names[f]} is not composable")
        if src[gf] != src[f] or tgt[gf] != tgt[g]:
            raise IllTyped(f"compose entry {names[g]}∘{names[f]} = {names[gf]} has wrong type")
        if comp[g, f] >= 0 and comp[g, f] != gf:
            raise NonAssociative(f"conflicting entries for {names[g]}∘{names[f]}")
        comp[g, f] = gf
    for g in range(m):
        for f in np.nonzero(tgt == src[g])[0]:
            if comp[g, f] < 0:
                raise DanglingId(f"compose table has no entry for {names[g]}∘{names[f]}")
    for f in range(m):
        if comp[ident[tgt[f]], f] != f or comp[f, ident[src[f]]] != f:
            raise BadIdentity(f"identity law fails at {names[f]}")
    inv = np.full(m, -1, dtype=np.int64)
    for row in inverse_rows:
        f, fi = mid(row[0]), mid(row[1])
        inv[f] = fi
    for f in range(m):
        fi = inv[f]
        if fi < 0:
            raise MissingInverse(f"no inverse listed for {names[f]}")
        if (src[fi] != tgt[f] or tgt[fi] != src[f] or comp[fi, f] != ident[src[f]]
                or comp[f, fi] != ident[tgt[f]]):
            raise MissingInverse(f"{names[fi]} is not a two-sided inverse of {names[f]}")
    bad = kern.assoc_violation(comp)
    if bad is not None:
        h, g, f = bad
        raise NonAssociative(f"({names[h]}∘{names[g]})∘{names[f]} != {names[h]}∘({names[g]}∘{names[f]})")
    return Groupoid(objects, src, tgt, comp, inv, ident, names)


def check_groupoid(G: Groupoid):
    """Re-validate an already built groupoid (used on constructions)."""
    from .io import groupoid_to_raw
    return validate_groupoid(groupoid_to_raw(G, explicit=True))


def cyclic_group(n: int, gen="g") -> Groupoid:
    """C_n on one object; morphism k is gen^k."""
    k = np.arange(n)
    comp = (k[:, None] + k[None, :]) % n
    names = ["id"] + [gen if i == 1 else f"{gen}{i}" for i in range(1, n)]
    return Groupoid(["*"], np.zeros(n), np.zeros(n), comp, (-k) % n, [0], names)


def permutation_group(perms, names=None) -> Groupoid:
    """One-object groupoid from a list of permutation tuples closed under composition."""
    perms = [tuple(p) for p in perms]
    idx = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    comp = np.zeros((n, n), dtype=np.int64)
    inv = np.zeros(n, dtype=np.int64)
    for i, g in enumerate(perms):
        for j, f in enumerate(perms):
            comp[i, j] = idx[tuple(g[f[x]] for x in range(len(f)))]
        gi = [0] * len(g)
        for x, y in enumerate(g):
            gi[y] = x
        inv[i] = idx[tuple(gi)]
    ident = idx[tuple(range(len(perms[0])))]
    return Groupoid(["*"], np.zeros(n), np.zeros(n), comp, inv, [ident], names)


def discrete(objects) -> Groupoid:
    n = len(objects)
    comp = np.full((n, n), -1, dtype=np.int64)
    comp[np.arange(n), np.arange(n)] = np.arange(n)
    return Groupoid(objects, np.arange(n), np.arange(n), comp, np.arange(n), np.arange(n),
                    [f"id_{o}" for o in objects])


def codiscrete(objects) -> Groupoid:
    """Exactly one morphism between any two objects (a contractible groupoid)."""
    n = len(objects)
    s, t = np.divmod(np.arange(n * n), n)          # id = s*n + t : s -> t
    comp = np.full((n * n, n * n), -1, dtype=np.int64)
    for g in range(n * n):
        for f in range(n * n):
            if t[f] == s[g]:
                comp[g, f] = s[f] * n + t[g]
    inv = t * n + s
    ident = np.arange(n) * (n + 1)
    names = [f"id_{objects[a]}" if a == b else f"{objects[a]}>{objects[b]}" for a, b in zip(s, t)]
    return Groupoid(objects, s, t, comp, inv, ident, names)


ONE = discrete(["*"])
