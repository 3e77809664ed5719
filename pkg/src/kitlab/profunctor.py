"""Finite profunctors A ⇸ B with explicit action tables, coend composition and the stabilization check.

An element p lives in a cell P(b, a) with b an object of the target and a an object
of the source. ``left[α, p]`` is α·p for α: a -> a' in the source, ``right[p, β]``
is p·β for β: b' -> b in the target; both are -1 where the morphism does not apply.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import BaseMismatch, NotFunctorial, NotSubgroup
from .groupoid import ONE, Groupoid
from .kits import Kit, orthogonal_kit, product_groupoid


class Profunctor:
    def __init__(self, source: Groupoid, target: Groupoid, cell_b, cell_a, left, right,
                 names=None, keys=None):
        self.source = source
        self.target = target
        self.cell_b = np.asarray(cell_b, dtype=np.int64)
        self.cell_a = np.asarray(cell_a, dtype=np.int64)
        n = len(self.cell_b)
        self.left = np.asarray(left, dtype=np.int64).reshape(source.n_morphisms, n)
        self.right = np.asarray(right, dtype=np.int64).reshape(n, target.n_morphisms)
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        # structured element keys (e.g. morphism ids, tuples); used by constructions
        self.keys = tuple(keys) if keys is not None else None
        self._cells = None
        self._index = None

    def __len__(self):
        return len(self.cell_b)

    @property
    def n_elements(self):
        return len(self.cell_b)

    def __repr__(self):
        return f"<Profunctor {len(self)} elements, {self.source!r} ⇸ {self.target!r}>"

    def __eq__(self, other):
        if not isinstance(other, Profunctor):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and np.array_equal(self.cell_b, other.cell_b) and np.array_equal(self.cell_a, other.cell_a)
                and np.array_equal(self.left, other.left) and np.array_equal(self.right, other.right))

    __hash__ = object.__hash__

    def cells(self):
        if self._cells is None:
            out = {}
            for p in range(len(self)):
                out.setdefault((int(self.cell_b[p]), int(self.cell_a[p])), []).append(p)
            self._cells = {k: np.array(v, dtype=np.int64) for k, v in out.items()}
        return self._cells

    def cell(self, b, a):
        return self.cells().get((b, a), np.zeros(0, dtype=np.int64))

    def size(self, b, a):
        return len(self.cell(b, a))

    def index(self, key):
        if self._index is None:
            self._index = {k: i for i, k in enumerate(self.keys)}
        return self._index[key]

    def act(self, alpha, p, beta=None):
        """α·p·β (either side may be None)."""
        if alpha is not None:
            p = int(self.left[alpha, p])
        if beta is not None and p >= 0:
            p = int(self.right[p, beta])
        return p

    # -- construction from callbacks
    @classmethod
    def from_keys(cls, source, target, cells, left_fn, right_fn, name_fn=str):
        """Build from {(b, a): [keys]} and action callbacks on keys (keys must be unique)."""
        keys, cb, ca = [], [], []
        for (b, a) in sorted(cells):
            for k in cells[(b, a)]:
                keys.append(k)
                cb.append(b)
                ca.append(a)
        idx = {k: i for i, k in enumerate(keys)}
        n = len(keys)
        ca_arr = np.array(ca, dtype=np.int64)
        cb_arr = np.array(cb, dtype=np.int64)
        left = np.full((source.n_morphisms, n), -1, dtype=np.int64)
        right = np.full((n, target.n_morphisms), -1, dtype=np.int64)
        for alpha in range(source.n_morphisms):
            for p in np.nonzero(ca_arr == source.src[alpha])[0]:
                left[alpha, p] = idx[left_fn(alpha, keys[p])]
        for beta in range(target.n_morphisms):
            for p in np.nonzero(cb_arr == target.tgt[beta])[0]:
                right[p, beta] = idx[right_fn(keys[p], beta)]
        return cls(source, target, cb_arr, ca_arr, left, right,
                   [name_fn(k) for k in keys], keys)

    # -- checks
    def validate(self):
        """Exhaustive functoriality check; raises NotFunctorial with the offending ids."""
        A, B = self.source, self.target
        n = len(self)
        for p in range(n):
            a, b = self.cell_a[p], self.cell_b[p]
            if self.left[A.ident[a], p] != p or self.right[p, B.ident[b]] != p:
                raise NotFunctorial(f"identity does not fix element {self.names[p]}")
        for alpha in range(A.n_morphisms):
            ps = np.nonzero(self.cell_a == A.src[alpha])[0]
            if (self.left[alpha, ps] < 0).any():
                raise NotFunctorial(f"left action of {A.names[alpha]} is partial")
            imgs = self.left[alpha, ps]
            if (self.cell_a[imgs] != A.tgt[alpha]).any() or (self.cell_b[imgs] != self.cell_b[ps]).any():
                raise NotFunctorial(f"left action of {A.names[alpha]} lands in the wrong cell")
            if len(np.unique(imgs)) != len(imgs):
                raise NotFunctorial(f"left action of {A.names[alpha]} is not injective")
        for beta in range(B.n_morphisms):
            ps = np.nonzero(self.cell_b == B.tgt[beta])[0]
            if (self.right[ps, beta] < 0).any():
                raise NotFunctorial(f"right action of {B.names[beta]} is partial")
            imgs = self.right[ps, beta]
            if (self.cell_b[imgs] != B.src[beta]).any() or (self.cell_a[imgs] != self.cell_a[ps]).any():
                raise NotFunctorial(f"right action of {B.names[beta]} lands in the wrong cell")
        # composition: (α2∘α1)·p = α2·(α1·p)
        for a2 in range(A.n_morphisms):
            for a1 in np.nonzero(A.tgt == A.src[a2])[0]:
                ps = np.nonzero(self.cell_a == A.src[a1])[0]
                c = A.comp[a2, a1]
                if not np.array_equal(self.left[c, ps], self.left[a2, self.left[a1, ps]]):
                    raise NotFunctorial(f"left action fails on {A.names[a2]}∘{A.names[a1]}")
        for b2 in range(B.n_morphisms):
            for b1 in np.nonzero(B.tgt == B.src[b2])[0]:
                ps = np.nonzero(self.cell_b == B.tgt[b2])[0]
                c = B.comp[b2, b1]
                if not np.array_equal(self.right[ps, c], self.right[self.right[ps, b2], b1]):
                    raise NotFunctorial(f"right action fails on {B.names[b2]}∘{B.names[b1]}")
        # the two actions commute
        for alpha in range(A.n_morphisms):
            ps = np.nonzero(self.cell_a == A.src[alpha])[0]
            for beta in range(B.n_morphisms):
                qs = ps[self.cell_b[ps] == B.tgt[beta]]
                if not np.array_equal(self.right[self.left[alpha, qs], beta],
                                      self.left[alpha, self.right[qs, beta]]):
                    raise NotFunctorial(f"actions of {A.names[alpha]} and {B.names[beta]} do not commute")
        return self

    def orbits(self):
        """Orbit label (least element) of every element under both actions."""
        n = len(self)
        ea, eb = [], []
        mask = self.left >= 0
        alpha, p = np.nonzero(mask)
        ea.append(p)
        eb.append(self.left[alpha, p])
        mask = self.right >= 0
        p, beta = np.nonzero(mask)
        ea.append(p)
        eb.append(self.right[p, beta])
        return kern.uf_labels(n, np.concatenate(ea), np.concatenate(eb))

    def stabilizer_pairs(self, p):
        """{(α, β) ∈ End(a)×End(b) | α·p·β = p} as a frozenset of morphism-id pairs."""
        a, b = int(self.cell_a[p]), int(self.cell_b[p])
        fixed, ea, eb, cell = self._fixed_cell(b, a)
        j = int(np.nonzero(cell == p)[0][0])
        i, k = np.nonzero(fixed[:, j, :])
        return frozenset(zip(ea[i].tolist(), eb[k].tolist()))

    def _fixed_cell(self, b, a):
        cell = self.cell(b, a)
        ea = self.source.endo(a)
        eb = self.target.endo(b)
        pos = np.full(len(self), -1, dtype=np.int64)
        pos[cell] = np.arange(len(cell))
        lloc = pos[self.left[np.ix_(ea, cell)]]
        rloc = pos[self.right[np.ix_(cell, eb)]]
        return kern.fixed_triples(lloc, rloc), ea, eb, cell

    def dual(self) -> "Profunctor":
        """P*(a, b) = P(b, a) as a profunctor B^op ⇸ A^op."""
        keys = self.keys
        return Profunctor(self.target.opposite(), self.source.opposite(), self.cell_a, self.cell_b,
                          self.right.T.copy(), self.left.T.copy(), self.names, keys)


# ------------------------------------------------------------ identity

def identity_profunctor(A) -> Profunctor:
    """The hom profunctor: elements of the cell (b, a) are the morphisms b -> a."""
    G = A.base if isinstance(A, Kit) else A
    comp = G.comp.astype(np.int64)
    # α·p = α∘p and p·β = p∘β are both read straight off the composition table
    return Profunctor(G, G, G.src, G.tgt, comp, comp.copy(), G.names, list(range(G.n_morphisms)))


# ------------------------------------------------------------- coends

class CoendIndex:
    """Pairs (p, q) with p ∈ P(b, ·), q ∈ Q(·, b), indexed b-major, then p, then q."""

    def __init__(self, P: Profunctor, Q: Profunctor):
        B = P.target
        self.P, self.Q = P, Q
        nb = B.n_objects
        self.pos_p = np.zeros(len(P), dtype=np.int64)
        self.pos_q = np.zeros(len(Q), dtype=np.int64)
        self.ps_at = []
        self.qs_at = []
        self.base = np.zeros(nb + 1, dtype=np.int64)
        for b in range(nb):
            ps = np.nonzero(P.cell_b == b)[0]
            qs = np.nonzero(Q.cell_a == b)[0]
            self.pos_p[ps] = np.arange(len(ps))
            self.pos_q[qs] = np.arange(len(qs))
            self.ps_at.append(ps)
            self.qs_at.append(qs)
            self.base[b + 1] = self.base[b] + len(ps) * len(qs)
        self.n_pairs = int(self.base[-1])
        self.nq = np.array([len(q) for q in self.qs_at], dtype=np.int64)

    def pid(self, p, q):
        b = self.P.cell_b[p]
        return self.base[b] + self.pos_p[p] * self.nq[b] + self.pos_q[q]

    def unpack(self, pair):
        b = int(np.searchsorted(self.base, pair, side="right") - 1)
        off = pair - self.base[b]
        nq = len(self.qs_at[b])
        i, j = divmod(int(off), nq)
        return b, int(self.ps_at[b][i]), int(self.qs_at[b][j])

    def generators(self):
        """All pairs ((p·β, q), (p, β·q)) for β: b -> b' in the middle groupoid."""
        B = self.P.target
        xs, ys = [], []
        for beta in range(B.n_morphisms):
            b, b2 = int(B.src[beta]), int(B.tgt[beta])
            ps, qs = self.ps_at[b2], self.qs_at[b]
            if len(ps) == 0 or len(qs) == 0:
                continue
            pb = self.P.right[ps, beta]                 # in P(b, ·)
            bq = self.Q.left[beta, qs]                  # in Q(·, b')
            x = self.base[b] + self.pos_p[pb][:, None] * len(self.qs_at[b]) + self.pos_q[qs][None, :]
            y = self.base[b2] + self.pos_p[ps][:, None] * len(self.qs_at[b2]) + self.pos_q[bq][None, :]
            xs.append(x.ravel())
            ys.append(y.ravel())
        if not xs:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate(xs), np.concatenate(ys)


class Composite(Profunctor):
    """Q∘P with provenance: each element keeps its least representative (b, p, q)."""

    def class_of(self, p, q):
        return int(self.pair_class[self.index_pairs.pid(p, q)])


def compose(P: Profunctor, Q: Profunctor) -> Composite:
    """(Q∘P)(c, a) = ∫^b P(b, a) × Q(c, b), by union-find over the generating pairs."""
    if P.target != Q.source:
        raise BaseMismatch("P.target and Q.source differ")
    idx = CoendIndex(P, Q)
    xs, ys = idx.generators()
    labels = kern.uf_labels(idx.n_pairs, xs, ys)
    reps = np.nonzero(labels == np.arange(idx.n_pairs))[0]
    triples = [idx.unpack(r) for r in reps]
    cells = [(int(Q.cell_b[q]), int(P.cell_a[p])) for (_, p, q) in triples]
    order = sorted(range(len(reps)), key=lambda i: (cells[i], reps[i]))
    elem_of_rep = np.full(idx.n_pairs, -1, dtype=np.int64)
    for new, i in enumerate(order):
        elem_of_rep[reps[i]] = new
    pair_class = elem_of_rep[labels]
    triples = [triples[i] for i in order]
    n = len(triples)
    A, C = P.source, Q.target
    left = np.full((A.n_morphisms, n), -1, dtype=np.int64)
    right = np.full((n, C.n_morphisms), -1, dtype=np.int64)
    rp = np.array([t[1] for t in triples], dtype=np.int64)
    rq = np.array([t[2] for t in triples], dtype=np.int64)
    for e in range(n):
        p, q = rp[e], rq[e]
        alphas = np.nonzero(P.left[:, p] >= 0)[0]
        left[alphas, e] = pair_class[idx.pid(P.left[alphas, p], np.full(len(alphas), q))]
        gammas = np.nonzero(Q.right[q] >= 0)[0]
        right[e, gammas] = pair_class[idx.pid(np.full(len(gammas), p), Q.right[q, gammas])]
    cb = np.array([c for c, _ in (cells[i] for i in order)], dtype=np.int64)
    ca = np.array([a for _, a in (cells[i] for i in order)], dtype=np.int64)
    names = [f"[{P.names[p]}|{Q.names[q]}]" for (_, p, q) in triples]
    out = Composite(A, C, cb, ca, left, right, names, triples)
    out.index_pairs = idx
    out.pair_class = pair_class
    out.representatives = triples
    return out


def naive_coend_classes(P: Profunctor, Q: Profunctor):
    """Oracle: partition of all pairs by repeated merging until no generator crosses blocks."""
    pairs = [(int(P.cell_b[p]), p, q) for p in range(len(P)) for q in range(len(Q))
             if P.cell_b[p] == Q.cell_a[q]]
    block = {t[1:]: {t[1:]} for t in pairs}
    B = P.target
    changed = True
    while changed:
        changed = False
        for beta in range(B.n_morphisms):
            b, b2 = B.src[beta], B.tgt[beta]
            for p in np.nonzero(P.cell_b == b2)[0]:
                for q in np.nonzero(Q.cell_a == b)[0]:
                    x = (int(P.right[p, beta]), int(q))
                    y = (int(p), int(Q.left[beta, q]))
                    if block[x] is not block[y]:
                        merged = block[x] | block[y]
                        for t in merged:
                            block[t] = merged
                        changed = True
    return {frozenset(s) for s in block.values()}


# ------------------------------------------------------- stabilization

@dataclass
class StabilityReport:
    ok: bool
    witness: tuple | None = None   # (a, b, p, α, β, clause)

    def __bool__(self):
        return self.ok


def is_stabilized(P: Profunctor, KA: Kit, KB: Kit) -> StabilityReport:
    """Exhaustive check: whenever α·p·β = p, α ∈ ∪KA ⇒ β ∈ ∪KB and β ∈ ∪KB^⊥ ⇒ α ∈ ∪KA^⊥."""
    if KA.base != P.source or KB.base != P.target:
        raise BaseMismatch("kits do not match the profunctor's groupoids")
    KAp, KBp = orthogonal_kit(KA), orthogonal_kit(KB)
    for (b, a) in sorted(P.cells()):
        fixed, ea, eb, cell = P._fixed_cell(b, a)
        ua = np.isin(ea, list(KA.union(a)))
        uap = np.isin(ea, list(KAp.union(a)))
        ub = np.isin(eb, list(KB.union(b)))
        ubp = np.isin(eb, list(KBp.union(b)))
        bad1 = fixed & ua[:, None, None] & ~ub[None, None, :]
        bad2 = fixed & ubp[None, None, :] & ~uap[:, None, None]
        for bad, clause in ((bad1, "forward"), (bad2, "backward")):
            if bad.any():
                i, j, k = (int(x) for x in np.argwhere(bad)[0])
                return StabilityReport(False, (a, b, int(cell[j]), int(ea[i]), int(eb[k]), clause))
    return StabilityReport(True)


def composition_stabilized_check(batch):
    """batch: iterable of (P, Q, KA, KB, KC). Returns per-fixture (ok, witness) for Q∘P."""
    report = []
    for P, Q, KA, KB, KC in batch:
        r = is_stabilized(compose(P, Q), KA, KC)
        report.append((r.ok, r.witness))
    return report


# ----------------------------------------------------- other operations

def tensor_profunctors(P1: Profunctor, P2: Profunctor) -> Profunctor:
    """(P1 ⊗ P2)((b1,b2),(a1,a2)) = P1(b1,a1) × P2(b2,a2); element (p1, p2) has id p1*|P2| + p2."""
    A = product_groupoid(P1.source, P2.source)
    B = product_groupoid(P1.target, P2.target)
    n1, n2 = len(P1), len(P2)
    p1, p2 = np.divmod(np.arange(n1 * n2), max(n2, 1))
    cb = P1.cell_b[p1] * P2.target.n_objects + P2.cell_b[p2]
    ca = P1.cell_a[p1] * P2.source.n_objects + P2.cell_a[p2]
    l1 = P1.left[:, None, :, None]
    l2 = P2.left[None, :, None, :]
    left = np.where((l1 >= 0) & (l2 >= 0), l1 * n2 + l2, -1).reshape(A.n_morphisms, n1 * n2)
    r1 = P1.right[:, None, :, None]
    r2 = P2.right[None, :, None, :]
    right = np.where((r1 >= 0) & (r2 >= 0), r1 * n2 + r2, -1).reshape(n1 * n2, B.n_morphisms)
    names = [f"({P1.names[x]},{P2.names[y]})" for x, y in zip(p1, p2)]
    return Profunctor(A, B, cb, ca, left, right, names, list(zip(p1.tolist(), p2.tolist())))


def disjoint_union(*ps: Profunctor) -> Profunctor:
    A, B = ps[0].source, ps[0].target
    off = 0
    cb, ca, names = [], [], []
    total = sum(len(P) for P in ps)
    left = np.full((A.n_morphisms, total), -1, dtype=np.int64)
    right = np.full((total, B.n_morphisms), -1, dtype=np.int64)
    for i, P in enumerate(ps):
        n = len(P)
        cb.append(P.cell_b)
        ca.append(P.cell_a)
        left[:, off:off + n] = np.where(P.left >= 0, P.left + off, -1)
        right[off:off + n] = np.where(P.right >= 0, P.right + off, -1)
        names.extend(f"{i}.{x}" for x in P.names)
        off += n
    return Profunctor(A, B, np.concatenate(cb) if cb else [], np.concatenate(ca) if ca else [],
                      left, right, names)


def empty_profunctor(A: Groupoid, B: Groupoid) -> Profunctor:
    return Profunctor(A, B, [], [], np.zeros((A.n_morphisms, 0)), np.zeros((0, B.n_morphisms)))


def transitive_profunctor(A: Groupoid, B: Groupoid, a, b, S) -> Profunctor:
    """Pairs (α: a -> a', β: b' -> b) modulo (α, β) ~ (α∘s, t⁻¹∘β) for (s, t) in the subgroup S."""
    S = [(int(x), int(y)) for x, y in S]
    Sset = set(S)
    if (int(A.ident[a]), int(B.ident[b])) not in Sset or any(
            (int(A.comp[s1, s2]), int(B.comp[t1, t2])) not in Sset for s1, t1 in S for s2, t2 in S):
        raise NotSubgroup(f"{S} is not a subgroup of End(a) x End(b)")
    cells = {}
    seen = set()
    for a2 in range(A.n_objects):
        for b2 in range(B.n_objects):
            for alpha in A.hom(a, a2):
                for beta in B.hom(b2, b):
                    key = _orbit_key(A, B, int(alpha), int(beta), S)
                    if key not in seen:
                        seen.add(key)
                        cells.setdefault((b2, a2), []).append(key)

    def left_fn(x, key):
        alpha, beta = key[0]
        return _orbit_key(A, B, int(A.comp[x, alpha]), beta, S)

    def right_fn(key, y):
        alpha, beta = key[0]
        return _orbit_key(A, B, alpha, int(B.comp[beta, y]), S)

    def name(key):
        alpha, beta = key[0]
        return f"[{A.names[alpha]},{B.names[beta]}]"

    return Profunctor.from_keys(A, B, cells, left_fn, right_fn, name)


def _orbit_key(A, B, alpha, beta, S):
    orbit = sorted({(int(A.comp[alpha, s]), int(B.comp[B.inv[t], beta])) for s, t in S})
    return tuple(orbit)


def random_profunctor(A: Groupoid, B: Groupoid, rng, max_cell=8, pieces=3) -> Profunctor:
    """Disjoint union of up to ``pieces`` random transitive profunctors with cells ≤ max_cell."""
    AB = product_groupoid(A, B)
    parts = []
    sizes = {}
    for _ in range(rng.randint(0, pieces)):
        a = rng.randrange(A.n_objects)
        b = rng.randrange(B.n_objects)
        subs = AB.lattice(a * B.n_objects + b).subgroups
        H = subs[rng.randrange(len(subs))]
        S = [divmod(m, B.n_morphisms) for m in H.elements]
        T = transitive_profunctor(A, B, a, b, S)
        new = {k: sizes.get(k, 0) + len(v) for k, v in T.cells().items()}
        if any(v > max_cell for v in new.values()):
            continue
        sizes.update(new)
        parts.append(T)
    if not parts:
        return empty_profunctor(A, B)
    return disjoint_union(*parts)


# --------------------------------------------------------------- isos

def find_iso(P: Profunctor, Q: Profunctor):
    """An equivariant bijection P -> Q (array of Q ids) or None.

    Orbits are matched greedily: a P-orbit through p goes to an unused Q-orbit
    containing some q in the same cell with exactly the same stabilizer pairs.
    """
    if P.source != Q.source or P.target != Q.target or len(P) != len(Q):
        return None
    lp, lq = P.orbits(), Q.orbits()
    q_orbits = {}
    for q in range(len(Q)):
        q_orbits.setdefault(int(lq[q]), []).append(q)
    used = set()
    f = np.full(len(P), -1, dtype=np.int64)
    stab_cache = {}

    def stab(R, x):
        k = (id(R), x)
        if k not in stab_cache:
            stab_cache[k] = R.stabilizer_pairs(x)
        return stab_cache[k]

    for rep in sorted(set(int(x) for x in lp)):
        cell = (P.cell_b[rep], P.cell_a[rep])
        target = None
        sp = stab(P, rep)
        for qrep, members in q_orbits.items():
            if qrep in used:
                continue
            for q in members:
                if (Q.cell_b[q], Q.cell_a[q]) == cell and stab(Q, q) == sp:
                    target = q
                    break
            if target is not None:
                used.add(qrep)
                break
        if target is None:
            return None
        f[rep] = target
        queue = deque([rep])
        while queue:
            p = queue.popleft()
            for alpha in np.nonzero(P.left[:, p] >= 0)[0]:
                p2, q2 = P.left[alpha, p], Q.left[alpha, f[p]]
                if f[p2] < 0:
                    f[p2] = q2
                    queue.append(p2)
                elif f[p2] != q2:
                    return None
            for beta in np.nonzero(P.right[p] >= 0)[0]:
                p2, q2 = P.right[p, beta], Q.right[f[p], beta]
                if f[p2] < 0:
                    f[p2] = q2
                    queue.append(p2)
                elif f[p2] != q2:
                    return None
    return f if is_equivariant_bijection(P, Q, f) else None


def is_equivariant_bijection(P: Profunctor, Q: Profunctor, f) -> bool:
    f = np.asarray(f, dtype=np.int64)
    if len(f) != len(P) or len(P) != len(Q) or (f < 0).any():
        return False
    if len(np.unique(f)) != len(f):
        return False
    if not (np.array_equal(Q.cell_b[f], P.cell_b) and np.array_equal(Q.cell_a[f], P.cell_a)):
        return False
    return is_equivariant(P, Q, f)


def is_equivariant(P: Profunctor, Q: Profunctor, f) -> bool:
    """f commutes with both actions (f need not be bijective)."""
    f = np.asarray(f, dtype=np.int64)
    if len(P) == 0:
        return True
    ml = P.left >= 0
    lhs = np.where(ml, f[np.where(ml, P.left, 0)], -1)
    rhs = np.where(ml, Q.left[:, f], -1)
    if not np.array_equal(lhs, rhs):
        return False
    mr = P.right >= 0
    lhs = np.where(mr, f[np.where(mr, P.right, 0)], -1)
    rhs = np.where(mr, Q.right[f, :], -1)
    return bool(np.array_equal(lhs, rhs))


def relabel(P: Profunctor, source: Groupoid, target: Groupoid, smap, tmap, sobj, tobj) -> Profunctor:
    """Transport P along groupoid isomorphisms given as id maps (morphisms and objects)."""
    smap, tmap = np.asarray(smap), np.asarray(tmap)
    left = np.full((source.n_morphisms, len(P)), -1, dtype=np.int64)
    right = np.full((len(P), target.n_morphisms), -1, dtype=np.int64)
    left[smap] = P.left
    right[:, tmap] = P.right
    return Profunctor(source, target, np.asarray(tobj)[P.cell_b], np.asarray(sobj)[P.cell_a],
                      left, right, P.names, P.keys)


def sym_lift(P: Profunctor, L: int):
    from .sym import sym_lift as _lift
    return _lift(P, L)


__all__ = ["Profunctor", "identity_profunctor", "compose", "naive_coend_classes", "is_stabilized",
           "composition_stabilized_check", "tensor_profunctors", "disjoint_union", "find_iso",
           "random_profunctor", "transitive_profunctor", "sym_lift", "ONE", "StabilityReport"]
