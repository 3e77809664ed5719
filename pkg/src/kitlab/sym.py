"""Truncated symmetric completion Sym A, loop endomorphisms, the exponential kits and their structural profunctors."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, IndexOutOfRange, NotEndo
from .groupoid import MAX_MORPHISMS, Groupoid, Subgroup, _env_int
from .kits import (Kit, _fam_from_rows, orth_family, orthogonal_kit,
                   require_boolean, tensor_kit)
from .profunctor import Profunctor

DEFAULT_L = _env_int("KITLAB_SYM_LENGTH", 4)


@dataclass(frozen=True)
class SymMorphism:
    source: tuple
    target: tuple
    perm: tuple
    parts: tuple


def _perm_rank_table(n):
    perms = list(itertools.permutations(range(n)))
    table = np.full(max(n, 1) ** n, -1, dtype=np.int64)
    for r, p in enumerate(perms):
        table[_perm_code(np.array([p]), n)[0]] = r
    return perms, table


def _perm_code(P, n):
    code = np.zeros(len(P), dtype=np.int64)
    for i in range(n):
        code = code * n + P[:, i]
    return code


class SymGroupoid(Groupoid):
    """Sym A restricted to sequences of length ≤ L (and total weight ≤ L when weights are given)."""

    base: Groupoid
    L: int

    def seq(self, u):
        return self.seqs[u]

    def length(self, u):
        return len(self.seqs[u])

    def obj_id(self, seq):
        seq = tuple(int(a) for a in seq)
        try:
            return self._obj_index[seq]
        except KeyError:
            raise BudgetExceeded(f"sequence {seq} lies outside the truncation L={self.L}") from None

    def has_obj(self, seq):
        return tuple(seq) in self._obj_index

    def mor_id(self, perm, parts):
        key = (tuple(int(x) for x in perm), tuple(int(x) for x in parts))
        try:
            return self._mor_index[key]
        except KeyError:
            raise BudgetExceeded(f"morphism {key} lies outside the truncation L={self.L}") from None

    def sym_morphism(self, m):
        return SymMorphism(self.seqs[self.src[m]], self.seqs[self.tgt[m]], self.perms[m], self.parts[m])

    def singleton(self, a):
        return self.obj_id((a,))

    def singleton_mor(self, f):
        return self.mor_id((0,), (f,))

    def concat(self, *us):
        return self.obj_id(sum((self.seqs[u] for u in us), ()))

    def tensor_mor(self, *fs):
        perm, parts, off = [], [], 0
        for f in fs:
            perm.extend(off + x for x in self.perms[f])
            parts.extend(self.parts[f])
            off += len(self.perms[f])
        return self.mor_id(perm, parts)


@lru_cache(maxsize=None)
def _build(G: Groupoid, L: int, weight: tuple | None):
    nb = G.n_objects
    M = G.n_morphisms
    out = [np.nonzero(G.src == a)[0] for a in range(nb)]
    w = weight if weight is not None else (1,) * nb
    seqs = []
    for n in range(L + 1):
        for s in itertools.product(range(nb), repeat=n):
            if weight is None or sum(w[a] for a in s) <= L:
                seqs.append(s)
    obj_index = {s: i for i, s in enumerate(seqs)}
    estimate = sum(math.factorial(len(s)) * math.prod(len(out[a]) for a in s) for s in seqs)
    if estimate > MAX_MORPHISMS:
        raise BudgetExceeded(f"Sym at L={L} needs {estimate} morphisms (budget {MAX_MORPHISMS})")
    perms, parts, src, tgt = [], [], [], []
    blocks = []
    for n in range(L + 1):
        start = len(perms)
        for s in (x for x in seqs if len(x) == n):
            for sigma in itertools.permutations(range(n)):
                for choice in itertools.product(*[out[a] for a in s]):
                    t = [0] * n
                    for i, f in enumerate(choice):
                        t[sigma[i]] = int(G.tgt[f])
                    perms.append(sigma)
                    parts.append(tuple(int(f) for f in choice))
                    src.append(obj_index[s])
                    tgt.append(obj_index[tuple(t)])
        blocks.append((start, len(perms)))
    m = len(perms)
    src = np.array(src, dtype=np.int64)
    tgt = np.array(tgt, dtype=np.int64)
    comp = np.full((m, m), -1, dtype=np.int32)
    inv = np.zeros(m, dtype=np.int64)
    base_comp = G.comp.astype(np.int64)
    mor_index = {}
    for n, (lo, hi) in enumerate(blocks):
        if hi == lo:
            continue
        P = np.array(perms[lo:hi], dtype=np.int64).reshape(hi - lo, n)
        A = np.array(parts[lo:hi], dtype=np.int64).reshape(hi - lo, n)
        _, rank_of = _perm_rank_table(n)

        def encode(Pm, Am):
            lead = Pm.shape[:-1]
            rows = int(np.prod(lead))
            flatP = Pm.reshape(rows, n)
            key = rank_of[_perm_code(flatP, n)] if n else np.zeros(rows, dtype=np.int64)
            flatA = Am.reshape(rows, n)
            for i in range(n):
                key = key * M + flatA[:, i]
            return key.reshape(lead)

        keys = encode(P, A)
        order = np.argsort(keys)
        sorted_keys = keys[order]

        def lookup(k):
            pos = np.searchsorted(sorted_keys, k)
            return order[pos] + lo

        S, T = src[lo:hi], tgt[lo:hi]
        for v in np.unique(T):
            F = np.nonzero(T == v)[0]
            Gs = np.nonzero(S == v)[0]
            PF, AF = P[F], A[F]
            PG, AG = P[Gs], A[Gs]
            cperm = PG[:, PF]                                # τ(σ(i))
            cparts = base_comp[AG[:, PF], AF[None, :, :]]    # β_{σ(i)} ∘ α_i
            comp[np.ix_(Gs + lo, F + lo)] = lookup(encode(cperm, cparts))
        invp = np.argsort(P, axis=1)
        inv_parts = G.inv[np.take_along_axis(A, invp, axis=1)]
        inv[lo:hi] = lookup(encode(invp, inv_parts))
        for i in range(hi - lo):
            mor_index[(perms[lo + i], parts[lo + i])] = lo + i
    ident = np.array([mor_index[(tuple(range(len(s))), tuple(int(G.ident[a]) for a in s))]
                      for s in seqs], dtype=np.int64)
    objects = ["<" + ",".join(G.objects[a] for a in s) + ">" for s in seqs]
    names = ["[" + "".join(str(x) for x in p) + "|" + ",".join(G.names[f] for f in q) + "]"
             for p, q in zip(perms, parts)]
    S = SymGroupoid(objects, src, tgt, comp, inv, ident, names,
                    obj_labels=[tuple(s) for s in seqs], labels=list(zip(perms, parts)))
    S.base = G
    S.L = L
    S.weight = weight
    S.seqs = seqs
    S.perms = perms
    S.parts = parts
    S._obj_index = obj_index
    S._mor_index = mor_index
    return S


def build_sym(G: Groupoid, L: int | None = None, weight=None) -> SymGroupoid:
    """Explicit Sym G up to length L; ``weight`` bounds the weighted length as well (nested Sym)."""
    L = DEFAULT_L if L is None else L
    if L < 0:
        raise BudgetExceeded("negative truncation bound")
    return _build(G, L, tuple(weight) if weight is not None else None)


def build_sym_sym(G: Groupoid, L: int):
    """(Sym G, Sym Sym G) with Σ|u_i| ≤ L and outer length ≤ L."""
    S = build_sym(G, L)
    SS = build_sym(S, L, weight=[len(s) for s in S.seqs])
    return S, SS


# ------------------------------------------------------------ loops

def cycle_order(sigma, i) -> int:
    n = len(sigma)
    if not 0 <= i < n:
        raise IndexOutOfRange(f"index {i} outside a permutation of length {n}")
    k, j = 1, sigma[i]
    while j != i:
        j = sigma[j]
        k += 1
    return k


def loop_endomorphism(S: SymGroupoid, m, i) -> int:
    """⟨α⟩_i = α_{σ^{o-1}(i)} ∘ … ∘ α_{σ(i)} ∘ α_i, an endomorphism of a_i."""
    if S.src[m] != S.tgt[m]:
        raise NotEndo(f"{S.names[m]} is not an endomorphism")
    sigma, parts = S.perms[m], S.parts[m]
    B = S.base
    acc = parts[i]
    j = sigma[i]
    while j != i:
        acc = int(B.comp[parts[j], acc])
        j = sigma[j]
    return int(acc)


# --------------------------------------------------------- exponential kits

def sym_family(A: Kit, S: SymGroupoid):
    """K^Sym(u): subgroups of End(u) all of whose loops lie in ∪K(a_i)."""
    fam = {}
    for u, seq in enumerate(S.seqs):
        lat = S.lattice(u)
        good = np.zeros(len(lat.elems), dtype=bool)
        for x, m in enumerate(lat.elems):
            good[x] = all(loop_endomorphism(S, int(m), i) in A.union(a) for i, a in enumerate(seq))
        fam[u] = _fam_from_rows(S, u, lat.contained_in(good))
    return fam


def bang_kit(A: Kit, L: int | None = None, sym: SymGroupoid | None = None) -> Kit:
    """!(A, K) = (Sym A, (K^Sym)^⊥⊥)."""
    require_boolean(A)
    S = sym if sym is not None else build_sym(A.base, L)
    if S.base != A.base:
        raise ValueError("Sym groupoid built over a different base")
    fam = orth_family(S, orth_family(S, sym_family(A, S)))
    return Kit(S, fam, boolean=True)


def whynot_kit(A: Kit, L: int | None = None) -> Kit:
    """?(A, K) = (Sym A, (!K^⊥)^⊥), transported from Sym(A^op)^op to Sym A."""
    S = build_sym(A.base, L)
    Sop = build_sym(A.base.opposite(), S.L)
    inner = bang_kit(orthogonal_kit(A), sym=Sop)
    outer = orth_family(Sop, inner.family)
    fam = {}
    for u, subs in outer.items():
        fam[u] = frozenset(Subgroup(u, frozenset(_op_to_sym(Sop, S, m) for m in H.elements))
                           for H in subs)
    return Kit(S, fam, boolean=True)


def _op_to_sym(Sop, S, m):
    # (σ, α_i) in Sym(A^op) read backwards is (σ⁻¹, α_{σ⁻¹(j)}) in Sym A
    sigma, parts = Sop.perms[m], Sop.parts[m]
    n = len(sigma)
    inv = [0] * n
    for i, j in enumerate(sigma):
        inv[j] = i
    return S.mor_id(inv, [parts[inv[j]] for j in range(n)])


# ------------------------------------------------ structural profunctors

def dereliction(A, L: int | None = None) -> Profunctor:
    """der: Sym A ⇸ A, (a, u) ↦ Sym A(⟨a⟩, u)."""
    G = A.base if isinstance(A, Kit) else A
    S = build_sym(G, L)
    cells = {}
    for a in range(G.n_objects):
        sa = S.singleton(a)
        for u in range(S.n_objects):
            h = S.hom(sa, u)
            if len(h):
                cells[(a, u)] = [int(m) for m in h]
    return Profunctor.from_keys(
        S, G, cells,
        lambda alpha, m: int(S.comp[alpha, m]),
        lambda m, beta: int(S.comp[m, S.singleton_mor(beta)]),
        lambda m: S.names[m])


def flatten(SS: SymGroupoid, beta) -> int:
    """β̄: u'_1⊗…⊗u'_n -> u_1⊗…⊗u_n for β = (τ, β_i) in Sym Sym A."""
    S = SS.base
    tau, blocks = SS.perms[beta], SS.parts[beta]
    src_seq = [S.seqs[x] for x in SS.seqs[SS.src[beta]]]
    tgt_seq = [S.seqs[x] for x in SS.seqs[SS.tgt[beta]]]
    toff = np.concatenate([[0], np.cumsum([len(s) for s in tgt_seq])]).astype(int)
    perm, parts = [], []
    for l, bl in enumerate(blocks):
        phi, deltas = S.perms[bl], S.parts[bl]
        for j in range(len(src_seq[l])):
            perm.append(int(phi[j] + toff[tau[l]]))
            parts.append(deltas[j])
    return S.mor_id(perm, parts)


def flatten_endo(SS: SymGroupoid, beta) -> int:
    if SS.src[beta] != SS.tgt[beta]:
        raise NotEndo(f"{SS.names[beta]} is not an endomorphism")
    return flatten(SS, beta)


def flat_object(SS: SymGroupoid, U):
    S = SS.base
    return S.concat(*SS.seqs[U]) if SS.seqs[U] else S.obj_id(())


def digging(A, L: int | None = None) -> Profunctor:
    """dig: Sym A ⇸ Sym Sym A, (⟨u_1,…,u_n⟩, u) ↦ Sym A(u_1⊗…⊗u_n, u)."""
    G = A.base if isinstance(A, Kit) else A
    S, SS = build_sym_sym(G, L if L is not None else DEFAULT_L)
    cells = {}
    for U in range(SS.n_objects):
        fu = flat_object(SS, U)
        for u in range(S.n_objects):
            h = S.hom(fu, u)
            if len(h):
                cells[(U, u)] = [(U, int(m)) for m in h]
    return Profunctor.from_keys(
        S, SS, cells,
        lambda alpha, k: (k[0], int(S.comp[alpha, k[1]])),
        lambda k, beta: (int(SS.src[beta]), int(S.comp[k[1], flatten(SS, beta)])),
        lambda k: S.names[k[1]])


def coderiction(A, L: int | None = None) -> Profunctor:
    """coder: A ⇸ Sym A, (u, a) ↦ Sym A(u, ⟨a⟩)."""
    G = A.base if isinstance(A, Kit) else A
    S = build_sym(G, L)
    cells = {}
    for a in range(G.n_objects):
        sa = S.singleton(a)
        for u in range(S.n_objects):
            h = S.hom(u, sa)
            if len(h):
                cells[(u, a)] = [int(m) for m in h]
    return Profunctor.from_keys(
        G, S, cells,
        lambda alpha, m: int(S.comp[S.singleton_mor(alpha), m]),
        lambda m, beta: int(S.comp[m, beta]),
        lambda m: S.names[m])


def sym_lift(P: Profunctor, L: int | None = None) -> Profunctor:
    """Sym P(v, u) = ⨿_φ Π_j P(b_j, a_φ(j)) for |u| = |v|."""
    SA = build_sym(P.source, L)
    SB = build_sym(P.target, SA.L)
    cells = {}
    for v in range(SB.n_objects):
        bs = SB.seqs[v]
        n = len(bs)
        for u in range(SA.n_objects):
            as_ = SA.seqs[u]
            if len(as_) != n:
                continue
            keys = []
            for phi in itertools.permutations(range(n)):
                choices = [P.cell(bs[j], as_[phi[j]]) for j in range(n)]
                for ps in itertools.product(*choices):
                    keys.append((phi, tuple(int(p) for p in ps)))
            if keys:
                cells[(v, u)] = keys

    def left_fn(alpha, key):
        sigma, parts = SA.perms[alpha], SA.parts[alpha]
        phi, ps = key
        return (tuple(sigma[x] for x in phi), tuple(int(P.left[parts[phi[j]], p]) for j, p in enumerate(ps)))

    def right_fn(key, beta):
        tau, parts = SB.perms[beta], SB.parts[beta]
        phi, ps = key
        return (tuple(phi[t] for t in tau), tuple(int(P.right[ps[tau[j]], parts[j]]) for j in range(len(tau))))

    def name(key):
        phi, ps = key
        return "[" + "".join(map(str, phi)) + "|" + ",".join(P.names[p] for p in ps) + "]"

    return Profunctor.from_keys(SA, SB, cells, left_fn, right_fn, name)


# ------------------------------------------------------------ Seely

def seely_split(SAB: SymGroupoid, w, n_left_objects: int):
    """(w.1, w.2): the order-preserving split of a sequence over A & B (object ids < n_left_objects are tag 1)."""
    seq = SAB.seqs[w] if isinstance(w, (int, np.integer)) else tuple(w)
    return (tuple(a for a in seq if a < n_left_objects),
            tuple(a - n_left_objects for a in seq if a >= n_left_objects))


def seely_merge(u, v, n_left_objects: int):
    """Sym(in_1)u ⊗ Sym(in_2)v as a sequence over A & B."""
    return tuple(u) + tuple(n_left_objects + b for b in v)


def merge_morphism(SAB, SA, SB, f, g):
    """α ⊗ β transported into Sym(A&B)."""
    na = SA.base.n_morphisms
    p1, p2 = SA.perms[f], SB.perms[g]
    perm = list(p1) + [len(p1) + x for x in p2]
    parts = list(SA.parts[f]) + [na + x for x in SB.parts[g]]
    return SAB.mor_id(perm, parts)


def split_morphism(SAB, SA, SB, gamma, n_left_objects):
    """γ ↦ (γ.1, γ.2) for a morphism of Sym(A&B); tags are preserved by every morphism."""
    na = SA.base.n_morphisms
    src = SAB.seqs[SAB.src[gamma]]
    tgt = SAB.seqs[SAB.tgt[gamma]]
    sigma, parts = SAB.perms[gamma], SAB.parts[gamma]
    out = []
    for side, S, shift in ((0, SA, 0), (1, SB, na)):
        pos_src = [i for i, a in enumerate(src) if (a >= n_left_objects) == side]
        pos_tgt = [i for i, a in enumerate(tgt) if (a >= n_left_objects) == side]
        rank = {p: k for k, p in enumerate(pos_tgt)}
        perm = [rank[sigma[i]] for i in pos_src]
        sub = [parts[i] - shift for i in pos_src]
        out.append(S.mor_id(perm, sub))
    return tuple(out)


def endo_groupoid(G: Groupoid, a):
    """End(a) as a one-object groupoid, with the local -> global id map."""
    elems = G.endo(a)
    pos = np.full(G.n_morphisms, -1, dtype=np.int64)
    pos[elems] = np.arange(len(elems))
    comp = pos[G.comp[np.ix_(elems, elems)]]
    inv = pos[G.inv[elems]]
    H = Groupoid([G.objects[a]], np.zeros(len(elems)), np.zeros(len(elems)), comp, inv,
                 [pos[G.ident[a]]], [G.names[m] for m in elems])
    return H, elems


def restrict_kit(K: Kit, a):
    """K at a single object, as a kit on End(a)."""
    H, elems = endo_groupoid(K.base, a)
    pos = {int(m): i for i, m in enumerate(elems)}
    fam = {0: {Subgroup(0, frozenset(pos[m] for m in S.elements)) for S in K.family[a]}}
    return Kit(H, fam, boolean=K.boolean), elems


def seely_inclusions(K1: Kit, K2: Kit, L: int):
    """Check both kit inclusions of the Seely equivalence; returns a list of failures (empty = pass)."""
    from .kits import with_kit
    A, B = K1.base, K2.base
    SA, SB = build_sym(A, L), build_sym(B, L)
    W = with_kit(K1, K2)
    SAB = build_sym(W.base, L)
    bA, bB, bAB = bang_kit(K1, sym=SA), bang_kit(K2, sym=SB), bang_kit(W, sym=SAB)
    nA = A.n_objects
    failures = []
    for u in range(SA.n_objects):
        for v in range(SB.n_objects):
            if SA.length(u) + SB.length(v) > L:
                continue
            w = SAB.obj_id(seely_merge(SA.seqs[u], SB.seqs[v], nA))
            Ku, eu = restrict_kit(bA, u)
            Kv, ev = restrict_kit(bB, v)
            T = tensor_kit(Ku, Kv)
            mv = len(ev)
            for H in T.family[0]:
                img = frozenset(merge_morphism(SAB, SA, SB, int(eu[x // mv]), int(ev[x % mv]))
                                for x in H.elements)
                if Subgroup(w, img) not in bAB.family[w]:
                    failures.append(("merge", u, v, H))
    for w in range(SAB.n_objects):
        s1, s2 = seely_split(SAB, w, nA)
        u, v = SA.obj_id(s1), SB.obj_id(s2)
        Ku, eu = restrict_kit(bA, u)
        Kv, ev = restrict_kit(bB, v)
        T = tensor_kit(Ku, Kv)
        pu = {int(m): i for i, m in enumerate(eu)}
        pv = {int(m): i for i, m in enumerate(ev)}
        for H in bAB.family[w]:
            img = set()
            for g in H.elements:
                f1, f2 = split_morphism(SAB, SA, SB, g, nA)
                img.add(pu[f1] * len(ev) + pv[f2])
            if Subgroup(0, frozenset(img)) not in T.family[0]:
                failures.append(("split", w, H))
    return failures


def derivative(P: Profunctor, L: int | None = None) -> Profunctor:
    """DP: (Sym A)_{<L} × A ⇸ B, (b, (u, a)) ↦ P(b, u ⊗ ⟨a⟩)."""
    S = P.source
    if not isinstance(S, SymGroupoid):
        raise TypeError("derivative expects a species (profunctor out of a Sym groupoid)")
    G = S.base
    Lp = S.L - 1 if L is None else L
    if Lp < 0 or Lp + 1 > S.L:
        raise BudgetExceeded(f"derivative needs inputs of length {Lp + 1} but the species stops at {S.L}")
    S1 = build_sym(G, Lp)
    from .kits import product_groupoid
    D = product_groupoid(S1, G)
    na = G.n_objects
    cells = {}
    for b in range(P.target.n_objects):
        for u in range(S1.n_objects):
            for a in range(na):
                ua = S.obj_id(S1.seqs[u] + (a,))
                c = P.cell(b, ua)
                if len(c):
                    cells[(b, u * na + a)] = [int(p) for p in c]
    mg = G.n_morphisms

    def left_fn(x, p):
        f, g = divmod(x, mg)
        perm = list(S1.perms[f]) + [len(S1.perms[f])]
        parts = list(S1.parts[f]) + [g]
        return int(P.left[S.mor_id(perm, parts), p])

    return Profunctor.from_keys(D, P.target, cells, left_fn,
                                lambda p, beta: int(P.right[p, beta]),
                                lambda p: P.names[p])
