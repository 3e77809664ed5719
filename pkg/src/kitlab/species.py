"""Species: set-valued symmetric sequences, stable species over groupoids, evaluation, traces and cartesian checks."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .errors import BudgetExceeded, NotStabilized, ProbeBudgetExceeded
from .groupoid import ONE, Groupoid, _env_int, discrete
from .kits import Kit, canonical_kit, coproduct_groupoid
from .presheaf import (Presheaf, apply_profunctor, compose_maps, free_presheaf, hom_presheaves,
                       is_stabilized_presheaf, push_map, representable)
from .profunctor import Profunctor, compose, is_equivariant, is_equivariant_bijection, is_stabilized
from .sym import SymGroupoid, bang_kit, build_sym, dereliction, derivative  # noqa: F401

EVAL_BUDGET = _env_int("KITLAB_EVAL_BUDGET", 200_000)
PROBE_BUDGET = _env_int("KITLAB_PROBE_BUDGET", 2_000_000)


# ------------------------------------------------------------ set species

def _perms(n):
    return list(itertools.permutations(range(n)))


def _compose_perm(s, t):
    return tuple(s[t[i]] for i in range(len(t)))


class SetSpecies:
    """F(n) for n ≤ L as finite S_n-sets; ``act[n][x, r]`` is perms(n)[r]·x."""

    def __init__(self, L, act, names=None):
        self.L = L
        self.act = {n: np.asarray(act.get(n, np.zeros((0, math.factorial(n)))), dtype=np.int64)
                    .reshape(-1, math.factorial(n)) for n in range(L + 1)}
        self.perms = {n: _perms(n) for n in range(L + 1)}
        self.rank = {n: {p: r for r, p in enumerate(self.perms[n])} for n in range(L + 1)}
        self.names = names or {}

    def __repr__(self):
        return f"<SetSpecies sizes={self.sizes()}>"

    def size(self, n):
        return len(self.act[n])

    def sizes(self):
        return [self.size(n) for n in range(self.L + 1)]

    def __eq__(self, other):
        return (isinstance(other, SetSpecies) and self.L == other.L
                and all(np.array_equal(self.act[n], other.act[n]) for n in range(self.L + 1)))

    __hash__ = object.__hash__

    def validate(self):
        for n in range(self.L + 1):
            a, ps, rk = self.act[n], self.perms[n], self.rank[n]
            if len(a) and not np.array_equal(a[:, 0], np.arange(len(a))):
                raise ValueError(f"identity permutation moves elements of F({n})")
            for s, t in itertools.product(range(len(ps)), repeat=2):
                st = rk[_compose_perm(ps[s], ps[t])]
                if not np.array_equal(a[:, st], a[a[:, t], s]):
                    raise ValueError(f"F({n}) action is not functorial")
        return self

    @classmethod
    def from_orbits(cls, L, orbits):
        """Disjoint union of coset spaces S_n/H; ``orbits`` lists (n, generators of H)."""
        act = {n: [] for n in range(L + 1)}
        offset = {n: 0 for n in range(L + 1)}
        names = {}
        for n, gens in orbits:
            if n > L:
                raise BudgetExceeded(f"orbit at size {n} beyond L={L}")
            ps = _perms(n)
            H = {tuple(range(n))}
            frontier = list(H)
            gens = [tuple(g) for g in gens]
            while frontier:
                h = frontier.pop()
                for g in gens:
                    k = _compose_perm(h, g)
                    if k not in H:
                        H.add(k)
                        frontier.append(k)
            cosets = sorted({min(_compose_perm(s, h) for h in H) for s in ps})
            pos = {c: i for i, c in enumerate(cosets)}
            block = np.zeros((len(cosets), len(ps)), dtype=np.int64)
            for i, c in enumerate(cosets):
                for r, t in enumerate(ps):
                    block[i, r] = pos[min(_compose_perm(_compose_perm(t, c), h) for h in H)] + offset[n]
            act[n].append(block)
            for i, c in enumerate(cosets):
                names[(n, offset[n] + i)] = f"{n}.{offset[n] + i}:" + "".join(map(str, c))
            offset[n] += len(cosets)
        tables = {n: (np.concatenate(b) if b else np.zeros((0, math.factorial(n)), dtype=np.int64))
                  for n, b in act.items()}
        return cls(L, tables, names)

    def stabilizer(self, n, x):
        return frozenset(p for r, p in enumerate(self.perms[n]) if self.act[n][x, r] == x)

    def to_species(self) -> Profunctor:
        """The same data as a profunctor Sym(One) ⇸ One."""
        S = build_sym(ONE, self.L)
        cells = {}
        for n in range(self.L + 1):
            if self.size(n):
                cells[(0, S.obj_id((0,) * n))] = [(n, x) for x in range(self.size(n))]

        def left_fn(alpha, key):
            n, x = key
            return (n, int(self.act[n][x, self.rank[n][S.perms[alpha]]]))

        return Profunctor.from_keys(S, ONE, cells, left_fn, lambda k, beta: k,
                                    lambda k: self.names.get(k, f"{k[0]}.{k[1]}"))

    @classmethod
    def from_species(cls, P: Profunctor):
        S = P.source
        if not (isinstance(S, SymGroupoid) and S.base.n_objects == 1 and P.target.n_objects == 1):
            raise ValueError("not a species over One")
        act = {}
        for n in range(S.L + 1):
            u = S.obj_id((0,) * n)
            cell = P.cell(0, u)
            pos = {int(p): i for i, p in enumerate(cell)}
            t = np.zeros((len(cell), math.factorial(n)), dtype=np.int64)
            for r, perm in enumerate(_perms(n)):
                m = S.mor_id(perm, (0,) * n)
                for i, p in enumerate(cell):
                    t[i, r] = pos[int(P.left[m, p])]
            act[n] = t
        return cls(S.L, act)


def analytic_eval_set(F: SetSpecies, k: int):
    """Σ_n F(n) ×_{S_n} X^n for |X| = k: orbit counts per n, total, least orbit representatives."""
    per_n, reps = {}, {}
    for n in range(F.L + 1):
        m = F.size(n)
        tuples = k ** n
        if m * tuples > EVAL_BUDGET:
            raise BudgetExceeded(f"{m * tuples} pairs at n={n} exceed the evaluation budget")
        if m == 0 or tuples == 0:
            per_n[n], reps[n] = 0, []
            continue
        codes = np.arange(tuples)
        digits = np.stack([(codes // k ** (n - 1 - i)) % k for i in range(n)], axis=1) if n else \
            np.zeros((1, 0), dtype=np.int64)
        xs, ys = [], []
        for r, sigma in enumerate(F.perms[n]):
            # (p, (x_σ(1), …, x_σ(n))) ~ (σ·p, (x_1, …, x_n))
            permuted = digits[:, list(sigma)] if n else digits
            pcode = np.zeros(tuples, dtype=np.int64)
            for i in range(n):
                pcode = pcode * k + permuted[:, i]
            for p in range(m):
                xs.append(p * tuples + pcode)
                ys.append(F.act[n][p, r] * tuples + codes)
        lab = kern.uf_labels(m * tuples, np.concatenate(xs), np.concatenate(ys))
        roots = np.nonzero(lab == np.arange(m * tuples))[0]
        per_n[n] = len(roots)
        reps[n] = [(int(r // tuples), tuple(int(d) for d in digits[r % tuples])) for r in roots]
    return {"per_n": per_n, "total": sum(per_n.values()), "representatives": reps}


def is_free_species(F: SetSpecies) -> bool:
    return all(len(F.stabilizer(n, x)) == 1 for n in range(F.L + 1) for x in range(F.size(n)))


def is_K_species(F: SetSpecies, K) -> bool:
    """K maps n to a collection of subgroups of S_n (each an iterable of permutation tuples)."""
    allowed = {n: {frozenset(tuple(p) for p in H) for H in K.get(n, ())} for n in range(F.L + 1)}
    return all(F.stabilizer(n, x) in allowed[n] for n in range(F.L + 1) for x in range(F.size(n)))


@dataclass
class PolynomialResult:
    ok: bool
    coefficients: dict = field(default_factory=dict)
    witness: tuple | None = None        # (n, x, permutation fixing x)

    def __bool__(self):
        return self.ok


def polynomial_coefficients(F: SetSpecies) -> PolynomialResult:
    for n in range(F.L + 1):
        for x in range(F.size(n)):
            st = F.stabilizer(n, x)
            if len(st) > 1:
                sigma = min(p for p in st if p != tuple(range(n)))
                return PolynomialResult(False, witness=(n, x, sigma))
    return PolynomialResult(True, {n: F.size(n) // math.factorial(n) for n in range(F.L + 1)})


# ----------------------------------------------------- species evaluation

def xsym_presheaf(S: SymGroupoid, X: Presheaf) -> Presheaf:
    """X^Sym(u) = Π_i X(a_i), acted on by (σ, α_i) via (x̄·α)_i = x_σ(i)·α_i."""
    if S.base != X.base:
        raise ValueError("Sym groupoid and presheaf live on different groupoids")
    secs = [list(map(int, X.section(a))) for a in range(X.base.n_objects)]
    total = sum(math.prod(len(secs[a]) for a in seq) for seq in S.seqs)
    if total > EVAL_BUDGET:
        raise BudgetExceeded(f"X^Sym has {total} elements (budget {EVAL_BUDGET})")
    sections = {u: list(itertools.product(*[secs[a] for a in seq])) for u, seq in enumerate(S.seqs)}

    def act_fn(t, alpha):
        sigma, parts = S.perms[alpha], S.parts[alpha]
        return tuple(int(X.act[t[sigma[i]], parts[i]]) for i in range(len(sigma)))

    return Presheaf.from_keys(S, sections, act_fn,
                              lambda t: "(" + ",".join(X.names[x] for x in t) + ")")


class Evaluation:
    """T_P(X) = ∫^u P(b, u) × X^Sym(u) together with the data to push maps of X through it."""

    def __init__(self, P: Profunctor, X: Presheaf):
        if not isinstance(P.source, SymGroupoid):
            raise TypeError("species evaluation needs a profunctor out of a Sym groupoid")
        self.P, self.X = P, X
        self.XS = xsym_presheaf(P.source, X)
        self.Y = apply_profunctor(P, self.XS)
        self.C = self.Y.composite

    def __len__(self):
        return len(self.Y)

    def element(self, p, tup):
        return self.C.class_of(self.XS.index(tuple(int(x) for x in tup)), int(p))

    def representative(self, e):
        """(p, x̄) with e = [p, x̄]."""
        _, xs, p = self.C.representatives[e]
        return p, self.XS.keys[xs]

    def push(self, other: "Evaluation", h):
        """T(h): T(X) -> T(X′) for a natural map h: X -> X′."""
        h = np.asarray(h, dtype=np.int64)
        out = np.empty(len(self), dtype=np.int64)
        for e, (_, xs, p) in enumerate(self.C.representatives):
            out[e] = other.element(p, h[list(self.XS.keys[xs])])
        return out

    def push_one(self, other, h, e):
        p, t = self.representative(e)
        return other.element(p, np.asarray(h, dtype=np.int64)[list(t)])


def species_eval(P: Profunctor, X: Presheaf, KA: Kit | None = None, KB: Kit | None = None) -> Presheaf:
    """T_P(X); with kits given, P is checked against (!KA, KB) and X against KA first."""
    if KA is not None and KB is not None:
        r = is_stabilized(P, bang_kit(KA, sym=P.source), KB)
        if not r:
            raise NotStabilized("species is not stable for the given kits", witness=r.witness)
        rx = is_stabilized_presheaf(X, KA)
        if not rx:
            raise NotStabilized("argument presheaf is not stabilized", witness=rx.witness)
    return Evaluation(P, X).Y


# ------------------------------------------------------- generic elements

class _ProbeCounter:
    def __init__(self, budget):
        self.left = budget

    def spend(self, k=1):
        self.left -= k
        if self.left < 0:
            raise ProbeBudgetExceeded("genericity probe budget exhausted")


def _free_of(S: SymGroupoid, v):
    return free_presheaf(S.base, S.seqs[v])


def _generic_against(ev: Evaluation, e, B, evB, beta, target, counter):
    """Every α ∈ T(B) with T(β)(α) = target must have exactly one δ: X -> B with βδ = id, T(δ)(e) = α."""
    Tbeta = evB.push(ev, beta)
    alphas = np.nonzero(Tbeta == target)[0]
    if len(alphas) == 0:
        return True
    deltas = []
    for d in hom_presheaves(ev.X, B):
        counter.spend()
        if np.array_equal(compose_maps(beta, d), np.arange(len(ev.X))):
            deltas.append(d)
    for a in alphas:
        hits = sum(1 for d in deltas if ev.push_one(evB, d, e) == a)
        counter.spend(len(deltas))
        if hits != 1:
            return False
    return True


def is_generic(ev: Evaluation, e, probes="canonical", budget=None, cache=None) -> bool:
    """Unique-fill test for the element e of T(X)(b), read as a map y b -> T(X).

    ``probes="canonical"`` tests the factorization through the element's own
    representative (p, x̄): B = ⨿ y(u_i), β = x̄. ``probes="full"`` ranges over
    every B = ⨿ y(v_i) with |v| ≤ L and every β: B -> X.
    """
    counter = _ProbeCounter(PROBE_BUDGET if budget is None else budget)
    S = ev.P.source
    cache = {} if cache is None else cache

    def ev_for(v):
        if v not in cache:
            B = _free_of(S, v)
            cache[v] = (B, Evaluation(ev.P, B))
        return cache[v]

    if probes == "canonical":
        p, t = ev.representative(e)
        v = int(ev.P.cell_a[p])
        B, evB = ev_for(v)
        beta = _tuple_map(B, ev.X, t)
        return _generic_against(ev, e, B, evB, beta, e, counter)
    for v in range(S.n_objects):
        B, evB = ev_for(v)
        for beta in hom_presheaves(B, ev.X):
            counter.spend()
            if not _generic_against(ev, e, B, evB, beta, e, counter):
                return False
    return True


def _tuple_map(B: Presheaf, X: Presheaf, t):
    """The map ⨿ y(a_i) -> X sending the i-th identity to t_i."""
    return np.array([X.act[t[i], g] for (i, g) in B.keys], dtype=np.int64)


def unit_element(ev: Evaluation, u):
    """ι_u ∈ X^Sym(u) for X = ⨿ y(a_i): the tuple of identities."""
    S = ev.P.source
    G = S.base
    return tuple(ev.X.index((i, int(G.ident[a]))) for i, a in enumerate(S.seqs[u]))


def generic_elements(P: Profunctor, probes="canonical"):
    """{(b, u): sorted generic elements of T_P(⨿ y(a_i))(b)} together with the evaluations."""
    S = P.source
    out, evs = {}, {}
    for u in range(S.n_objects):
        X = _free_of(S, u)
        ev = Evaluation(P, X)
        evs[u] = ev
        cache = {}
        for e in range(len(ev)):
            b = int(ev.Y.obj[e])
            if is_generic(ev, e, probes=probes, cache=cache):
                out.setdefault((b, u), []).append(e)
    return out, evs


@dataclass
class TraceReport:
    ok: bool
    sizes: dict = field(default_factory=dict)     # (b, u) -> (|P(b,u)|, |trace(b,u)|)
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def trace_roundtrip(P: Profunctor, probes="canonical") -> TraceReport:
    """p ↦ p ⊗ id is a bijection onto the generic elements, equivariant for both actions."""
    S = P.source
    gens, evs = generic_elements(P, probes)
    sizes = {}
    eta = {}
    for u in range(S.n_objects):
        ev = evs[u]
        iota = unit_element(ev, u)
        for b in range(P.target.n_objects):
            cell = P.cell(b, u)
            img = [ev.element(p, iota) for p in cell]
            g = gens.get((b, u), [])
            sizes[(b, u)] = (len(cell), len(g))
            if len(set(img)) != len(img):
                return TraceReport(False, sizes, ("not injective", b, u))
            if sorted(img) != sorted(g):
                return TraceReport(False, sizes, ("image is not the generic set", b, u))
            for p, e in zip(cell, img):
                eta[int(p)] = (u, e)
    # right action: restriction along y(β)
    for p in range(len(P)):
        u, e = eta[p]
        for beta in np.nonzero(P.right[p] >= 0)[0]:
            if eta[int(P.right[p, beta])] != (u, int(evs[u].Y.act[e, beta])):
                return TraceReport(False, sizes, ("right action", p, int(beta)))
    # left action: post-composition with T(s(α))
    G = S.base
    for alpha in range(S.n_morphisms):
        u, u2 = int(S.src[alpha]), int(S.tgt[alpha])
        ps = P.cell_a == u
        if not ps.any():
            continue
        X, X2 = evs[u].X, evs[u2].X
        sigma, parts = S.perms[alpha], S.parts[alpha]
        h = np.array([X2.index((sigma[i], int(G.comp[parts[i], g]))) for (i, g) in X.keys], dtype=np.int64)
        pushed = evs[u].push(evs[u2], h)
        for p in np.nonzero(ps)[0]:
            if eta[int(P.left[alpha, p])] != (u2, int(pushed[eta[int(p)][1]])):
                return TraceReport(False, sizes, ("left action", int(p), alpha))
    return TraceReport(True, sizes)


# ------------------------------------------------------------ linear trace

def linear_trace(P: Profunctor, KA: Kit | None = None, KB: Kit | None = None):
    """(L, η) with L(b, a) = P#(y a)(b) and η(p) = [id_a, p]."""
    if KA is not None and KB is not None:
        r = is_stabilized(P, KA, KB)
        if not r:
            raise NotStabilized("profunctor is not stabilized", witness=r.witness)
    A, B = P.source, P.target
    ys = [representable(A, a) for a in range(A.n_objects)]
    apps = [apply_profunctor(P, y) for y in ys]
    cells = {}
    for a, Y in enumerate(apps):
        for e in range(len(Y)):
            cells.setdefault((int(Y.obj[e]), a), []).append((a, e))
    # y(α): y a -> y a′ is post-composition
    pushes = {}
    for alpha in range(A.n_morphisms):
        a, a2 = int(A.src[alpha]), int(A.tgt[alpha])
        h = np.array([ys[a2].index(int(A.comp[alpha, g])) for g in ys[a].keys], dtype=np.int64)
        pushes[alpha] = push_map(apps[a], apps[a2], h)
    Lt = Profunctor.from_keys(
        A, B, cells,
        lambda alpha, k: (int(A.tgt[alpha]), int(pushes[alpha][k[1]])),
        lambda k, beta: (k[0], int(apps[k[0]].act[k[1], beta])),
        lambda k: apps[k[0]].names[k[1]])
    eta = np.array([Lt.index((int(P.cell_a[p]), apps[P.cell_a[p]].composite.class_of(
        ys[P.cell_a[p]].index(int(A.ident[P.cell_a[p]])), p))) for p in range(len(P))], dtype=np.int64)
    return Lt, eta


def linear_roundtrip(P: Profunctor, KA: Kit | None = None, KB: Kit | None = None):
    Lt, eta = linear_trace(P, KA, KB)
    return is_equivariant_bijection(P, Lt, eta), Lt, eta


def linear_species_view(P: Profunctor, L: int):
    """P ∘ der as a species: sizes by (b, u); non-zero only at length-1 sequences."""
    D = dereliction(P.source, L)
    Q = compose(D, P)
    S = D.source
    return {(b, u): len(Q.cell(b, u)) for b in range(P.target.n_objects) for u in range(S.n_objects)}, S


# ------------------------------------------------------------ cartesian

@dataclass
class CartesianReport:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def induced_component(P, Q, f, evP: Evaluation, evQ: Evaluation):
    """[p, x̄] ↦ [f(p), x̄]."""
    out = np.empty(len(evP), dtype=np.int64)
    for e in range(len(evP)):
        p, t = evP.representative(e)
        out[e] = evQ.element(f[p], t)
    return out


def is_cartesian(P: Profunctor, Q: Profunctor, f, test_maps) -> CartesianReport:
    """Every naturality square of the induced T_P -> T_Q over the test maps (X, Y, h) is a pullback."""
    f = np.asarray(f, dtype=np.int64)
    if not is_equivariant(P, Q, f):
        return CartesianReport(False, ("not equivariant",))
    for k, (X, Y, h) in enumerate(test_maps):
        ePX, ePY, eQX, eQY = Evaluation(P, X), Evaluation(P, Y), Evaluation(Q, X), Evaluation(Q, Y)
        top = ePX.push(ePY, h)
        left = induced_component(P, Q, f, ePX, eQX)
        right = induced_component(P, Q, f, ePY, eQY)
        bottom = eQX.push(eQY, h)
        for b in range(P.target.n_objects):
            xs = np.nonzero(ePX.Y.obj == b)[0]
            pairs = {(int(top[e]), int(left[e])) for e in xs}
            expected = sum(1 for y in np.nonzero(ePY.Y.obj == b)[0]
                           for x in np.nonzero(eQX.Y.obj == b)[0] if right[y] == bottom[x])
            if len(pairs) != len(xs) or len(pairs) != expected:
                return CartesianReport(False, (k, b, len(xs), expected))
    return CartesianReport(True)


# ------------------------------------------------------------ parallel or

BOOL = discrete(["f", "t"])


def free_species(S: SymGroupoid, B: Groupoid, generators) -> Profunctor:
    """Species freely generated by one structure at each (b, u0) in ``generators`` (B discrete)."""
    if not B.is_discrete():
        raise ValueError("free_species expects a discrete target")
    cells = {}
    for g, (b, u0) in enumerate(generators):
        for m in range(S.n_morphisms):
            if S.src[m] == u0:
                cells.setdefault((b, int(S.tgt[m])), []).append((g, m))
    return Profunctor.from_keys(S, B, cells, lambda alpha, k: (k[0], int(S.comp[alpha, k[1]])),
                                lambda k, beta: k, lambda k: f"g{k[0]}{S.names[k[1]]}")


def parallel_or_fixture(L: int = 2):
    """The species on Bool & Bool ⇸ Bool presenting (X, Y) ↦ (X_f × Y_f, X_t + Y_t)."""
    A = coproduct_groupoid(BOOL, BOOL)
    S = build_sym(A, L)
    obj = {lab: i for i, lab in enumerate(A.obj_labels)}
    f1, t1, f2, t2 = obj[(1, "f")], obj[(1, "t")], obj[(2, "f")], obj[(2, "t")]
    gens = [(0, S.obj_id((f1, f2))), (1, S.obj_id((t1,))), (1, S.obj_id((t2,)))]
    return free_species(S, BOOL, gens)


def parallel_or_sizes(P: Profunctor, sizes):
    """Evaluate on X, Y with sizes (X_f, X_t, Y_f, Y_t); returns (out_f, out_t)."""
    from .presheaf import set_presheaf
    A = P.source.base
    X = set_presheaf(A, list(sizes))
    Y = Evaluation(P, X).Y
    return Y.size(0), Y.size(1)


def parallel_or_kits(L: int = 2):
    P = parallel_or_fixture(L)
    A = P.source.base
    return P, canonical_kit(A, "trivial"), canonical_kit(BOOL, "trivial")


__all__ = ["SetSpecies", "analytic_eval_set", "is_free_species", "is_K_species", "polynomial_coefficients",
           "xsym_presheaf", "Evaluation", "species_eval", "is_generic", "generic_elements", "trace_roundtrip",
           "linear_trace", "linear_roundtrip", "linear_species_view", "is_cartesian", "free_species",
           "parallel_or_fixture", "parallel_or_sizes", "parallel_or_kits", "derivative", "BOOL"]
