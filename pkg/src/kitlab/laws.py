"""Law runner: every algebraic invariant of the library as a named, seeded, budgeted check."""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BudgetExceeded, GroupTooLarge, KitlabError
from .fixtures import SET_SPECIES, fixture
from .groupoid import Subgroup, group_cap
from .kits import (canonical_kit, double_orth, enumerate_boolean_kits, enumerate_kits, is_boolean,
                   saturation_conditions, limp_kit, orthogonal_kit, par_kit, plus_kit, relabel_kit,
                   swap_map, tensor_kit, with_kit, product_groupoid)
from .presheaf import (cokernel_pair, coproduct, decompose, hom_presheaves, is_natural,
                       is_stabilized_presheaf, presheaf_orthogonal, preserves_stabilized,
                       quot_representable, representable, terminal_presheaf, apply_profunctor)
from .profunctor import (compose, find_iso, identity_profunctor, is_stabilized, naive_coend_classes,
                         random_profunctor)
from .species import (SetSpecies, analytic_eval_set, derivative, is_cartesian, is_free_species,
                      linear_roundtrip, linear_species_view, parallel_or_kits, parallel_or_sizes,
                      species_eval, trace_roundtrip)
from .presheaf import set_presheaf
from .sym import (bang_kit, build_sym, build_sym_sym, coderiction, cycle_order, dereliction, digging,
                  flatten, loop_endomorphism, seely_inclusions, seely_merge, seely_split)

SUITES = ("kits", "connectives", "exponential", "profunctors", "presheaves", "species")


@dataclass
class Check:
    ok: bool = True
    witness: object = None
    instances: int = 0

    def expect(self, cond, witness):
        self.instances += 1
        if not cond and self.ok:
            self.ok = False
            self.witness = witness
        return cond


@dataclass
class LawResult:
    name: str
    suite: str
    tag: str
    fixtures: str
    status: str                 # pass | fail | budget | error
    instances: int = 0
    witness: str | None = None
    seconds: float = 0.0


@dataclass
class LawReport:
    seed: int
    budget: int
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.status in ("pass", "budget") for r in self.results)

    @property
    def any_budget(self):
        return any(r.status == "budget" for r in self.results)

    def to_dict(self, times=True):
        rows = []
        for r in self.results:
            d = asdict(r)
            if not times:
                d.pop("seconds")
            rows.append(d)
        return {"seed": self.seed, "budget": self.budget, "ok": self.ok, "laws": rows}

    def table(self):
        w = max([len(r.name) for r in self.results] + [4])
        lines = [f"{'law':<{w}}  {'suite':<12} {'status':<7} {'n':>6} {'time':>8}  witness"]
        for r in self.results:
            lines.append(f"{r.name:<{w}}  {r.suite:<12} {r.status:<7} {r.instances:>6} "
                         f"{r.seconds:>7.2f}s  {r.witness or ''}")
        passed = sum(r.status == "pass" for r in self.results)
        lines.append(f"{passed}/{len(self.results)} passed (seed {self.seed}, budget {self.budget})")
        return "\n".join(lines)


class Context:
    def __init__(self, seed=0, budget=3):
        self.seed = seed
        self.L = budget

    def rng(self, name):
        return random.Random(f"{self.seed}:{name}")

    def need_length(self, n):
        if self.L < n:
            raise BudgetExceeded(f"law needs sequences of length {n}, budget is {self.L}")


LAWS = {}


def law(suite, tag, fixtures):
    def deco(fn):
        LAWS[fn.__name__] = (suite, tag, fixtures, fn)
        return fn
    return deco


# ------------------------------------------------------------ shared data

def bundled_groupoids():
    return [fixture(n) for n in ("One", "C2", "C3", "C6", "Iso2", "BoolD", "S3")]


def small_groupoids(limit=12):
    return [G for G in bundled_groupoids()
            if all(len(G.endo(a)) <= limit for a in range(G.n_objects))]


def c6_kits():
    return enumerate_boolean_kits(fixture("C6"))


def expected_c6_census():
    C6 = fixture("C6")
    triv = Subgroup(0, frozenset([0]))
    g2 = Subgroup(0, frozenset([0, 2, 4]))
    g3 = Subgroup(0, frozenset([0, 3]))
    full = Subgroup(0, frozenset(range(6)))
    fams = [{triv}, {triv, g3}, {triv, g2}, {triv, g2, g3, full}]
    return C6, [frozenset(f) for f in fams]


# ------------------------------------------------------------------ kits

@law("kits", "boolean-census", "C6")
def census_c6(ctx):
    c = Check()
    C6, expected = expected_c6_census()
    got = [K.family[0] for K in enumerate_boolean_kits(C6)]
    c.expect(sorted(map(sorted_key, got)) == sorted(map(sorted_key, expected)),
             f"found {len(got)} kits")
    return c


def sorted_key(fam):
    return sorted(H.key() for H in fam)


@law("kits", "galois-extensive", "bundled, |End| ≤ 12")
def galois_extensive(ctx):
    c = Check()
    for G in small_groupoids():
        for K in enumerate_kits(G):
            dd = double_orth(K)
            c.expect(K.issubset(dd), (G.objects, sorted_key(K.family[0])))
    return c


@law("kits", "galois-antitone", "bundled, |End| ≤ 12")
def galois_antitone(ctx):
    c = Check()
    for G in small_groupoids():
        kits = enumerate_kits(G)
        orths = [orthogonal_kit(K) for K in kits]
        for (K1, O1), (K2, O2) in itertools.product(zip(kits, orths), repeat=2):
            if K1.issubset(K2):
                c.expect(all(O2.family[a] <= O1.family[a] for a in O1.family), (G.objects,))
    return c


@law("kits", "galois-triple", "bundled, |End| ≤ 12")
def galois_triple(ctx):
    c = Check()
    for G in small_groupoids():
        for K in enumerate_kits(G):
            o = orthogonal_kit(K)
            c.expect(orthogonal_kit(orthogonal_kit(o)).family == o.family, (G.objects,))
    return c


@law("kits", "boolean-subgroup-closure", "bundled, |End| ≤ 12")
def boolean_subgroup_closure(ctx):
    """Boolean kits are down-closed and closed under unions of directed subfamilies."""
    c = Check()
    for G in small_groupoids():
        for K in enumerate_kits(G):
            if not is_boolean(K):
                continue
            for a in range(G.n_objects):
                lat = G.lattice(a)
                fam = sorted(K.family[a], key=Subgroup.key)
                for H in fam:
                    for S in lat.subgroups:
                        if S.elements <= H.elements:
                            c.expect(S in K.family[a], (G.objects, a, H, S))
                for r in range(1, len(fam) + 1):
                    for D in itertools.combinations(fam, r):
                        directed = all(any(x.elements | y.elements <= z.elements for z in D)
                                       for x in D for y in D)
                        if directed:
                            u = frozenset().union(*[H.elements for H in D])
                            c.expect(Subgroup(a, u) in K.family[a], (G.objects, a, D))
    return c


@law("kits", "boolean-two-conditions", "bundled, |End| ≤ 12")
def boolean_two_conditions(ctx):
    """K = K^⊥⊥ exactly when K is down-closed and saturated."""
    c = Check()
    for G in small_groupoids():
        for K in enumerate_kits(G):
            dd = double_orth(K).family == K.family
            c.expect(dd == bool(saturation_conditions(K)), (G.objects, sorted_key(K.family[0])))
    return c


# ------------------------------------------------------------ connectives

def _triples():
    kits = c6_kits()
    return kits, list(itertools.product(range(len(kits)), repeat=3))


@law("connectives", "tensor-symmetry", "C6 Boolean kits")
def tensor_symmetry(ctx):
    c = Check()
    kits = c6_kits()
    G = kits[0].base
    P = product_groupoid(G, G)
    sw = swap_map(G, G)
    n = G.n_objects
    obj = np.array([(a % n) * n + a // n for a in range(n * n)])
    for i, j in itertools.product(range(len(kits)), repeat=2):
        AB = tensor_kit(kits[i], kits[j])
        BA = tensor_kit(kits[j], kits[i])
        c.expect(relabel_kit(AB, P, sw, obj).family == BA.family, (i, j))
    return c


@law("connectives", "tensor-associativity", "C6 Boolean kit triples")
def tensor_associativity(ctx):
    """((A⊗B)⊗C) and (A⊗(B⊗C)) agree under the reassociation, which is the identity on ids."""
    c = Check()
    kits, triples = _triples()
    with group_cap(216):
        for i, j, k in triples:
            left = tensor_kit(tensor_kit(kits[i], kits[j]), kits[k])
            right = tensor_kit(kits[i], tensor_kit(kits[j], kits[k]))
            c.expect(left.family == right.family, (i, j, k))
    return c


@law("connectives", "limp-boolean", "C6 Boolean kit pairs")
def limp_boolean(ctx):
    c = Check()
    kits = c6_kits()
    for i, j in itertools.product(range(len(kits)), repeat=2):
        c.expect(bool(is_boolean(limp_kit(kits[i], kits[j]))), (i, j))
    return c


@law("connectives", "limp-duality", "C6 Boolean kit pairs")
def limp_duality(ctx):
    """A ⊸ B = (A ⊗ B^⊥)^⊥."""
    c = Check()
    kits = c6_kits()
    for i, j in itertools.product(range(len(kits)), repeat=2):
        A, B = kits[i], kits[j]
        lhs = limp_kit(A, B)
        rhs = orthogonal_kit(tensor_kit(A, orthogonal_kit(B)))
        c.expect(lhs.base == rhs.base and lhs.family == rhs.family, (i, j))
    return c


@law("connectives", "mix", "C6 Boolean kit pairs")
def mix_inclusion(ctx):
    """⅋ ⊆ ⊗ componentwise."""
    c = Check()
    kits = c6_kits()
    for i, j in itertools.product(range(len(kits)), repeat=2):
        par, ten = par_kit(kits[i], kits[j]), tensor_kit(kits[i], kits[j])
        extra = sorted(sorted(H.elements) for H in par.family[0] - ten.family[0])
        c.expect(not extra, (str(kits[i]), str(kits[j]), "in par, not tensor:", extra[:1]))
    return c


@law("connectives", "mix-reverse", "C6 Boolean kit pairs")
def mix_reverse(ctx):
    """The opposite inclusion ⊗ ⊆ ⅋, which is the direction the mix rule needs."""
    c = Check()
    kits = c6_kits()
    for i, j in itertools.product(range(len(kits)), repeat=2):
        c.expect(tensor_kit(kits[i], kits[j]).issubset(par_kit(kits[i], kits[j])), (i, j))
    return c


@law("connectives", "biproduct", "C6 Boolean kit pairs and triples")
def biproduct(ctx):
    c = Check()
    kits, triples = _triples()
    for i, j in itertools.product(range(len(kits)), repeat=2):
        c.expect(with_kit(kits[i], kits[j]).family == plus_kit(kits[i], kits[j]).family, (i, j))
    for i, j, k in triples:
        c.expect(with_kit(kits[i], kits[j], kits[k]).family == plus_kit(kits[i], kits[j], kits[k]).family,
                 (i, j, k))
    return c


# ------------------------------------------------------------ exponential

def exp_kits():
    """Boolean kits whose Sym lattices stay within the cap at length 3."""
    out = []
    for name in ("One", "C2", "BoolD", "Iso2"):
        G = fixture(name)
        for K in enumerate_boolean_kits(G):
            out.append((name, K))
    return out


@law("exponential", "sym-groupoid", "One, C2, BoolD, Iso2")
def sym_is_groupoid(ctx):
    from .groupoid import check_groupoid
    ctx.need_length(1)
    c = Check()
    for name in ("One", "C2", "BoolD", "Iso2"):
        G = fixture(name)
        S = build_sym(G, ctx.L)
        check_groupoid(S)
        for a in range(G.n_objects):
            u = S.singleton(a)
            c.expect(len(S.endo(u)) == len(G.endo(a)), (name, a))
        c.expect(True, name)
    return c


@law("exponential", "loop-conjugation", "Sym(C2)")
def loop_conjugation(ctx):
    """⟨φ⁻¹αφ⟩_i is the conjugate of ⟨α⟩_φ(i) along the component of φ at i."""
    ctx.need_length(1)
    c = Check()
    S = build_sym(fixture("C2"), ctx.L)
    B = S.base
    for u in range(S.n_objects):
        ends = [int(m) for m in S.endo(u)]
        for alpha in ends:
            for phi in ends:
                conj = int(S.comp[S.inv[phi], S.comp[alpha, phi]])
                for i in range(S.length(u)):
                    j = S.perms[phi][i]
                    c.expect(cycle_order(S.perms[conj], i) == cycle_order(S.perms[alpha], j), (u, alpha, phi, i))
                    f = S.parts[phi][i]
                    want = int(B.comp[B.inv[f], B.comp[loop_endomorphism(S, alpha, j), f]])
                    c.expect(loop_endomorphism(S, conj, i) == want, (u, alpha, phi, i))
    return c


@law("exponential", "bang-boolean", "One, C2, BoolD, Iso2 kits")
def bang_boolean(ctx):
    ctx.need_length(1)
    c = Check()
    for name, K in exp_kits():
        c.expect(bool(is_boolean(bang_kit(K, ctx.L))), name)
    return c


@law("exponential", "bang-singletons", "One, C2, BoolD, Iso2 kits")
def bang_singletons(ctx):
    ctx.need_length(1)
    c = Check()
    for name, K in exp_kits():
        bk = bang_kit(K, ctx.L)
        S = bk.base
        for a in range(K.base.n_objects):
            u = S.singleton(a)
            image = {Subgroup(u, frozenset(S.singleton_mor(m) for m in H.elements)) for H in K.family[a]}
            c.expect(image == set(bk.family[u]), (name, a))
    return c


@law("exponential", "structural-stabilized", "C2 and Iso2 kits")
def structural_stabilized(ctx):
    """der: !A ⇸ A, dig: !A ⇸ !!A and coder: A ⇸ !A are stabilized."""
    ctx.need_length(1)
    c = Check()
    for name, K in exp_kits():
        if name not in ("C2", "Iso2", "One"):
            continue
        S = build_sym(K.base, ctx.L)
        bk = bang_kit(K, sym=S)
        c.expect(bool(is_stabilized(dereliction(K, ctx.L), bk, K)), (name, "der"))
        c.expect(bool(is_stabilized(coderiction(K, ctx.L), K, bk)), (name, "coder"))
        if name == "Iso2":
            continue   # Sym Sym Iso2 at length 3 exceeds the default morphism budget
        S_, SS = build_sym_sym(K.base, ctx.L)
        bbk = bang_kit(bk, sym=SS)
        c.expect(bool(is_stabilized(digging(K, ctx.L), bk, bbk)), (name, "dig"))
    return c


@law("exponential", "flatten", "Sym(Sym(C2))")
def flatten_laws(ctx):
    """β ↦ β̄ is a homomorphism, respects loops and transfers membership between !!K and !K."""
    ctx.need_length(1)
    c = Check()
    C2 = fixture("C2")
    S, SS = build_sym_sym(C2, ctx.L)
    for K in enumerate_boolean_kits(C2):
        bk = bang_kit(K, sym=S)
        bbk = bang_kit(bk, sym=SS)
        for U in range(SS.n_objects):
            fu = S.concat(*SS.seqs[U]) if SS.seqs[U] else S.obj_id(())
            ends = [int(m) for m in SS.endo(U)]
            flat = {b: flatten(SS, b) for b in ends}
            lens = [S.length(x) for x in SS.seqs[U]]
            off = np.concatenate([[0], np.cumsum(lens)]).astype(int)
            for b in ends:
                c.expect((b in bbk.union(U)) == (flat[b] in bk.union(fu)), (U, b))
                for i, inner in enumerate(SS.seqs[U]):
                    lb = loop_endomorphism(SS, b, i)
                    for j in range(S.length(inner)):
                        c.expect(loop_endomorphism(S, flat[b], off[i] + j) == loop_endomorphism(S, lb, j),
                                 (U, b, i, j))
            for b1, b2 in itertools.product(ends, repeat=2):
                c.expect(flat[int(SS.comp[b1, b2])] == int(S.comp[flat[b1], flat[b2]]), (U, b1, b2))
    return c


@law("exponential", "seely", "C2 & One, C2 & C2, BoolD & One")
def seely(ctx):
    ctx.need_length(1)
    c = Check()
    pairs = [("C2", "One"), ("C2", "C2"), ("BoolD", "One")]
    for n1, n2 in pairs:
        for K1 in enumerate_boolean_kits(fixture(n1)):
            for K2 in enumerate_boolean_kits(fixture(n2)):
                fails = seely_inclusions(K1, K2, ctx.L)
                c.expect(not fails, (n1, n2, fails[:1]))
        # split ∘ merge is the identity, merge ∘ split is an isomorphism
        A, B = fixture(n1), fixture(n2)
        SA, SB = build_sym(A, ctx.L), build_sym(B, ctx.L)
        W = with_kit(canonical_kit(A, "trivial"), canonical_kit(B, "trivial")).base
        SW = build_sym(W, ctx.L)
        for u in range(SA.n_objects):
            for v in range(SB.n_objects):
                if SA.length(u) + SB.length(v) > ctx.L:
                    continue
                w = seely_merge(SA.seqs[u], SB.seqs[v], A.n_objects)
                c.expect(seely_split(SW, w, A.n_objects) == (SA.seqs[u], SB.seqs[v]), (u, v))
        for w in range(SW.n_objects):
            s1, s2 = seely_split(SW, w, A.n_objects)
            back = SW.obj_id(seely_merge(s1, s2, A.n_objects))
            c.expect(len(SW.hom(w, back)) > 0, w)
    return c


# ------------------------------------------------------------ profunctors

RANDOM_BASES = ("One", "C2", "C3", "Iso2", "BoolD")


def random_batch(ctx, n=100, name="coend"):
    rng = ctx.rng(name)
    out = []
    for _ in range(n):
        A, B, C = (fixture(rng.choice(RANDOM_BASES)) for _ in range(3))
        P = random_profunctor(A, B, rng, max_cell=8)
        Q = random_profunctor(B, C, rng, max_cell=8)
        out.append((A, B, C, P, Q))
    return out


@law("profunctors", "coend-oracle", "100 seeded random pairs")
def coend_oracle(ctx):
    c = Check()
    for idx, (A, B, C, P, Q) in enumerate(random_batch(ctx)):
        R = compose(P, Q)
        oracle = naive_coend_classes(P, Q)
        ours = {}
        for pair in range(R.index_pairs.n_pairs):
            _, p, q = R.index_pairs.unpack(pair)
            ours.setdefault(int(R.pair_class[pair]), set()).add((p, q))
        c.expect(len(R) == len(oracle) and {frozenset(s) for s in ours.values()} == oracle, idx)
    return c


@law("profunctors", "stabilized-composition", "100 seeded random pairs")
def stabilized_composition(ctx):
    """For every Boolean kit triple making P and Q stabilized, Q∘P is stabilized."""
    c = Check()
    kits = {}
    for idx, (A, B, C, P, Q) in enumerate(random_batch(ctx)):
        for G in (A, B, C):
            if id(G) not in kits:
                kits[id(G)] = enumerate_boolean_kits(G)
        R = compose(P, Q)
        for KA in kits[id(A)]:
            for KB in kits[id(B)]:
                if not is_stabilized(P, KA, KB):
                    continue
                for KC in kits[id(C)]:
                    if is_stabilized(Q, KB, KC):
                        c.expect(bool(is_stabilized(R, KA, KC)), idx)
    return c


@law("profunctors", "unit-associativity", "seeded random triples")
def unit_associativity(ctx):
    c = Check()
    rng = ctx.rng("assoc")
    for idx in range(30):
        A, B, C, D = (fixture(rng.choice(RANDOM_BASES)) for _ in range(4))
        P = random_profunctor(A, B, rng, max_cell=6)
        Q = random_profunctor(B, C, rng, max_cell=6)
        R = random_profunctor(C, D, rng, max_cell=6)
        c.expect(find_iso(compose(identity_profunctor(A), P), P) is not None, (idx, "left unit"))
        c.expect(find_iso(compose(P, identity_profunctor(B)), P) is not None, (idx, "right unit"))
        c.expect(find_iso(compose(compose(P, Q), R), compose(P, compose(Q, R))) is not None, (idx, "assoc"))
    return c


# ------------------------------------------------------------ presheaves

def presheaf_fixtures():
    C6, S3, Iso2 = fixture("C6"), fixture("S3"), fixture("Iso2")
    out = [("C6_q2", fixture("C6_q2")), ("C6_q3", fixture("C6_q3")),
           ("C6_q2+q3", coproduct(fixture("C6_q2"), fixture("C6_q3"))),
           ("C6_y", representable(C6, 0)), ("C6_1", terminal_presheaf(C6)),
           ("Iso2_y", representable(Iso2, 0)), ("Iso2_1", terminal_presheaf(Iso2))]
    for H in S3.lattice(0).subgroups:
        out.append((f"S3_q{len(H)}", quot_representable(S3, 0, H)))
    return out


def all_kits_for(G):
    return enumerate_boolean_kits(G)


@law("presheaves", "decomposition-roundtrip", "stabilized presheaf fixtures")
def decomposition_roundtrip(ctx):
    c = Check()
    for name, X in presheaf_fixtures():
        for K in all_kits_for(X.base):
            if not is_stabilized_presheaf(X, K):
                continue
            D = decompose(X, K)
            Y, iso = D.reconstruct()
            c.expect(is_natural(Y, X, iso) and sorted(iso.tolist()) == list(range(len(X))), name)
            c.expect(all(H in K.family[a] for a, H in D.summands), name)
    return c


@law("presheaves", "terminal-criterion", "C6 Boolean kits")
def terminal_criterion(ctx):
    c = Check()
    C6 = fixture("C6")
    full = Subgroup(0, frozenset(range(6)))
    for K in c6_kits():
        c.expect(bool(is_stabilized_presheaf(terminal_presheaf(C6), K)) == (full in K.family[0]), K)
    return c


@law("presheaves", "orthogonality-transfer", "C6 Boolean kits")
def orthogonality_transfer(ctx):
    c = Check()
    C6 = fixture("C6")
    op = C6.opposite()
    subs = C6.lattice(0).subgroups
    for K in c6_kits():
        Ko = orthogonal_kit(K)
        gens = [quot_representable(C6, 0, G) for G in K.family[0]]
        for G in K.family[0]:
            for H in Ko.family[0]:
                c.expect(bool(presheaf_orthogonal(quot_representable(C6, 0, G), quot_representable(op, 0, H))),
                         (K, G, H))
        for H in subs:
            Y = quot_representable(op, 0, H)
            orth_all = all(presheaf_orthogonal(X, Y) for X in gens)
            c.expect(orth_all == bool(is_stabilized_presheaf(Y, Ko.on(op))), (K, H))
    return c


def _sample_profunctors(ctx):
    rng = ctx.rng("apply")
    out = [("C6_hom", fixture("C6_hom")), ("C2_fixed_biset", fixture("C2_fixed_biset"))]
    for i in range(12):
        A, B = (fixture(rng.choice(("C2", "C3", "C6", "Iso2"))) for _ in range(2))
        out.append((f"random{i}", random_profunctor(A, B, rng, max_cell=6)))
    return out


@law("presheaves", "apply-preserves", "fixture and seeded profunctors")
def apply_preserves(ctx):
    """P is stabilized exactly when P# and its dual preserve stabilized presheaves (probe ŷ⟨a⟩⟨α⟩)."""
    c = Check()
    for name, P in _sample_profunctors(ctx):
        for KA in all_kits_for(P.source):
            for KB in all_kits_for(P.target):
                st = bool(is_stabilized(P, KA, KB))
                ok, w = preserves_stabilized(P, KA, KB)
                c.expect(st == ok, (name, w))
    return c


@law("presheaves", "apply-output-stabilized", "fixture and seeded profunctors")
def apply_output_stabilized(ctx):
    c = Check()
    for name, P in _sample_profunctors(ctx):
        A = P.source
        for KA in all_kits_for(A):
            for KB in all_kits_for(P.target):
                if not is_stabilized(P, KA, KB):
                    continue
                for a in range(A.n_objects):
                    for H in sorted(KA.family[a], key=Subgroup.key):
                        Y = apply_profunctor(P, quot_representable(A, a, H), KA, KB)
                        c.expect(bool(is_stabilized_presheaf(Y, KB)), (name, a, H))
    return c


@law("presheaves", "closure", "C6 fixtures")
def stpsh_closure(ctx):
    """Coproducts, sources of maps into stabilized presheaves, and epis = surjections."""
    c = Check()
    C6 = fixture("C6")
    fx = [X for name, X in presheaf_fixtures() if name.startswith("C6")]
    for K in c6_kits():
        st = [X for X in fx if is_stabilized_presheaf(X, K)]
        for X, Y in itertools.product(st, repeat=2):
            c.expect(bool(is_stabilized_presheaf(coproduct(X, Y), K)), "coproduct")
        for Y in st:
            for X in fx:
                for f in hom_presheaves(X, Y):
                    c.expect(bool(is_stabilized_presheaf(X, K)), "source of map")
                    surj = len(set(f.tolist())) == len(Y)
                    Z, g, h = cokernel_pair(X, Y, f)
                    c.expect(bool(is_stabilized_presheaf(Z, K)), "cokernel pair stabilized")
                    c.expect(surj == bool(np.array_equal(g, h)), "epi iff surjective")
    del C6
    return c


# ------------------------------------------------------------ species

def set_species():
    return {n: SetSpecies.from_species(fixture(n)) for n in SET_SPECIES}


@law("species", "analytic-values", "F(2) trivial and free, |X| = 3")
def analytic_values(ctx):
    c = Check()
    c.expect(analytic_eval_set(SetSpecies.from_orbits(2, [(2, [(1, 0)])]), 3)["total"] == 6, "trivial")
    c.expect(analytic_eval_set(SetSpecies.from_orbits(2, [(2, [])]), 3)["total"] == 9, "free")
    return c


@law("species", "free-iff-polynomial", "bundled set species, |X| ≤ 4")
def free_iff_polynomial(ctx):
    """F is free exactly when |F(X)| = Σ |F(n)|/n! · |X|^n for every finite X."""
    c = Check()
    for name, F in set_species().items():
        poly = all(analytic_eval_set(F, k)["per_n"][n] * math.factorial(n) == F.size(n) * k ** n
                   for k in range(5) for n in range(F.L + 1))
        c.expect(poly == is_free_species(F), name)
    return c


@law("species", "eval-parity", "bundled set species, |X| ≤ 4")
def eval_parity(ctx):
    from .groupoid import ONE
    c = Check()
    for name, F in set_species().items():
        P = fixture(name)
        for k in range(5):
            c.expect(len(species_eval(P, set_presheaf(ONE, [k]))) == analytic_eval_set(F, k)["total"], (name, k))
    return c


def stable_species(ctx):
    ctx.need_length(1)
    from .groupoid import ONE
    out = []
    triv = canonical_kit(ONE, "trivial")
    for name in SET_SPECIES:
        P = fixture(name)
        if is_stabilized(P, bang_kit(triv, sym=P.source), triv):
            out.append((name, P))
    out.append(("por", fixture("por")))
    L = min(ctx.L, 2)
    out.append(("der_C2", dereliction(fixture("C2"), L)))
    return out


@law("species", "trace-roundtrip", "stable fixture species")
def trace_roundtrips(ctx):
    c = Check()
    for name, P in stable_species(ctx):
        r = trace_roundtrip(P)
        c.expect(r.ok, (name, r.witness))
    return c


@law("species", "derivative-sizes", "bundled set species")
def derivative_sizes(ctx):
    """|DF(u, ∗)| = |F(u ⊗ ⟨∗⟩)|."""
    c = Check()
    for name in SET_SPECIES:
        P = fixture(name)
        D = derivative(P)
        F = SetSpecies.from_species(P)
        S1 = build_sym(P.source.base, F.L - 1)
        for n in range(F.L):
            c.expect(len(D.cell(0, S1.obj_id((0,) * n))) == F.size(n + 1), (name, n))
    return c


@law("species", "linear-roundtrip", "stabilized fixture profunctors")
def linear_roundtrips(ctx):
    c = Check()
    for name, P in _sample_profunctors(ctx):
        kits_ok = any(is_stabilized(P, KA, KB) for KA in all_kits_for(P.source) for KB in all_kits_for(P.target))
        if not kits_ok:
            continue
        ok, Lt, eta = linear_roundtrip(P)
        c.expect(ok, name)
        ctx.need_length(1)
        sizes, S = linear_species_view(P, ctx.L)
        for (b, u), n in sizes.items():
            want = len(P.cell(b, S.seqs[u][0])) if S.length(u) == 1 else 0
            c.expect(n == want, (name, b, u))
    return c


@law("species", "stable-iff-free", "bundled set species over (One, trivial)")
def stable_iff_free(ctx):
    from .groupoid import ONE
    c = Check()
    triv = canonical_kit(ONE, "trivial")
    for name, F in set_species().items():
        P = fixture(name)
        st = bool(is_stabilized(P, bang_kit(triv, sym=P.source), triv))
        c.expect(st == is_free_species(F), name)
    return c


@law("species", "parallel-or", "por, sizes ≤ 4")
def parallel_or(ctx):
    ctx.need_length(2)
    c = Check()
    P, KA, KB = parallel_or_kits(2)
    c.expect(bool(is_stabilized(P, bang_kit(KA, sym=P.source), KB)), "stability")
    for xf, xt, yf, yt in itertools.product(range(5), repeat=4):
        c.expect(parallel_or_sizes(P, (xf, xt, yf, yt)) == (xf * yf, xt + yt), (xf, xt, yf, yt))
    return c


@law("species", "cartesian", "set species over One")
def cartesian(ctx):
    from .groupoid import ONE
    c = Check()
    free2 = fixture("freeS2")
    pts = fixture("pairs")
    maps = []
    for k1, k2 in itertools.product(range(4), repeat=2):
        X, Y = set_presheaf(ONE, [k1]), set_presheaf(ONE, [k2])
        for f in itertools.islice(hom_presheaves(X, Y), 6):
            maps.append((X, Y, f))
    for name in ("freeS2", "freeF"):
        P = fixture(name)
        c.expect(bool(is_cartesian(P, P, np.arange(len(P)), maps)), name)
    # a free-to-free equivariant map (swap the two regular copies at n = 3)
    F = fixture("freeF")
    swap = _swap_copies(F)
    c.expect(bool(is_cartesian(F, F, swap, maps)), "swap copies")
    collapse = np.zeros(len(free2), dtype=np.int64)
    c.expect(not is_cartesian(free2, pts, collapse, maps), "collapse must fail")
    return c


def _swap_copies(P):
    """Exchange the two free S_3-orbits of freeF."""
    f = np.arange(len(P))
    lab = P.orbits()
    S = P.source
    u3 = S.obj_id((0, 0, 0))
    cell = list(P.cell(0, u3))
    reps = sorted(set(int(lab[p]) for p in cell))
    if len(reps) == 2:
        r0, r1 = reps
        for alpha in range(S.n_morphisms):
            if S.src[alpha] == u3:
                f[P.left[alpha, r0]] = P.left[alpha, r1]
                f[P.left[alpha, r1]] = P.left[alpha, r0]
    return f


# ------------------------------------------------------------------ runner

def run_laws(suite="all", seed=0, budget=3, names=None) -> LawReport:
    ctx = Context(seed, budget)
    report = LawReport(seed, budget)
    for name, (s, tag, fixtures, fn) in LAWS.items():
        if suite != "all" and s != suite:
            continue
        if names and name not in names:
            continue
        t0 = time.perf_counter()
        try:
            c = fn(ctx)
            status = "pass" if c.ok else "fail"
            res = LawResult(name, s, tag, fixtures, status, c.instances,
                            None if c.ok else repr(c.witness))
        except (BudgetExceeded, GroupTooLarge) as exc:
            res = LawResult(name, s, tag, fixtures, "budget", 0, f"{type(exc).__name__}: {exc}")
        except KitlabError as exc:
            res = LawResult(name, s, tag, fixtures, "error", 0, f"{type(exc).__name__}: {exc}")
        res.seconds = round(time.perf_counter() - t0, 3)
        report.results.append(res)
    return report
