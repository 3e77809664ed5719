"""Brute-force reference computations, written directly from the definitions.

Only plain Python sets and loops over the raw composition tables; nothing here
calls the library's lattice, union-find or orthogonality code.
"""
import itertools
import math


def endo(G, a):
    return [m for m in range(G.n_morphisms) if G.src[m] == a and G.tgt[m] == a]


def subgroups(G, a):
    """Every subset of End(a) closed under composition (finite, so also under inverses)."""
    els = endo(G, a)
    e = int(G.ident[a])
    out = set()
    rest = [x for x in els if x != e]
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            S = frozenset((e,) + extra)
            if all(int(G.comp[g, f]) in S for g in S for f in S):
                out.add(S)
    return out


def orth(F, candidates):
    return {H for H in candidates if all(len(H & K) == 1 for K in F)}


def kit_double_orth(G, family):
    """family: {a: set of frozensets}. Per-object K^⊥⊥."""
    out = {}
    for a in range(G.n_objects):
        subs = subgroups(G, a)
        out[a] = orth(orth(family[a], subs), subs)
    return out


def perms(n):
    return list(itertools.permutations(range(n)))


def species_orbits(act, n, k):
    """|F(n) ×_{S_n} X^n| for |X| = k: orbits of the diagonal action σ·(p, x̄) = (σ·p, x̄∘σ⁻¹).

    ``act[x][r]`` is perms(n)[r]·x.
    """
    ps = perms(n)
    invs = []
    for s in ps:
        inv = [0] * n
        for i, j in enumerate(s):
            inv[j] = i
        invs.append(inv)
    orbits = set()
    for p in range(len(act)):
        for xs in itertools.product(range(k), repeat=n):
            orbit = frozenset((act[p][r], tuple(xs[invs[r][i]] for i in range(n))) for r in range(len(ps)))
            orbits.add(orbit)
    return len(orbits)


def free_orbit_count(size_n, n, k):
    return size_n * k ** n // math.factorial(n)


def coend_partition(P, Q):
    """Pairs (p, q) over a common middle object, merged along every β (plain BFS)."""
    B = P.target
    pairs = {(p, q) for p in range(len(P)) for q in range(len(Q)) if P.cell_b[p] == Q.cell_a[q]}
    adj = {x: set() for x in pairs}
    for beta in range(B.n_morphisms):
        b, b2 = int(B.src[beta]), int(B.tgt[beta])
        for p in range(len(P)):
            if P.cell_b[p] != b2:
                continue
            for q in range(len(Q)):
                if Q.cell_a[q] != b:
                    continue
                x = (int(P.right[p, beta]), q)
                y = (p, int(Q.left[beta, q]))
                adj[x].add(y)
                adj[y].add(x)
    blocks, seen = set(), set()
    for x in pairs:
        if x in seen:
            continue
        comp, stack = {x}, [x]
        while stack:
            for z in adj[stack.pop()]:
                if z not in comp:
                    comp.add(z)
                    stack.append(z)
        seen |= comp
        blocks.add(frozenset(comp))
    return blocks
