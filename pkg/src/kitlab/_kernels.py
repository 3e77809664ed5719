"""Integer-table kernels shared by the algebra modules.

Each kernel has a numba version and a plain numpy version with identical
results. The numba path is used when numba imports and ``KITLAB_NO_NUMBA``
is unset (or "0"); the numpy path otherwise. ``numba_kernels`` and
``numpy_kernels`` are always importable for direct comparison.
"""
import os
from types import SimpleNamespace

import numpy as np

NUMBA_DISABLED = os.environ.get("KITLAB_NO_NUMBA", "0") not in ("", "0")

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


# ---------------------------------------------------------------- union-find

def _uf_labels(n, a, b):
    # roots are always linked larger -> smaller, so parent[i] <= i throughout
    parent = np.arange(n)
    for k in range(a.shape[0]):
        x = a[k]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = b[k]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        if x < y:
            parent[y] = x
        elif y < x:
            parent[x] = y
    for i in range(n):
        parent[i] = parent[parent[i]]
    return parent


def _uf_labels_np(n, a, b):
    lab = np.arange(n)
    if len(a) == 0:
        return lab
    a = np.asarray(a)
    b = np.asarray(b)
    while True:
        m = np.minimum(lab[a], lab[b])
        new = lab.copy()
        np.minimum.at(new, a, m)
        np.minimum.at(new, b, m)
        new = new[new]
        if np.array_equal(new, lab):
            return lab
        lab = new


# ------------------------------------------------------- subgroup closure

def _closure(table, gens, ident):
    e = table.shape[0]
    mask = np.zeros(e, dtype=np.bool_)
    queue = np.empty(e, dtype=np.int64)
    mask[ident] = True
    queue[0] = ident
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(gens.shape[0]):
            y = table[x, gens[k]]
            if not mask[y]:
                mask[y] = True
                queue[tail] = y
                tail += 1
    return mask


def _closure_np(table, gens, ident):
    mask = np.zeros(table.shape[0], dtype=bool)
    mask[ident] = True
    frontier = np.array([ident])
    gens = np.asarray(gens, dtype=np.int64)
    if len(gens) == 0:
        return mask
    while len(frontier):
        nxt = np.unique(table[np.ix_(frontier, gens)])
        nxt = nxt[~mask[nxt]]
        mask[nxt] = True
        frontier = nxt
    return mask


# ------------------------------------------------- trivial-meet matrix

def pack_rows(masks):
    """Pack a boolean (rows x bits) matrix into uint64 words."""
    masks = np.asarray(masks, dtype=bool)
    rows, bits = masks.shape
    words = max(1, (bits + 63) // 64)
    padded = np.zeros((rows, words * 64), dtype=bool)
    padded[:, :bits] = masks
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(rows, words)


def _meet_is_single(pa, pb):
    # out[i, j] <=> rows i and j share exactly one set bit
    ra = pa.shape[0]
    rb = pb.shape[0]
    w = pa.shape[1]
    out = np.zeros((ra, rb), dtype=np.bool_)
    for i in range(ra):
        for j in range(rb):
            seen = 0
            ok = True
            for k in range(w):
                x = pa[i, k] & pb[j, k]
                if x != 0:
                    seen += 1
                    if seen > 1 or (x & (x - np.uint64(1))) != 0:
                        ok = False
                        break
            out[i, j] = ok and seen == 1
    return out


def _meet_is_single_np(pa, pb):
    # unpack back to bits and count overlaps with a matmul
    a = np.unpackbits(pa.view(np.uint8), axis=1, bitorder="little").astype(np.int32)
    b = np.unpackbits(pb.view(np.uint8), axis=1, bitorder="little").astype(np.int32)
    return (a @ b.T) == 1


# ------------------------------------------------------ fixed points

def _fixed_triples(lloc, rloc):
    # fixed[alpha, p, beta] <=> rloc[lloc[alpha, p], beta] == p
    ea, n = lloc.shape
    eb = rloc.shape[1]
    out = np.zeros((ea, n, eb), dtype=np.bool_)
    for i in range(ea):
        for p in range(n):
            q = lloc[i, p]
            for j in range(eb):
                if rloc[q, j] == p:
                    out[i, p, j] = True
    return out


def _fixed_triples_np(lloc, rloc):
    n = lloc.shape[1]
    return rloc[lloc] == np.arange(n)[None, :, None]


# ---------------------------------------------------- associativity

def _assoc_violation(comp):
    m = comp.shape[0]
    for h in range(m):
        for g in range(m):
            hg = comp[h, g]
            if hg < 0:
                continue
            for f in range(m):
                gf = comp[g, f]
                if gf < 0:
                    continue
                if comp[hg, f] != comp[h, gf]:
                    return h, g, f
    return -1, -1, -1


def _assoc_violation_np(comp):
    m = comp.shape[0]
    for h in range(m):
        hg = comp[h]                      # h∘g for all g
        ok_g = hg >= 0
        if not ok_g.any():
            continue
        gs = np.nonzero(ok_g)[0]
        gf = comp[gs]                      # (g, f) -> g∘f
        valid = gf >= 0
        left = comp[hg[gs]][:, :]          # (h∘g)∘f
        right = np.where(valid, comp[h][np.where(valid, gf, 0)], -1)
        bad = valid & (left != right)
        if bad.any():
            gi, f = np.argwhere(bad)[0]
            return h, int(gs[gi]), int(f)
    return -1, -1, -1


numpy_kernels = SimpleNamespace(
    uf_labels=_uf_labels_np,
    closure=_closure_np,
    meet_is_single=_meet_is_single_np,
    fixed_triples=_fixed_triples_np,
    assoc_violation=_assoc_violation_np,
    backend="numpy",
)

if HAVE_NUMBA:
    numba_kernels = SimpleNamespace(
        uf_labels=njit(cache=True)(_uf_labels),
        closure=njit(cache=True)(_closure),
        meet_is_single=njit(cache=True)(_meet_is_single),
        fixed_triples=njit(cache=True)(_fixed_triples),
        assoc_violation=njit(cache=True)(_assoc_violation),
        backend="numba",
    )
else:  # pragma: no cover
    numba_kernels = None

active = numpy_kernels if (NUMBA_DISABLED or numba_kernels is None) else numba_kernels
BACKEND = active.backend


def uf_labels(n, a, b):
    """Class labels (least member index) of the equivalence on range(n) generated by a[k] ~ b[k]."""
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    return active.uf_labels(int(n), a, b)


def closure(table, gens, ident):
    """Boolean mask of the subgroup generated by ``gens`` inside a local Cayley table."""
    table = np.ascontiguousarray(table, dtype=np.int64)
    gens = np.ascontiguousarray(gens, dtype=np.int64)
    return active.closure(table, gens, int(ident))


def meet_is_single(pa, pb):
    """For packed subgroup masks: do rows i, j intersect in exactly one element (the identity)?"""
    return active.meet_is_single(np.ascontiguousarray(pa), np.ascontiguousarray(pb))


def fixed_triples(lloc, rloc):
    lloc = np.ascontiguousarray(lloc, dtype=np.int64)
    rloc = np.ascontiguousarray(rloc, dtype=np.int64)
    return active.fixed_triples(lloc, rloc)


def assoc_violation(comp):
    h, g, f = active.assoc_violation(np.ascontiguousarray(comp, dtype=np.int64))
    if h < 0:
        return None
    return int(h), int(g), int(f)


def warmup():
    """Trigger JIT compilation on tiny inputs so timings exclude compile cost."""
    t = np.array([[0, 1], [1, 0]])
    uf_labels(3, [0], [1])
    closure(t, [1], 0)
    pk = pack_rows(np.eye(2, dtype=bool))
    meet_is_single(pk, pk)
    fixed_triples(np.zeros((1, 1)), np.zeros((1, 1)))
    assoc_violation(t)
