"""The numba and numpy kernels must agree bit for bit."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kitlab import _kernels as K
from kitlab.groupoid import cyclic_group

pytestmark = pytest.mark.skipif(K.numba_kernels is None, reason="numba not importable")

BACKENDS = (K.numpy_kernels, K.numba_kernels)


def both(name, *args):
    a, b = (getattr(k, name)(*args) for k in BACKENDS)
    return np.asarray(a), np.asarray(b)


@given(st.integers(1, 60), st.data())
@settings(max_examples=80, deadline=None)
def test_uf_labels(n, data):
    m = data.draw(st.integers(0, 2 * n))
    a = data.draw(arrays(np.int64, m, elements=st.integers(0, n - 1)))
    b = data.draw(arrays(np.int64, m, elements=st.integers(0, n - 1)))
    x, y = both("uf_labels", n, a, b)
    assert np.array_equal(x, y)
    # labels are class minima
    for i in range(n):
        assert x[i] <= i and x[x[i]] == x[i]


@given(st.integers(1, 30), st.lists(st.integers(0, 29), max_size=3))
@settings(max_examples=60, deadline=None)
def test_closure(n, gens):
    G = cyclic_group(n)
    table = np.ascontiguousarray(G.comp, dtype=np.int64)
    gens = np.array([g % n for g in gens], dtype=np.int64)
    x, y = both("closure", table, gens, 0)
    assert np.array_equal(x, y)
    d = np.gcd.reduce(np.append(gens, n)) if len(gens) else n
    assert x.sum() == n // d


@given(arrays(np.bool_, st.tuples(st.integers(1, 12), st.integers(1, 150))), st.data())
@settings(max_examples=60, deadline=None)
def test_meet_is_single(ma, data):
    mb = data.draw(arrays(np.bool_, (data.draw(st.integers(1, 12)), ma.shape[1])))
    pa, pb = K.pack_rows(ma), K.pack_rows(mb)
    x, y = both("meet_is_single", pa, pb)
    assert np.array_equal(x, y)
    assert np.array_equal(x, (ma.astype(int) @ mb.T.astype(int)) == 1)


@given(st.integers(1, 6), st.integers(1, 8), st.integers(1, 6), st.data())
@settings(max_examples=60, deadline=None)
def test_fixed_triples(ea, n, eb, data):
    lloc = data.draw(arrays(np.int64, (ea, n), elements=st.integers(0, n - 1)))
    rloc = data.draw(arrays(np.int64, (n, eb), elements=st.integers(0, n - 1)))
    x, y = both("fixed_triples", lloc, rloc)
    assert np.array_equal(x, y)


@given(st.integers(1, 12), st.data())
@settings(max_examples=60, deadline=None)
def test_assoc_violation(n, data):
    comp = np.ascontiguousarray(cyclic_group(n).comp, dtype=np.int64)
    assert tuple(both("assoc_violation", comp)[0]) == tuple(both("assoc_violation", comp)[1])
    assert K.numpy_kernels.assoc_violation(comp)[0] < 0
    if n > 2:
        i, j = data.draw(st.integers(1, n - 1)), data.draw(st.integers(1, n - 1))
        bad = comp.copy()
        bad[i, j] = (bad[i, j] + 1) % n
        x, y = both("assoc_violation", bad)
        assert tuple(x) == tuple(y) and x[0] >= 0


def test_backend_selection_flag():
    assert K.BACKEND in ("numba", "numpy")
    assert K.active.backend == K.BACKEND
