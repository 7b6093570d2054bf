"""Backend equivalence: the numba kernels must agree bit-for-bit with the
pure-numpy reference on random inputs."""

import numpy as np
import pytest

from permlat import _kernels
from permlat import _kernels_numpy as knp

try:
    from permlat import _kernels_numba as knb

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def random_cases(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        p = int(rng.choice([2, 3]))
        k = int(rng.integers(1, 5))
        r = int(rng.integers(1, 8))
        c = int(rng.integers(1, 8))
        yield rng.integers(0, p**k, (r, c)), p, k


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_howell_backends_agree():
    for A, p, k in random_cases(50, 1):
        assert np.array_equal(knp.howell_mod(A, p, k), knb.howell_mod(A, p, k))


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_diagonalize_backends_agree():
    for A, p, k in random_cases(50, 2):
        e1, U1, V1 = knp.diagonalize_mod(A, p, k)
        e2, U2, V2 = knb.diagonalize_mod(A, p, k)
        assert np.array_equal(e1, e2)
        assert np.array_equal(U1, U2)
        assert np.array_equal(V1, V2)


def test_diagonalize_postcondition():
    impl = _kernels
    for A, p, k in random_cases(40, 3):
        m = p**k
        exps, U, V = impl.diagonalize_mod(A, p, k)
        D = (U @ (A % m) @ V) % m
        expect = np.zeros_like(D)
        for i, e in enumerate(exps):
            expect[i, i] = (p ** int(e)) % m
        assert np.array_equal(D, expect)


def test_backend_flag_selects():
    assert _kernels.BACKEND in ("numba", "numpy")
