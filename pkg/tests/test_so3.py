import numpy as np
import pytest

from chernsimons.so3 import (
    dimension_inequality,
    fusion_rules,
    fusion_square_sum,
    so3_s_matrix,
    verlinde_dim,
    verlinde_fusion,
)

PRIMES = [5, 7, 11, 13]

DIMS = {5: [1, 3, 14, 98], 7: [1, 4, 30, 414], 11: [1, 6, 91, 3549], 13: [1, 7, 140, 8260]}


def test_r5_fusion_table():
    t = fusion_rules(5)
    assert t.anyons == [0, 1, 2] and t.level == 8
    N = t.N
    assert N[1, 1].tolist() == [1, 1, 1]
    assert N[1, 2].tolist() == [0, 1, 1]
    assert N[2, 2].tolist() == [1, 1, 0]


@pytest.mark.parametrize("r", PRIMES)
def test_dimensions(r):
    assert [verlinde_dim(r, g) for g in range(4)] == DIMS[r]


@pytest.mark.parametrize("r", PRIMES)
def test_inequality_and_square_sum(r):
    m = (r + 1) // 2
    assert dimension_inequality(r)
    assert m * m <= verlinde_dim(r, 2)
    assert fusion_square_sum(r) == verlinde_dim(r, 2)


@pytest.mark.parametrize("r", PRIMES)
def test_fusion_is_a_commutative_associative_algebra_with_unit(r):
    N = fusion_rules(r).N
    m = N.shape[0]
    assert np.array_equal(N[0], np.eye(m, dtype=N.dtype))
    assert np.array_equal(N, N.transpose(1, 0, 2))
    # (a b) c = a (b c)
    left = np.einsum("abx,xcd->abcd", N, N)
    right = np.einsum("bcx,axd->abcd", N, N)
    assert np.array_equal(left, right)
    # every anyon is self-dual: a x a contains 0 exactly once
    assert np.array_equal(N[np.arange(m), np.arange(m), 0], np.ones(m, dtype=N.dtype))


@pytest.mark.parametrize("r", PRIMES)
def test_s_matrix_is_real_orthogonal_and_symmetric(r):
    S = so3_s_matrix(r)
    assert np.allclose(S, S.T)
    assert np.allclose(S @ S.T, np.eye(S.shape[0]), atol=1e-12)
    assert (S[0] > 0).all()


@pytest.mark.parametrize("r", PRIMES)
def test_verlinde_formula_reproduces_fusion(r):
    assert np.array_equal(verlinde_fusion(r), fusion_rules(r).N)


@pytest.mark.parametrize("r", PRIMES)
def test_dimensions_are_positive(r):
    assert all(verlinde_dim(r, g) > 0 for g in range(4))


@pytest.mark.parametrize("r", [0, 1, 3, 4, 9, 15, 2])
def test_bad_r(r):
    with pytest.raises(ValueError, match="odd prime"):
        fusion_rules(r)


def test_bad_genus():
    with pytest.raises(ValueError, match="genus"):
        verlinde_dim(5, -1)
