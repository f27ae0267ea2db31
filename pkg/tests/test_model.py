from functools import reduce

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spin_dephasing.model import (
    DimensionError,
    SpinChainModel,
    SpinConfiguration,
    build_q_matrix,
    eigenvalue_gap,
    q_eigenvalue,
    q_eigenvalues,
)

SIGMA3 = np.diag([1.0, -1.0])


def kron_q(n):
    """Brute-force Q = sum_m sigma^3_m / 2^m from Kronecker products (site 1 leftmost)."""
    total = np.zeros((2**n, 2**n))
    for m in range(1, n + 1):
        factors = [SIGMA3 if k == m else np.eye(2) for k in range(1, n + 1)]
        total += reduce(np.kron, factors) / 2**m
    return total


@pytest.mark.parametrize(
    "bits, expected",
    [((0, 0), 0.75), ((1,), -0.5), ((0, 1, 0), 0.375)],
)
def test_q_eigenvalue_examples(bits, expected):
    assert q_eigenvalue(SpinConfiguration(bits)) == expected


def test_q_eigenvalue_matches_kron_oracle():
    for n in range(1, 7):
        diag = np.diag(kron_q(n))
        got = [q_eigenvalue(SpinConfiguration.from_index(i, n)) for i in range(1, 2**n + 1)]
        np.testing.assert_array_equal(got, diag)
        np.testing.assert_array_equal(q_eigenvalues(n), diag)


def test_eigenvalue_gap_examples():
    assert eigenvalue_gap(1, 2, 1) == 1.0
    assert eigenvalue_gap(3, 3, 5) == 0.0


def test_eigenvalue_gap_exhaustive_n4():
    n = 4
    for i in range(1, 17):
        for j in range(1, 17):
            assert eigenvalue_gap(i, j, n) == (j - i) / 2 ** (n - 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_gap_law_squared(n):
    q = q_eigenvalues(n)
    idx = np.arange(1, 2**n + 1)
    lhs = np.subtract.outer(q, q) ** 2
    rhs = np.subtract.outer(idx, idx) ** 2 / 4.0 ** (n - 1)
    np.testing.assert_array_equal(lhs, rhs)


def test_eigenvalue_gap_rejects_bad_index():
    with pytest.raises(IndexError):
        eigenvalue_gap(0, 1, 2)
    with pytest.raises(IndexError):
        eigenvalue_gap(1, 5, 2)


def test_build_q_matrix_examples():
    np.testing.assert_array_equal(build_q_matrix(SpinChainModel(1)), np.diag([0.5, -0.5]))
    np.testing.assert_array_equal(build_q_matrix(SpinChainModel(2)), np.diag([0.75, 0.25, -0.25, -0.75]))


@pytest.mark.parametrize("n", range(1, 9))
def test_q_norm_and_simple_spectrum(n):
    Q = build_q_matrix(SpinChainModel(n))
    assert np.allclose(Q, Q.conj().T)
    assert np.linalg.norm(Q, 2) == 1 - 2.0**-n
    assert len(np.unique(np.diag(Q).real)) == 2**n


def test_size_guard():
    with pytest.raises(DimensionError):
        build_q_matrix(SpinChainModel(13))
    assert build_q_matrix(SpinChainModel(3), max_sites=3).shape == (8, 8)
    with pytest.raises(DimensionError):
        build_q_matrix(SpinChainModel(4), max_sites=3)


@pytest.mark.parametrize("kwargs", [dict(n_sites=0), dict(n_sites=2, lam=0.0), dict(n_sites=2, beta=-1.0), dict(n_sites=1.5)])
def test_model_validation(kwargs):
    with pytest.raises(ValueError):
        SpinChainModel(**kwargs)


def test_gamma_is_derived():
    m = SpinChainModel(3, lam=0.7, beta=2.5)
    assert m.gamma == np.pi * 0.7 / 2.5
    assert m.dim == 8


@pytest.mark.parametrize("n", range(1, 11))
def test_index_bijection(n):
    seen = set()
    for i in range(1, 2**n + 1):
        c = SpinConfiguration.from_index(i, n)
        assert c.n_sites == n
        assert c.index == i
        seen.add(c.bits)
    assert len(seen) == 2**n


@given(st.lists(st.integers(0, 1), min_size=1, max_size=16))
def test_configuration_roundtrip(bits):
    c = SpinConfiguration(tuple(bits))
    assert SpinConfiguration.from_index(c.index, len(bits)) == c
    assert abs(q_eigenvalue(c)) <= 1 - 2.0 ** -len(bits)


def test_site_one_is_most_significant():
    assert SpinConfiguration((1, 0, 0)).index == 5
    assert SpinConfiguration((0, 0, 1)).index == 2
