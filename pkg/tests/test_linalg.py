import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from openqfi.errors import NotHermitianError, NumericalOverflowError
from openqfi.linalg import eigh, expm, expm_frechet, kron
from openqfi.randomness import ginibre, random_hermitian

SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_pauli_z():
    np.testing.assert_array_equal(kron(SZ, SZ), np.diag([1, -1, -1, 1]))


def test_kron_diagonal_blocks():
    a, b = 0.3, -1.7
    np.testing.assert_array_equal(kron(np.diag([a, b]), np.eye(2)), np.diag([a, a, b, b]))


def test_kron_many_factors():
    assert kron(SZ, SZ, SZ).shape == (8, 8)


def test_eigh_pauli_z():
    w, _ = eigh(SZ)
    np.testing.assert_allclose(w, [-1, 1])


def test_eigh_degenerate():
    w, v = eigh(np.eye(2) / 2)
    np.testing.assert_allclose(w, [0.5, 0.5])
    np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)


def test_eigh_pauli_x_vectors():
    w, v = eigh(SX)
    np.testing.assert_allclose(w, [-1, 1])
    minus = np.array([1, -1]) / np.sqrt(2)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(abs(np.vdot(minus, v[:, 0])) - 1) < 1e-12
    assert abs(abs(np.vdot(plus, v[:, 1])) - 1) < 1e-12


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eigh(np.array([[0, 1], [0, 0]]))


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=6))
def test_eigh_reconstruction(seed, d):
    h = random_hermitian(d, np.random.default_rng(seed))
    w, v = eigh(h)
    assert np.all(np.diff(w) >= 0)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-10)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-10)


def test_expm_zero_and_diagonal():
    np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))
    a = np.array([0.5, -2.0, 1j])
    np.testing.assert_allclose(expm(np.diag(a)), np.diag(np.exp(a)), rtol=1e-14)


@pytest.mark.parametrize("theta", [0.1, 1.0, 3.0, 19.0])
def test_expm_rotation(theta):
    m = np.array([[0, theta], [-theta, 0]])
    ref = np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]])
    np.testing.assert_allclose(expm(m), ref, rtol=1e-12, atol=1e-12 * np.linalg.norm(m))


def test_expm_overflow():
    with pytest.raises(NumericalOverflowError):
        expm(np.array([[1e4]]))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_expm_inverse_and_semigroup(seed):
    rng = np.random.default_rng(seed)
    m = ginibre(4, rng)
    m *= rng.uniform(0.1, 5.0) / np.linalg.norm(m, 2)
    np.testing.assert_allclose(expm(m) @ expm(-m), np.eye(4), atol=1e-10)
    t1, t2 = rng.uniform(0, 1, size=2)
    np.testing.assert_allclose(expm((t1 + t2) * m), expm(t1 * m) @ expm(t2 * m), atol=1e-10)


def test_frechet_trivial_directions():
    m = ginibre(3, np.random.default_rng(0))
    e = ginibre(3, np.random.default_rng(1))
    np.testing.assert_array_equal(expm_frechet(m, np.zeros((3, 3))), np.zeros((3, 3)))
    np.testing.assert_allclose(expm_frechet(np.zeros((3, 3)), e), e, atol=1e-14)


def test_frechet_commuting():
    m = np.diag([0.3, -0.2, 1.1])
    e = np.diag([1.0, 2.0, -0.5])
    np.testing.assert_allclose(expm_frechet(m, e), e @ expm(m), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_frechet_finite_difference(seed):
    rng = np.random.default_rng(seed)
    m = ginibre(3, rng)
    e = ginibre(3, rng)
    m /= np.linalg.norm(m, 2)
    e /= np.linalg.norm(e, 2)
    h = 1e-5
    fd = (expm(m + h * e) - expm(m - h * e)) / (2 * h)
    np.testing.assert_allclose(expm_frechet(m, e), fd, atol=1e-6)
