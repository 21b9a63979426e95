import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monotone_lab import numkit
from monotone_lab.exceptions import ValidationError


def test_eig_hermitian_reconstructs_and_sorts(rng):
    H = numkit.random_hermitian(5, rng)
    w, V = numkit.eig_hermitian(H)
    assert np.all(np.diff(w) <= 1e-12)
    np.testing.assert_allclose(V @ np.diag(w) @ V.conj().T, H, atol=1e-12)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(5), atol=1e-12)


def test_eig_hermitian_phase_convention(rng):
    _, V = numkit.eig_hermitian(numkit.random_hermitian(4, rng))
    pivots = V[np.argmax(np.abs(V), axis=0), np.arange(4)]
    np.testing.assert_allclose(pivots.imag, 0, atol=1e-12)
    assert np.all(pivots.real > 0)


def test_rejects_non_hermitian():
    with pytest.raises(ValidationError) as err:
        numkit.eig_hermitian(np.array([[0, 1], [0, 0]]))
    assert err.value.invariant == "ComplexMatrix.hermitian"


def test_rejects_non_finite():
    with pytest.raises(ValidationError) as err:
        numkit.as_matrix(np.array([[np.nan]]))
    assert err.value.invariant == "ComplexMatrix.finite"


def test_svd_reconstructs(rng):
    M = numkit.ginibre((3, 5), rng)
    U, s, V = numkit.svd(M)
    np.testing.assert_allclose(U @ np.diag(s) @ V.conj().T, M, atol=1e-12)
    assert np.all(np.diff(s) <= 0)


def test_operator_norm_matches_largest_singular_value(rng):
    M = numkit.ginibre((4, 4), rng)
    assert numkit.operator_norm(M) == pytest.approx(np.linalg.svd(M, compute_uv=False)[0])


def test_check_density_invariants():
    with pytest.raises(ValidationError, match="DensityMatrix.trace"):
        numkit.check_density(np.eye(2))
    with pytest.raises(ValidationError, match="DensityMatrix.psd"):
        numkit.check_density(np.diag([1.5, -0.5]))


def test_min_norm_conventions():
    assert numkit.min_norm(np.diag([0.7, 0.3])) == pytest.approx(0.3)
    assert numkit.min_norm(np.diag([1.0, 0.0])) == 0.0
    # zero eigenvalues are skipped, not reported as the minimum
    assert numkit.min_norm(np.diag([0.6, 0.4, 0.0])) == pytest.approx(0.4)


def test_negative_part_spectrum():
    H = np.diag([0.5, -0.2, 0.3, -0.1])
    np.testing.assert_allclose(np.diag(numkit.negative_part(H)).real, [0, 0.2, 0, 0.1])


def test_majorization_examples():
    assert numkit.majorizes([1 / 3] * 3, [1, 0, 0])
    assert numkit.majorizes([0.4, 0.4, 0.2], [0.7, 0.2, 0.1])
    assert not numkit.majorizes([0.5, 0.5], [0.7, 0.2, 0.1])
    assert not numkit.majorizes([0.7, 0.3], [0.5, 0.5])
    with pytest.raises(ValidationError):
        numkit.majorizes([0.5, 0.6], [1.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_doubly_stochastic_images_are_majorized(d, seed):
    # Oracle: P x with P doubly stochastic (a unistochastic matrix) satisfies P x < x.
    rng = np.random.default_rng(seed)
    x = numkit.random_simplex(1, d, rng)[0]
    U = numkit.haar_isometry(d, d, rng)
    P = np.abs(U) ** 2
    assert numkit.majorizes(P @ x, x)


def test_haar_isometry_is_isometric(rng):
    V = numkit.haar_isometry(5, 3, rng)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(3), atol=1e-12)
    with pytest.raises(ValidationError):
        numkit.haar_isometry(2, 3, rng)


def test_random_simplex_rows(rng):
    X = numkit.random_simplex(100, 4, rng)
    assert np.all(X >= 0)
    np.testing.assert_allclose(X.sum(axis=1), 1)


def test_unitary_from_hermitian(rng):
    H = numkit.random_hermitian(4, rng)
    U = numkit.unitary_from_hermitian(H, 0.3)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(numkit.unitary_from_hermitian(H, 0.0), np.eye(4), atol=1e-12)


def test_random_density_matrix_is_valid(rng):
    rho = numkit.random_density_matrix(4, 2, rng)
    numkit.check_density(rho)
    assert np.sum(numkit.eigvals_hermitian(rho) > 1e-9) == 2


def test_generators_are_seed_deterministic():
    a = numkit.random_hermitian(3, 7)
    b = numkit.random_hermitian(3, 7)
    assert np.array_equal(a, b)
