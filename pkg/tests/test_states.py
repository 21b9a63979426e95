import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monotone_lab import numkit
from monotone_lab.exceptions import ValidationError
from monotone_lab.states import (
    EMIN,
    AcinParams,
    DensityMatrix,
    PhiParams,
    PureState,
    basis_state,
    bipartition,
    make_acin,
    make_bell,
    make_max_entangled,
    make_omega,
    make_phi,
    make_w,
    mixture,
    parse_cut,
    partial_trace,
    partial_transpose,
    permute,
    phi_branches,
    product_density,
    product_state,
    pure_from_schmidt,
    random_density,
    random_pure_state,
    schmidt,
    schmidt_spectrum,
)


def test_pure_state_invariants():
    with pytest.raises(ValidationError, match="PureState.normalized"):
        PureState([1, 1], (2,))
    with pytest.raises(ValidationError, match="DimSignature.product"):
        PureState([1, 0, 0], (2, 2))
    with pytest.raises(ValidationError, match="DimSignature.dims"):
        PureState([1], (1,))
    with pytest.raises(ValidationError, match="DimSignature.parties"):
        PureState(np.eye(16)[0], (2, 2, 2, 2))


def test_global_phase_is_canonical():
    psi = PureState(np.array([1j, 1]) / np.sqrt(2), (2,))
    assert psi.amplitudes[0] == pytest.approx(1 / np.sqrt(2))
    assert psi.amplitudes[0].imag == 0


def test_big_endian_flattening():
    psi = basis_state((2, 3, 2), (1, 2, 0))
    assert np.flatnonzero(psi.amplitudes)[0] == (1 * 3 + 2) * 2 + 0


def test_partial_trace_of_product_recovers_factors(rng):
    rA = numkit.random_density_matrix(2, rng=rng)
    rB = numkit.random_density_matrix(3, rng=rng)
    rho = product_density(rA, rB)
    np.testing.assert_allclose(partial_trace(rho, [0]).matrix, rA, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, [1]).matrix, rB, atol=1e-12)


def test_partial_trace_brute_force(rng):
    # Oracle: explicit sum over the traced index.
    rho = random_density((2, 3, 2), rng=rng)
    T = rho.matrix.reshape(2, 3, 2, 2, 3, 2)
    expected = sum(T[:, j, :, :, j, :] for j in range(3)).reshape(4, 4)
    np.testing.assert_allclose(partial_trace(rho, [0, 2]).matrix, expected, atol=1e-12)


def test_partial_trace_rejects_bad_indices():
    with pytest.raises(ValidationError):
        partial_trace(make_bell(), [2])


def test_partial_transpose_of_bell():
    w = np.linalg.eigvalsh(partial_transpose(make_bell(), 0))
    np.testing.assert_allclose(np.sort(w), [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_transpose_twice_is_identity(rng):
    rho = random_density((2, 3), rng=rng)
    once = partial_transpose(rho, 1)
    T = once.reshape(2, 3, 2, 3).swapaxes(1, 3).reshape(6, 6)
    np.testing.assert_allclose(T, rho.matrix, atol=1e-12)


def test_permute_swaps_parties(rng):
    psi = product_state([1, 0], [0, 1, 0])
    swapped = permute(psi, [1, 0])
    assert swapped.dims == (3, 2)
    assert np.flatnonzero(swapped.amplitudes)[0] == 1 * 2 + 0


@pytest.mark.parametrize("cut", ["A", "A||B", "A|A", "A|D", "|B"])
def test_parse_cut_rejects(cut):
    with pytest.raises(ValidationError):
        parse_cut(cut, 3)


def test_bipartition_requires_cut_for_tripartite():
    with pytest.raises(ValidationError, match="Cut.required"):
        bipartition(make_w())


def test_bipartition_traces_missing_party():
    rho = bipartition(make_w(), "A|B")
    assert isinstance(rho, DensityMatrix) and rho.dims == (2, 2)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1 / 3
    expected[np.ix_([1, 2], [1, 2])] = 1 / 3
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-12)


def test_bipartition_grouping_order():
    psi = make_omega(*np.sqrt([0.5, 0.3, 0.2]))
    left = bipartition(psi, "BC|A")
    assert left.dims == (4, 3)
    np.testing.assert_allclose(schmidt_spectrum(left), schmidt_spectrum(psi, "A|BC")[:3], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_schmidt_reconstructs(dA, dB, seed):
    psi = random_pure_state((dA, dB), np.random.default_rng(seed))
    sd = schmidt(psi)
    np.testing.assert_allclose(sd.reconstruct(), psi.amplitudes, atol=1e-10)
    assert sd.spectrum().sum() == pytest.approx(1)
    # reduced state spectrum equals the squared Schmidt coefficients
    rA = partial_trace(psi, [0]).spectrum()
    np.testing.assert_allclose(rA[: sd.rank], sd.spectrum(), atol=1e-10)


def test_schmidt_rank_counts_squares():
    psi = pure_from_schmidt([np.sqrt(1 - 1e-10), 1e-5], 2, 2)
    assert schmidt(psi).rank == 1
    assert schmidt(make_max_entangled(3)).rank == 3


def test_pure_from_schmidt_validation():
    with pytest.raises(ValidationError, match="Schmidt.normalized"):
        pure_from_schmidt([0.5, 0.5], 2, 2)
    with pytest.raises(ValidationError, match="Schmidt.length"):
        pure_from_schmidt([0.5] * 4, 2, 2)


def test_mixture_is_convex_combination():
    rho = mixture([basis_state((2, 2), (0, 0)), basis_state((2, 2), (1, 1))], [0.25, 0.75])
    np.testing.assert_allclose(np.diag(rho.matrix).real, [0.25, 0, 0, 0.75])


def test_phi_state_structure():
    params = PhiParams.from_squares((0.5, 0.3, 0.2), (0.5, 0.26, 0.24))
    psi = make_phi(params)
    assert psi.dims == (3, 4, 2)
    np.testing.assert_allclose(schmidt_spectrum(psi, "A|BC"), [0.5, 0.28, 0.22], atol=1e-12)
    b0, b1 = phi_branches(params)
    half = (np.kron(b0.amplitudes, [1, 0]) + np.kron(b1.amplitudes, [0, 1])) / np.sqrt(2)
    np.testing.assert_allclose(half, psi.amplitudes, atol=1e-12)


@pytest.mark.parametrize(
    "a2, a2p, regime, invariant",
    [
        ((0.5, 0.3, 0.2), (0.4, 0.3, 0.3), "e2", "PhiParams.equal_a0"),
        ((0.4, 0.3, 0.3), (0.4, 0.35, 0.25), "e2", "PhiParams.a0_squared"),
        ((0.5, 0.3, 0.2), (0.5, 0.3, 0.2), "e2", "PhiParams.cross_condition"),
        ((0.5, 0.3, 0.2), (0.5, 0.26, 0.24), "other", "PhiParams.regime"),
        ((0.5, 0.3, 0.2), (0.5, 0.26, 0.24), EMIN, "PhiParams.ordering"),
        ((0.6, 0.4, 0.0), (0.6, 0.3, 0.1), "e2", "PhiParams.positive"),
    ],
)
def test_phi_params_invariants(a2, a2p, regime, invariant):
    with pytest.raises(ValidationError) as err:
        PhiParams.from_squares(a2, a2p, regime)
    assert err.value.invariant == invariant


def test_phi_emin_regime_accepts_reference_values():
    psi = make_phi(PhiParams.from_squares((0.2, 0.45, 0.35), (0.2, 0.44, 0.36), EMIN))
    assert psi.dims == (3, 4, 2)


def test_omega_validation():
    with pytest.raises(ValidationError, match="Omega.ordering"):
        make_omega(*np.sqrt([0.2, 0.3, 0.5]))
    with pytest.raises(ValidationError, match="Omega.normalized"):
        make_omega(0.6, 0.5, 0.4)


def test_w_state_reductions():
    w = make_w()
    np.testing.assert_allclose(partial_trace(w, [0]).spectrum(), [2 / 3, 1 / 3], atol=1e-12)


def test_acin_params():
    with pytest.raises(ValidationError, match="AcinParams.normalized"):
        AcinParams((0.5, 0.5, 0.5, 0.5, 0.5))
    p = AcinParams((0.6, 0.48, 0.0, 0.64, 0.0))
    assert p.ac_separable() and not p.ab_separable()
    assert not p.genuinely_entangled()
    psi = make_acin(p)
    assert psi.amplitudes[0b110] == pytest.approx(0.64)
