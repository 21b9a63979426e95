"""
Pure-state entanglement quantities, their reduced functions, and the
negativity family evaluated directly on mixed states.

Every pure-state measure here depends only on the spectrum ``delta`` of the
reduced state (squared Schmidt coefficients), so each is implemented as a
*reduced function* ``h(delta)``. The functions in ``_BATCH`` accept a 2-D
array of spectra (one per row) so the convex-roof optimizer can evaluate whole
ensembles at once.

E_2 comes in two conventions: raw ``1 - delta_1`` and normalized
``d (1 - delta_1) / (d - 1)`` where ``d`` is the dimension of the reduced
subsystem (A unless stated otherwise).
"""
from enum import Enum

import numpy as np

from monotone_lab import numkit
from monotone_lab.exceptions import CapabilityError, ValidationError
from monotone_lab.states import (
    DensityMatrix,
    PureState,
    as_density,
    bipartition,
    partial_transpose,
    schmidt_spectrum,
)


class MeasureId(str, Enum):
    E_K = "E_K"
    E2_RAW = "E2_RAW"
    E2_NORM = "E2_NORM"
    E_MIN = "E_MIN"
    E_MIN_REINFORCED = "E_MIN_REINFORCED"
    TANGLE = "TANGLE"
    CONCURRENCE = "CONCURRENCE"
    NEGATIVITY = "NEGATIVITY"
    PARTIAL_NEGATIVITY = "PARTIAL_NEGATIVITY"
    LOG_PARTIAL_NEGATIVITY = "LOG_PARTIAL_NEGATIVITY"
    SCHMIDT_RANK = "SCHMIDT_RANK"


class ReducedFunctionId(str, Enum):
    H_E2 = "h_E2"
    H_E2_NORM = "h_E2_NORM"
    H_MIN = "h_MIN"
    H_MIN_REINFORCED = "h_MIN_REINFORCED"
    H_TANGLE = "h_TANGLE"
    H_NEG = "h_NEG"
    H_HAT = "h_HAT"


# Measures that can be evaluated directly on a mixed state (no roof needed).
DIRECT_MIXED = frozenset(
    {MeasureId.NEGATIVITY, MeasureId.PARTIAL_NEGATIVITY, MeasureId.LOG_PARTIAL_NEGATIVITY}
)

MEASURE_TO_H = {
    MeasureId.E2_RAW: ReducedFunctionId.H_E2,
    MeasureId.E2_NORM: ReducedFunctionId.H_E2_NORM,
    MeasureId.E_MIN: ReducedFunctionId.H_MIN,
    MeasureId.E_MIN_REINFORCED: ReducedFunctionId.H_MIN_REINFORCED,
    MeasureId.TANGLE: ReducedFunctionId.H_TANGLE,
    MeasureId.NEGATIVITY: ReducedFunctionId.H_NEG,
    MeasureId.PARTIAL_NEGATIVITY: ReducedFunctionId.H_HAT,
}


def parse_measure(text):
    """``"TANGLE"`` -> ``(MeasureId.TANGLE, 2)``; ``"E_K:3"`` -> ``(MeasureId.E_K, 3)``."""
    name, _, k = str(text).strip().upper().partition(":")
    if name == "SCHMIDT_NUMBER":
        name = "SCHMIDT_RANK"
    try:
        mid = MeasureId(name)
    except ValueError:
        raise ValidationError("MeasureId.known", f"unknown measure {text!r}") from None
    if k and mid is not MeasureId.E_K:
        raise ValidationError("MeasureId.parameter", f"{mid.value} takes no parameter")
    kval = int(k) if k else 2
    if mid is MeasureId.E_K and kval < 2:
        raise ValidationError("MeasureId.k", "E_K needs k >= 2")
    return mid, kval


def parse_reduced_function(text):
    if isinstance(text, ReducedFunctionId):
        return text
    for h in ReducedFunctionId:
        if str(text).lower() in (h.value.lower(), h.name.lower()):
            return h
    raise ValidationError("ReducedFunctionId.known", f"unknown reduced function {text!r}")


# -- reduced functions on batches of spectra ---------------------------------


def _sorted_desc(D):
    return -np.sort(-np.clip(D, 0.0, None), axis=1)


def _positive_count(D, rank_tol):
    return np.sum(D > rank_tol, axis=1)


def _h_min(D, rank_tol=numkit.RANK_TOL):
    # Smallest positive eigenvalue; rank-one (or near-product) rows give 0.
    count = _positive_count(D, rank_tol)
    masked = np.where(D > rank_tol, D, np.inf)
    smallest = masked.min(axis=1)
    return np.where((count > 1) & (smallest < 1 - rank_tol), smallest, 0.0)


def _h_e2(D, d):
    return 1.0 - np.max(D, axis=1)


def _h_e2_norm(D, d):
    return d * (1.0 - np.max(D, axis=1)) / (d - 1)


def _h_tangle(D, d):
    return 2.0 * (1.0 - np.sum(D**2, axis=1))


def _h_neg(D, d):
    return (np.sum(np.sqrt(np.clip(D, 0.0, None)), axis=1) ** 2 - 1.0) / 2.0


def _h_hat(D, d):
    if D.shape[1] < 2:
        return np.zeros(D.shape[0])
    S = _sorted_desc(D)
    return np.sqrt(S[:, 0] * S[:, 1])


_BATCH = {
    ReducedFunctionId.H_E2: _h_e2,
    ReducedFunctionId.H_E2_NORM: _h_e2_norm,
    ReducedFunctionId.H_MIN: lambda D, d: _h_min(D),
    ReducedFunctionId.H_MIN_REINFORCED: lambda D, d: _h_min(D) * _positive_count(D, numkit.RANK_TOL),
    ReducedFunctionId.H_TANGLE: _h_tangle,
    ReducedFunctionId.H_NEG: _h_neg,
    ReducedFunctionId.H_HAT: _h_hat,
}


def reduced_function_batch(h, spectra, d=None):
    """Evaluate reduced function ``h`` on each row of ``spectra``.

    ``d`` is the ambient dimension used by the normalized E_2; it defaults to
    the row length.
    """
    h = parse_reduced_function(h)
    D = np.atleast_2d(np.asarray(spectra, dtype=float))
    return np.maximum(_BATCH[h](D, d or D.shape[1]), 0.0)


def reduced_function(h, delta, d=None):
    """Evaluate reduced function ``h`` on one probability vector."""
    delta = np.asarray(delta, dtype=float).ravel()
    if delta.size == 0 or np.any(delta < -1e-12) or abs(delta.sum() - 1) > 1e-8:
        raise ValidationError("SpectrumVector.probability", "delta must be a probability vector")
    return float(reduced_function_batch(h, delta[None, :], d)[0])


def measure_from_spectra(measure, spectra, k=2, d=None):
    """Pure-state ``measure`` for each row of reduced spectra."""
    measure = MeasureId(measure)
    D = np.atleast_2d(np.asarray(spectra, dtype=float))
    if measure is MeasureId.E_K:
        if k < 2:
            raise ValidationError("MeasureId.k", "E_K needs k >= 2")
        return np.sum(_sorted_desc(D)[:, k - 1 :], axis=1)
    if measure is MeasureId.CONCURRENCE:
        return np.sqrt(reduced_function_batch(ReducedFunctionId.H_TANGLE, D))
    if measure is MeasureId.LOG_PARTIAL_NEGATIVITY:
        return np.log2(1.0 + reduced_function_batch(ReducedFunctionId.H_HAT, D))
    if measure is MeasureId.SCHMIDT_RANK:
        return _positive_count(D, numkit.RANK_TOL).astype(float)
    return reduced_function_batch(MEASURE_TO_H[measure], D, d)


# -- pure-state measures -----------------------------------------------------


def _pure_bipartite(psi, cut):
    if not isinstance(psi, PureState):
        raise ValidationError("State.type", "this measure is defined on pure states")
    return bipartition(psi, cut) if cut is not None else bipartition(psi)


def pure_value(measure, psi, k=2, cut=None, d=None):
    """Evaluate any pure-state measure on a bipartite (or explicitly cut) state.

    ``d`` overrides the reduced-subsystem dimension used by ``E2_NORM``.
    """
    psi = _pure_bipartite(psi, cut)
    delta = schmidt_spectrum(psi)
    return float(measure_from_spectra(measure, delta, k=k, d=d or psi.dims[0])[0])


def e_k(psi, k, cut=None):
    if k < 2:
        raise ValidationError("MeasureId.k", "E_K needs k >= 2")
    return pure_value(MeasureId.E_K, psi, k=k, cut=cut)


def e2_raw(psi, cut=None):
    """``1 - lambda_1^2`` (equivalently ``1 - ||rho^A||``)."""
    return pure_value(MeasureId.E2_RAW, psi, cut=cut)


def e2_normalized(psi, cut=None, d=None):
    """``d/(d-1) * e2_raw``; ``d`` defaults to the dimension of the left party."""
    return pure_value(MeasureId.E2_NORM, psi, cut=cut, d=d)


def e_min(psi, cut=None):
    return pure_value(MeasureId.E_MIN, psi, cut=cut)


def e_min_reinforced(psi, cut=None):
    return pure_value(MeasureId.E_MIN_REINFORCED, psi, cut=cut)


def tangle(psi, cut=None):
    return pure_value(MeasureId.TANGLE, psi, cut=cut)


def concurrence(psi, cut=None):
    return pure_value(MeasureId.CONCURRENCE, psi, cut=cut)


def schmidt_rank(psi, cut=None):
    return int(pure_value(MeasureId.SCHMIDT_RANK, psi, cut=cut))


# -- negativity family (direct on mixed states) ------------------------------


def _pt_eigenvalues(state, cut):
    rho = as_density(bipartition(state, cut) if cut is not None else bipartition(state))
    return np.linalg.eigvalsh(numkit.check_hermitian(partial_transpose(rho, 0)))


def negativity(state, cut=None):
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    w = _pt_eigenvalues(state, cut)
    return float(-np.sum(w[w < -1e-12]))


def partial_negativity(state, cut=None):
    """Operator norm of the negative part of the partial transpose."""
    rho = as_density(bipartition(state, cut) if cut is not None else bipartition(state))
    return numkit.operator_norm(numkit.negative_part(partial_transpose(rho, 0)))


def log_partial_negativity(state, cut=None):
    return float(np.log2(partial_negativity(state, cut) + 1.0))


def evaluate(measure, state, k=2, cut=None, d=None):
    """Evaluate ``measure`` on ``state`` without any optimization.

    Mixed states are accepted only for the negativity family; roof-extended
    measures on mixed states go through :func:`monotone_lab.roof.roof_value`.
    """
    measure = MeasureId(measure)
    if measure is MeasureId.NEGATIVITY:
        return negativity(state, cut)
    if measure is MeasureId.PARTIAL_NEGATIVITY:
        return partial_negativity(state, cut)
    if measure is MeasureId.LOG_PARTIAL_NEGATIVITY:
        return log_partial_negativity(state, cut)
    if isinstance(state, DensityMatrix):
        raise CapabilityError(f"{measure.value} on a mixed state needs the convex-roof optimizer")
    return pure_value(measure, state, k=k, cut=cut, d=d)


def describe(measure, k=2, d=None, cut=None):
    """Human-readable label with the convention used (raw/normalized, cut)."""
    measure = MeasureId(measure)
    name = f"E_{k}" if measure is MeasureId.E_K else measure.value
    notes = []
    if measure is MeasureId.E2_RAW:
        notes.append("raw")
    if measure is MeasureId.E2_NORM:
        notes.append(f"normalized d={d}" if d else "normalized")
    if cut:
        notes.append(f"cut {cut}")
    return f"{name} ({', '.join(notes)})" if notes else name
