"""
Convex-roof extension of pure-state quantities.

Every pure-state decomposition of a rank-``r`` density matrix with ``m``
members is obtained from the spectral ensemble ``{p_j, |psi_j>}`` through an
``m x r`` isometry ``V``::

    sqrt(q_k) |phi_k> = sum_j V_kj sqrt(p_j) |psi_j>

The optimizer searches over ``V``: each restart draws a Haar-random isometry
and refines it by left-multiplying small random unitaries ``exp(i s H)``,
accepting only improvements and halving ``s`` after a streak of rejections.
The search is derivative-free, so non-smooth quantities (``E_min``, the
partial negativity) are handled the same way as smooth ones.

The value returned is attained by the reported ensemble, hence it is always an
upper bound on the true roof.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from monotone_lab import numkit
from monotone_lab.exceptions import CapabilityError, ValidationError
from monotone_lab.measures import MeasureId, measure_from_spectra, negativity, schmidt_rank
from monotone_lab.states import DensityMatrix, PureState, as_density, bipartition

MAX_RANK = 8
DROP_WEIGHT = 1e-12


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Pure-state decomposition ``sum_j p_j |psi_j><psi_j|``."""

    probabilities: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        states = tuple(self.states)
        if p.ndim != 1 or p.size != len(states) or p.size == 0:
            raise ValidationError("Ensemble.size", "need one probability per state")
        if np.any(p <= 0):
            raise ValidationError("Ensemble.positive", "probabilities must be > 0")
        if abs(p.sum() - 1) > 1e-9:
            raise ValidationError("Ensemble.normalized", f"probabilities sum to {p.sum():.12g}")
        if any(s.dims != states[0].dims for s in states):
            raise ValidationError("Ensemble.signature", "states must share dimensions")
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "states", states)

    @property
    def dims(self):
        return self.states[0].dims

    def __len__(self):
        return len(self.states)

    def matrix(self):
        """Rows ``sqrt(p_j) psi_j``."""
        return np.sqrt(self.probabilities)[:, None] * np.array([s.amplitudes for s in self.states])

    def density(self):
        W = self.matrix()
        return DensityMatrix(W.T @ W.conj(), self.dims)


@dataclass(frozen=True, eq=False)
class RoofResult:
    value: float
    best_ensemble: Ensemble
    restarts_used: int
    converged: bool


@dataclass(frozen=True)
class RoofOptions:
    """Optimizer settings.

    ``ensemble_sizes`` defaults to ``r, r+1, ..., 2r`` for a rank-``r`` input.
    ``workers > 1`` runs restarts on a thread pool; results do not depend on it.
    """

    ensemble_sizes: tuple = None
    restarts: int = 32
    seed: int = 42
    tol: float = 1e-8
    max_iter: int = 2000
    initial_step: float = 0.5
    min_step: float = 1e-9
    patience: int = 6
    window: int = 100
    zero_tol: float = 1e-15
    workers: int = 1


def eig_ensemble(rho, rank_tol=numkit.RANK_TOL):
    """Spectral decomposition as an ensemble (eigenvalues at or below ``rank_tol`` dropped)."""
    rho = as_density(rho)
    w, V = numkit.eig_hermitian(rho.matrix)
    keep = w > rank_tol
    p = w[keep] / w[keep].sum()
    return Ensemble(p, tuple(PureState(V[:, j], rho.dims) for j in np.flatnonzero(keep)))


def _rows_to_ensemble(W, dims):
    q = np.sum(np.abs(W) ** 2, axis=1)
    keep = q > DROP_WEIGHT
    W, q = W[keep], q[keep]
    states = tuple(PureState(row / np.sqrt(qk), dims) for row, qk in zip(W, q))
    return Ensemble(q / q.sum(), states)


def apply_isometry(base, V, tol=1e-9):
    """Ensemble ``sqrt(q_k)|phi_k> = sum_j V_kj sqrt(p_j)|psi_j>``; members with ``q_k < 1e-12`` dropped."""
    V = numkit.as_matrix(V, "V")
    m, r = V.shape
    if r != len(base) or m < r:
        raise ValidationError("Isometry.shape", f"V is {m}x{r} for an ensemble of {len(base)}")
    dev = np.max(np.abs(V.conj().T @ V - np.eye(r)))
    if dev > tol:
        raise ValidationError("Isometry.orthonormal", f"V^dagger V deviates from I by {dev:.3g}")
    return _rows_to_ensemble(V @ base.matrix(), base.dims)


# -- batch evaluators: rows of W are unnormalized members sqrt(q_k)|phi_k> ----


def entanglement_evaluator(measure, dims, k=2, d=None):
    """Return ``f(W) -> sum_k q_k E(phi_k)`` for a bipartite ``dims``."""
    measure = MeasureId(measure)
    dA, dB = dims
    d = d or dA

    def evaluate(W):
        s2 = np.linalg.svd(W.reshape(-1, dA, dB), compute_uv=False) ** 2
        q = s2.sum(axis=1)
        keep = q > DROP_WEIGHT
        q = q[keep]
        return float(q @ measure_from_spectra(measure, s2[keep] / q[:, None], k=k, d=d))

    return evaluate


def _evaluate_ensemble(evaluator, ensemble):
    return evaluator(ensemble.matrix())


def _descend(evaluate, base, V, rng, opts):
    """Random-unitary descent from ``V``; returns ``(value, V, converged)``."""
    m = V.shape[0]
    f = evaluate(V @ base)
    step = opts.initial_step
    fails = 0
    marker = f
    for it in range(1, opts.max_iter + 1):
        if f <= 0.0:
            return f, V, True
        H = numkit.random_hermitian(m, rng)
        H /= np.linalg.norm(H)
        Vn = numkit.unitary_from_hermitian(H, step) @ V
        fn = evaluate(Vn @ base)
        if fn < f:
            V, f = Vn, fn
            fails = 0
        else:
            fails += 1
            if fails >= opts.patience:
                step /= 2
                fails = 0
                if step < opts.min_step:
                    return f, V, True
        if it % opts.window == 0:
            if marker - f <= opts.tol * max(abs(marker), 1e-300):
                return f, V, True
            marker = f
    return f, V, False


def _check_rank(rho):
    r = rho.rank()
    if r > MAX_RANK:
        raise CapabilityError(f"rank {r} exceeds the supported maximum of {MAX_RANK}")
    return r


def convex_roof(rho, evaluator, opts=None):
    """Minimize ``evaluator`` over decompositions of ``rho``.

    ``evaluator(W)`` maps an ``(m, dim)`` array of unnormalized members to the
    ensemble average. The spectral ensemble is always scored first, so the
    result never exceeds it.
    """
    opts = opts or RoofOptions()
    rho = as_density(rho)
    r = _check_rank(rho)
    base_ens = eig_ensemble(rho)
    base = base_ens.matrix()
    best_value = _evaluate_ensemble(evaluator, base_ens)
    best_V = np.eye(r, dtype=complex)
    converged = True
    if r == 1 or best_value <= opts.zero_tol:
        return RoofResult(best_value, base_ens, 0, True)

    sizes = tuple(opts.ensemble_sizes or range(r, 2 * r + 1))
    if any(m < r for m in sizes):
        raise ValidationError("RoofOptions.ensemble_sizes", f"sizes must be >= rank {r}")
    jobs = [(m, i) for m in sizes for i in range(opts.restarts)]

    def run(job):
        m, i = job
        rng = np.random.default_rng([opts.seed, m, i])
        V0 = numkit.haar_isometry(m, r, rng)
        return _descend(evaluator, base, V0, rng, opts)

    # A job at (numerical) zero is optimal; the lowest-indexed such job wins,
    # which lets the sequential path stop early with the same answer.
    outcomes = []
    if opts.workers > 1:
        with ThreadPoolExecutor(opts.workers) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        for job in jobs:
            outcomes.append(run(job))
            if outcomes[-1][0] <= opts.zero_tol:
                break
    for value, V, conv in outcomes:
        if value <= opts.zero_tol:
            best_value, best_V, converged = value, V, conv
            break
        if value < best_value:
            best_value, best_V, converged = value, V, conv
    used = next((i + 1 for i, o in enumerate(outcomes) if o[0] <= opts.zero_tol), len(outcomes))

    ens = _rows_to_ensemble(best_V @ base, rho.dims)
    value = _evaluate_ensemble(evaluator, ens)
    return RoofResult(value, ens, used, converged)


def _bipartite_density(state, cut):
    rho = as_density(bipartition(state, cut) if cut is not None else bipartition(state))
    return rho


def roof_value(state, measure, opts=None, k=2, cut=None, d=None):
    """Convex-roof upper estimate of ``measure`` for a bipartite (or cut) state."""
    measure = MeasureId(measure)
    if measure is MeasureId.SCHMIDT_RANK:
        raise CapabilityError("use schmidt_number for the Schmidt-rank roof")
    rho = _bipartite_density(state, cut)
    return convex_roof(rho, entanglement_evaluator(measure, rho.dims, k=k, d=d), opts)


@dataclass(frozen=True)
class SchmidtNumberBounds:
    lower: int
    upper: int
    witness: Ensemble = None


def schmidt_number(state, opts=None, cut=None, certify_tol=1e-10):
    """Lower/upper bounds on the Schmidt number.

    Lower bound: 2 when the partial transpose has a negative eigenvalue, else 1.
    Upper bound: the smallest ``k`` for which the optimizer drives the roof of
    ``E_{k+1}`` (weight beyond the ``k`` largest Schmidt coefficients) to zero,
    with every member then of Schmidt rank ``<= k``.
    """
    state = bipartition(state, cut) if cut is not None else bipartition(state)
    if isinstance(state, PureState):
        r = schmidt_rank(state)
        return SchmidtNumberBounds(r, r, Ensemble([1.0], (state,)))
    rho = state
    _check_rank(rho)
    lower = 2 if negativity(rho) > numkit.RANK_TOL else 1
    kmax = min(rho.dims)
    for kk in range(lower, kmax):
        res = convex_roof(rho, entanglement_evaluator(MeasureId.E_K, rho.dims, k=kk + 1), opts)
        ranks = [schmidt_rank(s) for s in res.best_ensemble.states]
        if res.value <= certify_tol and max(ranks) <= kk:
            return SchmidtNumberBounds(lower, kk, res.best_ensemble)
    return SchmidtNumberBounds(lower, kmax, eig_ensemble(rho))

