"""
Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays. Spectra are 1-D float arrays sorted in
descending order. The numerical tolerances below are shared package-wide:

HERMITIAN_TOL
    maximum absolute deviation ``|M - M^dagger|`` accepted as Hermitian.
RANK_TOL
    eigenvalues of trace-normalized operators at or below this value count as
    zero (Schmidt rank, ``min_norm``, reduced-state ranks).
MAJORIZATION_TOL
    slack allowed in partial-sum comparisons.
"""
import numpy as np

from monotone_lab.exceptions import ValidationError

HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-9
MAJORIZATION_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9


def as_rng(seed=None):
    """Return a ``numpy.random.Generator``; generators pass through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def as_matrix(M, name="M"):
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValidationError("ComplexMatrix.shape", f"{name} must be 2-D, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("ComplexMatrix.finite", f"{name} has non-finite entries")
    return M.astype(complex, copy=False)


def check_hermitian(M, tol=HERMITIAN_TOL, name="M"):
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ValidationError("ComplexMatrix.square", f"{name} has shape {M.shape}")
    dev = np.max(np.abs(M - M.conj().T)) if M.size else 0.0
    if dev > tol:
        raise ValidationError("ComplexMatrix.hermitian", f"{name} deviates by {dev:.3g}")
    return (M + M.conj().T) / 2


def _fix_column_phases(V):
    # Largest-magnitude component of each column made real positive.
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    phases = np.ones_like(pivots)
    nz = np.abs(pivots) > 0
    phases[nz] = np.abs(pivots[nz]) / pivots[nz]
    return V * phases


def eig_hermitian(M):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with values descending and eigenvectors as
    orthonormal columns, phase-fixed so that each column's largest-magnitude
    entry is real and positive.
    """
    H = check_hermitian(M)
    w, V = np.linalg.eigh(H)
    order = np.argsort(-w, kind="stable")
    return w[order], _fix_column_phases(V[:, order])


def eigvals_hermitian(M):
    """Descending eigenvalues only (no eigenvector phase fixing)."""
    return np.linalg.eigvalsh(check_hermitian(M))[::-1]


def svd(M):
    """Thin SVD returning ``(U, s, V)`` with ``M = U @ diag(s) @ V^dagger``.

    Singular values are descending; ``U`` and ``V`` have orthonormal columns.
    """
    M = as_matrix(M)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    return U, s, Vh.conj().T


def operator_norm(M):
    """Largest singular value."""
    M = as_matrix(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def check_density(rho, name="rho"):
    """Validate a density matrix and return its symmetrized copy."""
    H = check_hermitian(rho, name=name)
    tr = np.trace(H).real
    if abs(tr - 1) > TRACE_TOL:
        raise ValidationError("DensityMatrix.trace", f"{name} has trace {tr:.12g}")
    lo = np.linalg.eigvalsh(H)[0]
    if lo < -PSD_TOL:
        raise ValidationError("DensityMatrix.psd", f"{name} has eigenvalue {lo:.3g}")
    return H


def min_norm_of_spectrum(delta, rank_tol=RANK_TOL):
    """Smallest strictly positive entry of a probability vector, or 0 for rank one."""
    delta = np.asarray(delta, dtype=float)
    pos = delta[delta > rank_tol]
    if pos.size <= 1:
        return 0.0
    smallest = float(pos.min())
    return smallest if smallest < 1 - rank_tol else 0.0


def min_norm(rho):
    """The ``||rho||_min`` functional: smallest positive eigenvalue unless ``rho`` is pure."""
    H = check_density(rho)
    return min_norm_of_spectrum(np.linalg.eigvalsh(H))


def negative_part(H, tol=1e-12):
    """PSD matrix ``sum_{d_i < -tol} (-d_i) |v_i><v_i|`` built from the negative eigenvalues."""
    w, V = np.linalg.eigh(check_hermitian(H))
    neg = w < -tol
    if not np.any(neg):
        return np.zeros_like(V)
    Vn = V[:, neg]
    return (Vn * -w[neg]) @ Vn.conj().T


def _as_distribution(x, name):
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValidationError("SpectrumVector.finite", f"{name} is empty or non-finite")
    if abs(x.sum() - 1) > 1e-8:
        raise ValidationError("SpectrumVector.sum", f"{name} sums to {x.sum():.12g}")
    return x


def majorizes(x, y, tol=MAJORIZATION_TOL):
    """True iff ``x`` is majorized by ``y`` (every descending partial sum of ``y`` dominates ``x``'s).

    Shorter vectors are zero-padded.
    """
    x = _as_distribution(x, "x")
    y = _as_distribution(y, "y")
    n = max(x.size, y.size)
    xs = np.sort(np.pad(x, (0, n - x.size)))[::-1]
    ys = np.sort(np.pad(y, (0, n - y.size)))[::-1]
    return bool(np.all(np.cumsum(ys) >= np.cumsum(xs) - tol))


# -- random objects ----------------------------------------------------------


def ginibre(shape, rng):
    rng = as_rng(rng)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_hermitian(d, rng=None):
    X = as_rng(rng).standard_normal((2, d, d))
    G = X[0] + 1j * X[1]
    return (G + G.conj().T) / 2


def random_density_matrix(d, rank=None, rng=None):
    """Ginibre-ensemble density matrix ``G G^dagger / tr``."""
    G = ginibre((d, rank or d), rng)
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_unit_vector(d, rng=None):
    v = ginibre(d, rng)
    return v / np.linalg.norm(v)


def haar_isometry(m, r, rng=None):
    """Haar-random ``m x r`` isometry via QR of a Ginibre matrix."""
    if r > m:
        raise ValidationError("Isometry.shape", f"need m >= r, got m={m}, r={r}")
    Q, R = np.linalg.qr(ginibre((m, r), rng))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_simplex(n, d, rng=None):
    """``n`` points uniform on the probability simplex in ``R^d`` (normalized exponentials)."""
    x = as_rng(rng).exponential(size=(n, d))
    return x / x.sum(axis=1, keepdims=True)


def unitary_from_hermitian(H, angle=1.0):
    """``exp(1j * angle * H)`` for Hermitian ``H``."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * angle * w)) @ V.conj().T
