"""
State types, subsystem algebra and the named states used throughout the package.

Subsystems are labelled ``A, B, C`` in order and flattened big-endian: the
basis index of ``|i_A i_B i_C>`` is ``(i_A * d_B + i_B) * d_C + i_C``.
Tripartite objects are never cut implicitly; pass a cut such as ``"A|BC"``
to :func:`bipartition` (or to the measure functions that accept ``cut``).
"""
from dataclasses import dataclass, field
from math import prod

import numpy as np

from monotone_lab import numkit
from monotone_lab.exceptions import ValidationError

PARTIES = "ABC"
NORM_TOL = 1e-10


def _check_dims(dims, size):
    dims = tuple(int(d) for d in dims)
    if not dims or len(dims) > 3:
        raise ValidationError("DimSignature.parties", f"expected 1 to 3 subsystems, got {len(dims)}")
    if any(d < 2 for d in dims):
        raise ValidationError("DimSignature.dims", f"every dimension must be >= 2, got {dims}")
    if prod(dims) != size:
        raise ValidationError("DimSignature.product", f"dims {dims} do not multiply to {size}")
    return dims


def _canonical_phase(v):
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size == 0:
        return v
    a = v[nz[0]]
    return v * (abs(a) / a)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector with its subsystem dimensions.

    The global phase is fixed on construction: the first nonzero amplitude is
    made real and positive.
    """

    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        if not np.all(np.isfinite(v)):
            raise ValidationError("PureState.finite", "amplitudes contain non-finite values")
        dims = _check_dims(self.dims, v.size)
        norm = np.linalg.norm(v)
        if abs(norm - 1) > NORM_TOL:
            raise ValidationError("PureState.normalized", f"norm is {norm:.12g}")
        v = _canonical_phase(v / norm)
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self):
        return self.amplitudes.size

    @property
    def n_parties(self):
        return len(self.dims)

    def tensor(self):
        return self.amplitudes.reshape(self.dims)

    def density(self):
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix with subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        M = numkit.check_density(self.matrix)
        dims = _check_dims(self.dims, M.shape[0])
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def n_parties(self):
        return len(self.dims)

    def spectrum(self):
        return numkit.eigvals_hermitian(self.matrix)

    def rank(self, tol=numkit.RANK_TOL):
        return int(np.sum(self.spectrum() > tol))

    def density(self):
        return self


@dataclass(frozen=True, eq=False)
class SchmidtData:
    """Schmidt form ``sum_i c_i |l_i>|r_i>``; bases are stored as matrix columns."""

    coefficients: np.ndarray
    rank: int
    left_basis: np.ndarray
    right_basis: np.ndarray

    def spectrum(self):
        return self.coefficients**2

    def reconstruct(self):
        return np.einsum("i,ai,bi->ab", self.coefficients, self.left_basis, self.right_basis).ravel()


def as_density(state):
    if isinstance(state, PureState):
        return state.density()
    if isinstance(state, DensityMatrix):
        return state
    raise ValidationError("State.type", f"expected PureState or DensityMatrix, got {type(state).__name__}")


# -- subsystem algebra -------------------------------------------------------


def _check_indices(indices, n, what):
    indices = [int(i) for i in indices]
    if not indices:
        raise ValidationError(f"{what}.nonempty", "no subsystems given")
    if len(set(indices)) != len(indices) or any(i < 0 or i >= n for i in indices):
        raise ValidationError(f"{what}.indices", f"invalid subsystem indices {indices} for {n} parties")
    return indices


def partial_trace(state, keep):
    """Reduced density matrix on the subsystems listed in ``keep`` (kept in ascending order)."""
    rho = as_density(state)
    n = rho.n_parties
    keep = sorted(_check_indices(keep, n, "partial_trace.keep"))
    if len(keep) == n:
        return rho
    dims = rho.dims
    letters = "abcdefgh"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    T = np.einsum("".join(row) + "".join(col) + "->" + out, rho.matrix.reshape(dims + dims))
    kd = tuple(dims[i] for i in keep)
    D = prod(kd)
    M = T.reshape(D, D)
    return DensityMatrix((M + M.conj().T) / 2, kd)


def partial_transpose(state, sys=0):
    """Matrix obtained by transposing the indices of subsystem ``sys``."""
    rho = as_density(state)
    n = rho.n_parties
    (sys,) = _check_indices([sys], n, "partial_transpose.sys")
    T = rho.matrix.reshape(rho.dims + rho.dims)
    T = np.swapaxes(T, sys, n + sys)
    return T.reshape(rho.dim, rho.dim)


def permute(state, order):
    """Reorder subsystems; ``order[i]`` is the old index placed at position ``i``."""
    order = _check_indices(order, state.n_parties, "permute.order")
    if len(order) != state.n_parties:
        raise ValidationError("permute.order", "order must list every subsystem")
    dims = tuple(state.dims[i] for i in order)
    if isinstance(state, PureState):
        return PureState(np.transpose(state.tensor(), order).ravel(), dims)
    n = state.n_parties
    T = np.transpose(state.matrix.reshape(state.dims * 2), order + [n + i for i in order])
    return DensityMatrix(T.reshape(state.dim, state.dim), dims)


def parse_cut(cut, n_parties):
    """Parse ``"A|BC"`` style descriptors into ``(left, right)`` index lists."""
    if not isinstance(cut, str) or cut.count("|") != 1:
        raise ValidationError("Cut.format", f"cut must look like 'A|BC', got {cut!r}")
    sides = []
    for part in cut.replace(" ", "").upper().split("|"):
        if not part:
            raise ValidationError("Cut.format", f"empty side in {cut!r}")
        idx = []
        for ch in part:
            i = PARTIES.find(ch)
            if i < 0 or i >= n_parties:
                raise ValidationError("Cut.parties", f"{ch!r} is not one of {PARTIES[:n_parties]}")
            idx.append(i)
        sides.append(idx)
    left, right = sides
    if set(left) & set(right) or len(set(left)) != len(left) or len(set(right)) != len(right):
        raise ValidationError("Cut.disjoint", f"repeated subsystem in {cut!r}")
    return left, right


def bipartition(state, cut=None):
    """Coarse-grain ``state`` into a bipartite object across ``cut``.

    Parties absent from the cut are traced out, so ``"A|B"`` on a tripartite
    pure state yields the mixed state ``rho^AB``. Bipartite inputs pass through
    when ``cut`` is ``None`` or ``"A|B"``.
    """
    n = state.n_parties
    if cut is None:
        if n != 2:
            raise ValidationError("Cut.required", f"{n}-partite state needs an explicit cut")
        return state
    left, right = parse_cut(cut, n)
    used = sorted(left + right)
    if len(used) < n:
        state = partial_trace(state, used)
        remap = {old: new for new, old in enumerate(used)}
        left = [remap[i] for i in left]
        right = [remap[i] for i in right]
    order = left + right
    if order != list(range(len(order))):
        state = permute(state, order)
    dl = prod(state.dims[: len(left)])
    dr = prod(state.dims[len(left) :])
    if isinstance(state, PureState):
        return PureState(state.amplitudes, (dl, dr))
    return DensityMatrix(state.matrix, (dl, dr))


def _require_bipartite(state):
    if state.n_parties != 2:
        raise ValidationError("Cut.required", f"{state.n_parties}-partite state needs an explicit cut")


def schmidt(psi, cut=None, rank_tol=numkit.RANK_TOL):
    """Schmidt decomposition of a bipartite (or explicitly cut) pure state."""
    if not isinstance(psi, PureState):
        raise ValidationError("State.type", "schmidt needs a PureState")
    psi = bipartition(psi, cut) if cut is not None else psi
    _require_bipartite(psi)
    U, s, V = numkit.svd(psi.amplitudes.reshape(psi.dims))
    r = int(np.sum(s**2 > rank_tol))
    r = max(r, 1)
    # V columns satisfy M = U S V^dagger, so the right Schmidt vectors are conj(V).
    return SchmidtData(s[:r].copy(), r, U[:, :r], V[:, :r].conj())


def schmidt_spectrum(psi, cut=None):
    """Squared Schmidt coefficients (all ``min(d_A, d_B)`` of them, descending)."""
    psi = bipartition(psi, cut) if cut is not None else psi
    _require_bipartite(psi)
    s = np.linalg.svd(psi.amplitudes.reshape(psi.dims), compute_uv=False)
    return s**2


# -- factories ---------------------------------------------------------------


def basis_state(dims, indices):
    v = np.zeros(prod(dims), dtype=complex)
    v[np.ravel_multi_index(tuple(indices), tuple(dims))] = 1
    return PureState(v, tuple(dims))


def product_state(*vectors):
    vecs = [np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in vectors]
    out = vecs[0]
    for v in vecs[1:]:
        out = np.kron(out, v)
    return PureState(out, tuple(v.size for v in vecs))


def product_density(*rhos):
    mats = [numkit.check_density(r) for r in rhos]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return DensityMatrix(out, tuple(m.shape[0] for m in mats))


def mixture(states, weights):
    weights = np.asarray(weights, dtype=float)
    rhos = [as_density(s) for s in states]
    M = sum(w * r.matrix for w, r in zip(weights, rhos))
    return DensityMatrix(M, rhos[0].dims)


def random_pure_state(dims, rng=None):
    return PureState(numkit.random_unit_vector(prod(dims), rng), tuple(dims))


def random_density(dims, rank=None, rng=None):
    return DensityMatrix(numkit.random_density_matrix(prod(dims), rank, rng), tuple(dims))


def pure_from_schmidt(coeffs, d_A, d_B):
    """``sum_i c_i |i>|i>`` in ``d_A x d_B``; coefficients need not be sorted."""
    c = np.asarray(coeffs, dtype=float)
    if c.size > min(d_A, d_B):
        raise ValidationError("Schmidt.length", f"{c.size} coefficients exceed min(d_A, d_B)")
    if np.any(c < 0):
        raise ValidationError("Schmidt.nonnegative", "coefficients must be >= 0")
    if abs(np.sum(c**2) - 1) > NORM_TOL:
        raise ValidationError("Schmidt.normalized", f"squares sum to {np.sum(c**2):.12g}")
    M = np.zeros((d_A, d_B), dtype=complex)
    M[np.arange(c.size), np.arange(c.size)] = c
    return PureState(M.ravel(), (d_A, d_B))


def make_bell():
    """``(|00> + |11>) / sqrt(2)``."""
    return pure_from_schmidt([2**-0.5, 2**-0.5], 2, 2)


def make_max_entangled(d):
    return pure_from_schmidt(np.full(d, d**-0.5), d, d)


def make_w():
    """Three-qubit W state ``(|100> + |010> + |001>) / sqrt(3)``."""
    v = np.zeros(8, dtype=complex)
    v[[0b100, 0b010, 0b001]] = 3**-0.5
    return PureState(v, (2, 2, 2))


E2_CASE = "e2"
EMIN = "emin"


@dataclass(frozen=True)
class PhiParams:
    """Schmidt amplitudes of the two branches of the 3x4x2 counterexample.

    ``regime`` selects the constraint set: ``"e2"`` requires
    ``a0^2 = a0'^2 >= 1/2`` with ``a0 > a1 >= a2 > 0`` (same for primes);
    ``"emin"`` requires ``a0 = a0'`` with ``a1 >= a2 > a0`` (same for primes).
    Both regimes need ``a1' a2 != a1 a2'``.
    """

    a: tuple
    a_prime: tuple
    regime: str = E2_CASE
    tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        b = tuple(float(x) for x in self.a_prime)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "a_prime", b)
        tol = self.tol
        if len(a) != 3 or len(b) != 3:
            raise ValidationError("PhiParams.length", "a and a_prime need three entries")
        for name, v in (("a", a), ("a_prime", b)):
            if abs(sum(x * x for x in v) - 1) > NORM_TOL:
                raise ValidationError("PhiParams.normalized", f"squares of {name} do not sum to 1")
            if min(v) <= 0:
                raise ValidationError("PhiParams.positive", f"{name} must be strictly positive")
        if abs(a[0] - b[0]) > tol:
            raise ValidationError("PhiParams.equal_a0", "a0 must equal a0'")
        if self.regime == E2_CASE:
            if a[0] ** 2 < 0.5 - tol:
                raise ValidationError("PhiParams.a0_squared", "e2 regime needs a0^2 >= 1/2")
            for name, v in (("a", a), ("a_prime", b)):
                if not (v[0] > v[1] and v[1] >= v[2] - tol):
                    raise ValidationError("PhiParams.ordering", f"{name} needs a0 > a1 >= a2")
        elif self.regime == EMIN:
            for name, v in (("a", a), ("a_prime", b)):
                if not (v[1] >= v[2] - tol and v[2] > v[0]):
                    raise ValidationError("PhiParams.ordering", f"{name} needs a1 >= a2 > a0")
        else:
            raise ValidationError("PhiParams.regime", f"unknown regime {self.regime!r}")
        if abs(b[1] * a[2] - a[1] * b[2]) <= tol:
            raise ValidationError("PhiParams.cross_condition", "needs a1' a2 != a1 a2'")

    @classmethod
    def from_squares(cls, a2, a2_prime, regime=E2_CASE):
        return cls(tuple(np.sqrt(a2)), tuple(np.sqrt(a2_prime)), regime)


def make_phi(params):
    """Tripartite 3x4x2 state ``(|psi0>|0> + |psi1>|1>) / sqrt(2)``.

    ``|psi0> = a0|00> + a1|11> + a2|22>`` and ``|psi1> = a0'|03> + a1'|12> + a2'|21>``;
    B needs four levels because ``|psi1>`` occupies ``|3>``.
    """
    a, b = params.a, params.a_prime
    T = np.zeros((3, 4, 2), dtype=complex)
    T[0, 0, 0], T[1, 1, 0], T[2, 2, 0] = a
    T[0, 3, 1], T[1, 2, 1], T[2, 1, 1] = b
    return PureState(T.ravel() / np.sqrt(2), (3, 4, 2))


def phi_branches(params):
    """The bipartite branch states ``|psi0>, |psi1>`` in 3x4."""
    a, b = params.a, params.a_prime
    M0 = np.zeros((3, 4), dtype=complex)
    M1 = np.zeros((3, 4), dtype=complex)
    M0[0, 0], M0[1, 1], M0[2, 2] = a
    M1[0, 3], M1[1, 2], M1[2, 1] = b
    return PureState(M0.ravel(), (3, 4)), PureState(M1.ravel(), (3, 4))


def make_omega(l0, l1, l2):
    """3x2x2 state ``l0|0>|00> + l1|1>|10> + l2|2>|11>``."""
    if not (l0 >= l1 >= l2):
        raise ValidationError("Omega.ordering", "needs l0 >= l1 >= l2")
    if l2 <= 0:
        raise ValidationError("Omega.positive", "needs l2 > 0")
    if abs(l0**2 + l1**2 + l2**2 - 1) > NORM_TOL:
        raise ValidationError("Omega.normalized", "squares must sum to 1")
    T = np.zeros((3, 2, 2), dtype=complex)
    T[0, 0, 0], T[1, 1, 0], T[2, 1, 1] = l0, l1, l2
    return PureState(T.ravel(), (3, 2, 2))


@dataclass(frozen=True)
class AcinParams:
    """Coefficients of the three-qubit canonical form."""

    lambdas: tuple
    phi: float = 0.0

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if len(lam) != 5:
            raise ValidationError("AcinParams.length", "needs five coefficients")
        if min(lam) < 0:
            raise ValidationError("AcinParams.nonnegative", "coefficients must be >= 0")
        if not 0 <= self.phi <= np.pi:
            raise ValidationError("AcinParams.phase", "phase must lie in [0, pi]")
        if abs(sum(x * x for x in lam) - 1) > NORM_TOL:
            raise ValidationError("AcinParams.normalized", "squares must sum to 1")

    def genuinely_entangled(self, tol=numkit.RANK_TOL):
        l0, _, l2, l3, l4 = self.lambdas
        return l0 > tol and l2**2 + l4**2 > tol and l3**2 + l4**2 > tol

    def ab_separable(self, tol=numkit.RANK_TOL):
        return self.lambdas[3] <= tol

    def ac_separable(self, tol=numkit.RANK_TOL):
        return self.lambdas[2] <= tol


def make_acin(params):
    """``l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>``."""
    l0, l1, l2, l3, l4 = params.lambdas
    v = np.zeros(8, dtype=complex)
    v[0b000] = l0
    v[0b100] = l1 * np.exp(1j * params.phi)
    v[0b101] = l2
    v[0b110] = l3
    v[0b111] = l4
    return PureState(v, (2, 2, 2))
