"""
Monogamy checks, concavity scans, upper bounds, coherence and figure data.

The monogamy checker never claims that a measure *is* monogamous. It either
finds a violation witness (the disentangling condition ``E(A|BC) = E(AB)``
holds while ``AC`` is certifiably entangled), reports a consistent instance,
or gives up as inconclusive.
"""
import csv
import io
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from monotone_lab import numkit
from monotone_lab.exceptions import CapabilityError, ValidationError
from monotone_lab.measures import (
    DIRECT_MIXED,
    MeasureId,
    ReducedFunctionId,
    describe,
    evaluate,
    parse_reduced_function,
    partial_negativity,
    pure_value,
    reduced_function,
    reduced_function_batch,
)
from monotone_lab.roof import convex_roof, roof_value, schmidt_number
from monotone_lab.states import (
    PureState,
    as_density,
    bipartition,
    make_acin,
    partial_trace,
    partial_transpose,
    pure_from_schmidt,
)

GAP_TOL = 1e-6
WITNESS_FLOOR = 1e-6
EQUALITY_TOL = 1e-12
CONCAVITY_TOL = 1e-9

# Roof measures that vanish only on separable states, so an NPT reduced state
# certifies a strictly positive roof.
FAITHFUL = frozenset(
    {
        MeasureId.E2_RAW,
        MeasureId.E2_NORM,
        MeasureId.E_MIN,
        MeasureId.E_MIN_REINFORCED,
        MeasureId.TANGLE,
        MeasureId.CONCURRENCE,
    }
)


class Verdict(str, Enum):
    VIOLATION_WITNESS = "VIOLATION_WITNESS"
    CONSISTENT = "CONSISTENT"
    INCONCLUSIVE = "INCONCLUSIVE"


class Strictness(str, Enum):
    STRICT_CANDIDATE = "STRICT_CANDIDATE"
    NON_STRICT_WITNESSED = "NON_STRICT_WITNESSED"
    CONCAVITY_VIOLATED = "CONCAVITY_VIOLATED"


@dataclass
class MonogamyReport:
    """Outcome of a disentangling-condition test on a tripartite pure state.

    ``e_ab``/``e_ac`` are roof upper estimates for convex-roof measures and
    exact values for the negativity family. ``e_ac_npt_proxy`` is the partial
    negativity of ``rho^AC``; a positive value certifies that ``AC`` is
    entangled even though the roof estimate is only an upper bound.
    """

    measure: str
    convention: str
    e_a_bc: float
    e_ab: float
    e_ac: float
    disentangling_gap: float
    verdict: Verdict
    gap_tol: float = GAP_TOL
    witness_floor: float = WITNESS_FLOOR
    e_ac_npt_proxy: float = None
    method: str = "direct"
    details: dict = field(default_factory=dict)

    def to_dict(self):
        out = asdict(self)
        out["verdict"] = self.verdict.value
        return out


def npt_witness(state, cut=None):
    """Smallest eigenvalue of the partial transpose; below ``-1e-9`` certifies entanglement."""
    rho = as_density(bipartition(state, cut) if cut is not None else bipartition(state))
    return float(numkit.eigvals_hermitian(partial_transpose(rho, 0))[-1])


def _decide(gap, certified_positive, ac_upper, gap_tol, floor):
    if gap > gap_tol:
        return Verdict.INCONCLUSIVE
    if certified_positive:
        return Verdict.VIOLATION_WITNESS
    if ac_upper <= floor:
        return Verdict.CONSISTENT
    return Verdict.INCONCLUSIVE


def monogamy_check(psi, measure, opts=None, k=2, gap_tol=GAP_TOL, witness_floor=WITNESS_FLOOR):
    """Test the disentangling condition for ``measure`` on a tripartite pure state."""
    if not isinstance(psi, PureState) or psi.n_parties != 3:
        raise ValidationError("MonogamyCheck.state", "needs a tripartite pure state")
    measure = MeasureId(measure)
    d = psi.dims[0]
    label = describe(measure, k=k, d=d)
    e_a_bc = pure_value(measure, psi, k=k, cut="A|BC", d=d)
    proxy = partial_negativity(psi, cut="A|C")

    if measure is MeasureId.SCHMIDT_RANK:
        ab = schmidt_number(psi, opts, cut="A|B")
        ac = schmidt_number(psi, opts, cut="A|C")
        exact_ab = ab.lower == ab.upper
        gap = abs(e_a_bc - ab.upper) if exact_ab else float("inf")
        verdict = _decide(gap, ac.lower >= 2, ac.upper - 1, gap_tol, witness_floor)
        return MonogamyReport(
            measure.value, "Schmidt number", e_a_bc, float(ab.upper), float(ac.upper), gap, verdict,
            gap_tol, witness_floor, proxy, "schmidt_number",
            {"ab_bounds": [ab.lower, ab.upper], "ac_bounds": [ac.lower, ac.upper]},
        )

    if measure in DIRECT_MIXED:
        e_ab = evaluate(measure, psi, cut="A|B")
        e_ac = evaluate(measure, psi, cut="A|C")
        gap = abs(e_a_bc - e_ab)
        verdict = _decide(gap, e_ac > witness_floor, e_ac, gap_tol, witness_floor)
        return MonogamyReport(measure.value, label, e_a_bc, e_ab, e_ac, gap, verdict, gap_tol,
                              witness_floor, proxy, "direct")

    if measure is MeasureId.E_K and k > 2:
        faithful = False
    else:
        faithful = measure in FAITHFUL or measure is MeasureId.E_K
    ab = roof_value(psi, measure, opts, k=k, cut="A|B", d=d)
    ac = roof_value(psi, measure, opts, k=k, cut="A|C", d=d)
    gap = abs(e_a_bc - ab.value)
    verdict = _decide(gap, faithful and proxy > witness_floor, ac.value, gap_tol, witness_floor)
    return MonogamyReport(
        measure.value, label, e_a_bc, ab.value, ac.value, gap, verdict, gap_tol, witness_floor,
        proxy, "roof",
        {"ab_converged": ab.converged, "ac_converged": ac.converged, "npt_ac": npt_witness(psi, "A|C")},
    )


def acin_disentangling_probe(params, opts=None, rank_tol=numkit.RANK_TOL):
    """E_2 monogamy test on the three-qubit canonical form.

    When the disentangling gap closes, also records whether the coefficient
    conditions ``l2 = l4 = 0`` or ``l1 = 0 and l0 <= l3`` hold.
    """
    report = monogamy_check(make_acin(params), MeasureId.E2_RAW, opts)
    l0, l1, l2, l3, l4 = params.lambdas
    cond_a = l2 <= rank_tol and l4 <= rank_tol
    cond_b = l1 <= rank_tol and l0 <= l3 + rank_tol
    report.details.update(
        {
            "lambdas": list(params.lambdas),
            "phi": params.phi,
            "condition_l2_l4_zero": cond_a,
            "condition_l1_zero_l0_le_l3": cond_b,
            "ab_separable": params.ab_separable(),
            "ac_separable": params.ac_separable(),
            "conditions_hold": (cond_a or cond_b) if report.disentangling_gap <= report.gap_tol else None,
        }
    )
    return report


# -- concavity ---------------------------------------------------------------


@dataclass
class ConcavityReport:
    function: ReducedFunctionId
    d: int
    samples: int
    violations: list
    equality_witnesses: list
    strict: Strictness
    max_deficit: float

    def summary(self):
        return {
            "function": self.function.value,
            "d": self.d,
            "samples": self.samples,
            "violations": len(self.violations),
            "equality_witnesses": len(self.equality_witnesses),
            "max_deficit": self.max_deficit,
            "strict": self.strict.value,
        }


def _hat_witness(d):
    x = np.zeros(d)
    y = np.zeros(d)
    x[:3] = 1 / 3
    y[:2] = 1 / 2
    return x, y, 0.5


def concavity_scan(h, d, samples, seed=42, ambient_d=None):
    """Sample spectrum pairs and mixing weights; record concavity violations and exact equalities.

    For ``h_HAT`` with ``d >= 3`` the pair ``(1/3,1/3,1/3)``, ``(1/2,1/2,0)`` at
    ``t = 1/2`` is always included as the first sample.
    """
    h = parse_reduced_function(h)
    if d < 2 or samples < 1:
        raise ValidationError("ConcavityScan.args", "needs d >= 2 and samples >= 1")
    rng = numkit.as_rng(seed)
    X = numkit.random_simplex(samples, d, rng)
    Y = numkit.random_simplex(samples, d, rng)
    T = rng.uniform(0.0, 1.0, samples)
    if h is ReducedFunctionId.H_HAT and d >= 3:
        wx, wy, wt = _hat_witness(d)
        X = np.vstack([wx, X])
        Y = np.vstack([wy, Y])
        T = np.concatenate([[wt], T])
    mix = T[:, None] * X + (1 - T[:, None]) * Y
    hd = ambient_d or d
    lhs = reduced_function_batch(h, mix, hd)
    rhs = T * reduced_function_batch(h, X, hd) + (1 - T) * reduced_function_batch(h, Y, hd)
    deficit = rhs - lhs
    distinct = np.max(np.abs(np.sort(X, axis=1) - np.sort(Y, axis=1)), axis=1) > 1e-9
    bad = np.flatnonzero(deficit > CONCAVITY_TOL)
    equal = np.flatnonzero((np.abs(deficit) <= EQUALITY_TOL) & distinct & (T > 0) & (T < 1))
    violations = [(X[i].tolist(), Y[i].tolist(), float(T[i]), float(deficit[i])) for i in bad]
    witnesses = [(X[i].tolist(), Y[i].tolist(), float(T[i])) for i in equal]
    if violations:
        strict = Strictness.CONCAVITY_VIOLATED
    elif witnesses:
        strict = Strictness.NON_STRICT_WITNESSED
    else:
        strict = Strictness.STRICT_CANDIDATE
    return ConcavityReport(h, d, len(T), violations, witnesses, strict, float(max(deficit.max(), 0.0)))


def flagged_state(psi, phi, t):
    """``sqrt(t)|psi>|0> + sqrt(1-t)|phi>|1>`` with the flag appended as subsystem C."""
    if psi.dims != phi.dims or psi.n_parties != 2:
        raise ValidationError("MixingCheck.states", "needs two bipartite states with equal dimensions")
    if not 0 <= t <= 1:
        raise ValidationError("MixingCheck.t", "t must lie in [0, 1]")
    e0, e1 = np.array([1, 0]), np.array([0, 1])
    v = np.sqrt(t) * np.kron(psi.amplitudes, e0) + np.sqrt(1 - t) * np.kron(phi.amplitudes, e1)
    return PureState(v, psi.dims + (2,))


def mixing_deficit(psi, phi, t, measure, k=2):
    """``t E(psi) + (1-t) E(phi) - E(Psi; A|BC)`` for the flagged state ``Psi``."""
    d = psi.dims[0]
    big = pure_value(measure, flagged_state(psi, phi, t), k=k, cut="A|BC", d=d)
    return t * pure_value(measure, psi, k=k, d=d) + (1 - t) * pure_value(measure, phi, k=k, d=d) - big


def mixing_monotonicity_check(psi, phi, t, measure, k=2):
    """True when the flag measurement does not increase ``measure`` on average."""
    return bool(mixing_deficit(psi, phi, t, measure, k) <= CONCAVITY_TOL)


# -- bounds ------------------------------------------------------------------


@dataclass
class BoundsResult:
    bound: float
    roof_upper: float
    analytic_roof: float
    ok: bool


def upper_bound(state, measure):
    """Closed-form upper bound on the roof of ``E2_NORM``, ``E_MIN`` or ``E_MIN_REINFORCED``."""
    measure = MeasureId(measure)
    rho = as_density(bipartition(state))
    rA = partial_trace(rho, [0])
    rB = partial_trace(rho, [1])
    if measure is MeasureId.E2_NORM:
        d = rho.dims[0]
        worst = min(1 - numkit.operator_norm(rA.matrix), 1 - numkit.operator_norm(rB.matrix))
        return d / (d - 1) * worst
    if measure is MeasureId.E_MIN:
        return min(numkit.min_norm(rA.matrix), numkit.min_norm(rB.matrix))
    if measure is MeasureId.E_MIN_REINFORCED:
        return min(rA.rank() * numkit.min_norm(rA.matrix), rB.rank() * numkit.min_norm(rB.matrix))
    raise CapabilityError(f"no closed-form bound for {measure.value}")


def bounds_check(state, measure, analytic_roof=None, opts=None, compute_roof=True):
    """Compare the closed-form bound with a known roof value (pure states supply their own)."""
    measure = MeasureId(measure)
    bound = upper_bound(state, measure)
    if isinstance(state, PureState):
        analytic_roof = pure_value(measure, bipartition(state))
    roof_upper = roof_value(state, measure, opts).value if compute_roof else None
    if analytic_roof is not None:
        ok = analytic_roof <= bound + 1e-9
    else:
        ok = bound >= 0
    return BoundsResult(bound, roof_upper, analytic_roof, bool(ok))


# -- coherence ---------------------------------------------------------------

COHERENCE_FUNCTIONS = (ReducedFunctionId.H_E2, ReducedFunctionId.H_MIN, ReducedFunctionId.H_MIN_REINFORCED)


def coherence_ch(state, h=ReducedFunctionId.H_E2, opts=None):
    """Coherence in the computational basis: ``h(|x_0|^2, ..., |x_{d-1}|^2)``, roof-extended for mixed states."""
    h = parse_reduced_function(h)
    if h not in COHERENCE_FUNCTIONS:
        raise CapabilityError(f"{h.value} is not supported as a coherence function")
    if isinstance(state, PureState):
        return reduced_function(h, np.abs(state.amplitudes) ** 2)
    rho = as_density(state)

    def evaluate_members(W):
        P = np.abs(W) ** 2
        q = P.sum(axis=1)
        keep = q > 1e-12
        return float(q[keep] @ reduced_function_batch(h, P[keep] / q[keep, None]))

    return convex_roof(rho, evaluate_members, opts).value


# -- figure data -------------------------------------------------------------

FIGURE_HEADER = ("param1", "param2", "e2_norm", "e_min", "e_min_reinforced", "tangle", "partial_negativity")


@dataclass(frozen=True)
class FigureRow:
    param1: float
    param2: float
    e2_norm: float
    e_min: float
    e_min_reinforced: float
    tangle: float
    partial_negativity: float


def fig1_grid(resolution):
    if resolution < 2:
        raise ValidationError("FigureGrid.resolution", "resolution must be >= 2")
    return list(np.linspace(0.0, 1 / 3, resolution))


def fig2_grid(resolution):
    """``(p, q)`` on a ``1/resolution`` lattice with ``p >= q > 0`` and ``p + q <= 1``."""
    if resolution < 2:
        raise ValidationError("FigureGrid.resolution", "resolution must be >= 2")
    pts = []
    for i in range(1, resolution + 1):
        for j in range(1, i + 1):
            if i + j <= resolution:
                pts.append((i / resolution, j / resolution))
    return pts


_FIG_MEASURES = (
    MeasureId.E2_NORM,
    MeasureId.E_MIN,
    MeasureId.E_MIN_REINFORCED,
    MeasureId.TANGLE,
    MeasureId.PARTIAL_NEGATIVITY,
)


def _row(p1, p2, spectrum):
    psi = pure_from_schmidt(np.sqrt(spectrum), 3, 3)
    return FigureRow(p1, p2, *(pure_value(m, psi) for m in _FIG_MEASURES))


def figure_scan(family, points):
    """Evaluate the comparison measures along a figure family in 3x3.

    ``"FIG1"``: points are ``t`` in ``[0, 1/3]``, Schmidt numbers ``(sqrt(2/3-t), sqrt(1/3), sqrt(t))``.
    ``"FIG2"``: points are ``(p, q)`` with ``p >= q > 0``, ``p + q <= 1``,
    Schmidt numbers ``(sqrt(p), sqrt(q), sqrt(1-p-q))``. ``param2`` is NaN for FIG1.
    """
    family = str(family).upper()
    rows = []
    if family == "FIG1":
        for t in points:
            t = float(t)
            if not -1e-12 <= t <= 1 / 3 + 1e-12:
                raise ValidationError("FigureGrid.range", f"t={t} outside [0, 1/3]")
            t = min(max(t, 0.0), 1 / 3)
            rows.append(_row(t, float("nan"), [max(2 / 3 - t, 0.0), 1 / 3, t]))
    elif family == "FIG2":
        for p, q in points:
            p, q = float(p), float(q)
            if not (p >= q > 0 and p + q <= 1 + 1e-12):
                raise ValidationError("FigureGrid.range", f"(p, q)=({p}, {q}) violates p >= q > 0, p + q <= 1")
            rows.append(_row(p, q, [p, q, max(1 - p - q, 0.0)]))
    else:
        raise ValidationError("FigureGrid.family", f"unknown family {family!r}")
    return rows


def format_number(x):
    """Nine significant digits; Python's correctly rounded (round-half-even) formatting."""
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    return format(float(x), ".9g")


def figure_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIGURE_HEADER)
    for r in rows:
        w.writerow([format_number(getattr(r, name)) for name in FIGURE_HEADER])
    return buf.getvalue()


def concavity_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ("function", "d", "samples", "violations", "equality_witnesses", "max_deficit", "strict")
    w.writerow(cols)
    for rep in reports:
        s = rep.summary()
        w.writerow([format_number(s[c]) if c == "max_deficit" else s[c] for c in cols])
    return buf.getvalue()
