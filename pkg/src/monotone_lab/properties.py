"""
Seeded property suites behind ``monotone-lab properties``.

Each runner returns a :class:`SuiteResult`: a JSON-ready report plus the first
failing case (``None`` when every assertion holds). Reports contain only
plain Python scalars and lists, so serializing the same run twice gives the
same bytes.
"""
from dataclasses import dataclass

import numpy as np

from monotone_lab import numkit
from monotone_lab.analysis import (
    bounds_check,
    coherence_ch,
    concavity_scan,
    mixing_deficit,
    CONCAVITY_TOL,
    COHERENCE_FUNCTIONS,
)
from monotone_lab.exceptions import ValidationError
from monotone_lab.measures import MeasureId, ReducedFunctionId
from monotone_lab.roof import RoofOptions
from monotone_lab.states import (
    PhiParams,
    basis_state,
    make_bell,
    bipartition,
    make_max_entangled,
    make_phi,
    product_density,
    pure_from_schmidt,
    random_pure_state,
    DensityMatrix,
    PureState,
)

SUITES = ("concavity", "bounds", "mixing", "coherence")

ASSERTED_CONCAVE = (
    ReducedFunctionId.H_E2,
    ReducedFunctionId.H_MIN,
    ReducedFunctionId.H_MIN_REINFORCED,
    ReducedFunctionId.H_TANGLE,
    ReducedFunctionId.H_NEG,
)


@dataclass
class SuiteResult:
    report: dict
    first_failure: dict = None

    @property
    def passed(self):
        return self.first_failure is None


def _finish(suite, seed, checks, extra=None):
    failure = next((c for c in checks if not c["ok"]), None)
    report = {"suite": suite, "seed": seed, "passed": failure is None, "checks": checks}
    if extra:
        report.update(extra)
    if failure is not None:
        report["first_failure"] = failure
    return SuiteResult(report, failure)


# -- concavity ---------------------------------------------------------------


def mixture_majorization(pairs, d, rng):
    """Spectrum of ``t rho + (1-t) sigma`` is majorized by ``t eig(rho) + (1-t) eig(sigma)``.

    Returns the list of failing indices (empty when the property holds).
    """
    failures = []
    for i in range(pairs):
        rho = numkit.random_density_matrix(d, rng=rng)
        sigma = numkit.random_density_matrix(d, rng=rng)
        t = rng.uniform()
        mixed = numkit.eigvals_hermitian(t * rho + (1 - t) * sigma)
        averaged = t * numkit.eigvals_hermitian(rho) + (1 - t) * numkit.eigvals_hermitian(sigma)
        if not numkit.majorizes(mixed, averaged / averaged.sum()):
            failures.append({"index": i, "t": float(t)})
    return failures


def concavity_suite(seed=42, samples=10_000, dims=(2, 3, 4), pairs=500):
    """Concavity scans for the asserted reduced functions; ``h_HAT`` is logged only."""
    checks = []
    for fi, h in enumerate(ASSERTED_CONCAVE):
        for d in dims:
            rep = concavity_scan(h, d, samples, seed=[seed, fi, d])
            entry = rep.summary()
            entry["check"] = "concavity"
            entry["ok"] = not rep.violations
            if rep.violations:
                x, y, t, deficit = rep.violations[0]
                entry["case"] = {"x": x, "y": y, "t": t, "deficit": deficit}
            checks.append(entry)

    maj_failures = mixture_majorization(pairs, 3, np.random.default_rng([seed, 99]))
    checks.append(
        {"check": "mixture_majorization", "pairs": pairs, "failures": len(maj_failures),
         "ok": not maj_failures, **({"case": maj_failures[0]} if maj_failures else {})}
    )

    hat = []
    for d in dims:
        rep = concavity_scan(ReducedFunctionId.H_HAT, d, samples, seed=[seed, len(ASSERTED_CONCAVE), d])
        entry = rep.summary()
        if d >= 3:
            x, y, t = [1 / 3] * 3 + [0.0] * (d - 3), [0.5, 0.5] + [0.0] * (d - 2), 0.5
            entry["witness"] = {"x": x, "y": y, "t": t, "equality": bool(rep.equality_witnesses)}
        if rep.violations:
            x, y, t, deficit = rep.violations[0]
            entry["first_violation"] = {"x": x, "y": y, "t": t, "deficit": deficit}
        hat.append(entry)
    return _finish("concavity", seed, checks, {"h_HAT_log": hat})


# -- bounds ------------------------------------------------------------------

BOUND_MEASURES = (MeasureId.E2_NORM, MeasureId.E_MIN, MeasureId.E_MIN_REINFORCED)


def bounds_corpus(seed=42):
    """``(name, state, measure, analytic_roof)`` fixtures with known roof values.

    Pure states carry their own value (``None`` here). The 3x4 reduced state of
    the first counterexample has ``E_2`` roof ``1/2`` (``3/4`` normalized) for
    every decomposition; separable fixtures have roof 0.
    """
    rng = np.random.default_rng([seed, 10])
    pure = [
        ("bell", make_bell()),
        ("max_entangled_3", make_max_entangled(3)),
        ("schmidt_fig1_t0", pure_from_schmidt(np.sqrt([2 / 3, 1 / 3, 0.0]), 3, 3)),
        ("schmidt_uneven", pure_from_schmidt(np.sqrt([0.5, 0.3, 0.2]), 3, 3)),
        ("product_00", basis_state((2, 2), (0, 0))),
        ("random_3x3_a", random_pure_state((3, 3), rng)),
        ("random_3x3_b", random_pure_state((3, 3), rng)),
        ("random_2x4", random_pure_state((2, 4), rng)),
    ]
    corpus = [(name, psi, m, None) for name, psi in pure for m in BOUND_MEASURES]
    phi = make_phi(PhiParams.from_squares((0.5, 0.3, 0.2), (0.5, 0.26, 0.24)))
    corpus.append(("phi_rho_AB", bipartition(phi, "A|B"), MeasureId.E2_NORM, 0.75))
    diag = DensityMatrix(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex), (2, 2))
    prod = product_density(numkit.random_density_matrix(3, 2, rng), numkit.random_density_matrix(3, 2, rng))
    for name, rho in (("separable_diagonal", diag), ("product_3x3", prod)):
        corpus.extend((name, rho, m, 0.0) for m in BOUND_MEASURES)
    return corpus


def bounds_suite(seed=42, opts=None):
    opts = opts or RoofOptions(seed=seed)
    checks = []
    for name, state, measure, analytic in bounds_corpus(seed):
        res = bounds_check(state, measure, analytic, opts)
        checks.append(
            {"check": "bound", "state": name, "measure": measure.value, "bound": res.bound,
             "analytic_roof": res.analytic_roof, "roof_upper": res.roof_upper, "ok": res.ok}
        )
    return _finish("bounds", seed, checks)


# -- mixing ------------------------------------------------------------------

MIXING_MEASURES = (
    MeasureId.E2_RAW,
    MeasureId.E2_NORM,
    MeasureId.E_MIN,
    MeasureId.E_MIN_REINFORCED,
    MeasureId.TANGLE,
)


def mixing_suite(seed=42, pairs=500, dims=(3, 3)):
    """Flag-measurement monotonicity on random pure-state pairs; a pair passes when every measure does."""
    rng = np.random.default_rng([seed, 20])
    passed = 0
    failure = None
    worst = {m.value: -np.inf for m in MIXING_MEASURES}
    for i in range(pairs):
        psi = random_pure_state(dims, rng)
        phi = random_pure_state(dims, rng)
        t = float(rng.uniform())
        deficits = {m.value: mixing_deficit(psi, phi, t, m) for m in MIXING_MEASURES}
        for key, val in deficits.items():
            worst[key] = max(worst[key], val)
        if all(v <= CONCAVITY_TOL for v in deficits.values()):
            passed += 1
        elif failure is None:
            failure = {"index": i, "t": t, "deficits": deficits}
    check = {"check": "mixing", "pairs": pairs, "passed": passed, "max_deficit": worst, "ok": passed == pairs}
    if failure:
        check["case"] = failure
    return _finish("mixing", seed, [check])


# -- coherence ---------------------------------------------------------------


def coherence_suite(seed=42, samples=100, d=4, opts=None):
    opts = opts or RoofOptions(seed=seed, restarts=4)
    rng = np.random.default_rng([seed, 30])
    checks = []
    for h in COHERENCE_FUNCTIONS:
        worst = max(
            abs(coherence_ch(basis_state((n,), (i,)), h)) for n in (2, 3, 4) for i in range(n)
        )
        checks.append({"check": "basis_zero", "function": h.value, "max_abs": worst, "ok": worst <= 1e-12})

        dev = 0.0
        for _ in range(samples):
            psi = random_pure_state((d,), rng)
            perm = rng.permutation(d)
            moved = PureState(psi.amplitudes[perm], psi.dims)
            dev = max(dev, abs(coherence_ch(psi, h) - coherence_ch(moved, h)))
        checks.append({"check": "permutation_invariance", "function": h.value, "samples": samples,
                       "max_deviation": dev, "ok": dev <= 1e-10})

    plus = PureState(np.array([1, 1]) / np.sqrt(2), (2,))
    value = coherence_ch(plus, ReducedFunctionId.H_E2)
    checks.append({"check": "max_coherent_qubit", "function": "h_E2", "value": value,
                   "ok": abs(value - 0.5) <= 1e-12})

    incoherent = DensityMatrix(np.diag([0.5, 0.3, 0.2]).astype(complex), (3,))
    value = coherence_ch(incoherent, ReducedFunctionId.H_E2, opts)
    checks.append({"check": "incoherent_mixed_zero", "function": "h_E2", "value": value, "ok": value <= 1e-12})
    return _finish("coherence", seed, checks)


def run_suite(name, seed=42, samples=None, opts=None):
    if name == "concavity":
        return concavity_suite(seed, samples or 10_000)
    if name == "bounds":
        return bounds_suite(seed, opts)
    if name == "mixing":
        return mixing_suite(seed, samples or 500)
    if name == "coherence":
        return coherence_suite(seed, samples or 100)
    raise ValidationError("Suite.known", f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
