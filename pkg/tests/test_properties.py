import json

import numpy as np
import pytest

from monotone_lab.exceptions import ValidationError
from monotone_lab.properties import bounds_corpus, mixture_majorization, run_suite


def test_mixture_majorization_holds():
    assert mixture_majorization(100, 3, np.random.default_rng(0)) == []


def test_concavity_suite_small_run_passes_and_logs_hat():
    res = run_suite("concavity", seed=3, samples=500)
    assert res.passed
    hat = {entry["d"]: entry for entry in res.report["h_HAT_log"]}
    assert hat[3]["witness"]["equality"] is True
    assert "first_failure" not in res.report


def test_suite_reports_are_deterministic():
    a = json.dumps(run_suite("concavity", seed=5, samples=300).report, sort_keys=True)
    b = json.dumps(run_suite("concavity", seed=5, samples=300).report, sort_keys=True)
    assert a == b


def test_mixing_and_coherence_suites_pass():
    assert run_suite("mixing", seed=1, samples=50).passed
    assert run_suite("coherence", seed=1, samples=20).passed


def test_bounds_corpus_contents():
    corpus = bounds_corpus(0)
    names = {name for name, *_ in corpus}
    assert {"bell", "phi_rho_AB", "separable_diagonal", "product_3x3"} <= names
    analytic = {name: value for name, _, _, value in corpus if value is not None}
    assert analytic["phi_rho_AB"] == 0.75


def test_unknown_suite():
    with pytest.raises(ValidationError, match="Suite.known"):
        run_suite("nope")
