"""
``monotone-lab`` command-line front end.

Exit codes: 0 success, 1 assertion or verdict failure, 2 input validation,
3 capability, 4 I/O. JSON reports go to stdout (and to ``--out`` when given,
except for ``monogamy`` and ``figures`` whose ``--out`` receives CSV).
"""
import argparse
import csv
import io
import json
import math
import os
import sys
from enum import Enum
from pathlib import Path

import numpy as np

from monotone_lab.analysis import (
    Verdict,
    acin_disentangling_probe,
    fig1_grid,
    fig2_grid,
    figure_csv,
    figure_scan,
    format_number,
    monogamy_check,
)
from monotone_lab.exceptions import CapabilityError, ValidationError
from monotone_lab.measures import (
    DIRECT_MIXED,
    MeasureId,
    describe,
    evaluate,
    parse_measure,
)
from monotone_lab.properties import SUITES, run_suite
from monotone_lab.roof import RoofOptions, roof_value, schmidt_number
from monotone_lab.statefile import load_state
from monotone_lab.states import (
    EMIN,
    E2_CASE,
    AcinParams,
    DensityMatrix,
    PhiParams,
    bipartition,
    make_omega,
    make_phi,
    make_w,
)

EXIT_OK, EXIT_FAIL, EXIT_VALIDATION, EXIT_CAPABILITY, EXIT_IO = range(5)
DEFAULT_SEED = 42
SEED_ENV = "MONOTONE_LAB_SEED"

FAMILIES = ("phi", "omega", "acin", "w", "file")
DEFAULT_MEASURE = {
    "phi": "E2_RAW",
    "omega": "PARTIAL_NEGATIVITY",
    "acin": "E2_RAW",
    "w": "SCHMIDT_NUMBER",
    "file": "E2_RAW",
}
PHI_DEFAULTS = {
    E2_CASE: ((0.5, 0.3, 0.2), (0.5, 0.26, 0.24)),
    EMIN: ((0.2, 0.45, 0.35), (0.2, 0.44, 0.36)),
}
OMEGA_DEFAULT = (0.5, 0.3, 0.2)
ACIN_DEFAULT = (0.6, 0.48, 0.0, 0.64, 0.0)


class UsageError(Exception):
    """Bad command line; reported like a validation error."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output helpers ----------------------------------------------------------


def _plain(obj):
    """Recursively convert to JSON-safe builtins; non-finite floats become ``None``."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _dumps(report):
    return json.dumps(_plain(report), indent=2, sort_keys=True) + "\n"


def _write(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


# -- config ------------------------------------------------------------------


def resolve_seed(flag_value, environ=None):
    """``--seed`` wins, then ``MONOTONE_LAB_SEED``, then 42."""
    if flag_value is not None:
        return flag_value
    raw = (environ if environ is not None else os.environ).get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        seed = int(raw)
    except ValueError:
        raise ValidationError("RunConfig.seed", f"{SEED_ENV}={raw!r} is not an integer") from None
    if seed < 0:
        raise ValidationError("RunConfig.seed", "seed must be >= 0")
    return seed


def roof_options(args):
    base = RoofOptions()
    return RoofOptions(
        seed=args.seed,
        restarts=args.restarts if args.restarts is not None else base.restarts,
        tol=args.tol if args.tol is not None else base.tol,
    )


def parse_params(text):
    """``"a=1,b=x:y"`` -> ``{"a": "1", "b": "x:y"}``."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValidationError("RunConfig.params", f"expected k=v, got {item!r}")
        if key in out:
            raise ValidationError("RunConfig.params", f"duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _floats(text, name):
    try:
        return tuple(float(x) for x in text.split(":"))
    except ValueError:
        raise ValidationError("RunConfig.params", f"{name} must be ':'-separated numbers") from None


def _unknown_keys(params, allowed):
    extra = sorted(set(params) - set(allowed))
    if extra:
        raise ValidationError("RunConfig.params", f"unknown parameter(s): {', '.join(extra)}")


def _measures(text):
    return [parse_measure(item) for item in text.split(",") if item.strip()]


# -- commands ----------------------------------------------------------------


def cmd_measure(args):
    state = load_state(args.input)
    target = bipartition(state, args.cut) if args.cut else bipartition(state)
    results = []
    for measure, k in _measures(args.measure or "E2_NORM"):
        value = evaluate(measure, target, k=k)
        d = target.dims[0] if measure is MeasureId.E2_NORM else None
        results.append(
            {"measure": measure.value if measure is not MeasureId.E_K else f"E_K:{k}",
             "label": describe(measure, k=k, d=d, cut=args.cut), "value": value}
        )
    report = {
        "input": str(args.input),
        "kind": "mixed" if isinstance(state, DensityMatrix) else "pure",
        "dims": list(state.dims),
        "cut": args.cut,
        "results": results,
    }
    text = _dumps(report)
    sys.stdout.write(text)
    if args.out:
        _write(args.out, text)
    return EXIT_OK


def cmd_roof(args):
    state = load_state(args.input)
    opts = roof_options(args)
    measures = _measures(args.measure or "E2_RAW")
    results = []
    for measure, k in measures:
        if measure is MeasureId.SCHMIDT_RANK:
            b = schmidt_number(state, opts, cut=args.cut)
            results.append({"measure": "SCHMIDT_NUMBER", "lower": b.lower, "upper": b.upper})
            continue
        if measure in DIRECT_MIXED:
            target = bipartition(state, args.cut) if args.cut else bipartition(state)
            results.append({"measure": measure.value, "label": describe(measure, cut=args.cut),
                            "value": evaluate(measure, target), "method": "direct"})
            continue
        res = roof_value(state, measure, opts, k=k, cut=args.cut)
        results.append(
            {
                "measure": measure.value if measure is not MeasureId.E_K else f"E_K:{k}",
                "label": describe(measure, k=k, d=res.best_ensemble.dims[0], cut=args.cut),
                "value": res.value,
                "method": "roof",
                "restarts_used": res.restarts_used,
                "converged": res.converged,
                "ensemble_size": len(res.best_ensemble),
                "probabilities": res.best_ensemble.probabilities.tolist(),
            }
        )
    report = {"input": str(args.input), "cut": args.cut, "seed": opts.seed,
              "restarts": opts.restarts, "tol": opts.tol, "results": results}
    text = _dumps(report)
    sys.stdout.write(text)
    if args.out:
        _write(args.out, text)
    return EXIT_OK


def _family_state(args, params):
    """Build the family's state.

    Returns ``(state, info, expected, acin)``: ``expected`` is the set of
    measures for which the fixture predicts a violation witness, and ``acin``
    holds the canonical-form parameters when the family is ``acin``.
    """
    family = args.family
    if family == "phi":
        _unknown_keys(params, ("a2", "a2p", "regime"))
        regime = params.get("regime", E2_CASE)
        if regime not in PHI_DEFAULTS:
            raise ValidationError("PhiParams.regime", f"unknown regime {regime!r}")
        a2, a2p = PHI_DEFAULTS[regime]
        a2 = _floats(params["a2"], "a2") if "a2" in params else a2
        a2p = _floats(params["a2p"], "a2p") if "a2p" in params else a2p
        psi = make_phi(PhiParams.from_squares(a2, a2p, regime))
        expected = {
            E2_CASE: {MeasureId.E2_RAW, MeasureId.E2_NORM},
            EMIN: {MeasureId.E_MIN},
        }[regime]
        return psi, {"a2": a2, "a2p": a2p, "regime": regime}, expected, None
    if family == "omega":
        _unknown_keys(params, ("l2",))
        l2 = _floats(params["l2"], "l2") if "l2" in params else OMEGA_DEFAULT
        if len(l2) != 3 or min(l2) < 0:
            raise ValidationError("Omega.length", "l2 needs three nonnegative squares")
        psi = make_omega(*np.sqrt(l2))
        return psi, {"l2": l2}, {MeasureId.PARTIAL_NEGATIVITY, MeasureId.LOG_PARTIAL_NEGATIVITY}, None
    if family == "acin":
        _unknown_keys(params, ("lambdas", "phi"))
        lam = _floats(params["lambdas"], "lambdas") if "lambdas" in params else ACIN_DEFAULT
        try:
            phase = float(params.get("phi", 0.0))
        except ValueError:
            raise ValidationError("AcinParams.phase", "phi must be a number") from None
        acin = AcinParams(lam, phase)
        return acin, {"lambdas": acin.lambdas, "phi": phase}, None, acin
    if family == "w":
        _unknown_keys(params, ())
        return make_w(), {}, {MeasureId.SCHMIDT_RANK}, None
    if family == "file":
        _unknown_keys(params, ())
        if not args.input:
            raise ValidationError("RunConfig.input", "family=file needs an input path")
        return load_state(args.input), {"input": str(args.input)}, set(), None
    raise ValidationError("RunConfig.family", f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def _acin_expectation(acin, tol=1e-9):
    l0, l1, l2, l3, l4 = acin.lambdas
    if l2 <= tol and l4 <= tol:
        return Verdict.CONSISTENT
    if l1 <= tol and l0 <= l3 + tol:
        return Verdict.VIOLATION_WITNESS
    return None


MONOGAMY_CSV = ("family", "measure", "convention", "e_a_bc", "e_ab", "e_ac", "disentangling_gap",
                "e_ac_npt_proxy", "verdict", "expected")


def monogamy_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MONOGAMY_CSV)
    for row in rows:
        w.writerow([format_number(row[c]) if isinstance(row[c], float) else (row[c] or "") for c in MONOGAMY_CSV])
    return buf.getvalue()


def cmd_monogamy(args):
    if args.family is None:
        raise ValidationError("RunConfig.family", f"--family is required ({', '.join(FAMILIES)})")
    params = parse_params(args.params)
    state, info, expected_set, acin = _family_state(args, params)
    opts = roof_options(args)
    rows, reports, failed = [], [], False
    default = "E_MIN" if info.get("regime") == EMIN else DEFAULT_MEASURE[args.family]
    for measure, k in _measures(args.measure or default):
        if acin is not None:
            if measure is not MeasureId.E2_RAW:
                raise CapabilityError("the acin family is probed with E2_RAW only")
            report = acin_disentangling_probe(acin, opts)
            expected = _acin_expectation(acin)
        else:
            report = monogamy_check(state, measure, opts, k=k)
            expected = Verdict.VIOLATION_WITNESS if measure in expected_set else None
        ok = expected is None or report.verdict is expected
        failed |= not ok
        entry = report.to_dict()
        entry["expected"] = expected.value if expected else None
        entry["as_expected"] = ok
        reports.append(entry)
        rows.append({"family": args.family, **entry})
    out = {"family": args.family, "params": info, "seed": opts.seed, "restarts": opts.restarts,
           "reports": reports}
    sys.stdout.write(_dumps(out))
    if args.out:
        _write(args.out, monogamy_csv(rows))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_figures(args):
    if args.resolution < 2:
        raise ValidationError("FigureGrid.resolution", "resolution must be >= 2")
    if args.fig == "1":
        rows = figure_scan("FIG1", fig1_grid(args.resolution))
    else:
        rows = figure_scan("FIG2", fig2_grid(args.resolution))
    text = figure_csv(rows)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_properties(args):
    result = run_suite(args.suite, seed=args.seed, samples=args.samples, opts=roof_options(args))
    text = _dumps(result.report)
    sys.stdout.write(text)
    if args.out:
        _write(args.out, text)
    if not result.passed:
        sys.stderr.write("assertion failed: " + json.dumps(_plain(result.first_failure), sort_keys=True) + "\n")
        return EXIT_FAIL
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_nonneg_int, default=None, help=f"RNG seed (default ${SEED_ENV} or 42)")
    common.add_argument("--restarts", type=_positive_int, default=None, help="roof optimizer restarts per ensemble size")
    common.add_argument("--tol", type=_positive_float, default=None, help="roof optimizer relative tolerance")
    common.add_argument("--out", type=Path, default=None, help="output file")

    parser = _Parser(prog="monotone-lab", description="Partial-norm entanglement monotones toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", parents=[common], help="evaluate measures on a state file")
    p.add_argument("input", type=Path)
    p.add_argument("--measure", help="comma list, e.g. E2_NORM,TANGLE,E_K:3 (default E2_NORM)")
    p.add_argument("--cut", help="bipartition such as A|BC")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("roof", parents=[common], help="convex-roof estimate on a state file")
    p.add_argument("input", type=Path)
    p.add_argument("--measure", help="comma list (default E2_RAW)")
    p.add_argument("--cut", help="bipartition such as A|B")
    p.set_defaults(func=cmd_roof)

    p = sub.add_parser("monogamy", parents=[common], help="disentangling-condition test on a family")
    p.add_argument("input", type=Path, nargs="?", help="state file for --family file")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--params", help="k=v,... (phi: a2,a2p,regime; omega: l2; acin: lambdas,phi)")
    p.add_argument("--measure", help="comma list (family default otherwise)")
    p.set_defaults(func=cmd_monogamy)

    p = sub.add_parser("figures", parents=[common], help="figure data as CSV")
    p.add_argument("--fig", choices=("1", "2"), required=True)
    p.add_argument("--resolution", type=int, default=34)
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("properties", parents=[common], help="seeded property suites")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--samples", type=_positive_int, default=None, help="override the suite's sample count")
    p.set_defaults(func=cmd_properties)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.seed = resolve_seed(args.seed)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_VALIDATION
    except ValidationError as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION
    except CapabilityError as exc:
        sys.stderr.write(f"capability error: {exc}\n")
        return EXIT_CAPABILITY
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
