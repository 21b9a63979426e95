"""
Text (JSON) serialization of states.

A state file is a JSON object::

    {"kind": "pure", "dims": [2, 2], "data": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]]}

``data`` holds ``[re, im]`` pairs: the amplitude vector for ``"pure"``, the
row-major matrix entries for ``"mixed"``. Loading applies the type invariants
and raises :class:`ValidationError` naming the first one violated.
"""
import json
from math import prod
from pathlib import Path

import numpy as np

from monotone_lab.exceptions import ValidationError
from monotone_lab.states import DensityMatrix, PureState


def parse_state(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("StateFile.syntax", str(exc)) from None
    if not isinstance(doc, dict):
        raise ValidationError("StateFile.object", "top level must be a JSON object")
    missing = [k for k in ("kind", "dims", "data") if k not in doc]
    if missing:
        raise ValidationError("StateFile.fields", f"missing {', '.join(missing)}")
    kind = doc["kind"]
    if kind not in ("pure", "mixed"):
        raise ValidationError("StateFile.kind", f"kind must be 'pure' or 'mixed', got {kind!r}")
    dims = doc["dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise ValidationError("StateFile.dims", "dims must be a list of integers")
    try:
        pairs = np.asarray(doc["data"], dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("StateFile.data", "data must be a list of [re, im] pairs") from None
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValidationError("StateFile.data", "data must be a list of [re, im] pairs")
    values = pairs[:, 0] + 1j * pairs[:, 1]
    n = prod(dims) if dims else 0
    if kind == "pure":
        if values.size != n:
            raise ValidationError("StateFile.length", f"expected {n} amplitudes, got {values.size}")
        return PureState(values, tuple(dims))
    if values.size != n * n:
        raise ValidationError("StateFile.length", f"expected {n * n} entries, got {values.size}")
    return DensityMatrix(values.reshape(n, n), tuple(dims))


def load_state(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_state(text)


def dump_state(state):
    if isinstance(state, PureState):
        kind, values = "pure", state.amplitudes
    else:
        kind, values = "mixed", state.matrix.ravel()
    data = [[float(v.real), float(v.imag)] for v in values]
    return json.dumps({"kind": kind, "dims": list(state.dims), "data": data})


def save_state(state, path):
    Path(path).write_text(dump_state(state) + "\n")
