"""JSON bundles for partitioned systems and networks.

A system bundle looks like::

    {
      "format": "blockcert/1",
      "name": "example",
      "A": [[-1, 0], [0, -2]],
      "B": [[1], [1]],
      "C": [[1, 1]],
      "D": [[0]],
      "state_partition": [1, 1],
      "input_partition": [1],
      "output_partition": [1]
    }

``D`` may be omitted (zero) and so may ``B``/``C`` (a single zero
channel).  Any matrix may instead be given as ``{"mtx": "file.mtx"}``, a
Matrix Market file resolved relative to the bundle.  A network bundle
has ``"kind": "network"``, a ``"subsystems"`` list of ``{"A", "B", "C"}``
objects and interconnection matrices ``"M"``, ``"K"``, ``"N"``.

Floats are written with ``repr``, the shortest decimal string that reads
back to the identical double, so a write/read cycle is bit-exact.
"""

import json
import math
from pathlib import Path

import numpy as np
import scipy.io

from .network import NetworkModel
from .partition import Partition, PartitionedSystem

__all__ = [
    "FORMAT",
    "BundleError",
    "parse_system",
    "parse_network",
    "load_system",
    "load_network",
    "load_bundle",
    "system_to_dict",
    "network_to_dict",
    "dump_json",
    "save_system",
    "from_matrix_market",
]

FORMAT = "blockcert/1"


class BundleError(ValueError):
    """Malformed bundle; the message names the file, line or field at fault."""


def _matrix(value, field, base):
    if isinstance(value, dict):
        if set(value) != {"mtx"}:
            raise BundleError(f"field '{field}': matrix objects must have exactly one key 'mtx'")
        path = Path(value["mtx"])
        if base is not None and not path.is_absolute():
            path = Path(base) / path
        try:
            M = scipy.io.mmread(str(path))
        except (OSError, ValueError) as exc:
            raise BundleError(f"field '{field}': cannot read Matrix Market file {path}: {exc}") from None
        M = M.toarray() if hasattr(M, "toarray") else np.asarray(M)
        return np.atleast_2d(np.asarray(M, dtype=float))
    if not isinstance(value, list):
        raise BundleError(f"field '{field}' must be an array of rows, got {type(value).__name__}")
    if not value:
        raise BundleError(f"field '{field}' is empty")
    if not all(isinstance(r, list) for r in value):
        # a flat list is read as a single row
        value = [value]
    width = len(value[0])
    out = np.empty((len(value), width))
    for i, row in enumerate(value):
        if len(row) != width:
            raise BundleError(f"field '{field}' row {i} has {len(row)} entries, expected {width}")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise BundleError(f"field '{field}'[{i}][{j}] is not a finite number: {x!r}")
            out[i, j] = x
    return out


def _partition(value, field, total):
    if value is None:
        return Partition((total,))
    if not isinstance(value, list) or not value:
        raise BundleError(f"field '{field}' must be a non-empty array of positive integers")
    for i, k in enumerate(value):
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise BundleError(f"field '{field}'[{i}] must be a positive integer, got {k!r}")
    if sum(value) != total:
        raise BundleError(f"field '{field}' sums to {sum(value)}, expected {total}")
    return Partition(tuple(value))


def _check_format(doc, source):
    if not isinstance(doc, dict):
        raise BundleError(f"{source}: top level must be a JSON object")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise BundleError(f"{source}: unsupported format {fmt!r} (expected {FORMAT!r})")


def parse_system(doc, base=None, source="bundle"):
    """Build a :class:`PartitionedSystem` from a decoded bundle."""
    _check_format(doc, source)
    if doc.get("kind", "system") != "system":
        raise BundleError(f"{source}: expected a system bundle, got kind {doc.get('kind')!r}")
    if "A" not in doc:
        raise BundleError(f"{source}: missing required field 'A'")
    A = _matrix(doc["A"], "A", base)
    if A.shape[0] != A.shape[1]:
        raise BundleError(f"field 'A' must be square, got {A.shape[0]}x{A.shape[1]}")
    N = A.shape[0]
    B = _matrix(doc["B"], "B", base) if "B" in doc else np.zeros((N, 1))
    C = _matrix(doc["C"], "C", base) if "C" in doc else np.zeros((1, N))
    if B.shape[0] != N:
        raise BundleError(f"field 'B' has {B.shape[0]} rows, expected {N}")
    if C.shape[1] != N:
        raise BundleError(f"field 'C' has {C.shape[1]} columns, expected {N}")
    D = _matrix(doc["D"], "D", base) if "D" in doc else np.zeros((C.shape[0], B.shape[1]))
    if D.shape != (C.shape[0], B.shape[1]):
        raise BundleError(f"field 'D' has shape {D.shape[0]}x{D.shape[1]}, expected {C.shape[0]}x{B.shape[1]}")
    sp = _partition(doc.get("state_partition"), "state_partition", N)
    ip = _partition(doc.get("input_partition"), "input_partition", B.shape[1])
    op = _partition(doc.get("output_partition"), "output_partition", C.shape[0])
    return PartitionedSystem(A, B, C, D, sp, ip, op, name=str(doc.get("name", "")))


def parse_network(doc, base=None, source="bundle"):
    """Build a :class:`NetworkModel` from a decoded network bundle."""
    _check_format(doc, source)
    if doc.get("kind") != "network":
        raise BundleError(f"{source}: expected \"kind\": \"network\"")
    subs = doc.get("subsystems")
    if not isinstance(subs, list) or not subs:
        raise BundleError(f"{source}: 'subsystems' must be a non-empty array")
    triples = []
    for i, s in enumerate(subs):
        if not isinstance(s, dict):
            raise BundleError(f"field 'subsystems'[{i}] must be an object")
        for key in "ABC":
            if key not in s:
                raise BundleError(f"field 'subsystems'[{i}] is missing '{key}'")
        trip = tuple(_matrix(s[key], f"subsystems[{i}].{key}", base) for key in "ABC")
        if "D" in s and np.any(_matrix(s["D"], f"subsystems[{i}].D", base)):
            raise BundleError(f"field 'subsystems'[{i}].D: direct feedthrough is not supported")
        triples.append(trip)
    m_tot = sum(t[1].shape[1] for t in triples)
    p_tot = sum(t[2].shape[0] for t in triples)
    M = _matrix(doc["M"], "M", base) if "M" in doc else np.zeros((m_tot, p_tot))
    for key in ("K", "N"):
        if key not in doc:
            raise BundleError(f"{source}: missing required field '{key}'")
    K = _matrix(doc["K"], "K", base)
    N = _matrix(doc["N"], "N", base)
    ip = _partition(doc.get("input_partition"), "input_partition", K.shape[1])
    op = _partition(doc.get("output_partition"), "output_partition", N.shape[0])
    try:
        return NetworkModel(tuple(triples), M, K, N, ip, op)
    except ValueError as exc:
        raise BundleError(f"{source}: {exc}") from None


def _read(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise BundleError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_bundle(path):
    """Load a system or network bundle, dispatching on ``"kind"``."""
    doc = _read(path)
    if isinstance(doc, dict) and doc.get("kind") == "network":
        return parse_network(doc, Path(path).parent, str(path))
    return parse_system(doc, Path(path).parent, str(path))


def load_system(path):
    return parse_system(_read(path), Path(path).parent, str(path))


def load_network(path):
    return parse_network(_read(path), Path(path).parent, str(path))


def _rows(M):
    return [[float(x) for x in row] for row in np.atleast_2d(M)]


def system_to_dict(sys, name=None):
    doc = {"format": FORMAT}
    if name or sys.name:
        doc["name"] = name or sys.name
    doc.update({
        "A": _rows(sys.A), "B": _rows(sys.B), "C": _rows(sys.C), "D": _rows(sys.D),
        "state_partition": list(sys.state_partition.block_sizes),
        "input_partition": list(sys.input_partition.block_sizes),
        "output_partition": list(sys.output_partition.block_sizes),
    })
    return doc


def network_to_dict(net):
    return {
        "format": FORMAT,
        "kind": "network",
        "subsystems": [{"A": _rows(A), "B": _rows(B), "C": _rows(C)} for A, B, C in net.subsystems],
        "M": _rows(net.M), "K": _rows(net.K), "N": _rows(net.N),
        "input_partition": list(net.input_partition.block_sizes),
        "output_partition": list(net.output_partition.block_sizes),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(doc, indent=2):
    """Serialize to JSON; non-finite floats become ``null``."""
    return json.dumps(_jsonable(doc), indent=indent, allow_nan=False)


def save_system(sys, path, name=None):
    Path(path).write_text(dump_json(system_to_dict(sys, name)) + "\n", encoding="utf-8")


def from_matrix_market(A, B=None, C=None, D=None, state_partition=None,
                       input_partition=None, output_partition=None):
    """:class:`PartitionedSystem` from Matrix Market files for ``A, B, C, D``."""
    def read(p):
        return None if p is None else _matrix({"mtx": str(p)}, str(p), None)

    A, B, C, D = read(A), read(B), read(C), read(D)
    return PartitionedSystem(A, B, C, D, state_partition, input_partition, output_partition)
