"""CSV readers and writers for rules, node values, expansions and reports.

Every writer uses ``.17g`` formatting and LF line endings so binary64 values
round-trip exactly and repeated runs give byte-identical files.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .exceptions import DataValidationError, InvalidArgumentError
from .smolyak import GrowthRule, SmolyakScheme, SparseGridRule
from .tensor import SpectralExpansion, as_multi_index, total_degree

__all__ = [
    "fmt",
    "write_nodes",
    "read_nodes",
    "write_rule",
    "write_values",
    "read_values",
    "write_expansion",
    "read_expansion",
    "write_report",
    "write_surface",
    "write_gram",
    "load_index_set",
    "write_index_set",
    "load_scheme",
]

META_KEYS = ("dim", "level", "growth", "n_nodes", "n_basis")


def fmt(x) -> str:
    """17 significant digits; integers stay integers."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_rows(path, header, rows, comments=()):
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def _read_rows(path):
    """Return ``(comments, header, rows)``; ``#`` lines before the header are comments."""
    comments = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if not body and line.startswith("#"):
            comments.append(line[1:].strip())
        elif line.strip():
            body.append(line)
    if not body:
        raise DataValidationError(f"{path}: no header row")
    reader = csv.reader(body)
    header = [h.strip() for h in next(reader)]
    return comments, header, list(reader)


def _coord_header(d):
    return [f"s_{k}" for k in range(1, d + 1)]


def write_nodes(path, rule: SparseGridRule):
    """``nodes.csv``: the unique sparse-grid nodes in canonical order."""
    return _write_rows(path, _coord_header(rule.dimension), rule.nodes.tolist())


def write_rule(path, rule: SparseGridRule):
    """Sparse rule export ``s_1..s_d,weight``."""
    rows = (list(x) + [w] for x, w in zip(rule.nodes.tolist(), rule.weights.tolist()))
    return _write_rows(path, _coord_header(rule.dimension) + ["weight"], rows)


def _parse_floats(path, row_no, row, width):
    if len(row) != width:
        raise DataValidationError(f"{path}: row {row_no} has {len(row)} fields, expected {width}")
    try:
        return [float(v) for v in row]
    except ValueError:
        raise DataValidationError(f"{path}: row {row_no} is not numeric") from None


def read_nodes(path) -> np.ndarray:
    _, header, rows = _read_rows(path)
    d = len(header)
    if header != _coord_header(d):
        raise DataValidationError(f"{path}: expected header {','.join(_coord_header(d))}")
    return np.array([_parse_floats(path, r, row, d) for r, row in enumerate(rows, 1)]).reshape(-1, d)


def write_values(path, nodes, values):
    """``values.csv``: ``s_1..s_d,value`` with the nodes echoed."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    rows = (list(x) + [v] for x, v in zip(nodes.tolist(), values.tolist()))
    return _write_rows(path, _coord_header(nodes.shape[1]) + ["value"], rows)


def read_values(path, nodes, tol: float = 1e-12) -> np.ndarray:
    """Read ``values.csv`` and check it against the expected node table.

    Raises
    ------
    DataValidationError
        On a row-count mismatch, or naming the first row whose node echo
        differs from the expected node by more than ``tol`` in max-norm.
    """
    nodes = np.asarray(nodes, dtype=float)
    d = nodes.shape[1]
    _, header, rows = _read_rows(path)
    expected = _coord_header(d) + ["value"]
    if header != expected:
        raise DataValidationError(f"{path}: expected header {','.join(expected)}")
    if len(rows) != len(nodes):
        raise DataValidationError(f"{path}: has {len(rows)} rows, expected {len(nodes)} nodes")
    values = np.empty(len(nodes))
    for r, row in enumerate(rows, 1):
        data = _parse_floats(path, r, row, d + 1)
        if np.max(np.abs(np.array(data[:d]) - nodes[r - 1])) > tol:
            raise DataValidationError(
                f"{path}: row {r} node echo {data[:d]} does not match node {nodes[r - 1].tolist()}"
            )
        values[r - 1] = data[d]
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0]) + 1
        raise DataValidationError(f"{path}: row {bad} has a non-finite value")
    return values


def write_expansion(path, exp: SpectralExpansion, metadata: Optional[dict] = None):
    """Expansion CSV ``i_1..i_d,degree,coefficient`` in lexicographic key order.

    Known metadata entries (``dim``, ``level``, ``growth``, ``n_nodes``,
    ``n_basis``) are written first as ``# key value`` header lines.
    """
    meta = dict(exp.metadata)
    meta.update(metadata or {})
    meta.setdefault("dim", exp.dimension)
    meta.setdefault("n_basis", len(exp))
    comments = [f"{k} {meta[k]}" for k in META_KEYS if meta.get(k) is not None]
    header = [f"i_{k}" for k in range(1, exp.dimension + 1)] + ["degree", "coefficient"]
    rows = (list(i) + [total_degree(i), c] for i, c in exp)
    return _write_rows(path, header, rows, comments)


def read_expansion(path) -> SpectralExpansion:
    comments, header, rows = _read_rows(path)
    d = len(header) - 2
    expected = [f"i_{k}" for k in range(1, d + 1)] + ["degree", "coefficient"]
    if d < 1 or header != expected:
        raise DataValidationError(f"{path}: expected header i_1..i_d,degree,coefficient")
    meta = {}
    for line in comments:
        key, _, val = line.partition(" ")
        if key in META_KEYS:
            meta[key] = val.strip() if key == "growth" else _maybe_int(val)
    terms = {}
    for r, row in enumerate(rows, 1):
        if len(row) != d + 2:
            raise DataValidationError(f"{path}: row {r} has {len(row)} fields, expected {d + 2}")
        try:
            i = as_multi_index([int(v) for v in row[:d]])
            degree, c = int(row[d]), float(row[d + 1])
        except (ValueError, InvalidArgumentError):
            raise DataValidationError(f"{path}: row {r} is malformed") from None
        if degree != total_degree(i):
            raise DataValidationError(f"{path}: row {r} degree {degree} does not match {i}")
        if i in terms:
            raise DataValidationError(f"{path}: row {r} repeats index {i}")
        terms[i] = c
    return SpectralExpansion(terms, dimension=d, metadata=meta)


def _maybe_int(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text


def write_report(path, reports: Iterable):
    """``level,n_nodes,spam_err,direct_err,trunc_err``."""
    rows = ((r.level, r.n_nodes, r.spam_error, r.direct_error, r.truncation_error) for r in reports)
    return _write_rows(path, ["level", "n_nodes", "spam_err", "direct_err", "trunc_err"], rows)


def write_surface(path, rows):
    """Coefficient surface ``i_1,i_2,log10_abs_coeff``."""
    return _write_rows(path, ["i_1", "i_2", "log10_abs_coeff"], rows)


def write_gram(path, gram):
    """Dense Gram matrix (no header) plus a ``<stem>_legend.csv`` sidecar.

    Row ``r`` of the legend names the basis element of matrix row and
    column ``r``.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in gram.matrix.tolist():
            writer.writerow([fmt(v) for v in row])
    d = len(gram.basis[0])
    legend = path.with_name(path.stem + "_legend.csv")
    _write_rows(
        legend,
        ["row"] + [f"i_{k}" for k in range(1, d + 1)] + ["degree"],
        ([r] + list(i) + [total_degree(i)] for r, i in enumerate(gram.basis)),
    )
    return path, legend


def load_index_set(path) -> dict:
    """Read an explicit index set ``m_1..m_d,c`` into ``{m: c}``."""
    _, header, rows = _read_rows(path)
    d = len(header) - 1
    if d < 1 or header != [f"m_{k}" for k in range(1, d + 1)] + ["c"]:
        raise DataValidationError(f"{path}: expected header m_1..m_d,c")
    terms = {}
    for r, row in enumerate(rows, 1):
        if len(row) != d + 1:
            raise DataValidationError(f"{path}: row {r} has {len(row)} fields, expected {d + 1}")
        try:
            m = as_multi_index([int(v) for v in row[:d]])
            c = float(row[d])
        except (ValueError, InvalidArgumentError):
            raise DataValidationError(f"{path}: row {r} is malformed") from None
        if m in terms:
            raise DataValidationError(f"{path}: row {r} repeats index {m}")
        terms[m] = c
    if not terms:
        raise DataValidationError(f"{path}: index set is empty")
    return terms


def write_index_set(path, scheme: SmolyakScheme):
    header = [f"m_{k}" for k in range(1, scheme.dim + 1)] + ["c"]
    rows = (list(m) + [c] for m, c in zip(scheme.index_set, scheme.coefficients))
    return _write_rows(path, header, rows)


def load_scheme(path) -> SmolyakScheme:
    """Build a scheme from a ``key = value`` text config.

    Recognized keys: ``dim``, ``level``, ``growth`` (``exp`` or ``linear``)
    and optionally ``index_set``, a path (relative to the config file) to an
    ``m_1..m_d,c`` table that replaces the standard index set.
    """
    path = Path(path)
    fields = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                key, sep, val = line.partition(":")
            if not sep:
                raise DataValidationError(f"{path}: line {n} is not 'key = value'")
            fields[key.strip().lower()] = val.strip()
    unknown = set(fields) - {"dim", "level", "growth", "index_set"}
    if unknown:
        raise DataValidationError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        dim = int(fields["dim"])
        level = int(fields["level"]) if "level" in fields else None
    except KeyError:
        raise DataValidationError(f"{path}: 'dim' is required") from None
    except ValueError:
        raise DataValidationError(f"{path}: dim and level must be integers") from None
    growth = GrowthRule.parse(fields.get("growth", "exp"))
    if "index_set" in fields:
        terms = load_index_set(path.parent / os.path.expanduser(fields["index_set"]))
        scheme = SmolyakScheme.custom(terms, growth, level)
        if scheme.dim != dim:
            raise DataValidationError(f"{path}: index set has dimension {scheme.dim}, dim is {dim}")
        return scheme
    if level is None:
        raise DataValidationError(f"{path}: 'level' is required without an index set")
    return SmolyakScheme.standard(dim, level, growth)
