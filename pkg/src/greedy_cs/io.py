"""Plain-text matrix and vector files.

Matrices: one row per line, comma separated, ``#`` starts a comment line.
Vectors: one value per line, or a single comma separated line.
Values are written with ``repr`` so a write/read round trip is exact.
"""
from __future__ import annotations

import os

import numpy as np

from .dictionary import NORM_TOL, Dictionary, normalize_columns
from .errors import NormViolation, ParseError

FILE_NORM_TOL = 1e-8


def _rows(text):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def _parse_fields(lineno, line):
    out = []
    for col, tok in enumerate(line.split(","), start=1):
        tok = tok.strip()
        try:
            out.append(float(tok))
        except ValueError:
            raise ParseError(f"not a number: {tok!r}", lineno, col) from None
    return out


def parse_matrix(text: str) -> np.ndarray:
    rows = []
    width = None
    for lineno, line in _rows(text):
        vals = _parse_fields(lineno, line)
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ParseError(f"expected {width} columns, found {len(vals)}", lineno)
        rows.append(vals)
    if not rows:
        raise ParseError("no data rows")
    return np.array(rows, dtype=float)


def parse_vector(text: str) -> np.ndarray:
    rows = list(_rows(text))
    if not rows:
        raise ParseError("no data")
    if len(rows) == 1:
        return np.array(_parse_fields(*rows[0]), dtype=float)
    vals = []
    for lineno, line in rows:
        fields = _parse_fields(lineno, line)
        if len(fields) != 1:
            raise ParseError("expected one value per line", lineno)
        vals.extend(fields)
    return np.array(vals, dtype=float)


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return parse_matrix(fh.read())


def read_vector(path) -> np.ndarray:
    with open(path) as fh:
        return parse_vector(fh.read())


def format_matrix(matrix, header=None) -> str:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.extend(",".join(repr(float(v)) for v in row) for row in matrix)
    return "\n".join(lines) + "\n"


def write_matrix(path, matrix, header=None):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_matrix(matrix, header))


def write_vector(path, vector):
    vector = np.ravel(np.asarray(vector, dtype=float))
    with open(path, "w", newline="\n") as fh:
        fh.write("".join(repr(float(v)) + "\n" for v in vector))


def load_dictionary(path, renormalize: bool = False) -> Dictionary:
    """Read a dictionary file, rejecting atoms off unit norm by more than 1e-8.

    Atoms within that tolerance are rescaled to unit norm so the stricter
    in-memory invariant holds. ``renormalize=True`` accepts any nonzero
    column.
    """
    raw = read_matrix(os.fspath(path))
    norms = np.sqrt(np.sum(raw * raw, axis=0))
    if not renormalize:
        bad = np.flatnonzero(np.abs(norms - 1.0) > FILE_NORM_TOL)
        if bad.size:
            raise NormViolation(int(bad[0]), float(norms[bad[0]]))
    if raw.shape[1] >= 2 and np.all(np.abs(norms - 1.0) <= NORM_TOL):
        # already normalized: keep the file's bits untouched
        return Dictionary(raw)
    return normalize_columns(raw)
