"""CSV and JSON interchange files.

Floats are written with ``repr`` so every file re-parses to exactly the same
values.  Three table layouts are used:

- curves:      re,im,theta,word,branch
- eigenvalues: re,im,seed,n,source
- maps:        re,im,gamma,escape_fraction
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataFormatError

CURVE_HEADER = ("re", "im", "theta", "word", "branch")
EIGEN_HEADER = ("re", "im", "seed", "n", "source")
MAP_HEADER = ("re", "im", "gamma", "escape_fraction")


def _f(x) -> str:
    return repr(float(x))


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def curve_rows(spectrum):
    """Rows ordered by (member, branch, theta); NaN gap points are skipped."""
    members = getattr(spectrum, "members", [spectrum])
    for m in members:
        label = str(m.word)
        for k, branch in enumerate(m.curves):
            for theta, z in zip(m.thetas, branch):
                if np.isfinite(z):
                    yield (_f(z.real), _f(z.imag), _f(theta), label, str(k))


def write_curve_csv(path, spectrum) -> int:
    n = 0
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(CURVE_HEADER)
        for row in curve_rows(spectrum):
            w.writerow(row)
            n += 1
    return n


def write_eigen_csv(path, results) -> int:
    """One block of rows per EigenResult, in the given order."""
    n = 0
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(EIGEN_HEADER)
        for res in results:
            seed = "" if res.spec.seed is None else str(res.spec.seed)
            src = str(res.spec.source)
            for z in res.eigenvalues:
                w.writerow((_f(z.real), _f(z.imag), seed, str(res.spec.n), src))
                n += 1
    return n


def write_map_csv(path, lmap) -> int:
    n = 0
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(MAP_HEADER)
        for z, g, f in lmap.rows():
            w.writerow((_f(z.real), _f(z.imag), _f(g), _f(f)))
            n += 1
    return n


@dataclass
class PointTable:
    """Parsed CSV: complex points plus every other column as strings."""

    path: str
    header: tuple
    points: np.ndarray
    columns: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def column(self, name, cast=float) -> np.ndarray:
        return np.array([cast(v) for v in self.columns[name]])


def read_points_csv(path) -> PointTable:
    """Read any of the layouts above; needs ``re`` and ``im`` columns.

    Raises DataFormatError naming the line of the first malformed row, and
    FileNotFoundError for a missing file.
    """
    path = str(path)
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        try:
            header = tuple(next(rows))
        except StopIteration:
            raise DataFormatError("empty file", path, 1) from None
        if "re" not in header or "im" not in header:
            raise DataFormatError(f"header needs re and im columns, got {','.join(header)}", path, 1)
        ir, ii = header.index("re"), header.index("im")
        pts = []
        cols = {h: [] for h in header if h not in ("re", "im")}
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
            try:
                z = complex(float(row[ir]), float(row[ii]))
            except ValueError:
                raise DataFormatError(f"bad number in {row[ir]!r},{row[ii]!r}", path, lineno) from None
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise DataFormatError("non-finite coordinate", path, lineno)
            pts.append(z)
            for h, v in zip(header, row):
                if h in cols:
                    cols[h].append(v)
    return PointTable(path, header, np.array(pts, dtype=np.complex128), cols)


def write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(_plain(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _plain(x):
    """Make numpy scalars, complex numbers and paths JSON-serializable."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, Path):
        return str(x)
    return x
