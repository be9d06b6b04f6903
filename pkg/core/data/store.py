"""Flat-file storage layer -- CSV tables, JSON bundles and SVG documents.

Files are the only persistence. Every writer is deterministic: the same
record produces the same bytes, so re-running with the same seed gives
identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import scipy
from pydantic import BaseModel

from core import __version__
from core.models.sweeps import LineComparison, PhaseGrid, PnegCurve, TransitionLine
from core.models.theory import CriticalLine

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=BaseModel)

BUNDLE_FORMAT = "arbvol-bundle/1"

GRID_HEADER = ("param", "n", "fraction", "marginal_count")


class StoreError(OSError):
    """A file could not be written or read."""


def _fmt(value: float) -> str:
    return "%.9g" % value


def _write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise StoreError(f"Cannot write {path}: {exc}") from exc
    logger.info("Wrote %s", path)
    return path


def _csv_text(header: tuple[str, ...], rows: list[tuple]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def write_grid_csv(grid: PhaseGrid, path: str | Path) -> Path:
    """One row per cell: param, n, fraction, marginal_count."""
    spec = grid.spec
    rows = [
        (_fmt(value), _fmt(n), _fmt(grid.fraction[i][j]), grid.marginal_count[i][j])
        for i, value in enumerate(spec.param_grid)
        for j, n in enumerate(spec.n_grid)
    ]
    return _write_text(path, _csv_text(GRID_HEADER, rows))


def write_line_csv(line: TransitionLine | CriticalLine, path: str | Path) -> Path:
    """One row per point: param, n."""
    rows = [(_fmt(p), _fmt(n)) for p, n in line.points]
    return _write_text(path, _csv_text(("param", "n"), rows))


def write_comparison_csv(comparison: LineComparison, path: str | Path) -> Path:
    rows = [
        (_fmt(r.param), _fmt(r.empirical_n), _fmt(r.analytic_n), _fmt(r.abs_dev))
        for r in comparison.rows
    ]
    return _write_text(path, _csv_text(("param", "empirical_n", "analytic_n", "abs_dev"), rows))


def write_pneg_csv(curve: PnegCurve, path: str | Path) -> Path:
    rows = [
        (_fmt(value), _fmt(n), _fmt(curve.empirical[i][j]), _fmt(curve.analytic[i][j]))
        for i, value in enumerate(curve.params)
        for j, n in enumerate(curve.n_grid)
    ]
    return _write_text(path, _csv_text(("param", "n", "p_neg", "p_neg_expected"), rows))


# ---------------------------------------------------------------------------
# JSON bundles
# ---------------------------------------------------------------------------

def versions() -> dict[str, str]:
    return {"arbvol": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def bundle(record: BaseModel, metadata: dict[str, Any] | None = None) -> dict[str, Any]:
    """Wrap a record with its type, library versions and run metadata."""
    return {
        "format": BUNDLE_FORMAT,
        "record_type": type(record).__name__,
        "versions": versions(),
        "metadata": metadata or {},
        # Through the JSON encoder so NaN cells survive as NaN
        "record": json.loads(record.model_dump_json()),
    }


def write_json(record: BaseModel, path: str | Path, metadata: dict[str, Any] | None = None) -> Path:
    """Write a record bundle with sorted keys (no timestamps, stable bytes)."""
    text = json.dumps(bundle(record, metadata), indent=2, sort_keys=True) + "\n"
    return _write_text(path, text)


def read_json(path: str | Path, model_class: type[T]) -> T:
    """Read a bundle (or a bare record) back into ``model_class``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise StoreError(f"Cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if isinstance(data, dict) and data.get("format") == BUNDLE_FORMAT:
        if data.get("record_type") != model_class.__name__:
            raise ValueError(
                f"{path} holds a {data.get('record_type')}, expected {model_class.__name__}"
            )
        data = data["record"]
    return model_class.model_validate(data)


def write_svg(document: str, path: str | Path) -> Path:
    return _write_text(path, document)


class Store:
    """Writes run outputs under one directory.

    All filenames are relative to the output directory.
    """

    def __init__(self, root: str | Path) -> None:
        self._root = Path(root)

    @property
    def root(self) -> Path:
        return self._root

    def path(self, filename: str) -> Path:
        return self._root / filename

    def write_grid_csv(self, filename: str, grid: PhaseGrid) -> Path:
        return write_grid_csv(grid, self.path(filename))

    def write_line_csv(self, filename: str, line: TransitionLine | CriticalLine) -> Path:
        return write_line_csv(line, self.path(filename))

    def write_comparison_csv(self, filename: str, comparison: LineComparison) -> Path:
        return write_comparison_csv(comparison, self.path(filename))

    def write_pneg_csv(self, filename: str, curve: PnegCurve) -> Path:
        return write_pneg_csv(curve, self.path(filename))

    def write_json(self, filename: str, record: BaseModel, metadata: dict[str, Any] | None = None) -> Path:
        return write_json(record, self.path(filename), metadata)

    def read_json(self, filename: str, model_class: type[T]) -> T:
        return read_json(self.path(filename), model_class)

    def write_svg(self, filename: str, document: str) -> Path:
        return write_svg(document, self.path(filename))
