"""Binary function-level design structure matrix and its CSV layout.

Row = source function, column = target function.  The diagonal never holds
a dependency; in CSV output it carries the function's tag (``F1``, ``F2``...).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from dsmopt.model import Allocation, ArchitectureModel, check_allocation

HEADER_NAME = "LogicalFunctionName"
HEADER_INDEX = "Index"
FOOTER_NAME = "LogicalComponentName"


@dataclass(frozen=True, eq=False)
class Dsm:
    entries: np.ndarray
    order: tuple[int, ...]
    labels: tuple[str, ...]
    diagonal_tags: tuple[str, ...]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.uint8)
        n = entries.shape[0]
        if entries.shape != (n, n):
            raise ValueError(f"DSM must be square, got shape {entries.shape}")
        if np.any(entries > 1):
            raise ValueError("DSM entries must be 0 or 1")
        if np.any(np.diag(entries)):
            raise ValueError("DSM diagonal must be empty")
        if sorted(self.order) != list(range(n)):
            raise ValueError("order must be a permutation of 0..N-1")
        if len(self.labels) != n or len(self.diagonal_tags) != n:
            raise ValueError("labels and diagonal_tags must have one entry per function")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "diagonal_tags", tuple(self.diagonal_tags))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def reordered(self, order: Sequence[int]) -> "Dsm":
        return Dsm(self.entries, tuple(order), self.labels, self.diagonal_tags)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dsm):
            return NotImplemented
        return (
            np.array_equal(self.entries, other.entries)
            and self.order == other.order
            and self.labels == other.labels
            and self.diagonal_tags == other.diagonal_tags
        )


def build_dsm(model: ArchitectureModel) -> Dsm:
    n = model.n_functions
    entries = np.zeros((n, n), dtype=np.uint8)
    for e in model.exchanges:
        entries[e.source, e.target] = 1
    return Dsm(
        entries,
        tuple(range(n)),
        tuple(f.name for f in model.functions),
        tuple(f.tag if f.tag is not None else f.name for f in model.functions),
    )


def cluster_order(model: ArchitectureModel, alloc: Allocation) -> tuple[int, ...]:
    """Function ids grouped by component (component id order, then function id)."""
    check_allocation(model, alloc)
    return tuple(sorted(range(model.n_functions), key=lambda f: (alloc[f], f)))


def component_footer(
    order: Sequence[int], alloc: Allocation, component_names: Sequence[str]
) -> list[str]:
    """One cell per displayed column: component name at each block start, else blank."""
    cells = []
    previous = None
    for f in order:
        comp = alloc[f]
        cells.append(component_names[comp] if comp != previous else "")
        previous = comp
    return cells


def matrix_rows(
    dsm: Dsm, grouping: tuple[Allocation, Sequence[str]] | None = None
) -> list[list[str]]:
    order = dsm.order
    rows = [[HEADER_NAME, HEADER_INDEX, *(str(f) for f in order)]]
    for r in order:
        row = [dsm.labels[r], str(r)]
        for c in order:
            row.append(dsm.diagonal_tags[r] if r == c else str(int(dsm.entries[r, c])))
        rows.append(row)
    if grouping is not None:
        alloc, names = grouping
        rows.append([FOOTER_NAME, "", *component_footer(order, alloc, names)])
    return rows


def format_matrix(dsm: Dsm, grouping: tuple[Allocation, Sequence[str]] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(matrix_rows(dsm, grouping))
    return buf.getvalue()


def write_matrix(
    dsm: Dsm,
    path: str | Path,
    grouping: tuple[Allocation, Sequence[str]] | None = None,
) -> Path:
    """Write the spreadsheet-style CSV; ``grouping`` adds the component footer row."""
    path = Path(path)
    try:
        path.write_text(format_matrix(dsm, grouping), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write matrix to {path}: {exc}") from exc
    return path


def parse_matrix(text: str) -> Dsm:
    """Inverse of ``format_matrix`` for the numeric cells, order, labels and tags.

    A component footer row, if present, is ignored.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:2] != [HEADER_NAME, HEADER_INDEX]:
        raise ValueError("missing matrix header row")
    order = [int(c) for c in rows[0][2:]]
    body = [r for r in rows[1:] if r and r[0] != FOOTER_NAME]
    n = len(order)
    if len(body) != n:
        raise ValueError(f"expected {n} matrix rows, found {len(body)}")
    entries = np.zeros((n, n), dtype=np.uint8)
    labels = [""] * n
    tags = [""] * n
    for pos, row in enumerate(body):
        fid = int(row[1])
        if fid != order[pos]:
            raise ValueError(f"row {pos} is function {fid}, header says {order[pos]}")
        labels[fid] = row[0]
        for cpos, cell in enumerate(row[2 : 2 + n]):
            col = order[cpos]
            if col == fid:
                tags[fid] = cell
            else:
                entries[fid, col] = int(cell)
    return Dsm(entries, tuple(order), tuple(labels), tuple(tags))


def read_matrix(path: str | Path) -> Dsm:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))
