"""Run reports and their JSON, CSV and Markdown renderings."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .factor import InertiaReport
from .sparse import CsrMatrix

__all__ = ["RUN_FIELDS", "RunReport", "Table", "to_csv", "to_json"]

RUN_FIELDS = (
    "matrix_id",
    "n",
    "nnz",
    "variant",
    "ordering",
    "nu",
    "singular_minor",
    "singular_rows",
    "interchanges",
    "flops",
    "final_nnz",
    "max_row_nnz",
    "fill_ratio",
    "wall_time",
)


@dataclass
class RunReport:
    """One factorization run as reported by the CLI.

    ``fill_ratio`` is nonzeros in the factor divided by nonzeros in ``A``.
    Extra per-command columns (predicted fill, cost estimates) go in ``extras``.
    """

    matrix_id: str
    n: int
    nnz: int
    variant: str
    ordering: str
    nu: int
    singular_minor: bool
    interchanges: int
    flops: int
    final_nnz: int
    wall_time: float
    max_row_nnz: int = 0
    singular_rows: tuple[int, ...] = ()
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def fill_ratio(self) -> float:
        """``final_nnz / nnz``; 0 for an empty matrix."""
        return self.final_nnz / self.nnz if self.nnz else 0.0

    @classmethod
    def from_inertia(
        cls,
        matrix_id: str,
        A: CsrMatrix,
        report: InertiaReport,
        *,
        ordering: str = "natural",
        wall_time: float = 0.0,
        **extras: Any,
    ) -> RunReport:
        """Combine a factorization report with run metadata."""
        return cls(
            matrix_id=matrix_id,
            n=A.n,
            nnz=A.nnz,
            variant=str(report.variant),
            ordering=ordering,
            nu=report.nu,
            singular_minor=report.singular_minor,
            interchanges=report.interchanges,
            flops=report.flops,
            final_nnz=report.final_nnz,
            wall_time=wall_time,
            max_row_nnz=report.max_row_nnz,
            singular_rows=report.singular_rows,
            extras=dict(extras),
        )

    def as_dict(self) -> dict[str, Any]:
        """Every field in ``RUN_FIELDS`` order, then the extras."""
        out: dict[str, Any] = {}
        for name in RUN_FIELDS:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        out.update(self.extras)
        return out


def to_json(payload: Any) -> str:
    """Indented JSON; tuples become lists."""
    return json.dumps(payload, indent=2)


def _csv_cell(value: Any) -> Any:
    if isinstance(value, list | tuple):
        return ";".join(str(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def to_csv(rows: Iterable[Mapping[str, Any]]) -> str:
    """Header plus one line per row; columns are the union of keys in first-seen order."""
    rows = list(rows)
    header: list[str] = []
    for row in rows:
        header += [k for k in row if k not in header]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _md_escape_cell(x: Any) -> str:
    """Escape Markdown table cell content (pipes/newlines)."""
    s = f"{x:.6g}" if isinstance(x, float) else str(x)
    s = s.replace("|", r"\|")
    return s.replace("\n", "<br>")


@dataclass
class Table:
    """Rows of report data with a Markdown rendering."""

    headers: list[str]
    rows: list[list[Any]]

    @classmethod
    def from_dicts(cls, rows: Iterable[Mapping[str, Any]], columns: Iterable[str] | None = None) -> Table:
        """Create a table from dictionaries, optionally restricted to ``columns``."""
        rows_l = list(rows)
        headers = list(columns) if columns is not None else (list(rows_l[0].keys()) if rows_l else [])
        body = [[row.get(h, "") for h in headers] for row in rows_l]
        return cls(headers, body)

    def to_markdown(self) -> str:
        """Serialize the table as GitHub-Flavored Markdown."""
        if not self.headers:
            return ""
        header = "| " + " | ".join(map(_md_escape_cell, self.headers)) + " |"
        sep = "| " + " | ".join("---" for _ in self.headers) + " |"
        body = "\n".join("| " + " | ".join(_md_escape_cell(c) for c in r) + " |" for r in self.rows)
        return f"{header}\n{sep}\n{body}\n"
