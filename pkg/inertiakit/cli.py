"""Cyclopts-based CLI for InertiaKit.

Exit codes: 0 success, 1 usage error, 2 input error, 3 results printed but a
zero leading minor was met somewhere (the counts may be off).
"""

# file: inertiakit/cli.py
from __future__ import annotations

import logging
import os
import sys
import time
from collections.abc import Callable
from functools import wraps
from pathlib import Path
from typing import Annotated, Any

import numpy as np
from cyclopts import App, Parameter

from .eig import (
    BisectionParams,
    bisection_cost_estimate,
    count_in_interval,
    eig_all,
    eig_by_ordinal,
    eig_in_interval,
    spectrum_histogram,
)
from .errors import InertiaKitError
from .factor import Variant, negative_index
from .mmio import apply_ordering, read_matrix_market, read_permutation
from .oracle import instability_report
from .report import RunReport, Table, to_csv, to_json
from .sparse import CsrMatrix, csr_shift
from .symbolic import col_etree, r_row_counts

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_SINGULAR = 3

app = App(name="inertiakit", help="Inertia and bisection eigenvalues of sparse symmetric matrices.")

JsonFlag = Annotated[bool, Parameter(name="--json", help="Print one JSON object.")]
CsvFlag = Annotated[bool, Parameter(name="--csv", help="Print CSV (header + rows).")]
PermOpt = Annotated[Path | None, Parameter(help="0-based permutation file applied as PAPᵀ.")]
IntervalOpt = Annotated[tuple[float, float] | None, Parameter(help="Half-open interval [a, b).")]


def _guard(fn: Callable[..., int]) -> Callable[..., int]:
    """Turn library errors into one-line messages and exit codes."""

    @wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> int:
        try:
            return fn(*args, **kwargs)
        except (InertiaKitError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        except ValueError as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE

    return wrapper


def _load(path: Path, perm: Path | None) -> tuple[CsrMatrix, str]:
    A = read_matrix_market(path)
    if perm is None:
        return A, "natural"
    return apply_ordering(A, read_permutation(perm, A.n)), perm.stem


def _emit_values(payload: dict[str, Any], values: list[float], json_out: bool, csv_out: bool) -> None:
    if json_out:
        print(to_json({**payload, "values": values}))
    elif csv_out:
        print(to_csv({"index": k, "value": repr(v)} for k, v in enumerate(values, start=1)), end="")
    else:
        for v in values:
            print(repr(v))


@app.command
@_guard
def inertia(
    file: Path,
    *,
    variant: Variant = Variant.ELEMENTARY,
    perm: PermOpt = None,
    shift: float = 0.0,
    json_out: JsonFlag = False,
) -> int:
    """Negative index of inertia of A - shift·I."""
    A, ordering = _load(file, perm)
    start = time.perf_counter()
    rep = negative_index(csr_shift(A, shift), variant)
    run = RunReport.from_inertia(
        file.name, A, rep, ordering=ordering, wall_time=time.perf_counter() - start, shift=shift
    )
    if json_out:
        print(to_json(run.as_dict()))
    else:
        for key, value in run.as_dict().items():
            print(f"{key}: {value}")
    return EXIT_SINGULAR if rep.singular_minor else EXIT_OK


@app.command
@_guard
def eig(
    file: Path,
    *,
    all_: Annotated[bool, Parameter(name="--all", help="All eigenvalues (default).")] = False,
    interval: IntervalOpt = None,
    ordinals: Annotated[tuple[int, int] | None, Parameter(help="1-based ordinals lo hi.")] = None,
    tau: float = 2.0**-52,
    variant: Variant = Variant.ELEMENTARY,
    perm: PermOpt = None,
    json_out: JsonFlag = False,
    csv_out: CsvFlag = False,
) -> int:
    """Eigenvalues by bisection."""
    if sum([all_, interval is not None, ordinals is not None]) > 1:
        raise ValueError("choose one of --all, --interval, --ordinals")
    params = BisectionParams(tau=tau, variant=variant)
    A, ordering = _load(file, perm)
    start = time.perf_counter()
    if interval is not None:
        res, mode = eig_in_interval(A, interval[0], interval[1], params), "interval"
    elif ordinals is not None:
        res, mode = eig_by_ordinal(A, ordinals[0], ordinals[1], params), "ordinals"
    else:
        res, mode = eig_all(A, params), "all"
    payload = {
        "matrix_id": file.name,
        "ordering": ordering,
        "variant": str(params.variant),
        "mode": mode,
        "tau": tau,
        "inertia_evals": res.inertia_evals,
        "singular_retries": res.singular_retries,
        "unresolved_singular": res.unresolved_singular,
        "wall_time": time.perf_counter() - start,
    }
    _emit_values(payload, res.values, json_out, csv_out)
    flagged = res.unresolved_singular or any(res.singular_endpoints)
    return EXIT_SINGULAR if flagged else EXIT_OK


@app.command
@_guard
def count(
    file: Path,
    *,
    interval: Annotated[tuple[float, float], Parameter(help="Half-open interval [a, b).")],
    variant: Variant = Variant.ELEMENTARY,
    perm: PermOpt = None,
    json_out: JsonFlag = False,
) -> int:
    """Number of eigenvalues in [a, b)."""
    A, ordering = _load(file, perm)
    res = count_in_interval(A, interval[0], interval[1], variant)
    if json_out:
        print(
            to_json(
                {
                    "matrix_id": file.name,
                    "ordering": ordering,
                    "interval": list(interval),
                    "count": res.count,
                    "nu0": res.nu0,
                    "nu1": res.nu1,
                    "singular_minor": res.singular_minor,
                }
            )
        )
    else:
        print(res.count)
    return EXIT_SINGULAR if res.singular_minor else EXIT_OK


@app.command
@_guard
def histogram(
    file: Path,
    *,
    interval: Annotated[tuple[float, float], Parameter(help="Range [a, b) split into bins.")],
    bins: int = 10,
    variant: Variant = Variant.ELEMENTARY,
    perm: PermOpt = None,
    json_out: JsonFlag = False,
    csv_out: CsvFlag = False,
) -> int:
    """Eigenvalue counts over equal-width bins."""
    if bins < 1:
        raise ValueError("--bins must be positive")
    A, _ = _load(file, perm)
    edges = np.linspace(interval[0], interval[1], bins + 1).tolist()
    hist = spectrum_histogram(A, edges, variant)
    rows = [
        {"lo": lo, "hi": hi, "count": c}
        for lo, hi, c in zip(hist.edges, hist.edges[1:], hist.counts, strict=False)
    ]
    if json_out:
        print(to_json({"matrix_id": file.name, "bins": rows, "total": hist.total}))
    elif csv_out:
        print(to_csv(rows), end="")
    else:
        for row in rows:
            print(f"[{row['lo']:.6g}, {row['hi']:.6g})  {row['count']}")
    return EXIT_SINGULAR if hist.singular_edges else EXIT_OK


def _stats_rows(file: Path, A: CsrMatrix, ordering: str) -> list[RunReport]:
    start = time.perf_counter()
    counts = r_row_counts(A, col_etree(A))
    symbolic_time = time.perf_counter() - start
    runs = []
    for variant in Variant:
        start = time.perf_counter()
        rep = negative_index(A, variant, counts)
        wall = time.perf_counter() - start
        runs.append(
            RunReport.from_inertia(
                file.name,
                A,
                rep,
                ordering=ordering,
                wall_time=wall,
                predicted_nnz=counts.total,
                predicted_fill=counts.total / A.nnz if A.nnz else 0.0,
                symbolic_time=symbolic_time,
                bisection_estimate_s=bisection_cost_estimate(A.n, wall),
            )
        )
    return runs


@app.command
@_guard
def stats(
    file: Path,
    *,
    perm: PermOpt = None,
    json_out: JsonFlag = False,
    csv_out: CsvFlag = False,
    markdown: bool = False,
) -> int:
    """Both variants' fill, flops and timing, against the symbolic prediction."""
    A = read_matrix_market(file)
    runs = _stats_rows(file, A, "natural")
    if perm is not None:
        runs += _stats_rows(file, apply_ordering(A, read_permutation(perm, A.n)), perm.stem)
    rows = [r.as_dict() for r in runs]
    if json_out:
        print(to_json({"matrix_id": file.name, "reports": rows}))
    elif csv_out:
        print(to_csv(rows), end="")
    elif markdown:
        columns = ["ordering", "variant", "nu", "flops", "final_nnz", "predicted_nnz", "fill_ratio", "wall_time"]
        print(Table.from_dicts(rows, columns).to_markdown(), end="")
    else:
        for row in rows:
            for key, value in row.items():
                print(f"{key}: {value}")
            print()
    return EXIT_SINGULAR if any(r.singular_minor for r in runs) else EXIT_OK


@app.command(name="demo-instability")
@_guard
def demo_instability(*, n: int = 256, seed: int = 0, json_out: JsonFlag = False) -> int:
    """Nearly singular leading blocks: Jacobi count against both variants."""
    rep = instability_report(n, seed)
    data = rep.as_dict()
    if json_out:
        print(to_json(data))
    else:
        for key, value in data.items():
            print(f"{key}: {value}")
        verdict = "variants disagree with Jacobi" if rep.discrepancy else "all counts agree"
        print(f"# {verdict}")
    singular = rep.elementary_singular or rep.givens_singular
    return EXIT_SINGULAR if singular else EXIT_OK


def _configure_logging() -> None:
    level_name = os.environ.get("INERTIAKIT_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)


def main(argv: list[str] | None = None) -> None:
    """Entry point for the inertiakit CLI."""
    _configure_logging()
    code = app(argv)
    sys.exit(code if isinstance(code, int) else EXIT_OK)


if __name__ == "__main__":
    main()
