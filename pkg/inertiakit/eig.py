"""Bisection eigensolver driven by the negative index ``ν(A - xI)``.

``ν(A - xI)`` counts eigenvalues strictly left of ``x``, so the difference of
two counts is the number of eigenvalues in a half-open interval. Brackets are
halved until they are narrower than ``2 τ ‖A‖₁``; the midpoint of each final
bracket is returned once per eigenvalue it holds.

All brackets at one depth are independent. When an ``executor`` is passed,
their shifts are evaluated with ``executor.map``; results are merged by
bracket position, so output never depends on scheduling.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import Executor
from dataclasses import MISSING, dataclass, field, fields, replace
from typing import Any

from .errors import MonotonicityWarning, NonFiniteError, RetryBudgetWarning, SingularMinorWarning
from .factor import InertiaReport, Variant, negative_index
from .sparse import CsrMatrix, csr_one_norm, csr_shift
from .symbolic import allocate_capacities, col_etree, r_row_counts

logger = logging.getLogger(__name__)

UNIT_ROUNDOFF = 2.0**-53

__all__ = [
    "UNIT_ROUNDOFF",
    "BisectionNode",
    "BisectionParams",
    "EigResult",
    "Histogram",
    "IntervalCount",
    "bisection_cost_estimate",
    "count_in_interval",
    "eig_all",
    "eig_by_ordinal",
    "eig_in_interval",
    "spectrum_histogram",
]


# =========================================================
# Parameters and results
# =========================================================


@dataclass(frozen=True)
class BisectionParams:
    """Knobs of the bisection driver.

    Parameters
    ----------
    tau : float
        Relative tolerance; brackets stop splitting at width ``2 tau ‖A‖₁``.
    variant : Variant
        Factorization used for every ``ν`` evaluation.
    max_singular_retries : int
        How many nudged shifts to try when a shift hits a zero leading minor.
    nudge : float
        Relative size of one nudge step (scaled by ``‖A‖₁``).
    """

    tau: float = 2.0**-52
    variant: Variant = Variant.ELEMENTARY
    max_singular_retries: int = 3
    nudge: float = 2.0**-40

    def __post_init__(self) -> None:
        """Validate ranges and normalize ``variant``."""
        object.__setattr__(self, "variant", Variant(self.variant))
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau!r}")
        if not 0.0 < self.nudge < 1.0:
            raise ValueError(f"nudge must lie in (0, 1), got {self.nudge!r}")
        if self.max_singular_retries < 0:
            raise ValueError("max_singular_retries must be nonnegative")

    def configure(self, **options: Any) -> BisectionParams:
        """Return a copy with ``options`` applied.

        Unknown keys raise ``ValueError``. Replacing a value that was already
        changed from its default emits a ``UserWarning``.
        """
        known = {f.name: f for f in fields(self)}
        unknown = sorted(set(options) - set(known))
        if unknown:
            raise ValueError(f"configure() got unknown option(s): {', '.join(unknown)}")
        for key, value in options.items():
            current = getattr(self, key)
            default = known[key].default
            if default is not MISSING and current != default and current != value:
                warnings.warn(
                    f"configure() overriding {key} (was {current!r}, now {value!r})",
                    UserWarning,
                    stacklevel=2,
                )
        return replace(self, **options)


@dataclass(frozen=True)
class BisectionNode:
    """One split: bracket ``[x0, x1)`` with counts ``nu0``/``nu1``, split at ``x``."""

    x0: float
    x1: float
    nu0: int
    nu1: int
    x: float
    mu: int


@dataclass
class EigResult:
    """Eigenvalues found by bisection plus bookkeeping.

    ``values`` is sorted; each value is the midpoint of a final bracket, repeated
    once per eigenvalue that bracket holds. ``unresolved_singular`` counts shifts
    that still hit a zero minor after the retry budget; their counts were used
    as computed.
    """

    values: list[float]
    inertia_evals: int = 0
    singular_retries: int = 0
    unresolved_singular: int = 0
    monotonicity_violations: int = 0
    singular_endpoints: tuple[bool, bool] = (False, False)
    nodes: list[BisectionNode] = field(default_factory=list, repr=False)
    brackets: list[tuple[float, float, int, int]] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        """Number of eigenvalues returned."""
        return len(self.values)


@dataclass(frozen=True)
class IntervalCount:
    """Eigenvalue count in ``[x0, x1)`` and the two endpoint indices."""

    count: int
    singular_minor: bool
    nu0: int = 0
    nu1: int = 0


@dataclass(frozen=True)
class Histogram:
    """Eigenvalue counts per bin ``[edges[k], edges[k+1])``."""

    edges: tuple[float, ...]
    counts: tuple[int, ...]
    singular_edges: tuple[int, ...] = ()

    @property
    def total(self) -> int:
        """Eigenvalues inside ``[edges[0], edges[-1])``."""
        return sum(self.counts)


# =========================================================
# Shift evaluation
# =========================================================


@dataclass(frozen=True)
class _Split:
    x: float
    nu: int
    singular: bool
    evals: int
    retries: int
    at_resolution: bool = False


class _ShiftedInertia:
    """``ν(A - xI)`` with the symbolic analysis shared by every shift."""

    def __init__(self, A: CsrMatrix, params: BisectionParams) -> None:
        self.A = A
        self.params = params
        self.norm = csr_one_norm(A)
        if not math.isfinite(self.norm):
            raise NonFiniteError("matrix 1-norm is not finite")
        # shifting only touches the diagonal, so one capacity vector serves all shifts
        self.capacities = allocate_capacities(A, r_row_counts(A, col_etree(A)))

    def report(self, x: float) -> InertiaReport:
        return negative_index(csr_shift(self.A, x), self.params.variant, self.capacities)

    def split_at(self, x: float, lo: float, hi: float) -> _Split:
        """Evaluate at ``x``; on a zero minor try ``x ± k·δ`` strictly inside ``(lo, hi)``.

        When ``δ`` is below the float spacing at ``x`` the candidates step by
        whole ulps instead. If no candidate fits inside the bracket at all, the
        result is marked ``at_resolution`` and the caller stops splitting.
        """
        rep = self.report(x)
        used, evals, retries = x, 1, 0
        budget = self.params.max_singular_retries
        at_resolution = False
        if rep.singular_minor and budget:
            delta = min(self.params.nudge * self.norm, (hi - lo) / (2 * (budget + 2)))
            attempt = misses = 0
            while rep.singular_minor and retries < budget:
                k, up = attempt // 2 + 1, attempt % 2 == 0
                attempt += 1
                target = hi if up else lo
                cand = x + k * delta if up else x - k * delta
                if cand == x:
                    for _ in range(k):
                        cand = math.nextafter(cand, target)
                if not lo < cand < hi:
                    misses += 1
                    if misses == 2:  # noqa: PLR2004
                        at_resolution = True
                        break
                    continue
                misses = 0
                retries += 1
                rep = self.report(cand)
                used = cand
                evals += 1
            logger.debug("nudged shift %r -> %r after %d retries", x, used, retries)
        return _Split(used, rep.nu, rep.singular_minor, evals, retries, at_resolution)


def _mapper(executor: Executor | None) -> Callable[..., Iterable[Any]]:
    return map if executor is None else executor.map


@dataclass
class _Node:
    x0: float
    x1: float
    nu0: int
    nu1: int


def _bisect(
    ev: _ShiftedInertia,
    root: _Node,
    tau: float,
    *,
    ordinals: tuple[int, int] | None = None,
    executor: Executor | None = None,
) -> EigResult:
    stop = 2.0 * tau * ev.norm
    result = EigResult(values=[])
    run = _mapper(executor)
    frontier = [root]
    finished: list[_Node] = []
    depth = 0

    def wanted(node: _Node) -> bool:
        if node.nu1 <= node.nu0:
            return False
        if ordinals is None:
            return True
        lo, hi = ordinals
        return node.nu0 + 1 <= hi and node.nu1 >= lo

    while frontier:
        splits: list[tuple[_Node, float]] = []
        for node in frontier:
            if not wanted(node):
                continue
            mid = node.x0 + 0.5 * (node.x1 - node.x0)
            if node.x1 - node.x0 <= stop or not node.x0 < mid < node.x1:
                finished.append(node)
            else:
                splits.append((node, mid))
        logger.debug("bisection depth %d: %d splits, %d final", depth, len(splits), len(finished))
        results = list(run(lambda item: ev.split_at(item[1], item[0].x0, item[0].x1), splits))

        frontier = []
        for (node, _), pr in zip(splits, results, strict=True):
            result.inertia_evals += pr.evals
            result.singular_retries += pr.retries
            if pr.at_resolution:
                # no float strictly inside the bracket avoids the zero minor
                finished.append(node)
                continue
            if pr.singular:
                result.unresolved_singular += 1
            mu = min(max(pr.nu, node.nu0), node.nu1)
            if mu != pr.nu:
                result.monotonicity_violations += 1
            result.nodes.append(BisectionNode(node.x0, node.x1, node.nu0, node.nu1, pr.x, mu))
            frontier.append(_Node(node.x0, pr.x, node.nu0, mu))
            frontier.append(_Node(pr.x, node.x1, mu, node.nu1))
        depth += 1

    finished.sort(key=lambda nd: nd.x0)
    for node in finished:
        x = node.x0 + 0.5 * (node.x1 - node.x0)
        lo, hi = node.nu0 + 1, node.nu1
        if ordinals is not None:
            lo, hi = max(lo, ordinals[0]), min(hi, ordinals[1])
        result.values.extend([x] * (hi - lo + 1))
        result.brackets.append((node.x0, node.x1, node.nu0, node.nu1))

    if result.unresolved_singular:
        warnings.warn(
            f"{result.unresolved_singular} shift(s) kept a zero leading minor after "
            f"{ev.params.max_singular_retries} nudges; their counts were used as computed",
            RetryBudgetWarning,
            stacklevel=3,
        )
    if result.monotonicity_violations:
        warnings.warn(
            f"{result.monotonicity_violations} inertia count(s) fell outside their bracket "
            "and were clamped",
            MonotonicityWarning,
            stacklevel=3,
        )
    return result


# =========================================================
# Public drivers
# =========================================================


def _full_bracket(ev: _ShiftedInertia) -> _Node:
    return _Node(-ev.norm, ev.norm, 0, ev.A.n)


def eig_all(
    A: CsrMatrix,
    params: BisectionParams | None = None,
    *,
    executor: Executor | None = None,
) -> EigResult:
    """All ``n`` eigenvalues, starting from the bracket ``[-‖A‖₁, ‖A‖₁)``.

    The root counts are fixed at 0 and ``n`` since ``|λ| ≤ ‖A‖₁``.

    Examples
    --------
    >>> [round(v, 12) for v in eig_all(CsrMatrix.from_dense([[2.0, 0.0], [0.0, -1.0]])).values]
    [-1.0, 2.0]
    """
    if A.n < 1:
        raise ValueError("eig_all needs n >= 1")
    params = params or BisectionParams()
    ev = _ShiftedInertia(A, params)
    return _bisect(ev, _full_bracket(ev), params.tau, executor=executor)


def eig_in_interval(
    A: CsrMatrix,
    x0: float,
    x1: float,
    params: BisectionParams | None = None,
    *,
    executor: Executor | None = None,
) -> EigResult:
    """Eigenvalues in ``[x0, x1)``.

    The endpoint counts are evaluated without nudging; a zero minor at an
    endpoint is reported in ``singular_endpoints`` and warned about.
    """
    if not x0 < x1:
        raise ValueError(f"need x0 < x1, got [{x0}, {x1})")
    params = params or BisectionParams()
    ev = _ShiftedInertia(A, params)
    left, right = _mapper(executor)(ev.report, [x0, x1])
    root = _Node(x0, x1, left.nu, max(right.nu, left.nu))
    result = _bisect(ev, root, params.tau, executor=executor)
    result.inertia_evals += 2
    result.singular_endpoints = (left.singular_minor, right.singular_minor)
    if right.nu < left.nu:
        result.monotonicity_violations += 1
    if left.singular_minor or right.singular_minor:
        warnings.warn(
            "zero leading minor at an interval endpoint; the count may be off",
            SingularMinorWarning,
            stacklevel=2,
        )
    return result


def eig_by_ordinal(
    A: CsrMatrix,
    lo: int,
    hi: int,
    params: BisectionParams | None = None,
    *,
    executor: Executor | None = None,
) -> EigResult:
    """Eigenvalues ``λ_lo ≤ ... ≤ λ_hi`` (1-based ordinals, ascending)."""
    if not 1 <= lo <= hi <= A.n:
        raise ValueError(f"ordinals must satisfy 1 <= lo <= hi <= {A.n}, got {lo}..{hi}")
    params = params or BisectionParams()
    ev = _ShiftedInertia(A, params)
    return _bisect(ev, _full_bracket(ev), params.tau, ordinals=(lo, hi), executor=executor)


def count_in_interval(
    A: CsrMatrix,
    x0: float,
    x1: float,
    variant: Variant | str = Variant.ELEMENTARY,
) -> IntervalCount:
    """``ν(A - x1 I) - ν(A - x0 I)``: eigenvalues in ``[x0, x1)``.

    Examples
    --------
    >>> count_in_interval(CsrMatrix.from_dense([[-1.0, 0.0], [0.0, 1.0]]), -2.0, 0.0).count
    1
    """
    if x0 > x1:
        raise ValueError(f"need x0 <= x1, got [{x0}, {x1})")
    if x0 == x1:
        return IntervalCount(0, False)
    ev = _ShiftedInertia(A, BisectionParams(variant=Variant(variant)))
    left, right = ev.report(x0), ev.report(x1)
    singular = left.singular_minor or right.singular_minor
    if singular:
        warnings.warn(
            "zero leading minor at an interval endpoint; the count may be off",
            SingularMinorWarning,
            stacklevel=2,
        )
    return IntervalCount(right.nu - left.nu, singular, left.nu, right.nu)


def spectrum_histogram(
    A: CsrMatrix,
    edges: Sequence[float],
    variant: Variant | str = Variant.ELEMENTARY,
    *,
    executor: Executor | None = None,
) -> Histogram:
    """Eigenvalue counts for consecutive bins, one ``ν`` evaluation per edge."""
    edges = tuple(float(e) for e in edges)
    if len(edges) < 2:  # noqa: PLR2004
        raise ValueError("need at least two bin edges")
    if any(b <= a for a, b in zip(edges, edges[1:], strict=False)):
        raise ValueError("bin edges must be strictly increasing")
    ev = _ShiftedInertia(A, BisectionParams(variant=Variant(variant)))
    reports = list(_mapper(executor)(ev.report, edges))
    counts = tuple(b.nu - a.nu for a, b in zip(reports, reports[1:], strict=False))
    singular = tuple(k for k, rep in enumerate(reports) if rep.singular_minor)
    if any(c < 0 for c in counts):
        warnings.warn("negative bin count; inertia was not monotone", MonotonicityWarning, stacklevel=2)
    if singular:
        warnings.warn(
            f"zero leading minor at {len(singular)} bin edge(s)", SingularMinorWarning, stacklevel=2
        )
    return Histogram(edges, counts, singular)


def bisection_cost_estimate(
    n: int, seconds_per_eval: float, unit_roundoff: float = UNIT_ROUNDOFF
) -> float:
    """Rough time for all eigenvalues: ``-log2(u) · n`` inertia evaluations."""
    return -math.log2(unit_roundoff) * n * seconds_per_eval
