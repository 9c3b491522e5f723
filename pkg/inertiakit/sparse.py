"""Sparse storage formats and accumulators used by the factorization.

``CsrMatrix`` is the immutable input format. ``EcsrMatrix`` is the mutable
working copy whose rows may grow into reserved slack. ``Ospa`` (one ordered
row) and ``Spa2`` (two unordered rows sharing one pattern) are the scratch
accumulators the two elimination variants run on.
"""

from __future__ import annotations

import heapq
import math
import operator
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CapacityError, NonFiniteError

_POOL_LIMIT = int(np.iinfo(np.int64).max)

__all__ = [
    "CsrMatrix",
    "EcsrMatrix",
    "Ospa",
    "Spa2",
    "csr_from_triplets",
    "csr_one_norm",
    "csr_shift",
    "ecsr_build",
    "ospa_load",
    "ospa_remove_head",
    "ospa_retrieve_head",
    "ospa_store",
    "ospa_subtract",
    "ospa_swap",
    "spa2_load_pair",
    "spa2_rotate",
    "spa2_scatter",
]


def _frozen(arr: Iterable | np.ndarray, dtype: type) -> np.ndarray:
    """Return a read-only array of ``dtype``, copying unless already frozen."""
    if isinstance(arr, np.ndarray) and arr.dtype == dtype and not arr.flags.writeable:
        return arr
    out = np.array(arr, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


# =========================================================
# CSR input
# =========================================================


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Immutable compressed-sparse-row matrix with both triangles stored.

    Column indices are 0-based and strictly increasing inside each row. The
    factorization additionally requires a structurally symmetric pattern with
    every diagonal position present (``csr_from_triplets`` guarantees both).
    """

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        """Freeze the arrays and check the CSR layout."""
        n = operator.index(self.n)
        if n < 0:
            raise ValueError("matrix dimension must be nonnegative")
        row_ptr = _frozen(self.row_ptr, np.int64)
        col_idx = _frozen(self.col_idx, np.int64)
        values = _frozen(self.values, np.float64)
        if row_ptr.shape != (n + 1,):
            raise ValueError(f"row_ptr must have length n+1={n + 1}, got {row_ptr.shape}")
        if col_idx.ndim != 1 or col_idx.shape != values.shape:
            raise ValueError("col_idx and values must be 1-D arrays of equal length")
        if row_ptr[0] != 0 or row_ptr[-1] != col_idx.size or np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must start at 0, be nondecreasing and end at nnz")
        if col_idx.size:
            if col_idx.min() < 0 or col_idx.max() >= n:
                raise ValueError("column index out of range")
            steps = np.diff(col_idx)
            inner = np.ones(steps.size, dtype=bool)
            starts = row_ptr[1:-1]
            starts = starts[(starts > 0) & (starts < col_idx.size)]
            inner[starts - 1] = False
            if np.any(steps[inner] <= 0):
                raise ValueError("column indices must strictly increase within each row")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)

    def __eq__(self, other: object) -> bool:
        """Exact equality of dimension, pattern and values."""
        if not isinstance(other, CsrMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        """Short summary; the arrays can be large."""
        return f"CsrMatrix(n={self.n}, nnz={self.nnz})"

    @property
    def nnz(self) -> int:
        """Number of stored entries (both triangles, explicit zeros included)."""
        return int(self.col_idx.size)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Column indices and values of row ``i``."""
        lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
        return self.col_idx[lo:hi], self.values[lo:hi]

    def row_nnz(self) -> np.ndarray:
        """Stored entries per row."""
        return np.diff(self.row_ptr)

    @cached_property
    def row_index(self) -> np.ndarray:
        """Row index of every stored entry (the expanded form of ``row_ptr``)."""
        out = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_ptr))
        out.flags.writeable = False
        return out

    @cached_property
    def diag_pos(self) -> np.ndarray:
        """Position of each diagonal entry inside ``values``.

        Raises
        ------
        ValueError
            If some row has no explicit diagonal entry.
        """
        hits = np.flatnonzero(self.row_index == self.col_idx)
        if hits.size != self.n:
            missing = sorted(set(range(self.n)) - set(self.row_index[hits].tolist()))
            raise ValueError(f"diagonal entries missing in rows {missing[:10]}")
        hits.flags.writeable = False
        return hits

    @cached_property
    def structurally_symmetric(self) -> bool:
        """True when the stored pattern equals its transpose."""
        keys = self.row_index * self.n + self.col_idx
        mirrored = np.sort(self.col_idx * self.n + self.row_index)
        return bool(np.array_equal(keys, mirrored))

    def diagonal(self) -> np.ndarray:
        """Diagonal values (requires an explicit diagonal)."""
        return self.values[self.diag_pos]

    def triplets(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(row, col, value)`` in row-major order."""
        yield from zip(
            self.row_index.tolist(), self.col_idx.tolist(), self.values.tolist(), strict=True
        )

    def to_dense(self) -> np.ndarray:
        """Dense copy (for oracles and small tests)."""
        out = np.zeros((self.n, self.n))
        out[self.row_index, self.col_idx] = self.values
        return out

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[float]]) -> CsrMatrix:
        """Keep the nonzeros of a dense square array plus the full diagonal."""
        arr = np.asarray(dense, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("expected a square 2-D array")
        mask = arr != 0
        np.fill_diagonal(mask, True)
        mask |= mask.T
        rows, cols = np.nonzero(mask)
        return csr_from_triplets(arr.shape[0], zip(rows, cols, arr[rows, cols], strict=True))


def csr_from_triplets(
    n: int,
    entries: Iterable[tuple[int, int, float]],
    *,
    mirror_values: bool = True,
) -> CsrMatrix:
    """Assemble a structurally symmetric CSR matrix from coordinate entries.

    Duplicates are summed, the pattern is united with its transpose, every
    diagonal position is inserted (value 0 when absent) and rows are sorted.
    A mirror position that is missing from the input receives the value of its
    partner; with ``mirror_values=False`` it is stored as an explicit zero.

    Raises
    ------
    ValueError
        An index is outside ``[0, n)``.
    NonFiniteError
        A value (or a sum of duplicates) is NaN or infinite.
    """
    n = operator.index(n)
    if n < 0:
        raise ValueError("matrix dimension must be nonnegative")
    acc: dict[tuple[int, int], float] = {}
    for r, c, v in entries:
        r, c = operator.index(r), operator.index(c)
        if not (0 <= r < n and 0 <= c < n):
            raise ValueError(f"entry ({r}, {c}) is outside a {n}x{n} matrix")
        x = float(v)
        if not math.isfinite(x):
            raise NonFiniteError(f"non-finite value {x!r} at ({r}, {c})")
        acc[r, c] = acc.get((r, c), 0.0) + x
    for (r, c), x in list(acc.items()):
        if (c, r) not in acc:
            acc[c, r] = x if mirror_values else 0.0
    for i in range(n):
        acc.setdefault((i, i), 0.0)

    keys = sorted(acc)
    values = np.fromiter((acc[k] for k in keys), dtype=np.float64, count=len(keys))
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("summing duplicate entries overflowed")
    rows = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
    cols = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=row_ptr[1:])
    return CsrMatrix(n, row_ptr, cols, values)


def csr_one_norm(A: CsrMatrix) -> float:
    """Largest absolute column sum (equal to the largest row sum by symmetry)."""
    if A.nnz == 0:
        return 0.0
    sums = np.zeros(A.n)
    np.add.at(sums, A.col_idx, np.abs(A.values))
    return float(sums.max())


def csr_shift(A: CsrMatrix, x: float) -> CsrMatrix:
    """Return ``A - x I``; the pattern is shared, only diagonal values change."""
    if x == 0:
        return A
    values = A.values.copy()
    values[A.diag_pos] -= x
    return CsrMatrix(A.n, A.row_ptr, A.col_idx, values)


# =========================================================
# ECSR working storage
# =========================================================


@dataclass
class EcsrMatrix:
    """Expandable CSR: row ``i`` owns ``[head[i], head[i+1])`` and fills ``[head[i], tail[i])``.

    Plain Python lists are used for the pools; the factorization touches them
    one scalar at a time.
    """

    n: int
    val: list[float]
    col: list[int]
    head: list[int]
    tail: list[int]

    def capacity(self, i: int) -> int:
        """Slots reserved for row ``i``."""
        return self.head[i + 1] - self.head[i]

    def row_nnz(self, i: int) -> int:
        """Occupied slots of row ``i``."""
        return self.tail[i] - self.head[i]

    def row_cols(self, i: int) -> list[int]:
        """Column indices of row ``i`` in increasing order."""
        return self.col[self.head[i] : self.tail[i]]

    def row_vals(self, i: int) -> list[float]:
        """Values of row ``i`` aligned with ``row_cols``."""
        return self.val[self.head[i] : self.tail[i]]

    def row_items(self, i: int) -> list[tuple[int, float]]:
        """``(col, value)`` pairs of row ``i``."""
        return list(zip(self.row_cols(i), self.row_vals(i), strict=True))

    def leading(self, i: int) -> tuple[int, float] | None:
        """Leftmost entry of row ``i`` or ``None`` when the row is empty."""
        h = self.head[i]
        if h == self.tail[i]:
            return None
        return self.col[h], self.val[h]

    def diagonal(self, j: int) -> float:
        """Value at ``(j, j)`` when it leads row ``j``; 0 otherwise."""
        h = self.head[j]
        if h < self.tail[j] and self.col[h] == j:
            return self.val[h]
        return 0.0

    def write_row(self, i: int, cols: Sequence[int], vals: Sequence[float]) -> None:
        """Overwrite row ``i`` with sorted ``cols``/``vals``.

        Raises
        ------
        CapacityError
            The row does not fit into its reserved slots.
        """
        k = len(cols)
        cap = self.head[i + 1] - self.head[i]
        if k > cap:
            raise CapacityError(i, k, cap)
        h = self.head[i]
        self.col[h : h + k] = cols
        self.val[h : h + k] = vals
        self.tail[i] = h + k

    def nnz(self) -> int:
        """Occupied slots over all rows."""
        return sum(t - h for h, t in zip(self.head, self.tail, strict=False))

    def max_row_nnz(self) -> int:
        """Longest occupied row."""
        return max((t - h for h, t in zip(self.head, self.tail, strict=False)), default=0)

    def pattern(self) -> list[tuple[int, ...]]:
        """Occupied column indices of every row."""
        return [tuple(self.row_cols(i)) for i in range(self.n)]

    def audit(self) -> None:
        """Raise ``AssertionError`` if the head/tail layout is inconsistent."""
        assert len(self.head) == self.n + 1 and len(self.tail) == self.n
        assert self.head[0] == 0 and self.head[self.n] == len(self.val) == len(self.col)
        for i in range(self.n):
            assert self.head[i] <= self.tail[i] <= self.head[i + 1], f"row {i} overflows"
            cols = self.row_cols(i)
            assert all(a < b for a, b in zip(cols, cols[1:], strict=False)), f"row {i} unsorted"


def ecsr_build(A: CsrMatrix, row_capacity: Sequence[int]) -> EcsrMatrix:
    """Copy ``A`` into ECSR storage with at least ``row_capacity[i]`` slots per row.

    Capacities below a row's length in ``A`` are raised to that length.

    Raises
    ------
    OverflowError
        The total pool size does not fit a 64-bit index.
    """
    if len(row_capacity) != A.n:
        raise ValueError(f"expected {A.n} capacities, got {len(row_capacity)}")
    lengths = A.row_nnz().tolist()
    head = [0]
    total = 0
    for i, (cap, k) in enumerate(zip(row_capacity, lengths, strict=True)):
        cap = operator.index(cap)
        if cap < 0:
            raise ValueError(f"negative capacity for row {i}")
        total += max(cap, k)
        if total > _POOL_LIMIT:
            raise OverflowError("ECSR pool size exceeds the 64-bit index range")
        head.append(total)

    val = [0.0] * total
    col = [-1] * total
    tail = []
    src_ptr = A.row_ptr.tolist()
    src_col = A.col_idx.tolist()
    src_val = A.values.tolist()
    for i in range(A.n):
        lo, hi = src_ptr[i], src_ptr[i + 1]
        h = head[i]
        col[h : h + hi - lo] = src_col[lo:hi]
        val[h : h + hi - lo] = src_val[lo:hi]
        tail.append(h + hi - lo)
    return EcsrMatrix(A.n, val, col, head, tail)


# =========================================================
# Accumulators
# =========================================================


@dataclass
class Ospa:
    """Ordered sparse accumulator: dense scratch plus a min-heap of occupied columns.

    Unoccupied slots of ``values`` always hold ``0.0``.
    """

    n: int
    values: list[float] = field(init=False, repr=False)
    occupied: list[bool] = field(init=False, repr=False)
    heap: list[int] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        """Allocate the dense scratch arrays."""
        self.values = [0.0] * self.n
        self.occupied = [False] * self.n

    @property
    def count(self) -> int:
        """Number of occupied columns."""
        return len(self.heap)

    def __len__(self) -> int:
        """Same as ``count``."""
        return len(self.heap)

    def _fill(self, cols: Sequence[int], vals: Sequence[float]) -> None:
        values, occupied = self.values, self.occupied
        for c, v in zip(cols, vals, strict=True):
            values[c] = v
            occupied[c] = True
        self.heap = list(cols)
        heapq.heapify(self.heap)

    def clear(self) -> None:
        """Empty the accumulator, touching only occupied slots."""
        values, occupied = self.values, self.occupied
        for c in self.heap:
            values[c] = 0.0
            occupied[c] = False
        self.heap = []

    def load(self, M: EcsrMatrix, i: int) -> None:
        """Load row ``i`` of ``M`` into this (empty) accumulator."""
        if self.heap:
            raise ValueError("OSPA must be empty before load")
        self._fill(M.row_cols(i), M.row_vals(i))

    def retrieve_head(self) -> tuple[int, float] | None:
        """Leftmost ``(col, value)`` without removing it; ``None`` when empty."""
        if not self.heap:
            return None
        c = self.heap[0]
        return c, self.values[c]

    def remove_head(self) -> None:
        """Drop the leftmost occupied column."""
        if not self.heap:
            raise IndexError("remove_head on an empty OSPA")
        c = heapq.heappop(self.heap)
        self.values[c] = 0.0
        self.occupied[c] = False

    def put(self, c: int, value: float) -> None:
        """Set column ``c`` to ``value``, occupying it if needed."""
        if not self.occupied[c]:
            self.occupied[c] = True
            heapq.heappush(self.heap, c)
        self.values[c] = value

    def subtract(self, M: EcsrMatrix, j: int, factor: float) -> int:
        """Accumulate ``-factor * M[j, :]`` and return the number of columns touched.

        Columns that cancel to exactly zero stay occupied. A zero factor is a
        no-op and merges no pattern.
        """
        if factor == 0.0:
            return 0
        values, occupied, heap = self.values, self.occupied, self.heap
        cols, vals = M.col, M.val
        h, t = M.head[j], M.tail[j]
        for p in range(h, t):
            c = cols[p]
            values[c] -= factor * vals[p]
            if not occupied[c]:
                occupied[c] = True
                heapq.heappush(heap, c)
        return t - h

    def items(self) -> list[tuple[int, float]]:
        """Occupied ``(col, value)`` pairs in increasing column order."""
        return [(c, self.values[c]) for c in sorted(self.heap)]

    def swap(self, M: EcsrMatrix, j: int) -> None:
        """Exchange the accumulator's contents with row ``j`` of ``M``.

        Raises
        ------
        CapacityError
            Row ``j`` cannot hold the accumulator's entries.
        """
        old_cols = M.row_cols(j)
        old_vals = M.row_vals(j)
        cols = sorted(self.heap)
        M.write_row(j, cols, [self.values[c] for c in cols])
        self.clear()
        self._fill(old_cols, old_vals)

    def store(self, M: EcsrMatrix, i: int) -> None:
        """Write the accumulator into row ``i`` of ``M`` and empty it."""
        cols = sorted(self.heap)
        M.write_row(i, cols, [self.values[c] for c in cols])
        self.clear()

    def audit(self) -> bool:
        """True when heap, occupancy flags and zeroed slots agree."""
        in_heap = set(self.heap)
        if len(in_heap) != len(self.heap):
            return False
        for c in range(self.n):
            if self.occupied[c] != (c in in_heap):
                return False
            if not self.occupied[c] and self.values[c] != 0.0:
                return False
        heap = self.heap
        return all(heap[(k - 1) // 2] < heap[k] for k in range(1, len(heap)))


@dataclass
class Spa2:
    """Two-row sparse accumulator with a shared, unordered column list."""

    n: int
    values: list[list[float]] = field(init=False, repr=False)
    occupied: list[bool] = field(init=False, repr=False)
    cols: list[int] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        """Allocate the 2-by-n scratch."""
        self.values = [[0.0] * self.n, [0.0] * self.n]
        self.occupied = [False] * self.n

    def _add(self, slot: int, cols: Iterable[int], vals: Iterable[float]) -> None:
        target, occupied = self.values[slot], self.occupied
        for c, v in zip(cols, vals, strict=True):
            target[c] = v
            if not occupied[c]:
                occupied[c] = True
                self.cols.append(c)

    def load_pair(self, M: EcsrMatrix, j: int, k: int) -> None:
        """Load rows ``j`` (slot 0) and ``k`` (slot 1) of ``M``."""
        if self.cols:
            raise ValueError("SPA must be empty before load")
        self._add(0, M.row_cols(j), M.row_vals(j))
        self._add(1, M.row_cols(k), M.row_vals(k))

    def load_with(self, M: EcsrMatrix, j: int, s: Ospa) -> None:
        """Load row ``j`` of ``M`` (slot 0) and the working row held in ``s`` (slot 1)."""
        if self.cols:
            raise ValueError("SPA must be empty before load")
        self._add(0, M.row_cols(j), M.row_vals(j))
        self._add(1, s.heap, [s.values[c] for c in s.heap])

    def rotate(self, c: float, s: float) -> int:
        """Apply ``[[c, s], [-s, c]]`` to every occupied column; returns columns touched."""
        top, bottom = self.values
        for col in self.cols:
            a = top[col]
            b = bottom[col]
            top[col] = c * a + s * b
            bottom[col] = c * b - s * a
        return len(self.cols)

    def _split(self, j: int) -> tuple[list[int], list[float], list[int], list[float]]:
        top, bottom = self.values
        order = sorted(self.cols)
        first = [c for c in order if c >= j]
        second = [c for c in order if c > j]
        return first, [top[c] for c in first], second, [bottom[c] for c in second]

    def scatter(self, M: EcsrMatrix, j: int, k: int) -> None:
        """Write slot 0 to row ``j`` and slot 1 (column ``j`` annihilated) to row ``k``."""
        first, first_vals, second, second_vals = self._split(j)
        M.write_row(j, first, first_vals)
        M.write_row(k, second, second_vals)
        self.clear()

    def scatter_into(self, M: EcsrMatrix, j: int, s: Ospa) -> None:
        """Write slot 0 to row ``j`` and slot 1 back into ``s``, dropping column ``j``."""
        first, first_vals, second, second_vals = self._split(j)
        M.write_row(j, first, first_vals)
        for c, v in zip(second, second_vals, strict=True):
            s.put(c, v)
        head = s.retrieve_head()
        if head is not None and head[0] == j:
            s.remove_head()
        self.clear()

    def clear(self) -> None:
        """Reset the touched slots."""
        top, bottom = self.values
        for c in self.cols:
            top[c] = 0.0
            bottom[c] = 0.0
            self.occupied[c] = False
        self.cols = []

    def audit(self) -> bool:
        """True when ``cols`` and ``occupied`` describe the same set."""
        seen = set(self.cols)
        return len(seen) == len(self.cols) and all(
            self.occupied[c] == (c in seen) for c in range(self.n)
        )


# ---- free-function forms -------------------------------------------------


def ospa_load(s: Ospa, M: EcsrMatrix, i: int) -> None:
    """Load row ``i`` of ``M`` into the empty accumulator ``s``."""
    s.load(M, i)


def ospa_retrieve_head(s: Ospa) -> tuple[int, float] | None:
    """Leftmost entry of ``s`` or ``None``."""
    return s.retrieve_head()


def ospa_remove_head(s: Ospa) -> None:
    """Remove the leftmost entry of ``s``."""
    s.remove_head()


def ospa_subtract(s: Ospa, M: EcsrMatrix, j: int, factor: float) -> int:
    """``s -= factor * M[j, :]``."""
    return s.subtract(M, j, factor)


def ospa_swap(s: Ospa, M: EcsrMatrix, j: int) -> None:
    """Exchange ``s`` with row ``j`` of ``M``."""
    s.swap(M, j)


def ospa_store(s: Ospa, M: EcsrMatrix, i: int) -> None:
    """Store ``s`` into row ``i`` of ``M`` and empty it."""
    s.store(M, i)


def spa2_load_pair(spa: Spa2, M: EcsrMatrix, j: int, k: int) -> None:
    """Load rows ``j`` and ``k`` into the two-row accumulator."""
    spa.load_pair(M, j, k)


def spa2_rotate(spa: Spa2, c: float, s: float) -> int:
    """Rotate the two accumulated rows."""
    return spa.rotate(c, s)


def spa2_scatter(spa: Spa2, M: EcsrMatrix, j: int, k: int) -> None:
    """Scatter the rotated rows back to ``M`` and clear the accumulator."""
    spa.scatter(M, j, k)
