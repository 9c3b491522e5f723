"""Symbolic analysis: column elimination tree and R-factor row counts.

The row counts of R in a QR factorization of ``A`` are the column counts of
the Cholesky factor of ``AᵀA``. They are obtained here without forming
``AᵀA``, by the skeleton-matrix / least-common-ancestor method over a
postordered column elimination tree. Each routine follows the classic
workspace layout of the concise sparse toolkits; ``-1`` marks "none".
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from .sparse import CsrMatrix

logger = logging.getLogger(__name__)

__all__ = [
    "ColEtree",
    "RowCounts",
    "allocate_capacities",
    "col_etree",
    "postorder",
    "predict_capacities",
    "r_row_counts",
    "symbolic_qr_counts",
    "symbolic_qr_pattern",
]


@dataclass(frozen=True)
class ColEtree:
    """Column elimination tree of ``AᵀA``; ``parent[i] == -1`` marks a root."""

    parent: tuple[int, ...]

    @property
    def n(self) -> int:
        """Number of nodes."""
        return len(self.parent)

    def roots(self) -> list[int]:
        """Nodes without a parent, in increasing order."""
        return [i for i, p in enumerate(self.parent) if p == -1]

    def path_to_root(self, i: int) -> list[int]:
        """``i`` followed by its ancestors."""
        out = [i]
        while self.parent[out[-1]] != -1:
            out.append(self.parent[out[-1]])
        return out


@dataclass(frozen=True)
class RowCounts:
    """Predicted number of structural entries in each row of R."""

    counts: tuple[int, ...]
    safe: bool = False

    def __len__(self) -> int:
        """Number of rows."""
        return len(self.counts)

    def __getitem__(self, i: int) -> int:
        """Count of row ``i``."""
        return self.counts[i]

    @property
    def total(self) -> int:
        """Predicted nnz of R."""
        return sum(self.counts)


def _rows(A: CsrMatrix) -> tuple[list[int], list[int]]:
    return A.row_ptr.tolist(), A.col_idx.tolist()


def col_etree(A: CsrMatrix) -> ColEtree:
    """Elimination tree of ``AᵀA`` computed from the rows of ``A``.

    Column ``k`` of ``A`` is read as row ``k`` (the pattern is symmetric), and
    each row of ``A`` links the columns it touches through ``prev``.
    """
    n = A.n
    ptr, cols = _rows(A)
    parent = [-1] * n
    ancestor = [-1] * n
    prev = [-1] * n
    for k in range(n):
        for p in range(ptr[k], ptr[k + 1]):
            r = cols[p]
            i = prev[r]
            while i != -1 and i < k:
                inext = ancestor[i]
                ancestor[i] = k
                if inext == -1:
                    parent[i] = k
                i = inext
            prev[r] = k
    return ColEtree(tuple(parent))


def postorder(tree: ColEtree) -> list[int]:
    """Depth-first postorder of the forest; ``post[k]`` is the k-th node visited."""
    n = tree.n
    parent = tree.parent
    head = [-1] * n
    nxt = [-1] * n
    for j in range(n - 1, -1, -1):
        if parent[j] != -1:
            nxt[j] = head[parent[j]]
            head[parent[j]] = j
    post: list[int] = []
    for root in range(n):
        if parent[root] != -1:
            continue
        stack = [root]
        while stack:
            p = stack[-1]
            child = head[p]
            if child == -1:
                stack.pop()
                post.append(p)
            else:
                head[p] = nxt[child]
                stack.append(child)
    return post


def _leaf(
    i: int,
    j: int,
    first: list[int],
    maxfirst: list[int],
    prevleaf: list[int],
    ancestor: list[int],
) -> tuple[int, int]:
    """Classify ``j`` as a leaf of the i-th row subtree and return ``(q, jleaf)``.

    ``jleaf`` is 0 (not a leaf), 1 (first leaf, ``q = i``) or 2 (subsequent
    leaf, ``q`` is the least common ancestor of ``j`` and the previous leaf).
    """
    if i <= j or first[j] <= maxfirst[i]:
        return -1, 0
    maxfirst[i] = first[j]
    jprev = prevleaf[i]
    prevleaf[i] = j
    if jprev == -1:
        return i, 1
    q = jprev
    while q != ancestor[q]:
        q = ancestor[q]
    s = jprev
    while s != q:
        sparent = ancestor[s]
        ancestor[s] = q
        s = sparent
    return q, 2


def _tight_counts(A: CsrMatrix, tree: ColEtree) -> list[int]:
    n = A.n
    parent = tree.parent
    post = postorder(tree)
    ptr, cols = _rows(A)

    delta = [0] * n
    first = [-1] * n
    maxfirst = [-1] * n
    prevleaf = [-1] * n
    for k in range(n):
        j = post[k]
        delta[j] = 1 if first[j] == -1 else 0
        while j != -1 and first[j] == -1:
            first[j] = k
            j = parent[j]

    # bucket each row of A under the earliest postordered column it touches
    inv_post = [0] * n
    for k, j in enumerate(post):
        inv_post[j] = k
    head = [-1] * (n + 1)
    nxt = [-1] * n
    for r in range(n):
        k = min((inv_post[cols[p]] for p in range(ptr[r], ptr[r + 1])), default=n)
        nxt[r] = head[k]
        head[k] = r

    ancestor = list(range(n))
    for k in range(n):
        j = post[k]
        if parent[j] != -1:
            delta[parent[j]] -= 1
        r = head[k]
        while r != -1:
            for p in range(ptr[r], ptr[r + 1]):
                q, jleaf = _leaf(cols[p], j, first, maxfirst, prevleaf, ancestor)
                if jleaf >= 1:
                    delta[j] += 1
                if jleaf == 2:
                    delta[q] -= 1
            r = nxt[r]
        if parent[j] != -1:
            ancestor[j] = parent[j]

    counts = delta
    for j in range(n):
        if parent[j] != -1:
            counts[parent[j]] += counts[j]
    return counts


def r_row_counts(A: CsrMatrix, tree: ColEtree | None = None, *, safe: bool = False) -> RowCounts:
    """Predicted nnz of each row of R for the no-cancellation QR of ``A``.

    Parameters
    ----------
    A : CsrMatrix
        Structurally symmetric input.
    tree : ColEtree, optional
        ``col_etree(A)``; computed when omitted.
    safe : bool
        Return the length of the elimination-tree path from ``i`` to its root
        instead of the tight count. Row ``i`` of R only holds columns on that
        path, so this is an upper bound that skips the skeleton pass.
    """
    if tree is None:
        tree = col_etree(A)
    if tree.n != A.n:
        raise ValueError(f"elimination tree has {tree.n} nodes, matrix has {A.n} rows")
    if safe:
        depth = [0] * A.n
        for i in range(A.n - 1, -1, -1):
            p = tree.parent[i]
            depth[i] = 1 if p == -1 else depth[p] + 1
        counts = depth
    else:
        counts = _tight_counts(A, tree)
    logger.debug("R row counts: n=%d total=%d safe=%s", A.n, sum(counts), safe)
    return RowCounts(tuple(counts), safe=safe)


def allocate_capacities(A: CsrMatrix, counts: RowCounts | Sequence[int]) -> list[int]:
    """Per-row ECSR capacity ``max(counts[i], nnz(A row i))``."""
    if len(counts) != A.n:
        raise ValueError(f"expected {A.n} row counts, got {len(counts)}")
    lengths = A.row_nnz().tolist()
    return [max(int(c), k) for c, k in zip(counts, lengths, strict=True)]


def predict_capacities(A: CsrMatrix, *, safe: bool = False) -> list[int]:
    """Elimination tree, row counts and capacities in one call."""
    return allocate_capacities(A, r_row_counts(A, col_etree(A), safe=safe))


# ---- brute-force oracle ---------------------------------------------------


def symbolic_qr_pattern(A: CsrMatrix) -> list[frozenset[int]]:
    """Row patterns of R from a structural row-by-row Givens sweep.

    Every rotation replaces both rows with the union of their patterns and
    then drops the annihilated column from the lower row. Quadratic; meant
    as a reference for ``r_row_counts``.
    """
    n = A.n
    ptr, cols = _rows(A)
    rows: list[set[int]] = []
    for i in range(n):
        work = set(cols[ptr[i] : ptr[i + 1]])
        while work and (j := min(work)) < i:
            merged = rows[j] | work
            rows[j] = merged
            work = merged - {j}
        rows.append(work)
    return [frozenset(r) for r in rows]


def symbolic_qr_counts(A: CsrMatrix) -> RowCounts:
    """Row counts of ``symbolic_qr_pattern``."""
    return RowCounts(tuple(len(r) for r in symbolic_qr_pattern(A)))
