"""Matrix Market and permutation file handling.

Only what the factorization can use is accepted: square coordinate files
with real, integer or pattern values and general or symmetric storage.
Indices are 1-based on disk and 0-based everywhere else.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputFormatError, NotSymmetricError, PermutationError
from .sparse import CsrMatrix, csr_from_triplets

logger = logging.getLogger(__name__)

BANNER = "%%MatrixMarket"
_FIELDS = {"real", "integer", "pattern"}
_SYMMETRIES = {"general", "symmetric"}

__all__ = [
    "Permutation",
    "apply_ordering",
    "read_matrix_market",
    "read_permutation",
    "write_matrix_market",
]


def _data_lines(lines: Sequence[str], start: int) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, tokens)`` for non-comment, non-blank lines."""
    for k in range(start, len(lines)):
        text = lines[k].strip()
        if not text or text.startswith("%"):
            continue
        yield k + 1, text.split()


def _parse_header(first: str, path: Path) -> tuple[str, str]:
    tokens = first.split()
    if not tokens or tokens[0].lower() != BANNER.lower():
        raise InputFormatError(f"missing {BANNER} banner", path, 1)
    if len(tokens) != 5:  # noqa: PLR2004
        raise InputFormatError("banner must read '%%MatrixMarket matrix <format> <field> <symmetry>'", path, 1)
    obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
    if obj != "matrix":
        raise InputFormatError(f"unsupported object {obj!r}", path, 1)
    if fmt != "coordinate":
        raise InputFormatError(f"unsupported format {fmt!r}; only coordinate is read", path, 1)
    if fld not in _FIELDS:
        raise InputFormatError(f"unsupported field {fld!r}", path, 1)
    if sym not in _SYMMETRIES:
        raise InputFormatError(f"unsupported symmetry {sym!r}", path, 1)
    return fld, sym


def _parse_int(token: str, what: str, path: Path, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputFormatError(f"{what} {token!r} is not an integer", path, line) from None


def read_matrix_market(path: str | Path) -> CsrMatrix:
    """Read a square, symmetric Matrix Market coordinate file.

    Symmetric files may store either triangle, but not both positions of an
    off-diagonal pair; each off-diagonal entry is mirrored. General files must be numerically symmetric after duplicates
    are summed. Pattern files get value 1.0.

    Raises
    ------
    InputFormatError
        Malformed or unsupported content (with the offending line number).
    NotSymmetricError
        A general file whose values are not exactly symmetric.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except UnicodeDecodeError as exc:
        raise InputFormatError(f"not a text file ({exc.reason})", path) from None
    if not lines:
        raise InputFormatError("empty file", path, 1)
    fld, sym = _parse_header(lines[0], path)

    body = _data_lines(lines, 1)
    try:
        line_no, size = next(body)
    except StopIteration:
        raise InputFormatError("missing size line", path, len(lines)) from None
    if len(size) != 3:  # noqa: PLR2004
        raise InputFormatError("size line must hold 'rows cols entries'", path, line_no)
    rows, cols, count = (_parse_int(t, "size", path, line_no) for t in size)
    if rows != cols:
        raise InputFormatError(f"matrix must be square, got {rows}x{cols}", path, line_no)
    if rows < 0 or count < 0:
        raise InputFormatError("negative size", path, line_no)
    n = rows

    width = 2 if fld == "pattern" else 3
    acc: dict[tuple[int, int], float] = {}
    stored_as: dict[tuple[int, int], tuple[int, int]] = {}
    seen = 0
    for line_no, tokens in body:
        if seen == count:
            raise InputFormatError(f"more than the declared {count} entries", path, line_no)
        if len(tokens) != width:
            raise InputFormatError(f"expected {width} fields, got {len(tokens)}", path, line_no)
        i = _parse_int(tokens[0], "row index", path, line_no)
        j = _parse_int(tokens[1], "column index", path, line_no)
        if not (1 <= i <= n and 1 <= j <= n):
            raise InputFormatError(f"index ({i}, {j}) outside 1..{n}", path, line_no)
        if fld == "pattern":
            v = 1.0
        elif fld == "integer":
            v = float(_parse_int(tokens[2], "value", path, line_no))
        else:
            try:
                v = float(tokens[2])
            except ValueError:
                raise InputFormatError(f"value {tokens[2]!r} is not a number", path, line_no) from None
        if not math.isfinite(v):
            raise InputFormatError(f"non-finite value {tokens[2]!r}", path, line_no)
        key = (max(i, j) - 1, min(i, j) - 1) if sym == "symmetric" else (i - 1, j - 1)
        if sym == "symmetric" and stored_as.setdefault(key, (i, j)) != (i, j):
            a, b = stored_as[key]
            raise InputFormatError(
                f"symmetric file lists both ({a}, {b}) and ({i}, {j})", path, line_no
            )
        acc[key] = acc.get(key, 0.0) + v
        seen += 1
    if seen != count:
        raise InputFormatError(f"expected {count} entries, found {seen}", path, len(lines))

    if sym == "symmetric":
        entries = list(acc.items())
        entries += [((c, r), v) for (r, c), v in acc.items() if r != c]
    else:
        for (r, c), v in acc.items():
            if acc.get((c, r), 0.0) != v:
                raise NotSymmetricError(
                    f"not symmetric: A({r + 1},{c + 1}) = {v!r} but "
                    f"A({c + 1},{r + 1}) = {acc.get((c, r), 0.0)!r}",
                    path,
                )
        entries = list(acc.items())
    # both triangles are present now, so no value is ever copied by mirroring
    A = csr_from_triplets(n, ((r, c, v) for (r, c), v in entries), mirror_values=False)
    logger.debug("read %s: n=%d nnz=%d (%s, %s)", path, A.n, A.nnz, fld, sym)
    return A


def write_matrix_market(A: CsrMatrix, path: str | Path, *, comment: str | None = None) -> Path:
    """Write the lower triangle of ``A`` as a real symmetric coordinate file.

    Values use ``repr`` so reading the file back reproduces ``A`` exactly.
    """
    path = Path(path)
    lower = [(r, c, v) for r, c, v in A.triplets() if r >= c]
    out = [f"{BANNER} matrix coordinate real symmetric"]
    if comment:
        out += [f"% {line}" for line in comment.splitlines()]
    out.append(f"{A.n} {A.n} {len(lower)}")
    out += [f"{r + 1} {c + 1} {v!r}" for r, c, v in lower]
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


# =========================================================
# Permutations
# =========================================================


@dataclass(frozen=True)
class Permutation:
    """Symmetric reordering: row/column ``i`` of ``PAPᵀ`` is row/column ``p[i]`` of ``A``."""

    p: tuple[int, ...]

    def __post_init__(self) -> None:
        """Normalize to a tuple of ints and check it is a bijection."""
        p = tuple(int(v) for v in self.p)
        n = len(p)
        bad = [v for v in p if not 0 <= v < n]
        if bad:
            raise PermutationError(f"entries out of range 0..{n - 1}: {bad[:5]}")
        if len(set(p)) != n:
            dupes = sorted({v for v in p if p.count(v) > 1})
            raise PermutationError(f"duplicate entries: {dupes[:5]}")
        object.__setattr__(self, "p", p)

    def __len__(self) -> int:
        """Dimension."""
        return len(self.p)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        """``p = (0, 1, ..., n-1)``."""
        return cls(tuple(range(n)))

    def inverse(self) -> Permutation:
        """``q`` with ``q[p[i]] = i``."""
        q = [0] * len(self.p)
        for i, v in enumerate(self.p):
            q[v] = i
        return Permutation(tuple(q))


def read_permutation(path: str | Path, n: int) -> Permutation:
    """Read a 0-based permutation, one integer per line.

    Raises
    ------
    InputFormatError
        A line does not hold a single integer, or the file is not UTF-8 text.
    PermutationError
        Wrong length, an index out of range, or a duplicate.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except UnicodeDecodeError as exc:
        raise InputFormatError(f"not a text file ({exc.reason})", path) from None
    values: list[int] = []
    for k, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        values.append(_parse_int(text, "permutation entry", path, k))
    if len(values) != n:
        raise PermutationError(f"{path}: expected {n} entries, found {len(values)}")
    return Permutation(tuple(values))


def apply_ordering(A: CsrMatrix, p: Permutation | Sequence[int]) -> CsrMatrix:
    """Return ``PAPᵀ``, i.e. ``B[i, j] = A[p[i], p[j]]``, with rows re-sorted."""
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    if len(p) != A.n:
        raise PermutationError(f"permutation has length {len(p)}, matrix has n={A.n}")
    perm = np.asarray(p.p, dtype=np.int64)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(A.n, dtype=np.int64)
    rows = inv[A.row_index]
    cols = inv[A.col_idx]
    order = np.lexsort((cols, rows))
    row_ptr = np.zeros(A.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=A.n), out=row_ptr[1:])
    return CsrMatrix(A.n, row_ptr, cols[order], A.values[order])
