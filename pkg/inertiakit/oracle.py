"""Dense reference implementations and test-matrix generators.

Nothing here is tuned for speed. The dense routines exist so the sparse
factorization has something independent to agree with: a dense pairwise
pivoting sweep, a cyclic Jacobi eigensolver, and exact integer determinants.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .factor import Variant, negative_index
from .sparse import CsrMatrix, csr_from_triplets

logger = logging.getLogger(__name__)

_EXACT_INT_LIMIT = 2**53

__all__ = [
    "DenseInertia",
    "DenseSym",
    "InstabilityReport",
    "LatmsSpec",
    "dense_negative_index",
    "exact_det_signs",
    "grid_laplacian",
    "instability_example",
    "instability_report",
    "jacobi_eigenvalues",
    "latms_eigenvalues",
    "latms_generate",
    "latms_singular_values",
    "negative_count",
    "random_dense_symmetric",
    "random_integer_symmetric",
    "random_orthogonal",
    "random_sparse_symmetric",
    "tridiagonal",
    "tridiagonal_eigenvalues",
]


@dataclass(frozen=True, eq=False)
class DenseSym:
    """Dense symmetric matrix; symmetry is exact at construction."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        """Copy, freeze and check symmetry."""
        a = np.array(self.entries, dtype=np.float64, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:  # noqa: PLR2004
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not exactly symmetric")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        """Dimension."""
        return int(self.entries.shape[0])

    def to_csr(self) -> CsrMatrix:
        """Sparse copy keeping nonzeros and the full diagonal."""
        return CsrMatrix.from_dense(self.entries)

    @classmethod
    def from_csr(cls, A: CsrMatrix) -> DenseSym:
        """Dense copy of a sparse matrix."""
        return cls(A.to_dense())


# =========================================================
# Dense pairwise-pivoting sweep
# =========================================================


@dataclass(frozen=True)
class DenseInertia:
    """Outcome of ``dense_negative_index``."""

    nu: int
    singular_minor: bool
    interchanges: int


def dense_negative_index(A: DenseSym) -> DenseInertia:
    """Negative index by the dense elementary-transformation sweep.

    Follows the sparse elementary variant operation for operation: zero
    entries are skipped, the swap test is strict, ``sign(0)`` is positive and
    the eliminated entry is set to exactly zero.
    """
    a = np.array(A.entries, copy=True)
    n = A.n
    nu = interchanges = 0
    singular = False
    for i in range(n):
        x = 0
        for j in range(i):
            a_ij = a[i, j]
            if a_ij == 0.0:
                continue
            a_jj = a[j, j]
            if abs(a_jj) < abs(a_ij):
                a[[i, j]] = a[[j, i]]
                interchanges += 1
                x += 1
                if (a_jj < 0) != (a_ij < 0):
                    x += 1
                a_jj, a_ij = a_ij, a_jj
            factor = a_ij / a_jj
            if factor != 0.0:
                a[i, j:] -= factor * a[j, j:]
            a[i, j] = 0.0
        d = a[i, i]
        if d < 0:
            x += 1
        elif d == 0.0:
            singular = True
        nu += x % 2
    return DenseInertia(int(nu), singular, interchanges)


# =========================================================
# Cyclic Jacobi
# =========================================================


def jacobi_eigenvalues(A: DenseSym, tol: float = 1e-14, max_sweeps: int = 60) -> np.ndarray:
    """Sorted eigenvalues by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``tol * ‖A‖_F``; one more sweep then runs to settle the diagonal.
    Rotations update the diagonal by ``∓ t·a_pq`` and the other entries
    through ``τ = s / (1 + c)``.

    Raises
    ------
    ConvergenceError
        ``max_sweeps`` sweeps were not enough.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.array(A.entries, copy=True)
    n = A.n
    fro = float(np.linalg.norm(a))
    if fro == 0.0 or n == 1:
        return np.sort(np.diag(a))
    converged = False
    for sweep in range(max_sweeps + 1):
        if not converged:
            converged = float(np.linalg.norm(a - np.diag(np.diag(a)))) <= tol * fro
        else:
            logger.debug("jacobi converged after %d sweeps (n=%d)", sweep, n)
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, p, q)
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (n={n})")


def _rotate(a: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    if apq == 0.0:
        return
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:  # noqa: PLR2004
        t = 0.5 / theta
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    tau = s / (1.0 + c)
    app = a[p, p] - t * apq
    aqq = a[q, q] + t * apq
    g = a[:, p].copy()
    h = a[:, q].copy()
    new_p = g - s * (h + tau * g)
    new_q = h + s * (g - tau * h)
    a[:, p] = new_p
    a[:, q] = new_q
    a[p, :] = new_p
    a[q, :] = new_q
    a[p, p], a[q, q] = app, aqq
    a[p, q] = a[q, p] = 0.0


# =========================================================
# Exact determinants
# =========================================================


def _bareiss_det(m: list[list[int]]) -> int:
    m = [row[:] for row in m]
    k = len(m)
    sign, prev = 1, 1
    for c in range(k - 1):
        if m[c][c] == 0:
            swap = next((r for r in range(c + 1, k) if m[r][c] != 0), None)
            if swap is None:
                return 0
            m[c], m[swap] = m[swap], m[c]
            sign = -sign
        pivot = m[c][c]
        for r in range(c + 1, k):
            for cc in range(c + 1, k):
                m[r][cc] = (m[r][cc] * pivot - m[r][c] * m[c][cc]) // prev
        prev = pivot
    return sign * m[k - 1][k - 1]


def exact_det_signs(A: DenseSym) -> list[int]:
    """Exact signs of ``det(A_1), ..., det(A_n)`` by fraction-free elimination.

    Raises
    ------
    ValueError
        An entry is not an integer.
    OverflowError
        An entry is too large to be an exact integer in double precision.
    """
    a = A.entries
    if not np.all(np.isfinite(a)) or not np.array_equal(a, np.round(a)):
        raise ValueError("exact determinants need integer entries")
    if a.size and float(np.abs(a).max()) >= _EXACT_INT_LIMIT:
        raise OverflowError("entries exceed the exact integer range of a double")
    ints = [[int(v) for v in row] for row in a.tolist()]
    out = []
    for k in range(1, A.n + 1):
        det = _bareiss_det([row[:k] for row in ints[:k]])
        out.append((det > 0) - (det < 0))
    return out


# =========================================================
# Generators
# =========================================================


@dataclass(frozen=True)
class LatmsSpec:
    """Parameters of the LATMS-style generator.

    Modes 1-5 draw singular values ``σ`` and random signs; mode 6 draws the
    eigenvalues from a standard normal distribution. ``kappa`` is ignored in
    mode 6.
    """

    n: int
    mode: int
    kappa: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        """Validate ranges."""
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.mode not in range(1, 7):
            raise ValueError(f"mode must be 1..6, got {self.mode}")
        if not self.kappa >= 1.0:
            raise ValueError(f"kappa must be >= 1, got {self.kappa}")


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Q from the QR factorization of a Gaussian sample, columns signed so ``diag(R) > 0``."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return q * signs


def latms_singular_values(spec: LatmsSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """``σ`` for modes 1-5, largest first (mode 5 is random and unordered)."""
    n, inv = spec.n, 1.0 / spec.kappa
    steps = np.arange(n) / (n - 1) if n > 1 else np.zeros(1)
    if spec.mode == 1:
        return np.array([1.0] + [inv] * (n - 1))
    if spec.mode == 2:  # noqa: PLR2004
        return np.array([1.0] * (n - 1) + [inv])
    if spec.mode == 3:  # noqa: PLR2004
        return inv**steps
    if spec.mode == 4:  # noqa: PLR2004
        return 1.0 - steps * (1.0 - inv)
    if spec.mode == 5:  # noqa: PLR2004
        rng = rng if rng is not None else np.random.default_rng(spec.seed)
        return inv ** rng.uniform(size=n)
    raise ValueError("mode 6 has no singular-value distribution")


def _latms(spec: LatmsSpec) -> tuple[np.ndarray, np.ndarray]:
    # one stream: eigenvalue draws first, then Q
    rng = np.random.default_rng(spec.seed)
    if spec.mode == 6:  # noqa: PLR2004
        lam = rng.standard_normal(spec.n)
    else:
        sigma = latms_singular_values(spec, rng)
        lam = rng.choice([-1.0, 1.0], size=spec.n) * sigma
    q = random_orthogonal(spec.n, rng)
    a = (q * lam) @ q.T
    return 0.5 * (a + a.T), lam


def latms_generate(spec: LatmsSpec) -> DenseSym:
    """``A = QΛQᵀ`` with ``Λ`` drawn per ``spec.mode``, symmetrized."""
    return DenseSym(_latms(spec)[0])


def latms_eigenvalues(spec: LatmsSpec) -> np.ndarray:
    """Planted eigenvalues of ``latms_generate(spec)``, sorted."""
    return np.sort(_latms(spec)[1])


def random_dense_symmetric(n: int, seed: int) -> DenseSym:
    """``(G + Gᵀ)/2`` for a standard Gaussian ``G``."""
    g = np.random.default_rng(seed).standard_normal((n, n))
    return DenseSym(0.5 * (g + g.T))


def random_integer_symmetric(n: int, seed: int, low: int = -3, high: int = 3) -> DenseSym:
    """Symmetric matrix with integer entries drawn uniformly from ``[low, high]``."""
    m = np.random.default_rng(seed).integers(low, high + 1, size=(n, n)).astype(np.float64)
    return DenseSym(np.tril(m) + np.tril(m, -1).T)


def random_sparse_symmetric(
    n: int, density: float, seed: int, *, connected: bool = False
) -> CsrMatrix:
    """Random symmetric sparse matrix with Gaussian values.

    About ``density * n²`` off-diagonal entries are placed, in mirrored pairs.
    ``connected=True`` adds a tridiagonal band so the pattern is irreducible.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs = round(density * n * n / 2)
    entries: list[tuple[int, int, float]] = [(i, i, v) for i, v in enumerate(rng.standard_normal(n))]
    if n > 1 and pairs:
        rows = rng.integers(1, n, size=pairs)
        cols = (rng.random(pairs) * rows).astype(np.int64)
        entries += list(zip(rows.tolist(), cols.tolist(), rng.standard_normal(pairs).tolist(), strict=True))
    if connected:
        entries += [(i + 1, i, v) for i, v in enumerate(rng.standard_normal(max(n - 1, 0)))]
    return csr_from_triplets(n, entries)


def grid_laplacian(k: int, shift: float = 0.0) -> CsrMatrix:
    """5-point Laplacian on a ``k × k`` grid minus ``shift · I`` (row-major numbering)."""
    entries: list[tuple[int, int, float]] = []
    for r in range(k):
        for c in range(k):
            i = r * k + c
            entries.append((i, i, 4.0 - shift))
            if c + 1 < k:
                entries.append((i, i + 1, -1.0))
            if r + 1 < k:
                entries.append((i, i + k, -1.0))
    return csr_from_triplets(k * k, entries)


def tridiagonal(n: int, diag: float = 2.0, off: float = -1.0) -> CsrMatrix:
    """Symmetric Toeplitz tridiagonal matrix."""
    entries = [(i, i, diag) for i in range(n)]
    entries += [(i + 1, i, off) for i in range(n - 1)]
    return csr_from_triplets(n, entries)


def tridiagonal_eigenvalues(n: int, diag: float = 2.0, off: float = -1.0) -> np.ndarray:
    """Closed form ``diag + 2·off·cos(kπ/(n+1))``, sorted."""
    k = np.arange(1, n + 1)
    return np.sort(diag + 2.0 * off * np.cos(k * np.pi / (n + 1)))


# =========================================================
# Instability construction
# =========================================================


def instability_example(n: int, seed: int = 0) -> DenseSym:
    """``[[X, Zᵀ], [Z, 0]]`` with ``X`` nearly rank one and ``Z`` Gaussian.

    ``X = Q diag(1, ε₁, ...) Qᵀ`` where the ``ε`` are normal with standard
    deviation equal to machine epsilon. Every leading block of ``X`` past the
    first is numerically singular, which is what trips the factorization.
    """
    if n < 2 or n % 2:  # noqa: PLR2004
        raise ValueError("n must be a positive even number")
    h = n // 2
    rng = np.random.default_rng(seed)
    q = random_orthogonal(h, rng)
    d = np.concatenate([[1.0], np.finfo(np.float64).eps * rng.standard_normal(h - 1)])
    x = (q * d) @ q.T
    x = 0.5 * (x + x.T)
    z = rng.standard_normal((h, h))
    a = np.zeros((n, n))
    a[:h, :h] = x
    a[h:, :h] = z
    a[:h, h:] = z.T
    return DenseSym(a)


@dataclass(frozen=True)
class InstabilityReport:
    """Reference and computed negative indices for the instability matrix."""

    n: int
    seed: int
    kappa: float
    jacobi_nu: int
    elementary_nu: int
    givens_nu: int
    elementary_singular: bool
    givens_singular: bool

    @property
    def discrepancy(self) -> bool:
        """True when either variant disagrees with the Jacobi count."""
        return self.elementary_nu != self.jacobi_nu or self.givens_nu != self.jacobi_nu

    def as_dict(self) -> dict[str, object]:
        """Plain mapping for JSON output."""
        return {
            "n": self.n,
            "seed": self.seed,
            "kappa": self.kappa,
            "jacobi_nu": self.jacobi_nu,
            "elementary_nu": self.elementary_nu,
            "givens_nu": self.givens_nu,
            "elementary_singular": self.elementary_singular,
            "givens_singular": self.givens_singular,
            "discrepancy": self.discrepancy,
        }


def instability_report(n: int, seed: int = 0, tol: float = 1e-14) -> InstabilityReport:
    """Build the instability matrix and compare both variants with Jacobi."""
    dense = instability_example(n, seed)
    lam = jacobi_eigenvalues(dense, tol)
    mags = np.abs(lam)
    kappa = float(mags.max() / mags.min()) if mags.min() > 0 else math.inf
    sparse = dense.to_csr()
    elem = negative_index(sparse, Variant.ELEMENTARY)
    giv = negative_index(sparse, Variant.GIVENS)
    return InstabilityReport(
        n=n,
        seed=seed,
        kappa=kappa,
        jacobi_nu=negative_count(lam),
        elementary_nu=elem.nu,
        givens_nu=giv.nu,
        elementary_singular=elem.singular_minor,
        givens_singular=giv.singular_minor,
    )


def negative_count(values: Sequence[float] | np.ndarray) -> int:
    """Number of strictly negative entries."""
    return int(np.count_nonzero(np.asarray(values) < 0))
