# tests/test_symbolic.py
import numpy as np
import pytest
from conftest import csr, diag

from inertiakit.oracle import grid_laplacian, random_sparse_symmetric
from inertiakit.symbolic import (
    ColEtree,
    RowCounts,
    allocate_capacities,
    col_etree,
    postorder,
    predict_capacities,
    r_row_counts,
    symbolic_qr_counts,
    symbolic_qr_pattern,
)


def cholesky_of_ata(A):
    """Brute-force etree and column counts of chol(AᵀA) from dense patterns."""
    p = (A.to_dense() != 0) | np.eye(A.n, dtype=bool)
    for i in range(A.n):
        for c in A.row(i)[0].tolist():
            p[i, c] = True
    ata = (p.T.astype(np.int64) @ p.astype(np.int64)) > 0
    L = np.tril(ata)
    n = A.n
    for j in range(n):
        below = np.flatnonzero(L[j + 1 :, j]) + j + 1
        for a in below:
            L[a, below[below <= a]] = True
    parent = []
    for j in range(n):
        below = np.flatnonzero(L[j + 1 :, j])
        parent.append(int(below[0]) + j + 1 if below.size else -1)
    counts = [int(L[j:, j].sum()) for j in range(n)]
    return tuple(parent), counts


def test_etree_diagonal_is_forest():
    tree = col_etree(diag(1.0, 2.0, 3.0))
    assert tree.parent == (-1, -1, -1)
    assert tree.roots() == [0, 1, 2]


def test_etree_dense_is_chain():
    tree = col_etree(csr(np.ones((5, 5))))
    assert tree.parent == (1, 2, 3, 4, -1)
    assert tree.path_to_root(1) == [1, 2, 3, 4]


@pytest.mark.parametrize("seed", range(10))
def test_etree_matches_brute_force(seed):
    A = random_sparse_symmetric(8, 0.3, seed)
    parent, _ = cholesky_of_ata(A)
    assert col_etree(A).parent == parent


def test_postorder_children_before_parents():
    A = grid_laplacian(4)
    tree = col_etree(A)
    post = postorder(tree)
    assert sorted(post) == list(range(A.n))
    where = {node: k for k, node in enumerate(post)}
    for node, parent in enumerate(tree.parent):
        if parent != -1:
            assert where[node] < where[parent]


def test_postorder_forest():
    assert postorder(ColEtree((-1, -1, 1))) == [0, 2, 1]


def test_row_counts_dense():
    assert r_row_counts(csr(np.ones((4, 4)))).counts == (4, 3, 2, 1)


def test_row_counts_diagonal():
    counts = r_row_counts(diag(1.0, 2.0, 3.0))
    assert counts.counts == (1, 1, 1)
    assert counts.total == 3
    assert len(counts) == 3


@pytest.mark.parametrize("seed", range(10))
def test_row_counts_match_cholesky_of_ata(seed):
    A = random_sparse_symmetric(12, 0.15, seed)
    _, expected = cholesky_of_ata(A)
    assert list(r_row_counts(A).counts) == expected


@pytest.mark.parametrize("seed", range(10))
def test_row_counts_match_symbolic_qr_when_irreducible(seed):
    A = random_sparse_symmetric(10, 0.1, seed, connected=True)
    assert r_row_counts(A).counts == symbolic_qr_counts(A).counts


@pytest.mark.parametrize("seed", range(5))
def test_row_counts_bound_symbolic_qr(seed):
    A = random_sparse_symmetric(14, 0.05, seed)
    tight = r_row_counts(A).counts
    brute = symbolic_qr_counts(A).counts
    assert all(t >= b for t, b in zip(tight, brute, strict=True))


@pytest.mark.parametrize("seed", range(5))
def test_safe_counts_are_upper_bounds(seed):
    A = random_sparse_symmetric(16, 0.08, seed)
    tree = col_etree(A)
    tight = r_row_counts(A, tree)
    safe = r_row_counts(A, tree, safe=True)
    assert safe.safe
    assert all(s >= t for s, t in zip(safe.counts, tight.counts, strict=True))


def test_symbolic_pattern_rows_live_on_etree_path():
    A = grid_laplacian(3)
    tree = col_etree(A)
    for i, row in enumerate(symbolic_qr_pattern(A)):
        assert min(row) == i
        assert row <= set(tree.path_to_root(i))


def test_row_counts_tree_size_mismatch():
    with pytest.raises(ValueError, match="nodes"):
        r_row_counts(diag(1.0, 2.0), ColEtree((-1,)))


def test_allocate_capacities_examples():
    A = csr([[1, 1, 1], [1, 1, 0], [1, 0, 1]])
    assert allocate_capacities(A, [2, 4, 2])[0] == 3
    assert allocate_capacities(A, [2, 4, 2])[1] == 4
    assert allocate_capacities(A, RowCounts((3, 2, 2))) == [3, 2, 2]


def test_allocate_capacities_length_mismatch():
    with pytest.raises(ValueError, match="row counts"):
        allocate_capacities(diag(1.0, 2.0), [1])


def test_predict_capacities_cover_rows():
    A = grid_laplacian(4)
    caps = predict_capacities(A)
    assert all(c >= k for c, k in zip(caps, A.row_nnz().tolist(), strict=True))
