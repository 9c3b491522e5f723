# tests/test_mmio.py
import numpy as np
import pytest
from conftest import csr, diag

from inertiakit.errors import InputFormatError, NotSymmetricError, PermutationError
from inertiakit.factor import negative_index
from inertiakit.mmio import (
    Permutation,
    apply_ordering,
    read_matrix_market,
    read_permutation,
    write_matrix_market,
)
from inertiakit.oracle import random_sparse_symmetric


def test_read_symmetric_lower_triangle(mtx_file):
    p = mtx_file(
        "a.mtx",
        """
        %%MatrixMarket matrix coordinate real symmetric
        % two by two
        2 2 3
        1 1 2
        2 1 1
        2 2 2
        """,
    )
    A = read_matrix_market(p)
    assert A.to_dense().tolist() == [[2.0, 1.0], [1.0, 2.0]]


def test_read_symmetric_upper_entry_is_mirrored(mtx_file):
    p = mtx_file(
        "upper.mtx",
        """
        %%MatrixMarket matrix coordinate real symmetric
        2 2 1
        1 2 -4.5
        """,
    )
    assert read_matrix_market(p).to_dense().tolist() == [[0.0, -4.5], [-4.5, 0.0]]


def test_read_symmetric_rejects_both_positions_of_a_pair(mtx_file):
    p = mtx_file(
        "both.mtx",
        """
        %%MatrixMarket matrix coordinate real symmetric
        2 2 3
        2 1 1.5
        1 2 1.5
        2 2 1
        """,
    )
    with pytest.raises(InputFormatError, match=r"both \(2, 1\) and \(1, 2\)") as info:
        read_matrix_market(p)
    assert info.value.line == 4


def test_read_symmetric_repeated_entry_is_summed(mtx_file):
    p = mtx_file(
        "rep.mtx",
        """
        %%MatrixMarket matrix coordinate real symmetric
        2 2 3
        2 1 1.5
        2 1 0.5
        2 2 1
        """,
    )
    assert read_matrix_market(p).to_dense().tolist() == [[0.0, 2.0], [2.0, 1.0]]


def test_read_pattern_gets_ones(mtx_file):
    p = mtx_file(
        "p.mtx",
        """
        %%MatrixMarket matrix coordinate pattern symmetric
        3 3 2
        1 1
        3 2
        """,
    )
    A = read_matrix_market(p)
    assert A.to_dense().tolist() == [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]
    assert A.nnz == 5


def test_read_integer_and_duplicates(mtx_file):
    p = mtx_file(
        "i.mtx",
        """
        %%MatrixMarket matrix coordinate integer general
        2 2 4
        1 1 3
        1 1 -1
        1 2 7
        2 1 7
        """,
    )
    assert read_matrix_market(p).to_dense().tolist() == [[2.0, 7.0], [7.0, 0.0]]


def test_read_general_unsymmetric_rejected(mtx_file):
    p = mtx_file(
        "g.mtx",
        """
        %%MatrixMarket matrix coordinate real general
        2 2 2
        1 2 1.0
        2 1 1.5
        """,
    )
    with pytest.raises(NotSymmetricError, match="not symmetric"):
        read_matrix_market(p)


def test_read_general_missing_mirror_rejected(mtx_file):
    p = mtx_file(
        "g2.mtx",
        """
        %%MatrixMarket matrix coordinate real general
        2 2 1
        1 2 1.0
        """,
    )
    with pytest.raises(NotSymmetricError):
        read_matrix_market(p)


@pytest.mark.parametrize(
    "body,line,match",
    [
        ("hello\n", 1, "banner"),
        ("%%MatrixMarket matrix array real symmetric\n2 2\n", 1, "coordinate"),
        ("%%MatrixMarket matrix coordinate complex symmetric\n", 1, "field"),
        ("%%MatrixMarket matrix coordinate real hermitian\n", 1, "symmetry"),
        ("%%MatrixMarket matrix coordinate real symmetric\n2 3 0\n", 2, "square"),
        ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n", 3, "outside"),
        ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 x\n", 3, "not a number"),
        ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 nan\n", 3, "non-finite"),
        ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1\n", 3, "fields"),
        ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1.0\n2 2 1.0\n", 4, "more than"),
    ],
)
def test_read_rejections_carry_line_numbers(tmp_path, body, line, match):
    p = tmp_path / "bad.mtx"
    p.write_text(body, encoding="utf-8")
    with pytest.raises(InputFormatError, match=match) as info:
        read_matrix_market(p)
    assert info.value.line == line
    assert f"bad.mtx:{line}:" in str(info.value)


def test_read_too_few_entries(mtx_file):
    p = mtx_file(
        "short.mtx",
        """
        %%MatrixMarket matrix coordinate real symmetric
        2 2 2
        1 1 1.0
        """,
    )
    with pytest.raises(InputFormatError, match="expected 2 entries"):
        read_matrix_market(p)


def test_read_empty_file(tmp_path):
    p = tmp_path / "empty.mtx"
    p.write_text("", encoding="utf-8")
    with pytest.raises(InputFormatError, match="empty"):
        read_matrix_market(p)


def test_write_read_round_trip(tmp_path):
    A = random_sparse_symmetric(25, 0.1, 5)
    p = write_matrix_market(A, tmp_path / "r.mtx", comment="round trip\nsecond line")
    assert read_matrix_market(p) == A
    text = p.read_text(encoding="utf-8")
    assert text.startswith("%%MatrixMarket matrix coordinate real symmetric\n% round trip\n")


def test_write_keeps_explicit_zero_diagonal(tmp_path):
    A = csr([[0, 1], [1, 0]])
    assert read_matrix_market(write_matrix_market(A, tmp_path / "z.mtx")) == A


# ---- permutations -------------------------------------------------------------


def test_read_permutation_identity(tmp_path):
    p = tmp_path / "id.perm"
    p.write_text("0\n1\n2\n", encoding="utf-8")
    assert read_permutation(p, 3) == Permutation.identity(3)


def test_read_permutation_reversal_skips_blanks(tmp_path):
    p = tmp_path / "rev.perm"
    p.write_text("2\n\n1\n0\n", encoding="utf-8")
    assert read_permutation(p, 3).p == (2, 1, 0)


def test_read_permutation_duplicate(tmp_path):
    p = tmp_path / "dup.perm"
    p.write_text("0\n0\n1\n", encoding="utf-8")
    with pytest.raises(PermutationError, match="duplicate"):
        read_permutation(p, 3)


def test_read_permutation_wrong_length(tmp_path):
    p = tmp_path / "short.perm"
    p.write_text("0\n1\n", encoding="utf-8")
    with pytest.raises(PermutationError, match="expected 3"):
        read_permutation(p, 3)


def test_read_permutation_not_integer(tmp_path):
    p = tmp_path / "x.perm"
    p.write_text("0\none\n", encoding="utf-8")
    with pytest.raises(InputFormatError) as info:
        read_permutation(p, 2)
    assert info.value.line == 2


def test_read_permutation_not_text(tmp_path):
    p = tmp_path / "bin.perm"
    p.write_bytes(b"0\n\xff\xfe\n1\n")
    with pytest.raises(InputFormatError, match="not a text file"):
        read_permutation(p, 3)


def test_permutation_validation_and_inverse():
    with pytest.raises(PermutationError, match="out of range"):
        Permutation((0, 3, 1))
    p = Permutation((2, 0, 1))
    assert p.inverse().p == (1, 2, 0)
    assert len(p) == 3


def test_apply_ordering_identity_is_bitwise():
    A = random_sparse_symmetric(12, 0.2, 1)
    assert apply_ordering(A, Permutation.identity(A.n)) == A


def test_apply_ordering_entries():
    A = diag(1.0, 2.0, 3.0)
    B = apply_ordering(A, [2, 1, 0])
    assert B.diagonal().tolist() == [3.0, 2.0, 1.0]
    C = csr([[1, 5, 0], [5, 2, 0], [0, 0, 3]])
    D = apply_ordering(C, [2, 0, 1])
    dense = C.to_dense()
    assert np.array_equal(D.to_dense(), dense[np.ix_([2, 0, 1], [2, 0, 1])])


@pytest.mark.parametrize("seed", range(5))
def test_apply_ordering_inverse_restores(seed):
    A = random_sparse_symmetric(30, 0.1, seed)
    p = Permutation(tuple(np.random.default_rng(seed).permutation(A.n).tolist()))
    B = apply_ordering(A, p)
    assert B.structurally_symmetric
    assert apply_ordering(B, p.inverse()) == A
    assert negative_index(B).nu == negative_index(A).nu


def test_apply_ordering_length_mismatch():
    with pytest.raises(PermutationError):
        apply_ordering(diag(1.0, 2.0), [0])
