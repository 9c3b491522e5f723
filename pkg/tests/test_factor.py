# tests/test_factor.py
import math

import numpy as np
import pytest
from conftest import csr, diag

from inertiakit import CsrMatrix, apply_ordering, csr_from_triplets, csr_one_norm, csr_shift
from inertiakit.errors import CapacityError, NonFiniteError
from inertiakit.factor import (
    InertiaReport,
    Variant,
    det_sign_sequence,
    factorize,
    negative_index,
    structural_pattern,
)
from inertiakit.oracle import (
    exact_det_signs,
    grid_laplacian,
    jacobi_eigenvalues,
    negative_count,
    random_dense_symmetric,
    random_integer_symmetric,
    random_sparse_symmetric,
)
from inertiakit.symbolic import r_row_counts, symbolic_qr_pattern

VARIANTS = list(Variant)


@pytest.mark.parametrize("variant", VARIANTS)
def test_diagonal_counts_negatives(variant):
    rep = negative_index(diag(1.0, -2.0, 3.0, -4.0), variant)
    assert rep.nu == 2
    assert not rep.singular_minor
    assert rep.interchanges == 0


def test_zero_diagonal_swap():
    A = csr([[0, 1], [1, 0]])
    rep = negative_index(A, Variant.ELEMENTARY)
    assert rep.nu == 1
    assert rep.interchanges == 1
    assert rep.singular_rows == (0,)
    assert negative_index(A, Variant.GIVENS).nu == 1


def test_zero_final_diagonal_flags_singular():
    rep = negative_index(diag(1.0, 0.0, 2.0))
    assert rep.nu == 0
    assert rep.singular_minor
    assert rep.singular_rows == (1,)


def test_report_bounds():
    A = grid_laplacian(4, shift=1.5)
    fact = factorize(A, Variant.GIVENS)
    rep = fact.report
    assert isinstance(rep, InertiaReport)
    assert 0 <= rep.nu <= A.n
    assert rep.final_nnz <= len(fact.ecsr.val)
    assert rep.max_row_nnz <= max(fact.ecsr.capacity(i) for i in range(A.n))
    assert rep.as_dict()["variant"] == "givens"
    fact.ecsr.audit()


def test_variant_accepts_strings():
    assert negative_index(diag(-1.0), "givens").variant is Variant.GIVENS
    assert str(Variant.ELEMENTARY) == "elementary"
    with pytest.raises(ValueError):
        negative_index(diag(-1.0), "householder")


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("seed", range(100))
def test_matches_jacobi_count(seed, variant):
    dense = random_dense_symmetric(8, seed)
    rep = negative_index(dense.to_csr(), variant)
    assert not rep.singular_minor
    assert rep.nu == negative_count(jacobi_eigenvalues(dense))


@pytest.mark.parametrize("seed", range(20))
def test_variants_agree_on_sparse_input(seed):
    A = random_sparse_symmetric(30, 0.1, seed)
    elem = negative_index(A, Variant.ELEMENTARY)
    giv = negative_index(A, Variant.GIVENS)
    if not (elem.singular_minor or giv.singular_minor):
        assert elem.nu == giv.nu


# ---- determinant signs ------------------------------------------------------


@pytest.mark.parametrize("variant", VARIANTS)
def test_det_signs_positive_definite(variant):
    assert det_sign_sequence(csr([[2, 1], [1, 2]]), variant) == [1, 1]
    assert negative_index(csr([[2, 1], [1, 2]]), variant).nu == 0


@pytest.mark.parametrize("variant", VARIANTS)
def test_det_signs_negative_diagonal(variant):
    assert det_sign_sequence(diag(-1.0, -1.0), variant) == [-1, 1]


@pytest.mark.parametrize("variant", VARIANTS)
def test_det_signs_zero_leading_minor(variant):
    assert det_sign_sequence(csr([[0, 1], [1, 0]]), variant) == [0, -1]


def sign_changes(signs):
    seq = [1, *signs]
    return sum(a != b for a, b in zip(seq, seq[1:], strict=False))


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("seed", range(50))
def test_det_signs_match_bareiss(seed, variant):
    dense = random_integer_symmetric(6, seed)
    exact = exact_det_signs(dense)
    if 0 in exact:
        pytest.skip("zero leading minor")
    A = dense.to_csr()
    assert det_sign_sequence(A, variant) == exact
    assert negative_index(A, variant).nu == sign_changes(exact)


# ---- structure ----------------------------------------------------------------


@pytest.mark.parametrize("variant", VARIANTS)
def test_diagonal_pattern_unchanged(variant):
    assert structural_pattern(diag(1.0, -1.0, 2.0), variant) == [(0,), (1,), (2,)]


def test_swap_pattern_contained_in_rotation_pattern():
    # row 5 meets a tiny pivot in row 1, forcing an interchange there
    entries = [(i, i, 1.0) for i in range(6)]
    entries[1] = (1, 1, 0.1)
    entries += [(2, 1, 0.05), (5, 1, 3.0), (5, 4, 1.0), (3, 0, 0.5)]
    A = csr_from_triplets(6, entries)
    elem = factorize(A, Variant.ELEMENTARY)
    assert elem.report.interchanges >= 1
    givens = structural_pattern(A, Variant.GIVENS)
    for e_row, g_row in zip(elem.ecsr.pattern(), givens, strict=True):
        assert set(e_row) <= set(g_row)


@pytest.mark.parametrize("seed", range(10))
def test_fill_containment(seed):
    A = random_sparse_symmetric(12, 0.2, seed)
    elem = structural_pattern(A, Variant.ELEMENTARY)
    givens = structural_pattern(A, Variant.GIVENS)
    predicted = symbolic_qr_pattern(A)
    counts = r_row_counts(A)
    for i in range(A.n):
        assert set(elem[i]) <= set(givens[i])
        assert set(givens[i]) <= predicted[i]
        assert len(givens[i]) <= counts[i]


@pytest.mark.parametrize("variant", VARIANTS)
def test_tiny_capacities_raise(variant):
    with pytest.raises(CapacityError):
        negative_index(grid_laplacian(3, shift=1.5), variant, counts=[0] * 9)


def test_non_finite_input_is_reported():
    A = CsrMatrix(1, [0, 1], [0], [math.inf])
    with pytest.raises(NonFiniteError) as info:
        negative_index(A)
    assert info.value.row == 0


def test_unsymmetric_pattern_rejected():
    A = CsrMatrix(2, [0, 2, 3], [0, 1, 1], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError, match="structurally symmetric"):
        negative_index(A)


def test_missing_diagonal_rejected():
    A = CsrMatrix(2, [0, 1, 2], [1, 0], [1.0, 1.0])
    with pytest.raises(ValueError, match="diagonal"):
        negative_index(A)


# ---- properties ---------------------------------------------------------------


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("seed", range(10))
def test_sturm_count_is_monotone(seed, variant):
    A = random_dense_symmetric(10, seed).to_csr()
    norm = csr_one_norm(A)
    last = -1
    for x in np.linspace(-1.01 * norm, 1.01 * norm, 25):
        rep = negative_index(csr_shift(A, float(x)), variant)
        if rep.singular_minor:
            continue
        assert rep.nu >= last
        last = rep.nu
    assert last == A.n


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("seed", range(10))
def test_permutation_invariance(seed, variant):
    A = random_sparse_symmetric(20, 0.15, seed)
    p = np.random.default_rng(seed).permutation(A.n).tolist()
    base = negative_index(A, variant)
    permuted = negative_index(apply_ordering(A, p), variant)
    if not (base.singular_minor or permuted.singular_minor):
        assert base.nu == permuted.nu


def test_elementary_uses_fewer_flops_on_grid():
    A = grid_laplacian(10, shift=1.5)
    elem = negative_index(A, Variant.ELEMENTARY)
    giv = negative_index(A, Variant.GIVENS)
    assert elem.flops < giv.flops
    assert elem.final_nnz <= giv.final_nnz


@pytest.mark.slow
def test_elementary_flops_ratio_on_large_grid():
    A = grid_laplacian(30, shift=1.5)
    elem = negative_index(A, Variant.ELEMENTARY)
    giv = negative_index(A, Variant.GIVENS)
    assert elem.flops < 0.5 * giv.flops


@pytest.mark.parametrize("seed", range(10))
def test_rotations_do_not_grow_entries(seed):
    A = random_sparse_symmetric(25, 0.2, seed)
    frob = float(np.sqrt(np.sum(A.values**2)))
    fact = factorize(A, Variant.GIVENS)
    for i in range(A.n):
        assert all(abs(v) <= frob * (1 + 1e-12) for v in fact.ecsr.row_vals(i))
