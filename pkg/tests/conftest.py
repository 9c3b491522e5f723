# tests/conftest.py
import math
import pathlib
import sys
import textwrap

import numpy as np
import pytest

# Ensure tests import the local workspace inertiakit package, not an installed one.
ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))
if "inertiakit" in sys.modules:
    del sys.modules["inertiakit"]

from inertiakit import CsrMatrix, write_matrix_market  # noqa: E402
from inertiakit.oracle import tridiagonal  # noqa: E402
from inertiakit.sparse import csr_one_norm  # noqa: E402


def csr(rows):
    """Dense nested list -> CsrMatrix (nonzeros plus full diagonal)."""
    return CsrMatrix.from_dense(np.asarray(rows, dtype=float))


def diag(*values):
    return csr(np.diag(values))


def assert_sound(result, A, tau, width=None):
    """Counts stay monotone, final brackets are tight and values are their midpoints."""
    norm = csr_one_norm(A)
    stop = 2.0 * tau * norm
    assert result.monotonicity_violations == 0
    for node in result.nodes:
        assert node.nu0 <= node.mu <= node.nu1
        assert node.x0 < node.x < node.x1
    mids = set()
    for x0, x1, nu0, nu1 in result.brackets:
        assert nu0 < nu1
        assert x1 - x0 <= max(stop, 4 * math.ulp(max(abs(x0), abs(x1))))
        mids.add(x0 + 0.5 * (x1 - x0))
    assert set(result.values) <= mids
    # every depth splits at most one bracket per eigenvalue
    width = 2.0 * norm if width is None else width
    if stop == 0:
        return
    depth = math.ceil(math.log2(width / stop)) + 2 if width > stop else 1
    splits = result.inertia_evals - result.singular_retries
    assert splits <= A.n * depth


@pytest.fixture
def mtx_file(tmp_path):
    """Write a Matrix Market text snippet and return its path."""

    def _write(name, body):
        p = tmp_path / name
        p.write_text(textwrap.dedent(body).lstrip(), encoding="utf-8")
        return p

    return _write


@pytest.fixture
def diag_mtx(tmp_path):
    return write_matrix_market(diag(1.0, -2.0, 3.0), tmp_path / "diag.mtx")


@pytest.fixture
def tri_mtx(tmp_path):
    return write_matrix_market(tridiagonal(4), tmp_path / "tri.mtx")


@pytest.fixture
def ordinal_mtx(tmp_path):
    return write_matrix_market(diag(10.0, 20.0, 30.0), tmp_path / "d.mtx")
