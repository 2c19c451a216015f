"""Transfer operator: dense closed forms, matrix-free application, invariants."""

import numpy as np
import pytest

from setscope import (
    CapacityError,
    InvalidParameterError,
    ModelParams,
    apply_transfer,
    build_bond_tensor,
    build_double_bond,
    build_transfer,
)
from setscope import oracle


def parity(n):
    return bin(n).count("1") & 1


def test_double_bond_values():
    assert build_double_bond(build_bond_tensor(+1, 0.9)) == build_double_bond(
        build_bond_tensor(-1, 0.9)
    )
    db = build_double_bond(build_bond_tensor(+1, 0.9))
    assert db.d0 == pytest.approx(0.81)
    assert db.d1 == 1.0
    db1 = build_double_bond(build_bond_tensor(-1, 1.0))
    assert (db1.d0, db1.d1) == (1.0, 1.0)
    op = build_transfer(ModelParams(+1, +1, 0.9), 4)
    assert op.vertical_bond == op.horizontal_bond == db


def test_fixed_point_dense_entries():
    op = build_transfer(ModelParams(+1, +1, 1.0), 4)
    dense = op.dense()
    for b in range(16):
        for a in range(16):
            expected = 2.0 if parity(a) == parity(b) else 0.0
            assert dense[b, a] == expected
    ev = np.sort(np.abs(np.linalg.eigvals(dense)))[::-1]
    assert ev[0] == pytest.approx(16.0) and ev[1] == pytest.approx(16.0)
    assert (ev[2:] < 1e-12 * 16).all()


@pytest.mark.parametrize("ly", [4, 6])
def test_fixed_point_projector_identity(ly):
    dense = build_transfer(ModelParams(+1, +1, 1.0), ly).dense()
    assert np.allclose(dense @ dense, 2 ** ly * dense, atol=1e-9)


@pytest.mark.parametrize("ly,km", [(3, -1), (5, -1), (4, -1), (4, +1), (5, +1)])
def test_parity_selection_rule(ly, km):
    op = build_transfer(ModelParams(km, +1, 0.7), ly)
    dense = op.dense()
    p = 0 if km == +1 else 1
    for b in range(1 << ly):
        for a in range(1 << ly):
            if (parity(a) + parity(b) + ly * p) % 2 != 0:
                assert dense[b, a] == 0.0


def test_odd_ring_flips_parity_sectors():
    op = build_transfer(ModelParams(-1, +1, 0.9), 5)
    dense = op.dense()
    even = np.array([parity(n) == 0 for n in range(32)])
    v = np.where(even, 1.0, 0.0)
    out = dense @ v
    assert (out[even] == 0).all()
    assert np.abs(out[~even]).max() > 0


def test_apply_zero_vector():
    op = build_transfer(ModelParams(+1, +1, 0.9), 5)
    assert not apply_transfer(op, np.zeros(32)).any()


def test_apply_matches_dense():
    op = build_transfer(ModelParams(+1, +1, 0.9), 6)
    dense = op.dense()
    rng = np.random.default_rng(42)
    for v in (rng.standard_normal(64), rng.standard_normal(64) + 1j * rng.standard_normal(64)):
        got = apply_transfer(op, v)
        want = dense @ v
        assert np.abs(got - want).max() <= 1e-12 * np.abs(want).max()


def test_apply_batch_matches_loop():
    op = build_transfer(ModelParams(-1, +1, 0.8), 5)
    rng = np.random.default_rng(7)
    batch = rng.standard_normal((32, 9))
    got = op.apply_batch(batch)
    for j in range(9):
        assert np.allclose(got[:, j], op.apply(batch[:, j]), atol=1e-13)


def test_apply_dimension_mismatch():
    op = build_transfer(ModelParams(+1, +1, 0.9), 4)
    with pytest.raises(InvalidParameterError):
        op.apply(np.zeros(15))


def test_fixed_point_uniform_even_eigenvector():
    ly = 4
    op = build_transfer(ModelParams(+1, +1, 1.0), ly)
    v = np.array([1.0 if parity(n) == 0 else 0.0 for n in range(1 << ly)])
    assert np.allclose(op.apply(v), 2 ** (ly - 1) * 2 * v)


@pytest.mark.parametrize("km", [+1, -1])
@pytest.mark.parametrize("ly", [4, 6, 8])
def test_translation_covariance(km, ly):
    op = build_transfer(ModelParams(km, +1, 0.9), ly)
    dense = op.dense()
    dim = 1 << ly
    shift = np.zeros((dim, dim))
    mask = dim - 1
    for a in range(dim):
        shift[((a << 1) & mask) | (a >> (ly - 1)), a] = 1.0
    comm = dense @ shift - shift @ dense
    assert np.abs(comm).max() <= 1e-12 * np.abs(dense).max()


def test_dense_is_real():
    dense = build_transfer(ModelParams(-1, -1, 0.9), 4).dense()
    assert dense.dtype.kind == "f"


def test_dense_capacity_error():
    op = build_transfer(ModelParams(+1, +1, 0.9), 12)
    with pytest.raises(CapacityError, match="capacity"):
        op.dense()


def test_matrix_free_large_ring():
    op = build_transfer(ModelParams(+1, +1, 0.9), 14)
    v = np.zeros(1 << 14)
    v[0] = 1.0
    out = op.apply(v)
    assert np.isfinite(out).all() and out.any()


def test_two_column_operator():
    one = build_transfer(ModelParams(-1, +1, 0.9), 4)
    two = build_transfer(ModelParams(-1, -1, 0.9), 4)
    assert one.n_cols == 1 and two.n_cols == 2
    single = two.single_column_dense()
    assert np.allclose(two.dense(), single @ single, atol=1e-12)
    ev1 = np.sort(np.abs(np.linalg.eigvals(one.dense())))
    ev2 = np.sort(np.abs(np.linalg.eigvals(two.dense())))
    assert np.allclose(ev2, ev1 ** 2, atol=1e-9 * ev2.max())
    assert (np.linalg.eigvals(two.dense()).real >= -1e-9 * ev2.max()).all()


def test_dense_matches_oracle_restriction():
    for km, ke in [(+1, +1), (-1, +1), (+1, -1), (-1, -1)]:
        params = ModelParams(km, ke, 0.85)
        op = build_transfer(params, 4)
        reduced = oracle.coincident_restriction(oracle.unreduced_transfer(params, 4), 4)
        if op.n_cols == 2:
            reduced = reduced @ reduced
        assert np.abs(op.dense() - reduced).max() <= 1e-12


def test_rejects_small_ring():
    with pytest.raises(InvalidParameterError):
        build_transfer(ModelParams(+1, +1, 0.9), 1)
