"""Spectrum extraction: ground set, branch minima, gaps."""

import numpy as np
import pytest

from setscope import (
    ModelParams,
    NumericalFailureError,
    Tolerances,
    build_momentum_basis,
    build_transfer,
    diagonalize_block,
    identify_ground_set,
    run_point,
)
from setscope.momentum import BlockMatrix, assemble_block
from setscope.spectra import BRANCH_PI, BRANCH_ZERO

from conftest import eps_curve


def test_diagonalize_fixed_point_zero_block():
    op = build_transfer(ModelParams(+1, +1, 1.0), 4)
    spec = diagonalize_block(assemble_block(op, build_momentum_basis(4, 0)))
    ev = spec.eigenvalues
    assert abs(ev[0] - 16) < 1e-12 * 16 and abs(ev[1] - 16) < 1e-12 * 16
    assert (np.abs(ev[2:]) < 1e-12 * 16).all()


def test_eigenvalue_multiset_invariant_under_basis_permutation():
    op = build_transfer(ModelParams(-1, +1, 0.9), 5)
    block = assemble_block(op, build_momentum_basis(5, 1))
    rng = np.random.default_rng(0)
    perm = rng.permutation(block.matrix.shape[0])
    permuted = BlockMatrix(ly=5, k_index=1, matrix=block.matrix[np.ix_(perm, perm)])
    a = diagonalize_block(block).eigenvalues
    b = diagonalize_block(permuted).eigenvalues
    assert np.allclose(np.sort_complex(a), np.sort_complex(b), atol=1e-9 * np.abs(a).max())


def test_diagonalize_rejects_nonfinite():
    bad = BlockMatrix(ly=2, k_index=0, matrix=np.array([[np.nan, 0], [0, 1.0]]))
    with pytest.raises(NumericalFailureError, match="k_index=0"):
        diagonalize_block(bad)


def test_spectrum_negation_closure_odd_ring(pipe):
    pt = pipe(-1, +1, 0.9, 5)
    for blk in pt.spectra.blocks:
        re = np.sort(blk.eigenvalues.real)
        assert np.allclose(re, -re[::-1], atol=1e-9 * pt.ground.value)


def test_conjugate_closure(pipe):
    for blk in pipe(+1, +1, 0.9, 6).spectra.blocks:
        ev = blk.eigenvalues
        assert np.allclose(
            np.sort_complex(ev), np.sort_complex(ev.conj()), atol=1e-9 * np.abs(ev).max()
        )


def test_ground_set_fixed_point(pipe):
    pt = pipe(+1, +1, 1.0, 4)
    assert pt.ground.value == pytest.approx(16.0, rel=1e-12)
    assert len(pt.ground.members) == 2
    vals = sorted(abs(v) for v in pt.ground.member_values)
    assert vals[1] - vals[0] <= 1e-12 * 16


def test_ground_set_topological_pair(pipe):
    pt = pipe(+1, +1, 0.9, 8)
    ground = identify_ground_set(pt.spectra, tol=1e-3)
    assert len(ground.members) == 2
    assert all(k == 0 for k, _ in ground.members)
    mags = sorted(abs(v) for v in ground.member_values)
    assert (mags[1] - mags[0]) / mags[1] < 1e-3
    # the splitting is far below even the default window at this size
    assert len(pt.ground.members) == 2


def test_ground_member_epsilon_zero(pipe):
    pt = pipe(-1, +1, 0.9, 8)
    eps = [p.epsilon for p in pt.scl.ground_points]
    assert min(eps) == 0.0
    assert max(eps) >= 0.0 and max(eps) < 1e-6


def test_scl_fixed_point_sentinels(pipe):
    pt = pipe(+1, +1, 1.0, 4)
    assert pt.scl.branches == (BRANCH_ZERO, BRANCH_PI)
    for p in pt.scl.points:
        assert p.epsilon is None
        assert p.eigenvalue == 0
    assert len(pt.scl.ground_points) == 2


def test_scl_pi_branch_populated_every_momentum(pipe):
    pt = pipe(-1, +1, 0.9, 8)
    pi_eps = eps_curve(pt, BRANCH_PI)
    assert set(pi_eps) == set(range(8))
    assert all(e is not None and e > 0 for e in pi_eps.values())


@pytest.mark.parametrize("ly", [5, 7])
def test_scl_odd_ring_branches_identical(pipe, ly):
    pt = pipe(-1, +1, 0.9, ly)
    zero = eps_curve(pt, BRANCH_ZERO)
    pi = eps_curve(pt, BRANCH_PI)
    for m in range(ly):
        assert zero[m] is not None and pi[m] is not None
        assert abs(zero[m] - pi[m]) <= 1e-9


@pytest.mark.parametrize("ly", [4, 6, 8])
def test_real_positive_regime(pipe, ly):
    pt = pipe(+1, +1, 0.9, ly)
    lam0 = pt.ground.value
    for blk in pt.spectra.blocks:
        assert np.abs(blk.eigenvalues.imag).max() <= 1e-9 * lam0
        assert blk.eigenvalues.real.min() >= -1e-9 * lam0
    # hence the pi branch is empty at every momentum
    assert all(p.epsilon is None for p in pt.scl.branch_points(BRANCH_PI))


def test_epsilon_nonnegative(pipe):
    for args in [(-1, +1, 0.9, 8), (+1, +1, 0.9, 6), (-1, -1, 0.9, 6)]:
        pt = pipe(*args)
        for p in pt.scl.points:
            if p.epsilon is not None:
                assert p.epsilon >= 0.0


def test_two_column_branch_unavailable(pipe):
    pt = pipe(+1, -1, 0.9, 6)
    assert pt.scl.branches == (BRANCH_ZERO,)
    assert pt.scl.unavailable_branches == (BRANCH_PI,)
    assert pt.n_cols == 2


def test_gap_zero_at_fixed_point(pipe):
    pt = pipe(-1, +1, 1.0, 6)
    g00 = next(g for g in pt.gaps if g.k_x == BRANCH_ZERO and g.k_index == 0)
    assert g00.gamma == pytest.approx(0.0, abs=1e-12)


def test_gap_pipi_equals_scl_minimum(pipe):
    pt = pipe(-1, +1, 0.9, 8)
    gpp = next(g for g in pt.gaps if g.k_x == BRANCH_PI and g.k_index == 4)
    assert gpp.gamma == pytest.approx(pt.scl.epsilon(BRANCH_PI, 4), rel=1e-12)


def test_gap_order_near_small_w(pipe):
    pt = pipe(-1, +1, 0.1, 8)
    g00 = next(g.gamma for g in pt.gaps if g.k_x == BRANCH_ZERO and g.k_index == 0)
    gpp = next(g.gamma for g in pt.gaps if g.k_x == BRANCH_PI and g.k_index == 4)
    assert gpp > g00 > 0


def test_per_column_measure_matches_squared_run():
    """One- and two-column runs agree on every derived quantity."""
    one = run_point(ModelParams(+1, +1, 0.9), 6, tolerances=Tolerances())
    two = run_point(ModelParams(+1, -1, 0.9), 6, tolerances=Tolerances())
    assert two.ground.per_column_value == pytest.approx(one.ground.per_column_value, rel=1e-12)
    z1 = eps_curve(one, BRANCH_ZERO)
    z2 = eps_curve(two, BRANCH_ZERO)
    for m in range(6):
        assert z2[m] == pytest.approx(z1[m], abs=1e-11)


def test_dual_run_equals_swapped_primal():
    dual = run_point(ModelParams(+1, -1, 0.9, detect="m"), 4)
    primal = run_point(ModelParams(-1, +1, 0.9, detect="e"), 4)
    assert dual.n_cols == primal.n_cols == 1
    for a, b in zip(dual.scl.points, primal.scl.points):
        assert (a.k_index, a.k_x, a.epsilon, a.eigenvalue) == (
            b.k_index, b.k_x, b.epsilon, b.eigenvalue
        )


def test_extra_points_empty_for_real_spectra(pipe):
    for args in [(+1, +1, 0.9, 6), (-1, +1, 0.9, 7)]:
        assert pipe(*args).scl.extra_points == ()


def test_deterministic_eigenvalue_order(pipe):
    pt = pipe(-1, +1, 0.9, 6)
    for blk in pt.spectra.blocks:
        mags = np.abs(blk.eigenvalues)
        assert (np.diff(mags) <= 1e-12 * max(mags.max(), 1)).all()
