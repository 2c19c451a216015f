"""Shared fixtures: cached pipeline runs keyed by effective model parameters.

The pipeline consumes only the effective sign pair (the m-sector probe swaps
the signs before anything numerical happens), so runs are cached on the
effective parameters and shared between unit and acceptance tests.
"""

import functools

import pytest

from setscope import ModelParams, Tolerances, run_point
from setscope.spectra import DEFAULT_DEG_TOL, DEFAULT_REAL_TOL


@functools.lru_cache(maxsize=None)
def _cached_point(eff_km, eff_ke, w, ly, deg_tol, real_tol):
    params = ModelParams(eff_km, eff_ke, w, "e")
    return run_point(params, ly, tolerances=Tolerances(deg_tol, real_tol), jobs=2)


@pytest.fixture(scope="session")
def pipe():
    """pipe(km, ke, w, ly, detect='e', ...) -> cached PipelinePoint."""

    def run(km, ke, w, ly, detect="e", deg_tol=DEFAULT_DEG_TOL, real_tol=DEFAULT_REAL_TOL):
        params = ModelParams(km, ke, w, detect)
        return _cached_point(
            params.effective_sign_km, params.effective_sign_ke, w, ly, deg_tol, real_tol
        )

    return run


def eps_curve(point, branch):
    """Map momentum index -> epsilon (None for absent) on one branch."""
    return {p.k_index: p.epsilon for p in point.scl.branch_points(branch)}
