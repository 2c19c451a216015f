"""Shared orchestration: one parameter point through blocks, spectra, SCL, gaps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .model import ModelParams
from .spectra import (
    DEFAULT_DEG_TOL,
    DEFAULT_REAL_TOL,
    GroundSet,
    SclResult,
    SpectrumSet,
    compute_spectrum_set,
    gap_gamma,
    identify_ground_set,
    scl_minima,
)
from .transfer import build_transfer


@dataclass(frozen=True)
class Tolerances:
    deg_tol: float = DEFAULT_DEG_TOL
    real_tol: float = DEFAULT_REAL_TOL


@dataclass(frozen=True)
class PipelinePoint:
    """Everything derived from one (params, L_y) pair."""

    params: ModelParams
    ly: int
    spectra: SpectrumSet
    ground: GroundSet
    scl: SclResult
    gaps: list

    @property
    def n_cols(self) -> int:
        return self.spectra.n_cols


def run_point(
    params: ModelParams,
    ly: int,
    tolerances: Tolerances = Tolerances(),
    jobs: int = 1,
) -> PipelinePoint:
    op = build_transfer(params, ly)
    spectra = compute_spectrum_set(op, jobs=jobs)
    ground = identify_ground_set(spectra, tol=tolerances.deg_tol)
    scl = scl_minima(spectra, ground, real_tol=tolerances.real_tol)
    gaps = gap_gamma(spectra, ground, real_tol=tolerances.real_tol)
    return PipelinePoint(params=params, ly=ly, spectra=spectra, ground=ground,
                         scl=scl, gaps=gaps)


def parallel_map(fn, items, jobs: int = 1) -> list:
    """Order-preserving map; results are reduced deterministically by position."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))
