"""Block diagonalization and correlation-length extraction.

The blocks are real matrices written in a complex basis, so their
eigenvalue multisets are closed under conjugation; for the models in scope
they are real to numerical precision, but imaginary residues are carried
through and reported rather than dropped.

All logarithmic quantities are normalized per lattice column: with an
``n_cols``-column operator the decay rate of an eigenvalue ``lam`` is
``-log(|lam|**(1/n_cols) / lam0**(1/n_cols))``.  The same per-column measure
defines the ground-degeneracy window, which makes every derived quantity
identical between the one-column and squared two-column operators.

An entirely absent branch value (no eigenvalue of the requested sign class,
e.g. every non-leading eigenvalue vanishing at w=1) is represented by
``epsilon=None`` with a zero source eigenvalue, never by a large float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, NumericalFailureError
from .momentum import BlockMatrix, assemble_all_blocks
from .transfer import TransferOperator

DEFAULT_DEG_TOL = 1e-6
DEFAULT_REAL_TOL = 1e-9

BRANCH_ZERO = 0.0
BRANCH_PI = math.pi


@dataclass(frozen=True)
class BlockSpectrum:
    """Eigenvalues of one momentum block, sorted by descending magnitude."""

    ly: int
    k_index: int
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def k(self) -> float:
        return 2.0 * math.pi * self.k_index / self.ly


@dataclass(frozen=True)
class SpectrumSet:
    """All momentum blocks of one operator, plus the column multiplicity."""

    ly: int
    n_cols: int
    blocks: tuple[BlockSpectrum, ...]

    def block(self, k_index: int) -> BlockSpectrum:
        return self.blocks[k_index % self.ly]

    @property
    def max_imag_residue(self) -> float:
        scale = max(np.abs(b.eigenvalues).max() for b in self.blocks)
        worst = max(np.abs(b.eigenvalues.imag).max() for b in self.blocks)
        return float(worst / scale) if scale > 0 else 0.0


@dataclass(frozen=True)
class GroundSet:
    """Leading eigenvalue(s): the largest magnitude and everything in its window."""

    value: float                      # lambda0, largest |eigenvalue| over all sectors
    tol: float                        # relative degeneracy window (per-column measure)
    members: tuple[tuple[int, int], ...]   # (k_index, rank within sorted block)
    member_values: tuple[complex, ...]
    n_cols: int = 1

    @property
    def per_column_value(self) -> float:
        return self.value ** (1.0 / self.n_cols)


@dataclass(frozen=True)
class SclPoint:
    """One correlation-length minimum: momentum, branch phase, decay rate."""

    k_index: int
    k_y: float
    k_x: float
    epsilon: float | None
    eigenvalue: complex
    is_ground: bool = False


@dataclass(frozen=True)
class SclResult:
    ly: int
    n_cols: int
    branches: tuple[float, ...]
    unavailable_branches: tuple[float, ...]
    points: tuple[SclPoint, ...]
    ground_points: tuple[SclPoint, ...]
    extra_points: tuple[SclPoint, ...] = ()

    def branch_points(self, k_x: float) -> list[SclPoint]:
        return [p for p in self.points if p.k_x == k_x]

    def epsilon(self, k_x: float, k_index: int) -> float | None:
        for p in self.points:
            if p.k_x == k_x and p.k_index == k_index % self.ly:
                return p.epsilon
        raise InvalidParameterError(
            f"branch-unavailable: no branch k_x={k_x} point at momentum index {k_index}"
        )


@dataclass(frozen=True)
class GapPoint:
    k_x: float
    k_index: int
    k_y: float
    gamma: float | None


def diagonalize_block(block: BlockMatrix) -> BlockSpectrum:
    """Full non-Hermitian eigenvalue list of one block, deterministically sorted."""
    if not np.all(np.isfinite(block.matrix)):
        raise NumericalFailureError(
            f"numerical-failure: block k_index={block.k_index} has non-finite entries"
        )
    try:
        ev = np.linalg.eigvals(block.matrix) if block.matrix.size else np.zeros(0, complex)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(
            f"numerical-failure: eigensolver failed on block k_index={block.k_index}: {exc}"
        ) from exc
    order = np.lexsort((-ev.imag, -ev.real, -np.abs(ev)))
    return BlockSpectrum(ly=block.ly, k_index=block.k_index, eigenvalues=ev[order])


def compute_spectrum_set(op: TransferOperator, jobs: int = 1) -> SpectrumSet:
    """Assemble and diagonalize every momentum block of the operator."""
    blocks = assemble_all_blocks(op)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            spectra = list(pool.map(diagonalize_block, blocks))
    else:
        spectra = [diagonalize_block(b) for b in blocks]
    spectra.sort(key=lambda s: s.k_index)
    return SpectrumSet(ly=op.ly, n_cols=op.n_cols, blocks=tuple(spectra))


def identify_ground_set(spectra: SpectrumSet, tol: float = DEFAULT_DEG_TOL) -> GroundSet:
    """Largest-magnitude eigenvalue and all eigenvalues inside its window.

    Membership is judged on the per-column magnitude ``|lam|**(1/n_cols)``
    within relative ``tol``; ranks refer to the sorted block spectra.
    """
    if not spectra.blocks:
        raise InvalidParameterError("invalid-parameter: no block spectra supplied")
    lam0 = max(float(np.abs(b.eigenvalues).max()) if b.eigenvalues.size else 0.0
               for b in spectra.blocks)
    if lam0 <= 0.0:
        raise NumericalFailureError("numerical-failure: all transfer eigenvalues vanish")
    inv = 1.0 / spectra.n_cols
    mu0 = lam0 ** inv
    members = []
    values = []
    for blk in spectra.blocks:
        for rank, lam in enumerate(blk.eigenvalues):
            if np.abs(lam) ** inv >= mu0 * (1.0 - tol):
                members.append((blk.k_index, rank))
                values.append(complex(lam))
    return GroundSet(
        value=lam0, tol=tol, members=tuple(members), member_values=tuple(values),
        n_cols=spectra.n_cols,
    )


def _per_column_eps(mag: float, ground: GroundSet) -> float:
    return -math.log(mag ** (1.0 / ground.n_cols) / ground.per_column_value)


def scl_minima(
    spectra: SpectrumSet,
    ground: GroundSet,
    real_tol: float = DEFAULT_REAL_TOL,
) -> SclResult:
    """Per-momentum correlation-length minima on the k_x = 0 and pi branches.

    Branch 0 takes the largest real positive non-ground eigenvalue, branch
    pi the largest-magnitude real negative one; the branch phase is read off
    the eigenvalue sign.  Eigenvalues whose imaginary part exceeds the
    realness threshold are never forced into a branch: if such an eigenvalue
    dominates a sector it is reported separately with its full phase.  For a
    two-column operator the spectrum is a set of squares, so the pi branch
    is structurally unavailable and omitted.
    """
    lam0 = ground.value
    member_set = set(ground.members)
    branches = (BRANCH_ZERO,) if spectra.n_cols == 2 else (BRANCH_ZERO, BRANCH_PI)
    unavailable = (BRANCH_PI,) if spectra.n_cols == 2 else ()
    points = []
    ground_points = []
    extra = []
    for blk in spectra.blocks:
        k_y = blk.k
        best = {BRANCH_ZERO: None, BRANCH_PI: None}
        best_complex = None
        for rank, lam in enumerate(blk.eigenvalues):
            if (blk.k_index, rank) in member_set:
                k_x = BRANCH_ZERO if lam.real >= 0 else BRANCH_PI
                ground_points.append(SclPoint(
                    k_index=blk.k_index, k_y=k_y, k_x=k_x,
                    epsilon=_per_column_eps(abs(lam), ground),
                    eigenvalue=complex(lam), is_ground=True,
                ))
                continue
            if abs(lam.imag) <= real_tol * lam0:
                branch = BRANCH_ZERO if lam.real > real_tol * lam0 else (
                    BRANCH_PI if lam.real < -real_tol * lam0 else None
                )
                if branch is not None and branch in branches:
                    cur = best[branch]
                    if cur is None or abs(lam) > abs(cur):
                        best[branch] = complex(lam)
            else:
                if best_complex is None or abs(lam) > abs(best_complex):
                    best_complex = complex(lam)
        for branch in branches:
            lam = best[branch]
            if lam is None:
                points.append(SclPoint(
                    k_index=blk.k_index, k_y=k_y, k_x=branch,
                    epsilon=None, eigenvalue=0j,
                ))
            else:
                points.append(SclPoint(
                    k_index=blk.k_index, k_y=k_y, k_x=branch,
                    epsilon=_per_column_eps(abs(lam), ground),
                    eigenvalue=lam,
                ))
        if best_complex is not None:
            beats = all(
                best[b] is None or abs(best_complex) > abs(best[b]) for b in branches
            )
            if beats:
                extra.append(SclPoint(
                    k_index=blk.k_index, k_y=k_y,
                    k_x=float(np.angle(best_complex)),
                    epsilon=_per_column_eps(abs(best_complex), ground),
                    eigenvalue=best_complex,
                ))
    return SclResult(
        ly=spectra.ly, n_cols=spectra.n_cols, branches=branches,
        unavailable_branches=unavailable,
        points=tuple(points), ground_points=tuple(ground_points),
        extra_points=tuple(extra),
    )


def gap_gamma(
    spectra: SpectrumSet,
    ground: GroundSet,
    real_tol: float = DEFAULT_REAL_TOL,
) -> list[GapPoint]:
    """Gap function over all (k_x, k_y) sectors.

    In the (0, 0) sector the subleading eigenvalue is used, so the
    near-degeneracy of the leading pair is measured explicitly; every other
    sector uses its leading eigenvalue.  No ground exclusion is applied.
    """
    lam0 = ground.value
    out = []
    for blk in spectra.blocks:
        re = blk.eigenvalues.real
        is_real = np.abs(blk.eigenvalues.imag) <= real_tol * lam0
        pos = np.sort(re[is_real & (re > real_tol * lam0)])[::-1]
        neg = np.sort(re[is_real & (re < -real_tol * lam0)])
        if blk.k_index == 0:
            lam = pos[1] if len(pos) > 1 else None
        else:
            lam = pos[0] if len(pos) else None
        out.append(GapPoint(
            k_x=BRANCH_ZERO, k_index=blk.k_index, k_y=blk.k,
            gamma=None if lam is None else _per_column_eps(abs(lam), ground),
        ))
        if spectra.n_cols == 1:
            lam = neg[0] if len(neg) else None
            out.append(GapPoint(
                k_x=BRANCH_PI, k_index=blk.k_index, k_y=blk.k,
                gamma=None if lam is None else _per_column_eps(abs(lam), ground),
            ))
    return out
