"""Translation-orbit enumeration and momentum block assembly for the ring.

Ring configurations are packed into integers with site ``y`` at bit ``y``;
the one-site translation moves site ``y`` to ``y + 1``.  Orbits under the
cyclic shift are labelled by their canonical representative (the smallest
integer among all rotations) and their period ``R`` (the smallest positive
shift fixing the configuration, always a divisor of L_y).

For momentum index ``m`` (``k = 2*pi*m/L_y``) a class enters the basis
exactly when ``m*R`` is divisible by L_y -- checked in integer arithmetic,
never with floating-point momenta.  The basis state built on representative
``r`` is the phased sum over all L_y shifts with normalization
``N = L_y**2 / R``, so each compatible class contributes one unit vector.

Matrix elements are accumulated by applying the transfer operator to each
representative once and binning every image configuration into its class
with phase ``exp(-i*k*l)`` (``l`` shifts the image onto its representative)
and weight ``sqrt(R_col/R_row)``; a single application serves all momenta.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParameterError
from .transfer import TransferOperator

_ASSEMBLY_CHUNK = 64


@dataclass(frozen=True)
class OrbitClass:
    """One translation orbit: canonical representative and period (= orbit size)."""

    representative: int
    period: int


@dataclass(frozen=True)
class MomentumBasis:
    """Ordered compatible classes for one momentum sector."""

    ly: int
    k_index: int
    classes: tuple[OrbitClass, ...]

    @property
    def k(self) -> float:
        return 2.0 * np.pi * self.k_index / self.ly

    @property
    def dim(self) -> int:
        return len(self.classes)

    def normalization(self, cls: OrbitClass) -> float:
        return self.ly ** 2 / cls.period


@dataclass(frozen=True)
class BlockMatrix:
    ly: int
    k_index: int
    matrix: np.ndarray

    @property
    def k(self) -> float:
        return 2.0 * np.pi * self.k_index / self.ly


def cyclic_shift(config: int, ly: int, steps: int = 1) -> int:
    """Translate a ring configuration by ``steps`` sites."""
    steps %= ly
    mask = (1 << ly) - 1
    return ((config << steps) & mask) | (config >> (ly - steps))


@dataclass(frozen=True)
class _OrbitTable:
    reps: np.ndarray        # sorted canonical representatives, one per class
    class_index: np.ndarray  # config -> class position in reps
    shift: np.ndarray       # config -> smallest l with shift^l(config) = canonical
    period: np.ndarray      # per class


@lru_cache(maxsize=32)
def _orbit_table(ly: int) -> _OrbitTable:
    if ly < 1:
        raise InvalidParameterError(f"invalid-parameter: L_y must be >= 1, got {ly}")
    n = 1 << ly
    confs = np.arange(n, dtype=np.int64)
    rotations = np.empty((ly, n), dtype=np.int64)
    current = confs.copy()
    for l in range(ly):
        rotations[l] = current
        mask = n - 1
        current = ((current << 1) & mask) | (current >> (ly - 1))
    canonical = rotations.min(axis=0)
    shift = rotations.argmin(axis=0).astype(np.int64)
    period_of = np.full(n, ly, dtype=np.int64)
    for l in range(ly - 1, 0, -1):
        period_of[rotations[l] == confs] = l
    reps = np.unique(canonical)
    class_index = np.searchsorted(reps, canonical)
    return _OrbitTable(reps, class_index, shift, period_of[reps])


def enumerate_orbits(ly: int) -> list[OrbitClass]:
    """All translation orbits of the 2**L_y ring configurations."""
    table = _orbit_table(ly)
    return [OrbitClass(int(r), int(p)) for r, p in zip(table.reps, table.period)]


def momentum_compatible(period: int, k_index: int, ly: int) -> bool:
    """True when momentum 2*pi*k_index/L_y is supported on an orbit of this period."""
    return (k_index * period) % ly == 0


def k_index_from_value(ly: int, k: float) -> int:
    """Map a momentum value onto the 2*pi/L_y grid, rejecting off-grid input."""
    m = k * ly / (2.0 * np.pi)
    m_int = int(round(m))
    if abs(m - m_int) > 1e-12:
        raise InvalidParameterError(f"invalid-momentum: {k!r} is not on the 2*pi/{ly} grid")
    return m_int % ly


def build_momentum_basis(ly: int, k_index: int) -> MomentumBasis:
    """Compatible classes for one momentum index, in canonical-representative order."""
    if not 0 <= k_index < ly:
        raise InvalidParameterError(
            f"invalid-momentum: index {k_index} outside 0..{ly - 1}"
        )
    classes = tuple(
        cls for cls in enumerate_orbits(ly) if momentum_compatible(cls.period, k_index, ly)
    )
    return MomentumBasis(ly=ly, k_index=k_index, classes=classes)


def basis_vector(ly: int, k_index: int, representative: int) -> np.ndarray:
    """Dense momentum basis state built on one representative (for verification)."""
    table = _orbit_table(ly)
    period = int(table.period[table.class_index[representative]])
    if not momentum_compatible(period, k_index, ly):
        raise InvalidParameterError(
            f"invalid-momentum: orbit of period {period} incompatible with index {k_index}"
        )
    norm = ly ** 2 / period
    vec = np.zeros(1 << ly, dtype=complex)
    k = 2.0 * np.pi * k_index / ly
    for r in range(ly):
        vec[cyclic_shift(representative, ly, r)] += np.exp(-1j * k * r)
    return vec / np.sqrt(norm)


def _assemble(op: TransferOperator, k_indices: list[int]) -> list[BlockMatrix]:
    ly = op.ly
    table = _orbit_table(ly)
    n_classes = len(table.reps)
    sqrt_period = np.sqrt(table.period.astype(float))
    compat = {k: (k * table.period) % ly == 0 for k in k_indices}
    local = {}
    for k in k_indices:
        loc = -np.ones(n_classes, dtype=np.int64)
        loc[np.where(compat[k])[0]] = np.arange(int(compat[k].sum()))
        local[k] = loc
    phases = {
        k: np.exp(-2j * np.pi * k * np.arange(ly) / ly) for k in k_indices
    }
    blocks = {k: np.zeros((int(compat[k].sum()),) * 2, dtype=complex) for k in k_indices}

    reps = table.reps
    for start in range(0, n_classes, _ASSEMBLY_CHUNK):
        chunk = reps[start:start + _ASSEMBLY_CHUNK]
        basis_cols = np.zeros((op.dim, len(chunk)))
        basis_cols[chunk, np.arange(len(chunk))] = 1.0
        images = op.apply_batch(basis_cols)
        for j, col_class in enumerate(range(start, start + len(chunk))):
            image = images[:, j]
            nz = np.nonzero(image)[0]
            img_class = table.class_index[nz]
            img_shift = table.shift[nz]
            img_val = image[nz]
            for k in k_indices:
                if not compat[k][col_class]:
                    continue
                keep = compat[k][img_class]
                rows = local[k][img_class[keep]]
                coeff = (
                    img_val[keep]
                    * phases[k][img_shift[keep]]
                    * (sqrt_period[col_class] / sqrt_period[img_class[keep]])
                )
                dim_k = blocks[k].shape[0]
                col = np.bincount(rows, weights=coeff.real, minlength=dim_k) + 1j * np.bincount(
                    rows, weights=coeff.imag, minlength=dim_k
                )
                blocks[k][:, local[k][col_class]] = col
    return [BlockMatrix(ly=ly, k_index=k, matrix=blocks[k]) for k in k_indices]


def assemble_block(op: TransferOperator, basis: MomentumBasis) -> BlockMatrix:
    """Exact momentum block of the transfer operator in the given basis."""
    if basis.ly != op.ly:
        raise InvalidParameterError(
            f"invalid-parameter: basis L_y={basis.ly} does not match operator L_y={op.ly}"
        )
    return _assemble(op, [basis.k_index])[0]


def assemble_all_blocks(op: TransferOperator) -> list[BlockMatrix]:
    """All L_y momentum blocks, sharing one operator application per orbit."""
    return _assemble(op, list(range(op.ly)))
