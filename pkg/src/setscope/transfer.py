"""Cylinder transfer operator on the reduced 2**L_y ring space.

Multiplying bra and ket layers of the state collapses every bond to
coincident labels (the bond tensors are diagonal), so one column of the
cylinder acts on ring configurations of ``L_y`` binary labels.  A column
owns one site tensor per ring position, the L_y vertical double bonds of
that column and the horizontal double bonds on its right, so every physical
spin is counted exactly once and columns compose by plain operator
products.

The double-layer bond weights are ``(a*w)**2 = w**2`` for label 0 and 1 for
label 1: the bond-sign pattern drops out of the double layer entirely.  The
only trace the sign_ke=-1 construction leaves is the doubled unit cell, so
its transfer operator is the product of two identical adjacent columns and
every eigenvalue is a square.

Applications are matrix free: a sequential tensor sweep around the ring
with intermediate bond dimension 2, cost O(L_y * 2**L_y) per column.  Dense
materialization is available below a capacity cap for oracle comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import CapacityError, InvalidParameterError
from .model import BondTensor, ModelParams

DEFAULT_DENSE_CAP = 10


@dataclass(frozen=True)
class DoubleBond:
    """Diagonal weights of a bra-ket-contracted bond: d0 for label 0, d1 for label 1."""

    d0: float
    d1: float


def build_double_bond(bond: BondTensor) -> DoubleBond:
    """Bra-ket contraction of a bond tensor: diagonal weights per label."""
    return DoubleBond(d0=float(bond.array[0, 0, 0] ** 2), d1=float(bond.array[1, 1, 1] ** 2))


class TransferOperator:
    """One ring of the cylinder contraction (two adjacent rings for sign_ke=-1).

    Immutable after construction; :meth:`apply` is pure and re-entrant, so
    concurrent applications on distinct vectors are safe.
    """

    def __init__(self, params: ModelParams, ly: int, dense_cap: int = DEFAULT_DENSE_CAP):
        if ly < 2:
            raise InvalidParameterError(f"invalid-parameter: L_y must be >= 2, got {ly}")
        self.params = params
        self.ly = int(ly)
        self.dim = 1 << self.ly
        self.n_cols = 2 if params.effective_sign_ke == -1 else 1
        self.dense_cap = int(dense_cap)

        site = model.build_site_tensor(params.effective_sign_km)
        self.parity = site.parity
        bond = model.build_bond_tensor(+1, params.w)
        dbl = build_double_bond(bond)
        self.vertical_bond = dbl
        self.horizontal_bond = dbl
        dv = np.array([dbl.d0, dbl.d1])
        dh = np.array([dbl.d0, dbl.d1])
        # ring MPO tensor W[next_bond, prev_bond, out, in]; the site tensor is
        # permutation symmetric, the vertical weight rides on the next-bond leg
        self._w = site.array.astype(float) * dv[:, None, None, None] * dh[None, None, :, None]

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Matrix-free product: the full operator (all owned columns) times a ring vector."""
        vector = np.asarray(vector)
        if vector.shape != (self.dim,):
            raise InvalidParameterError(
                f"invalid-parameter: vector has shape {vector.shape}, expected ({self.dim},)"
            )
        out = vector.reshape(self.dim, 1)
        for _ in range(self.n_cols):
            out = self._sweep(out)
        return out[:, 0]

    def apply_batch(self, vectors: np.ndarray) -> np.ndarray:
        """Apply to a (dim, n) stack of ring vectors at once."""
        vectors = np.asarray(vectors)
        if vectors.ndim != 2 or vectors.shape[0] != self.dim:
            raise InvalidParameterError(
                f"invalid-parameter: batch has shape {vectors.shape}, expected ({self.dim}, n)"
            )
        out = vectors
        for _ in range(self.n_cols):
            out = self._sweep(out)
        return out

    def _sweep(self, vectors: np.ndarray) -> np.ndarray:
        """Contract one column around the ring, site by site.

        The running tensor keeps the ring's two open vertical legs (the
        current bond and the starting bond) plus already-produced outputs
        and not-yet-consumed inputs; the trace over the starting bond closes
        the ring at the end.
        """
        ly, dim = self.ly, self.dim
        n = vectors.shape[1]
        w = self._w if not np.iscomplexobj(vectors) else self._w.astype(complex)
        # state[next, start, outputs..., inputs..., batch]
        state = np.tensordot(w, vectors.reshape((2,) * ly + (n,)), axes=([3], [0]))
        for step in range(1, ly):
            tail = (dim >> (step + 1)) * n
            state = state.reshape(2, 2, 1 << step, 2, tail)
            state = np.tensordot(w, state, axes=([1, 3], [0, 3]))
            state = state.transpose(0, 2, 3, 1, 4)  # [next, start, outputs, new output, tail]
        state = state.reshape(2, 2, dim, n)
        return state[0, 0] + state[1, 1]

    def single_column_dense(self) -> np.ndarray:
        """Dense matrix of one column (capacity capped)."""
        if self.ly > self.dense_cap:
            raise CapacityError(
                f"capacity: dense build at L_y={self.ly} exceeds cap {self.dense_cap}; "
                f"use matrix-free application"
            )
        return self._sweep(np.eye(self.dim))

    def dense(self) -> np.ndarray:
        """Dense matrix of the full operator (all owned columns)."""
        column = self.single_column_dense()
        out = column
        for _ in range(self.n_cols - 1):
            out = out @ column
        return out


def build_transfer(params: ModelParams, ly: int, dense_cap: int = DEFAULT_DENSE_CAP) -> TransferOperator:
    """Construct the cylinder transfer operator for one parameter point."""
    return TransferOperator(params, ly, dense_cap=dense_cap)


def apply_transfer(op: TransferOperator, vector: np.ndarray) -> np.ndarray:
    """Operator-vector product on the ring space (matrix free)."""
    return op.apply(vector)
