"""Brute-force ground truth, independent of the production contraction code.

Everything here is evaluated straight from the tensor definitions: explicit
wavefunction amplitudes on small tori (kept exact as an integer sign times a
power of w), stabilizer eigenvalue checks, and the *unreduced* one-column
transfer operator on the full ``4**L_y`` bra-ket space assembled by summing
over physical spin configurations.  None of it reuses the ring-sweep engine
of :mod:`setscope.transfer` or the momentum machinery, so agreement between
the two paths is meaningful evidence.

Geometry: dual vertices (x, y) on an ``L_x x L_y`` torus; the horizontal
bond at (x, y) joins (x, y)-(x+1, y) and the vertical bond joins
(x, y)-(x, y+1), both periodic.  Physical spins sit on the bonds, indexed
horizontals first::

    h(x, y) -> y*L_x + x          v(x, y) -> L_x*L_y + y*L_x + x

Plaquette (sigma^z) operators act on the four bonds incident to a dual
vertex; star (sigma^x) operators flip the four bonds around a dual
plaquette.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, VerificationError
from .model import ModelParams

MAX_BRUTE_SPINS = 20
MAX_BRUTE_LY = 6


@dataclass(frozen=True)
class Amplitude:
    """Exact amplitude ``sign * w**w_power``; ``sign == 0`` marks a zero."""

    sign: int
    w_power: int

    def value(self, w: float) -> float:
        return float(self.sign) * w ** self.w_power

    @property
    def is_zero(self) -> bool:
        return self.sign == 0


@dataclass(frozen=True)
class TorusGeometry:
    lx: int
    ly: int

    @property
    def n_spins(self) -> int:
        return 2 * self.lx * self.ly

    def h_index(self, x: int, y: int) -> int:
        return (y % self.ly) * self.lx + (x % self.lx)

    def v_index(self, x: int, y: int) -> int:
        return self.lx * self.ly + (y % self.ly) * self.lx + (x % self.lx)

    def vertex_spins(self, x: int, y: int) -> list[int]:
        """Bonds incident to dual vertex (x, y): support of one plaquette operator."""
        return [
            self.h_index(x - 1, y),
            self.h_index(x, y),
            self.v_index(x, y),
            self.v_index(x, y - 1),
        ]

    def plaquette_spins(self, x: int, y: int) -> list[int]:
        """Bonds around the dual plaquette with lower-left corner (x, y): one star."""
        return [
            self.h_index(x, y),
            self.h_index(x, y + 1),
            self.v_index(x, y),
            self.v_index(x + 1, y),
        ]


def bond_sign_pattern(sign_ke: int, geom: TorusGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Bond signs (vertical_by_column, horizontal) used by the amplitude oracle.

    Re-derived here rather than imported so a corrupted production tensor
    cannot silently corrupt the reference values as well.  For negative
    sign_ke the vertical bonds of even columns carry -1, which needs an even
    number of columns to close around the torus.
    """
    horizontal = np.ones((geom.lx, geom.ly), dtype=np.int64)
    vertical = np.ones((geom.lx, geom.ly), dtype=np.int64)
    if sign_ke == -1:
        if geom.lx % 2 != 0:
            raise InvalidParameterError(
                f"incompatible-extent: sign_ke=-1 needs an even number of columns, got {geom.lx}"
            )
        vertical[0::2, :] = -1
    return vertical, horizontal


def amplitude(params: ModelParams, config: int, lx: int, ly: int) -> Amplitude:
    """Exact amplitude of one spin configuration on the L_x x L_y torus.

    ``config`` packs the spins bitwise with the indexing of
    :class:`TorusGeometry` (bit = 1 means spin down).
    """
    geom = TorusGeometry(lx, ly)
    km = params.effective_sign_km
    ke = params.effective_sign_ke
    parity = 0 if km == +1 else 1
    vert_a, horiz_a = bond_sign_pattern(ke, geom)

    spin = [(config >> i) & 1 for i in range(geom.n_spins)]
    # Site tensors: the four incident spins must sum to the requested parity.
    for x in range(lx):
        for y in range(ly):
            if sum(spin[i] for i in geom.vertex_spins(x, y)) % 2 != parity:
                return Amplitude(sign=0, w_power=0)
    # Bond tensors: every spin-up bond contributes a factor a*w.
    sign = 1
    w_power = 0
    for x in range(lx):
        for y in range(ly):
            if spin[geom.h_index(x, y)] == 0:
                sign *= int(horiz_a[x, y])
                w_power += 1
            if spin[geom.v_index(x, y)] == 0:
                sign *= int(vert_a[x, y])
                w_power += 1
    return Amplitude(sign=sign, w_power=w_power)


def brute_wavefunction(params: ModelParams, lx: int, ly: int) -> dict[int, Amplitude]:
    """All nonzero amplitudes on a small torus, by full enumeration."""
    geom = TorusGeometry(lx, ly)
    if geom.n_spins > MAX_BRUTE_SPINS:
        raise InvalidParameterError(
            f"oracle size cap: {lx}x{ly} torus has {geom.n_spins} spins > {MAX_BRUTE_SPINS}"
        )
    table = {}
    for config in range(1 << geom.n_spins):
        amp = amplitude(params, config, lx, ly)
        if not amp.is_zero:
            table[config] = amp
    return table


def sample_support_configs(
    params: ModelParams, lx: int, ly: int, count: int, seed: int = 2024
) -> list[int]:
    """Deterministic sample of configurations with nonzero amplitude.

    Horizontal spins are drawn at random and patched so every column's
    parity chain closes; vertical spins then follow recursively from the
    site-tensor parity rule.  Solvability on the torus requires
    ``L_x*L_y`` even when the odd-parity tensor is selected.
    """
    km = params.effective_sign_km
    parity = 0 if km == +1 else 1
    if parity == 1 and (lx * ly) % 2 != 0:
        raise InvalidParameterError(
            f"incompatible-extent: odd-parity tensors admit no configuration on a {lx}x{ly} torus"
        )
    geom = TorusGeometry(lx, ly)
    rng = np.random.default_rng(seed)
    configs = []
    for _ in range(count):
        h = rng.integers(0, 2, size=(lx, ly))
        # column parity chain: H(x) = H(x-1) + ly*parity (mod 2)
        target = int(h[0].sum() % 2)
        for x in range(1, lx):
            target = (target + ly * parity) % 2
            if h[x].sum() % 2 != target:
                h[x, 0] ^= 1
        v = np.zeros((lx, ly), dtype=np.int64)
        for x in range(lx):
            v[x, 0] = rng.integers(0, 2)
            for y in range(1, ly):
                # parity rule at vertex (x, y): h(x-1,y)+h(x,y)+v(x,y)+v(x,y-1) = parity
                v[x, y] = (parity + h[(x - 1) % lx, y] + h[x, y] + v[x, y - 1]) % 2
        config = 0
        for x in range(lx):
            for y in range(ly):
                config |= int(h[x, y]) << geom.h_index(x, y)
                config |= int(v[x, y]) << geom.v_index(x, y)
        amp = amplitude(params, config, lx, ly)
        if amp.is_zero:
            raise VerificationError(
                f"support sampler produced a zero-amplitude configuration on {lx}x{ly}"
            )
        configs.append(config)
    return configs


def check_stabilizers(
    params: ModelParams, lx: int, ly: int, configs=None
) -> list[str]:
    """Exact star/plaquette eigenvalue checks at w=1; returns violation messages.

    For every configuration tested: the plaquette operator at each dual
    vertex must evaluate to sign_km on the support, and flipping the four
    spins of each star must multiply the amplitude sign by sign_ke.
    ``configs=None`` enumerates the whole space (only sensible on tiny tori).
    """
    geom = TorusGeometry(lx, ly)
    km = params.effective_sign_km
    ke = params.effective_sign_ke
    if configs is None:
        if geom.n_spins > MAX_BRUTE_SPINS:
            raise InvalidParameterError(
                f"oracle size cap: exhaustive check needs <= {MAX_BRUTE_SPINS} spins"
            )
        configs = range(1 << geom.n_spins)
    violations = []
    for config in configs:
        amp = amplitude(params, config, lx, ly)
        for x in range(lx):
            for y in range(ly):
                if not amp.is_zero:
                    n_down = sum((config >> i) & 1 for i in geom.vertex_spins(x, y))
                    if (-1) ** n_down != km:
                        violations.append(
                            f"plaquette ({x},{y}) config {config:#x}: "
                            f"eigenvalue {(-1) ** n_down} != {km}"
                        )
                flipped = config
                for i in geom.plaquette_spins(x, y):
                    flipped ^= 1 << i
                amp_f = amplitude(params, flipped, lx, ly)
                if amp_f.sign != ke * amp.sign:
                    violations.append(
                        f"star ({x},{y}) config {config:#x}: "
                        f"flip sign {amp_f.sign} != {ke} * {amp.sign}"
                    )
    return violations


def unreduced_transfer(params: ModelParams, ly: int) -> np.ndarray:
    """One-column bra-ket transfer operator on the full 4**L_y space.

    Assembled by summing over the physical spins owned by one column (its
    L_y vertical bonds and the L_y horizontal bonds on its right): each
    physical configuration contributes the product of bra and ket layer
    amplitudes.  No label-coincidence reduction is imposed; whatever support
    structure the result has emerges from the tensor definitions.
    """
    if ly > MAX_BRUTE_LY:
        raise InvalidParameterError(f"oracle size cap: L_y={ly} > {MAX_BRUTE_LY}")
    km = params.effective_sign_km
    parity = 0 if km == +1 else 1
    w2 = params.w ** 2
    dim = 1 << ly
    bits = ((np.arange(dim)[:, None] >> np.arange(ly)[None, :]) & 1).astype(np.int8)
    weights = np.where(bits == 0, w2, 1.0).prod(axis=1)  # product of double-layer g factors

    full = np.zeros((dim * dim, dim * dim))
    for sh in range(dim):
        b_row = sh * dim + sh  # both layers emit the physical horizontal spins
        for sv in range(dim):
            sv_bits = bits[sv]
            needed = (parity + bits[sh] + sv_bits + np.roll(sv_bits, 1)) % 2
            layer = (bits == needed).all(axis=1).astype(float)  # site tensors of one layer
            contrib = np.outer(layer, layer).ravel()
            full[b_row] += weights[sh] * weights[sv] * contrib
    return full


def coincident_restriction(full: np.ndarray, ly: int) -> np.ndarray:
    """Restrict the unreduced operator to coincident bra/ket labels.

    Raises if any weight lives outside that subspace; the reduction is only
    sound because the support turns out to be confined there.
    """
    dim = 1 << ly
    diag = np.arange(dim) * dim + np.arange(dim)
    mask = np.zeros(dim * dim, dtype=bool)
    mask[diag] = True
    off_rows = np.abs(full[~mask, :]).max() if (~mask).any() else 0.0
    off_cols = np.abs(full[:, ~mask]).max() if (~mask).any() else 0.0
    if max(off_rows, off_cols) != 0.0:
        raise VerificationError(
            "unreduced transfer operator has weight outside the coincident-label subspace"
        )
    return full[np.ix_(diag, diag)]


def brute_transfer_spectrum(params: ModelParams, ly: int) -> np.ndarray:
    """Nonzero-part spectrum of the unreduced column operator.

    The ``4**L_y`` embedding only adds exact zeros (verified), so the
    returned array is the eigenvalue multiset of the coincident-label
    restriction; for sign_ke=-1 the operator is the product of the two
    adjacent columns of the doubled unit cell.
    """
    full = unreduced_transfer(params, ly)
    reduced = coincident_restriction(full, ly)
    if params.effective_sign_ke == -1:
        reduced = reduced @ reduced
    return np.sort_complex(np.linalg.eigvals(reduced))
