"""Exact bond-dimension-2 PEPS tensors for the four toric-code variants.

Conventions used throughout the package:

* The wavefunction lives on the square lattice whose *dual* carries the
  tensors: a rank-4 site tensor at every dual vertex and a rank-3 bond
  tensor on every dual bond.  Physical spins sit on the dual bonds.
* Virtual and physical labels take values 0 and 1, with 0 meaning spin up.
* ``sign_km`` selects the parity of the site tensor (the plaquette-operator
  eigenvalue), ``sign_ke`` the star-operator eigenvalue realized through a
  position-dependent bond sign ``a``.
* A diagonal single-spin deformation ``diag(w, 1)`` with ``0 < w <= 1`` is
  folded into the bond tensor at construction time, so the spin-up entry is
  ``a*w`` while the spin-down entry stays 1.  The bond dimension stays 2.
* Probing the m anyon instead of the e anyon (``detect="m"``) amounts to
  exchanging the roles of ``sign_km`` and ``sign_ke``; the same tensors are
  reused on the dual lattice, so constructors only ever see the effective
  sign pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

SPIN_UP = 0
SPIN_DOWN = 1


def _check_sign(value: int, name: str) -> int:
    if value not in (+1, -1):
        raise InvalidParameterError(f"invalid-parameter: {name} must be +1 or -1, got {value!r}")
    return int(value)


def _check_w(w: float) -> float:
    w = float(w)
    if not 0.0 < w <= 1.0:
        raise InvalidParameterError(f"invalid-parameter: w must lie in (0, 1], got {w!r}")
    return w


@dataclass(frozen=True)
class ModelParams:
    """One point of the model family: two coupling signs, deformation w, probe sector.

    ``detect`` chooses which anyon's translation quantum number the pipeline
    probes: ``"e"`` runs the construction as given, ``"m"`` runs it with the
    two signs exchanged (the dual-basis construction).
    """

    sign_km: int
    sign_ke: int
    w: float = 0.9
    detect: str = "e"

    def __post_init__(self):
        _check_sign(self.sign_km, "sign_km")
        _check_sign(self.sign_ke, "sign_ke")
        _check_w(self.w)
        if self.detect not in ("e", "m"):
            raise InvalidParameterError(
                f"invalid-parameter: detect must be 'e' or 'm', got {self.detect!r}"
            )

    @property
    def effective_sign_km(self) -> int:
        """Site-tensor parity sign actually used (swapped for the m-sector probe)."""
        return self.sign_km if self.detect == "e" else self.sign_ke

    @property
    def effective_sign_ke(self) -> int:
        """Bond-sign pattern actually used (swapped for the m-sector probe)."""
        return self.sign_ke if self.detect == "e" else self.sign_km


@dataclass(frozen=True)
class SiteTensor:
    """Rank-4 parity projector placed at every dual vertex.

    ``array[alpha, beta, gamma, delta]`` is 1 exactly when the four virtual
    labels sum to ``parity`` mod 2, else 0.
    """

    parity: int
    array: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.array.setflags(write=False)


@dataclass(frozen=True)
class BondTensor:
    """Rank-3 bond tensor ``g[s, alpha, alpha']``, diagonal in all indices.

    The only nonzero entries are ``g[0, 0, 0] = a*w`` and ``g[1, 1, 1] = 1``.
    """

    a: int
    w: float
    array: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.array.setflags(write=False)


@dataclass(frozen=True)
class APattern:
    """Assignment of the bond sign ``a`` on an ``x_extent`` x ``y_extent`` patch.

    ``vertical[x, y]`` is the sign on the bond from dual vertex (x, y) to
    (x, y+1); ``horizontal[x, y]`` on the bond from (x, y) to (x+1, y).
    ``x_period`` is 1 for the uniform pattern and 2 when the unit cell is
    doubled along x.
    """

    sign_ke: int
    x_extent: int
    y_extent: int
    vertical: np.ndarray = field(repr=False)
    horizontal: np.ndarray = field(repr=False)
    x_period: int = 1

    def __post_init__(self):
        self.vertical.setflags(write=False)
        self.horizontal.setflags(write=False)

    def plaquette_product(self, x: int, y: int) -> int:
        """Product of the four bond signs around the dual plaquette at (x, y).

        The plaquette has corners (x, y), (x+1, y), (x, y+1), (x+1, y+1);
        its boundary bonds are two horizontals and two verticals (periodic).
        """
        xr = (x + 1) % self.x_extent
        yu = (y + 1) % self.y_extent
        return int(
            self.horizontal[x, y]
            * self.horizontal[x, yu]
            * self.vertical[x, y]
            * self.vertical[xr, y]
        )


def build_site_tensor(sign_km: int) -> SiteTensor:
    """Return the rank-4 parity projector for the requested coupling sign.

    ``sign_km = +1`` keeps the even-parity configurations, ``-1`` the odd
    ones; exactly 8 of the 16 entries equal 1 either way.
    """
    _check_sign(sign_km, "sign_km")
    parity = 0 if sign_km == +1 else 1
    idx = np.indices((2, 2, 2, 2)).sum(axis=0)
    return SiteTensor(parity=parity, array=(idx % 2 == parity).astype(np.int8))


def build_bond_tensor(a: int, w: float) -> BondTensor:
    """Return the diagonal bond tensor with the deformation folded in."""
    _check_sign(a, "a")
    w = _check_w(w)
    arr = np.zeros((2, 2, 2))
    arr[SPIN_UP, 0, 0] = a * w
    arr[SPIN_DOWN, 1, 1] = 1.0
    return BondTensor(a=a, w=w, array=arr)


def build_a_pattern(sign_ke: int, x_extent: int, y_extent: int) -> APattern:
    """Return the bond-sign pattern realizing the requested star eigenvalue.

    For ``sign_ke = +1`` every bond carries ``a = +1``.  For ``sign_ke = -1``
    the vertical bonds of every even-indexed column carry ``a = -1`` so that
    each dual plaquette encloses exactly one negative bond; this doubles the
    unit cell along x, hence ``x_extent`` must be even.
    """
    _check_sign(sign_ke, "sign_ke")
    if x_extent < 1 or y_extent < 1:
        raise InvalidParameterError(
            f"invalid-parameter: extents must be >= 1, got {x_extent} x {y_extent}"
        )
    horizontal = np.ones((x_extent, y_extent), dtype=np.int64)
    vertical = np.ones((x_extent, y_extent), dtype=np.int64)
    if sign_ke == +1:
        return APattern(sign_ke, x_extent, y_extent, vertical, horizontal, x_period=1)
    if x_extent % 2 != 0:
        raise InvalidParameterError(
            f"incompatible-extent: sign_ke=-1 doubles the unit cell along x; "
            f"x_extent must be even, got {x_extent}"
        )
    vertical[0::2, :] = -1
    return APattern(sign_ke, x_extent, y_extent, vertical, horizontal, x_period=2)
