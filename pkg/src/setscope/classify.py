"""Fractionalization verdicts from correlation-length curves.

A fractionalized anyon shows up as an extra Brillouin-zone periodicity: the
minima at momentum k_y and k_y + pi coincide up to a splitting that closes
exponentially with the cylinder perimeter.  The classifier therefore asks
two questions of a run over several even perimeters:

* is the periodicity residual ``max_k |eps(k) - eps(k+pi)|`` below threshold
  at the largest perimeter, and
* does the splitting decay exponentially (negative slope of ``log`` splitting
  versus perimeter with good fit quality)?

Both yes => eta = -1.  Residuals that stay above threshold without shrinking
=> eta = +1.  Anything else stays undetermined; thresholds are explicit
configuration and the raw evidence always ships with the verdict.

Evidence branch: the k_x = pi branch when the run populates it (one-column
operator with negative eigenvalues); otherwise the k_x = 0 branch, whose
splitting is then used in place of the pi-branch one.  An e-sector run
classifies the e anyon (eta_e); a dual (m-sector) run classifies the m anyon
with the identical rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSamplesError, InvalidParameterError
from .model import ModelParams
from .pipeline import Tolerances, parallel_map, run_point
from .spectra import BRANCH_PI, BRANCH_ZERO, SclResult

DEFAULT_PERIOD_THRESHOLD = 0.05
DEFAULT_QUALITY_MIN = 0.9
# residual floor below which a splitting is treated as identically zero
ZERO_SPLITTING_FLOOR = 1e-12
# multiplicative slack allowed on "non-decreasing" residuals
NONDECREASING_SLACK = 0.9


@dataclass(frozen=True)
class PeriodicityReport:
    """Half-zone pairing of one curve at fixed perimeter."""

    ly: int
    branch: float
    residual: float
    pair_differences: tuple[float, ...]


@dataclass(frozen=True)
class SplittingFit:
    """Least-squares line through (L_y, log splitting)."""

    samples: tuple[tuple[int, float], ...]
    slope: float
    intercept: float
    quality: float
    dropped: tuple[int, ...] = ()


@dataclass(frozen=True)
class SetClassification:
    """Translation quantum numbers with the evidence that produced them.

    ``eta_e``/``eta_m`` are +1, -1 or None (undetermined); only the sector
    that was actually run is filled in.
    """

    eta_e: int | None = None
    eta_m: int | None = None
    evidence: dict = field(default_factory=dict)


def periodicity_residual(scl: SclResult, branch: float) -> PeriodicityReport:
    """Max |eps(k_y) - eps(k_y + pi)| over the momentum grid (even L_y only)."""
    if scl.ly % 2 != 0:
        raise InvalidParameterError(
            f"undefined-for-odd: half-zone pairing needs even L_y, got {scl.ly}"
        )
    if branch in scl.unavailable_branches or branch not in scl.branches:
        raise InvalidParameterError(
            f"branch-unavailable: k_x={branch} branch absent for this operator"
        )
    half = scl.ly // 2
    diffs = []
    for m in range(scl.ly):
        a = scl.epsilon(branch, m)
        b = scl.epsilon(branch, m + half)
        if a is None or b is None:
            raise InvalidParameterError(
                f"branch-unavailable: k_x={branch} branch has no finite value at "
                f"momentum index {m if a is None else m + half}"
            )
        diffs.append(abs(a - b))
    return PeriodicityReport(
        ly=scl.ly, branch=branch, residual=max(diffs), pair_differences=tuple(diffs)
    )


def fit_splitting_decay(samples) -> SplittingFit:
    """Fit log splitting against perimeter; non-positive splittings are dropped."""
    samples = [(int(ly), float(d)) for ly, d in samples]
    if len(samples) < 3:
        raise InsufficientSamplesError(
            f"insufficient-samples: decay fit needs >= 3 perimeters, got {len(samples)}"
        )
    dropped = tuple(ly for ly, d in samples if d <= 0.0)
    kept = [(ly, d) for ly, d in samples if d > 0.0]
    if len({ly for ly, _ in kept}) < 3:
        raise InsufficientSamplesError(
            "insufficient-samples: fewer than 3 positive splittings remain after drops"
        )
    x = np.array([ly for ly, _ in kept], dtype=float)
    y = np.log([d for _, d in kept])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = y - y.mean()
    ss_tot = float(total @ total)
    quality = 1.0 if ss_tot == 0.0 else 1.0 - float(resid @ resid) / ss_tot
    return SplittingFit(
        samples=tuple(kept), slope=float(slope), intercept=float(intercept),
        quality=quality, dropped=dropped,
    )


def _choose_branch(runs: dict[int, SclResult]) -> float:
    """Prefer the pi branch when every run populates it at every momentum."""
    for scl in runs.values():
        if BRANCH_PI in scl.unavailable_branches or BRANCH_PI not in scl.branches:
            return BRANCH_ZERO
        if any(p.epsilon is None for p in scl.branch_points(BRANCH_PI)):
            return BRANCH_ZERO
    return BRANCH_PI


def classify_eta(
    params: ModelParams,
    runs: dict[int, SclResult],
    period_threshold: float = DEFAULT_PERIOD_THRESHOLD,
    quality_min: float = DEFAULT_QUALITY_MIN,
) -> SetClassification:
    """Verdict for the run's sector from curves at >= 3 even perimeters."""
    ly_list = sorted(runs)
    if len(ly_list) < 3:
        raise InsufficientSamplesError(
            f"insufficient-samples: classification needs >= 3 even L_y, got {len(ly_list)}"
        )
    for ly in ly_list:
        if ly % 2 != 0:
            raise InvalidParameterError(
                f"undefined-for-odd: classification runs use even L_y, got {ly}"
            )
    branch = _choose_branch(runs)
    reports = {ly: periodicity_residual(runs[ly], branch) for ly in ly_list}
    residuals = {ly: reports[ly].residual for ly in ly_list}
    if branch == BRANCH_PI:
        samples = [
            (ly, runs[ly].epsilon(BRANCH_PI, 0) - runs[ly].epsilon(BRANCH_PI, ly // 2))
            for ly in ly_list
        ]
    else:
        samples = [(ly, residuals[ly]) for ly in ly_list]

    verdict: int | None = None
    fit: SplittingFit | None = None
    notes = []
    r_values = [residuals[ly] for ly in ly_list]
    if residuals[ly_list[-1]] < period_threshold:
        if all(d <= ZERO_SPLITTING_FLOOR for _, d in samples):
            verdict = -1
            notes.append("splitting identically zero at every perimeter")
        else:
            try:
                fit = fit_splitting_decay(samples)
                if fit.slope < 0.0 and fit.quality >= quality_min:
                    verdict = -1
                else:
                    notes.append(
                        f"decay fit inconclusive: slope={fit.slope:.4g} quality={fit.quality:.4g}"
                    )
            except InsufficientSamplesError as exc:
                notes.append(str(exc))
    if verdict is None:
        above = all(r > period_threshold for r in r_values)
        non_decreasing = all(
            r_values[i + 1] >= NONDECREASING_SLACK * r_values[i]
            for i in range(len(r_values) - 1)
        )
        if above and non_decreasing:
            verdict = +1
        else:
            notes.append("residuals neither small-and-decaying nor large-and-persistent")

    evidence = {
        "branch": "pi" if branch == BRANCH_PI else "0",
        "residuals": residuals,
        "splittings": {ly: d for ly, d in samples},
        "decay_fit": fit,
        "reports": reports,
        "thresholds": {
            "period_threshold": period_threshold,
            "quality_min": quality_min,
        },
        "notes": notes,
    }
    if params.detect == "e":
        return SetClassification(eta_e=verdict, evidence=evidence)
    return SetClassification(eta_m=verdict, evidence=evidence)


@dataclass(frozen=True)
class SweepRow:
    w: float
    ly: int
    gamma_00: float | None
    gamma_pipi: float | None


def sweep_w(
    params: ModelParams,
    w_values,
    ly_values,
    tolerances: Tolerances = Tolerances(),
    jobs: int = 1,
) -> list[SweepRow]:
    """Gap table gamma(0,0), gamma(pi,pi) over a (w, L_y) grid, sorted ascending."""
    w_values = sorted(float(w) for w in w_values)
    ly_values = sorted(int(ly) for ly in ly_values)
    for ly in ly_values:
        if ly % 2 != 0:
            raise InvalidParameterError(
                f"undefined-for-odd: the (pi,pi) sector needs even L_y, got {ly}"
            )
    grid = [(w, ly) for w in w_values for ly in ly_values]

    def job(item):
        w, ly = item
        pt = run_point(
            ModelParams(params.sign_km, params.sign_ke, w, params.detect),
            ly, tolerances=tolerances,
        )
        g00 = gpp = None
        for gp in pt.gaps:
            if gp.k_index == 0 and gp.k_x == BRANCH_ZERO:
                g00 = gp.gamma
            if gp.k_index == ly // 2 and gp.k_x == BRANCH_PI:
                gpp = gp.gamma
        return SweepRow(w=w, ly=ly, gamma_00=g00, gamma_pipi=gpp)

    return parallel_map(job, grid, jobs=jobs)


def gap_is_two_smallest(point_gaps, ly: int) -> bool:
    """True when gamma(0,0) <= gamma(pi,pi) <= every other sector gap."""
    inf = math.inf
    by_sector = {(gp.k_x, gp.k_index): inf if gp.gamma is None else gp.gamma
                 for gp in point_gaps}
    g00 = by_sector.pop((BRANCH_ZERO, 0), inf)
    gpp = by_sector.pop((BRANCH_PI, ly // 2), inf)
    rest = min(by_sector.values()) if by_sector else inf
    return g00 <= gpp <= rest
