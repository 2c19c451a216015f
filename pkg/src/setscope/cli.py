"""Command-line entry point.

Subcommands: ``scl`` (correlation-length table), ``classify``
(fractionalization verdict), ``sweep`` (gap table over a w grid) and
``verify`` (brute-force oracle cross-checks).  Configuration comes from a
flat ``key = value`` file plus flag overrides; outputs are CSV for tables
and JSON for verdicts, written byte-identically for identical configs
regardless of the parallelism degree.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import oracle
from .classify import (
    DEFAULT_PERIOD_THRESHOLD,
    classify_eta,
    sweep_w,
)
from .errors import (
    CapacityError,
    InsufficientSamplesError,
    InvalidParameterError,
    NumericalFailureError,
    SetscopeError,
    VerificationError,
)
from .model import ModelParams
from .pipeline import PipelinePoint, Tolerances, parallel_map, run_point
from .spectra import DEFAULT_DEG_TOL, DEFAULT_REAL_TOL

JOBS_ENV_VAR = "SETSCOPE_JOBS"

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

SCL_HEADER = "L_y,k_y_index,k_y,k_x,epsilon,lambda_re,lambda_im,is_ground"
SWEEP_HEADER = "w,L_y,gamma_00,gamma_pipi"

VERIFY_SPECTRUM_RTOL = 1e-9
VERIFY_SAMPLED_CONFIGS = 200


@dataclass(frozen=True)
class RunConfig:
    """Validated run description shared by all subcommands."""

    km: int = +1
    ke: int = +1
    w: tuple[float, ...] = (0.9,)
    ly: tuple[int, ...] = (8,)
    detect: str = "e"
    deg_tol: float = DEFAULT_DEG_TOL
    real_tol: float = DEFAULT_REAL_TOL
    period_threshold: float = DEFAULT_PERIOD_THRESHOLD
    out: str | None = None
    jobs: int | None = None
    branch: str = "auto"

    def __post_init__(self):
        # reuse the model validation for the shared parameter domain
        for w in self.w:
            ModelParams(self.km, self.ke, w, self.detect)
        if not self.ly:
            raise InvalidParameterError("invalid-parameter: ly list is empty")
        for ly in self.ly:
            if ly < 2:
                raise InvalidParameterError(
                    f"invalid-parameter: L_y must be >= 2, got {ly}"
                )
        for name in ("deg_tol", "real_tol", "period_threshold"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(
                    f"invalid-parameter: {name} must be positive"
                )
        if self.jobs is not None and self.jobs < 1:
            raise InvalidParameterError("invalid-parameter: jobs must be >= 1")
        if self.branch not in ("auto", "0", "pi", "both"):
            raise InvalidParameterError(
                f"invalid-parameter: branch must be auto/0/pi/both, got {self.branch!r}"
            )

    def params(self, w: float | None = None) -> ModelParams:
        return ModelParams(self.km, self.ke, self.w[0] if w is None else w, self.detect)

    def tolerances(self) -> Tolerances:
        return Tolerances(deg_tol=self.deg_tol, real_tol=self.real_tol)

    def effective_jobs(self, n_items: int) -> int:
        jobs = self.jobs
        if jobs is None:
            env = os.environ.get(JOBS_ENV_VAR, "").strip()
            if env:
                try:
                    jobs = int(env)
                except ValueError as exc:
                    raise InvalidParameterError(
                        f"invalid-parameter: {JOBS_ENV_VAR}={env!r} is not an integer"
                    ) from exc
            else:
                jobs = os.cpu_count() or 1
        return max(1, min(jobs, n_items))

    def echo(self) -> dict:
        """Physics-relevant provenance; execution details (out, jobs) excluded."""
        return {
            "km": self.km,
            "ke": self.ke,
            "w": list(self.w),
            "ly": list(self.ly),
            "detect": self.detect,
            "deg_tol": self.deg_tol,
            "real_tol": self.real_tol,
            "period_threshold": self.period_threshold,
            "branch": self.branch,
        }


def _parse_int_list(text: str, name: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError as exc:
        raise InvalidParameterError(f"invalid-parameter: {name}={text!r}") from exc


def _parse_float_list(text: str, name: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError as exc:
        raise InvalidParameterError(f"invalid-parameter: {name}={text!r}") from exc


_CONFIG_KEYS = {
    "km", "ke", "w", "ly", "detect", "deg_tol", "real_tol",
    "period_threshold", "out", "jobs", "branch",
}


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` file; '#' starts a comment."""
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InvalidParameterError(f"invalid-parameter: cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(
                f"invalid-parameter: {path}:{lineno}: expected key = value, got {raw.rstrip()!r}"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise InvalidParameterError(f"invalid-parameter: {path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def config_from_mapping(mapping: dict, base: RunConfig | None = None) -> RunConfig:
    """Build a RunConfig from string-or-typed values (config file or JSON echo)."""
    base = base or RunConfig()
    kwargs = {}
    for key, value in mapping.items():
        if value is None:
            continue
        if key in ("km", "ke", "jobs"):
            kwargs[key] = int(value)
        elif key == "w":
            kwargs[key] = (
                tuple(float(v) for v in value)
                if isinstance(value, (list, tuple))
                else _parse_float_list(value, "w")
            )
        elif key == "ly":
            kwargs[key] = (
                tuple(int(v) for v in value)
                if isinstance(value, (list, tuple))
                else _parse_int_list(value, "ly")
            )
        elif key in ("deg_tol", "real_tol", "period_threshold"):
            kwargs[key] = float(value)
        elif key in ("detect", "out", "branch"):
            kwargs[key] = str(value)
        else:
            raise InvalidParameterError(f"invalid-parameter: unknown config key {key!r}")
    return replace(base, **kwargs)


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _branch_selected(k_x: float, branch: str) -> bool:
    if branch in ("auto", "both"):
        return True
    if branch == "0":
        return k_x == 0.0
    return k_x != 0.0


def _scl_csv(points: list[PipelinePoint], branch: str = "auto") -> str:
    rows = []
    for pt in points:
        selected = [
            p for p in list(pt.scl.points) + list(pt.scl.extra_points)
            if _branch_selected(p.k_x, branch)
        ]
        for p in list(pt.scl.ground_points) + selected:
            rows.append((
                pt.ly, p.k_index, p.k_x, 0 if p.is_ground else 1,
                f"{pt.ly},{p.k_index},{_fmt(p.k_y)},{_fmt(p.k_x)},"
                f"{'' if p.epsilon is None else _fmt(p.epsilon)},"
                f"{_fmt(p.eigenvalue.real)},{_fmt(p.eigenvalue.imag)},"
                f"{1 if p.is_ground else 0}",
            ))
    rows.sort(key=lambda r: r[:4])
    return "\n".join([SCL_HEADER] + [r[4] for r in rows]) + "\n"


def cmd_scl(config: RunConfig) -> int:
    if len(config.w) != 1:
        raise InvalidParameterError(
            f"invalid-parameter: scl takes a single w, got {len(config.w)} values "
            f"(use the sweep subcommand for grids)"
        )
    jobs = config.effective_jobs(len(config.ly))
    inner_jobs = max(1, jobs // len(config.ly))
    points = parallel_map(
        lambda ly: run_point(config.params(), ly, tolerances=config.tolerances(),
                             jobs=inner_jobs),
        sorted(config.ly),
        jobs=jobs,
    )
    _write_output(_scl_csv(points, config.branch), config.out)
    return EXIT_OK


def cmd_classify(config: RunConfig) -> int:
    even = [ly for ly in config.ly if ly % 2 == 0]
    if len(set(even)) < 3 or len(even) != len(config.ly):
        raise InsufficientSamplesError(
            f"insufficient-samples: classify needs >= 3 distinct even L_y, got {list(config.ly)}"
        )
    if len(config.w) != 1:
        raise InvalidParameterError("invalid-parameter: classify takes a single w")
    jobs = config.effective_jobs(len(config.ly))
    inner_jobs = max(1, jobs // len(config.ly))
    ly_sorted = sorted(config.ly)
    points = parallel_map(
        lambda ly: run_point(config.params(), ly, tolerances=config.tolerances(),
                             jobs=inner_jobs),
        ly_sorted,
        jobs=jobs,
    )
    runs = {pt.ly: pt.scl for pt in points}
    result = classify_eta(
        config.params(), runs,
        period_threshold=config.period_threshold,
    )
    ev = result.evidence
    fit = ev.get("decay_fit")
    report = {
        "residuals": {str(ly): ev["residuals"][ly] for ly in ly_sorted},
        "splittings": {str(ly): ev["splittings"][ly] for ly in ly_sorted},
        "branch": ev["branch"],
        "decay_fit": None if fit is None else {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "quality": fit.quality,
            "samples": [[ly, d] for ly, d in fit.samples],
            "dropped": list(fit.dropped),
        },
        "thresholds": ev["thresholds"],
        "notes": ev["notes"],
        "config": config.echo(),
    }
    if config.detect == "e":
        report["eta_e"] = result.eta_e if result.eta_e is not None else "undetermined"
    else:
        report["eta_m"] = result.eta_m if result.eta_m is not None else "undetermined"
    _write_output(json.dumps(report, indent=2, sort_keys=True) + "\n", config.out)
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    jobs = config.effective_jobs(len(config.w) * len(config.ly))
    rows = sweep_w(
        config.params(), config.w, config.ly,
        tolerances=config.tolerances(), jobs=jobs,
    )
    lines = [SWEEP_HEADER]
    for row in rows:
        g00 = "" if row.gamma_00 is None else _fmt(row.gamma_00)
        gpp = "" if row.gamma_pipi is None else _fmt(row.gamma_pipi)
        lines.append(f"{_fmt(row.w)},{row.ly},{g00},{gpp}")
    _write_output("\n".join(lines) + "\n", config.out)
    return EXIT_OK


def _verify_spectrum_case(config: RunConfig, w: float, ly: int) -> dict:
    params = config.params(w)
    point = run_point(params, ly, tolerances=config.tolerances(), jobs=1)
    union = np.sort_complex(np.concatenate([b.eigenvalues for b in point.spectra.blocks]))
    reference = oracle.brute_transfer_spectrum(params, ly)
    scale = float(np.abs(reference).max()) if reference.size else 1.0
    diff = np.abs(union - reference)
    worst = int(np.argmax(diff))
    status = bool(diff.max() <= VERIFY_SPECTRUM_RTOL * max(scale, 1e-300))
    return {
        "w": w,
        "ly": ly,
        "max_rel_err": float(diff.max() / max(scale, 1e-300)),
        "worst_index": worst,
        "pass": status,
    }


def cmd_verify(config: RunConfig) -> int:
    for ly in config.ly:
        if ly > oracle.MAX_BRUTE_LY:
            raise InvalidParameterError(
                f"oracle size cap: verify supports L_y <= {oracle.MAX_BRUTE_LY}, got {ly}"
            )
    lines = []
    detail: dict = {"config": config.echo(), "stabilizers": [], "spectra": []}
    failures = []

    stab_params = ModelParams(config.km, config.ke, 1.0, config.detect)
    for lx, ly_t, configs in (
        (2, 2, None),
        (4, 4, oracle.sample_support_configs(stab_params, 4, 4, VERIFY_SAMPLED_CONFIGS)),
    ):
        label = f"{lx}x{ly_t}" + (" (exhaustive)" if configs is None else " (sampled)")
        violations = oracle.check_stabilizers(stab_params, lx, ly_t, configs)
        ok = not violations
        detail["stabilizers"].append({"torus": label, "pass": ok, "violations": violations[:5]})
        lines.append(f"stabilizers {label}: {'pass' if ok else 'FAIL'}")
        if not ok:
            failures.append(f"stabilizers {label}: {violations[0]}")

    for w in config.w:
        for ly in sorted(config.ly):
            case = _verify_spectrum_case(config, w, ly)
            detail["spectra"].append(case)
            lines.append(
                f"spectrum w={w} L_y={ly}: "
                f"{'pass' if case['pass'] else 'FAIL'} (max rel err {case['max_rel_err']:.2e})"
            )
            if not case["pass"]:
                failures.append(
                    f"spectrum mismatch at km={config.km} ke={config.ke} w={w} "
                    f"L_y={ly} eigenvalue index {case['worst_index']}"
                )

    detail["pass"] = not failures
    summary = "verify: PASS" if not failures else "verify: FAIL\n" + "\n".join(failures)
    text = "\n".join(lines + [summary]) + "\n"
    sys.stdout.write(text)
    if config.out is not None:
        with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(detail, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if not failures else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setscope",
        description="Correlation-length spectra and translation-fractionalization "
                    "classification for toric-code tensor-network states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "scl": "emit the correlation-length minima table (CSV)",
        "classify": "classify the probed anyon's translation quantum number (JSON)",
        "sweep": "emit the gap table over a w grid (CSV)",
        "verify": "cross-check the pipeline against the brute-force oracle",
    }
    for name, help_text in descriptions.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--km", type=int, choices=(1, -1), help="sign of the plaquette coupling")
        sp.add_argument("--ke", type=int, choices=(1, -1), help="sign of the star coupling")
        sp.add_argument("--w", type=str, help="deformation parameter, scalar or comma list")
        sp.add_argument("--ly", type=str, help="cylinder perimeters, comma list")
        sp.add_argument("--detect", choices=("e", "m"), help="which anyon sector to probe")
        sp.add_argument("--deg-tol", type=float, dest="deg_tol",
                        help="relative window for ground degeneracy")
        sp.add_argument("--real-tol", type=float, dest="real_tol",
                        help="relative threshold for treating eigenvalues as real")
        sp.add_argument("--period-threshold", type=float, dest="period_threshold",
                        help="residual threshold for the periodicity verdict")
        sp.add_argument("--out", type=str, help="output path (default: stdout)")
        sp.add_argument("--jobs", type=int,
                        help=f"parallel worker count (fallback: ${JOBS_ENV_VAR}, then CPU count)")
        sp.add_argument("--config", type=str, help="flat key=value config file")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig()
    if args.command == "verify":
        base = replace(base, w=(1.0, 0.9, 0.5), ly=(2, 3, 4, 5, 6))
    if args.config:
        base = config_from_mapping(parse_config_file(args.config), base)
    overrides = {}
    for key in ("km", "ke", "detect", "deg_tol", "real_tol",
                "period_threshold", "out", "jobs"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.w is not None:
        overrides["w"] = _parse_float_list(args.w, "w")
    if args.ly is not None:
        overrides["ly"] = _parse_int_list(args.ly, "ly")
    return replace(base, **overrides)


_COMMANDS = {
    "scl": cmd_scl,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        return _COMMANDS[args.command](config)
    except (InvalidParameterError, InsufficientSamplesError, CapacityError) as exc:
        print(f"setscope: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailureError as exc:
        print(f"setscope: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VerificationError as exc:
        print(f"setscope: verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except SetscopeError as exc:
        print(f"setscope: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
