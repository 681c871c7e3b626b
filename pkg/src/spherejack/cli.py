"""Experiment runner: reproduces the library's quantitative claims as tables.

Each subcommand sweeps a parameter (kernel degree k, or scale t), measures a
quantity through the zonal/kernel modules, and emits a CSV or JSON report
with a fitted log-log slope where that is meaningful.  Reports are
deterministic; `--deterministic` additionally drops wall-clock metadata so
identical configs produce byte-identical files.

Exit codes: 0 success, 1 usage/configuration error, 2 failed `--assert`.
"""

import argparse
import io
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SpherejackError, ValidationError
from .kernel import complement_sequence, make_params, moment
from .specfun import legendre_pn
from . import oracle, zonal

__all__ = ["ExperimentConfig", "RateReport", "fit_rate", "run_experiment", "main"]

_DEFAULT_K_SWEEP = "8:256:x2"
_DEFAULT_T_GRID = "0.00390625:1:x2"
_DEFAULT_FAMILY = "SMOOTH(3,64)"

# v-grid for the inverse experiment: five points spanning [k, 4k]
_INVERSE_RATIOS = tuple(2.0 ** (i / 2.0) for i in range(5))


@dataclass
class ExperimentConfig:
    """Validated knobs for one experiment run."""

    subcommand: str
    n: int = 3
    s: int = 2
    r: int = 1
    k_sweep: tuple = (8, 16, 32, 64, 128, 256)
    p: float = 2.0
    f_spec: str = _DEFAULT_FAMILY
    beta: float = 2.0
    gamma: float = math.pi
    t_grid: tuple = ()
    j_max: int | None = None
    out: str | None = None
    format: str = "csv"
    deterministic: bool = False
    do_assert: bool = False


@dataclass
class RateReport:
    """Rows plus the fitted log-log line (when the sweep admits one)."""

    columns: list
    rows: list
    slope: float | None = None
    intercept: float | None = None
    r_squared: float | None = None
    meta: dict = field(default_factory=dict)


def fit_rate(points) -> tuple[float, float, float]:
    """Least-squares line through (log x, log y); returns (slope, intercept, R^2)."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValidationError(f"need at least 3 points for a rate fit, got {len(pts)}")
    bad = [(i, x, y) for i, (x, y) in enumerate(pts) if not (x > 0 and y > 0)]
    if bad:
        listing = "; ".join(f"row {i}: ({x!r}, {y!r})" for i, x, y in bad)
        raise ValidationError(f"rate fit needs positive values: {listing}")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (slope * lx + intercept)
    total = ly - ly.mean()
    ss_tot = float(total @ total)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(residual @ residual) / ss_tot
    return float(slope), float(intercept), float(r2)


# ---------------------------------------------------------------------------
# config parsing helpers


def parse_sweep(text: str, *, integer: bool = True) -> tuple:
    """Parse 'START:STOP:xSTEP' (multiplicative) or 'START:STOP:STEP' or 'VALUE'."""
    parts = text.split(":")
    caster = (lambda v: int(round(v))) if integer else float
    try:
        if len(parts) == 1:
            return (caster(float(parts[0])),)
        if len(parts) != 3:
            raise ValueError("expected VALUE or START:STOP:STEP")
        start, stop = float(parts[0]), float(parts[1])
        step_text = parts[2].strip()
        multiplicative = step_text.lower().startswith("x")
        step = float(step_text[1:]) if multiplicative else float(step_text)
    except ValueError as exc:
        raise ValidationError(f"bad sweep {text!r}: {exc}") from None
    if multiplicative and not step > 1.0:
        raise ValidationError(f"bad sweep {text!r}: multiplicative step must be > 1")
    if not multiplicative and not step > 0.0:
        raise ValidationError(f"bad sweep {text!r}: additive step must be > 0")
    if stop < start:
        raise ValidationError(f"bad sweep {text!r}: STOP must be >= START")
    values, value = [], start
    while value <= stop * (1.0 + 1e-12):
        values.append(caster(value))
        value = value * step if multiplicative else value + step
    return tuple(dict.fromkeys(values))


def parse_p(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        p = float(text)
    except ValueError:
        raise ValidationError(f"bad p {text!r}: expected 1, 2, inf, or a real >= 1") from None
    if not p >= 1.0:
        raise ValidationError(f"bad p {text!r}: must be >= 1")
    return p


def parse_family(text: str, n: int) -> zonal.ZonalFunction:
    """Parse 'SMOOTH(a,J)' / 'ROUGH(a,J)' / 'SINGLE(j0)' / 'file:PATH'."""
    spec = text.strip()
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        try:
            with open(path, encoding="utf-8") as handle:
                return zonal.from_text(handle.read())
        except OSError as exc:
            raise ValidationError(f"cannot read function file {path!r}: {exc}") from None
    if not spec.endswith(")") or "(" not in spec:
        raise ValidationError(f"bad function spec {text!r}")
    name, arg_text = spec[:-1].split("(", 1)
    try:
        args = [float(a) for a in arg_text.split(",")] if arg_text.strip() else []
    except ValueError:
        raise ValidationError(f"bad function arguments in {text!r}") from None
    name = name.strip().upper()
    if name == "SMOOTH":
        if len(args) not in (1, 2):
            raise ValidationError("SMOOTH takes (alpha) or (alpha, J)")
        return zonal.smooth_family(args[0], int(args[1]) if len(args) == 2 else 64, n)
    if name == "ROUGH":
        if len(args) not in (1, 2):
            raise ValidationError("ROUGH takes (alpha) or (alpha, J)")
        return zonal.rough_family(args[0], int(args[1]) if len(args) == 2 else 128, n)
    if name == "SINGLE":
        if len(args) != 1:
            raise ValidationError("SINGLE takes (j0)")
        return zonal.single_family(int(args[0]), n)
    raise ValidationError(f"unknown family {name!r} (expected SMOOTH, ROUGH, SINGLE, or file:PATH)")


# ---------------------------------------------------------------------------
# the experiments


def _boolean_error(f: zonal.ZonalFunction, params, r: int) -> zonal.ZonalFunction:
    comp = complement_sequence(params, f.J)
    return zonal.ZonalFunction(f.n, f.coeffs * comp ** r)


def _run_multipliers(config: ExperimentConfig):
    k = config.k_sweep[0]
    params = make_params(k, config.s, config.n)
    j_max = config.j_max if config.j_max is not None else min(params.band + 2, 4096)
    comp = complement_sequence(params, j_max)
    eta = 1.0 - comp
    xi = 1.0 - comp ** config.r
    rows = [(j, float(eta[j]), float(xi[j])) for j in range(j_max + 1)]
    meta = {"k": k, "band": params.band}
    return ["j", "eta", "xi"], rows, None, meta


def _run_moments(config: ExperimentConfig):
    rows = []
    for k in config.k_sweep:
        params = make_params(k, config.s, config.n)
        rows.append((k, moment(config.beta, config.gamma, params)))
    fit = None
    if len(rows) >= 3 and all(value > 0 for _, value in rows):
        fit = fit_rate(rows)
    meta = {"beta": config.beta, "gamma": config.gamma, "target_slope": -config.beta}
    return ["k", "moment"], rows, fit, meta


def _run_ratio_limit(config: ExperimentConfig):
    k = config.k_sweep[-1]
    params = make_params(k, config.s, config.n)
    j_max = config.j_max if config.j_max is not None else 8
    comp = complement_sequence(params, j_max)
    lam = params.lam
    rows = []
    worst = 0.0
    for j in range(1, j_max + 1):
        ratio = float(comp[j] / comp[1])
        target = j * (j + 2.0 * lam) / (2.0 * lam + 1.0)
        deviation = abs(ratio - target) / target
        worst = max(worst, deviation)
        rows.append((j, ratio, target, deviation))
    meta = {"k": k, "max_rel_deviation": worst}
    return ["j", "ratio", "target", "rel_deviation"], rows, None, meta


def _run_direct(config: ExperimentConfig):
    f = parse_family(config.f_spec, config.n)
    rows = []
    for k in config.k_sweep:
        params = make_params(k, config.s, config.n)
        error = zonal.lp_norm(_boolean_error(f, params, config.r), config.p)
        omega = zonal.modulus_of_smoothness(f, 1.0 / k, config.r, config.p)
        rows.append((k, error, omega, error / omega))
    fit = fit_rate([(k, ratio) for k, _, _, ratio in rows]) if len(rows) >= 3 else None
    meta = {"empirical_constant": max(ratio for *_, ratio in rows)}
    return ["k", "error", "omega", "ratio"], rows, fit, meta


def _inverse_v_grid(k: int) -> list[int]:
    return sorted({int(round(k * rho)) for rho in _INVERSE_RATIOS})


def _run_inverse(config: ExperimentConfig):
    f = parse_family(config.f_spec, config.n)
    rows = []
    for k in config.k_sweep:
        omega = zonal.modulus_of_smoothness(f, 1.0 / k, config.r, config.p)
        errors = []
        for v in _inverse_v_grid(k):
            params = make_params(v, config.s, config.n)
            errors.append(zonal.lp_norm(_boolean_error(f, params, config.r), config.p))
        max_error = max(errors)
        rows.append((k, omega, max_error, omega / max_error))
    fit = fit_rate([(k, ratio) for k, _, _, ratio in rows]) if len(rows) >= 3 else None
    meta = {
        "empirical_constant": max(ratio for *_, ratio in rows),
        "v_grid": "5 points k * 2^{i/2}, i = 0..4 (max over v >= k truncated to [k, 4k])",
    }
    return ["k", "omega", "max_error", "ratio"], rows, fit, meta


def _run_saturation(config: ExperimentConfig):
    f = parse_family(config.f_spec, config.n)
    rows = []
    for k in config.k_sweep:
        params = make_params(k, config.s, config.n)
        rows.append((k, zonal.lp_norm(_boolean_error(f, params, config.r), config.p)))
    meta = {"target_slope": -2.0 * config.r}
    constant = bool(np.all(f.coeffs[1:] == 0.0)) if f.J > 0 else True
    fit = None
    if constant:
        meta["invariant_class"] = "constants"
    elif len(rows) >= 3 and all(value > 0 for _, value in rows):
        fit = fit_rate(rows)
    return ["k", "error"], rows, fit, meta


def _run_equivalence(config: ExperimentConfig):
    f = parse_family(config.f_spec, config.n)
    rows = []
    for t in config.t_grid:
        omega = zonal.modulus_of_smoothness(f, t, config.r, config.p)
        upper = zonal.k_functional_upper(f, t, config.r, config.p, s=config.s)
        rows.append((t, omega, upper, upper / omega))
    ratios = [ratio for *_, ratio in rows]
    meta = {
        "band_low": min(ratios),
        "band_high": max(ratios),
        "band_ratio": max(ratios) / min(ratios),
        "candidate_s": config.s,
    }
    return ["t", "omega", "k_upper", "ratio"], rows, None, meta


def _run_oracle_check(config: ExperimentConfig):
    if config.n != 3:
        raise ValidationError("oracle-check runs on S^2 only (use --n 3)")
    f = parse_family(config.f_spec, config.n)
    k = config.k_sweep[0]
    params = make_params(k, config.s, config.n)
    x_grid = np.linspace(0.0, np.pi, 17)

    fast = zonal.jackson_apply(f, params)
    dev_convolve = max(
        abs(oracle.convolve_direct(f, params, x) - zonal.evaluate(fast, x)) for x in x_grid
    )

    dev_translate = 0.0
    for theta in (0.3, 0.9, 1.7, 2.6):
        shifted = zonal.translate(f, theta)
        dev_translate = max(
            dev_translate,
            max(abs(oracle.translate_direct(f, theta, x) - zonal.evaluate(shifted, x)) for x in x_grid),
        )

    lap = zonal.laplace_beltrami_power(f, 1)
    dev_laplace = max(
        abs(oracle.laplacian_radial_fd(f, theta) - zonal.evaluate(lap, theta))
        for theta in np.linspace(0.4, np.pi - 0.4, 20)
    )

    rows = [
        ("convolve", float(dev_convolve)),
        ("translate", float(dev_translate)),
        ("laplacian", float(dev_laplace)),
    ]
    meta = {"k": k, "x_grid": "17 colatitudes uniform on [0, pi]"}
    return ["check", "max_abs_deviation"], rows, None, meta


_EXPERIMENTS = {
    "multipliers": _run_multipliers,
    "moments": _run_moments,
    "ratio-limit": _run_ratio_limit,
    "direct": _run_direct,
    "inverse": _run_inverse,
    "saturation": _run_saturation,
    "equivalence": _run_equivalence,
    "oracle-check": _run_oracle_check,
}


def _config_echo(config: ExperimentConfig) -> dict:
    return {
        "subcommand": config.subcommand,
        "n": config.n,
        "s": config.s,
        "r": config.r,
        "k_sweep": list(config.k_sweep),
        "p": "inf" if config.p == math.inf else config.p,
        "f": config.f_spec,
        "beta": config.beta,
        "gamma": config.gamma,
        "t_grid": list(config.t_grid),
        "j_max": config.j_max,
        "deterministic": config.deterministic,
    }


def run_experiment(config: ExperimentConfig) -> RateReport:
    """Execute one subcommand; deterministic for identical configs."""
    runner = _EXPERIMENTS.get(config.subcommand)
    if runner is None:
        raise ValidationError(f"unknown subcommand {config.subcommand!r}")
    if not config.k_sweep:
        raise ValidationError("k sweep must be nonempty")
    started = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        columns, rows, fit, extra_meta = runner(config)
    meta = {"config": _config_echo(config)}
    meta.update(extra_meta)
    notes = sorted({str(w.message) for w in caught})
    if notes:
        meta["warnings"] = notes
    if not config.deterministic:
        meta["wall_time_s"] = time.perf_counter() - started
    slope, intercept, r2 = fit if fit is not None else (None, None, None)
    return RateReport(columns, rows, slope, intercept, r2, meta)


# ---------------------------------------------------------------------------
# assertions (exit code 2 when violated and --assert was given)


def _assert_report(config: ExperimentConfig, report: RateReport) -> list[str]:
    failures = []

    def check(condition: bool, message: str):
        if not condition:
            failures.append(message)

    name = config.subcommand
    if name == "moments":
        check(report.slope is not None, "no slope fitted")
        if report.slope is not None:
            check(abs(report.slope + config.beta) <= 0.1,
                  f"slope {report.slope:.4f} not within 0.1 of {-config.beta}")
            check(report.r_squared >= 0.999, f"R^2 {report.r_squared:.6f} < 0.999")
    elif name == "ratio-limit":
        check(report.meta["max_rel_deviation"] <= 0.02,
              f"max relative deviation {report.meta['max_rel_deviation']:.4%} > 2%")
    elif name == "direct":
        check(report.slope is not None and abs(report.slope) <= 0.1,
              f"ratio trend {report.slope} not within 0.1 of 0")
    elif name == "inverse":
        check(report.slope is not None and abs(report.slope) <= 0.15,
              f"ratio trend {report.slope} not within 0.15 of 0")
    elif name == "saturation":
        if report.meta.get("invariant_class") == "constants":
            worst = max(abs(err) for _, err in report.rows)
            check(worst <= 1e-14, f"constant function error {worst} > 1e-14")
        else:
            target = -2.0 * config.r
            check(report.slope is not None and abs(report.slope - target) <= 0.1,
                  f"slope {report.slope} not within 0.1 of {target}")
    elif name == "equivalence":
        check(report.meta["band_ratio"] <= 50.0,
              f"band ratio {report.meta['band_ratio']:.2f} > 50")
    elif name == "oracle-check":
        limits = {"convolve": 1e-6, "translate": 1e-6, "laplacian": 1e-5}
        for check_name, deviation in report.rows:
            check(deviation <= limits[check_name],
                  f"{check_name} deviation {deviation} > {limits[check_name]}")
    elif name == "multipliers":
        values = {j: (eta, xi) for j, eta, xi in report.rows}
        check(abs(values[0][0] - 1.0) <= 1e-12 and abs(values[0][1] - 1.0) <= 1e-12,
              "eta(0) and xi(0) must equal 1")
        band = report.meta["band"]
        tail = [abs(eta) for j, (eta, _) in values.items() if j > band]
        check(all(v <= 1e-10 for v in tail), "eigenvalues beyond the band must vanish")
    return failures


# ---------------------------------------------------------------------------
# report serialization


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(report: RateReport) -> str:
    out = io.StringIO()
    out.write(",".join(report.columns) + "\n")
    for row in report.rows:
        out.write(",".join(_format_cell(cell) for cell in row) + "\n")
    return out.getvalue()


def render_json(report: RateReport) -> str:
    payload = {
        "columns": report.columns,
        "rows": [list(row) for row in report.rows],
        "slope": report.slope,
        "intercept": report.intercept,
        "r_squared": report.r_squared,
        "meta": report.meta,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# argument parsing and entry point


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1; argparse's default of 2 would collide with
    # the failed-assertion code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spherejack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, help_text in (
        ("multipliers", "table of eta and xi eigenvalues at the first sweep k"),
        ("moments", "kernel moment vs k with slope fit"),
        ("ratio-limit", "eigenvalue-complement ratios vs their limit at the largest sweep k"),
        ("direct", "Boolean-sum error against the modulus of smoothness"),
        ("inverse", "modulus against the worst nearby Boolean-sum error"),
        ("saturation", "error decay vs k with slope fit against -2r"),
        ("equivalence", "modulus vs K-functional upper bound over a t grid"),
        ("oracle-check", "multiplier path vs direct S^2 integrals"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--n", type=int, default=3, help="ambient dimension (sphere S^{n-1})")
        cmd.add_argument("--s", type=int, default=2, help="kernel power")
        cmd.add_argument("--r", type=int, default=1, help="Boolean-sum / difference order")
        cmd.add_argument("--k", default=_DEFAULT_K_SWEEP,
                         help="degree sweep START:STOP:xSTEP (or additive STEP, or one value)")
        cmd.add_argument("--p", default="2", help="norm order: 1, 2, inf, or a real >= 1")
        cmd.add_argument("--f", default=_DEFAULT_FAMILY,
                         help="SMOOTH(a,J) | ROUGH(a,J) | SINGLE(j0) | file:PATH")
        cmd.add_argument("--beta", type=float, default=2.0, help="moment exponent")
        cmd.add_argument("--gamma", type=float, default=math.pi,
                         help="upper limit of the moment integral")
        cmd.add_argument("--t-grid", default=_DEFAULT_T_GRID,
                         help="scale sweep for equivalence, START:STOP:xSTEP")
        cmd.add_argument("--j-max", type=int, default=None,
                         help="largest degree for multipliers / ratio-limit tables")
        cmd.add_argument("--out", default=None, help="output path (default: stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default="csv")
        cmd.add_argument("--deterministic", action="store_true",
                         help="omit timing metadata so identical runs are byte-identical")
        cmd.add_argument("--assert", dest="do_assert", action="store_true",
                         help="exit 2 unless the subcommand's acceptance thresholds hold")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    return ExperimentConfig(
        subcommand=args.subcommand,
        n=args.n,
        s=args.s,
        r=args.r,
        k_sweep=parse_sweep(args.k, integer=True),
        p=parse_p(args.p),
        f_spec=args.f,
        beta=args.beta,
        gamma=args.gamma,
        t_grid=parse_sweep(args.t_grid, integer=False),
        j_max=args.j_max,
        out=args.out,
        format=args.format,
        deterministic=args.deterministic,
        do_assert=args.do_assert,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        report = run_experiment(config)
    except SpherejackError as exc:
        print(f"spherejack: error: {exc}", file=sys.stderr)
        return 1
    rendered = render_csv(report) if config.format == "csv" else render_json(report)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(rendered)
    else:
        sys.stdout.write(rendered)
    summary = f"{config.subcommand}: {len(report.rows)} rows"
    if report.slope is not None:
        summary += f", slope {report.slope:.4f} (R^2 {report.r_squared:.6f})"
    if config.out:
        summary += f" -> {config.out}"
    print(summary, file=sys.stderr)
    if config.do_assert:
        failures = _assert_report(config, report)
        if failures:
            for failure in failures:
                print(f"ASSERT FAIL [{config.subcommand}]: {failure}", file=sys.stderr)
            return 2
        print(f"ASSERT PASS [{config.subcommand}]", file=sys.stderr)
    return 0
