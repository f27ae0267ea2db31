"""Command-line front end.

Commands write a CSV table and/or a JSON summary into ``--out`` (default ``./out``).
Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
3 acceptance failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import run_all
from .bath import FAMILIES, CutoffFunction, QuadratureError, SpectralFunctions, bath_coefficients, coefficient_a, coefficient_b, integrate_correlation
from .config import ConfigError, RunConfig, load_config
from .dynamics import GeneratorCoefficients, decoherence_time, evolve_closed_form, evolve_entry
from .model import DimensionError, SpinChainModel
from .pointer import HorizonExceeded, limit_distance, projection_with_trace, verify_limit_theorem
from .sampling import random_density_matrix, random_hermitian

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 1, 2, 3
INVARIANCE_MAX_SITES = 8


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return value


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_json(path: Path, payload: dict):
    with open(path, "w") as fh:
        json.dump(_clean(payload), fh, indent=2)
        fh.write("\n")


def _report(config: RunConfig, command: str, **body) -> dict:
    return {"command": command, "version": __version__, "config": config.to_dict(), **body}


def generator_coefficients(config: RunConfig) -> GeneratorCoefficients:
    model = config.model()
    if config.coefficient_source == "bath_numerical":
        coeffs = bath_coefficients(config.spectral(), "numerical", t_max=config.t_max,
                                   tol=config.tail_tol, quad_tol=config.quad_tol)
        return GeneratorCoefficients.from_bath(model, coeffs, b=config.b_override)
    return GeneratorCoefficients.closed_form(model, config.cutoff(), b=config.b_override)


def cmd_coefficients(config: RunConfig, out: Path, all_families: bool = False) -> int:
    families = FAMILIES if all_families else (config.cutoff_family,)
    rows = []
    checks = []
    for family in families:
        cutoff = CutoffFunction(family, config.cutoff_scale, config.cutoff_exponent)
        spec = SpectralFunctions(config.beta, cutoff)
        kw = dict(t_max=config.t_max, tol=config.tail_tol, quad_tol=config.quad_tol)
        a_closed = coefficient_a(spec, "closed_form")
        a_limit = coefficient_a(spec, "numerical")
        integral = integrate_correlation(spec, **kw)
        b_closed = coefficient_b(cutoff, "closed_form")
        b_quad = coefficient_b(cutoff, "quadrature")
        a_corr, b_corr = 2.0 * integral.value.real, integral.value.imag
        for quantity, method, value, error, ref in (
            ("a", "closed_form", a_closed.value, a_closed.error, a_closed.value),
            ("a", "numerical", a_limit.value, a_limit.error, a_closed.value),
            ("a", "correlation_integral", a_corr, 2.0 * integral.error, a_closed.value),
            ("b", "closed_form", b_closed.value, b_closed.error, b_quad.value),
            ("b", "quadrature", b_quad.value, b_quad.error, b_quad.value),
            ("b", "correlation_integral", b_corr, integral.error, b_quad.value),
        ):
            rows.append([family, config.beta, quantity, method, value, error, abs(value - ref)])
        a_rel = max(abs(a_limit.value - a_closed.value), abs(a_corr - a_closed.value)) / a_closed.value
        b_abs = abs(b_corr - b_quad.value)
        checks.append({"family": family, "a_rel_error": a_rel, "b_abs_error": b_abs,
                       "identity": "PASS" if a_rel <= 1e-4 and b_abs <= 1e-3 else "FAIL"})
    write_csv(out / "coefficients.csv",
              ["family", "beta", "quantity", "method", "value", "error_estimate", "deviation_from_reference"], rows)
    write_json(out / "coefficients.json", _report(config, "coefficients", identity_check=checks))
    for c in checks:
        print(f"{c['family']:>12}: a rel err {c['a_rel_error']:.2e}, b abs err {c['b_abs_error']:.2e} -> {c['identity']}")
    return EXIT_OK


def cmd_decoherence_map(config: RunConfig, out: Path) -> int:
    model = config.model()
    coeffs = generator_coefficients(config)
    times = config.times()
    rows = []
    worst = 0.0
    for d in range(1, model.dim):
        analytic = coeffs.gamma * d * d / 4.0 ** (model.n_sites - 1)
        traj = np.abs(evolve_entry(1.0, 1, 1 + d, times, model, coeffs))
        usable = traj > 1e-300
        if usable.sum() >= 2 and np.ptp(times[usable]) > 0:
            fitted = -np.polyfit(times[usable], np.log(traj[usable]), 1)[0]
            deviation = abs(fitted - analytic) / analytic if analytic > 0 else abs(fitted)
            worst = max(worst, deviation)
        else:
            fitted = deviation = math.nan
        crossing = decoherence_time(1, 1 + d, config.epsilon, model, coeffs)
        rows.append([d, analytic, fitted, deviation, crossing])
    write_csv(out / "decoherence_map.csv",
              ["distance", "analytic_rate", "fitted_rate", "relative_deviation", "crossing_time"], rows)
    write_json(out / "decoherence_map.json", _report(
        config, "decoherence-map", gamma=coeffs.gamma, b=coeffs.b, coefficient_source=coeffs.source,
        epsilon=config.epsilon, max_relative_deviation=worst))
    print(f"gamma={coeffs.gamma:.10g}, {len(rows)} distances, max fitted/analytic deviation {worst:.2e}")
    return EXIT_OK


def cmd_theorem(config: RunConfig, out: Path) -> int:
    model = config.model()
    model.check_size()
    coeffs = generator_coefficients(config)
    rng = config.rng()
    Lambda = random_density_matrix(model.dim, rng)
    X = random_hermitian(model.dim, rng)
    if config.theorem_observable == "diagonal":
        X = np.diag(np.diag(X))

    times = config.times()
    dist = limit_distance(Lambda, X, times, model, coeffs)
    slowest = coeffs.gamma / 4.0 ** (model.n_sites - 1)
    off = ~np.eye(model.dim, dtype=bool)
    amplitude = float(np.sum(np.abs(Lambda.T[off]) * np.abs(X[off])))
    envelope = amplitude * np.exp(-slowest * times)
    write_csv(out / "theorem.csv", ["t", "distance", "envelope"], zip(times, dist, envelope))

    horizon = config.theorem_horizon
    if horizon is None:
        horizon = max(config.t_end, 1.2 * math.log(max(amplitude, config.theorem_tol) / config.theorem_tol) / slowest) if slowest > 0 else config.t_end
    summary = dict(n_sites=model.n_sites, gamma=coeffs.gamma, b=coeffs.b, tol=config.theorem_tol,
                   envelope_amplitude=amplitude, envelope_log_slope=-slowest, horizon=horizon)
    try:
        result = verify_limit_theorem(Lambda, X, model, coeffs, config.theorem_tol, horizon=horizon)
    except HorizonExceeded as exc:
        write_json(out / "theorem.json", _report(config, "theorem", status="horizon_exceeded",
                                                 distance_at_horizon=exc.distance, **summary))
        print(f"horizon exceeded: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    write_json(out / "theorem.json", _report(config, "theorem", status="ok", t_tol=result.t_tol, **summary))
    print(f"t_tol={result.t_tol:.10g} (tol {config.theorem_tol:g}), envelope slope {-slowest:.6g}")
    return EXIT_OK


def cmd_pointer(config: RunConfig, out: Path) -> int:
    rows = []
    times = config.times()
    all_invariant = True
    for s in config.s_values:
        for n in range(1, config.n_sites + 1):
            model = SpinChainModel(n, config.lam, config.beta)
            e = projection_with_trace(s, model)
            error = abs(e.trace - s)
            invariant = ""
            if n <= INVARIANCE_MAX_SITES:
                coeffs = GeneratorCoefficients.closed_form(model, config.cutoff(), b=config.b_override)
                E = e.to_matrix()
                ok = all(np.array_equal(evolve_closed_form(E, t, model, coeffs), E) for t in times)
                all_invariant &= ok
                invariant = "true" if ok else "false"
            rows.append([s, n, e.rank, e.trace, error, 2.0 ** -(n + 1), invariant])
    write_csv(out / "pointer.csv", ["s", "n_sites", "rank", "trace", "abs_error", "bound", "invariant"], rows)
    write_json(out / "pointer.json", _report(config, "pointer", all_invariant=all_invariant,
                                             invariance_max_sites=INVARIANCE_MAX_SITES,
                                             all_within_bound=all(r[4] <= r[5] for r in rows)))
    print(f"{len(rows)} projections, all within bound: {all(r[4] <= r[5] for r in rows)}, invariant: {all_invariant}")
    return EXIT_OK


def cmd_verify(config: RunConfig, out: Path) -> int:
    results = run_all(config.seed)
    passed = all(r.passed for r in results)
    write_json(out / "verify.json", _report(config, "verify", passed=passed,
                                            criteria=[r.to_dict() for r in results]))
    print("ALL PASS" if passed else "ACCEPTANCE FAILED")
    return EXIT_OK if passed else EXIT_ACCEPTANCE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI configuration file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")
    common.add_argument("--seed", type=int)
    common.add_argument("--n-sites", type=int)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--cutoff", choices=FAMILIES)
    common.add_argument("--k0", type=float, help="cutoff scale")
    common.add_argument("--p", type=float, help="algebraic cutoff exponent")
    common.add_argument("--tol", type=float, help="quadrature tolerance")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override any configuration key; repeatable")

    parser = argparse.ArgumentParser(prog="spin-dephasing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    coeff = sub.add_parser("coefficients", parents=[common], help="bath coefficients a and b by every route")
    coeff.add_argument("--all-families", action="store_true", help="report all three cutoff families")
    sub.add_parser("decoherence-map", parents=[common], help="dephasing rates by distance from the diagonal")
    sub.add_parser("theorem", parents=[common], help="convergence of expectations to the diagonal part")
    pointer = sub.add_parser("pointer", parents=[common], help="projections with prescribed trace")
    pointer.add_argument("--s", dest="s_values", type=str, nargs="+", help="target traces, e.g. 0.5 1/3")
    sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    return parser


def resolve_config(args) -> RunConfig:
    overrides = {
        "run.seed": args.seed,
        "model.n_sites": args.n_sites,
        "model.lambda": args.lam,
        "model.beta": args.beta,
        "cutoff.family": args.cutoff,
        "cutoff.scale": args.k0,
        "cutoff.exponent": args.p,
        "tolerances.quad_tol": args.tol,
        "pointer.s": getattr(args, "s_values", None),
    }
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    return load_config(args.config, overrides)


COMMANDS = {
    "coefficients": cmd_coefficients,
    "decoherence-map": cmd_decoherence_map,
    "theorem": cmd_theorem,
    "pointer": cmd_pointer,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        config.model()
        config.cutoff()
    except (ConfigError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    args.out.mkdir(parents=True, exist_ok=True)
    kwargs = {"all_families": args.all_families} if args.command == "coefficients" else {}
    try:
        return COMMANDS[args.command](config, args.out, **kwargs)
    except DimensionError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, HorizonExceeded) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
