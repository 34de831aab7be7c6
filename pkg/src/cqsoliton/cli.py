"""Command-line front end.

Subcommands: exact | bifurcation | solve | spectrum | stability | validate.
Tabulated output goes to CSV (17 significant digits, deterministic row
order; columns documented in FORMATS.md) or JSON.  Exit codes: 0 success
(including recorded non-convergence), 2 usage/config errors, 3 internal
numerical failures.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import bifurcation as bf
from . import closed_form as cf
from . import gradient_flow as gf
from . import spectrum as sp
from . import validation as vl

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def parse_epsilon(text):
    """Coupling strength as a literal or 's*sqrt3' shorthand."""
    text = text.strip()
    if "sqrt3" in text:
        factor = text.replace("sqrt3", "").replace("*", "").strip()
        scale = float(factor) if factor else 1.0
        return scale * cf.SQRT3
    return float(text)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_table(stream, header, rows):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _strip_nan(obj):
    """Strict JSON has no NaN/Infinity; map them to null."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _strip_nan(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_strip_nan(v) for v in obj]
    return obj


def emit(args, header, rows, json_shape=None):
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        if args.format == "json":
            payload = json_shape if json_shape is not None else [
                dict(zip(header, row)) for row in rows]
            payload = _strip_nan(json.loads(
                json.dumps(payload, default=_json_default)))
            json.dump(payload, out, indent=2, default=_json_default)
            out.write("\n")
        else:
            write_table(out, header, rows)
    finally:
        if args.output:
            out.close()


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, cf.Branch):
        return obj.value
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _make_spec(epsilon, k, branch):
    branch = cf.Branch(branch)
    if branch is cf.Branch.FRONT:
        return cf.front_spec(epsilon)
    if branch is cf.Branch.FOLD:
        return cf.fold_spec(epsilon)
    if k is None:
        raise ValueError(f"--k is required for branch {branch.value}")
    return cf.SolitonSpec(epsilon, k, branch)


def cmd_exact(args):
    spec = _make_spec(parse_epsilon(args.eps), args.k, args.branch)
    lo, hi = args.range
    xs = np.linspace(lo, hi, args.n)
    rows = []
    for x in xs:
        u = cf.eval_profile(spec, x)
        if x == 0.0:
            du = cf.eval_derivative(spec, x, side=+1)
            resid = 0.0
        else:
            du = cf.eval_derivative(spec, x)
            resid = cf.first_integral_residual(spec, x)
        rows.append((float(x), u, du, resid))
    emit(args, ["x", "u", "du", "first_integral_residual"], rows)
    return EXIT_OK


def cmd_bifurcation(args):
    eps = parse_epsilon(args.eps)
    header = ["k", "mass", "mass_sq_slope", "branch"]
    if eps == 0.0:
        # free space: single branch on (0, 3/4), no fold, no upper branch
        kmax = cf.K_FRONT
        delta = 1e-6 * kmax
        rows = []
        for i in range(args.n_samples):
            t = i / (args.n_samples - 1)
            k = delta + t * (kmax - 2.0 * delta)
            msq = bf.SQRT3 * math.log(bf.phi(0.0, k))
            slope = bf.SQRT3 * bf.phi_prime(0.0, k) / bf.phi(0.0, k)
            rows.append((k, math.sqrt(msq), slope, "lower"))
        emit(args, header, rows)
        return EXIT_OK
    trace = bf.trace_curve(eps, args.n_samples)
    rows = [(s.k, s.mass, s.mass_sq_slope, s.branch.value)
            for s in trace.samples]
    emit(args, header, rows)
    return EXIT_OK


REQUIRED_CONFIG = {
    "epsilon": None,
    "grid": ("x_min", "x_max", "J"),
    "flow": ("dt", "mass_a", "max_steps", "conv_tol"),
}


def load_run_config(path):
    with open(path) as fh:
        raw = json.load(fh)
    for key, subkeys in REQUIRED_CONFIG.items():
        if key not in raw:
            raise ValueError(f"missing config field: {key!r}")
        if subkeys:
            for sub in subkeys:
                if sub not in raw[key]:
                    raise ValueError(f"missing config field: {key!r}.{sub!r}")
    eps = raw["epsilon"]
    eps = parse_epsilon(eps) if isinstance(eps, str) else float(eps)
    grid = gf.build_grid(raw["grid"]["x_min"], raw["grid"]["x_max"],
                         int(raw["grid"]["J"]))
    flow = raw["flow"]
    cfg = gf.CngfConfig(dt=float(flow["dt"]), mass_a=float(flow["mass_a"]),
                        max_steps=int(flow["max_steps"]),
                        conv_tol=float(flow["conv_tol"]),
                        scheme=flow.get("scheme", "lumped"))
    output = raw.get("output", {})
    return eps, grid, cfg, output


def cmd_solve(args):
    eps, grid, cfg, output = load_run_config(args.config)
    width = float(output.get("init_width", 2.0))
    init = gf.default_initial_guess(grid, cfg.mass_a, width=width)
    result = gf.run_cngf(init, cfg, eps)
    payload = {
        "epsilon": eps,
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "J": grid.J,
                 "h": grid.h, "j0": grid.j0},
        "flow": {"dt": cfg.dt, "mass_a": cfg.mass_a,
                 "max_steps": cfg.max_steps, "conv_tol": cfg.conv_tol,
                 "scheme": cfg.scheme},
        "converged": result.converged,
        "steps_taken": result.steps_taken,
        "final_change": result.final_change,
        "extracted_k": result.extracted_k,
        "energy": result.energy,
        "profile": result.profile.values.tolist(),
    }
    if args.compare_exact:
        k_exact, branch = float(args.compare_exact[0]), args.compare_exact[1]
        spec = _make_spec(eps, k_exact, branch)
        exact = np.array([cf.eval_profile(spec, x) for x in grid.nodes()])
        payload["compare_exact"] = {
            "k": spec.k,
            "branch": spec.branch.value,
            "max_norm_error": float(np.max(np.abs(result.profile.values - exact))),
            "k_error": abs(result.extracted_k - spec.k),
        }
    if args.format == "csv":
        rows = [(x, u) for x, u in zip(grid.nodes(), result.profile.values)]
        emit(args, ["x", "u"], rows)
        meta = {k: v for k, v in payload.items() if k != "profile"}
        sys.stderr.write(json.dumps(meta, default=_json_default) + "\n")
    else:
        emit(args, [], [], json_shape=payload)
    return EXIT_OK


def _default_grid(args):
    return gf.build_grid(args.x_min, args.x_max, args.J)


def cmd_spectrum(args):
    eps = parse_epsilon(args.eps)
    grid = _default_grid(args)
    if args.fold:
        report = sp.fold_kernel_check(eps, grid, m=min(args.m, 3))
    else:
        spec = _make_spec(eps, args.k, args.branch)
        report = sp.spectrum_report(spec, grid, m=args.m)
    payload = {
        "eigenvalues": list(report.eigenvalues),
        "morse_index": report.morse_index,
        "zero_mode_gap": report.zero_mode_gap,
        "kernel_overlap": report.kernel_overlap,
    }
    rows = [(i, lam) for i, lam in enumerate(report.eigenvalues)]
    if args.format == "csv":
        emit(args, ["index", "eigenvalue"], rows)
        sys.stderr.write(json.dumps(
            {k: v for k, v in payload.items() if k != "eigenvalues"},
            default=_json_default) + "\n")
    else:
        emit(args, [], [], json_shape=payload)
    return EXIT_OK


def cmd_stability(args):
    eps = parse_epsilon(args.eps)
    grid = _default_grid(args)
    spec = _make_spec(eps, args.k, args.branch)
    verdict = sp.classify_stability(spec, grid)
    payload = {
        "epsilon": eps,
        "k": spec.k,
        "branch": spec.branch.value,
        "stable": verdict.stable,
        "mechanism": verdict.mechanism,
        "details": verdict.details,
    }
    emit(args, ["key", "value"],
         [(k, v) for k, v in payload.items() if k != "details"],
         json_shape=payload)
    return EXIT_OK


def cmd_validate(args):
    results = vl.run_all()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: measured={r.measured:.6e} "
              f"tolerance={r.tolerance:.6e}" + (f" ({r.detail})" if r.detail else ""))
    summary = {
        "passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(summary, fh, indent=2, default=_json_default)
            fh.write("\n")
    else:
        print(json.dumps(summary, default=_json_default))
    return EXIT_OK if summary["passed"] else 1


def _add_output_options(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="output path (default stdout)")


def _add_grid_options(p):
    p.add_argument("--x-min", type=float, default=-40.0)
    p.add_argument("--x-max", type=float, default=40.0)
    p.add_argument("--J", type=int, default=3200)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cqsoliton",
        description="Bound states of the 1D cubic-quintic NLS with an "
                    "attractive delta potential")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="tabulate an exact profile")
    p.add_argument("--eps", required=True)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--branch", required=True,
                   choices=[b.value for b in cf.Branch])
    p.add_argument("--range", nargs=2, type=float, default=(-10.0, 10.0),
                   metavar=("XMIN", "XMAX"))
    p.add_argument("--n", type=int, default=801)
    _add_output_options(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bifurcation", help="trace the bifurcation curve")
    p.add_argument("--eps", required=True,
                   help="coupling (0 allowed: free-space curve)")
    p.add_argument("--n-samples", type=int, default=200)
    _add_output_options(p)
    p.set_defaults(func=cmd_bifurcation)

    p = sub.add_parser("solve", help="run the normalized gradient flow")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--compare-exact", nargs=2, default=None,
                   metavar=("K", "BRANCH"))
    _add_output_options(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("spectrum", help="lowest eigenvalues of the linearization")
    p.add_argument("--eps", required=True)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--branch", default="lower",
                   choices=[b.value for b in cf.Branch])
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--fold", action="store_true",
                   help="fold kernel check at (kbar, fold profile)")
    _add_grid_options(p)
    _add_output_options(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("stability", help="orbital-stability verdict")
    p.add_argument("--eps", required=True)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--branch", required=True,
                   choices=[b.value for b in cf.Branch])
    _add_grid_options(p)
    _add_output_options(p)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("validate", help="run the invariant suite")
    p.add_argument("--output", default=None, help="JSON summary path")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
