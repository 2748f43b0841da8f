"""Command-line front end.

Subcommands:

* ``verify``   -- curvature-identity residual table (plus the Einstein check
                  for the five-dimensional family); exit 0 iff all pass.
* ``wcs``      -- cycle integral of the Wodzicki-Chern-Simons form for a
                  metric and circle action; writes a JSON record.
* ``sweep``    -- batch runs over (p, q) pairs or an a-grid; writes CSV.
* ``selftest`` -- the built-in invariant suite.

Exit codes: 0 success, 1 numeric failure (validation or non-convergence),
2 usage/configuration error.  Flags may also be supplied through a flat
``key = value`` config file; explicit flags override file entries.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, geometry, metrics, selftest
from .cycles import CircleAction, a_sweep, integrate_cycle
from .jets import ChartDomainError
from .quadrature import QuadratureError, QuadratureSpec
from .records import format_float, result_to_json, sweep_to_csv

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2

WORKER_ENV = "LOOPCS_WORKERS"

_AXIS_ALIASES = {
    "phi": "phi", "φ": "phi",
    "theta": "theta", "θ": "theta",
    "psi": "psi", "ψ": "psi",
    "alpha": "alpha", "α": "alpha",
    "y": "y",
}


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopcs",
        description="Wodzicki-Chern-Simons cycle integrals on loop spaces")
    parser.add_argument("--version", action="version", version=f"loopcs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_action=True):
        p.add_argument("--config", help="flat key = value config file; flags override")
        p.add_argument("--metric", help="catalog name, 'ypq', or 'ypq-a'")
        p.add_argument("--p", type=int, help="first integer of the (p, q) family")
        p.add_argument("--q", type=int, help="second integer of the (p, q) family")
        p.add_argument("--a", type=float, help="direct family parameter in (0, 1)")
        p.add_argument("--ell", type=float, default=None,
                       help="fiber period parameter when using --a (default 1)")
        if with_action:
            p.add_argument("--action", default=None,
                           help="trivial | rotate:AXIS[:SPEED] | iterate:AXIS:N")
            p.add_argument("--k", type=int, default=None,
                           help="form degree parameter (default (dim+1)/2)")
            p.add_argument("--variant", choices=("reduced", "full"), default="reduced")
            p.add_argument("--s-scale", type=float, default=1.0,
                           help="regularization parameter scaling (exactly linear)")
            p.add_argument("--nodes", type=int, default=32,
                           help="Gauss-Legendre nodes per unmasked axis")
            p.add_argument("--refine-factor", type=int, default=2)
            p.add_argument("--max-refinements", type=int, default=0)
            p.add_argument("--tol", type=float, default=None,
                           help="target relative tolerance (error if unmet)")
            p.add_argument("--loop-nodes", type=int, default=64)
            p.add_argument("--no-mask", action="store_true",
                           help="disable the constant-axes shortcut")
            p.add_argument("--workers", type=int, default=None,
                           help=f"evaluation workers (default ${WORKER_ENV} or 1)")
        p.add_argument("--out", help="output file path (default stdout)")

    p_verify = sub.add_parser("verify", help="curvature identity residuals")
    add_common(p_verify, with_action=False)
    p_verify.add_argument("--samples", type=int, default=100)
    p_verify.add_argument("--seed", type=int, default=2024)

    p_wcs = sub.add_parser("wcs", help="cycle integral of the WCS form")
    add_common(p_wcs)

    p_sweep = sub.add_parser("sweep", help="batch cycle integrals")
    add_common(p_sweep)
    p_sweep.add_argument("--sweep-pq", default=None,
                         help="comma list like 7:3,13:8 of (p, q) pairs")
    p_sweep.add_argument("--scan-p-max", type=int, default=None,
                         help="scan all exact-mode pairs with p <= N")
    p_sweep.add_argument("--sweep-a", default=None,
                         help="comma list of a values in (0, 1), fiber param fixed")

    sub.add_parser("selftest", help="run the built-in invariant suite")
    return parser


def _read_config(path: str) -> dict[str, str]:
    table = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, val = line.split("=", 1)
            table[key.strip().replace("-", "_")] = val.strip()
    return table


def _merge_config(args: argparse.Namespace, parser_defaults: dict) -> argparse.Namespace:
    """Config-file entries fill in any argument still at its default."""
    if not getattr(args, "config", None):
        return args
    table = _read_config(args.config)
    for key, raw in table.items():
        if not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, key) != parser_defaults.get(key):
            continue  # explicit flag wins
        current_default = parser_defaults.get(key)
        if isinstance(current_default, bool):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(current_default, int) and not isinstance(current_default, bool):
            value = int(raw)
        elif isinstance(current_default, float):
            value = float(raw)
        else:
            value = raw
            if key in ("p", "q", "samples", "seed", "nodes", "k", "workers",
                       "loop_nodes", "refine_factor", "max_refinements", "scan_p_max"):
                value = int(raw)
            elif key in ("a", "ell", "tol", "s_scale"):
                value = float(raw)
        setattr(args, key, value)
    return args


def _select_metric(args) -> geometry.MetricField:
    name = args.metric
    if not name:
        raise UsageError("--metric is required")
    if name == "ypq":
        if args.p is None or args.q is None:
            raise UsageError("--metric ypq requires --p and --q")
        params = metrics.solve_ypq(args.p, args.q)
        return metrics.ypq_metric(params)
    if name == "ypq-a":
        if args.a is None:
            raise UsageError("--metric ypq-a requires --a")
        ell = 1.0 if args.ell is None else args.ell
        params = metrics.ypq_params_from_a(args.a, ell=ell)
        return metrics.ypq_metric(params)
    return metrics.catalog(name)


def _axis_index(metric: geometry.MetricField, token: str) -> int:
    token = _AXIS_ALIASES.get(token, token)
    names = list(metric.coord_names)
    if token in names:
        return names.index(token)
    try:
        idx = int(token)
    except ValueError:
        raise UsageError(f"unknown axis {token!r}; coordinates are {names}") from None
    if not 0 <= idx < metric.dim:
        raise UsageError(f"axis index {idx} out of range for dim {metric.dim}")
    return idx


def _select_action(metric: geometry.MetricField, text: str | None) -> CircleAction:
    if text is None or text == "trivial":
        return CircleAction.trivial()
    parts = text.split(":")
    if parts[0] == "rotate":
        if len(parts) not in (2, 3):
            raise UsageError("expected rotate:AXIS or rotate:AXIS:SPEED")
        axis = _axis_index(metric, parts[1])
        speed = float(parts[2]) if len(parts) == 3 else None
        return CircleAction.rotation(axis=axis, speed=speed)
    if parts[0] == "iterate":
        if len(parts) != 3:
            raise UsageError("expected iterate:AXIS:N")
        axis = _axis_index(metric, parts[1])
        return CircleAction.iterate(CircleAction.rotation(axis=axis), int(parts[2]))
    raise UsageError(f"unknown action {text!r}")


def _workers(args) -> int:
    if getattr(args, "workers", None) is not None:
        return max(1, args.workers)
    env = os.environ.get(WORKER_ENV)
    return max(1, int(env)) if env else 1


def _quad_spec(args) -> QuadratureSpec:
    mask: tuple[int, ...] | None = () if getattr(args, "no_mask", False) else None
    return QuadratureSpec(nodes=args.nodes, refinement_factor=args.refine_factor,
                          max_refinements=args.max_refinements, rel_tol=args.tol,
                          mask=mask, workers=_workers(args))


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_verify(args) -> int:
    metric = _select_metric(args)
    rng = np.random.default_rng(args.seed)
    pts = metric.box.sample_interior(rng, args.samples)
    report = geometry.validate_curvature(metric, pts)
    lines = [f"curvature identity residuals for {metric.name} "
             f"({args.samples} interior points, tol {report.tolerance:g}):"]
    lines += report.lines()
    ok = report.passed
    if isinstance(metric.params, metrics.YpqParams):
        res = metrics.einstein_residual(metric, pts, metrics.EINSTEIN_CONSTANT_DIM5)
        flag = "pass" if res <= 1e-8 else "FAIL"
        lines.append(f"  {'einstein_ric_4g':<22} {res:12.3e}  {flag}")
        ok = ok and res <= 1e-8
    lines.append("verification " + ("passed" if ok else "FAILED"))
    _write("\n".join(lines), args.out)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_wcs(args) -> int:
    metric = _select_metric(args)
    action = _select_action(metric, args.action)
    k = args.k if args.k is not None else (metric.dim + 1) // 2
    spec = _quad_spec(args)
    result = integrate_cycle(metric, action, k, quad=spec, variant=args.variant,
                             s_scale=args.s_scale, loop_nodes=args.loop_nodes)
    _write(result_to_json(result), args.out)
    pi4 = result.pi4_multiple
    summary = (f"# value = {format_float(result.value)}"
               + (f" = ({pi4}) * pi^4" if pi4 is not None else "")
               + f", error estimate {result.error_estimate:.3e}, "
               f"wall {result.wall_time:.2f}s")
    print(summary, file=sys.stderr)
    return EXIT_OK


def _parse_pq_list(text: str) -> list[tuple[int, int]]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            p_str, q_str = chunk.split(":")
            pairs.append((int(p_str), int(q_str)))
        except ValueError:
            raise UsageError(f"bad (p, q) entry {chunk!r}; expected P:Q") from None
    return pairs


def cmd_sweep(args) -> int:
    from .cycles import SweepResult, SweepRow

    spec = QuadratureSpec(nodes=args.nodes, refinement_factor=args.refine_factor,
                          max_refinements=args.max_refinements, rel_tol=args.tol,
                          workers=_workers(args))
    if args.sweep_a:
        grid = [float(tok) for tok in args.sweep_a.split(",") if tok.strip()]
        if not grid:
            raise UsageError("empty a-grid")
        ell = 1.0 if args.ell is None else args.ell
        sweep = a_sweep(grid, k=3, quad=spec, ell=ell, variant=args.variant)
        _write(sweep_to_csv(sweep), args.out)
        return EXIT_OK

    pairs: list[tuple[int, int]] = []
    if args.sweep_pq:
        pairs += _parse_pq_list(args.sweep_pq)
    if args.scan_p_max:
        for p in range(2, args.scan_p_max + 1):
            for q in range(1, p):
                if math.gcd(p, q) != 1:
                    continue
                n = math.isqrt(4 * p * p - 3 * q * q)
                if n * n == 4 * p * p - 3 * q * q:
                    pairs.append((p, q))
    if not pairs:
        raise UsageError("sweep needs --sweep-pq, --scan-p-max, or --sweep-a")

    rows = []
    for (p, q) in pairs:
        label = {"p": p, "q": q}
        try:
            metric = metrics.ypq_metric(metrics.solve_ypq(p, q))
            action = _select_action(metric, args.action or "rotate:alpha")
            k = args.k if args.k is not None else 3
            res = integrate_cycle(metric, action, k, quad=spec,
                                  variant=args.variant, s_scale=args.s_scale,
                                  loop_nodes=args.loop_nodes)
            rows.append(SweepRow(label=label, result=res))
        except Exception as exc:
            rows.append(SweepRow(label=label, result=None, error=str(exc)))
    _write(sweep_to_csv(SweepResult(rows=rows)), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    defaults = vars(parser.parse_args([args.command]))
    try:
        args = _merge_config(args, defaults)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "wcs":
            return cmd_wcs(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "selftest":
            return selftest.run_all()
        raise UsageError(f"unknown command {args.command!r}")
    except (QuadratureError, ChartDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
