"""Command-line entry point: ``bianchi-maxwell <command> --config FILE``.

Exit status: 0 all checks pass, 1 a check failed, 2 configuration error,
3 numeric error.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import catalog
from .errors import BianchiMaxwellError, ConfigError, DomainError, NumericError, ParseError
from .geometry import FieldState, SpatialMetricFn, maxwell_residual_full, random_points
from .groups import BianchiGroup, FramePoint, duality_residual, frame_at, jacobi_residual, verify_commutators
from .reduced import ReducedState, group_omega, integrate_reduced, omega_position_spread
from .scenario import dumps, load_json, resolve

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _check(value: float, threshold: float) -> dict:
    return {"max_residual": value, "threshold": threshold, "status": "PASS" if value < threshold else "FAIL"}


def _overall(checks: dict) -> str:
    return "PASS" if all(c["status"] == "PASS" for c in checks.values()) else "FAIL"


def _group(sc: dict) -> BianchiGroup:
    return BianchiGroup.from_config({"group": sc["group"], "alpha": sc["alpha"]})


def cmd_verify_group(sc: dict) -> dict:
    g = _group(sc)
    rng = random.Random(sc["seed"])
    b = sc["box"]
    pts = sorted((FramePoint(rng.uniform(-b, b), rng.uniform(-b, b), rng.uniform(-b, b))
                  for _ in range(sc["points"])), key=lambda p: (p.u1, p.u2, p.u3))
    th = sc["thresholds"]
    checks = {
        "commutator": _check(max(verify_commutators(g, p, sc["h_frame"]) for p in pts), th["commutator"]),
        "duality": _check(max(duality_residual(frame_at(g, p)) for p in pts), th["duality"]),
        "jacobi": _check(jacobi_residual(g), th["jacobi"]),
        "omega_spread": _check(omega_position_spread(g, pts), th["omega_spread"]),
    }
    return {"checks": checks, "omega": list(group_omega(g)), "status": _overall(checks)}


def cmd_integrate(sc: dict) -> tuple[dict, str]:
    g = _group(sc)
    eta = SpatialMetricFn.from_config(sc["eta"])
    t0, t1 = sc["interval"]
    s0 = ReducedState(t0, FieldState(sc["initial"]["alpha"], sc["initial"]["beta"]))
    n = sc["outputs"]
    outs = [t0 + (t1 - t0) * i / max(n - 1, 1) for i in range(n)] if n > 1 else [t1]
    traj = integrate_reduced(g, eta, s0, t1, step=sc["step"], adaptive=sc["adaptive"], tol=sc["tol"],
                             output_times=outs, form=sc["form"])
    drift = traj.constraint_drift()
    th = sc["thresholds"]
    worst_c = max(drift["omega_beta"], drift["beta3"] or 0.0)
    checks = {"constraint": _check(worst_c, th["constraint"])}
    report = {"constraint_drift": drift, "steps": len(traj.knots_t) - 1,
              "final": {"u0": traj.outputs[-1].u0, "alpha": list(traj.outputs[-1].alpha),
                        "beta": list(traj.outputs[-1].beta)}}
    if sc["oracle_points"]:
        h = sc["h_field"]
        pot = traj.potential()
        rng = random.Random(sc["seed"])
        pts = random_points(rng, sc["oracle_points"], (t0 + 3 * h, t1 - 3 * h), sc["box"])
        res = [float(max(abs(x) for x in maxwell_residual_full(g, eta, pot, p, h))) for p in pts]
        report["oracle"] = {"points": [list(p.coords()) for p in pts], "residuals": res}
        checks["oracle"] = _check(max(res), th["oracle"])
    report["checks"] = checks
    report["status"] = _overall(checks)
    return report, traj.to_csv()


def _case_from(sc: dict) -> catalog.SolutionCase:
    cfg = {k: sc[k] for k in ("case", "constants", "functions", "interval", "variant", "perturb")}
    if sc["alpha"] is not None:
        cfg["alpha"] = sc["alpha"]
    return catalog.SolutionCase.from_config(cfg)


def cmd_check_solution(sc: dict) -> dict:
    case = _case_from(sc)
    times = catalog.sample_times(case, sc["samples"])
    res = catalog.residual_reduced(case, times, sc["quad_tol"])
    ok, failed = catalog.passes(res, sc["threshold"], sc["det_tol"])
    checks = {}
    for name, val in res["residuals"].items():
        checks[name] = _check(val, sc["det_tol"] if name == "det_eta" else sc["threshold"])
    report = {"variant": case.variant, "worst_u0": res["worst_u0"], "admissible": res["admissible"],
              "failed_equations": failed}
    if sc["oracle_points"]:
        h = sc["h_field"]
        t0, t1 = case.interval
        pts = random_points(random.Random(sc["seed"]), sc["oracle_points"], (t0, t1), sc["box"])
        checks["oracle"] = _check(catalog.full_oracle_residual(case, pts, h, sc["quad_tol"]),
                                  sc["oracle_threshold"])
    report["checks"] = checks
    report["status"] = _overall(checks)
    return report


def cmd_adjudicate(sc: dict) -> dict:
    case = _case_from(sc)
    variants = None
    if sc["variants"] is not None:
        if not isinstance(sc["variants"], list) or not sc["variants"]:
            raise ConfigError("variants must be a non-empty list of {\"name\", \"variant\"}", "variants")
        variants = []
        for i, item in enumerate(sc["variants"]):
            if not isinstance(item, dict) or set(item) - {"name", "variant"} or "name" not in item:
                raise ConfigError("each entry needs 'name' and optional 'variant'", f"variants[{i}]")
            variants.append((str(item["name"]), dict(item.get("variant", {}))))
            case.with_variant(variants[-1][1])  # validates axes and options early
    times = catalog.sample_times(case, sc["samples"])
    report = catalog.adjudicate_variants(case, variants, times, quad_tol=sc["quad_tol"],
                                         threshold=sc["threshold"], det_tol=sc["det_tol"])
    report["status"] = "PASS" if report["passing"] else "FAIL"
    return report


COMMANDS = {
    "verify-group": cmd_verify_group,
    "integrate": cmd_integrate,
    "check-solution": cmd_check_solution,
    "adjudicate": cmd_adjudicate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bianchi-maxwell",
                                     description="Maxwell fields on Bianchi I-VII homogeneous spacetimes")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario or case JSON file")
        p.add_argument("--out", help="write the JSON report here (default: stdout)")
        p.add_argument("--seed", type=int, help="override the scenario RNG seed")
        p.add_argument("--points", type=int, help="override the sample point count")
        if name == "integrate":
            p.add_argument("--csv", help="write the trajectory CSV here")
    return parser


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _error_report(command: str, exc: BianchiMaxwellError, kind: str) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc), "kind": kind}
    for attr in ("field", "u0", "quantity", "value"):
        if getattr(exc, attr, None) is not None:
            err[attr] = getattr(exc, attr)
    return {"command": command, "error": err, "status": "ERROR"}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        sc = resolve(command, load_json(args.config), seed=args.seed, points=args.points)
        result = COMMANDS[command](sc)
        csv_text = None
        if isinstance(result, tuple):
            result, csv_text = result
    except (ConfigError, ParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        if args.out:
            _write(args.out, dumps(_error_report(command, exc, "config")))
        return EXIT_CONFIG
    except (NumericError, BianchiMaxwellError) as exc:
        detail = ""
        if isinstance(exc, DomainError):
            detail = f" (u0={exc.u0}, {exc.quantity}={exc.value})"
        print(f"numeric error: {exc}{detail}", file=sys.stderr)
        if args.out:
            _write(args.out, dumps(_error_report(command, exc, "numeric")))
        return EXIT_NUMERIC
    report = {"command": command, "scenario": sc, **result}
    _write(args.out, dumps(report))
    if csv_text is not None and getattr(args, "csv", None):
        Path(args.csv).write_text(csv_text, encoding="utf-8")
    return EXIT_OK if report["status"] == "PASS" else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
