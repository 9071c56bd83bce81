"""Command-line front end: verification scenarios, curvature-file heat
coefficients, warped-model evaluations, and the randomized oracle suites.

JSON reports are deterministic: keys sorted, rationals printed as "num/den",
complex values as {"re","im"}, and no timing data.  Exit status is 0 exactly
when every check in the run passes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from . import boundary, heat, oracles, warped
from .symbolic import UnitValue


def _json_dump(obj, path: str | None):
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def _num(x):
    """Floats rendered via repr (deterministic); exact values stay exact."""
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite value in report")
        return x
    return x


def _uv_obj(v: UnitValue, numeric_units: dict | None = None):
    obj = v.json_obj()
    try:
        z = v.numeric(numeric_units)
        obj["numeric"] = {"re": z.real, "im": z.imag}
    except KeyError:
        pass
    return obj


# ---------------------------------------------------------------------------
# verify-boundary
# ---------------------------------------------------------------------------

def cmd_verify_boundary(args) -> int:
    p1, p2 = args.powers
    try:
        scenario = boundary.get_scenario(args.dim, p1, p2)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2

    extrapolation = False
    if args.p is not None or args.q is not None:
        if len(scenario.model.algebra.families) == 1:
            print("error: signature override not supported for this scenario",
                  file=sys.stderr)
            return 2
        from .clifford import AlgebraSignature
        from .symbols import foliation_model
        import dataclasses
        p = args.p if args.p is not None else scenario.model.algebra.families[0][1]
        q = args.q if args.q is not None else scenario.model.algebra.families[1][1]
        if p + q != args.dim:
            print(f"error: signature ({p},{q}) does not match dimension {args.dim}",
                  file=sys.stderr)
            return 2
        scenario = dataclasses.replace(
            scenario, name=scenario.name + f"-sig{p}.{q}",
            model=foliation_model(p, q, AlgebraSignature(p, q).total_dim),
            expected_cases={}, labels=dict(scenario.labels),
            notes="unverified extrapolation beyond the pinned signature")
        extrapolation = True

    t0 = time.perf_counter()
    report = boundary.phi_total(scenario)
    elapsed = time.perf_counter() - t0

    checks = ([] if extrapolation else
              [{"name": name, "expected": exp, "got": got, "pass": ok}
               for name, exp, got, ok in report.checks])
    payload = {
        "command": "verify-boundary",
        "inputs": {"dim": args.dim, "powers": [p1, p2], "scenario": scenario.name,
                   "extrapolation": extrapolation},
        "cases": [
            {"label": label,
             "index": {"r": c.r, "l": c.l, "k": c.k, "j": c.j, "alpha": c.alpha},
             "value": _uv_obj(v)}
            for label, c, v in report.cases
        ],
        "total": _uv_obj(report.total),
        "total_over_boundary": _uv_obj(report.total_over_boundary),
        "checks": checks,
    }
    text = _json_dump(payload, args.json)
    if not args.json:
        print(text)
    ok = all(c["pass"] for c in checks)
    print(f"# scenario {scenario.name}: {len(report.cases)} cases, "
          f"{'all checks pass' if ok else 'CHECK FAILURES'} "
          f"({elapsed:.3f}s)", file=sys.stderr)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# heat
# ---------------------------------------------------------------------------

def _parse_config(path: str) -> dict:
    values: dict[str, Fraction] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            try:
                frac = Fraction(val)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"{path}:{lineno}: bad value {val!r}: {exc}") from exc
            if key in values:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            values[key] = frac
    return values


def cmd_heat(args) -> int:
    try:
        cfg = _parse_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    meta = {}
    for key in ("p", "q", "n", "total_dim"):
        if key in cfg:
            meta[key] = cfg.pop(key)
    if "p" in meta and "q" in meta:
        # the heat-formula convention: leaf dimension 2p, trace dim 2^(p+q)
        p, q = int(meta["p"]), int(meta["q"])
        n, total_dim = 2 * p + q, 2 ** (p + q)
    elif "n" in meta and "total_dim" in meta:
        n, total_dim = int(meta["n"]), int(meta["total_dim"])
    else:
        print("error: config needs either p and q, or n and total_dim", file=sys.stderr)
        return 2

    try:
        data = heat.CurvatureData.from_mapping(cfg)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2

    bounded = data.bvol != 0
    if bounded:
        hc = heat.boundary_coeffs(None, data, n=n, total_dim=total_dim)
    else:
        hc = heat.interior_coeffs(None, data, n=n, total_dim=total_dim)
    payload = {
        "command": "heat",
        "inputs": {"config": args.config, "n": n, "total_dim": total_dim,
                   "bounded": bounded},
        "coefficients": {
            "a0": _uv_obj(hc.a0), "a1": _uv_obj(hc.a1), "a2": _uv_obj(hc.a2),
            "a3": _uv_obj(hc.a3), "a4": _uv_obj(hc.a4),
        },
        "checks": [],
    }
    if hc.a4_alt is not None:
        payload["coefficients"]["a4_alt_bracket"] = _uv_obj(hc.a4_alt)
    text = _json_dump(payload, args.json)
    if not args.json:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# rw
# ---------------------------------------------------------------------------

def cmd_rw(args) -> int:
    try:
        warp = warped.parse_warp(args.f)
        a, b = args.interval
        model = warped.RWModel(a, b, warp, curv=args.curv, base_vol=args.base_vol)
        coeffs = warped.rw_spectral_coeffs(model)
        volumes = warped.rw_lower_volumes(model)
        # node-doubling convergence diagnostic on the volume integrand
        g1, g2 = warped.gauss_legendre_check(
            lambda t: warp(t) ** 3 * args.base_vol, a, b)
    except (warped.WarpSyntaxError, warped.WarpDomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    tol = warped.quad_tolerance()
    converged = abs(g1 - g2) <= max(abs(g2), 1.0) * max(1e3 * tol, 1e-12)
    payload = {
        "command": "rw",
        "inputs": {"f": args.f, "parsed": warp.to_string(),
                   "interval": [a, b], "curv": args.curv,
                   "base_vol": args.base_vol, "quad_tol": tol},
        "coefficients": {k: _num(v) for k, v in coeffs.as_dict().items()},
        "consistency": {k: _num(v) for k, v in coeffs.diagnostics.items()},
        "lower_volumes": {k: _num(v) for k, v in volumes.items()},
        "convergence": {"gauss_legendre_64": g1, "gauss_legendre_128": g2,
                        "converged": converged},
        "checks": [{"name": "quadrature-convergence", "pass": bool(converged)}],
    }
    if args.cutoff_scale is not None:
        L = args.cutoff_scale
        moments = heat.spectral_moments(lambda s: math.exp(-s))
        series = {}
        for name, a4 in (("printed", coeffs.a4_printed), ("derived", coeffs.a4_derived)):
            series[name] = (L ** 4 * moments[4] * coeffs.a0
                            + L ** 3 * moments[3] * coeffs.a1
                            + L ** 2 * moments[2] * coeffs.a2
                            + L * moments[1] * coeffs.a3
                            + moments[0] * a4)
        payload["spectral_action"] = {"cutoff": "exp(-s)", "scale": L,
                                      "asymptotic": series}
    text = _json_dump(payload, args.json)
    if not args.json:
        print(text)
    return 0 if converged else 1


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def cmd_oracle(args) -> int:
    results = []
    if args.count > 0:
        results.append(oracles.run_trace_oracle(args.seed, args.count))
        results.append(oracles.run_quadrature_oracle(args.seed, args.count))
        results.append(oracles.run_ad_oracle(args.seed, args.count))
    payload = {
        "command": "oracle",
        "inputs": {"seed": args.seed, "count": args.count},
        "suites": results,
        "checks": [{"name": r["name"], "pass": r["pass"]} for r in results],
    }
    text = _json_dump(payload, args.json)
    if not args.json:
        print(text)
    return 0 if all(r["pass"] for r in results) else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _powers(text: str) -> tuple[int, int]:
    try:
        p1, p2 = (int(x) for x in text.split(","))
        return p1, p2
    except ValueError:
        raise argparse.ArgumentTypeError("powers must look like '1,1'")


def _interval(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
        return a, b
    except ValueError:
        raise argparse.ArgumentTypeError("interval must look like '0,1'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wres",
        description="Exact boundary-residue tables, heat coefficients and "
                    "warped-model spectral actions.")
    sub = parser.add_subparsers(dest="command", required=True)

    vb = sub.add_parser("verify-boundary", help="run a registered boundary scenario")
    vb.add_argument("--dim", type=int, required=True,
                    help="boundary dimension scenario (3, 4, 5 or 6)")
    vb.add_argument("--powers", type=_powers, required=True, metavar="P1,P2")
    vb.add_argument("--p", type=int, default=None, help="override leaf dimension")
    vb.add_argument("--q", type=int, default=None, help="override codimension")
    vb.add_argument("--json", metavar="PATH", default=None)
    vb.set_defaults(fn=cmd_verify_boundary)

    he = sub.add_parser("heat", help="heat coefficients from a curvature file")
    he.add_argument("--config", required=True, metavar="FILE")
    he.add_argument("--json", metavar="PATH", default=None)
    he.set_defaults(fn=cmd_heat)

    rw = sub.add_parser("rw", help="warped-model spectral action")
    rw.add_argument("--f", required=True, metavar="EXPR")
    rw.add_argument("--interval", type=_interval, required=True, metavar="A,B")
    rw.add_argument("--curv", type=float, default=0.0)
    rw.add_argument("--base-vol", type=float, default=1.0)
    rw.add_argument("--lambda", dest="cutoff_scale", type=float, default=None)
    rw.add_argument("--json", metavar="PATH", default=None)
    rw.set_defaults(fn=cmd_rw)

    orc = sub.add_parser("oracle", help="randomized oracle suites")
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--count", type=int, default=100)
    orc.add_argument("--json", metavar="PATH", default=None)
    orc.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
