#!/usr/bin/env python3
"""
Command-line entry point: orbit polynomials, Misiurewicz polynomials,
Newton polygons, the verify suite and irreducibility certificates

Exit codes: 0 success, 1 check failure or no verdict, 2 usage,
3 resource guard, 4 broken exact identity.
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

import config
from certificate import Verdict, audit_certificate, certify
from database import OrbitDatabase
from exporters import (
    build_manifest,
    poly_csv,
    poly_record,
    polygon_csv,
    polygon_record,
    reports_jsonl,
    str_polygon,
    write_json,
    write_text,
)
from intpoly import NotDivisible, ResourceGuardError, set_size_cap
from modp_factor import NoUsablePrime
from orbit_dynamics import (
    FamilyParams,
    InvalidParameter,
    Route,
    expected_degrees,
    expected_misiurewicz_degree,
    get_orbit_table,
    misiurewicz,
    named_polynomial,
    set_cache_path,
    validate_prime,
)
from padic_newton import (
    PowerBoundTooLarge,
    PrecisionTooLow,
    ZeroPolynomial,
    newton_polygon,
    principal_polygon,
    qp_factor_degree_bound,
)
from verify_suite import ratio_report, run_suite

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_IDENTITY = 4

# Built-in defaults; flag > config file > environment (config.py) > these
CONFIG_DEFAULTS = {
    "format": "json",
    "out": None,
    "manifest": None,
    "size_cap": config.SIZE_CAP,
    "precision": config.DEFAULT_PRECISION,
    "jobs": config.DEFAULT_JOBS,
    "cache": config.CACHE_PATH,
    "aux_primes": None,
    "p": None,
    "verbose": False,
}


def _parse_primes(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated primes, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=config.EXPORT_FORMATS, default=None,
                        help="Output format (default json)")
    common.add_argument("--out", default=None, help="Write output to this file instead of stdout")
    common.add_argument("--config", default=None, help="JSON file with the same keys as the flags")
    common.add_argument("--manifest", default=None, help="Write a reproduction manifest to this file")
    common.add_argument("--size-cap", type=int, default=None,
                        help="Resource guard: max degree x coefficient bits")
    common.add_argument("--precision", type=int, default=None, help="p-adic lifting precision")
    common.add_argument("--cache", default=None, help="SQLite orbit cache file")
    common.add_argument("--verbose", action="store_true", default=None, help="Debug logging on stderr")

    parser = argparse.ArgumentParser(
        description="Misiurewicz polynomials, p-adic Newton polygons and irreducibility certificates"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_orbit = sub.add_parser("orbit", parents=[common], help="Dump r_n, s_n")
    p_orbit.add_argument("--d", type=int, required=True)
    p_orbit.add_argument("--n", type=int, required=True)
    p_orbit.add_argument("--all", action="store_true", help="Dump every entry 0..n")

    p_mis = sub.add_parser("misiurewicz", parents=[common], help="Build G_m")
    p_mis.add_argument("--d", type=int, required=True)
    p_mis.add_argument("--m", type=int, required=True)
    p_mis.add_argument("--p", type=int, default=None, help="Polygon prime (default d)")
    p_mis.add_argument("--route", choices=["direct", "via_tau", "literal", "both"], default="direct")

    p_poly = sub.add_parser("polygon", parents=[common], help="Newton polygon of a named polynomial")
    p_poly.add_argument("--d", type=int, required=True)
    p_poly.add_argument("--name", required=True, help="r, s, sigma, tau, G or F_k")
    p_poly.add_argument("--index", type=int, required=True, help="n for r/s, m otherwise")
    p_poly.add_argument("--p", type=int, default=None)
    p_poly.add_argument("--full", action="store_true", help="All slopes, not only N_p^-")

    p_dump = sub.add_parser("dump", parents=[common], help="Coefficients of a named polynomial")
    p_dump.add_argument("--d", type=int, required=True)
    p_dump.add_argument("--name", required=True)
    p_dump.add_argument("--index", type=int, required=True)

    p_verify = sub.add_parser("verify", parents=[common], help="Run the check suite")
    p_verify.add_argument("--d", type=int, required=True)
    p_verify.add_argument("--max-m", type=int, required=True)
    p_verify.add_argument("--max-n", type=int, default=None)
    p_verify.add_argument("--jobs", type=int, default=None)
    p_verify.add_argument("--inject-corruption", type=int, default=None, metavar="N",
                          help="Test hook: shift the constant term of s_N by 1")

    p_cert = sub.add_parser("certify", parents=[common], help="Irreducibility certificate for G_m")
    p_cert.add_argument("--d", type=int, required=True)
    p_cert.add_argument("--m", type=int, required=True)
    p_cert.add_argument("--p", type=int, default=None)
    p_cert.add_argument("--aux-primes", type=_parse_primes, default=None,
                        help="Comma-separated auxiliary primes (default: first usable primes)")

    p_cache = sub.add_parser("cache", parents=[common], help="Inspect, export or clear the orbit cache")
    p_cache.add_argument("action", choices=["stats", "export", "clear"])
    p_cache.add_argument("--d", type=int, default=None, help="Degree to export or clear (default: all for clear)")

    return parser


def resolve_config(args: argparse.Namespace) -> Dict:
    """Merge flags over the config file over the environment defaults"""
    file_values = {}
    if args.config:
        with open(args.config) as f:
            file_values = {k.replace("-", "_"): v for k, v in json.load(f).items()}

    resolved = {}
    for key, default in CONFIG_DEFAULTS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in file_values:
            resolved[key] = file_values[key]
        else:
            resolved[key] = default
    if isinstance(resolved["aux_primes"], str):
        resolved["aux_primes"] = _parse_primes(resolved["aux_primes"])
    if resolved["size_cap"] <= 0 or resolved["precision"] < 1 or resolved["jobs"] < 1:
        raise InvalidParameter("size cap, precision and jobs must be positive")
    return resolved


def _emit(data, conf: Dict, csv_text: Optional[str] = None, pretty=None):
    fmt = conf["format"]
    if fmt == "csv" and csv_text is not None:
        write_text(csv_text, conf["out"])
    elif fmt == "pretty" and pretty is not None:
        pretty()
    else:
        write_json(data, conf["out"])


def _banner(title: str):
    print("=" * 60)
    print(title)
    print("=" * 60)


def cmd_orbit(args, conf) -> int:
    validate_prime(args.d, minimum=3)
    table = get_orbit_table(args.d)
    table.extend(args.n)
    indices = range(args.n + 1) if args.all else [args.n]
    records = []
    for n in indices:
        records.append(poly_record("r", table.r(n), d=args.d, n=n))
        records.append(poly_record("s", table.s(n), d=args.d, n=n))
    data = {"d": args.d, "n": args.n, "entries": records}
    if args.n >= 2:
        deg_r, deg_s, i, j = expected_degrees(args.d, args.n)
        data["expected_degrees"] = {"r": deg_r, "s": deg_s, "i": i, "j": j}

    def pretty():
        _banner(f"Orbit of [1, 1] under phi_b, d={args.d}")
        for n in indices:
            print(f"\nn={n}: deg r={table.r(n).degree}, deg s={table.s(n).degree}")
            print(f"  r_{n} = {table.r(n)}")
            print(f"  s_{n} = {table.s(n)}")

    _emit(data, conf, poly_csv(records), pretty)
    return EXIT_OK


def cmd_misiurewicz(args, conf) -> int:
    params = FamilyParams(args.d, args.m, conf["p"])
    routes = [Route.DIRECT, Route.VIA_TAU] if args.route == "both" else [Route(args.route)]
    built = [misiurewicz(args.d, args.m, route) for route in routes]
    g = built[0].poly
    agree = all(other.poly == g for other in built[1:])
    if not agree:
        logger.error(f"d={args.d} m={args.m}: routes {[r.value for r in routes]} disagree")

    polygon = principal_polygon(g, params.p)
    bound, _ = qp_factor_degree_bound(g, params.p)
    data = {
        "d": args.d,
        "m": args.m,
        "p": params.p,
        "routes": [route.value for route in routes],
        "routes_agree": agree,
        "degree": g.degree,
        "expected_degree": expected_misiurewicz_degree(args.d, args.m),
        "polygon": str(polygon),
        "polygon_bound": bound,
        "poly": g.to_json(),
    }

    def pretty():
        _banner(f"Misiurewicz polynomial G_{args.m}, d={args.d}")
        print(f"Degree: {g.degree} (closed form {data['expected_degree']})")
        print(f"N_{params.p}^-(G_{args.m}) = {polygon}")
        print(f"Forced Q_{params.p} factor degree: {bound}")
        if len(routes) > 1:
            print(f"Routes {' / '.join(r.value for r in routes)}: {'identical' if agree else 'DIFFERENT'}")
        if g.degree <= 12:
            print(f"G_{args.m} = {g}")

    _emit(data, conf, poly_csv([poly_record("G", g, d=args.d, m=args.m)]), pretty)
    return EXIT_OK if agree else EXIT_IDENTITY


def cmd_polygon(args, conf) -> int:
    validate_prime(args.d, minimum=3)
    p = conf["p"] or args.d
    validate_prime(p, name="p")
    f = named_polynomial(args.d, args.name, args.index)
    polygon = newton_polygon(f, p) if args.full else principal_polygon(f, p)
    params = {"d": args.d, "index": args.index, "p": p}
    data = polygon_record(args.name, polygon, **params)

    def pretty():
        _banner(f"{'N' if args.full else 'N^-'}_{p}({args.name}_{args.index}), d={args.d}")
        print(str_polygon(polygon))

    _emit(data, conf, polygon_csv(args.name, polygon, **params), pretty)
    return EXIT_OK


def cmd_dump(args, conf) -> int:
    validate_prime(args.d, minimum=3)
    f = named_polynomial(args.d, args.name, args.index)
    record = poly_record(args.name, f, d=args.d, index=args.index)

    def pretty():
        print(f"{args.name}_{args.index} (d={args.d}, degree {f.degree}) = {f}")

    _emit(record, conf, poly_csv([record]), pretty)
    return EXIT_OK


def cmd_verify(args, conf) -> int:
    corrupt = (args.inject_corruption, 1) if args.inject_corruption is not None else None
    result = run_suite(args.d, args.max_m, args.max_n, jobs=conf["jobs"], corrupt=corrupt)
    summary = result.summary()
    summary["ratios"] = [ratio_report(args.d, m) for m in range(1, args.max_m + 1)] if corrupt is None else []

    if conf["format"] == "pretty":
        _banner(f"Verify suite, d={args.d}, m <= {args.max_m}")
        for report in result.reports:
            if not report.passed:
                print(f"FAIL {report.check_id} {report.params}: expected {report.expected}, got {report.actual}")
        for family, counts in summary["by_check"].items():
            print(f"  {family:<20} {counts['passed']} passed, {counts['failed']} failed")
        for ratio in summary["ratios"]:
            print(f"  m={ratio['m']}: bound/degree = {ratio['ratio']} (limit {ratio['limit']})")
        print(f"\nTotal: {summary['passed']}/{summary['total']} passed")
    else:
        rows = [report.to_json() for report in result.reports]
        rows.append({"summary": summary})
        write_text(reports_jsonl(rows), conf["out"])
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def cmd_certify(args, conf) -> int:
    cert = certify(args.d, args.m, primes=conf["aux_primes"], precision=conf["precision"], p=conf["p"])
    problems = audit_certificate(cert)
    if problems:
        for problem in problems:
            logger.error(f"certificate audit: {problem}")
        return EXIT_IDENTITY

    def pretty():
        _banner(f"Irreducibility certificate for G_{args.m}, d={args.d}")
        print(f"Verdict: {cert.verdict.value} (route {cert.route.value})")
        print(f"Over Q_{cert.p}: {cert.local_verdict.value}")
        print("\nEvidence:")
        for line in cert.narrative:
            print(f"  - {line}")

    _emit(cert.to_json(), conf, pretty=pretty)
    return EXIT_CHECK_FAILED if cert.verdict == Verdict.INCONCLUSIVE else EXIT_OK


def cmd_cache(args, conf) -> int:
    path = conf["cache"]
    if not path:
        raise InvalidParameter("no cache file; pass --cache or set MISIUREWICZ_CACHE_PATH")
    if args.d is not None:
        validate_prime(args.d, minimum=3)
    db = OrbitDatabase(path)

    if args.action == "clear":
        db.clear(args.d)
        set_cache_path(path)
        logger.info(f"cleared {'d=' + str(args.d) if args.d else 'every orbit'} in {path}")
        return EXIT_OK

    if args.action == "export":
        if args.d is None or not conf["out"]:
            raise InvalidParameter("cache export needs --d and --out")
        if conf["format"] == "csv":
            db.export_to_csv(conf["out"], args.d)
        else:
            db.export_to_json(conf["out"], args.d)
        return EXIT_OK

    stats = db.get_statistics()

    def pretty():
        _banner(f"Orbit cache {path}")
        if not stats:
            print("(empty)")
        for row in stats:
            print(f"  d={row['d']}: {row['entries']} entries, n <= {row['max_n']}, "
                  f"deg r <= {row['max_r_degree']}, deg s <= {row['max_s_degree']}")

    _emit({"path": path, "orbits": stats}, conf, pretty=pretty)
    return EXIT_OK


COMMANDS = {
    "orbit": cmd_orbit,
    "misiurewicz": cmd_misiurewicz,
    "polygon": cmd_polygon,
    "dump": cmd_dump,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "cache": cmd_cache,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        conf = resolve_config(args)
    except (InvalidParameter, OSError, json.JSONDecodeError, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if conf["verbose"] else getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    set_size_cap(conf["size_cap"])
    if conf["cache"]:
        set_cache_path(conf["cache"])

    if conf["manifest"]:
        run_config = {k: v for k, v in vars(args).items() if k != "config"}
        run_config.update({k: conf[k] for k in ("size_cap", "precision", "jobs", "aux_primes", "p")})
        write_json(build_manifest(args.command, run_config), conf["manifest"])

    try:
        return COMMANDS[args.command](args, conf)
    except InvalidParameter as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceGuardError, PowerBoundTooLarge) as e:
        logger.error(f"resource guard: {e}")
        return EXIT_RESOURCE
    except NoUsablePrime as e:
        logger.error(str(e))
        return EXIT_CHECK_FAILED
    except (NotDivisible, ZeroPolynomial, PrecisionTooLow) as e:
        logger.error(f"identity violation: {type(e).__name__}: {e}")
        return EXIT_IDENTITY


if __name__ == "__main__":
    raise SystemExit(main())
