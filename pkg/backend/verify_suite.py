"""
Instance checks of the degree formulas, polygon shapes and irreducibility
claims for the Misiurewicz family

Every check returns CheckReport rows; a row passes exactly when its
canonical expected and actual renderings are equal.
"""

import hashlib
import logging
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from config import DEFAULT_JOBS, DEFAULT_PRECISION
from intpoly import IntPoly, NotDivisible, ResourceGuardError, mul
from modp_factor import NoUsablePrime
from orbit_dynamics import (
    InvalidParameter,
    OrbitTable,
    Route,
    bd,
    decomposition_terms,
    expected_degrees,
    expected_misiurewicz_degree,
    expected_sigma_tau_degrees,
    get_orbit_table,
    misiurewicz,
    r_closed_form,
    repunit,
    sigma_tau,
    tau_product_form,
    validate_prime,
)
from padic_newton import (
    PrecisionTooLow,
    PrincipalPolygon,
    ZeroPolynomial,
    gauss_valuation,
    ord_p,
    principal_polygon,
    qp_factor_degree_bound,
)

logger = logging.getLogger("verify")

# Polynomials up to this degree are rendered in full, larger ones by digest
RENDER_MAX_DEGREE = 12


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    params: Dict = field(default_factory=dict)
    expected: str = ""
    actual: str = ""
    passed: bool = False
    detail: str = ""

    @classmethod
    def compare(cls, check_id: str, params: Dict, expected, actual, detail: str = "") -> "CheckReport":
        expected, actual = str(expected), str(actual)
        return cls(check_id, params, expected, actual, expected == actual, detail)

    def to_json(self) -> Dict:
        row = {
            "check_id": self.check_id,
            "params": self.params,
            "expected": self.expected,
            "actual": self.actual,
            "passed": self.passed,
        }
        if self.detail:
            row["detail"] = self.detail
        return row


def canonical(f: IntPoly) -> str:
    """Exact rendering: the polynomial itself when small, else degree + sha256 of the coefficients"""
    if f.is_zero() or f.degree <= RENDER_MAX_DEGREE:
        return str(f)
    digest = hashlib.sha256(",".join(str(c) for c in f.coeffs).encode()).hexdigest()
    return f"deg {f.degree} sha256:{digest}"


def polygon_of(vertices) -> PrincipalPolygon:
    return PrincipalPolygon(tuple(vertices), leading_gap=vertices[0][0])


def _table(d: int, table: Optional[OrbitTable]) -> OrbitTable:
    return table if table is not None else get_orbit_table(d)


def check_orbit_recurrence(d: int, N: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """Every stored (r_n, s_n) follows from its predecessor"""
    t = _table(d, table)
    t.extend(N)
    bad = [n for n in t.check_recurrence() if n <= N]
    return [CheckReport.compare("orbit_recurrence", {"d": d, "N": N}, "[]", str(bad))]


def check_rs_degrees(d: int, N: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    t = _table(d, table)
    reports = []
    for n in range(2, N + 1):
        deg_r, deg_s, i, j = expected_degrees(d, n)
        reports.append(CheckReport.compare(
            "rs_degrees", {"d": d, "n": n},
            (deg_r, deg_s), (t.r(n).degree, t.s(n).degree),
            detail=f"n = {d}*{i} + {j}",
        ))
    return reports


def check_s_polygon(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """N_d^-(s_m) = L((0, D_m), (d^(m-1), d^(m-1)))"""
    t = _table(d, table)
    reports = []
    for m in range(2, M + 1):
        top = d ** (m - 1)
        expected = polygon_of([(0, repunit(d, m)), (top, top)])
        reports.append(CheckReport.compare(
            "s_polygon", {"d": d, "m": m, "p": d}, expected, principal_polygon(t.s(m), d)
        ))
    return reports


def check_sigma_polygon(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """
    N_d^-(sigma_m) = L((0, D_m), (d^(m-1), d^(m-1) + 1)) for m >= 3

    At m = 2, s_1 is constant and sigma_2 = (b+1) d^(d+1) has no negative slope,
    so the shape is only claimed from m = 3 on.
    """
    reports = []
    for m in range(3, M + 1):
        sigma, _ = sigma_tau(d, m, _table(d, table))
        top = d ** (m - 1)
        expected = polygon_of([(0, repunit(d, m)), (top, top + 1)])
        reports.append(CheckReport.compare(
            "sigma_polygon", {"d": d, "m": m, "p": d}, expected, principal_polygon(sigma, d)
        ))
    return reports


def check_tau_identity(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """tau_m = -(bd)^m G_{m-1} ... G_1"""
    reports = []
    for m in range(1, M + 1):
        _, tau = sigma_tau(d, m, _table(d, table))
        reports.append(CheckReport.compare(
            "tau_identity", {"d": d, "m": m},
            canonical(tau_product_form(d, m, table)), canonical(tau),
        ))
    return reports


def expected_g_polygon(d: int, m: int) -> PrincipalPolygon:
    x = d ** m - d ** (m - 1) - 1
    return polygon_of([(0, d ** m - 1), (x, x)])


def expected_tau_polygon(d: int, m: int) -> PrincipalPolygon:
    return polygon_of([(d ** i + (m - 1 - i), d ** i * repunit(d, m - i)) for i in range(m)])


def check_theorem_polygons(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """N_d^-(G_m) and N_d^-(tau_m) against their closed forms"""
    reports = []
    for m in range(1, M + 1):
        g = misiurewicz(d, m, table=table).poly
        _, tau = sigma_tau(d, m, _table(d, table))
        reports.append(CheckReport.compare(
            "theorem_polygons.G", {"d": d, "m": m, "p": d},
            expected_g_polygon(d, m), principal_polygon(g, d),
        ))
        reports.append(CheckReport.compare(
            "theorem_polygons.tau", {"d": d, "m": m, "p": d},
            expected_tau_polygon(d, m), principal_polygon(tau, d),
        ))
    return reports


def check_fk_geometry(d: int, m: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """
    Every vertex of N_d^-(F_k) lies on or above the line through (1, d^m) and
    (X, X), X = d^m - d^(m-1); bd G_m has its vertices exactly there
    """
    top = d ** m
    x_end = top - d ** (m - 1)
    params = {"d": d, "m": m, "p": d}
    reports = []

    def below(x: int, y: int) -> bool:
        return (y - top) * (x_end - 1) < (x_end - top) * (x - 1)

    terms = decomposition_terms(d, m, _table(d, table)).terms
    for k, term in enumerate(terms):
        polygon = principal_polygon(term, d)
        offending = [(x, y) for x, y in polygon.vertices if below(x, y)]
        actual = "on or above" if not offending else f"below at {offending}"
        reports.append(CheckReport.compare(
            f"fk_geometry.F{k}", params, "on or above", actual, detail=str(polygon)
        ))

    bd_g = mul(bd(d), misiurewicz(d, m, table=table).poly)
    reports.append(CheckReport.compare(
        "fk_geometry.pin_first", params, top, ord_p(bd_g[1], d)
    ))
    reports.append(CheckReport.compare(
        "fk_geometry.pin_last", params, x_end, ord_p(bd_g[x_end], d)
    ))
    if d >= 3:
        holds = x_end - 1 >= repunit(d, m) * (d - 2)
        reports.append(CheckReport.compare(
            "fk_geometry.case_b", params, True, holds,
            detail=f"{x_end - 1} >= {repunit(d, m)}*{d - 2}",
        ))
    return reports


def ratio_report(d: int, m: int, table: Optional[OrbitTable] = None) -> Dict:
    """Polygon bound over degree as an exact fraction, against 1 - 1/d^d"""
    g = misiurewicz(d, m, table=table).poly
    bound, _ = qp_factor_degree_bound(g, d)
    ratio = Fraction(bound, g.degree)
    limit = 1 - Fraction(1, d ** d)
    return {
        "d": d,
        "m": m,
        "degree": g.degree,
        "bound": bound,
        "ratio": str(ratio),
        "limit": str(limit),
        "at_least_limit": ratio >= limit,
    }


def check_main_theorem(d: int, M: int, table: Optional[OrbitTable] = None,
                       primes=None, precision: int = DEFAULT_PRECISION) -> List[CheckReport]:
    """Factor-degree bound for every m <= M, irreducibility for 2 <= m <= d"""
    from certificate import CertificateRoute, Verdict, certify

    reports = []
    for m in range(1, M + 1):
        params = {"d": d, "m": m, "p": d}
        info = ratio_report(d, m, table)
        target = d ** m - d ** (m - 1) - 1
        actual = f"bound >= {target}" if info["bound"] >= target else f"bound = {info['bound']}"
        reports.append(CheckReport.compare(
            "main_theorem.bound", params, f"bound >= {target}", actual,
            detail=f"ratio {info['ratio']} (limit {info['limit']})",
        ))
        if 2 <= m <= d:
            cert = certify(d, m, primes=primes, precision=precision, table=table)
            if m >= 3:
                expected = f"{Verdict.IRREDUCIBLE_OVER_Q.value}/{CertificateRoute.POLYGON.value}"
                actual = f"{cert.verdict.value}/{cert.route.value}"
            else:
                expected = Verdict.IRREDUCIBLE_OVER_Q.value
                actual = cert.verdict.value
            reports.append(CheckReport.compare("main_theorem.verdict", params, expected, actual))
    return reports


def check_r_closed_form(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    t = _table(d, table)
    return [
        CheckReport.compare(
            "r_closed_form", {"d": d, "m": m},
            canonical(r_closed_form(d, m, t)), canonical(t.r(m)),
        )
        for m in range(3, M + 1)
    ]


def check_valuation_chains(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """v_0(s_m) = D_m, and V_d(r_m) > V_d(s_m) >= d^(m-1) from m = 2 on"""
    t = _table(d, table)
    reports = []
    for m in range(1, M + 1):
        params = {"d": d, "m": m, "p": d}
        reports.append(CheckReport.compare(
            "valuation_chains.v0", params, repunit(d, m), ord_p(t.s(m)[0], d)
        ))
        if m >= 2:
            v_r, v_s = gauss_valuation(t.r(m), d), gauss_valuation(t.s(m), d)
            floor = d ** (m - 1)
            expected = f"V(r) > V(s) >= {floor}"
            actual = expected if v_r > v_s >= floor else f"V(r) = {v_r}, V(s) = {v_s}"
            reports.append(CheckReport.compare("valuation_chains.V", params, expected, actual))
    return reports


def check_degree_bound(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """deg G_m against deg tau_{m+1} - deg tau_m - 1 and (d-1) max(deg sigma_m, deg tau_m)"""
    t = _table(d, table)
    reports = []
    for m in range(1, M + 1):
        params = {"d": d, "m": m}
        g = misiurewicz(d, m, table=table).poly
        sigma, tau = sigma_tau(d, m, t)
        _, tau_next = sigma_tau(d, m + 1, t)
        reports.append(CheckReport.compare(
            "degree_bound.tau_difference", params,
            tau_next.degree - tau.degree - 1, g.degree,
        ))
        reports.append(CheckReport.compare(
            "degree_bound.closed_form", params, expected_misiurewicz_degree(d, m), g.degree
        ))
        ceiling = (d - 1) * max(sigma.degree, tau.degree)
        actual = f"<= {ceiling}" if g.degree <= ceiling else f"= {g.degree}"
        reports.append(CheckReport.compare("degree_bound.ceiling", params, f"<= {ceiling}", actual))
        if m >= 2:
            reports.append(CheckReport.compare(
                "degree_bound.sigma_tau", params,
                expected_sigma_tau_degrees(d, m), (sigma.degree, tau.degree),
            ))
    return reports


def check_local_splitting(d: int = 3, m: int = 4, table: Optional[OrbitTable] = None,
                          precision: int = DEFAULT_PRECISION) -> List[CheckReport]:
    """
    G_m irreducible over Q while over Q_d it splits into the polygon factor
    and linear factors (d=3, m=4: 53 + 1 + 1)
    """
    from certificate import Verdict, certify

    params = {"d": d, "m": m, "p": d}
    g = misiurewicz(d, m, table=table).poly
    bound, _ = qp_factor_degree_bound(g, d)
    cert = certify(d, m, precision=precision, table=table)
    return [
        CheckReport.compare("local_splitting.degree", params, expected_misiurewicz_degree(d, m), g.degree),
        CheckReport.compare("local_splitting.forced_factor", params, d ** m - d ** (m - 1) - 1, bound),
        CheckReport.compare("local_splitting.simple_roots", params, g.degree - bound, cert.padic_root_count),
        CheckReport.compare("local_splitting.verdict", params, Verdict.IRREDUCIBLE_OVER_Q.value, cert.verdict.value),
    ]


def check_route_equality(d: int, M: int, table: Optional[OrbitTable] = None) -> List[CheckReport]:
    """Direct, tau and (where small enough) literal routes give the same G_m"""
    reports = []
    for m in range(1, M + 1):
        params = {"d": d, "m": m}
        direct = canonical(misiurewicz(d, m, Route.DIRECT, table=table).poly)
        reports.append(CheckReport.compare(
            "route_equality.via_tau", params,
            direct, canonical(misiurewicz(d, m, Route.VIA_TAU, table=table).poly),
        ))
        try:
            literal = misiurewicz(d, m, Route.LITERAL, table=table).poly
        except ResourceGuardError:
            continue
        reports.append(CheckReport.compare("route_equality.literal", params, direct, canonical(literal)))
    return reports


CHECKS = {
    "orbit_recurrence": check_orbit_recurrence,
    "rs_degrees": check_rs_degrees,
    "r_closed_form": check_r_closed_form,
    "valuation_chains": check_valuation_chains,
    "s_polygon": check_s_polygon,
    "sigma_polygon": check_sigma_polygon,
    "tau_identity": check_tau_identity,
    "theorem_polygons": check_theorem_polygons,
    "fk_geometry": check_fk_geometry,
    "degree_bound": check_degree_bound,
    "route_equality": check_route_equality,
    "main_theorem": check_main_theorem,
    "local_splitting": check_local_splitting,
}

# Failures of the exact identities become failing rows instead of aborting the run
_IDENTITY_ERRORS = (NotDivisible, ZeroPolynomial, PrecisionTooLow, NoUsablePrime, ValueError)

_corrupted_tables: Dict[Tuple[int, int, int], OrbitTable] = {}


def _suite_table(d: int, corrupt: Optional[Tuple[int, int]]) -> Optional[OrbitTable]:
    if corrupt is None:
        return None
    n, delta = corrupt
    key = (d, n, delta)
    if key not in _corrupted_tables:
        logger.warning(f"d={d}: running on an orbit table with s_{n} shifted by {delta}")
        _corrupted_tables[key] = get_orbit_table(d).corrupted(n, delta)
    return _corrupted_tables[key]


def _run_task(task) -> List[CheckReport]:
    """Pool worker; task = (check name, d, args, corrupt)"""
    name, d, args, corrupt = task
    try:
        return CHECKS[name](d, *args, table=_suite_table(d, corrupt))
    except _IDENTITY_ERRORS as e:
        logger.error(f"{name} d={d} {args}: {type(e).__name__}: {e}")
        return [CheckReport(f"{name}.error", {"d": d, "args": list(args)},
                            "no exception", f"{type(e).__name__}: {e}", False)]


@dataclass
class SuiteResult:
    reports: List[CheckReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    def summary(self) -> Dict:
        by_check: Dict[str, Dict[str, int]] = {}
        for report in self.reports:
            family = report.check_id.split(".")[0]
            counts = by_check.setdefault(family, {"passed": 0, "failed": 0})
            counts["passed" if report.passed else "failed"] += 1
        failed = sum(1 for report in self.reports if not report.passed)
        return {
            "total": len(self.reports),
            "passed": len(self.reports) - failed,
            "failed": failed,
            "all_passed": failed == 0,
            "by_check": by_check,
        }


def suite_tasks(d: int, max_m: int, max_n: Optional[int] = None,
                corrupt: Optional[Tuple[int, int]] = None) -> List[Tuple]:
    """The check list in its fixed report order"""
    n_top = max_n if max_n is not None else max_m + 1
    tasks = [("orbit_recurrence", d, (n_top,), corrupt)]
    if n_top >= 2:
        tasks.append(("rs_degrees", d, (n_top,), corrupt))
    if max_m >= 3:
        tasks.append(("r_closed_form", d, (max_m,), corrupt))
    tasks.append(("valuation_chains", d, (max_m,), corrupt))
    if max_m >= 2:
        tasks.append(("s_polygon", d, (max_m,), corrupt))
    if max_m >= 3:
        tasks.append(("sigma_polygon", d, (max_m,), corrupt))
    tasks.append(("tau_identity", d, (max_m,), corrupt))
    tasks.append(("theorem_polygons", d, (max_m,), corrupt))
    for m in range(1, max_m + 1):
        tasks.append(("fk_geometry", d, (m,), corrupt))
    tasks.append(("degree_bound", d, (max_m,), corrupt))
    tasks.append(("route_equality", d, (max_m,), corrupt))
    if max_m >= 2:
        tasks.append(("main_theorem", d, (max_m,), corrupt))
    if d == 3 and max_m >= 4:
        tasks.append(("local_splitting", d, (4,), corrupt))
    return tasks


def run_suite(d: int, max_m: int, max_n: Optional[int] = None, jobs: int = DEFAULT_JOBS,
              corrupt: Optional[Tuple[int, int]] = None) -> SuiteResult:
    """
    Run every check for one d

    Args:
        d: prime degree >= 3
        max_m: largest portrait length checked
        max_n: largest orbit index for the degree checks (default max_m + 1)
        jobs: worker processes; reports are merged in task order either way
        corrupt: (n, delta) shifts the constant term of s_n before checking
    """
    validate_prime(d, minimum=3)
    if max_m < 1:
        raise InvalidParameter(f"max_m must be >= 1, got {max_m}")
    tasks = suite_tasks(d, max_m, max_n, corrupt)
    logger.info(f"d={d}: {len(tasks)} check tasks, {jobs} job(s)")

    if jobs > 1:
        with multiprocessing.Pool(processes=min(jobs, len(tasks))) as pool:
            chunks = pool.map(_run_task, tasks)
    else:
        chunks = [_run_task(task) for task in tasks]

    return SuiteResult([report for chunk in chunks for report in chunk])
