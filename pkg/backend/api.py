#!/usr/bin/env python3
"""
Flask API server exposing orbits, Misiurewicz polynomials, polygons,
certificates and the verify suite as JSON
"""

from flask import Flask, jsonify, request
from flask_cors import CORS

from certificate import certify
from config import API_HOST, API_PORT
from exporters import poly_record, polygon_record
from intpoly import ResourceGuardError
from orbit_dynamics import (
    FamilyParams,
    InvalidParameter,
    Route,
    expected_misiurewicz_degree,
    get_orbit_table,
    misiurewicz,
    named_polynomial,
    validate_prime,
)
from padic_newton import PowerBoundTooLarge, newton_polygon, principal_polygon
from verify_suite import run_suite

app = Flask(__name__)
CORS(app)  # Enable CORS for browser clients

# Keep the synchronous verify endpoint small
API_MAX_VERIFY_M = 5


def _error(e: Exception):
    """Map library exceptions to HTTP status codes"""
    if isinstance(e, (InvalidParameter, ValueError)):
        status = 400
    elif isinstance(e, (ResourceGuardError, PowerBoundTooLarge)):
        status = 413
    else:
        status = 500
    return jsonify({"error": str(e), "type": type(e).__name__}), status


@app.route("/api/health", methods=["GET"])
def health_check():
    """Health check endpoint"""
    return jsonify({"status": "healthy"})


@app.route("/api/orbit/<int:d>/<int:n>", methods=["GET"])
def get_orbit(d, n):
    """r_n and s_n"""
    try:
        validate_prime(d, minimum=3)
        table = get_orbit_table(d)
        return jsonify({
            "d": d,
            "n": n,
            "r": poly_record("r", table.r(n), d=d, n=n),
            "s": poly_record("s", table.s(n), d=d, n=n),
        })
    except Exception as e:
        return _error(e)


@app.route("/api/misiurewicz/<int:d>/<int:m>", methods=["GET"])
def get_misiurewicz(d, m):
    """G_m by the requested route (?route=direct|via_tau|literal)"""
    try:
        FamilyParams(d, m)
        route = Route(request.args.get("route", Route.DIRECT.value))
        g = misiurewicz(d, m, route)
        return jsonify({
            **g.to_json(),
            "expected_degree": expected_misiurewicz_degree(d, m),
            "polygon": str(principal_polygon(g.poly, d)),
        })
    except Exception as e:
        return _error(e)


@app.route("/api/polygon/<int:d>/<int:index>", methods=["GET"])
def get_polygon(d, index):
    """Polygon of a named polynomial (?name=G&p=3&full=1)"""
    try:
        validate_prime(d, minimum=3)
        name = request.args.get("name", "G")
        p = request.args.get("p", d, type=int)
        validate_prime(p, name="p")
        f = named_polynomial(d, name, index)
        full = request.args.get("full", "0") in ("1", "true")
        polygon = newton_polygon(f, p) if full else principal_polygon(f, p)
        return jsonify(polygon_record(name, polygon, d=d, index=index, p=p))
    except Exception as e:
        return _error(e)


@app.route("/api/certificate/<int:d>/<int:m>", methods=["GET"])
def get_certificate(d, m):
    """Irreducibility certificate for G_m"""
    try:
        p = request.args.get("p", None, type=int)
        return jsonify(certify(d, m, p=p).to_json())
    except Exception as e:
        return _error(e)


@app.route("/api/verify/<int:d>/<int:max_m>", methods=["GET"])
def get_verify(d, max_m):
    """Check reports plus summary"""
    try:
        if max_m > API_MAX_VERIFY_M:
            raise InvalidParameter(f"max_m above {API_MAX_VERIFY_M}; use the CLI")
        result = run_suite(d, max_m)
        return jsonify({
            "reports": [report.to_json() for report in result.reports],
            "summary": result.summary(),
        })
    except Exception as e:
        return _error(e)


if __name__ == "__main__":
    print("Starting Misiurewicz API Server...")
    print(f"API available at http://{API_HOST}:{API_PORT}")
    print("\nAvailable endpoints:")
    print("  GET /api/health - Health check")
    print("  GET /api/orbit/<d>/<n> - r_n, s_n")
    print("  GET /api/misiurewicz/<d>/<m>?route=direct - G_m")
    print("  GET /api/polygon/<d>/<index>?name=G&p=3&full=0 - Newton polygon")
    print("  GET /api/certificate/<d>/<m> - Irreducibility certificate")
    print("  GET /api/verify/<d>/<max_m> - Check reports")

    app.run(host=API_HOST, port=API_PORT, debug=False)
