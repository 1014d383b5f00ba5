"""
JSON, CSV and JSON-lines writers shared by the CLI and the JSON service

Every integer that can grow without bound is written as a decimal string.
"""

import csv
import io
import json
import platform
import sys
from importlib import metadata
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Union

from intpoly import IntPoly
from padic_newton import NewtonPolygon, PrincipalPolygon, segment_constraints

MANIFEST_PACKAGES = ["sympy", "python-dotenv", "flask", "flask-cors"]


def poly_record(name: str, f: IntPoly, **params) -> Dict:
    """{name, params..., degree, coeffs}"""
    return {"name": name, **params, **f.to_json()}


def polygon_record(name: str, polygon: Union[PrincipalPolygon, NewtonPolygon], **params) -> Dict:
    return {"name": name, **params, "polygon": str_polygon(polygon), **polygon.to_json()}


def str_polygon(polygon: Union[PrincipalPolygon, NewtonPolygon]) -> str:
    if isinstance(polygon, PrincipalPolygon):
        return str(polygon)
    return "L(" + ",".join(f"({x},{y})" for x, y in polygon.vertices) + ")"


def dumps(data) -> str:
    """Deterministic JSON (key order as built, no timestamps)"""
    return json.dumps(data, indent=2)


def write_text(text: str, out_path: Optional[str] = None, stream: TextIO = None):
    """Write to out_path, or to the stream (stdout by default)"""
    if out_path:
        with open(out_path, "w", newline="") as f:
            f.write(text)
        return
    (stream or sys.stdout).write(text)


def write_json(data, out_path: Optional[str] = None, stream: TextIO = None):
    write_text(dumps(data) + "\n", out_path, stream)


def poly_csv(records: Sequence[Dict]) -> str:
    """One row per (name, power, coefficient)"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    param_keys = _param_keys(records, exclude={"name", "degree", "coeffs"})
    writer.writerow(["name", *param_keys, "power", "coefficient"])
    for record in records:
        for power, c in enumerate(record["coeffs"]):
            writer.writerow([record["name"], *(record.get(k, "") for k in param_keys), power, c])
    return buffer.getvalue()


def polygon_csv(name: str, polygon: Union[PrincipalPolygon, NewtonPolygon], **params) -> str:
    """Plot-ready vertices plus the segment data of the edge leaving each vertex"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    param_keys = sorted(params)
    writer.writerow(["name", *param_keys, "x", "y", "rise", "run", "reduced_run", "lattice_length"])
    constraints = segment_constraints(polygon)
    for index, (x, y) in enumerate(polygon.vertices):
        if index < len(constraints):
            c = constraints[index]
            segment = [c.rise, c.run, c.reduced_run, c.lattice_length]
        else:
            segment = ["", "", "", ""]
        writer.writerow([name, *(params[k] for k in param_keys), x, y, *segment])
    return buffer.getvalue()


def reports_jsonl(rows: Iterable[Dict]) -> str:
    """One JSON object per line, keys in insertion order"""
    return "".join(json.dumps(row) + "\n" for row in rows)


def _param_keys(records: Sequence[Dict], exclude) -> List[str]:
    keys: List[str] = []
    for record in records:
        for key in record:
            if key not in exclude and key not in keys:
                keys.append(key)
    return keys


def package_versions(packages: Sequence[str] = MANIFEST_PACKAGES) -> Dict[str, Optional[str]]:
    versions = {}
    for name in packages:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = None
    return versions


def build_manifest(command: str, run_config: Dict) -> Dict:
    """Run config, interpreter and package versions (no timestamp)"""
    return {
        "command": command,
        "config": run_config,
        "python": platform.python_version(),
        "implementation": platform.python_implementation(),
        "platform": platform.platform(),
        "packages": package_versions(),
    }
