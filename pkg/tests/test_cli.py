"""Tests for the command-line entry point"""

import json

import pytest

from cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main
from database import OrbitDatabase
from orbit_dynamics import set_cache_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_orbit_json(capsys):
    code, out, _ = run(capsys, "orbit", "--d", "3", "--n", "2")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["expected_degrees"] == {"r": 2, "s": 3, "i": 0, "j": 2}
    s2 = [e for e in data["entries"] if e["name"] == "s"][0]
    assert s2["coeffs"] == ["81", "81", "81", "27"]


def test_orbit_all_csv(capsys):
    code, out, _ = run(capsys, "orbit", "--d", "3", "--n", "1", "--all", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "name,d,n,power,coefficient"
    assert "r,3,1,1,3" in lines


def test_non_prime_d_is_usage_error(capsys):
    code, _, err = run(capsys, "orbit", "--d", "4", "--n", "2")
    assert code == EXIT_USAGE
    assert "prime" in err
    code, _, _ = run(capsys, "certify", "--d", "3", "--m", "0")
    assert code == EXIT_USAGE


def test_missing_argument_exits_two():
    with pytest.raises(SystemExit) as excinfo:
        main(["misiurewicz", "--d", "3"])
    assert excinfo.value.code == 2


def test_misiurewicz_both_routes(capsys):
    code, out, _ = run(capsys, "misiurewicz", "--d", "3", "--m", "2", "--route", "both")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["routes"] == ["direct", "via_tau"]
    assert data["routes_agree"]
    assert data["degree"] == data["expected_degree"] == 6
    assert data["polygon"] == "L((0,8),(5,5))"
    assert data["polygon_bound"] == 5


def test_misiurewicz_pretty(capsys):
    code, out, _ = run(capsys, "misiurewicz", "--d", "3", "--m", "1", "--format", "pretty")
    assert code == EXIT_OK
    assert "=" * 60 in out
    assert "G_1 = -3*b - 9" in out


def test_polygon_and_dump(capsys):
    code, out, _ = run(capsys, "polygon", "--d", "3", "--name", "tau", "--index", "3")
    assert code == EXIT_OK
    assert json.loads(out)["polygon"] == "L((3,13),(4,12),(9,9))"

    code, out, _ = run(capsys, "polygon", "--d", "3", "--name", "G", "--index", "4", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "name,d,index,p,x,y,rise,run,reduced_run,lattice_length"
    assert lines[1] == "G,3,4,3,0,80,27,53,53,1"

    code, out, _ = run(capsys, "dump", "--d", "3", "--name", "G", "--index", "1")
    assert code == EXIT_OK
    assert json.loads(out)["coeffs"] == ["-9", "-3"]

    code, _, _ = run(capsys, "dump", "--d", "3", "--name", "phi", "--index", "1")
    assert code == EXIT_USAGE


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--d", "3", "--max-m", "3")
    assert code == EXIT_OK
    rows = [json.loads(line) for line in out.splitlines()]
    summary = rows[-1]["summary"]
    assert summary["all_passed"]
    assert summary["total"] == len(rows) - 1
    assert [r["m"] for r in summary["ratios"]] == [1, 2, 3]


def test_verify_detects_corruption(capsys):
    code, out, _ = run(capsys, "verify", "--d", "3", "--max-m", "3", "--inject-corruption", "2")
    assert code == EXIT_CHECK_FAILED
    rows = [json.loads(line) for line in out.splitlines()]
    assert not rows[-1]["summary"]["all_passed"]


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--d", "3", "--m", "3")
    assert code == EXIT_OK
    data = json.loads(out)
    assert (data["verdict"], data["route"]) == ("IrreducibleOverQ", "polygon")

    code, out, _ = run(capsys, "certify", "--d", "3", "--m", "4", "--format", "pretty")
    assert code == EXIT_OK
    assert "Verdict: IrreducibleOverQ" in out
    assert "2 simple Q_3 roots" in out


def test_certify_polygon_only(capsys):
    code, out, _ = run(capsys, "certify", "--d", "3", "--m", "5", "--aux-primes", "")
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "LargeFactorOnly"


def test_resource_guard_exit(capsys, restore_size_cap):
    code, _, _ = run(capsys, "orbit", "--d", "11", "--n", "3", "--size-cap", "50")
    assert code == EXIT_RESOURCE


def test_config_file_precedence(capsys, tmp_path):
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps({"format": "csv"}))
    code, out, _ = run(capsys, "dump", "--d", "3", "--name", "s", "--index", "1",
                       "--config", str(config_path))
    assert code == EXIT_OK
    assert out.startswith("name,")

    code, out, _ = run(capsys, "dump", "--d", "3", "--name", "s", "--index", "1",
                       "--config", str(config_path), "--format", "json")
    assert json.loads(out)["coeffs"] == ["3"]


def test_bad_config_is_usage_error(capsys, tmp_path):
    code, _, _ = run(capsys, "dump", "--d", "3", "--name", "s", "--index", "1",
                     "--config", str(tmp_path / "missing.json"))
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "dump", "--d", "3", "--name", "s", "--index", "1", "--precision", "0")
    assert code == EXIT_USAGE


def test_out_and_manifest(capsys, tmp_path):
    out_path = tmp_path / "g.json"
    manifest_path = tmp_path / "manifest.json"
    code, out, _ = run(capsys, "certify", "--d", "3", "--m", "2",
                       "--out", str(out_path), "--manifest", str(manifest_path))
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(out_path.read_text())["degree"] == 6
    manifest = json.loads(manifest_path.read_text())
    assert manifest["command"] == "certify"
    assert manifest["config"]["d"] == 3
    assert "sympy" in manifest["packages"]
    assert "timestamp" not in manifest


def test_cache_flag(capsys, tmp_path):
    path = str(tmp_path / "cli.db")
    try:
        code, _, _ = run(capsys, "orbit", "--d", "5", "--n", "3", "--cache", path)
        assert code == EXIT_OK
        assert OrbitDatabase(path).get_max_n(5) == 3
    finally:
        set_cache_path("")


def test_verify_d3_through_m5(capsys):
    code, out, _ = run(capsys, "verify", "--d", "3", "--max-m", "5")
    assert code == EXIT_OK
    summary = json.loads(out.splitlines()[-1])["summary"]
    assert summary["all_passed"]
    assert summary["by_check"]["local_splitting"] == {"passed": 4, "failed": 0}


@pytest.mark.parametrize("argv", [
    ["verify", "--d", "3", "--max-m", "0"],
    ["polygon", "--d", "3", "--name", "F", "--index", "2"],
    ["dump", "--d", "3", "--name", "F_x", "--index", "2"],
    ["certify", "--d", "3", "--m", "2", "--aux-primes", "4,9"],
    ["orbit", "--d", "2", "--n", "2"],
    ["polygon", "--d", "2", "--name", "G", "--index", "2"],
    ["dump", "--d", "2", "--name", "r", "--index", "1"],
])
def test_bad_arguments_are_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert "error:" in err


def test_bad_aux_primes_in_config_file(capsys, tmp_path):
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps({"aux_primes": "5,x"}))
    code, _, _ = run(capsys, "certify", "--d", "3", "--m", "2", "--config", str(config_path))
    assert code == EXIT_USAGE


def test_cache_subcommand(capsys, tmp_path):
    path = str(tmp_path / "orbits.db")
    try:
        assert run(capsys, "orbit", "--d", "3", "--n", "3", "--cache", path)[0] == EXIT_OK
        code, out, _ = run(capsys, "cache", "stats", "--cache", path)
        assert code == EXIT_OK
        orbits = json.loads(out)["orbits"]
        assert [(row["d"], row["max_n"], row["entries"]) for row in orbits] == [(3, 3, 3)]

        export_path = tmp_path / "orbit3.json"
        code, _, _ = run(capsys, "cache", "export", "--d", "3", "--cache", path, "--out", str(export_path))
        assert code == EXIT_OK
        assert [row["n"] for row in json.loads(export_path.read_text())] == [1, 2, 3]

        assert run(capsys, "cache", "clear", "--d", "3", "--cache", path)[0] == EXIT_OK
        code, out, _ = run(capsys, "cache", "stats", "--cache", path)
        assert json.loads(out)["orbits"] == []
        assert run(capsys, "cache", "export", "--cache", path)[0] == EXIT_USAGE
    finally:
        set_cache_path("")
