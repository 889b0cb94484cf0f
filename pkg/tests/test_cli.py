import io
import json
import math
import subprocess
import sys

import pytest

from orbizeta.cli import main
from orbizeta.groupfile import GroupFileError, export_group_text, load_group_file, parse_group_text
from orbizeta.groups import builtin, word_ball

# one invocation per subcommand, kept cheap
INVOCATIONS = {
    "verify-identities": ["verify-identities", "--mmax", "12"],
    "chern": ["chern", "--sig", "0,1,2,2,2", "--k", "1"],
    "dims": ["dims", "--sig", "1,1", "--kmin", "-2", "--kmax", "4"],
    "area": ["area", "--sig", "0,1,2,2,2"],
    "spectrum": ["spectrum", "--group", "builtin:punctured-torus", "--nmax", "60"],
    "zeta": ["zeta", "--group", "builtin:orbifold-0-1-222", "--s", "3", "--chi", "sign", "--nmax", "80"],
    "factorization": ["factorization", "--nmax", "60"],
    "eisenstein": ["eisenstein", "--z", "0.1+0.9i", "--L", "10", "--fd-h", "1e-3"],
    "green": ["green", "--z", "0.1+0.9i", "--zp", "0.3+1.1i", "--L", "10", "--fd-h", "1e-3"],
    "fay": ["fay", "--zp", "0.2+3.5i", "--L", "10"],
    "limit-tm": ["limit-tm", "--mlist", "2-40"],
    "ode-check": ["ode-check", "--m", "3"],
    "export-group": ["export-group", "--group", "builtin:punctured-torus"],
}


def run(argv, env_cache=None):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.mark.parametrize("name", sorted(INVOCATIONS))
def test_subcommand_runs_and_is_deterministic(name):
    code1, text1 = run(INVOCATIONS[name])
    code2, text2 = run(INVOCATIONS[name])
    assert code1 == 0, text1
    assert text1 == text2
    if name != "export-group":
        report = json.loads(text1)
        assert report["command"] == name
        assert "inputs" in report


def test_chern_report_values():
    report = json.loads(run(INVOCATIONS["chern"])[1])
    assert abs(report["wp"] - 1 / (12 * math.pi ** 2)) < 1e-17
    assert report["cusp"] == -1 / 9
    assert report["ell"] == [-1 / (16 * math.pi)] * 3
    assert report["exact"]["ell_times_pi"] == ["-1/16"] * 3
    assert report["pass"] is True


def test_verify_identities_report():
    report = json.loads(run(["verify-identities", "--mmax", "50"])[1])
    assert report["count"] == sum(2 * m for m in range(2, 51))
    assert report["pass"] and report["max_difference"] < 1e-10


def test_zeta_report_has_truncation_metadata():
    report = json.loads(run(INVOCATIONS["zeta"])[1])
    for key in ("value", "tail", "terms", "nmax", "imax", "accumulator"):
        assert key in report
    assert report["value"] > 0


def test_limit_tm_psl_order():
    rows = json.loads(run(INVOCATIONS["limit-tm"])[1])["rows"]
    orders = {r["m"]: r["psl_order"] for r in rows}
    assert orders[2] == 1 and orders[3] == 3 and orders[4] == 2 and orders[7] == 7
    assert all(r["pass"] for r in rows)


def test_csv_output():
    code, text = run(["dims", "--sig", "1,1", "--kmax", "3", "--output", "csv"])
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "k,dim" and lines[1] == "-1,0"
    code, text = run(["area", "--sig", "1,1", "--output", "csv"])
    assert "area," + repr(2 * math.pi) in text


@pytest.mark.parametrize("argv", [
    [],
    ["chern", "--sig", "0,1,2,2,2"],
    ["chern", "--sig", "0,0,2", "--k", "1"],
    ["zeta", "--s", "3", "--nmax", "50", "--bogus"],
    ["zeta", "--s", "0.5", "--nmax", "50"],
    ["eisenstein", "--z", "0.1-0.9i"],
    ["spectrum", "--group", "no/such/file", "--nmax", "10"],
    ["spectrum", "--group", "builtin:nothing", "--nmax", "10"],
    ["limit-tm", "--mlist", "a-b"],
    ["spectrum", "--group", "builtin:punctured-torus", "--nmax", "200", "--method", "words", "--word-cap", "3"],
])
def test_usage_errors(argv):
    assert run(argv)[0] == 1


def test_verification_failure_exit_code():
    code, text = run(["ode-check", "--m", "3", "--tol", "1e-30"])
    assert code == 2
    assert json.loads(text)["pass"] is False
    assert run(["fay", "--zp", "0.2+3.5i", "--L", "10", "--Ylist", "6", "--tol", "1e-12"])[0] == 2


def test_cache_warm_and_cold_identical(tmp_path, monkeypatch):
    argv = ["zeta", "--group", "builtin:punctured-torus", "--s", "3", "--nmax", "100"]
    cold = run(argv + ["--cache-dir", str(tmp_path)])
    assert any(tmp_path.iterdir())
    warm = run(argv + ["--cache-dir", str(tmp_path)])
    plain = run(argv)
    assert cold == warm == plain
    monkeypatch.setenv("ORBIZETA_CACHE_DIR", str(tmp_path / "env"))
    assert run(argv) == plain
    assert any((tmp_path / "env").iterdir())


def test_group_file_round_trip(tmp_path):
    for name in ("builtin:punctured-torus", "builtin:orbifold-0-1-222"):
        g = builtin(name)
        path = tmp_path / "g.txt"
        path.write_text(export_group_text(g))
        h = load_group_file(path)
        assert set(word_ball(g, 6).elements) == set(word_ball(h, 6).elements)
        assert h.signature == g.signature


def test_group_file_via_cli(tmp_path):
    path = tmp_path / "torus.grp"
    code, text = run(["export-group", "--group", "builtin:punctured-torus"])
    path.write_text(text)
    a = json.loads(run(["spectrum", "--group", str(path), "--nmax", "8", "--method", "words"])[1])
    b = json.loads(run(["spectrum", "--group", "builtin:punctured-torus", "--nmax", "8"])[1])
    # a loaded file carries no index-two character, so chi is absent there
    strip = lambda rows: [{k: v for k, v in r.items() if k != "chi"} for r in rows]
    assert strip(a["rows"]) == strip(b["rows"])
    assert all(r["chi"] is None for r in a["rows"])


def test_group_file_errors(tmp_path):
    with pytest.raises(GroupFileError, match="determinant|det"):
        parse_group_text("presentation free-rank-2\ngenerator A 1 1 1 1\ngenerator B 1 -1 -1 2\n")
    with pytest.raises(GroupFileError):
        # A is not an involution
        parse_group_text("presentation involutions-3\ngenerator T1 0 -1 1 0\n"
                         "generator T2 1 1 1 2\ngenerator T3 1 -1 -1 2\n")
    with pytest.raises(GroupFileError, match="unknown statement"):
        parse_group_text("presentation free-rank-2\nbanana 1\n")
    with pytest.raises(GroupFileError, match="missing presentation"):
        parse_group_text("generator A 1 1 1 2\n")
    bad = tmp_path / "bad.grp"
    bad.write_text("presentation free-rank-2\ngenerator A 1 1 1 1\ngenerator B 1 -1 -1 2\n")
    assert run(["spectrum", "--group", str(bad), "--nmax", "10"])[0] == 1


def test_decimal_group_file():
    text = ("presentation free-rank-2\n# decimal entries switch to floating point\n"
            "generator A 1.0 1.0 1.0 2.0\ngenerator B 1 -1 -1 2\n")
    g = parse_group_text(text, "decimal.grp")
    assert not g.exact
    assert g.name == "decimal"


def test_console_script():
    argv = [sys.executable, "-m", "orbizeta", "chern", "--sig", "0,1,2,2,2", "--k", "2"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b
    assert json.loads(a)["ell"] == [1 / (16 * math.pi)] * 3
