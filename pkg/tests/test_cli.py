import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hyperzero.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, parse_instance, run
from hyperzero.genseq import InstanceError
from hyperzero.polycore import ExactPolynomial, format_rational, parse_rational

SQUARE = ["--roots", "1,1", "--r", "1"]


def _run(capsys, argv):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_instance_examples():
    inst = parse_instance(b'{"roots":["1","1"],"r":1}')
    assert inst.n == 2
    with pytest.raises(InstanceError) as info:
        parse_instance(b'{"roots":["1"],"r":1}')
    assert "max{deg P, r} > 1" in str(info.value)
    with pytest.raises(InstanceError) as info:
        parse_instance(b'{"roots":["-1"],"r":2}')
    assert "not positive" in str(info.value)
    with pytest.raises(InstanceError):
        parse_instance(b"{not json")


def test_interval_command(capsys):
    code, out, _ = _run(capsys, ["interval", *SQUARE])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["a"] == "0" and doc["b"] == "4"


def test_generate_command(capsys):
    code, out, _ = _run(capsys, ["generate", *SQUARE, "--m-max", "2"])
    lines = out.splitlines()
    assert code == EXIT_OK and len(lines) == 3
    last = json.loads(lines[-1])
    assert ExactPolynomial.from_json(last["coeffs"]) == ExactPolynomial([3, -4, 1])


def test_certify_command(capsys):
    code, out, _ = _run(capsys, ["certify", *SQUARE, "--m-max", "0"])
    assert code == EXIT_OK
    code, out, _ = _run(capsys, ["certify", *SQUARE, "--m-max", "12", "--method", "sturm"])
    rows = [json.loads(x) for x in out.splitlines()]
    assert code == EXIT_OK and [r["m"] for r in rows] == list(range(13))
    assert all(r["verdict"] == "HYPERBOLIC_IN_AB" for r in rows)


def test_instance_file_and_document(capsys, tmp_path):
    path = tmp_path / "inst.json"
    path.write_text('{"roots": ["1/2", "3"], "leading": "2", "r": 2}')
    code, out_file, _ = _run(capsys, ["onset", "--instance", str(path), "--m-max", "30"])
    code2, out_doc, _ = _run(capsys, ["onset", "--instance", path.read_text(), "--m-max", "30"])
    assert code == code2 == EXIT_OK and out_file == out_doc
    assert json.loads(out_file)["m0"] is not None


def test_parametrize_csv(capsys):
    code, out, _ = _run(capsys, ["parametrize", "--roots", "1", "--r", "2", "--theta-grid", "9", "--m", "12"])
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    assert list(rows[0]) == ["theta", "tau", "z", "A", "B", "min_excess", "h_value"]
    zs = [float(r["z"]) for r in rows]
    assert zs == sorted(zs)
    for r in rows:
        th = float(r["theta"])
        assert float(r["tau"]) == pytest.approx(2 * math.cos(th), abs=1e-9)


def test_density_command(capsys):
    code, out, _ = _run(capsys, ["density", *SQUARE, "--m-max", "60", "--bins", "20"])
    doc = json.loads(out)
    assert code == EXIT_OK and doc["m0"] == 0
    assert doc["all_m"]["coverage_fraction"] == 1.0
    assert set(doc) == {"m0", "large_m", "all_m"}
    code, _, _ = _run(capsys, ["density", *SQUARE, "--m-max", "10", "--bins", "5"])
    assert code == EXIT_USAGE


def test_conjecture2_command(capsys):
    args = ["conjecture2", "--coeffs", "1,0,0,1", "--r", "1", "--s", "2", "--z-sign", "-1", "--m-max", "12"]
    code, out, _ = _run(capsys, args + ["--C", "3"])
    assert code == EXIT_OK
    assert json.loads(out.splitlines()[-1])["non_real_m"] == []
    code, out, _ = _run(capsys, args + ["--C", "2"])
    assert code == EXIT_VIOLATION
    assert json.loads(out.splitlines()[-1])["non_real_m"]


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["interval", "--roots", "1", "--r", "1"],
        ["interval", "--roots=-1", "--r", "2"],
        ["interval", "--roots", "1,1"],
        ["generate", *SQUARE, "--m-max", "-1"],
        ["interval", *SQUARE, "--width", "0"],
    ],
)
def test_usage_errors_exit_64(capsys, argv):
    code, _, err = _run(capsys, argv)
    assert code == EXIT_USAGE
    assert err


def test_invalid_instance_is_structured(capsys):
    code, _, err = _run(capsys, ["interval", "--roots=-1,0", "--r", "1"])
    doc = json.loads(err.strip().splitlines()[-1])
    assert code == EXIT_USAGE and len(doc["violations"]) >= 2


def test_rational_strings_round_trip(capsys):
    _, out, _ = _run(capsys, ["generate", "--roots", "1/2,7/3", "--leading", "3/2", "--r", "2", "--m-max", "8"])
    for line in out.splitlines():
        for text in json.loads(line)["coeffs"]:
            assert format_rational(parse_rational(text)) == text


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.jsonl"
    code, out, _ = _run(capsys, ["--output", str(target), "generate", *SQUARE, "--m-max", "3"])
    assert code == EXIT_OK and out == ""
    assert len(target.read_text().splitlines()) == 4


def test_byte_identical_runs_across_processes():
    argv = [sys.executable, "-m", "hyperzero", "--jobs", "2", "certify", *SQUARE, "--m-max", "40"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    serial = subprocess.run([a for a in argv if a not in ("--jobs", "2")], capture_output=True, check=True).stdout
    assert first == second == serial
