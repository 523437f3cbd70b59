import json
import xml.etree.ElementTree as ET

import pytest

from toric_sections.cli import main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out
    data = json.loads(out)
    assert data["schemaVersion"] == 1
    return data


def test_return_map_figure_eight(capsys):
    data = run_json(capsys, "return-map", "--signature", "2,3,7")
    (res,) = data["results"]
    assert res["word"] == "X.Y"
    assert res["trace"] == "3"
    assert res["wordMatrix"] == [["2", "1"], ["1", "1"]]
    assert res["class"]["tag"] == "hyperbolic"


def test_return_map_all_classes(capsys):
    one = run_json(capsys, "return-map", "--signature", "3,4,5")
    both = run_json(capsys, "return-map", "--signature", "3,4,5", "--all-classes")
    assert len(one["results"]) == 1
    assert len(both["results"]) == 2
    assert {r["trace"] for r in both["results"]} == {"15"}


@pytest.mark.parametrize("argv", [
    ("return-map", "--signature", "2,3,5"),
    ("return-map", "--signature", "2,3"),
    ("realize", "--word", "XZ"),
    ("realize", "--word", "X"),
    ("render", "--signature", "3,4,5", "--what", "domain"),
    ("frobnicate",),
])
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err


def test_realize(capsys):
    data = run_json(capsys, "realize", "--word", "X^4Y")
    got = [(r["signature"], r["family"], r["viaExchange"]) for r in data["realizations"]]
    assert got == [("2,3,10", "Q3", False), ("2,2,2,3", "FourY", True)]
    empty = run_json(capsys, "realize", "--word", "X^5Y^5")
    assert empty["realizations"] == [] and empty["notes"]


def test_output_is_deterministic(capsys):
    a = run(capsys, "return-map", "--signature", "2,3,4,5", "--all-classes")
    b = run(capsys, "return-map", "--signature", "2,3,4,5", "--all-classes")
    assert a == b


def test_verify_geometry(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "geometry")
    assert code == 0
    data = json.loads(out)
    assert data["passed"]
    assert {c["status"] for c in data["checks"]} == {"pass"}


def test_verify_tight_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "geometry", "--tol", "1e-30")
    assert code == 2
    data = json.loads(out)
    assert not data["passed"]
    assert "fail" in {c["status"] for c in data["checks"]}


@pytest.mark.parametrize("sig,what,points", [
    ("3,4,5", "billiard", 3),
    ("2,2,3,3", "bcurves", 4),
    ("2,3,7", "h", 2),
    ("3,4,5", "domain", 0),
])
def test_render(capsys, tmp_path, sig, what, points):
    out = tmp_path / "fig.svg"
    data = run_json(capsys, "render", "--signature", sig, "--what", what, "--out", str(out))
    assert data["markedPoints"] == points
    assert data["polygons"] >= 1
    root = ET.parse(out).getroot()
    assert root.tag.endswith("svg")


def test_render_trace(capsys, tmp_path):
    out = tmp_path / "trace.svg"
    data = run_json(capsys, "render", "--signature", "3,4,5", "--what", "trace",
                    "--out", str(out), "--length", "10")
    assert data["pathChords"] > 0
    assert data["crossings"]
    ET.parse(out)


def test_billiard_needs_three_points(capsys, tmp_path):
    code, _, _ = run(capsys, "render", "--signature", "2,4,5", "--what", "billiard",
                     "--out", str(tmp_path / "x.svg"))
    assert code == 1


def test_explain(capsys):
    data = run_json(capsys, "explain", "--signature", "2,3,7")
    assert data["family"] == "2qr"
    assert data["orbifoldChi"] == "-1/42"
    assert data["cwModel"]["genus"] == 1
    assert data["transport"][0]["matrix"] == [["0", "-1"], ["1", "1"]]
    assert data["routeProduct"] == [["-1", "-1"], ["5", "4"]]
