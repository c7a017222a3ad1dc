from __future__ import annotations

import io
import json

import pytest

from germtower.cli import run


def call(*argv: str) -> tuple[int, dict | None]:
    out = io.StringIO()
    code = run(list(argv), out)
    text = out.getvalue()
    return code, json.loads(text) if text else None


GERM = json.dumps({"coeffs": [[2, 0], [1, 0]], "order": 8})


def test_linearize_example():
    code, doc = call("linearize", "-i", GERM)
    assert code == 0 and doc["h"]["coeffs"][1] == [-0.5, 0.0]
    code, doc = call("linearize", "-i", GERM, "--exact")
    assert doc["h"]["coeffs"][1] == ["-1/2", "0"]


def test_qz_generator_example():
    assert call("qz-generator", "--elems", "1/2,1/3") == (0, {"p": 1, "q": 6})


def test_exit_codes():
    code, doc = call("invert", "-i", json.dumps({"coeffs": [[0, 0], [1, 0]]}))
    assert code == 1 and doc["error"]["code"] == "not_invertible"
    code, doc = call("bogus")
    assert code == 2 and doc["error"]["code"] == "usage"
    code, doc = call("classify", "-i", "/nonexistent.json")
    assert code == 1 and doc["error"]["code"] == "invalid_input"
    code, doc = call("prop5-root", "--q", "2", "--a", "1", "--eps", "0.1")
    assert code == 1


def test_germ_round_trip_bit_identical():
    germ = {"coeffs": [[0.1 + 1e-17, 1 / 3], [2 / 7, -0.0]], "order": 2}
    code, doc = call("compose", "-i", json.dumps(germ), "--with", json.dumps({"coeffs": [[1, 0], [0, 0]]}))
    assert code == 0 and doc["coeffs"] == [[germ["coeffs"][0][0], 1 / 3], [2 / 7, 0.0]]


def test_order_flag():
    _, doc = call("iterate", "-i", json.dumps({"coeffs": [[1, 0], [1, 0]]}), "-m", "2", "--order", "3")
    assert doc["coeffs"] == [[1, 0], [2, 0], [2, 0]]


@pytest.mark.parametrize(
    "argv",
    [
        ("classify", "-i", GERM),
        ("centralizer-element", "-i", GERM, "--mu", "3,0"),
        ("centralizer-solve-linear", "--root", "1/3", "--order", "8"),
        ("normal-form", "-i", json.dumps({"coeffs": [[1, 0], [1, 0]], "order": 6})),
        ("flow", "--n", "1", "--tau", "0", "--t", "1", "--order", "5", "--exact"),
        ("qz-tower", "--elems", "1/2,1/4,1/8"),
        ("qz-intersection", "--qs", "2,4,8,16", "--resolution", "1000"),
        ("slit-map", "--q", "2", "--eps", "0.1", "--samples", "4"),
        ("intrinsic-rotation", "--q", "3", "--eps", "0.2", "--alpha", "1/3", "--samples", "4"),
        ("prop5-root", "--q", "2", "--a", "3", "--eps", "0.1", "--samples", "50"),
        ("divisor-growth", "--alpha", "0.6180339887", "--order", "8"),
    ],
)
def test_subcommands_succeed_deterministically(argv):
    code, first = call(*argv)
    assert code == 0, first
    assert call(*argv) == (0, first)


def test_flow_exact_coefficients():
    _, doc = call("flow", "--n", "1", "--order", "5", "--exact")
    assert doc["coeffs"] == [["1", "0"]] * 5


def test_tower_build_and_verify(tmp_path, monkeypatch):
    monkeypatch.setenv("GERMTOWER_OUTPUT_DIR", str(tmp_path))
    code, doc = call("tower-build", "--qs", "2,6", "--sigma", "0.3", "--depth", "2", "-o", "tower.json")
    assert code == 0 and doc is None
    assert json.loads((tmp_path / "tower.json").read_text())["qs"] == [2, 6]
    code, rep = call("tower-verify", "-i", str(tmp_path / "tower.json"), "--samples", "100", "--tol", "1e-7")
    assert code == 0
    assert rep["passed"]
