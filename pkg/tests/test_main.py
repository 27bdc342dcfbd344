"""
Tests for the command-line entry point: artifacts written, output printed
and exit codes.
"""

import json
from math import comb, factorial

import pytest
from sympy.polys.domains import QQ

from kreweras.main import main
from kreweras.ore import T, OreOp
from kreweras.rings import ScalarRing
from kreweras.series import TruncSeries
from kreweras.textio import operator_from_text, operator_to_text, poly_from_text, read_artifact, series_from_text, \
    series_to_text

Q = ScalarRing.rationals()
GEOMETRIC = OreOp.from_coeffs([-1, 1 - T])
H_OP = OreOp.from_coeffs([-1, 9 * T - 18, 9 * T ** 2 - 9 * T])


def write(path, text):
    path.write_text(text)
    return str(path)


# ===== ENUMERATE / KERNEL / THETA =====

def test_enumerate_to_stdout(capsys):
    code = main(["enumerate", "--n", "3", "--a", "1", "--b", "1", "--c", "1", "--x-value", "1", "--y-value", "1"])
    assert code == 0
    text = capsys.readouterr().out
    assert "# command: python -m kreweras.main enumerate --n 3" in text
    assert series_from_text(text).coefficients() == [1, 1, 3, 7]


def test_enumerate_q00_to_file(tmp_path):
    out = tmp_path / "Q00.txt"
    assert main(["enumerate", "--n", "4", "--q00", "--out", str(out)]) == 0
    q00 = series_from_text(read_artifact(out))
    a, b, c = (q00.ring.gen(n) for n in ("a", "b", "c"))
    assert q00[3] == (a + b) * c


def test_enumerate_bad_weight():
    assert main(["enumerate", "--n", "2", "--a", "one"]) == 1


def test_kernel_check(capsys):
    assert main(["kernel-check", "--n", "6", "--steps", "reverse-kreweras"]) == 0
    assert "kernel equation holds mod t^6" in capsys.readouterr().out


def test_theta_with_oracle(tmp_path):
    out = tmp_path / "theta.txt"
    assert main(["theta", "--n", "8", "--check-oracle", "--oracle-order", "6", "--out", str(out)]) == 0
    theta = series_from_text(read_artifact(out))
    x = theta.ring.gen("x")
    assert theta[0] == -x ** 2


# ===== GUESSING =====

def test_guess_ode(tmp_path, capsys):
    series = write(tmp_path / "geo.txt", series_to_text(TruncSeries.from_list(Q, [QQ(1)] * 30)))
    out = tmp_path / "L.txt"
    code = main(["guess-ode", "--series", series, "--max-order", "2", "--max-degree", "3", "--reserve", "10",
                 "--out", str(out)])
    assert code == 0
    assert operator_from_text(read_artifact(out)) == GEOMETRIC.normalized()
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] == 10
    assert report["first_failure"] is None


def test_guess_ode_finds_nothing(tmp_path, capsys):
    g = TruncSeries.from_dict(Q, {3 * k: QQ(1, factorial(k)) for k in range(10)}, 30)
    series = write(tmp_path / "g.txt", series_to_text(g))
    assert main(["guess-ode", "--series", series, "--max-order", "1", "--max-degree", "1", "--reserve", "10"]) == 1
    assert json.loads(capsys.readouterr().out) == {"found": False, "cells": 2, "skipped": 0}


def test_guess_ode_short_series(tmp_path):
    series = write(tmp_path / "geo.txt", series_to_text(TruncSeries.from_list(Q, [QQ(1)] * 12)))
    assert main(["guess-ode", "--series", series, "--max-order", "2", "--max-degree", "3"]) == 1


def test_guess_alg(tmp_path):
    catalan = TruncSeries.from_list(Q, [QQ(comb(2 * n, n) // (n + 1)) for n in range(40)])
    series = write(tmp_path / "catalan.txt", series_to_text(catalan))
    out = tmp_path / "P.txt"
    assert main(["guess-alg", "--series", series, "--deg-t", "1", "--deg-u", "2", "--out", str(out)]) == 0
    P = poly_from_text(read_artifact(out))
    t, u = P.ring.gens
    assert P == t * u ** 2 - u + 1


# ===== ORE =====

def test_ore_rrem(tmp_path, capsys):
    f = write(tmp_path / "F.txt", operator_to_text(GEOMETRIC))
    g = write(tmp_path / "G.txt", operator_to_text(GEOMETRIC.left_scale(T + 2)))
    assert main(["ore", "--rrem", g, f]) == 0
    assert operator_from_text(capsys.readouterr().out).is_zero


def test_ore_lclm(tmp_path):
    f = write(tmp_path / "F.txt", operator_to_text(OreOp.from_coeffs([-1, 0, 1])))
    g = write(tmp_path / "G.txt", operator_to_text(OreOp.from_coeffs([-4, 0, 1])))
    out = tmp_path / "lclm.txt"
    assert main(["ore", "--lclm", f, g, "--out", str(out)]) == 0
    assert operator_from_text(read_artifact(out)).order == 4


def test_ore_local_analysis(tmp_path, capsys):
    h = write(tmp_path / "H.txt", operator_to_text(H_OP))
    assert main(["ore", "--loganalysis", h]) == 0
    assert "log: present" in capsys.readouterr().out
    geo = write(tmp_path / "geo.txt", operator_to_text(GEOMETRIC))
    assert main(["ore", "--solve", geo, "--n", "5"]) == 0
    out = capsys.readouterr().out
    assert "dimension: 1" in out
    assert "r: 1" in out


def test_ore_apply(tmp_path, capsys):
    op = write(tmp_path / "geo.txt", operator_to_text(GEOMETRIC))
    series = write(tmp_path / "s.txt", series_to_text(TruncSeries.from_list(Q, [QQ(1)] * 10)))
    assert main(["ore", "--apply", op, series]) == 0
    result = series_from_text(capsys.readouterr().out)
    assert result.is_zero
    assert result.prec == 9


def test_missing_artifact(tmp_path):
    assert main(["ore", "--solve", str(tmp_path / "missing.txt")]) == 1


def test_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["ore"])
    assert excinfo.value.code == 2


# ===== CERTIFICATES =====

@pytest.mark.slow
def test_verify_closedform(tmp_path):
    out = tmp_path / "cert.json"
    assert main(["verify-closedform", "--n", "60", "--out", str(out)]) == 0
    data = json.loads(read_artifact(out))
    assert [c["name"] for c in data["checks"]][-1] == "theta-equals-c"


@pytest.mark.slow
def test_certify_transcendence(capsys):
    assert main(["certify"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["schema"] == 1
