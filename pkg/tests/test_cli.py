import argparse
import json
import math

import pytest

from geodesic_coder.cli import main, parse_angle, parse_count


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("text, value", [
    ("pi", math.pi), ("pi/3", math.pi / 3), ("pi*5/6", 5 * math.pi / 6),
    ("-2pi/3", -2 * math.pi / 3), ("1.25", 1.25),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_parse_errors():
    with pytest.raises(argparse.ArgumentTypeError):
        parse_angle("tau")
    with pytest.raises(argparse.ArgumentTypeError):
        parse_count("1.5")
    assert parse_count("1e7") == 10_000_000


def test_surface_json(capsys):
    code, out, _ = run(capsys, "surface", "--genus", "2")
    assert code == 0
    d = json.loads(out)
    assert d["n"] == 12 and len(d["rows"]) == 12


def test_surface_csv(capsys):
    code, out, _ = run(capsys, "surface", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "i,V,P,Q,M,sigma,rho,theta,tau"


def test_code_of_axis(capsys):
    code, out, _ = run(capsys, "code", "--axis", "2,8,5")
    assert code == 0
    d = json.loads(out)
    assert d["arithmetic"]["repetend"] == [2, 8, 5]
    assert d["geometric"]["repetend"] == [2, 8, 5]


def test_output_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["attractor", "--format", "svg", "-o", str(a)]) == 0
    assert main(["attractor", "--format", "svg", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text(encoding="utf-8").startswith("<svg")


def test_markov_dot(capsys):
    code, out, _ = run(capsys, "markov", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph")


def test_markov_json(capsys):
    code, out, _ = run(capsys, "markov", "--partition", "mixed")
    d = json.loads(out)
    assert code == 0 and d["perron_root"] > 1


def test_cycles_and_reduce(capsys):
    code, out, _ = run(capsys, "cycles", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 13
    code, out, _ = run(capsys, "reduce", "--u", "0.1", "--w", "pi")
    assert code == 0 and "reduced" in json.loads(out)


def test_entropy(capsys):
    code, out, _ = run(capsys, "entropy", "--samples", "1e5")
    d = json.loads(out)
    assert code == 0
    assert d["entropy_times_K"] == pytest.approx(2 * math.pi ** 2)


def test_probe_csv(capsys):
    code, out, _ = run(capsys, "probe-continuity", "--max-m", "3", "--samples", "2000",
                       "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "m,max_distance,ratio"


def test_usage_errors(capsys):
    assert run(capsys, "surface", "--format", "svg")[0] == 2
    assert run(capsys, "surface", "--genus", "1")[0] == 2
    assert run(capsys, "code")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "cycles", "--partition", "endpoints:PQX")[0] == 2


def test_non_markov_exit_code(capsys, monkeypatch):
    import geodesic_coder.cli as cli

    monkeypatch.setattr(cli, "markov_condition", lambda s, part, report: [None] * s.n)
    code, _, err = run(capsys, "markov")
    assert code == 3
    assert "numeric failure" in err
