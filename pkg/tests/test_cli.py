from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from qopuc.cli import main

FIXDIR = Path(__file__).resolve().parent.parent / "fixtures"

DENSITY_FIXTURES = ["lebesgue.json", "bernstein_szego_05.json",
                    "vanishing_density.json", "smooth_trig.json"]


def run(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = main([*argv, "--out", str(out)])
    return code, out.read_bytes()


def load_schema(name):
    ref = resources.files("qopuc") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text())


def validate(name, payload_bytes):
    jsonschema.validate(json.loads(payload_bytes), load_schema(name))


def test_moments_to_verblunsky_fixtures(tmp_path):
    code, out = run(tmp_path, "moments-to-verblunsky",
                    str(FIXDIR / "lebesgue.json"), "--n", "5")
    assert code == 0
    payload = json.loads(out)
    assert all(q == [0, 0, 0, 0] for q in payload["result"]["gammas"])
    validate("moments_to_verblunsky", out)

    code, out = run(tmp_path, "moments-to-verblunsky",
                    str(FIXDIR / "bernstein_szego_05.json"), "--n", "6")
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["gammas"][0][0] == 0.5
    assert abs(payload["result"]["route_residual"]) < 1e-8
    validate("moments_to_verblunsky", out)


def test_moments_to_verblunsky_rejects_non_pd(tmp_path):
    bad = tmp_path / "bad.json"
    moments = [[0, [1.0, 0, 0, 0]]] + [[n, [1.0, 0, 0, 0]] for n in range(1, 5)]
    bad.write_text(json.dumps({"moments": moments}))
    code, out = run(tmp_path, "moments-to-verblunsky", str(bad), "--n", "4")
    assert code == 2
    err = json.loads(out)["error"]
    assert err["type"] == "NotPositiveDefinite"
    assert err["order"] == 1


def test_round_trip_through_cli(tmp_path):
    gamma_file = tmp_path / "g.json"
    code = main(["random-gamma", "--seed", "11", "--n", "8",
                 "--out", str(gamma_file)])
    assert code == 0
    validate("random_gamma", gamma_file.read_bytes())
    seed_payload = json.loads(gamma_file.read_text())
    fixture = tmp_path / "gamma_fixture.json"
    fixture.write_text(json.dumps(seed_payload["result"]))

    moments_file = tmp_path / "m.json"
    code = main(["verblunsky-to-moments", str(fixture), "--n", "8",
                 "--out", str(moments_file)])
    assert code == 0
    validate("verblunsky_to_moments", moments_file.read_bytes())
    mom_fixture = tmp_path / "mom_fixture.json"
    mom_fixture.write_text(json.dumps(
        {"moments": json.loads(moments_file.read_text())["result"]["moments"]}))

    back_file = tmp_path / "back.json"
    code = main(["moments-to-verblunsky", str(mom_fixture), "--n", "8",
                 "--out", str(back_file)])
    assert code == 0
    got = json.loads(back_file.read_text())["result"]["gammas"]
    want = json.loads(fixture.read_text())["gammas"]
    for a, b in zip(got, want):
        assert max(abs(x - y) for x, y in zip(a, b)) < 1e-9


def test_verblunsky_to_moments_rejects_non_contraction(tmp_path):
    fixture = tmp_path / "g.json"
    fixture.write_text(json.dumps({"gammas": [[1.5, 0, 0, 0]]}))
    code, out = run(tmp_path, "verblunsky-to-moments", str(fixture), "--n", "1")
    assert code == 2
    assert json.loads(out)["error"]["type"] == "NotContraction"


@pytest.mark.parametrize("fixture", DENSITY_FIXTURES)
def test_determinism_and_schema_all_commands(tmp_path, fixture):
    path = str(FIXDIR / fixture)
    # single-plane moments square every factor of the determinant, so the
    # two zero routes agree only to sqrt(eps) there; the tolerance override
    # flag exists for exactly that case
    zeros_args = [path, "--n", "3"]
    if fixture == "vanishing_density.json":
        zeros_args += ["--tol-route", "1e-7"]
    commands = [
        ("moments-to-verblunsky", "moments_to_verblunsky",
         [path, "--n", "4"]),
        ("orthopolys", "orthopolys", [path, "--n", "4"]),
        ("zeros", "zeros", zeros_args),
        ("cd", "cd", [path, "--n", "3", "--samples", "20", "--seed", "5"]),
        ("sv", "sv", [path, "--n", "5"]),
        ("baxter", "baxter", [path, "--n", "12"]),
        ("grid", "grid", [path, "--grid", "64"]),
    ]
    for command, schema, argv in commands:
        code1, out1 = run(tmp_path, command, *argv)
        assert code1 == 0, (command, out1[:200])
        code2, out2 = run(tmp_path, command, *argv)
        assert out1 == out2  # byte-identical reruns
        validate(schema, out1)


def test_random_gamma_determinism(tmp_path):
    _, out1 = run(tmp_path, "random-gamma", "--seed", "3", "--n", "6")
    _, out2 = run(tmp_path, "random-gamma", "--seed", "3", "--n", "6")
    assert out1 == out2
    _, out3 = run(tmp_path, "random-gamma", "--seed", "4", "--n", "6")
    assert out1 != out3


def test_csv_outputs(tmp_path):
    path = str(FIXDIR / "bernstein_szego_05.json")
    out = tmp_path / "out.csv"
    code = main(["zeros", path, "--n", "3", "--format", "csv", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "degree,family,root_re,root_im,modulus"
    assert len(lines) > 3
    code = main(["sv", path, "--n", "4", "--format", "csv", "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == "n,partial_product,gap"
    code = main(["baxter", path, "--n", "8", "--format", "csv", "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == "n,gamma_modulus,l1_partial_sum"
    code = main(["grid", path, "--grid", "32", "--format", "csv", "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0].startswith("theta,w11_re")


def test_frame_override(tmp_path):
    path = str(FIXDIR / "smooth_trig.json")
    frame = json.dumps({"i": [0, 0, 1, 0], "j": [0, 0, 0, 1]})
    code, out = run(tmp_path, "moments-to-verblunsky", path, "--n", "4",
                    "--frame", frame)
    assert code == 0
    base_code, base = run(tmp_path, "moments-to-verblunsky", path, "--n", "4")
    got = json.loads(out)["result"]["gammas"]
    want = json.loads(base)["result"]["gammas"]
    # Verblunsky coefficients are global: frame change must not move them
    for a, b in zip(got, want):
        assert max(abs(x - y) for x, y in zip(a, b)) < 1e-9


def test_missing_file(tmp_path):
    code, out = run(tmp_path, "sv", str(FIXDIR / "nope.json"), "--n", "3")
    assert code == 2


def test_gamma_fixture_as_moment_source(tmp_path):
    code, out = run(tmp_path, "orthopolys", str(FIXDIR / "random_gamma_7.json"),
                    "--n", "5")
    assert code == 0
    validate("orthopolys", out)


def test_no_convergence_maps_to_exit_4(tmp_path, monkeypatch):
    from qopuc import cli
    from qopuc.errors import NoConvergence

    def boom(args):
        raise NoConvergence("iteration budget exhausted")

    monkeypatch.setitem(cli._COMMANDS, "sv", boom)
    out = tmp_path / "out.json"
    code = cli.main(["sv", str(FIXDIR / "lebesgue.json"), "--out", str(out)])
    assert code == 4
    assert json.loads(out.read_text())["error"]["type"] == "NoConvergence"


def test_tol_pd_override(tmp_path):
    # near-trivial fixture: tight pivot tolerance passes, loose one rejects
    path = str(FIXDIR / "bernstein_szego_05.json")
    code, out = run(tmp_path, "moments-to-verblunsky", path, "--n", "4",
                    "--tol-pd", "1e-12")
    assert code == 0
    code, out = run(tmp_path, "moments-to-verblunsky", path, "--n", "4",
                    "--tol-pd", "1e6")
    assert code == 2
    assert json.loads(out)["error"]["type"] == "NotPositiveDefinite"


def test_cli_reference_values(tmp_path):
    # gamma0 = 0.5 fixture: max root modulus 0.5, everything inside the ball
    code, out = run(tmp_path, "zeros", str(FIXDIR / "bernstein_szego_05.json"),
                    "--n", "3")
    assert code == 0
    rows = json.loads(out)["result"]["per_degree"]
    assert all(abs(r["max_root_modulus"] - 0.5) < 1e-6 for r in rows)
    assert all(r["all_inside_ball"] for r in rows)

    # flat density: gap identically zero
    code, out = run(tmp_path, "sv", str(FIXDIR / "lebesgue.json"), "--n", "4")
    assert code == 0
    gaps = json.loads(out)["result"]["gap_history"]
    assert max(abs(g) for g in gaps) < 1e-13

    # flat density: the diagonal identity is exact
    code, out = run(tmp_path, "cd", str(FIXDIR / "lebesgue.json"), "--n", "4",
                    "--samples", "50")
    assert code == 0
    assert json.loads(out)["result"]["max_residual"] < 1e-12
