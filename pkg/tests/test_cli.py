import csv
import io
import json
import math

import pytest

from cascadenet.cli import RunConfig, main, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write_spec(tmp_path, data, name="net.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def elements_spec(tmp_path):
    return write_spec(tmp_path, {
        "M": 3, "gamma": 1.0, "loss": 0.1,
        "elements": [
            {"m": 1, "mp": 2, "t": 0.3, "phi": 0.2},
            {"m": 1, "mp": 3, "t": 0.6, "phi": 1.1},
            {"m": 2, "mp": 3, "t": 0.5, "phi": 2.0},
        ],
    })


@pytest.fixture
def evenodd_spec(tmp_path):
    return write_spec(tmp_path, {
        "M": 5, "gamma": 1.0,
        "regular": {"taus": [0.4, 0.0, 0.5, 0.5], "phis": [0.3, 0.3 + math.pi / 2, 0.0, 0.0]},
    })


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_couplings_csv(elements_spec):
    code, out, _ = call("couplings", elements_spec)
    assert code == 0
    table = rows(out)
    assert table[0] == ["m", "re_1", "im_1", "re_2", "im_2", "re_3", "im_3"]
    assert len(table) == 4


def test_couplings_check(elements_spec):
    code, out, err = call("couplings", elements_spec, "--check", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["max_discrepancy"] < 1e-12
    assert "zeta_oracle" in err


def test_couplings_oracle_agrees(elements_spec):
    _, a, _ = call("couplings", elements_spec, "--format", "json")
    _, b, _ = call("couplings", elements_spec, "--oracle", "--format", "json")
    za, zb = json.loads(a)["zeta"], json.loads(b)["zeta"]
    for ra, rb in zip(za, zb):
        for x, y in zip(ra, rb):
            assert x == pytest.approx(y, abs=1e-12)


def test_output_file_and_quiet(elements_spec, tmp_path):
    target = tmp_path / "z.csv"
    code, out, err = call("couplings", elements_spec, "--check", "-q", "-o", str(target))
    assert code == 0 and out == "" and err == ""
    assert target.read_text().startswith("m,")


def test_gksl_closed_form(evenodd_spec):
    code, out, err = call("gksl", evenodd_spec, "--closed-form", "evenodd")
    assert code == 0
    data = json.loads(out)
    assert sum(data["rates"]) == pytest.approx(5.0)
    assert max(data["closed_form_deviation"].values()) < 1e-10
    assert "closed-form deviations" in err


def test_gksl_closed_form_rejects_other_networks(tmp_path):
    spec = write_spec(tmp_path, {"M": 3, "gamma": 1.0, "regular": {"taus": [0.4, 0.2], "phis": [0, 0]}})
    code, _, err = call("gksl", spec, "--closed-form", "evenodd")
    assert code == 2
    assert "tau_2 = 0" in err


def test_xi_chiral_channel(tmp_path):
    spec = write_spec(tmp_path, {"M": 6, "gamma": 1.0, "regular": {"taus": [0] * 5, "phis": [0.7] * 5}})
    code, out, _ = call("xi", spec)
    assert code == 0
    table = rows(out)[1:]
    assert [int(r[0]) for r in table] == [1, 2, 3, 4, 5]
    for r in table:
        assert float(r[3]) == pytest.approx(1.0, abs=1e-12)


def test_xi_degrees(tmp_path):
    rad = write_spec(tmp_path, {"M": 4, "gamma": 1.0, "regular": {"taus": [0.2] * 3, "phis": [math.pi / 2] * 3}}, "a.json")
    deg = write_spec(tmp_path, {"M": 4, "gamma": 1.0, "regular": {"taus": [0.2] * 3, "phis": [90] * 3}}, "b.json")
    _, a, _ = call("xi", rad, "--format", "json")
    _, b, _ = call("xi", deg, "--format", "json", "--degrees")
    for x, y in zip(json.loads(a)["xi"], json.loads(b)["xi"]):
        assert x == pytest.approx(y, abs=1e-12)


def test_xi_needs_regular_spec(elements_spec):
    code, _, err = call("xi", elements_spec)
    assert code == 2 and "regular" in err


def test_design_round_trip(tmp_path):
    target = tmp_path / "design.json"
    code, _, err = call("design", "--tau", "0.8", "--count", "6", "-o", str(target))
    assert code == 0 and "max pruned" in err
    code, out, _ = call("xi", str(target), "--format", "json")
    assert code == 0
    abs_xi = json.loads(out)["abs_xi"]
    assert abs_xi[0] == pytest.approx(math.sqrt(0.2), abs=1e-10)
    assert max(abs_xi[1:]) < 1e-10
    assert call("gksl", str(target))[0] == 0
    assert call("couplings", str(target), "--check")[0] == 0


def test_design_below_threshold():
    code, out, err = call("design", "--tau", "0.6")
    assert code == 3 and out == ""
    assert "k=3" in err and "tau_3 = -0.6" in err


def test_threshold_table():
    code, out, _ = call("threshold", "--kmin", "2", "--kmax", "4")
    assert code == 0
    table = rows(out)
    assert table[0] == ["k", "threshold"]
    assert [float(r[1]) for r in table[1:]] == pytest.approx([0.5, 0.6181, 0.6667], abs=1e-9)


def test_threshold_bad_range():
    assert call("threshold", "--kmin", "5", "--kmax", "3")[0] == 2
    assert call("threshold", "--grid", "2")[0] == 2


def test_sweep_boundary_rows():
    code, out, _ = call("sweep", "--tau-steps", "3", "--phi2-steps", "4", "--kmax", "4", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data) == 3 * 4 * 4
    for r in data:
        if r["tau1"] == 0.0:
            assert r["abs_xi"] == pytest.approx(1.0, abs=1e-10)
        if r["tau1"] == 1.0:
            assert r["abs_xi"] == pytest.approx(float(r["k"] % 2 == 0), abs=1e-10)


def test_sweep_deterministic():
    args = ("sweep", "--tau-steps", "4", "--phi2-steps", "3", "--workers", "3")
    assert call(*args)[1] == call(*args)[1]


def test_simulate_populations(elements_spec):
    code, out, err = call("simulate", elements_spec, "--t-final", "1", "--dt", "0.01",
                          "--init", "1", "--every", "10")
    assert code == 0
    table = rows(out)
    assert table[0] == ["t", "n_1", "n_2", "n_3"]
    assert len(table) == 1 + 11
    assert float(table[-1][0]) == pytest.approx(1.0)
    assert float(table[1][1]) == 1.0
    assert "step-halving" in err


def test_simulate_moments(elements_spec):
    code, out, _ = call("simulate", elements_spec, "--t-final", "0.5", "--dt", "0.01",
                        "--init", "1", "--superposed", "--observables", "moments", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["columns"][-2:] == ["re_a_3", "im_a_3"]
    assert data["rows"][0][4] == pytest.approx(0.5)


def test_simulate_coarse_step(elements_spec):
    code, _, err = call("simulate", elements_spec, "--t-final", "3", "--dt", "0.5", "--init", "1,2")
    assert code == 3 and "reduce dt" in err


def test_simulate_resource_cap(elements_spec):
    code, _, err = call("simulate", elements_spec, "--t-final", "1", "--dt", "0.1", "--max-dim", "16")
    assert code == 4 and "exceeds cap" in err


def test_simulate_bad_options(elements_spec):
    assert call("simulate", elements_spec, "--t-final", "1", "--dt", "0")[0] == 2
    assert call("simulate", elements_spec, "--t-final", "1", "--dt", "0.1", "--init", "7")[0] == 2
    assert call("simulate", elements_spec, "--t-final", "1", "--dt", "0.1", "--d", "1")[0] == 2


@pytest.mark.parametrize("data, fragment", [
    ({"M": 3, "gamma": 1.0, "elements": [{"m": 1, "mp": 4, "t": 0.5}]}, "elements[0]: pair (1, 4)"),
    ({"M": 3, "gamma": 1.0, "elements": [{"m": 1, "mp": 2, "t": 1.5}]}, "elements[0]: pair (1, 2)"),
    ({"M": 3, "gamma": 1.0, "elements": [{"m": 1, "mp": 2}]}, "missing field 't'"),
    ({"M": 3, "gamma": 1.0}, "exactly one"),
    ({"M": 3, "gamma": 1.0, "regular": {"taus": [0.5], "phis": [0.0]}}, "M-1=2"),
])
def test_invalid_specs(tmp_path, data, fragment):
    code, _, err = call("couplings", write_spec(tmp_path, data))
    assert code == 2
    assert fragment in err


def test_missing_and_malformed_files(tmp_path):
    assert call("couplings", str(tmp_path / "nope.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("gksl", str(bad))[0] == 2


def test_unphysical_couplings_exit_code(tmp_path, monkeypatch):
    import numpy as np

    from cascadenet import amplitudes

    def fake(net):
        z = np.zeros((3, 3), dtype=complex)
        z[0, 1] = z[1, 2] = 1.0
        z[0, 2] = -1.0
        return amplitudes.CouplingMatrix(3, z)

    monkeypatch.setattr(amplitudes, "coupling_matrix", fake)
    spec = write_spec(tmp_path, {"M": 3, "gamma": 1.0, "elements": []})
    code, _, err = call("gksl", spec)
    assert code == 3 and "unphysical" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["design"])
    assert info.value.code == 2


def test_run_unknown_command():
    err = io.StringIO()
    assert run(RunConfig("bogus"), io.StringIO(), err) == 2


def test_design_near_full_transmission_round_trip(tmp_path):
    target = tmp_path / "design.json"
    assert call("design", "--tau", "0.99", "--count", "10", "-q", "-o", str(target))[0] == 0
    assert "refls" in json.loads(target.read_text())["regular"]
    code, out, _ = call("xi", str(target), "--format", "json")
    assert code == 0
    assert max(json.loads(out)["abs_xi"][1:]) < 1e-15


def test_elements_reflectivity_field(tmp_path):
    spec = write_spec(tmp_path, {"M": 2, "gamma": 1.0,
                                 "elements": [{"m": 1, "mp": 2, "t": 1.0, "r": 1e-20}]})
    code, out, _ = call("couplings", spec, "--format", "json")
    assert code == 0
    assert json.loads(out)["zeta"][0][1][1] == pytest.approx(-1e-10, rel=1e-12)
