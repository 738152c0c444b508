import json
import subprocess
import sys

import pytest

from exco2.canon import is_isomorphic
from exco2.cli import run
from exco2.constructions import build_Bn, build_F4, build_F5, build_Sn
from exco2.core import Hypergraph, write_hg


def invoke(argv, capsys):
    code = run(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 and out.out else None), out.err


def strip_time(report):
    report = dict(report)
    report.pop("wall_time")
    return report


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, G in (("b4", build_Bn(4)), ("f4", build_F4()), ("f5", build_F5())):
        paths[name] = tmp_path / f"{name}.hg"
        write_hg(G, paths[name])
    return paths


def test_co2_b4(files, capsys):
    code, rep, _ = invoke(["co2", "--in", str(files["b4"]), "--decompose", "--normalized"], capsys)
    assert code == 0
    assert rep["results"]["value"] == "24"
    assert rep["results"]["normalized"] == "1"
    assert rep["results"]["decomposition"]["holds"] is True
    assert str(files["b4"]) in rep["inputs"] and len(rep["inputs"][str(files["b4"])]) == 64


def test_construct_then_co2(tmp_path, capsys):
    path = tmp_path / "c3.hg"
    code, rep, _ = invoke(["construct", "Cn", "--n", "3", "--out", str(path)], capsys)
    assert code == 0 and path.exists()
    code, rep, _ = invoke(["co2", "--in", str(path)], capsys)
    assert rep["results"]["value"] == "3"


def test_construct_list_and_blow_up(capsys):
    code, rep, _ = invoke(["construct", "list"], capsys)
    assert code == 0 and {"Cn", "Bn", "Sn", "F4", "F5"} <= set(rep["results"]["constructions"])
    code, rep, _ = invoke(["construct", "K", "--n", "4", "--t", "2"], capsys)
    assert code == 0 and rep["results"]["n"] == 8 and rep["results"]["edges"] == 32


def test_search_exco2_cancellative(files, tmp_path, capsys):
    out = tmp_path / "max"
    code, rep, _ = invoke(["search", "exco2", "--n", "5", "--forbid", f"{files['f4']},{files['f5']}",
                           "--emit-maximizers", str(out)], capsys)
    assert code == 0
    res = rep["results"]
    assert res["value"] == "20" and res["normalized"] == "2/9"
    assert len(res["maximizers"]) == 1
    from exco2.core import read_hg

    assert is_isomorphic(read_hg(res["maximizers"][0]), build_Sn(5))


def test_search_aliases(capsys):
    code, rep, _ = invoke(["search", "exco2", "--n", "4", "--forbid", "K4"], capsys)
    assert code == 0 and rep["results"]["value"] == "15"


def test_density(files, tmp_path, capsys):
    edge = tmp_path / "e.hg"
    write_hg(Hypergraph(3, 3, [(0, 1, 2)]), edge)
    code, rep, _ = invoke(["density", "--host", str(files["b4"]), "--pattern", str(edge)], capsys)
    assert rep["results"]["induced"] == "4" and rep["results"]["density"] == "1"
    code, rep, _ = invoke(["density", "--host", str(files["b4"]), "--pattern", str(files["f4"]), "--copies"], capsys)
    assert code == 0 and rep["results"]["copies"] == "4"


def test_error_exit_codes(tmp_path, capsys):
    code, _, err = invoke(["co2", "--in", str(tmp_path / "missing.hg")], capsys)
    assert code == 1 and "error" in err
    bad = tmp_path / "bad.hg"
    bad.write_text("not a graph\n")
    code, _, err = invoke(["co2", "--in", str(bad)], capsys)
    assert code == 1
    code, _, _ = invoke(["search", "exco2", "--n", "9"], capsys)
    assert code == 1
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_reports_are_deterministic(files, capsys):
    argv = ["search", "monotonicity", "--n-min", "4", "--n-max", "5", "--forbid", "F4,F5"]
    _, a, _ = invoke(argv, capsys)
    _, b, _ = invoke(argv + ["--threads", "2"], capsys)
    a, b = strip_time(a), strip_time(b)
    assert a["threads"] == 1 and b["threads"] == 2
    a.pop("threads"), b.pop("threads"), a.pop("command"), b.pop("command")
    assert a == b


def test_report_to_file(files, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = run(["--out", str(out), "co2", "--in", str(files["b4"])])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(out.read_text())["results"]["value"] == "24"


@pytest.mark.parametrize("argv, stem", [
    (["search", "monotonicity", "--n-min", "4", "--n-max", "6", "--forbid", "K4"], "monotonicity"),
    (["search", "argmax", "--k", "5", "--n", "40"], "argmax_k5"),
    (["search", "sweep", "--k", "6", "--n", "30", "--step", "3"], "sweep_k6"),
    (["search", "convergence", "--name", "Cn", "--n-min", "9", "--n-max", "60", "--step", "3", "--limit", "1/3"],
     "convergence_Cn"),
])
def test_plot_outputs(argv, stem, tmp_path, capsys):
    code, rep, _ = invoke(["--plot", str(tmp_path)] + argv, capsys)
    assert code == 0
    png, tsv = tmp_path / f"{stem}.png", tmp_path / f"{stem}.tsv"
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    lines = tsv.read_text().splitlines()
    assert len(lines) >= 2 and "\t" in lines[0]
    assert rep["results"]["figures"] == [str(png)]


def test_argmax_report(capsys):
    code, rep, _ = invoke(["search", "argmax", "--k", "7", "--n", "60"], capsys)
    assert rep["results"]["dstar_strictly_first"] is True
    assert rep["results"]["ranking"][0]["is_dstar"] is True


def test_flag_emit_and_verify(tmp_path, capsys):
    sdp = tmp_path / "p.dat-s"
    code, rep, _ = invoke(["flag", "emit", "--forbid", "F4,F5", "--N", "5", "--out", str(sdp)], capsys)
    assert code == 0 and sdp.exists() and rep["results"]["admissibles"] > 0
    from exco2.certificate import Certificate

    Certificate.from_json('{"lambda": "1", "types": []}').save(tmp_path / "c.json")
    code, rep, _ = invoke(["flag", "verify", "--forbid", "F4,F5", "--N", "5", "--cert", str(tmp_path / "c.json")],
                          capsys)
    assert code == 0 and rep["results"]["lambda"] == "1"
    Certificate.from_json('{"lambda": "1/100", "types": []}').save(tmp_path / "c.json")
    code, _, err = invoke(["flag", "verify", "--forbid", "F4,F5", "--N", "5", "--cert", str(tmp_path / "c.json")],
                          capsys)
    assert code == 1 and err


def test_flag_solve(tmp_path, capsys):
    cert = tmp_path / "cert.json"
    code, rep, _ = invoke(["flag", "solve", "--forbid", "F4,F5", "--N", "5", "--cert-out", str(cert)], capsys)
    assert code == 0 and rep["results"]["verified"] is True
    assert cert.exists()
    code, rep2, _ = invoke(["flag", "verify", "--forbid", "F4,F5", "--N", "5", "--cert", str(cert)], capsys)
    assert rep2["results"]["lambda"] == rep["results"]["lambda"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "exco2", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()
