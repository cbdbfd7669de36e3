import json
import warnings
from pathlib import Path

import pytest

from ctori.cli import run
from ctori.constructible import WildReductionWarning

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def _quiet_wild():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        yield


def golden(name: str) -> str:
    return str(GOLDEN / name)


def test_validate(capsys):
    assert run(["validate", "--input", golden("norm1_qi.ctdata")]) == 0
    out = capsys.readouterr().out
    assert "OK torus document" in out
    assert "place 2: bad" in out


def test_dualize_roundtrip(capsys, tmp_path):
    # dualize twice reproduces the input byte-identically
    mid = tmp_path / "dual.ctdata"
    assert run(["dualize", "--input", golden("constant_Z.ctdata"),
                "--output", str(mid)]) == 0
    assert run(["dualize", "--input", str(mid)]) == 0
    out = capsys.readouterr().out
    # strip the 'wrote ...' line from the first call
    body = out[out.index("ctdata-v1"):]
    assert body == (GOLDEN / "constant_Z.ctdata").read_text()


def test_bidual_check_document(capsys):
    assert run(["bidual-check", "--input", golden("norm1_qi.ctdata")]) == 0
    assert "pass" in capsys.readouterr().out


def test_bidual_check_random(capsys):
    assert run(["--seed", "7", "bidual-check", "--random", "5"]) == 0
    out = capsys.readouterr().out
    assert out.count("pass") == 5


def test_lfactor_good_place(capsys):
    assert run(["lfactor", "--input", golden("split_gm.ctdata"), "--place", "q=5"]) == 0
    assert capsys.readouterr().out.strip() == "1 - 1/5*t"


def test_lfactor_listed_and_oracle_places(capsys):
    assert run(["lfactor", "--input", golden("norm1_qi.ctdata"), "--place", "2"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert run(["lfactor", "--input", golden("norm1_qi.ctdata"),
                "--oracle", golden("mod4.oracle"), "--place", "q=3"]) == 0
    assert capsys.readouterr().out.strip() == "1 + 1/3*t"


def test_lseries_nf(capsys):
    assert run(["lseries", "--input", golden("split_gm.ctdata"),
                "--oracle", golden("trivial.oracle"), "--s", "2.0",
                "--truncate", "500", "--precision", "30"]) == 0
    out = capsys.readouterr().out
    assert "L(2.0) ~ 0.8319" in out
    assert "tail bound" in out


def test_lseries_ff(capsys):
    assert run(["lseries", "--input", golden("split_gm.ctdata"), "--mode", "ff",
                "--curve-q", "2", "--cutoff", "6"]) == 0
    out = capsys.readouterr().out
    assert "T^0: 1" in out and "T^1: -3/2" in out and "T^2: 1/2" in out
    assert "rational fit: 1 - 3/2*t + 1/2*t^2" in out


def test_conductor(capsys):
    assert run(["conductor", "--input", golden("norm1_qi.ctdata")]) == 0
    out = capsys.readouterr().out
    assert "c_2 = 1" in out


def test_decompose(capsys):
    assert run(["decompose", "--input", golden("norm1_qi.ctdata")]) == 0
    out = capsys.readouterr().out
    assert "field Q(i): 1" in out
    assert "field Q: -1" in out


def test_order(capsys):
    assert run(["order", "--input", golden("split_gm.ctdata")]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_chi(capsys):
    assert run(["chi", "--input", golden("norm1_qi.ctdata")]) == 0
    out = capsys.readouterr().out.strip()
    assert out.startswith("1.2732395447")


def test_verify_sv_pass_and_json(capsys):
    code = run(["verify-sv", "--input", golden("norm1_qi.ctdata"),
                "--oracle", golden("mod4.oracle"), "--tolerance", "1e-8"])
    assert code == 0
    out = capsys.readouterr().out
    assert "verdict        pass" in out
    assert "1.2732395" in out
    code = run(["--json", "verify-sv", "--input", golden("norm1_qi.ctdata"),
                "--tolerance", "1e-8"])
    assert code == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["verdict"] == "pass"
    assert rec["order"] == 0


def test_verify_sv_ff(capsys):
    assert run(["verify-sv", "--input", golden("split_gm.ctdata"), "--mode", "ff",
                "--curve-q", "3", "--tolerance", "1e-12"]) == 0
    assert "pass" in capsys.readouterr().out


def test_exit_codes(tmp_path, monkeypatch):
    # unknown flag -> usage error 2
    assert run(["lfactor", "--nope"]) == 2
    # missing file -> input error 2
    assert run(["validate", "--input", "does-not-exist.ctdata"]) == 2
    # fail verdict -> 1: a record whose class number disagrees with its own
    # character data breaks the identity between the two routes
    monkeypatch.setenv("CTORI_CACHE", str(tmp_path))
    doctored = (Path(__file__).parent.parent / "src" / "ctori" / "fixtures" / "qi.nfrec") \
        .read_text().replace("label Q(i)", "label QiWrong") \
        .replace("class_number 1", "class_number 2")
    (tmp_path / "QiWrong.nfrec").write_text(doctored)
    wrong = (GOLDEN / "norm1_qi.ctdata").read_text().replace(
        "field 0 = Q(i)", "field 0 = QiWrong")
    path = tmp_path / "wrong.ctdata"
    path.write_text(wrong)
    assert run(["verify-sv", "--input", str(path), "--tolerance", "1e-8"]) == 1


def test_invalid_config_rejected():
    assert run(["lseries", "--input", golden("split_gm.ctdata"),
                "--oracle", golden("trivial.oracle"), "--precision", "5"]) == 2
