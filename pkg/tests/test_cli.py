import csv
import io
import json

import pytest

from binpart import cli
from binpart.core import write_bpx
from binpart.cover import Packing


@pytest.fixture
def ex_files(tmp_path, ex1, ex2):
    a, b = tmp_path / "ex1.bpx", tmp_path / "ex2.bpx"
    write_bpx(ex1, str(a))
    write_bpx(ex2, str(b))
    return str(a), str(b)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_generate_writes_files_and_manifest(tmp_path, capsys):
    out = tmp_path / "h"
    code, _, _ = run(["generate", "--family", "h", "--l", "3", "--groups", "100", "--count", "4", "--seed", "42", "--out", str(out)], capsys)
    assert code == 0
    files = sorted(p.name for p in out.glob("*.bpx"))
    assert len(files) == 4
    man = json.loads((out / "manifest.json").read_text())
    assert [e["file"] for e in man["instances"]] == files
    assert all(e["opt"] == "100" or e["opt"] == 100 for e in man["instances"])


def test_generate_r_family(tmp_path, capsys):
    out = tmp_path / "r"
    code, _, _ = run(["generate", "--family", "r", "--n", "1000", "--k", "10", "--count", "3", "--seed", "7", "--out", str(out)], capsys)
    assert code == 0
    from binpart.core import read_bpx

    for p in out.glob("*.bpx"):
        assert read_bpx(str(p)).n == 1000


def test_generate_is_byte_identical(tmp_path, capsys):
    args = ["generate", "--family", "h", "--l", "4", "--groups", "30", "--count", "3", "--seed", "5"]
    run(args + ["--out", str(tmp_path / "a")], capsys)
    run(args + ["--out", str(tmp_path / "b")], capsys)
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()


def test_solve_example1(ex_files, capsys):
    code, out, _ = run(["solve", ex_files[0], "--algo", "heurc", "--epsilon", "0.1", "--seed", "1"], capsys)
    assert code == 0
    (r,) = rows(out)
    assert list(r) == list(cli.FIELDS)
    assert int(r["bins"]) <= 990 and float(r["ratio"]) <= 1.1
    assert r["runtime_ms"] == ""


def test_solve_example2(ex_files, capsys):
    code, out, _ = run(["solve", ex_files[1], "--algo", "heurc", "--epsilon", "0.1"], capsys)
    (r,) = rows(out)
    assert (r["bins"], r["lb_size"], r["lb_waste"], r["ratio"]) == ("3000", "2000", "2667", "1.124859")
    assert r["delta_star"] == "0.4"
    code, out, _ = run(["solve", ex_files[1], "--algo", "ffd"], capsys)
    assert rows(out)[0]["bins"] == "3000"


def test_solve_json_timing_and_packing(ex_files, tmp_path, capsys):
    dump = tmp_path / "bins.tsv"
    code, out, _ = run(["solve", ex_files[1], "--algo", "bfd", "--format", "json", "--timing", "--emit-packing", str(dump)], capsys)
    rec = json.loads(out)
    assert rec["bins"] == 3000 and rec["runtime_ms"] != ""
    lines = dump.read_text().splitlines()
    assert len(lines) == 3000
    assert lines[0].split("\t")[0] == "0"


def test_lb_command(ex_files, capsys):
    code, out, _ = run(["lb", ex_files[1], "--format", "json"], capsys)
    rec = json.loads(out)
    assert rec["lb_size"] == 2000 and rec["lb_waste"] == 2667 and rec["f_max"] == "0.75"


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "/nonexistent.bpx", "--algo", "ffd"],
        ["solve", "EX", "--algo", "heurc"],
        ["solve", "EX", "--algo", "algob", "--epsilon", "0.7"],
        ["generate", "--family", "h", "--groups", "10", "--out", "X"],
        ["generate", "--family", "r", "--n", "10", "--k", "40", "--out", "X"],
        ["bench", "/nonexistent-dir"],
    ],
)
def test_usage_errors_exit_2(argv, ex_files, tmp_path, capsys):
    argv = [ex_files[0] if a == "EX" else str(tmp_path / "o") if a == "X" else a for a in argv]
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["solve", "x.bpx", "--algo", "nope"])
    assert e.value.code == 2


def test_invalid_packing_exits_3(ex_files, capsys, monkeypatch):
    def broken(inst):
        return Packing(inst, ())

    monkeypatch.setitem(cli.BASELINES, "ffd", broken)
    code, _, err = run(["solve", ex_files[0], "--algo", "ffd"], capsys)
    assert code == 3 and "invalid" in err


def test_bench_rows_summary_and_determinism(tmp_path, capsys):
    corpus = tmp_path / "c"
    run(["generate", "--family", "h", "--l", "3", "--groups", "40", "--count", "3", "--seed", "1", "--out", str(corpus)], capsys)
    args = ["bench", str(corpus), "--algos", "heurc,ffd,nf", "--epsilon", "0.1", "--seed", "3"]
    code, out1, err = run(args, capsys)
    assert code == 0
    rs = rows(out1)
    assert len(rs) == 9
    assert [r["algo"] for r in rs[:3]] == ["heurc", "ffd", "nf"]
    assert "bins <= 1.1 x reference" in err and "vs ffd" in err
    _, out2, _ = run(args, capsys)
    _, out3, _ = run(args + ["--jobs", "2"], capsys)
    assert out1 == out2 == out3


def test_bench_records_scale_errors(ex_files, tmp_path, capsys):
    code, out, err = run(["bench", ex_files[0], "--algos", "exact"], capsys)
    (r,) = rows(out)
    assert code == 0 and r["error"].startswith("scale") and r["bins"] == ""


def test_bench_empty_corpus(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    code, out, _ = run(["bench", str(tmp_path / "empty")], capsys)
    assert code == 0 and out == ",".join(cli.FIELDS) + "\n"
