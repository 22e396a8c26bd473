import io
import json
import shutil

import pytest

from heptaca import datafiles
from heptaca.cli import main


def run(argv, tmp_path=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def manifest(err):
    return json.loads(err.strip().splitlines()[-1])


def test_no_arguments():
    code, _, err = run([])
    assert code == 2 and "usage" in err
    assert manifest(err)["exit_status"] == 2


def test_bad_subcommand():
    assert run(["dance"])[0] == 2


def test_validate_table():
    code, out, err = run(["validate-table"])
    assert code == 0
    assert "entries\t137" in out and "max_sigma\t156" in out
    m = manifest(err)
    assert m["findings"] == [] and m["exit_status"] == 0 and len(m["inputs"]) == 1


def test_validate_bad_table(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("0 1-11000:2 6\n")
    code, _, err = run(["validate-table", str(p)])
    assert code == 1 and "entry 0" in " ".join(manifest(err)["findings"])


def test_grid():
    code, out, _ = run(["grid", "--radius", "3"])
    assert code == 0
    assert out.splitlines()[-1] == "3\t56\t56"
    code, out, _ = run(["grid", "--neighbors", "1,1"])
    assert out.splitlines()[0] == "(1,1)\t0\t0"
    assert run(["grid", "--distance", "0", "3,5"])[1] == "0\t(3,5)\t3\n"


def test_simulate_is_deterministic():
    args = ["simulate", "--gadget", "fork", "--steps", "6", "--format", "json"]
    a = run(args)
    b = run(args)
    assert a[0] == 0 and a[1] == b[1] and a[2] == b[2]
    rows = json.loads(a[1])["rows"]
    assert [r["entry"] for r in rows[:6]] == [11, 11, 12, 13, 14, 15]


def test_simulate_tsv():
    code, out, _ = run(["simulate", "--gadget", "joined-path", "--color", "mauve", "--steps", "4"])
    assert code == 0 and out.splitlines()[0] == "time\tstate\tsigma\tentry"


def test_simulate_errors():
    assert run(["simulate", "--gadget", "nope"])[0] == 1
    assert run(["simulate", "--gadget", "fork", "--steps", "0"])[0] == 2
    assert run(["simulate", "--gadget", "fork", "--color", "green"])[0] == 2
    # a blue locomotive into the mauve-only input crashes the run
    assert run(["simulate", "--gadget", "converter-m2b", "--color", "blue"])[0] == 1


def test_render(tmp_path):
    code, out, _ = run(["render", "--gadget", "fork", "--color", "blue", "--steps", "2", "--out", str(tmp_path / "f.svg"), "--size", "200"])
    assert code == 0
    files = out.split()
    assert len(files) == 3 and all(f.endswith(".svg") for f in files)
    code, out, _ = run(["render", "--gadget", "fork", "--radius", "3", "--out", str(tmp_path / "idle")])
    assert (tmp_path / "idle.svg").read_text().count("<polygon ") == 85


def test_railway(tmp_path):
    prog = tmp_path / "p.txt"
    prog.write_text("loop: DEC r0 -> add | Z:done\nadd: INC r1 -> loop\ndone: HALT\n")
    log = tmp_path / "ev.tsv"
    code, out, _ = run(["railway", "--program", str(prog), "--r0", "3", "--r1", "4", "--log", str(log)])
    assert code == 0
    assert "r0\t0" in out and "r1\t7" in out
    assert log.read_text().startswith("seq\tinstr")
    prog.write_text("a: INC r0 -> a\n")
    assert run(["railway", "--program", str(prog), "--fuel", "100"])[0] == 1
    prog.write_text("a: INC r0 -> b\n")
    assert run(["railway", "--program", str(prog)])[0] == 1
    assert run(["railway", "--program", str(prog), "--r0", "-1"])[0] == 2


def test_golden_clean():
    code, out, err = run(["golden"])
    assert code == 0, err
    assert out.count("\tok\t") == 14


@pytest.fixture
def data_copy(tmp_path, monkeypatch):
    d = tmp_path / "data"
    shutil.copytree(datafiles.PACKAGE_DATA, d)
    monkeypatch.setenv("HCA_DATA_DIR", str(d))
    return d


def _corrupt(d, old, new):
    p = d / "table.txt"
    text = p.read_text()
    assert old in text
    p.write_text(text.replace(old, new))


def test_golden_corrupted_sum(data_copy):
    _corrupt(data_copy, "\n3 1-11000:2 5\n", "\n3 1-11000:2 6\n")
    code, _, err = run(["golden"])
    assert code == 1 and "entry 3" in " ".join(manifest(err)["findings"])


def test_golden_corrupted_outcome(data_copy):
    _corrupt(data_copy, "\n3 1-11000:2 5\n", "\n3 1-11000:4 5\n")
    code, _, err = run(["golden"])
    assert code == 1 and "entry 3" in " ".join(manifest(err)["findings"])


def test_golden_missing_erratum(data_copy):
    p = data_copy / "errata.tsv"
    lines = [l for l in p.read_text().splitlines() if not l.startswith("ch-b\t")]
    p.write_text("\n".join(lines) + "\n")
    code, out, _ = run(["golden"])
    assert code == 1 and "ch-b\tconverter-b2m\tFAIL" in out


def test_manifest_file(tmp_path):
    m = tmp_path / "m.json"
    code, _, err = run(["--manifest", str(m), "grid", "--radius", "1"])
    assert code == 0 and err == ""
    assert json.loads(m.read_text())["command"] == "grid"
