import json

from disposable.cli import dispatch

from . import oracles


def _run(capsys, *argv):
    code = dispatch(list(argv))
    return code, capsys.readouterr().out


def test_generate_vtm(capsys):
    code, out = _run(capsys, "generate", "vtm", "--length", "12")
    assert code == 0 and out == "012021012102\n"


def test_generate_thue_morse(capsys):
    code, out = _run(capsys, "generate", "thue-morse", "--length", "16")
    assert out.strip() == "".join(str(oracles.thue_morse(n)) for n in range(16))


def test_check(capsys):
    code, out = _run(capsys, "check", "--length", "5000", "--naive-length", "300")
    assert code == 0
    assert out.startswith("# config: ")
    assert "squarefree_accelerated,true" in out


def test_disposable_against_engine(capsys, tmp_path):
    code, out = _run(capsys, "disposable", "--limit", "204", "--max-half", "128", "--engine")
    assert code == 0
    rows = out.strip().splitlines()[2:]
    assert len(rows) == 19 and rows[0] == "0,"
    path = tmp_path / "v.json"
    assert dispatch(["disposable", "--limit", "30", "--json", "--out", str(path)]) == 0
    data = json.loads(path.read_text())
    assert len(data["verdicts"]) == 31 and data["config"]["limit"] == 30


def test_gaps(capsys):
    code, out = _run(capsys, "gaps", "--limit", str(1 << 14))
    assert code == 0 and out == "6 10 26\n"


def test_density_exact(capsys):
    code, out = _run(capsys, "density", "--mode", "exact")
    assert code == 0 and out == "1/12\n"


def test_density_empirical(tmp_path):
    path = tmp_path / "d.csv"
    assert dispatch(["density", "--mode", "empirical", "--checkpoints", "204", "4096", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: ") and lines[1] == "n,count,density"
    assert lines[2].startswith("204,19,")


def test_construct_then_verify(tmp_path, capsys):
    word, ledger, report = tmp_path / "w.txt", tmp_path / "ledger.json", tmp_path / "report.json"
    code, out = _run(capsys, "construct", "--phases", "1", "--out", str(word), "--ledger", str(ledger))
    assert code == 0 and "false" not in out
    data = json.loads(ledger.read_text())
    assert [r["length"] for r in data["records"]] == list(range(414, 469))
    assert dispatch(["verify", "--ledger", str(ledger), "--prefix", str(word), "--out", str(report)]) == 0
    statuses = {r["status"] for r in json.loads(report.read_text())["records"]}
    assert statuses == {"disposable_certified_to_bound"}


def test_verify_rejects_corrupted_ledger(tmp_path, capsys):
    ledger, report = tmp_path / "ledger.json", tmp_path / "report.json"
    _run(capsys, "construct", "--phases", "1", "--ledger", str(ledger))
    data = json.loads(ledger.read_text())
    for r in data["records"]:
        r["length"] += 1
    ledger.write_text(json.dumps(data))
    assert dispatch(["verify", "--ledger", str(ledger), "--out", str(report)]) == 1
    assert all(r["witness"] is not None for r in json.loads(report.read_text())["records"])
