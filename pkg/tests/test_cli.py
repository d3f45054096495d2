import csv
import io
import json
import subprocess
import sys

import pytest

from clustersim.cli import main
from clustersim.partitions import Partition, read_partition, write_partition

from conftest import P


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, p in (("a", P({0, 1}, {2}, {3})), ("b", P({0, 1}, {2, 3})), ("c", P({0}, {1}, {2, 3})),
                    ("s", Partition.singletons(4)), ("short", Partition((0, 0)))):
        paths[name] = str(tmp_path / f"{name}.txt")
        write_partition(p, paths[name])
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_score(capsys, files):
    code, out, _ = run(capsys, "score", files["a"], files["b"], "--indices", "rand")
    assert code == 0
    (row,) = rows(out)
    assert float(row["value"]) == pytest.approx(5 / 6, abs=1e-12)
    assert row["higher_is_better"] == "True"


def test_score_self_and_extremes(capsys, files):
    _, out, _ = run(capsys, "score", files["a"], files["a"], "--indices", "vi")
    assert float(rows(out)[0]["value"]) == 0
    # no pair is together in both, so Jaccard is 0
    _, out, _ = run(capsys, "score", files["a"], files["c"], "--indices", "jaccard")
    assert float(rows(out)[0]["value"]) == 0


def test_score_flags_undefined(capsys, files):
    _, out, _ = run(capsys, "score", files["s"], files["a"], "--indices", "cc,wallace_1")
    assert all(r["undefined"] for r in rows(out))


def test_json_output(capsys, files, tmp_path):
    out_file = tmp_path / "o.json"
    assert main(["score", files["a"], files["b"], "--indices", "nmi,ar", "--format", "json",
                 "--out", str(out_file)]) == 0
    data = json.loads(out_file.read_text())
    assert [d["index"] for d in data] == ["nmi", "adjusted_rand"]


@pytest.mark.parametrize("argv,code", [
    (["score", "A", "B", "--indices", "bogus"], 1),
    (["no-such-command"], 1),
    (["score", "A", "short"], 2),
    (["score", "A", "missing.txt"], 2),
])
def test_exit_codes(capsys, files, argv, code):
    argv = [files[x.lower()] if x in ("A", "B", "short") else x for x in argv]
    got, _, err = run(capsys, *argv)
    assert got == code
    assert "error" in err


def test_unknown_index_lists_available(capsys, files):
    _, _, err = run(capsys, "properties", "--indices", "nope")
    assert "available" in err and "adjusted_rand" in err


def test_matrix(capsys, files):
    code, out, _ = run(capsys, "matrix", files["a"], files["b"], files["c"], "--indices", "rand")
    assert code == 0 and len(rows(out)) == 9


def test_triplets(capsys, files, tmp_path):
    m = tmp_path / "m.txt"
    m.write_text(f"{files['a']} {files['b']} {files['c']}\n{files['a']} {files['b']} {files['b']}\n")
    code, out, _ = run(capsys, "triplets", str(m), "--indices", "ar,cc,nmi")
    assert code == 0
    table = rows(out)
    first = {(r["index_1"], r["index_2"]): r["verdict"] for r in table if r["triplet"] == "1"}
    assert first[("adjusted_rand", "correlation_coefficient")] == "consistent"
    assert {r["verdict"] for r in table if r["triplet"] == "2"} == {"tie"}
    agg = {(r["index_1"], r["index_2"]): r for r in table if r["triplet"] == "all"}
    for (i, j), r in agg.items():
        assert r["percent"] == agg[(j, i)]["percent"]
        assert r["ties"] == "1"


def test_find_cover_and_replay(capsys, tmp_path):
    d = tmp_path / "cover"
    code, out, err = run(capsys, "find-cover", "--indices", "nmi,nmi_max,rand", "--n-max", "6",
                         "--budget", "60", "--out-dir", str(d))
    assert code == 0 and "cover size" in err
    claimed = set()
    for r in rows(out):
        claimed |= {tuple(p.split("/")) for p in r["inconsistent_pairs"].split(";") if p}
    code, out, _ = run(capsys, "triplets", str(d / "manifest.txt"), "--indices", "nmi,nmi_max,rand")
    seen = {(r["index_1"], r["index_2"]) for r in rows(out) if r["verdict"] == "inconsistent"}
    assert claimed <= seen


def test_find_cover_guard(capsys):
    code, _, _ = run(capsys, "find-cover", "--n-max", "20")
    assert code == 1


def test_find_cover_budget_exhausted(capsys):
    code, _, err = run(capsys, "find-cover", "--n-max", "4", "--budget", "0")
    assert code == 3 and "uncovered" in err


def test_properties_table(capsys):
    code, out, _ = run(capsys, "properties", "--indices", "cd", "--min-bound", "40", "--strong-bound", "10",
                       "--n-max", "5")
    assert code == 0
    header, row = out.splitlines()[:2]
    assert header.split() == ["index", "max", "min", "sym", "dist", "lin", "mono", "strong", "const",
                              "as-const", "bias"]
    assert row.split() == ["correlation_distance", "✓", "✓", "✓", "✓", "✓", "✓", "✓", "✗", "✓", "none"]
    assert "witnesses:" in out and "baseline_differs" in out


def test_properties_csv(capsys):
    code, out, _ = run(capsys, "properties", "--indices", "fnmi", "--n-max", "4", "--format", "csv")
    table = rows(out)
    assert code == 0 and {r["property"] for r in table} >= {"symmetry", "monotonicity"}
    sym = next(r for r in table if r["property"] == "symmetry")
    assert sym["verdict"] == "violated" and json.loads(sym["witness"])["kind"] == "asymmetric"


def test_baseline_tests(capsys):
    code, out, _ = run(capsys, "baseline-tests", "--indices", "ar,nmi", "--n-values", "30,40", "--r", "30")
    table = rows(out)
    assert code == 0
    fisher = {(r["index"], r["combines"]): r for r in table if r["test"] == "fisher-combined"}
    assert fisher[("nmi", "anova-baseline")]["reject"] == "True"


def test_experiments(capsys, tmp_path):
    ref = tmp_path / "ref.txt"
    write_partition(Partition(tuple(i % 10 for i in range(100))), ref)
    code, out, _ = run(capsys, "experiment", "k-scan", "--ref", str(ref), "--k-values", "2,4,100",
                       "--indices", "ar", "--samples", "20")
    table = rows(out)
    assert code == 0 and [r["value"] for r in table] == ["2", "4", "100"]
    code, out, _ = run(capsys, "experiment", "s-scan", "--ref", str(ref), "--s-values", "1,2",
                       "--indices", "ar", "--samples", "20")
    assert code == 0 and len(rows(out)) == 2
    code, _, _ = run(capsys, "experiment", "s-scan", "--ref", str(ref), "--s-values", "4")
    assert code == 2


def test_csv_is_deterministic(capsys, tmp_path):
    ref = tmp_path / "ref.txt"
    write_partition(Partition(tuple(i % 7 for i in range(70))), ref)
    argv = ["experiment", "k-scan", "--ref", str(ref), "--k-values", "2,5", "--samples", "15", "--seed", "4"]
    _, o1, _ = run(capsys, *argv)
    _, o2, _ = run(capsys, *argv)
    assert o1 == o2


def test_indices_list(capsys):
    code, out, _ = run(capsys, "indices", "list")
    table = rows(out)
    assert code == 0 and len(table) == 35
    hub = next(r for r in table if r["id"] == "hubert")
    assert hub["equivalence_rep"] == "rand"


def test_console_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "clustersim", "score", files["a"], files["b"], "--indices", "rand"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "0.8333" in res.stdout
