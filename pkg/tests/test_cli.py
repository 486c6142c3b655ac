import io
import json

import pytest

from hsig.cli import main
from hsig.graded import basis_enumerate, dim_graded
from hsig.process import load_tree, diagnose


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def fixture_dir(tmp_path):
    assert run("fixtures", "appendix-a", "--out-dir", str(tmp_path))[0] == 0
    assert run("fixtures", "figure-1", "--n", "8", "--out-dir", str(tmp_path))[0] == 0
    return tmp_path


def write_chain(path, values):
    node = {"prob": 1, "value": [values[-1]], "children": []}
    for v in reversed(values[:-1]):
        node = {"prob": 1, "value": [v], "children": [node]}
    path.write_text(json.dumps({"time_horizon": len(values) - 1, "dim": 1, "root": node}))
    return path


class TestDims:
    def test_rank1(self):
        code, out = run("dims", "--rank", "1", "--dim", "1", "--max-degree", "6", "--check")
        assert code == 0
        assert out.splitlines()[-1].split("\t") == ["6", "64", "127"]

    def test_rank2(self):
        code, out = run("dims", "--rank", "2", "--dim", "1", "--max-degree", "3", "--check")
        rows = [l.split("\t") for l in out.splitlines()[1:]]
        assert [r[1] for r in rows] == ["1", "3", "13", "59"] and rows[-1][2] == "76"

    def test_small(self):
        _, out = run("dims", "--rank", "1", "--dim", "2", "--max-degree", "2")
        assert [l.split("\t")[1] for l in out.splitlines()[1:]] == ["1", "3", "9"]
        assert out.splitlines()[-1].endswith("\t13")

    def test_rows_match_enumeration(self):
        for r, d, k in [(1, 2, 3), (2, 2, 3), (3, 1, 4)]:
            _, out = run("dims", "--rank", str(r), "--dim", str(d), "--max-degree", str(k))
            words = basis_enumerate(r, d, k)
            counts = [int(l.split("\t")[1]) for l in out.splitlines()[1:]]
            assert sum(counts) == len(words)
            assert counts == [dim_graded(r, d, j) for j in range(k + 1)]


class TestPhi:
    def test_chain(self, tmp_path):
        f = write_chain(tmp_path / "c.json", [0, 1, 2])
        code, out = run("phi", "--input", str(f), "--rank", "0", "--trunc", "2")
        doc = json.loads(out)
        assert code == 0 and doc["provenance"] == "dp"
        coeffs = dict(zip(map(tuple, doc["value"]["words"]), doc["value"]["coefficients"]))
        assert coeffs[(0,)] == 3 and coeffs[(1,)] == 2 and coeffs[(1, 1)] == 2

    def test_oracle(self, fixture_dir):
        code, out = run("phi", "--input", str(fixture_dir / "appendix-a-x.json"), "--rank", "1",
                        "--trunc", "3", "--oracle")
        doc = json.loads(out)
        assert code == 0 and doc["oracle"]["max_deviation"] <= 1e-10 and doc["n_coefficients"] == 76

    def test_127_coefficients(self, fixture_dir):
        _, out = run("phi", "--input", str(fixture_dir / "appendix-a-x.json"), "--rank", "0", "--trunc", "6")
        assert len(json.loads(out)["value"]["coefficients"]) == 127


class TestDist:
    def test_same_file(self, fixture_dir):
        f = str(fixture_dir / "appendix-a-x.json")
        code, out = run("dist", "--a", f, "--b", f, "--rank", "1", "--trunc", "3")
        assert code == 0 and json.loads(out)["value"] == 0

    def test_counterexample_pair(self, fixture_dir):
        a, b = str(fixture_dir / "appendix-a-x.json"), str(fixture_dir / "appendix-a-y.json")
        for r in ("0", "1"):
            _, out = run("dist", "--a", a, "--b", b, "--rank", r, "--trunc", "3")
            assert json.loads(out)["value"] <= 1e-10

    def test_two_step_pair(self, fixture_dir):
        a, b = str(fixture_dir / "figure-1-left-n8.json"), str(fixture_dir / "figure-1-right-n8.json")
        _, out = run("dist", "--a", a, "--b", b, "--rank", "1", "--trunc", "3")
        assert json.loads(out)["value"] > 0


class TestFixtures:
    def test_round_trip(self, fixture_dir):
        for f in fixture_dir.glob("*.json"):
            assert diagnose(load_tree(f, check=False)) == []

    def test_two_step_values(self, fixture_dir):
        left = load_tree(fixture_dir / "figure-1-left-n8.json")
        assert left.exact and len(left.leaves) == 2

    def test_bad_n(self, tmp_path):
        assert run("fixtures", "figure-1", "--n", "0", "--out-dir", str(tmp_path))[0] == 3


class TestExitCodes:
    def test_parse_error(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("{not json")
        assert run("phi", "--input", str(f), "--rank", "0", "--trunc", "2")[0] == 2

    def test_missing_file(self, tmp_path):
        assert run("phi", "--input", str(tmp_path / "none.json"), "--rank", "0", "--trunc", "2")[0] == 2

    def test_bad_arguments(self):
        with pytest.raises(SystemExit) as exc:
            main(["phi", "--rank", "0"])
        assert exc.value.code == 2

    def test_validation_error(self, tmp_path, capsys):
        f = tmp_path / "t.json"
        f.write_text(json.dumps({"time_horizon": 1, "dim": 1, "root": {"value": [0], "children": [
            {"prob": 0.6, "value": [1]}, {"prob": 0.5, "value": [2]}]}}))
        assert run("phi", "--input", str(f), "--rank", "0", "--trunc", "2")[0] == 3
        assert "row sum 1.1" in capsys.readouterr().err

    def test_resource_error(self, fixture_dir):
        code, _ = run("phi", "--input", str(fixture_dir / "appendix-a-x.json"), "--rank", "3", "--trunc", "8")
        assert code == 4


class TestExperiment:
    ARGS = ["experiment", "--epsilon", "0.05", "--n-samples", "40", "--n-train", "20", "--n-test", "20",
            "--m-values", "10,20", "--epochs", "200"]

    def test_deterministic_csv(self, tmp_path):
        code, a = run(*self.ARGS)
        _, b = run(*self.ARGS)
        assert code == 0 and a == b and a.startswith("m,accuracy_phi0,accuracy_phi1\n")

    def test_output_file(self, tmp_path):
        csv_path = tmp_path / "acc.csv"
        code, out = run(*self.ARGS, "--output", str(csv_path))
        assert code == 0 and out == ""
        assert csv_path.read_text().count("\n") == 3

    def test_zero_samples(self):
        assert run("experiment", "--n-samples", "0")[0] == 3
