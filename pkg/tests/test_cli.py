import csv
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from trapdist import cli, dist, verify

GOLDEN = Path(__file__).parent / "golden"


def run(*args):
    return subprocess.run(
        [sys.executable, "-m", "trapdist", *args], capture_output=True, text=True, timeout=300
    )


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("sub", ["", "eval", "sample", "verify", "fit", "curves"])
def test_help(sub):
    cp = run(*([sub] if sub else []), "--help")
    assert cp.returncode == 0, cp.stderr
    if sub == "eval":
        for flag in ("-d", "--pdf", "--cdf", "--scale"):
            assert flag in cp.stdout
    if sub == "verify":
        for flag in ("-n", "--seeds", "-o"):
            assert flag in cp.stdout
    if sub == "fit":
        for flag in ("-D", "-g", "-o"):
            assert flag in cp.stdout


class TestEval:
    def test_cdf_above_support(self, capsys):
        assert cli.main(["eval", "ab", "--cdf", "-d", "3"]) == 0
        assert capsys.readouterr().out == "1\n"

    def test_negative_distance(self, capsys):
        assert cli.main(["eval", "gh", "--pdf", "-d", "-1"]) == 0
        assert capsys.readouterr().out == "0\n"

    def test_scale(self, capsys):
        cli.main(["eval", "ab", "--pdf", "-d", "1", "--scale", "2"])
        scaled = float(capsys.readouterr().out)
        cli.main(["eval", "ab", "--pdf", "-d", "0.5"])
        base = float(capsys.readouterr().out)
        assert scaled == pytest.approx(base / 2, rel=1e-15)

    def test_seventeen_digits(self, capsys):
        cli.main(["eval", "cd", "--cdf", "-d", "1.2"])
        out = capsys.readouterr().out.strip()
        assert float(out) == dist.cdf("CD", 1.2)
        assert out == format(dist.cdf("CD", 1.2), ".17g")

    @pytest.mark.parametrize(
        "args",
        [
            ["eval", "ab", "-d", "abc"],
            ["eval", "ab", "-d", "1", "--scale", "0"],
            ["eval", "ab", "-d", "1", "--scale", "-2"],
            ["eval", "ab", "-d", "nan"],
            ["eval", "xy", "-d", "1"],
            ["eval", "ab", "--pdf", "--cdf", "-d", "1"],
        ],
    )
    def test_usage_errors(self, args):
        cp = run(*args)
        assert cp.returncode == 2
        assert cp.stderr and not cp.stdout


class TestCurves:
    def test_all(self, tmp_path):
        out = tmp_path / "out.csv"
        assert cli.main(["curves", "all", "-g", "1000", "-o", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["d", "pdf_ab", "cdf_ab", "pdf_cd", "cdf_cd", "pdf_ef", "cdf_ef", "pdf_gh", "cdf_gh"]
        data = np.array(rows[1:], dtype=float)
        assert data.shape == (1000, 9)
        assert data[:, 1::2].min() >= 0
        np.testing.assert_array_equal(data[0, 1:], 0.0)
        assert data[-1, 0] == pytest.approx(2 * math.sqrt(3))
        assert np.all(data[data[:, 0] >= 2.7, 8] == 1.0)

    def test_single_case_spans_its_support(self, tmp_path):
        out = tmp_path / "gh.csv"
        cli.main(["curves", "gh", "-g", "11", "-o", str(out)])
        rows = read_csv(out)
        assert rows[0] == ["d", "pdf_gh", "cdf_gh"]
        assert float(rows[-1][0]) == pytest.approx(math.sqrt(7))

    def test_golden(self, tmp_path):
        out = tmp_path / "g.csv"
        cli.main(["curves", "all", "-g", "5", "-o", str(out)])
        assert out.read_bytes() == (GOLDEN / "curves_all_g5.csv").read_bytes()

    def test_unwritable_path(self, tmp_path):
        cp = run("curves", "ab", "-o", str(tmp_path / "missing" / "x.csv"))
        assert cp.returncode == 3
        assert "trapdist:" in cp.stderr


class TestSample:
    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["sample", "ef", "-n", "10", "-s", "42", "-o", str(a)])
        cli.main(["sample", "ef", "-n", "10", "-s", "42", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()
        rows = read_csv(a)
        assert rows[0] == ["d"] and len(rows) == 11

    def test_ab_range(self, tmp_path):
        out = tmp_path / "ab.csv"
        cli.main(["sample", "ab", "-n", "100000", "-s", "1", "-o", str(out)])
        d = np.loadtxt(out, skiprows=1)
        assert d.min() >= 0 and d.max() <= 2

    def test_gh_max(self, tmp_path):
        n = 100_000
        out = tmp_path / "gh.csv"
        cli.main(["sample", "gh", "-n", str(n), "-s", "1", "-o", str(out)])
        d = np.loadtxt(out, skiprows=1)
        # P(max < lower) = F(lower)^n = 1e-4
        lower = verify.quantile("GH", 1e-4 ** (1 / n))
        assert lower > 0.9 * math.sqrt(7)
        assert lower <= d.max() <= math.sqrt(7)

    def test_stdout(self, capsys):
        cli.main(["sample", "cd", "-n", "3", "-s", "0"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "d" and len(lines) == 4


class TestFit:
    def test_ab(self, tmp_path, capsys):
        out = tmp_path / "fit.csv"
        assert cli.main(["fit", "ab", "-o", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0][:4] == ["case", "degree", "normr", "c_12"] and rows[0][-1] == "c_0"
        assert float(rows[1][2]) <= 0.25
        assert "ab normr=" in capsys.readouterr().out

    def test_degree_nesting(self, tmp_path):
        out2, out12 = tmp_path / "2.csv", tmp_path / "12.csv"
        cli.main(["fit", "ab", "-D", "2", "-o", str(out2)])
        cli.main(["fit", "ab", "-D", "12", "-o", str(out12)])
        assert float(read_csv(out12)[1][2]) <= float(read_csv(out2)[1][2])

    def test_all(self, tmp_path):
        out = tmp_path / "all.csv"
        cli.main(["fit", "all", "-o", str(out)])
        rows = read_csv(out)
        assert len(rows) == 5
        assert [r[0] for r in rows[1:]] == ["ab", "cd", "ef", "gh"]
        assert all(len(r) == 3 + 13 for r in rows)

    @pytest.mark.parametrize("args", [["-D", "0"], ["-D", "12", "-g", "13"], ["-g", "x"]])
    def test_invalid(self, args):
        assert run("fit", "ab", *args).returncode == 2


class TestVerify:
    def test_threshold_row(self, tmp_path):
        out = tmp_path / "r.csv"
        code = cli.main(["verify", "ab", "-n", "100", "--seeds", "7", "-o", str(out)])
        rows = read_csv(out)
        assert rows[0] == ["case", "check", "n", "seed", "statistic", "threshold", "location", "pass"]
        ks = [r for r in rows if r[1] == "ks"]
        assert len(ks) == 1
        assert ks[0][2:4] == ["100", "7"]
        assert float(ks[0][5]) == pytest.approx(0.136)
        assert code == (0 if ks[0][7] == "true" else 1)

    def test_n_minimum(self):
        assert run("verify", "ab", "-n", "99").returncode == 2

    @pytest.mark.slow
    def test_cd_million(self, tmp_path):
        out = tmp_path / "r.csv"
        cli.main(["verify", "cd", "-n", "1000000", "--seeds", "1", "-o", str(out)])
        ks = [r for r in read_csv(out) if r[1] == "ks"]
        assert float(ks[0][4]) < 0.002

    def test_failure_exit_code(self, monkeypatch, tmp_path):
        from trapdist import verify

        real = verify.consistency_suite

        def broken(case):
            checks = real(case)
            return checks[:-1] + [verify.Check(checks[-1].case, "outside_support", 1.0, 0.0, False)]

        monkeypatch.setattr(verify, "consistency_suite", broken)
        assert cli.main(["verify", "gh", "-n", "100", "--seeds", "1..3", "-o", str(tmp_path / "r.csv")]) == 1


@pytest.mark.parametrize(
    "text, seeds",
    [("7", [7]), ("1..5", [1, 2, 3, 4, 5]), ("3,1..2,9", [1, 2, 3, 9]), ("4..4", [4])],
)
def test_parse_seeds(text, seeds):
    assert cli.parse_seeds(text) == seeds


@pytest.mark.parametrize("text", ["", "5..1", "a..b", "1..", "-3"])
def test_parse_seeds_rejects(text):
    with pytest.raises(Exception):
        cli.parse_seeds(text)
