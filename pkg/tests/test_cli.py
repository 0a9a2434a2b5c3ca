"""Command line interface tests, run in process through cli.main."""

import json
import os

import pytest

from cdtw.baselines import dtw
from cdtw.cli import main


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def pair(tmp_path):
    a = write(tmp_path, "a.csv", "0\n1\n")
    b = write(tmp_path, "b.csv", "0.5\n1.5\n")
    return a, b


class TestCompute:
    def test_identical_files_zero(self, tmp_path, capsys):
        a = write(tmp_path, "a.csv", "0\n1\n2\n")
        b = write(tmp_path, "b.csv", "0\n1\n2\n")
        assert main(["compute", a, b]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["value"] == 0
        assert out["measure"] == "cdtw"
        assert out["n"] == 3 and out["m"] == 3

    def test_shifted_pair_value(self, pair, capsys):
        assert main(["compute", *pair]) == 0
        out = json.loads(capsys.readouterr().out)
        assert abs(out["value"] - 0.25) <= 1e-6

    def test_grid_requires_resolution(self, pair, capsys):
        assert main(["compute", *pair, "--measure", "cdtw-grid"]) == 2
        assert "resolution" in capsys.readouterr().err

    def test_grid_with_resolution(self, pair, capsys):
        rc = main(["compute", *pair, "--measure", "cdtw-grid", "--resolution", "1"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["value"] == pytest.approx(0.5, abs=1e-9)

    def test_dtw_and_dfrechet(self, tmp_path, capsys):
        a = write(tmp_path, "a.csv", "0\n1\n2\n")
        b = write(tmp_path, "b.csv", "0\n2\n")
        assert main(["compute", a, b, "--measure", "dtw"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == 1
        assert main(["compute", a, b, "--measure", "dfrechet"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == 1

    def test_csv_format_and_path_file(self, pair, tmp_path, capsys):
        target = str(tmp_path / "warp.json")
        rc = main(["compute", *pair, "--stats", "--path", target, "--format", "csv"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        header = lines[0].split(",")
        row = lines[1].split(",")
        assert header[:4] == ["measure", "value", "n", "m"]
        assert row[0] == "cdtw"
        assert float(row[1]) == pytest.approx(0.25, abs=1e-9)
        data = json.load(open(target))
        assert data["points"][0] == [0.0, 0.0]
        assert data["points"][-1] == [1.0, 1.0]

    def test_stats_json(self, pair, capsys):
        assert main(["compute", *pair, "--stats"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["stats"]["cells_solved"] == 1
        assert out["stats"]["total_pieces"] > 0

    def test_timestamp_column_warns_once(self, tmp_path, capsys):
        a = write(tmp_path, "ts.csv", "0,1000\n1,1001\n")
        b = write(tmp_path, "plain.csv", "0\n1\n")
        assert main(["compute", a, b]) == 0
        err = capsys.readouterr().err
        assert err.count("ignoring second column") == 1
        assert "ts.csv" in err

    def test_parse_error_names_file_and_line(self, tmp_path, capsys):
        a = write(tmp_path, "bad.csv", "0\nnope\n")
        b = write(tmp_path, "ok.csv", "0\n1\n")
        assert main(["compute", a, b]) == 2
        err = capsys.readouterr().err
        assert "bad.csv:2" in err

    def test_json_series_input(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", "[0, 1]")
        b = write(tmp_path, "b.json", "[0.5, 1.5]")
        assert main(["compute", a, b]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(0.25)

    def test_bad_json_series(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", '{"not": "a series"}')
        b = write(tmp_path, "b.json", "[0, 1]")
        assert main(["compute", a, b]) == 2
        assert "numeric array" in capsys.readouterr().err

    def test_too_short_series(self, tmp_path, capsys):
        a = write(tmp_path, "a.csv", "1\n1\n1\n")
        b = write(tmp_path, "b.csv", "0\n1\n")
        assert main(["compute", a, b]) == 2

    def test_missing_file(self, tmp_path, capsys):
        b = write(tmp_path, "b.csv", "0\n1\n")
        assert main(["compute", str(tmp_path / "absent.csv"), b]) == 2

    def test_stats_rejected_for_dtw(self, pair, capsys):
        assert main(["compute", *pair, "--measure", "dtw", "--stats"]) == 2

    def test_determinism_bit_for_bit(self, pair, capsys):
        assert main(["compute", *pair]) == 0
        first = capsys.readouterr().out
        assert main(["compute", *pair]) == 0
        assert capsys.readouterr().out == first


class TestMatrix:
    def test_identical_files_zero_matrix(self, tmp_path, capsys):
        for name in ("p.csv", "q.csv", "r.csv"):
            write(tmp_path, name, "0\n1\n2\n")
        assert main(["matrix", str(tmp_path)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == ",p.csv,q.csv,r.csv"
        for line in lines[1:]:
            assert set(line.split(",")[1:]) == {"0"}

    def test_shifted_pair_offdiagonal(self, tmp_path, capsys):
        write(tmp_path, "a.csv", "0\n1\n")
        write(tmp_path, "b.csv", "0.5\n1.5\n")
        assert main(["matrix", str(tmp_path)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        row = lines[1].split(",")
        assert row[0] == "a.csv"
        assert float(row[2]) == pytest.approx(0.25, abs=1e-6)

    def test_symmetric_zero_diagonal(self, tmp_path, capsys):
        for k, vals in enumerate(("0\n1\n", "0.5\n1.5\n", "1\n0\n0.5\n")):
            write(tmp_path, f"s{k}.csv", vals)
        assert main(["matrix", str(tmp_path)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        grid = [line.split(",")[1:] for line in lines[1:]]
        for i in range(3):
            assert float(grid[i][i]) == 0
            for j in range(3):
                assert abs(float(grid[i][j]) - float(grid[j][i])) <= 1e-9

    def test_dtw_measure_matches_library(self, tmp_path, capsys):
        write(tmp_path, "a.csv", "0\n1\n2\n")
        write(tmp_path, "b.csv", "0\n2\n")
        assert main(["matrix", str(tmp_path), "--measure", "dtw"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        got = float(lines[1].split(",")[2])
        assert got == dtw([0, 1, 2], [0, 2])

    def test_jobs_parallel_matches_serial(self, tmp_path, capsys):
        for k, vals in enumerate(("0\n1\n", "0.5\n1.5\n", "1\n0\n", "0\n2\n1\n")):
            write(tmp_path, f"s{k}.csv", vals)
        assert main(["matrix", str(tmp_path)]) == 0
        serial = capsys.readouterr().out
        assert main(["matrix", str(tmp_path), "--jobs", "3"]) == 0
        assert capsys.readouterr().out == serial

    def test_out_file(self, tmp_path):
        write(tmp_path, "a.csv", "0\n1\n")
        write(tmp_path, "b.csv", "0.5\n1.5\n")
        target = str(tmp_path / "m.csv")
        assert main(["matrix", str(tmp_path), "--out", target]) == 0
        text = open(target).read()
        assert text.startswith(",a.csv,b.csv")

    def test_too_few_files(self, tmp_path, capsys):
        write(tmp_path, "only.csv", "0\n1\n")
        assert main(["matrix", str(tmp_path)]) == 2


class TestOracleCheck:
    def test_shifted_pair_report(self, pair, capsys):
        assert main(["oracle-check", *pair]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "resolution,grid,gap"
        gaps = [float(line.split(",")[2]) for line in lines[1:5]]
        assert all(g >= -1e-9 for g in gaps)
        for a, b in zip(gaps, gaps[1:]):
            assert b <= a + 1e-12
        assert gaps[-1] <= 0.02 * 0.25 + 0.01

    def test_identical_zero_gaps(self, tmp_path, capsys):
        a = write(tmp_path, "a.csv", "0\n1\n0.5\n")
        b = write(tmp_path, "b.csv", "0\n1\n0.5\n")
        assert main(["oracle-check", a, b]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        for line in lines[1:5]:
            assert float(line.split(",")[2]) == 0

    def test_descending_resolutions_rejected(self, pair, capsys):
        assert main(["oracle-check", *pair, "--resolutions", "16", "4"]) == 2

    def test_nonpositive_resolution_rejected(self, pair, capsys):
        assert main(["oracle-check", *pair, "--resolutions", "0", "4"]) == 2

    def test_impossible_tol_gives_sandwich_exit(self, tmp_path, capsys):
        # force a failure by demanding a negative final gap
        a = write(tmp_path, "a.csv", "0\n1\n0.3\n1.7\n")
        b = write(tmp_path, "b.csv", "0.4\n1.9\n0.1\n")
        rc = main(["oracle-check", a, b, "--resolutions", "2", "--tol", "-1"])
        assert rc == 4
        assert "sandwich" in capsys.readouterr().err


class TestHeatmap:
    def test_outputs_for_shifted_pair(self, pair, tmp_path, capsys):
        out = str(tmp_path / "dump")
        assert main(["heatmap", *pair, out, "--samples", "9"]) == 0
        heights = open(os.path.join(out, "heatmap.csv")).read().splitlines()
        assert heights[0] == "x,y,h"
        assert len(heights) == 1 + 9 * 9
        pathlines = open(os.path.join(out, "path.csv")).read().splitlines()
        assert pathlines[0] == "x,y"
        assert pathlines[1] == "0,0"
        assert pathlines[-1] == "1,1"
        valleys = open(os.path.join(out, "valleys.csv")).read().splitlines()
        assert valleys[0] == "i,j,x0,y0,x1,y1"
        assert valleys[1].startswith("1,1,0.5,0,1,0.5")

    def test_identical_curves_diagonal(self, tmp_path, capsys):
        a = write(tmp_path, "a.csv", "0\n1\n2\n")
        b = write(tmp_path, "b.csv", "0\n1\n2\n")
        out = str(tmp_path / "dump")
        assert main(["heatmap", a, b, out, "--samples", "5"]) == 0
        for line in open(os.path.join(out, "path.csv")).read().splitlines()[1:]:
            x, y = map(float, line.split(","))
            assert x == pytest.approx(y, abs=1e-9)
        # samples on the diagonal report zero height
        for line in open(os.path.join(out, "heatmap.csv")).read().splitlines()[1:]:
            x, y, h = map(float, line.split(","))
            if abs(x - y) < 1e-12:
                assert h == 0

    def test_zero_samples_rejected(self, pair, tmp_path, capsys):
        assert main(["heatmap", *pair, str(tmp_path / "o"), "--samples", "0"]) == 2

    def test_unwritable_output(self, pair, tmp_path, capsys):
        blocker = tmp_path / "blocked"
        blocker.write_text("file, not a directory")
        assert main(["heatmap", *pair, str(blocker), "--samples", "4"]) == 2
