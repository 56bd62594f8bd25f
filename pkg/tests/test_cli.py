import numpy as np
import pytest

from gdbfm.channel import bsc, derive_stream, transmit
from gdbfm.cli import main
from gdbfm.codes import builtin_code, trapping_set_instance
from gdbfm.graph import load_alist, save_alist


@pytest.fixture()
def noisy_word(tmp_path, reg3x6):
    y = transmit(np.ones(reg3x6.N), bsc(0.03), derive_stream(51, "cliw"))
    path = tmp_path / "word.txt"
    np.savetxt(path, y)
    return str(path)


class TestDecode:
    def test_success_exit_zero(self, noisy_word, capsys):
        rc = main(["decode", "--code", "reg3x6", "--word", noisy_word,
                   "--preset", "bsc-reg3x6", "--family", "gdbf-wm"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "success true" in out
        lines = dict(l.split(" ", 1) for l in out.splitlines())
        assert int(lines["iterations"]) >= 1
        # all-(+1) decoded word packs to all-zero hex
        assert set(lines["word"]) == {"0"}
        assert len(lines["word"]) == 2 * ((1296 + 7) // 8)

    def test_failure_exit_one(self, tmp_path, capsys):
        graph, y = trapping_set_instance()
        path = tmp_path / "trap.txt"
        np.savetxt(path, y)
        save_alist(graph, tmp_path / "trap.alist")
        rc = main(["decode", "--alist", str(tmp_path / "trap.alist"),
                   "--word", str(path), "--variant", "GDBF", "--max-iter",
                   "20"])
        assert rc == 1
        assert "success false" in capsys.readouterr().out

    def test_randomized_needs_seed(self, noisy_word, capsys):
        rc = main(["decode", "--code", "reg3x6", "--word", noisy_word,
                   "--variant", "PGDBF", "--alpha", "0.5", "--p", "0.9"])
        assert rc == 2
        rc = main(["decode", "--code", "reg3x6", "--word", noisy_word,
                   "--variant", "PGDBF", "--alpha", "0.5", "--p", "0.9",
                   "--seed", "4"])
        assert rc == 0

    def test_mp_decoder_needs_channel(self, noisy_word):
        assert main(["decode", "--code", "reg3x6", "--word", noisy_word,
                     "--variant", "BP"]) == 3
        assert main(["decode", "--code", "reg3x6", "--word", noisy_word,
                     "--variant", "BP", "--channel", "bsc:0.03"]) == 0

    def test_length_mismatch(self, tmp_path):
        path = tmp_path / "short.txt"
        np.savetxt(path, np.ones(10))
        assert main(["decode", "--code", "reg3x6",
                     "--word", str(path)]) == 3


class TestSimulate:
    def test_plan_file_and_determinism(self, tmp_path, capsys):
        plan = tmp_path / "plan.ini"
        plan.write_text(
            "[plan]\ncode = reg3x6\npoints = bsc:0.04\nmax_frames = 200\n"
            "target_errors = 50\nseed = 3\n"
            "[decoder gdbf]\nvariant = GDBF\nalpha = 0.5\n")
        outs = []
        for workers, name in ((1, "a.csv"), (2, "b.csv")):
            rc = main(["simulate", "--plan", str(plan),
                       "--workers", str(workers),
                       "--out", str(tmp_path / name)])
            assert rc == 0
            outs.append((tmp_path / name).read_bytes())
        assert outs[0] == outs[1]

    def test_builtin_plan_to_stdout(self, capsys):
        rc = main(["simulate", "--builtin-plan", "table1-bsc-reg3x6",
                   "--points", "bsc:0.03", "--frames", "50",
                   "--target-errors", "5", "--seed", "2"])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.startswith("# gdbfm")
        assert "point,decoder,frames" in out

    def test_needs_a_plan(self, capsys):
        assert main(["simulate", "--seed", "1"]) == 2

    def test_bad_plan_path(self):
        assert main(["simulate", "--plan", "/nonexistent.ini"]) == 3


class TestLoopstats:
    def test_csv_shape(self, capsys):
        rc = main(["loopstats", "--code", "reg3x6", "--points",
                   "bsc:0.03,bsc:0.05", "--trials", "20", "--alpha", "0.5",
                   "--cap", "200", "--seed", "8"])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("channel_point,")
        assert len(lines) == 3
        assert lines[1].startswith("bsc:0.03,20,")


class TestExpand:
    def test_round_trip(self, tmp_path, capsys):
        out_path = tmp_path / "r36.alist"
        rc = main(["expand", "reg3x6", "-o", str(out_path)])
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "N 1296" in stdout and "M 648" in stdout
        g = load_alist(out_path)
        ref = builtin_code("reg3x6")
        assert np.array_equal(g.chk_adj, ref.chk_adj)

    def test_base_matrix_file(self, tmp_path, capsys):
        base = tmp_path / "base.txt"
        base.write_text("1 2 3\n0 1\n")
        rc = main(["expand", str(base), "-o", str(tmp_path / "c.alist")])
        assert rc == 0
        g = load_alist(tmp_path / "c.alist")
        assert g.N == 6 and g.M == 3

    def test_missing_file(self):
        assert main(["expand", "/nonexistent.bm"]) == 3


def test_usage_errors():
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["decode"]) == 2          # --word required
