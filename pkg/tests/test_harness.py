import numpy as np
import pytest

from coopadv import capi, harness
from coopadv.harness import SchemaError, SummaryRow, SweepConfig, summarize
from coopadv.tradecomm import GameConfig

TINY_GAME = GameConfig(2, 2)
TINY_CAPI = capi.CapiConfig(episodes=40, eval_every=20, candidates=8)


def tiny_sweep(tmp_path, name, **kw):
    args = dict(
        game=TINY_GAME,
        capi=TINY_CAPI,
        epsilons=(0.0, 0.5),
        seeds=(0, 1),
        output_dir=str(tmp_path / name),
    )
    args.update(kw)
    return SweepConfig(**args)


def write_raw(path, rows):
    lines = [harness.RAW_HEADER] + rows
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


class TestSweepConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SweepConfig(epsilons=())
        with pytest.raises(ValueError):
            SweepConfig(seeds=())
        with pytest.raises(ValueError):
            SweepConfig(epsilons=(-0.1,))
        with pytest.raises(ValueError):
            SweepConfig(jobs=0)

    def test_defaults_match_protocol(self):
        cfg = SweepConfig()
        assert cfg.epsilons == (0.0, 0.3, 0.5, 0.7)
        assert cfg.seeds == (0, 1, 2, 3, 4)


class TestRunCell:
    def test_row_shape_and_labels(self):
        rows = harness.run_cell(TINY_GAME, TINY_CAPI, seed=7, epsilon=0.0, eps_index=0)
        assert len(rows) == 2  # episodes / eval_every
        for seed, eps, ep, ret, kind in rows:
            assert seed == 7 and eps == 0.0 and kind == "none"
            assert 0.0 <= ret <= 1.0
        assert [r[2] for r in rows] == [20, 40]

    def test_attacked_cell_tags_fgsm(self):
        rows = harness.run_cell(TINY_GAME, TINY_CAPI, seed=0, epsilon=0.5, eps_index=2)
        assert all(kind == "fgsm" for _, _, _, _, kind in rows)

    def test_cell_seed_separates_groups(self):
        assert harness.cell_seed(0, 0) != harness.cell_seed(0, 1)
        assert harness.cell_seed(0, 0) != harness.cell_seed(1, 0)
        assert harness.cell_seed(3, 2) == harness.cell_seed(3, 2)


class TestRunSweep:
    def test_files_written_and_row_counts(self, tmp_path):
        raw, summary = harness.run_sweep(tiny_sweep(tmp_path, "a"))
        raw_lines = open(raw).read().splitlines()
        assert raw_lines[0] == harness.RAW_HEADER
        # 2 eps * 2 seeds * 2 eval rows
        assert len(raw_lines) == 1 + 8
        sum_lines = open(summary).read().splitlines()
        assert sum_lines[0] == harness.SUMMARY_HEADER
        assert len(sum_lines) == 1 + 4  # 2 eps * 2 episodes

    def test_raw_byte_identical_across_runs(self, tmp_path):
        a, _ = harness.run_sweep(tiny_sweep(tmp_path, "a"))
        b, _ = harness.run_sweep(tiny_sweep(tmp_path, "b"))
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_parallel_matches_serial(self, tmp_path):
        a, sa = harness.run_sweep(tiny_sweep(tmp_path, "serial"))
        b, sb = harness.run_sweep(tiny_sweep(tmp_path, "par", jobs=2))
        assert open(a, "rb").read() == open(b, "rb").read()
        assert open(sa, "rb").read() == open(sb, "rb").read()

    def test_summary_recomputable_from_raw(self, tmp_path):
        raw, summary = harness.run_sweep(tiny_sweep(tmp_path, "a"))
        again = tmp_path / "again.csv"
        summarize(raw, str(again))
        assert open(summary, "rb").read() == open(again, "rb").read()

    def test_unwritable_path_fails_before_training(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        cfg = tiny_sweep(tmp_path, "unused", output_dir=str(blocker / "sub"))
        with pytest.raises(OSError):
            harness.run_sweep(cfg)


class TestSummarize:
    def test_hand_computed_two_seed_fixture(self, tmp_path):
        raw = write_raw(
            tmp_path / "r.csv",
            ["0,0.0,20,1.0,none", "1,0.0,20,0.5,none"],
        )
        (row,) = summarize(raw)
        # sd of {1.0, 0.5} is 0.5/sqrt(2); half-width 1.96*sd/sqrt(2) = 0.49
        assert row.mean_return == pytest.approx(0.75, abs=1e-12)
        assert row.ci95_low == pytest.approx(0.75 - 0.49, abs=1e-12)
        assert row.ci95_high == pytest.approx(0.75 + 0.49, abs=1e-12)
        assert row.optimal_frequency == 0.5

    def test_identical_returns_zero_width_ci(self, tmp_path):
        raw = write_raw(
            tmp_path / "r.csv",
            [f"{s},0.3,20,0.75,fgsm" for s in range(4)],
        )
        (row,) = summarize(raw)
        assert row.ci95_low == row.mean_return == row.ci95_high == 0.75

    def test_single_seed_ci_collapses_to_mean(self, tmp_path):
        raw = write_raw(tmp_path / "r.csv", ["0,0.0,20,0.8,none"])
        (row,) = summarize(raw)
        assert row.ci95_low == row.mean_return == row.ci95_high == 0.8

    def test_optimal_frequency_counts_against_threshold(self, tmp_path):
        rows = [f"{s},0.0,20,{v},none" for s, v in enumerate([1.0, 1.0, 1.0, 0.0, 1.0])]
        raw = write_raw(tmp_path / "r.csv", rows)
        (row,) = summarize(raw)
        assert row.optimal_frequency == pytest.approx(0.8, abs=1e-12)

    def test_rows_sorted_by_epsilon_then_episode(self, tmp_path):
        raw = write_raw(
            tmp_path / "r.csv",
            ["0,0.5,40,0.1,fgsm", "0,0.0,40,0.9,none",
             "0,0.5,20,0.2,fgsm", "0,0.0,20,0.3,none"],
        )
        rows = summarize(raw)
        assert [(r.epsilon, r.episode) for r in rows] == [
            (0.0, 20), (0.0, 40), (0.5, 20), (0.5, 40)
        ]

    def test_bad_header_names_line_one(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("seed,episode\n", encoding="utf-8")
        with pytest.raises(SchemaError, match="line 1"):
            summarize(str(p))

    def test_short_row_names_its_line(self, tmp_path):
        raw = write_raw(tmp_path / "r.csv", ["0,0.0,20,1.0,none", "0,0.0,40"])
        with pytest.raises(SchemaError, match="line 3"):
            summarize(raw)

    def test_non_numeric_field_names_its_line(self, tmp_path):
        raw = write_raw(tmp_path / "r.csv", ["0,0.0,20,high,none"])
        with pytest.raises(SchemaError, match="line 2"):
            summarize(raw)

    def test_out_of_range_return_rejected(self, tmp_path):
        raw = write_raw(tmp_path / "r.csv", ["0,0.0,20,1.5,none"])
        with pytest.raises(SchemaError, match="line 2"):
            summarize(raw)

    def test_empty_attack_kind_rejected(self, tmp_path):
        raw = write_raw(tmp_path / "r.csv", ["0,0.0,20,1.0,"])
        with pytest.raises(SchemaError, match="line 2"):
            summarize(raw)
