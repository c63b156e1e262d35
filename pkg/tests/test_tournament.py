import json

import pytest

from rbclab.cli import main as cli_main
from rbclab.metrics import MetricsConfig
from rbclab.tournament import (
    BotSpec,
    ConfigError,
    EvaluatorConfig,
    SWEEP_HEADER,
    TournamentConfig,
    derive_seed,
    pass_sweep,
    reaggregate,
    run,
)


def small_config(out_dir=None, workers=1, seed=5, games=2):
    return TournamentConfig(
        roster=(BotSpec("RandomBot25"), BotSpec("RandomBot0", pass_prob=0.0)),
        games_per_pairing=games,
        master_seed=seed,
        workers=workers,
        out_dir=out_dir,
        metrics=MetricsConfig(enabled=True, size_cap=2000, branch_cap=60),
        evaluator=EvaluatorConfig("builtin", depth=1),
        max_fullmoves=12,
    )


class TestConfig:
    def test_validation_catches_odd_games(self):
        cfg = small_config()
        bad = TournamentConfig(roster=cfg.roster, games_per_pairing=3)
        with pytest.raises(ConfigError):
            bad.validate()

    def test_validation_catches_duplicate_names(self):
        bad = TournamentConfig(roster=(BotSpec("MHTBot"), BotSpec("MHTBot")))
        with pytest.raises(ConfigError):
            bad.validate()

    def test_from_json(self):
        text = json.dumps({
            "roster": ["MHTBot", {"name": "RandomBot25"}],
            "games_per_pairing": 4,
            "master_seed": 9,
            "evaluator": {"kind": "builtin", "depth": 2},
            "metrics": {"enabled": True, "branch_cap": 100},
        })
        cfg = TournamentConfig.from_json(text)
        assert cfg.roster[0].name == "MHTBot"
        assert cfg.evaluator.depth == 2
        assert cfg.metrics.branch_cap == 100

    def test_from_json_rejects_garbage(self):
        with pytest.raises(ConfigError):
            TournamentConfig.from_json("{not json")


class TestSeedDerivation:
    def test_deterministic_and_distinct(self):
        a = derive_seed(1, "A", "B", 0)
        assert a == derive_seed(1, "A", "B", 0)
        assert a != derive_seed(1, "A", "B", 1)
        assert a != derive_seed(1, "B", "A", 0)
        assert a != derive_seed(2, "A", "B", 0)


class TestRun:
    def test_self_pairing_color_swap(self, tmp_path):
        cfg = TournamentConfig(
            roster=(BotSpec("RandomBot25"),),
            games_per_pairing=2,
            master_seed=3,
            out_dir=tmp_path,
            metrics=MetricsConfig(enabled=False),
            max_fullmoves=6,
        )
        run(cfg)
        records = sorted((tmp_path / "records").glob("*.jsonl"))
        assert len(records) == 1  # one ordered self-pairing cell, one game
        text = records[0].read_text()
        assert '"white": "RandomBot25"' in text and '"black": "RandomBot25"' in text

    def test_ordered_pairings_and_artifacts(self, tmp_path):
        cfg = small_config(out_dir=tmp_path)
        report = run(cfg)
        names = sorted(p.name for p in (tmp_path / "records").glob("*.jsonl"))
        # 2 bots -> 4 ordered cells (self-pairings included), 1 game each
        assert len(names) == 4
        assert (tmp_path / "series.csv").exists()
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "ledgers").is_dir()
        assert len(report.summary_csv().splitlines()) == 5

    def test_deterministic_across_workers(self, tmp_path):
        out1, out2, out8 = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        run(small_config(out_dir=out1, workers=1))
        run(small_config(out_dir=out2, workers=1))
        run(small_config(out_dir=out8, workers=8))
        s1 = (out1 / "summary.csv").read_bytes()
        assert s1 == (out2 / "summary.csv").read_bytes()
        assert s1 == (out8 / "summary.csv").read_bytes()
        assert (out1 / "series.csv").read_bytes() == (out8 / "series.csv").read_bytes()

    def test_draw_policy_auto(self, tmp_path):
        cfg = TournamentConfig(
            roster=(BotSpec("PerfectInfoBot"), BotSpec("RandomBot25")),
            games_per_pairing=2,
            master_seed=1,
            out_dir=tmp_path,
            metrics=MetricsConfig(enabled=False),
            evaluator=EvaluatorConfig("builtin", depth=1),
            max_fullmoves=30,
        )
        run(cfg)
        for path in (tmp_path / "records").glob("*.jsonl"):
            header = json.loads(path.read_text().splitlines()[0])
            has_perfect = "PerfectInfoBot" in (header["white"], header["black"])
            assert header["threefold"] == has_perfect

    def test_pairings_index_written(self, tmp_path):
        cfg = small_config(out_dir=tmp_path)
        run(cfg)
        pairings = json.loads((tmp_path / "pairings.json").read_text())
        assert len(pairings) == 4
        for p in pairings:
            assert p["wins"] + p["losses"] + p["draws"] == len(p["record_paths"])
            for rel in p["record_paths"] + p["ledger_paths"]:
                assert (tmp_path / rel).exists()

    def test_reaggregate_reproduces_csv(self, tmp_path):
        cfg = small_config(out_dir=tmp_path)
        run(cfg)
        before = (tmp_path / "summary.csv").read_bytes()
        series_before = (tmp_path / "series.csv").read_bytes()
        reaggregate(tmp_path)
        assert (tmp_path / "summary.csv").read_bytes() == before
        assert (tmp_path / "series.csv").read_bytes() == series_before


class TestPassSweep:
    def test_empty_probs_header_only(self):
        cfg = small_config()
        csv_text = pass_sweep(cfg, [], games_per_prob=2)
        assert csv_text.strip() == SWEEP_HEADER

    def test_probs_validated(self):
        with pytest.raises(ConfigError):
            pass_sweep(small_config(), [1.5], games_per_prob=2)

    def test_sweep_rows_shape(self):
        cfg = TournamentConfig(
            roster=(BotSpec("MHTBot"), BotSpec("RandomBot25")),
            games_per_pairing=2,
            master_seed=2,
            metrics=MetricsConfig(enabled=True, branch_enabled=False, size_cap=5000),
            evaluator=EvaluatorConfig("builtin", depth=1),
            max_fullmoves=8,
        )
        csv_text = pass_sweep(cfg, [0.25], games_per_prob=2)
        lines = csv_text.strip().splitlines()
        assert lines[0] == SWEEP_HEADER
        assert len(lines) > 1
        for line in lines[1:]:
            turn, prob, mean, n = line.split(",")
            assert float(prob) == 0.25
            assert int(n) >= 1
            assert float(mean) >= 1


class TestCli:
    def test_play_exit_ok(self, capsys):
        code = cli_main([
            "play", "--white", "RandomBot25", "--black", "RandomBot25",
            "--seed", "3", "--max-fullmoves", "10", "--depth", "1",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "RandomBot25 vs RandomBot25" in out

    def test_play_writes_record(self, tmp_path, capsys):
        path = tmp_path / "game.jsonl"
        code = cli_main([
            "play", "--white", "RandomBot25", "--black", "RandomBot0",
            "--black-pass", "0.0", "--seed", "4", "--max-fullmoves", "8",
            "--record", str(path),
        ])
        assert code == 0
        assert path.exists()
        from rbclab.arbiter import GameRecord, replay
        replay(GameRecord.from_jsonl(path.read_text()))

    def test_tournament_cli(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "roster": ["RandomBot25"],
            "games_per_pairing": 2,
            "master_seed": 7,
            "metrics": {"enabled": False},
            "max_fullmoves": 6,
            "out_dir": str(tmp_path / "out"),
        }))
        code = cli_main(["tournament", "--config", str(cfg_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("pairing,")

    def test_config_error_exit_code(self, tmp_path):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text("{bad json")
        assert cli_main(["tournament", "--config", str(cfg_path)]) == 2

    def test_missing_config_file(self):
        assert cli_main(["tournament", "--config", "/nonexistent/x.json"]) == 2

    def test_report_cli(self, tmp_path, capsys):
        run(small_config(out_dir=tmp_path))
        code = cli_main(["report", "--out", str(tmp_path)])
        assert code == 0
        assert capsys.readouterr().out.startswith("pairing,")

    def test_sweep_cli(self, tmp_path, capsys):
        code = cli_main([
            "sweep", "--probs", "0.5", "--games", "2", "--seed", "2",
            "--depth", "1", "--max-fullmoves", "6", "--out", str(tmp_path),
        ])
        assert code == 0
        assert (tmp_path / "sweep.csv").read_text().startswith(SWEEP_HEADER)

    def test_forfeit_exit_code(self, capsys, monkeypatch):
        import rbclab.cli as cli_mod
        from rbclab.arbiter import EndReason, Outcome

        class FakeRecord:
            white, black = "A", "B"
            outcome = Outcome.BLACK_WIN
            reason = EndReason.FORFEIT
            halfturns = ()
            final_fen = "x"
        monkeypatch.setattr(cli_mod, "play_game", lambda *a, **k: FakeRecord())
        code = cli_main(["play", "--white", "RandomBot25", "--black", "RandomBot25"])
        assert code == 4
