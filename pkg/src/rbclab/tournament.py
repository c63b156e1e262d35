"""Round-robin experiment driver: configurable pairings, color-split games,
per-game seed derivation, parallel execution, and artifact emission.

Determinism contract: identical config and master seed produce byte-identical
CSV outputs at any parallelism width.  Per-game randomness is derived by
keyed hashing, never from scheduling order.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .arbiter import DrawConfig, GameRecord, Outcome, play_game
from .board import Color
from .bots import BuiltinEvaluator, Evaluator, build_bot
from .infoset import DEFAULT_SIZE_CAP
from .metrics import (
    AggregateReport,
    MetricLedger,
    MetricsCollector,
    MetricsConfig,
    aggregate,
    pairing_name,
)

__all__ = [
    "BotSpec",
    "EvaluatorConfig",
    "TournamentConfig",
    "PairingResult",
    "ConfigError",
    "run",
    "run_detailed",
    "reaggregate",
    "pass_sweep",
    "SWEEP_HEADER",
    "derive_seed",
]


class ConfigError(ValueError):
    """Tournament configuration rejected before any game runs."""


@dataclass(frozen=True)
class BotSpec:
    name: str
    pass_prob: Optional[float] = None
    size_cap: int = DEFAULT_SIZE_CAP

    @classmethod
    def parse(cls, obj) -> "BotSpec":
        if isinstance(obj, str):
            return cls(obj)
        return cls(obj["name"], obj.get("pass_prob"), obj.get("size_cap", DEFAULT_SIZE_CAP))


@dataclass(frozen=True)
class EvaluatorConfig:
    kind: str = "builtin"  # "builtin" or "uci"
    depth: int = 3
    command: Optional[str] = None
    multipv: int = 5

    def build(self) -> Evaluator:
        if self.kind == "builtin":
            return BuiltinEvaluator(self.depth)
        if self.kind == "uci":
            from .engine import ExternalEngineEvaluator
            if not self.command:
                raise ConfigError("uci evaluator needs a command")
            return ExternalEngineEvaluator(self.command, self.depth, self.multipv)
        raise ConfigError(f"unknown evaluator kind {self.kind!r}")


@dataclass(frozen=True)
class TournamentConfig:
    roster: tuple[BotSpec, ...]
    games_per_pairing: int = 50
    draw_policy: str = "auto"  # auto | on | off
    master_seed: int = 0
    workers: int = 1
    out_dir: Optional[Path] = None
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    evaluator: EvaluatorConfig = field(default_factory=EvaluatorConfig)
    max_fullmoves: int = 200

    def validate(self) -> None:
        if not self.roster:
            raise ConfigError("empty roster")
        names = [b.name for b in self.roster]
        if len(set(names)) != len(names):
            raise ConfigError("roster names must be unique")
        if self.games_per_pairing < 2 or self.games_per_pairing % 2:
            raise ConfigError("games_per_pairing must be even and >= 2")
        if self.draw_policy not in ("auto", "on", "off"):
            raise ConfigError(f"bad draw policy {self.draw_policy!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_json(cls, text: str) -> "TournamentConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        metrics = MetricsConfig(**obj.get("metrics", {}))
        evaluator = EvaluatorConfig(**obj.get("evaluator", {}))
        cfg = cls(
            roster=tuple(BotSpec.parse(b) for b in obj.get("roster", [])),
            games_per_pairing=obj.get("games_per_pairing", 50),
            draw_policy=obj.get("draw_policy", "auto"),
            master_seed=obj.get("master_seed", 0),
            workers=obj.get("workers", 1),
            out_dir=Path(obj["out_dir"]) if obj.get("out_dir") else None,
            metrics=metrics,
            evaluator=evaluator,
            max_fullmoves=obj.get("max_fullmoves", 200),
        )
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class PairingResult:
    white: str
    black: str
    wins: int
    losses: int
    draws: int
    record_paths: tuple[str, ...]
    ledger_paths: tuple[str, ...]


def derive_seed(master_seed: int, white: str, black: str, game_index: int) -> int:
    key = f"{master_seed}|{white}|{black}|{game_index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def _draw_config(cfg: TournamentConfig, white: str, black: str) -> DrawConfig:
    if cfg.draw_policy == "on":
        return DrawConfig.standard(cfg.max_fullmoves)
    if cfg.draw_policy == "off":
        return DrawConfig.disabled(cfg.max_fullmoves)
    return DrawConfig.auto(white, black, cfg.max_fullmoves)


@dataclass(frozen=True)
class _GameTask:
    pairing_index: int
    game_index: int
    white: BotSpec
    black: BotSpec
    cfg: TournamentConfig


def _play_task(task: _GameTask) -> tuple[int, int, GameRecord, Optional[MetricLedger]]:
    cfg = task.cfg
    seed = derive_seed(cfg.master_seed, task.white.name, task.black.name, task.game_index)
    rng = random.Random(seed)
    white_rng = random.Random(rng.getrandbits(64))
    black_rng = random.Random(rng.getrandbits(64))
    evaluator_w = cfg.evaluator.build()
    evaluator_b = cfg.evaluator.build()
    white = build_bot(task.white.name, white_rng, evaluator_w,
                      pass_prob=task.white.pass_prob, size_cap=task.white.size_cap)
    black = build_bot(task.black.name, black_rng, evaluator_b,
                      pass_prob=task.black.pass_prob, size_cap=task.black.size_cap)
    draw_cfg = _draw_config(cfg, white.name, black.name)
    game_id = f"{pairing_name(white.name, black.name)}-{task.game_index:03d}"
    collector = None
    if cfg.metrics.enabled:
        collector = MetricsCollector(game_id, white, black, cfg.metrics)
    record = play_game(white, black, draw_cfg, seed, observer=collector)
    ledger = collector.ledger if collector else None
    return task.pairing_index, task.game_index, record, ledger


def _tasks(cfg: TournamentConfig) -> list[_GameTask]:
    tasks = []
    pairings = [(w, b) for w in cfg.roster for b in cfg.roster]
    per_cell = cfg.games_per_pairing // 2
    for p_idx, (w, b) in enumerate(pairings):
        for g in range(per_cell):
            tasks.append(_GameTask(p_idx, g, w, b, cfg))
    return tasks


def _run_tasks(cfg: TournamentConfig, tasks: list[_GameTask]):
    if cfg.workers <= 1 or len(tasks) <= 1:
        results = [_play_task(t) for t in tasks]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(cfg.workers) as pool:
            results = pool.map(_play_task, tasks)
    results.sort(key=lambda r: (r[0], r[1]))
    return results


def run_detailed(cfg: TournamentConfig):
    """run(), but also returns the per-game records and ledgers."""
    cfg.validate()
    results = _run_tasks(cfg, _tasks(cfg))
    games = [(rec, led) for _, _, rec, led in results]
    report = aggregate(games)
    _write_artifacts(cfg, results, report)
    return report, games


def run(cfg: TournamentConfig) -> AggregateReport:
    """Play every ordered pairing (self-pairings included) and write the
    records, ledgers, CSVs, and summary under cfg.out_dir."""
    report, _ = run_detailed(cfg)
    return report


def _write_artifacts(cfg: TournamentConfig, results, report: AggregateReport):
    if cfg.out_dir is None:
        return
    out = Path(cfg.out_dir)
    (out / "records").mkdir(parents=True, exist_ok=True)
    (out / "ledgers").mkdir(parents=True, exist_ok=True)
    cells: dict[tuple[str, str], dict] = {}
    for _, g_idx, rec, led in results:
        stem = f"{pairing_name(rec.white, rec.black)}-{g_idx:03d}"
        record_path = out / "records" / f"{stem}.jsonl"
        record_path.write_text(rec.to_jsonl())
        cell = cells.setdefault((rec.white, rec.black), {
            "wins": 0, "losses": 0, "draws": 0, "records": [], "ledgers": [],
        })
        cell["records"].append(str(record_path.relative_to(out)))
        if rec.outcome == Outcome.WHITE_WIN:
            cell["wins"] += 1
        elif rec.outcome == Outcome.BLACK_WIN:
            cell["losses"] += 1
        else:
            cell["draws"] += 1
        if led is not None:
            ledger_path = out / "ledgers" / f"{stem}.jsonl"
            ledger_path.write_text(led.to_jsonl())
            cell["ledgers"].append(str(ledger_path.relative_to(out)))
    pairings = [
        PairingResult(w, b, c["wins"], c["losses"], c["draws"],
                      tuple(c["records"]), tuple(c["ledgers"]))
        for (w, b), c in sorted(cells.items())
    ]
    (out / "pairings.json").write_text(json.dumps(
        [p.__dict__ for p in pairings], sort_keys=True, indent=1) + "\n")
    (out / "series.csv").write_text(report.series_csv())
    (out / "summary.csv").write_text(report.summary_csv())


def reaggregate(out_dir: Path) -> AggregateReport:
    """Rebuild the CSVs from the records and ledgers stored in out_dir."""
    records_dir = out_dir / "records"
    ledgers_dir = out_dir / "ledgers"
    if not records_dir.is_dir():
        raise ConfigError(f"{records_dir} does not exist")
    games = []
    for path in sorted(records_dir.glob("*.jsonl")):
        record = GameRecord.from_jsonl(path.read_text())
        ledger_path = ledgers_dir / path.name
        ledger = (
            MetricLedger.from_jsonl(ledger_path.read_text())
            if ledger_path.exists() else None
        )
        games.append((record, ledger))
    report = aggregate(games)
    (out_dir / "series.csv").write_text(report.series_csv())
    (out_dir / "summary.csv").write_text(report.summary_csv())
    return report


SWEEP_HEADER = "turn,pass_prob,mean_pre_sense_size,samples"


def pass_sweep(
    cfg: TournamentConfig,
    pass_probs: list[float],
    games_per_prob: Optional[int] = None,
    tracker_name: str = "MHTBot",
) -> str:
    """Tracker vs RandomBotX at each pass probability; returns the per-turn
    mean pre-sense-size CSV (the figure-1 series)."""
    cfg.validate()
    for p in pass_probs:
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"pass probability {p} outside [0, 1]")
    games = games_per_prob or cfg.games_per_pairing
    lines = [SWEEP_HEADER]
    for prob in pass_probs:
        rows: dict[int, list[int]] = {}
        for g in range(games):
            tracker_white = g % 2 == 0
            sub = replace(
                cfg,
                roster=(BotSpec(tracker_name), BotSpec(f"RandomBotP{prob}", pass_prob=prob)),
                out_dir=None,
            )
            w, b = (sub.roster if tracker_white else sub.roster[::-1])
            seed = derive_seed(cfg.master_seed, f"sweep{prob}", f"{w.name}|{b.name}", g)
            rng = random.Random(seed)
            white_rng = random.Random(rng.getrandbits(64))
            black_rng = random.Random(rng.getrandbits(64))
            white = build_bot(w.name, white_rng, cfg.evaluator.build(),
                              pass_prob=w.pass_prob, size_cap=w.size_cap)
            black = build_bot(b.name, black_rng, cfg.evaluator.build(),
                              pass_prob=b.pass_prob, size_cap=b.size_cap)
            collector = MetricsCollector(
                f"sweep-{prob}-{g:03d}", white, black,
                replace(cfg.metrics, enabled=True, branch_enabled=False),
            )
            play_game(white, black, _draw_config(cfg, white.name, black.name),
                      seed, observer=collector)
            tracker_color = Color.WHITE if tracker_white else Color.BLACK
            for row in collector.ledger.player_rows(tracker_color):
                if row.available and row.pre_sense_size is not None:
                    rows.setdefault(row.turn, []).append(row.pre_sense_size)
        for turn in sorted(rows):
            sizes = rows[turn]
            lines.append(
                f"{turn},{prob:.9g},{sum(sizes) / len(sizes):.9g},{len(sizes)}"
            )
    return "\n".join(lines) + "\n"
