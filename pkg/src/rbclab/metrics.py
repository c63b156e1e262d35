"""Complexity measurements harvested from live games: per-turn set sizes,
information-set branching, log-scale game size, and the analytic
opponent-knowledge expansion.

All game-size arithmetic happens in log10 space (the products overflow any
native type); sums use math.fsum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .arbiter import GameObserver, GameRecord, Outcome
from .board import Board, Color, MoveRequest, MoveResult, SenseResult
from .bots import BotStrategy
from .infoset import ActionKind, InfoSet, init_infoset

__all__ = [
    "TurnRow",
    "MetricLedger",
    "MetricsConfig",
    "MetricsCollector",
    "AggregateReport",
    "game_size_log10",
    "knowledge_expansion_exponent",
    "aggregate",
    "SERIES_HEADER",
    "SUMMARY_HEADER",
]

LOG36 = math.log10(36.0)


@dataclass
class TurnRow:
    """One player half-turn of measurements.  None marks a count that was
    not computed (first turn has no opponent action; caps suppress others)."""

    player: Color
    turn: int
    pre_sense_size: Optional[int]
    post_sense_size: Optional[int]
    branch_own_sense: Optional[int]
    branch_own_move: Optional[int]
    branch_opponent_turn: Optional[int]
    available: bool

    def branch_counts(self) -> list[int]:
        return [
            c for c in (self.branch_opponent_turn, self.branch_own_sense, self.branch_own_move)
            if c is not None
        ]


@dataclass
class MetricLedger:
    """Per-game measurement log, one writer, appended turn by turn."""

    game_id: str
    white: str
    black: str
    rows: list[TurnRow] = field(default_factory=list)
    outcome: Optional[Outcome] = None

    def record_turn(self, row: TurnRow) -> None:
        if row.post_sense_size is not None and row.pre_sense_size is not None:
            assert row.post_sense_size <= row.pre_sense_size
        self.rows.append(row)

    def player_rows(self, player: Color) -> list[TurnRow]:
        return [r for r in self.rows if r.player == player]

    def to_jsonl(self) -> str:
        lines = [json.dumps({
            "type": "header", "game_id": self.game_id, "white": self.white,
            "black": self.black,
            "outcome": self.outcome.value if self.outcome else None,
        }, sort_keys=True)]
        for r in self.rows:
            lines.append(json.dumps({
                "type": "turn",
                "player": "w" if r.player == Color.WHITE else "b",
                "turn": r.turn, "pre": r.pre_sense_size, "post": r.post_sense_size,
                "b_sense": r.branch_own_sense, "b_move": r.branch_own_move,
                "b_opp": r.branch_opponent_turn, "available": r.available,
            }, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "MetricLedger":
        ledger = None
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj["type"] == "header":
                ledger = cls(obj["game_id"], obj["white"], obj["black"])
                ledger.outcome = Outcome(obj["outcome"]) if obj["outcome"] else None
            elif obj["type"] == "turn":
                ledger.rows.append(TurnRow(
                    Color.WHITE if obj["player"] == "w" else Color.BLACK,
                    obj["turn"], obj["pre"], obj["post"],
                    obj["b_sense"], obj["b_move"], obj["b_opp"], obj["available"],
                ))
        if ledger is None:
            raise ValueError("ledger text lacks a header line")
        return ledger


def game_size_log10(ledger: MetricLedger, player: Color) -> tuple[float, bool]:
    """Sum of log10 successor counts over the player's recorded actions.

    Returns (value, complete); complete is False when any turn was
    unavailable, making the value a lower bound.
    """
    complete = True
    logs: list[float] = []
    for row in ledger.player_rows(player):
        if not row.available:
            complete = False
            continue
        for count in row.branch_counts():
            logs.append(math.log10(count))
    return math.fsum(logs), complete


def knowledge_expansion_exponent(pre_sense_size: int, turn_n: int) -> float:
    """log10 states when the opponent's possible knowledge is part of the
    state: concrete count times 36^(n-1) sensing histories."""
    if turn_n < 1:
        raise ValueError("turn_n must be >= 1")
    return math.log10(pre_sense_size) + (turn_n - 1) * LOG36


@dataclass(frozen=True)
class MetricsConfig:
    enabled: bool = True
    size_cap: int = 200_000
    branch_cap: int = 3000
    branch_enabled: bool = True


class MetricsCollector(GameObserver):
    """Tracks both players' knowledge through one game and fills a ledger.

    A bot that exposes its own information set is read directly; a bot that
    does not (random, single-hypothesis, perfect-information) gets a shadow
    tracker fed from the same observation stream the bot received.  A
    perfect-information player is modeled as re-learning the true board
    after every action, so its successor counts are distinct-board counts.
    """

    def __init__(self, game_id: str, white: BotStrategy, black: BotStrategy,
                 config: MetricsConfig):
        self.config = config
        self.ledger = MetricLedger(game_id, white.name, black.name)
        self._bots = {Color.WHITE: white, Color.BLACK: black}
        self._shadow: dict[Color, Optional[InfoSet]] = {}
        self._gt_snapshot: dict[Color, Board] = {}
        self._row: dict[Color, TurnRow] = {}

    # -- helpers -----------------------------------------------------------

    def _mode(self, color: Color) -> str:
        bot = self._bots[color]
        if bot.metrics_mode == "ground_truth":
            return "ground_truth"
        return "borrowed" if bot.tracked_infoset is not None else "shadow"

    def _current_set(self, color: Color) -> Optional[InfoSet]:
        mode = self._mode(color)
        if mode == "borrowed":
            return self._bots[color].tracked_infoset
        if mode == "shadow":
            return self._shadow[color]
        return None

    def _count(self, s: Optional[InfoSet], kind: ActionKind,
               ground_truth_set: Optional[InfoSet] = None) -> Optional[int]:
        if not self.config.branch_enabled:
            return None
        if ground_truth_set is not None:
            if ground_truth_set.size > self.config.branch_cap:
                return None
            return ground_truth_set.distinct_successor_boards(kind)
        if s is None or s.overflowed or s.size > self.config.branch_cap:
            return None
        return s.successor_infoset_count(kind)

    def _singleton(self, board: Board, owner: Color) -> InfoSet:
        arr = board.array().reshape(1, -1).copy()
        return InfoSet(arr, owner, self.config.size_cap)

    # -- observer hooks -------------------------------------------------------

    def begin(self, white: str, black: str, truth: Board) -> None:
        for color in (Color.WHITE, Color.BLACK):
            self._shadow[color] = (
                init_infoset(color, self.config.size_cap)
                if self._mode(color) == "shadow" else None
            )
            self._gt_snapshot[color] = truth

    def pre_opponent_expand(self, color: Color, fullmove: int,
                            notice: Optional[int], truth: Board) -> None:
        row = self._ensure_row(color, fullmove)
        mode = self._mode(color)
        if mode == "ground_truth":
            snap = self._singleton(self._gt_snapshot[color], color)
            row.branch_opponent_turn = self._count(None, ActionKind.OPPONENT_TURN,
                                                   ground_truth_set=snap)
        else:
            row.branch_opponent_turn = self._count(
                self._current_set(color), ActionKind.OPPONENT_TURN)
            if mode == "shadow":
                shadow = self._shadow[color]
                # a truncated set may have lost the true line; freeze it
                if not shadow.overflowed:
                    self._shadow[color] = shadow.expand_opponent_turn(notice)

    def pre_sense(self, color: Color, fullmove: int) -> None:
        row = self._ensure_row(color, fullmove)
        mode = self._mode(color)
        if mode == "ground_truth":
            row.pre_sense_size = 1
            row.branch_own_sense = 1
            row.available = True
            return
        s = self._current_set(color)
        row.available = s is not None and not s.overflowed
        if s is not None:
            row.pre_sense_size = s.size if row.available else None
            row.branch_own_sense = self._count(s, ActionKind.OWN_SENSE)

    def post_sense(self, color: Color, fullmove: int, result: SenseResult) -> None:
        row = self._row[color]
        mode = self._mode(color)
        if mode == "shadow":
            shadow = self._shadow[color]
            if not shadow.overflowed:
                self._shadow[color] = shadow.filter_sense(result)
            s = self._shadow[color]
        elif mode == "borrowed":
            s = self._bots[color].tracked_infoset
        else:
            row.post_sense_size = 1
            return
        if row.available and s is not None and not s.overflowed:
            row.post_sense_size = s.size
            row.branch_own_move = self._count(s, ActionKind.OWN_MOVE)

    def post_move(self, color: Color, fullmove: int, request: MoveRequest,
                  result: MoveResult, truth_after: Board) -> None:
        row = self._row.pop(color)
        mode = self._mode(color)
        if mode == "ground_truth":
            snap = self._singleton(self._gt_snapshot[color], color)
            row.branch_own_move = self._count(None, ActionKind.OWN_MOVE,
                                              ground_truth_set=snap)
            self._gt_snapshot[color] = truth_after
        elif mode == "shadow":
            shadow = self._shadow[color]
            if not shadow.overflowed:
                self._shadow[color] = shadow.apply_own_move(request, result)
        self.ledger.record_turn(row)

    def end(self, record: GameRecord) -> None:
        self.ledger.outcome = record.outcome
        # a half-finished row remains when the game ended mid-turn (forfeit)
        for color, row in list(self._row.items()):
            self.ledger.record_turn(row)
            del self._row[color]

    def _ensure_row(self, color: Color, fullmove: int) -> TurnRow:
        if color not in self._row:
            self._row[color] = TurnRow(color, fullmove, None, None, None, None, None, False)
        return self._row[color]


# -- aggregation -------------------------------------------------------------

SERIES_HEADER = ("pairing,game_id,turn,player,pre_sense_size,post_sense_size,"
                 "branch_own_sense,branch_own_move,branch_opponent_turn,available")
SUMMARY_HEADER = ("pairing,wins,losses,draws,mean_log10_game_size,mean_branch,"
                  "mean_branch_per_action,mean_knowledge_exponent,samples,turn_samples")


def _fmt(x: Optional[float]) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


@dataclass
class AggregateReport:
    """Per-pairing standings and complexity means plus the raw series.

    Summary metric columns describe the white-side player of the ordered
    pairing; the full round-robin covers every (player, opponent) cell.
    """

    series_rows: list[str]
    summary_rows: list[str]
    pairing_stats: dict[str, dict]

    def series_csv(self) -> str:
        return "\n".join([SERIES_HEADER] + self.series_rows) + "\n"

    def summary_csv(self) -> str:
        return "\n".join([SUMMARY_HEADER] + self.summary_rows) + "\n"


def pairing_name(white: str, black: str) -> str:
    return f"{white}_vs_{black}"


def aggregate(
    games: list[tuple[GameRecord, Optional[MetricLedger]]],
) -> AggregateReport:
    """Fold completed games into the CSV series and per-pairing summary.
    Turn-limit games count as draws in the standings."""
    series: list[str] = []
    per_pairing: dict[str, dict] = {}
    for record, ledger in games:
        pairing = pairing_name(record.white, record.black)
        stats = per_pairing.setdefault(pairing, {
            "wins": 0, "losses": 0, "draws": 0, "games": 0,
            "log_sizes": [], "turn_products": [], "action_counts": [],
            "knowledge_exponents": [], "turn_samples": 0,
        })
        stats["games"] += 1
        if record.outcome == Outcome.WHITE_WIN:
            stats["wins"] += 1
        elif record.outcome == Outcome.BLACK_WIN:
            stats["losses"] += 1
        else:
            stats["draws"] += 1
        if ledger is None:
            continue
        for row in ledger.rows:
            series.append((
                pairing, ledger.game_id, row.turn,
                "white" if row.player == Color.WHITE else "black",
                _fmt(row.pre_sense_size), _fmt(row.post_sense_size),
                _fmt(row.branch_own_sense), _fmt(row.branch_own_move),
                _fmt(row.branch_opponent_turn),
                "true" if row.available else "false",
            ))
        white_rows = ledger.player_rows(Color.WHITE)
        value, complete = game_size_log10(ledger, Color.WHITE)
        if complete and white_rows:
            stats["log_sizes"].append(value)
        for row in white_rows:
            if not row.available:
                continue
            stats["turn_samples"] += 1
            counts = row.branch_counts()
            stats["action_counts"].extend(counts)
            if (row.branch_own_sense is not None and row.branch_own_move is not None
                    and row.branch_opponent_turn is not None):
                stats["turn_products"].append(
                    row.branch_own_sense * row.branch_own_move * row.branch_opponent_turn)
            if row.pre_sense_size is not None:
                stats["knowledge_exponents"].append(
                    knowledge_expansion_exponent(row.pre_sense_size, row.turn))

    # canonical row order makes the CSV independent of game arrival order
    series.sort()
    series_lines = [
        ",".join((p, g, str(t)) + tuple(rest)) for p, g, t, *rest in series
    ]

    summary: list[str] = []
    for pairing in sorted(per_pairing):
        s = per_pairing[pairing]
        def mean(xs):
            return sum(xs) / len(xs) if xs else None
        summary.append(",".join([
            pairing, str(s["wins"]), str(s["losses"]), str(s["draws"]),
            _fmt(mean(s["log_sizes"])),
            _fmt(mean(s["turn_products"])),
            _fmt(mean([float(c) for c in s["action_counts"]])),
            _fmt(mean(s["knowledge_exponents"])),
            str(s["games"]), str(s["turn_samples"]),
        ]))
    return AggregateReport(series_lines, summary, per_pairing)
