"""Game referee: runs one blind-chess game between two strategies, hands
each player exactly its own observations, detects game end, and logs a
replayable record."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional

from .board import (
    Board,
    Color,
    MoveRequest,
    MoveResult,
    PASS,
    Piece,
    PieceKind,
    SenseResult,
    SENSE_CENTERS,
    TakenMove,
    initial_board,
    parse_square,
    request_space,
    resolve_unchecked,
    sense,
    square_name,
)
from .bots import BotStrategy, GroundTruthChannel

__all__ = [
    "CaptureNotice",
    "DrawConfig",
    "Outcome",
    "EndReason",
    "HalfTurn",
    "GameRecord",
    "GameObserver",
    "CorruptRecordError",
    "EvaluatorFailure",
    "play_game",
    "replay",
]


class CorruptRecordError(ValueError):
    """Replaying a record contradicts its logged observations."""


class EvaluatorFailure(RuntimeError):
    """An evaluator could not produce a move; the strategy forfeits."""


@dataclass(frozen=True)
class CaptureNotice:
    """Told to the non-moving player: your piece at `square` is gone."""

    square: int


@dataclass(frozen=True)
class DrawConfig:
    threefold_enabled: bool
    fifty_move_enabled: bool
    max_fullmoves: int = 200

    def __post_init__(self):
        if self.max_fullmoves < 1:
            raise ValueError("max_fullmoves must be >= 1")

    @classmethod
    def disabled(cls, max_fullmoves: int = 200) -> "DrawConfig":
        return cls(False, False, max_fullmoves)

    @classmethod
    def standard(cls, max_fullmoves: int = 200) -> "DrawConfig":
        return cls(True, True, max_fullmoves)

    @classmethod
    def auto(cls, white_name: str, black_name: str, max_fullmoves: int = 200) -> "DrawConfig":
        """Draw rules are active exactly when a perfect-information player
        participates; imperfect-information bots cannot verify a draw."""
        perfect = "PerfectInfoBot" in (white_name, black_name)
        return cls(perfect, perfect, max_fullmoves)


class Outcome(enum.Enum):
    WHITE_WIN = "white_win"
    BLACK_WIN = "black_win"
    DRAW = "draw"
    TURN_LIMIT = "turn_limit"


class EndReason(enum.Enum):
    KING_CAPTURE = "king_capture"
    FORFEIT = "forfeit"
    THREEFOLD = "threefold"
    FIFTY_MOVES = "fifty_moves"
    TURN_LIMIT = "turn_limit"


@dataclass(frozen=True)
class HalfTurn:
    index: int
    player: Color
    notice: Optional[int]
    sense_center: int
    sense_result: SenseResult
    request: MoveRequest
    result: MoveResult


@dataclass(frozen=True)
class GameRecord:
    white: str
    black: str
    seed: int
    draw: DrawConfig
    halfturns: tuple[HalfTurn, ...]
    outcome: Outcome
    reason: EndReason
    final_fen: str

    # -- persistence: one half-turn per line so tournaments can stream ----

    def to_jsonl(self) -> str:
        lines = [json.dumps({
            "type": "header", "white": self.white, "black": self.black,
            "seed": self.seed, "threefold": self.draw.threefold_enabled,
            "fifty": self.draw.fifty_move_enabled,
            "max_fullmoves": self.draw.max_fullmoves,
        }, sort_keys=True)]
        for ht in self.halfturns:
            taken = None
            if ht.result.taken is not None:
                taken = [square_name(ht.result.taken.from_sq),
                         square_name(ht.result.taken.landed)]
            cap = ht.result.capture_square
            lines.append(json.dumps({
                "type": "halfturn", "i": ht.index,
                "player": "w" if ht.player == Color.WHITE else "b",
                "notice": None if ht.notice is None else square_name(ht.notice),
                "center": square_name(ht.sense_center),
                "sense": [[square_name(sq), p.letter if p else None]
                          for sq, p in ht.sense_result.contents],
                "request": ht.request.uci(),
                "taken": taken,
                "capture": None if cap is None else square_name(cap),
            }, sort_keys=True))
        lines.append(json.dumps({
            "type": "result", "outcome": self.outcome.value,
            "reason": self.reason.value, "final": self.final_fen,
        }, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "GameRecord":
        header = None
        halfturns = []
        result = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj["type"] == "header":
                header = obj
            elif obj["type"] == "halfturn":
                contents = tuple(
                    (parse_square(sq), Piece.from_letter(p) if p else None)
                    for sq, p in obj["sense"]
                )
                center = parse_square(obj["center"])
                req = MoveRequest.parse(obj["request"])
                taken = None
                if obj["taken"] is not None:
                    taken = TakenMove(parse_square(obj["taken"][0]),
                                      parse_square(obj["taken"][1]))
                cap = None if obj["capture"] is None else parse_square(obj["capture"])
                halfturns.append(HalfTurn(
                    obj["i"],
                    Color.WHITE if obj["player"] == "w" else Color.BLACK,
                    None if obj["notice"] is None else parse_square(obj["notice"]),
                    center,
                    SenseResult(center, contents),
                    req,
                    MoveResult(req, taken, cap),
                ))
            elif obj["type"] == "result":
                result = obj
        if header is None or result is None:
            raise CorruptRecordError("record missing header or result line")
        return cls(
            header["white"], header["black"], header["seed"],
            DrawConfig(header["threefold"], header["fifty"], header["max_fullmoves"]),
            tuple(halfturns),
            Outcome(result["outcome"]), EndReason(result["reason"]), result["final"],
        )


class GameObserver:
    """Hook points the referee fires; the metrics harness builds on these.
    Observers are trusted harness code and may see ground truth."""

    def begin(self, white: str, black: str, truth: Board) -> None:
        pass

    def pre_opponent_expand(self, color: Color, fullmove: int,
                            notice: Optional[int], truth: Board) -> None:
        pass

    def pre_sense(self, color: Color, fullmove: int) -> None:
        pass

    def post_sense(self, color: Color, fullmove: int, result: SenseResult) -> None:
        pass

    def post_move(self, color: Color, fullmove: int, request: MoveRequest,
                  result: MoveResult, truth_after: Board) -> None:
        pass

    def end(self, record: GameRecord) -> None:
        pass


class _GameState:
    def __init__(self):
        self.truth = initial_board()


def play_game(
    white: BotStrategy,
    black: BotStrategy,
    draw_cfg: DrawConfig,
    rng_seed: int = 0,
    observer: Optional[GameObserver] = None,
) -> GameRecord:
    """Run one game, White moving first; each half-turn is notice delivery,
    sense, then move.  An out-of-space request or invalid sense center
    forfeits the game for the offending side."""
    state = _GameState()
    bots = {Color.WHITE: white, Color.BLACK: black}
    for color, bot in bots.items():
        bot.begin_game(color, state.truth)
        if bot.needs_ground_truth:
            bot.grant_ground_truth(GroundTruthChannel(lambda s=state: s.truth))
    if observer:
        observer.begin(white.name, black.name, state.truth)

    pending_notice: dict[Color, Optional[int]] = {}
    halfturns: list[HalfTurn] = []
    repetition: dict[bytes, int] = {state.truth.payload: 1}
    halfmove_clock = 0
    fullmove = 1
    index = 0
    outcome: Optional[Outcome] = None
    reason: Optional[EndReason] = None

    def forfeit(offender: Color) -> tuple[Outcome, EndReason]:
        win = Outcome.BLACK_WIN if offender == Color.WHITE else Outcome.WHITE_WIN
        return win, EndReason.FORFEIT

    while outcome is None:
        mover = state.truth.side_to_move
        bot = bots[mover]

        notice: Optional[int] = None
        if mover in pending_notice:
            notice = pending_notice.pop(mover)
            if observer:
                observer.pre_opponent_expand(mover, fullmove, notice, state.truth)
            bot.observe_opponent_turn(notice)

        if observer:
            observer.pre_sense(mover, fullmove)
        try:
            center = bot.choose_sense()
        except EvaluatorFailure:
            outcome, reason = forfeit(mover)
            break
        if center not in SENSE_CENTERS:
            outcome, reason = forfeit(mover)
            break
        sr = sense(state.truth, center)
        bot.observe_sense(sr)
        if observer:
            observer.post_sense(mover, fullmove, sr)

        space = request_space(state.truth, mover)
        try:
            req = bot.choose_move(space)
        except EvaluatorFailure:
            outcome, reason = forfeit(mover)
            break
        if req not in space:
            outcome, reason = forfeit(mover)
            break

        moved_pawn = (
            req.from_sq is not None
            and state.truth.piece_at(req.from_sq) is not None
            and state.truth.piece_at(req.from_sq).kind == PieceKind.PAWN
        )
        succ, result = resolve_unchecked(state.truth, req)
        state.truth = succ
        bot.observe_move(result)
        if observer:
            observer.post_move(mover, fullmove, req, result, succ)
        pending_notice[mover.opponent] = result.capture_square
        halfturns.append(HalfTurn(index, mover, notice, center, sr, req, result))
        index += 1

        winner = _winner(succ)
        if winner is not None:
            outcome = Outcome.WHITE_WIN if winner == Color.WHITE else Outcome.BLACK_WIN
            reason = EndReason.KING_CAPTURE
            break

        if result.capture_square is not None or (moved_pawn and result.taken is not None):
            halfmove_clock = 0
        else:
            halfmove_clock += 1
        if draw_cfg.fifty_move_enabled and halfmove_clock >= 100:
            outcome, reason = Outcome.DRAW, EndReason.FIFTY_MOVES
            break
        count = repetition.get(succ.payload, 0) + 1
        repetition[succ.payload] = count
        if draw_cfg.threefold_enabled and count >= 3:
            outcome, reason = Outcome.DRAW, EndReason.THREEFOLD
            break

        if mover == Color.BLACK:
            fullmove += 1
            if fullmove > draw_cfg.max_fullmoves:
                outcome, reason = Outcome.TURN_LIMIT, EndReason.TURN_LIMIT
                break

    record = GameRecord(
        white.name, black.name, rng_seed, draw_cfg, tuple(halfturns),
        outcome, reason, state.truth.to_fen(),
    )
    if observer:
        observer.end(record)
    return record


def _winner(board: Board) -> Optional[Color]:
    wk = board.king_square(Color.WHITE)
    bk = board.king_square(Color.BLACK)
    if wk is None:
        return Color.BLACK
    if bk is None:
        return Color.WHITE
    return None


def replay(record: GameRecord) -> Board:
    """Reconstruct the terminal board, verifying every logged observation."""
    truth = initial_board()
    for ht in record.halfturns:
        if truth.side_to_move != ht.player:
            raise CorruptRecordError(f"halfturn {ht.index}: wrong side to move")
        sr = sense(truth, ht.sense_center)
        if sr != ht.sense_result:
            raise CorruptRecordError(f"halfturn {ht.index}: sense mismatch")
        succ, result = resolve_unchecked(truth, ht.request)
        if result != ht.result:
            raise CorruptRecordError(f"halfturn {ht.index}: move result mismatch")
        truth = succ
    if truth.to_fen() != record.final_fen:
        raise CorruptRecordError("terminal board mismatch")
    return truth
