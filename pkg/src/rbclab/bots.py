"""The canonical strategies and the deterministic evaluator they share.

Strategies only ever see their own observation stream: game start, capture
notices about their own pieces, their sense results, and their move results.
Ground truth is an explicit grant that only RandomBotX and PerfectInfoBot
receive.
"""

from __future__ import annotations

import abc
import random
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernel as K
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
    _SENSE_OFFSETS,
    square_name,
)
from .infoset import DEFAULT_SIZE_CAP, InfoSet, init_infoset

__all__ = [
    "Evaluator",
    "BuiltinEvaluator",
    "BotStrategy",
    "GroundTruthChannel",
    "RandomBotX",
    "NaiveBot",
    "MHTBot",
    "PredictorBot",
    "PerfectInfoBot",
    "build_bot",
    "BOT_NAMES",
]


class Evaluator(abc.ABC):
    """Deterministic move-scoring oracle, total over any blind-chess board."""

    @abc.abstractmethod
    def best_move(self, board: Board) -> tuple[MoveRequest, int]:
        ...

    @abc.abstractmethod
    def top_k(self, board: Board, k: int) -> list[tuple[MoveRequest, int]]:
        ...


class BuiltinEvaluator(Evaluator):
    """Fixed-depth alpha-beta over the classical move set with king-capture
    termination.  Results are memoized by board payload; the cache is pure."""

    def __init__(self, depth: int = 3):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.depth = depth
        self._best_cache: dict[bytes, tuple[MoveRequest, int]] = {}
        self._topk_cache: dict[tuple[bytes, int], list[tuple[MoveRequest, int]]] = {}

    def best_move(self, board: Board) -> tuple[MoveRequest, int]:
        key = board.payload
        hit = self._best_cache.get(key)
        if hit is None:
            mv, score = K.search_best(board.array(), self.depth, K.TABLES)
            hit = (MoveRequest.from_packed(int(mv)), int(score))
            self._best_cache[key] = hit
        return hit

    def top_k(self, board: Board, k: int) -> list[tuple[MoveRequest, int]]:
        key = (board.payload, k)
        hit = self._topk_cache.get(key)
        if hit is None:
            moves = np.empty(K.MAXMOVES, dtype=np.int32)
            scores = np.empty(K.MAXMOVES, dtype=np.int64)
            n = K.score_roots(board.array(), self.depth, moves, scores, K.TABLES)
            ranked = sorted(range(n), key=lambda i: (-int(scores[i]), i))
            hit = [
                (MoveRequest.from_packed(int(moves[i])), int(scores[i]))
                for i in ranked[:k]
            ]
            self._topk_cache[key] = hit
        return hit


@dataclass(frozen=True)
class GroundTruthChannel:
    """Capability handle giving a strategy the arbiter's true board."""

    _fetch: Callable[[], Board]

    def current_board(self) -> Board:
        return self._fetch()


class BotStrategy(abc.ABC):
    """Decision interface the arbiter drives, one instance per game."""

    name: str = "Bot"
    needs_ground_truth: bool = False
    # how the metrics harness should model this player's knowledge
    metrics_mode: str = "tracker"

    def begin_game(self, color: Color, initial: Board) -> None:
        self.color = color

    def grant_ground_truth(self, channel: GroundTruthChannel) -> None:
        raise RuntimeError(f"{self.name} was not built for ground truth access")

    def observe_opponent_turn(self, capture_square: Optional[int]) -> None:
        """Called after every opponent half-turn; the argument is the square
        of this player's captured piece, or None."""

    @abc.abstractmethod
    def choose_sense(self) -> int:
        ...

    def observe_sense(self, result: SenseResult) -> None:
        pass

    @abc.abstractmethod
    def choose_move(self, request_space: frozenset[MoveRequest]) -> MoveRequest:
        ...

    def observe_move(self, result: MoveResult) -> None:
        pass

    @property
    def tracked_infoset(self) -> Optional[InfoSet]:
        return None


def _sorted_requests(space: frozenset[MoveRequest]) -> list[MoveRequest]:
    return sorted(space, key=lambda r: r.packed())


class RandomBotX(BotStrategy):
    """Senses uniformly; passes with fixed probability, else a uniform pick
    from the request space on the true board."""

    needs_ground_truth = True

    def __init__(self, pass_prob: float, rng: random.Random):
        if not 0.0 <= pass_prob <= 1.0:
            raise ValueError("pass_prob must lie in [0, 1]")
        self.pass_prob = pass_prob
        self.rng = rng
        self.name = f"RandomBot{round(pass_prob * 100)}"

    def grant_ground_truth(self, channel: GroundTruthChannel) -> None:
        self._truth = channel

    def choose_sense(self) -> int:
        return SENSE_CENTERS[self.rng.randrange(len(SENSE_CENTERS))]

    def choose_move(self, request_space: frozenset[MoveRequest]) -> MoveRequest:
        if self.rng.random() < self.pass_prob:
            return PASS
        moves = [r for r in _sorted_requests(request_space) if not r.is_pass]
        if not moves:
            return PASS
        return moves[self.rng.randrange(len(moves))]


# opponent pieces identifiable by kind alone (plus square color for bishops)
_UNIQUE_KINDS = (PieceKind.KING, PieceKind.QUEEN, PieceKind.BISHOP)


def _square_color(sq: int) -> int:
    return ((sq >> 3) + (sq & 7)) & 1


class NaiveBot(BotStrategy):
    """Single flawed hypothesis: senses the stalest 3x3 area, overwrites it
    with what it saw, and plays the engine move on the resulting board."""

    name = "NaiveBot"

    def __init__(self, evaluator: Evaluator, rng: random.Random):
        self.evaluator = evaluator
        self.rng = rng

    def begin_game(self, color: Color, initial: Board) -> None:
        super().begin_game(color, initial)
        self._hyp = initial.array().copy()
        self._last_sensed = np.zeros(64, dtype=np.int64)
        self._turn = 0
        self._king_memory = initial.king_square(color.opponent)

    # -- sensing ----------------------------------------------------------

    def choose_sense(self) -> int:
        self._turn += 1
        age = self._turn - self._last_sensed
        own_lo, own_hi = (1, 6) if self.color == Color.WHITE else (7, 12)
        own = (self._hyp[:64] >= own_lo) & (self._hyp[:64] <= own_hi)
        age = np.where(own, 0, age)
        sums = age[_SENSE_OFFSETS].sum(axis=1)
        best = int(sums.max())
        candidates = [SENSE_CENTERS[i] for i in range(36) if sums[i] == best]
        return candidates[self.rng.randrange(len(candidates))]

    def observe_sense(self, result: SenseResult) -> None:
        block = [sq for sq, _ in result.contents]
        opp = self.color.opponent
        prev_king = self._opp_king_square()
        for sq, piece in result.contents:
            self._hyp[sq] = piece.code if piece else 0
            self._last_sensed[sq] = self._turn
        # uniquely identifiable opponent pieces vanish from their old square
        for sq, piece in result.contents:
            if piece is None or piece.color != opp or piece.kind not in _UNIQUE_KINDS:
                continue
            for other in range(64):
                if other in block or self._hyp[other] != piece.code:
                    continue
                if piece.kind == PieceKind.BISHOP and _square_color(other) != _square_color(sq):
                    continue
                self._hyp[other] = 0
        self._ensure_opponent_king(block, prev_king)
        self._sync_rights()

    def _opp_king_square(self) -> Optional[int]:
        code = Piece(self.color.opponent, PieceKind.KING).code
        idx = np.nonzero(self._hyp[:64] == code)[0]
        if idx.size:
            self._king_memory = int(idx[0])
        return self._king_memory

    def _ensure_opponent_king(self, block: list[int], prev: Optional[int]) -> None:
        opp_king = Piece(self.color.opponent, PieceKind.KING).code
        if opp_king in self._hyp[:64]:
            self._opp_king_square()
            return
        if prev is None:
            return
        empties = [
            sq for sq in range(64)
            if sq not in block and self._hyp[sq] == 0
        ]
        if not empties:
            return
        def dist(sq: int) -> int:
            return max(abs((sq >> 3) - (prev >> 3)), abs((sq & 7) - (prev & 7)))
        best = min(dist(sq) for sq in empties)
        near = [sq for sq in empties if dist(sq) == best]
        choice = near[self.rng.randrange(len(near))]
        self._hyp[choice] = opp_king
        self._king_memory = choice

    # -- hypothesis upkeep ---------------------------------------------------

    def observe_opponent_turn(self, capture_square: Optional[int]) -> None:
        if capture_square is not None:
            self._hyp[capture_square] = 0

    def observe_move(self, result: MoveResult) -> None:
        if result.taken is None:
            return
        frm, landed = result.taken.from_sq, result.taken.landed
        p = int(self._hyp[frm])
        self._hyp[frm] = 0
        if result.capture_square is not None and result.capture_square != landed:
            self._hyp[result.capture_square] = 0
        if K.piece_kind(p) == int(PieceKind.KING) and abs((landed & 7) - (frm & 7)) == 2:
            rook = Piece(self.color, PieceKind.ROOK).code
            if landed > frm:
                self._hyp[frm + 3] = 0
                self._hyp[frm + 1] = rook
            else:
                self._hyp[frm - 4] = 0
                self._hyp[frm - 1] = rook
        if K.piece_kind(p) == int(PieceKind.PAWN) and (landed >> 3) in (0, 7):
            promo = result.requested.promotion or PieceKind.QUEEN
            p = Piece(self.color, promo).code
        self._hyp[landed] = p
        self._sync_rights()

    def _sync_rights(self) -> None:
        rights = int(self._hyp[K.CASTLE])
        h = self._hyp
        if h[4] != 6:
            rights &= ~(K.WK_RIGHT | K.WQ_RIGHT)
        if h[7] != 4:
            rights &= ~K.WK_RIGHT
        if h[0] != 4:
            rights &= ~K.WQ_RIGHT
        if h[60] != 12:
            rights &= ~(K.BK_RIGHT | K.BQ_RIGHT)
        if h[63] != 10:
            rights &= ~K.BK_RIGHT
        if h[56] != 10:
            rights &= ~K.BQ_RIGHT
        self._hyp[K.CASTLE] = rights

    # -- moving ---------------------------------------------------------------

    def choose_move(self, request_space: frozenset[MoveRequest]) -> MoveRequest:
        arr = self._hyp.copy()
        arr[K.STM] = int(self.color)
        arr[K.EP] = K.EP_NONE
        move, _ = self.evaluator.best_move(Board.from_array(arr))
        return move


class MHTBot(BotStrategy):
    """Tracks every consistent board; senses to minimize the expected set
    size and plays the modal engine move over the members."""

    name = "MHTBot"

    def __init__(self, evaluator: Evaluator, rng: random.Random,
                 size_cap: int = DEFAULT_SIZE_CAP):
        self.evaluator = evaluator
        self.rng = rng
        self.size_cap = size_cap

    def begin_game(self, color: Color, initial: Board) -> None:
        super().begin_game(color, initial)
        self._infoset = init_infoset(color, self.size_cap)

    def observe_opponent_turn(self, capture_square: Optional[int]) -> None:
        self._infoset = self._infoset.expand_opponent_turn(capture_square)

    def choose_sense(self) -> int:
        return self._infoset.min_expected_sense(self.rng)

    def observe_sense(self, result: SenseResult) -> None:
        self._infoset = self._infoset.filter_sense(result)

    def choose_move(self, request_space: frozenset[MoveRequest]) -> MoveRequest:
        votes: Counter[MoveRequest] = Counter()
        for board in self._infoset.iter_boards():
            move, _ = self.evaluator.best_move(board)
            votes[move] += 1
        for move, _ in self._modal_order(votes):
            if move in request_space:
                return move
        return PASS

    def _modal_order(self, votes: Counter) -> list[tuple[MoveRequest, int]]:
        """Moves grouped by descending count; random tie-break within a
        count class, deterministic under the bot's rng."""
        by_count: dict[int, list[MoveRequest]] = {}
        for move, cnt in votes.items():
            by_count.setdefault(cnt, []).append(move)
        ordered = []
        for cnt in sorted(by_count, reverse=True):
            group = sorted(by_count[cnt], key=lambda r: r.packed())
            self.rng.shuffle(group)
            ordered.extend((m, cnt) for m in group)
        return ordered

    def observe_move(self, result: MoveResult) -> None:
        self._infoset = self._infoset.apply_own_move(result.requested, result)

    @property
    def tracked_infoset(self) -> Optional[InfoSet]:
        return self._infoset


class PredictorBot(MHTBot):
    """MHT tracking and moving, but senses where the opponent's engine-like
    replies would most plausibly land."""

    name = "PredictorBot"
    SAMPLE_LIMIT = 512
    TOP_MOVES = 5

    def begin_game(self, color: Color, initial: Board) -> None:
        super().begin_game(color, initial)
        self._pre_opponent_snapshot: Optional[InfoSet] = None

    def observe_move(self, result: MoveResult) -> None:
        super().observe_move(result)
        # the boards the opponent chose its reply from, as far as we know
        self._pre_opponent_snapshot = self._infoset

    def choose_sense(self) -> int:
        snap = self._pre_opponent_snapshot
        if snap is None or snap.size == 0:
            return super().choose_sense()
        weights = np.zeros(64, dtype=np.float64)
        n = snap.size
        k = min(self.SAMPLE_LIMIT, n)
        idx = self.rng.sample(range(n), k) if k < n else list(range(n))
        for i in idx:
            ranked = self.evaluator.top_k(snap.board_at(i), self.TOP_MOVES)
            if not ranked:
                continue
            scores = [s for _, s in ranked]
            lo = min(scores)
            shifted = [s - lo for s in scores]
            total = sum(shifted)
            for (move, _), w in zip(ranked, shifted):
                share = (w / total) if total > 0 else 1.0 / len(ranked)
                weights[move.to_sq] += share
        sums = weights[_SENSE_OFFSETS].sum(axis=1)
        best = sums.max()
        candidates = [SENSE_CENTERS[i] for i in range(36) if sums[i] == best]
        return candidates[self.rng.randrange(len(candidates))]


class PerfectInfoBot(BotStrategy):
    """Plays the engine move on the true board; sensing is irrelevant, so a
    fixed center keeps runs reproducible."""

    name = "PerfectInfoBot"
    needs_ground_truth = True
    metrics_mode = "ground_truth"

    FIXED_CENTER = SENSE_CENTERS[0]

    def __init__(self, evaluator: Evaluator):
        self.evaluator = evaluator

    def grant_ground_truth(self, channel: GroundTruthChannel) -> None:
        self._truth = channel

    def choose_sense(self) -> int:
        return self.FIXED_CENTER

    def choose_move(self, request_space: frozenset[MoveRequest]) -> MoveRequest:
        move, _ = self.evaluator.best_move(self._truth.current_board())
        return move


BOT_NAMES = ("RandomBot25", "NaiveBot", "MHTBot", "PredictorBot", "PerfectInfoBot")


def build_bot(
    name: str,
    rng: random.Random,
    evaluator: Optional[Evaluator] = None,
    *,
    pass_prob: Optional[float] = None,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> BotStrategy:
    """Construct a strategy by roster name, e.g. RandomBot25 or MHTBot."""
    if name.startswith("RandomBot"):
        if pass_prob is None:
            suffix = name[len("RandomBot"):]
            pass_prob = float(suffix) / 100.0 if suffix else 0.25
        return RandomBotX(pass_prob, rng)
    if evaluator is None:
        raise ValueError(f"{name} needs an evaluator")
    if name == "NaiveBot":
        return NaiveBot(evaluator, rng)
    if name == "MHTBot":
        return MHTBot(evaluator, rng, size_cap)
    if name == "PredictorBot":
        return PredictorBot(evaluator, rng, size_cap)
    if name == "PerfectInfoBot":
        return PerfectInfoBot(evaluator)
    raise ValueError(f"unknown bot name {name!r}")
