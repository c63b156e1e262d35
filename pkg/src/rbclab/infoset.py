"""Multi-hypothesis tracking: every board consistent with one player's
observations, with the partition machinery behind sense selection and the
complexity metrics.

An InfoSet is functional: every update returns a new set.  Boards are kept
as a canonically sorted (by serialized payload) matrix of kernel rows, so
results are reproducible regardless of evaluation order.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _kernel as K
from .board import (
    Board,
    Color,
    MoveRequest,
    MoveResult,
    SenseResult,
    SENSE_CENTERS,
    _SENSE_OFFSETS,
    InvalidSenseError,
    initial_board,
    square_name,
)

__all__ = [
    "InfoSet",
    "SensePartition",
    "OverflowSignal",
    "InconsistencyError",
    "ActionKind",
    "init_infoset",
    "DEFAULT_SIZE_CAP",
]

DEFAULT_SIZE_CAP = 4_000_000

_ROW_LEN = K.BOARD_LEN
_EXPAND_CHUNK = 8192

# 9 square codes (each < 16) pack into one uint64 for fast partitioning
_PACK_POW = (np.uint64(1) << (4 * np.arange(9, dtype=np.uint64))).astype(np.uint64)


class InconsistencyError(RuntimeError):
    """An update produced an empty set: tracker bug or rules mismatch."""


class ActionKind(enum.Enum):
    OWN_SENSE = "own_sense"
    OWN_MOVE = "own_move"
    OPPONENT_TURN = "opponent_turn"


@dataclass(frozen=True)
class OverflowSignal:
    """Marks the update step at which the hypothesis cap was exceeded."""

    turn_index: int


@dataclass(frozen=True)
class SensePartition:
    """Hypotheses grouped by what a sense at `center` would reveal."""

    center: int
    classes: dict[bytes, int]

    @property
    def expected_size_numerator(self) -> int:
        """Sum of squared class sizes; divide by N for the expected
        post-sense size under a uniform prior."""
        return sum(c * c for c in self.classes.values())


def _unique_rows(rows: np.ndarray) -> np.ndarray:
    """Deduplicate rows, canonically sorted by payload bytes."""
    m = rows.shape[0]
    if m <= 1:
        return rows.copy()
    blob = rows.tobytes()
    seen: dict[bytes, int] = {}
    for i in range(m):
        key = blob[i * _ROW_LEN:(i + 1) * _ROW_LEN]
        if key not in seen:
            seen[key] = i
    keys = sorted(seen)
    idx = np.fromiter((seen[k] for k in keys), dtype=np.int64, count=len(keys))
    return rows[idx]


def _rows_from_keys(keys: list[bytes]) -> np.ndarray:
    if not keys:
        return np.empty((0, _ROW_LEN), dtype=np.uint8)
    return np.frombuffer(b"".join(keys), dtype=np.uint8).reshape(-1, _ROW_LEN).copy()


def _center_row(center: int) -> int:
    try:
        return SENSE_CENTERS.index(center)
    except ValueError:
        raise InvalidSenseError(f"sense center {square_name(center)} is not interior") from None


@dataclass(frozen=True)
class InfoSet:
    """Deduplicated set of boards consistent with the owner's observations.

    `boards` rows are sorted by payload; the owner's pieces and the side to
    move are identical across members.  Once `overflow` is set, later sizes
    and branching counts are unreliable and get reported as unavailable.
    """

    boards: np.ndarray
    owner: Color
    size_cap: int = DEFAULT_SIZE_CAP
    clock: int = 0
    overflow: Optional[OverflowSignal] = None
    _keys: Optional[frozenset[bytes]] = field(default=None, repr=False, compare=False)

    # -- basics -----------------------------------------------------------

    @property
    def size(self) -> int:
        return self.boards.shape[0]

    @property
    def overflowed(self) -> bool:
        return self.overflow is not None

    def keys(self) -> frozenset[bytes]:
        cached = object.__getattribute__(self, "_keys")
        if cached is None:
            blob = self.boards.tobytes()
            cached = frozenset(
                blob[i * _ROW_LEN:(i + 1) * _ROW_LEN] for i in range(self.size)
            )
            object.__setattr__(self, "_keys", cached)
        return cached

    def contains(self, board: Board) -> bool:
        return board.payload in self.keys()

    def board_at(self, i: int) -> Board:
        return Board.from_array(self.boards[i])

    def iter_boards(self):
        for i in range(self.size):
            yield Board.from_array(self.boards[i])

    def dump_lines(self) -> list[str]:
        """One FEN per member, in canonical order (debug aid)."""
        return [b.to_fen() for b in self.iter_boards()]

    # -- updates ------------------------------------------------------------

    def expand_opponent_turn(self, notice: Optional[int]) -> "InfoSet":
        """All successors of all members under every opponent request (Pass
        included), kept when consistent with the capture observation."""
        if self.size and Color(self.boards[0, K.STM]) == self.owner:
            raise InconsistencyError("expand_opponent_turn: owner to move")
        notice_sq = -1 if notice is None else int(notice)
        cap = self.size_cap
        seen: dict[bytes, None] = {}
        overflowed = False
        for lo in range(0, self.size, _EXPAND_CHUNK):
            chunk = self.boards[lo:lo + _EXPAND_CHUNK]
            out = K.expand_filtered(np.ascontiguousarray(chunk), notice_sq, K.TABLES)
            blob = out.tobytes()
            m = out.shape[0]
            for i in range(m):
                key = blob[i * _ROW_LEN:(i + 1) * _ROW_LEN]
                if key not in seen:
                    seen[key] = None
            if len(seen) > cap:
                overflowed = True
                break
        if not seen:
            raise InconsistencyError(
                f"no board survives opponent expansion with notice "
                f"{None if notice is None else square_name(notice_sq)}"
            )
        keys = sorted(seen)
        if overflowed:
            keys = keys[:cap]
        clock = self.clock + 1
        overflow = self.overflow
        if overflowed and overflow is None:
            overflow = OverflowSignal(clock)
        return InfoSet(_rows_from_keys(keys), self.owner, self.size_cap, clock, overflow)

    def filter_sense(self, result: SenseResult) -> "InfoSet":
        """Keep exactly the members whose block matches the sense result."""
        row = _center_row(result.center)
        offs = _SENSE_OFFSETS[row]
        observed = np.array(
            [0 if p is None else p.code for _, p in result.contents], dtype=np.uint8
        )
        mask = (self.boards[:, offs] == observed).all(axis=1)
        kept = self.boards[mask]
        if kept.shape[0] == 0:
            raise InconsistencyError(
                f"no board matches sense at {square_name(result.center)}"
            )
        return replace(self, boards=kept, _keys=None)

    def apply_own_move(self, req: MoveRequest, observed: MoveResult) -> "InfoSet":
        """Map members through the request, keeping those that reproduce the
        observed move result."""
        if self.size and Color(self.boards[0, K.STM]) != self.owner:
            raise InconsistencyError("apply_own_move: opponent to move")
        obs_landed = observed.taken.landed if observed.taken is not None else -1
        obs_capsq = observed.capture_square if observed.capture_square is not None else -1
        out, landed, caps = K.resolve_many(self.boards, req.packed())
        mask = (landed == obs_landed) & (caps == obs_capsq)
        kept = out[mask]
        if kept.shape[0] == 0:
            raise InconsistencyError(f"no board reproduces result of {req.uci()}")
        return InfoSet(
            _unique_rows(kept), self.owner, self.size_cap, self.clock + 1, self.overflow
        )

    # -- partitions and sense scoring --------------------------------------

    def _packed_outcomes(self, center_row: int) -> np.ndarray:
        sub = self.boards[:, _SENSE_OFFSETS[center_row]].astype(np.uint64)
        return sub @ _PACK_POW

    def partitions(self, center: int) -> SensePartition:
        """Group members by the 9-square contents a sense would reveal."""
        row = _center_row(center)
        sub = self.boards[:, _SENSE_OFFSETS[row]]
        keys = self._packed_outcomes(row)
        _, first_idx, counts = np.unique(keys, return_index=True, return_counts=True)
        classes = {
            sub[i].tobytes(): int(c) for i, c in zip(first_idx, counts)
        }
        return SensePartition(center, classes)

    def min_expected_sense(self, rng) -> int:
        """Center minimizing the expected post-sense size under a uniform
        prior; ties broken uniformly at random."""
        if self.size == 0:
            raise InconsistencyError("empty information set")
        best_score = None
        best_centers: list[int] = []
        for row, center in enumerate(SENSE_CENTERS):
            keys = self._packed_outcomes(row)
            _, counts = np.unique(keys, return_counts=True)
            score = int((counts.astype(np.int64) ** 2).sum())
            if best_score is None or score < best_score:
                best_score = score
                best_centers = [center]
            elif score == best_score:
                best_centers.append(center)
        return best_centers[rng.randrange(len(best_centers))]

    # -- successor counting --------------------------------------------------

    def request_space_packed(self) -> list[int]:
        """The owner's packed request space (identical across members)."""
        if self.size == 0:
            return [K.PASS]
        arr = self.boards[0].copy()
        arr[K.STM] = int(self.owner)
        buf = np.empty(K.MAXMOVES, dtype=np.int32)
        n = K.gen_requests(arr, buf, K.TABLES)
        return [K.PASS] + [int(buf[i]) for i in range(n)]

    def successor_infoset_count(self, kind: ActionKind) -> Optional[int]:
        """Number of distinct successor knowledge-states reachable by one
        action, identified by set content.  None once overflowed."""
        if self.overflowed:
            return None
        if kind is ActionKind.OWN_SENSE:
            signatures = set()
            for row in range(len(SENSE_CENTERS)):
                keys = self._packed_outcomes(row)
                order = np.argsort(keys, kind="stable")
                sorted_keys = keys[order]
                boundaries = np.nonzero(np.diff(sorted_keys))[0] + 1
                start = 0
                for end in list(boundaries) + [self.size]:
                    members = np.sort(order[start:end])
                    signatures.add(members.tobytes())
                    start = end
            return len(signatures)
        if kind is ActionKind.OWN_MOVE:
            signatures = set()
            for mv in self.request_space_packed():
                out, landed, caps = K.resolve_many(self.boards, mv)
                # both components lie in [-1, 63]: shift into a collision-free key
                obs = (landed.astype(np.int64) + 1) * 65 + (caps + 1)
                for o in np.unique(obs):
                    sub = out[obs == o]
                    signatures.add(_content_digest(sub))
            return len(signatures)
        if kind is ActionKind.OPPONENT_TURN:
            signatures = set()
            out, caps = K.expand_with_capsq(self.boards, K.TABLES)
            for c in np.unique(caps):
                sub = out[caps == c]
                signatures.add(_content_digest(sub))
            return len(signatures)
        raise ValueError(kind)

    def distinct_successor_boards(self, kind: ActionKind) -> Optional[int]:
        """Successor counting for a player who re-learns the true board after
        every action (ground-truth access): each successor info set is a
        singleton, so the count is the number of distinct successor boards."""
        if self.overflowed:
            return None
        if kind is ActionKind.OWN_SENSE:
            return 1 if self.size == 1 else self.successor_infoset_count(kind)
        if kind is ActionKind.OWN_MOVE:
            seen = set()
            for mv in self.request_space_packed():
                out, _, _ = K.resolve_many(self.boards, mv)
                blob = out.tobytes()
                for i in range(out.shape[0]):
                    seen.add(blob[i * _ROW_LEN:(i + 1) * _ROW_LEN])
            return len(seen)
        if kind is ActionKind.OPPONENT_TURN:
            out, _ = K.expand_with_capsq(self.boards, K.TABLES)
            blob = out.tobytes()
            return len({
                blob[i * _ROW_LEN:(i + 1) * _ROW_LEN] for i in range(out.shape[0])
            })
        raise ValueError(kind)


def _content_digest(rows: np.ndarray) -> bytes:
    """Order-independent identity of a set of boards."""
    m = rows.shape[0]
    blob = rows.tobytes()
    uniq = sorted({blob[i * _ROW_LEN:(i + 1) * _ROW_LEN] for i in range(m)})
    h = hashlib.blake2b(digest_size=16)
    for k in uniq:
        h.update(k)
    return h.digest()


def init_infoset(owner: Color, size_cap: int = DEFAULT_SIZE_CAP) -> InfoSet:
    """Singleton set holding the standard initial position."""
    arr = initial_board().array().reshape(1, -1).copy()
    return InfoSet(arr, owner, size_cap)
