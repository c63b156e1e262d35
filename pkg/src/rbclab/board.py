"""Board representation and the blind-chess move semantics.

The board is a value type: piece placement, side to move, castling rights
and the en-passant square.  Move counters are deliberately not part of the
board; repetition and fifty-move bookkeeping belong to the referee.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from . import _kernel as K

__all__ = [
    "Color",
    "PieceKind",
    "Piece",
    "Square",
    "Board",
    "BoardKey",
    "MoveRequest",
    "TakenMove",
    "MoveResult",
    "SenseResult",
    "PASS",
    "InvalidBoardError",
    "RejectedRequestError",
    "InvalidSenseError",
    "square",
    "square_name",
    "parse_square",
    "file_of",
    "rank_of",
    "SENSE_CENTERS",
    "sense_block",
    "initial_board",
    "request_space",
    "resolve",
    "sense",
    "game_over",
    "standard_legal_moves",
    "perft",
]


class InvalidBoardError(ValueError):
    """Board violates a structural precondition (e.g. missing king)."""


class RejectedRequestError(ValueError):
    """Move request outside the requesting player's request space."""


class InvalidSenseError(ValueError):
    """Sense center whose 3x3 block does not fit on the board."""


class Color(enum.IntEnum):
    WHITE = 0
    BLACK = 1

    @property
    def opponent(self) -> "Color":
        return Color(1 - self)


class PieceKind(enum.IntEnum):
    PAWN = 1
    KNIGHT = 2
    BISHOP = 3
    ROOK = 4
    QUEEN = 5
    KING = 6


_KIND_LETTER = {
    PieceKind.PAWN: "p",
    PieceKind.KNIGHT: "n",
    PieceKind.BISHOP: "b",
    PieceKind.ROOK: "r",
    PieceKind.QUEEN: "q",
    PieceKind.KING: "k",
}
_LETTER_KIND = {v: k for k, v in _KIND_LETTER.items()}


@dataclass(frozen=True)
class Piece:
    color: Color
    kind: PieceKind

    @property
    def code(self) -> int:
        return int(self.kind) + (6 if self.color == Color.BLACK else 0)

    @classmethod
    def from_code(cls, code: int) -> "Piece":
        if not 1 <= code <= 12:
            raise ValueError(f"bad piece code {code}")
        return cls(Color.BLACK if code > 6 else Color.WHITE, PieceKind(code - 6 if code > 6 else code))

    @property
    def letter(self) -> str:
        c = _KIND_LETTER[self.kind]
        return c.upper() if self.color == Color.WHITE else c

    @classmethod
    def from_letter(cls, letter: str) -> "Piece":
        kind = _LETTER_KIND.get(letter.lower())
        if kind is None:
            raise ValueError(f"bad piece letter {letter!r}")
        return cls(Color.WHITE if letter.isupper() else Color.BLACK, kind)

    def __repr__(self) -> str:
        return f"Piece({self.letter!r})"


Square = int  # 0..63, a1=0 .. h8=63


def square(file: int, rank: int) -> Square:
    if not (0 <= file < 8 and 0 <= rank < 8):
        raise ValueError(f"file/rank out of range: {file},{rank}")
    return rank * 8 + file


def file_of(sq: Square) -> int:
    return sq & 7


def rank_of(sq: Square) -> int:
    return sq >> 3


def square_name(sq: Square) -> str:
    if not 0 <= sq < 64:
        raise ValueError(f"square index out of range: {sq}")
    return "abcdefgh"[sq & 7] + str((sq >> 3) + 1)


def parse_square(name: str) -> Square:
    if len(name) != 2 or name[0] not in "abcdefgh" or name[1] not in "12345678":
        raise ValueError(f"bad square name {name!r}")
    return (int(name[1]) - 1) * 8 + (ord(name[0]) - ord("a"))


# the 36 sense centers whose 3x3 block fits on the board, in index order
SENSE_CENTERS: tuple[Square, ...] = tuple(
    r * 8 + f for r in range(1, 7) for f in range(1, 7)
)

_SENSE_OFFSETS = np.array(
    [[(r + dr) * 8 + (f + df) for dr in (-1, 0, 1) for df in (-1, 0, 1)]
     for r in range(1, 7) for f in range(1, 7)],
    dtype=np.int64,
)
_CENTER_TO_ROW = {c: i for i, c in enumerate(SENSE_CENTERS)}


def sense_block(center: Square) -> tuple[Square, ...]:
    """The 9 squares of a sense block, row-major from the low corner."""
    row = _CENTER_TO_ROW.get(center)
    if row is None:
        raise InvalidSenseError(f"sense center {square_name(center)} is not interior")
    return tuple(int(s) for s in _SENSE_OFFSETS[row])


@dataclass(frozen=True)
class MoveRequest:
    """Either an explicit pass or a from/to(/promotion) move command."""

    from_sq: Optional[Square] = None
    to_sq: Optional[Square] = None
    promotion: Optional[PieceKind] = None

    @property
    def is_pass(self) -> bool:
        return self.from_sq is None

    @classmethod
    def move(cls, from_sq: Square, to_sq: Square, promotion: Optional[PieceKind] = None) -> "MoveRequest":
        return cls(from_sq, to_sq, promotion)

    @classmethod
    def parse(cls, text: str) -> "MoveRequest":
        t = text.strip().lower()
        if t in ("pass", "0000", "(none)"):
            return PASS
        if len(t) not in (4, 5):
            raise ValueError(f"bad move text {text!r}")
        frm = parse_square(t[0:2])
        to = parse_square(t[2:4])
        promo = _LETTER_KIND[t[4]] if len(t) == 5 else None
        return cls(frm, to, promo)

    def uci(self) -> str:
        if self.is_pass:
            return "pass"
        s = square_name(self.from_sq) + square_name(self.to_sq)
        if self.promotion is not None:
            s += _KIND_LETTER[self.promotion]
        return s

    def packed(self) -> int:
        if self.is_pass:
            return K.PASS
        promo = int(self.promotion) if self.promotion is not None else 0
        return self.from_sq | (self.to_sq << 6) | (promo << 12)

    @classmethod
    def from_packed(cls, mv: int) -> "MoveRequest":
        if mv < 0:
            return PASS
        promo = (mv >> 12) & 7
        return cls(mv & 63, (mv >> 6) & 63, PieceKind(promo) if promo else None)

    def __repr__(self) -> str:
        return f"MoveRequest({self.uci()!r})"


PASS = MoveRequest()


@dataclass(frozen=True)
class TakenMove:
    from_sq: Square
    landed: Square


@dataclass(frozen=True)
class MoveResult:
    """What the arbiter tells the mover: what actually happened."""

    requested: MoveRequest
    taken: Optional[TakenMove]
    capture_square: Optional[Square]


@dataclass(frozen=True)
class SenseResult:
    """Ground truth over a 3x3 block, row-major from the low corner."""

    center: Square
    contents: tuple[tuple[Square, Optional[Piece]], ...]

    def piece_at(self, sq: Square) -> Optional[Piece]:
        for s, p in self.contents:
            if s == sq:
                return p
        raise KeyError(square_name(sq))


@dataclass(frozen=True)
class BoardKey:
    """Canonical identity of a board: cheap 64-bit hash plus the full
    serialization, compared on hash collisions."""

    hash64: int
    payload: bytes

    @classmethod
    def of(cls, payload: bytes) -> "BoardKey":
        h = 0xCBF29CE484222325
        for byte in payload:
            h ^= byte
            h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
        return cls(h, payload)

    def __hash__(self) -> int:
        return self.hash64

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoardKey):
            return NotImplemented
        return self.hash64 == other.hash64 and self.payload == other.payload

    def __lt__(self, other: "BoardKey") -> bool:
        return self.payload < other.payload


INITIAL_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

_CASTLE_FLAGS = (("K", K.WK_RIGHT), ("Q", K.WQ_RIGHT), ("k", K.BK_RIGHT), ("q", K.BQ_RIGHT))


class Board:
    """Immutable board value backed by the kernel's 67-byte vector."""

    __slots__ = ("_raw",)

    def __init__(self, raw: bytes):
        if len(raw) != K.BOARD_LEN:
            raise ValueError(f"board payload must be {K.BOARD_LEN} bytes")
        object.__setattr__(self, "_raw", raw)

    def __setattr__(self, name, value):
        raise AttributeError("Board is immutable")

    # -- construction ----------------------------------------------------

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Board":
        return cls(arr.astype(np.uint8, copy=False).tobytes())

    @classmethod
    def from_fen(cls, fen: str) -> "Board":
        parts = fen.split()
        if len(parts) < 1:
            raise ValueError("empty FEN")
        arr = np.zeros(K.BOARD_LEN, dtype=np.uint8)
        ranks = parts[0].split("/")
        if len(ranks) != 8:
            raise ValueError(f"bad FEN placement {parts[0]!r}")
        for r, row in enumerate(ranks):
            rank = 7 - r
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                else:
                    if f > 7:
                        raise ValueError(f"rank overflow in FEN {row!r}")
                    arr[rank * 8 + f] = Piece.from_letter(ch).code
                    f += 1
            if f != 8:
                raise ValueError(f"rank underflow in FEN {row!r}")
        stm = parts[1] if len(parts) > 1 else "w"
        arr[K.STM] = 0 if stm == "w" else 1
        castling = parts[2] if len(parts) > 2 else "-"
        mask = 0
        for ch, bit in _CASTLE_FLAGS:
            if ch in castling:
                mask |= bit
        arr[K.CASTLE] = mask
        ep = parts[3] if len(parts) > 3 else "-"
        arr[K.EP] = K.EP_NONE if ep == "-" else parse_square(ep)
        return cls.from_array(arr)

    # -- accessors --------------------------------------------------------

    def array(self) -> np.ndarray:
        """Read-only kernel view of the board."""
        arr = np.frombuffer(self._raw, dtype=np.uint8)
        return arr

    @property
    def payload(self) -> bytes:
        return self._raw

    @property
    def side_to_move(self) -> Color:
        return Color(self._raw[K.STM])

    @property
    def castling_mask(self) -> int:
        return self._raw[K.CASTLE]

    @property
    def ep_square(self) -> Optional[Square]:
        v = self._raw[K.EP]
        return None if v == K.EP_NONE else v

    def piece_at(self, sq: Square) -> Optional[Piece]:
        code = self._raw[sq]
        return Piece.from_code(code) if code else None

    def pieces(self) -> Iterator[tuple[Square, Piece]]:
        for sq in range(64):
            code = self._raw[sq]
            if code:
                yield sq, Piece.from_code(code)

    def king_square(self, color: Color) -> Optional[Square]:
        code = Piece(color, PieceKind.KING).code
        idx = self._raw.find(bytes([code]), 0, 64)
        return None if idx < 0 else idx

    def key(self) -> BoardKey:
        return BoardKey.of(self._raw)

    def validate(self) -> list[str]:
        """Structural invariant violations; empty when the board is sound.
        Parsing is deliberately relaxed, so callers decide when to be strict."""
        problems = []
        for color in Color:
            kings = self._raw[:64].count(bytes([Piece(color, PieceKind.KING).code]))
            if kings > 1:
                problems.append(f"{color.name} has {kings} kings")
        if self.king_square(Color.WHITE) is None and self.king_square(Color.BLACK) is None:
            problems.append("no kings on board")
        for sq in list(range(0, 8)) + list(range(56, 64)):
            p = self.piece_at(sq)
            if p is not None and p.kind == PieceKind.PAWN:
                problems.append(f"pawn on back rank at {square_name(sq)}")
        mask = self._raw[K.CASTLE]
        for bit, king_sq, rook_sq, color in (
            (K.WK_RIGHT, 4, 7, Color.WHITE), (K.WQ_RIGHT, 4, 0, Color.WHITE),
            (K.BK_RIGHT, 60, 63, Color.BLACK), (K.BQ_RIGHT, 60, 56, Color.BLACK),
        ):
            if mask & bit:
                if self.piece_at(king_sq) != Piece(color, PieceKind.KING):
                    problems.append(f"castling right without king at {square_name(king_sq)}")
                elif self.piece_at(rook_sq) != Piece(color, PieceKind.ROOK):
                    problems.append(f"castling right without rook at {square_name(rook_sq)}")
        ep = self.ep_square
        if ep is not None:
            rank = rank_of(ep)
            if rank not in (2, 5):
                problems.append(f"en-passant square {square_name(ep)} off ranks 3/6")
            else:
                mover = Color.BLACK if rank == 5 else Color.WHITE
                beyond = ep - 8 if rank == 5 else ep + 8
                if self.piece_at(beyond) != Piece(mover, PieceKind.PAWN):
                    problems.append(
                        f"en-passant square {square_name(ep)} with no pawn beyond")
        return problems

    def to_fen(self) -> str:
        rows = []
        for rank in range(7, -1, -1):
            row = ""
            empties = 0
            for f in range(8):
                code = self._raw[rank * 8 + f]
                if code == 0:
                    empties += 1
                else:
                    if empties:
                        row += str(empties)
                        empties = 0
                    row += Piece.from_code(code).letter
            if empties:
                row += str(empties)
            rows.append(row)
        stm = "w" if self.side_to_move == Color.WHITE else "b"
        castling = "".join(ch for ch, bit in _CASTLE_FLAGS if self._raw[K.CASTLE] & bit) or "-"
        ep = square_name(self._raw[K.EP]) if self._raw[K.EP] != K.EP_NONE else "-"
        return f"{'/'.join(rows)} {stm} {castling} {ep} 0 1"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Board) and self._raw == other._raw

    def __hash__(self) -> int:
        return hash(self._raw)

    def __repr__(self) -> str:
        return f"Board({self.to_fen()!r})"


@lru_cache(maxsize=1)
def initial_board() -> Board:
    return Board.from_fen(INITIAL_FEN)


def _board_with_stm(board: Board, color: Color) -> np.ndarray:
    arr = board.array()
    if arr[K.STM] == int(color):
        return arr
    flipped = arr.copy()
    flipped[K.STM] = int(color)
    return flipped


def request_space(board: Board, color: Optional[Color] = None) -> frozenset[MoveRequest]:
    """Every command the player may issue: Pass plus all piece-pattern moves
    with opponent occupancy treated as unknown."""
    if color is None:
        color = board.side_to_move
    if board.king_square(color) is None:
        raise InvalidBoardError(f"{color.name} has no king")
    arr = _board_with_stm(board, color)
    buf = np.empty(K.MAXMOVES, dtype=np.int32)
    n = K.gen_requests(arr, buf, K.TABLES)
    reqs = {MoveRequest.from_packed(int(buf[i])) for i in range(n)}
    reqs.add(PASS)
    return frozenset(reqs)


def packed_request_space(board: Board, color: Optional[Color] = None) -> set[int]:
    """Packed-int request space including PASS; used on hot paths."""
    if color is None:
        color = board.side_to_move
    arr = _board_with_stm(board, color)
    buf = np.empty(K.MAXMOVES, dtype=np.int32)
    n = K.gen_requests(arr, buf, K.TABLES)
    space = {int(buf[i]) for i in range(n)}
    space.add(K.PASS)
    return space


def resolve(board: Board, req: MoveRequest) -> tuple[Board, MoveResult]:
    """Resolve a request under blind-chess semantics.

    Raises RejectedRequestError when the request is outside the mover's
    request space (own-piece blocks and pattern violations; the unknown
    opponent never makes a request invalid).
    """
    if req.packed() not in packed_request_space(board):
        raise RejectedRequestError(f"{req.uci()} not available on {board.to_fen()}")
    return resolve_unchecked(board, req)


def resolve_unchecked(board: Board, req: MoveRequest) -> tuple[Board, MoveResult]:
    out = np.empty(K.BOARD_LEN, dtype=np.uint8)
    frm, landed, capsq = K.resolve_move(board.array(), req.packed(), out)
    taken = TakenMove(int(frm), int(landed)) if landed >= 0 else None
    result = MoveResult(req, taken, int(capsq) if capsq >= 0 else None)
    return Board.from_array(out), result


def sense(board: Board, center: Square) -> SenseResult:
    """Ground-truth contents of the 3x3 block around an interior center."""
    squares = sense_block(center)
    contents = tuple((sq, board.piece_at(sq)) for sq in squares)
    return SenseResult(center, contents)


def game_over(board: Board) -> Optional[Color]:
    """The winner once exactly one king remains, else None."""
    wk = board.king_square(Color.WHITE)
    bk = board.king_square(Color.BLACK)
    if wk is None and bk is None:
        raise InvalidBoardError("no kings on board")
    if wk is None:
        return Color.BLACK
    if bk is None:
        return Color.WHITE
    return None


def standard_legal_moves(board: Board) -> frozenset[MoveRequest]:
    """Classical chess legal moves (check respected, no Pass); oracle support."""
    arr = board.array()
    out = np.empty(K.MAXMOVES, dtype=np.int32)
    scratch_m = np.empty(K.MAXMOVES, dtype=np.int32)
    scratch_b = np.empty(K.BOARD_LEN, dtype=np.uint8)
    n = K.gen_legal(arr, out, scratch_m, scratch_b, K.TABLES)
    return frozenset(MoveRequest.from_packed(int(out[i])) for i in range(n))


def perft(board: Board, depth: int) -> int:
    """Classical perft node count from this position."""
    return int(K.perft(board.array(), depth, K.TABLES))
