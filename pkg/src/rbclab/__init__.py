"""Reconnaissance blind chess arbiter, belief tracking, bots, and metrics."""

from .board import (
    Board,
    BoardKey,
    Color,
    MoveRequest,
    MoveResult,
    PASS,
    Piece,
    PieceKind,
    SenseResult,
    game_over,
    initial_board,
    request_space,
    resolve,
    sense,
    standard_legal_moves,
)

__all__ = [
    "Board",
    "BoardKey",
    "Color",
    "MoveRequest",
    "MoveResult",
    "PASS",
    "Piece",
    "PieceKind",
    "SenseResult",
    "game_over",
    "initial_board",
    "request_space",
    "resolve",
    "sense",
    "standard_legal_moves",
]
