import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rbclab.board import Board, initial_board, resolve_unchecked, standard_legal_moves


@pytest.fixture(scope="session")
def evaluator_factory():
    from rbclab.bots import BuiltinEvaluator

    def make(depth=2):
        return BuiltinEvaluator(depth)

    return make


def random_classical_position(rng: random.Random, plies: int) -> Board:
    """A position reachable by random classical play from the start."""
    board = initial_board()
    for _ in range(plies):
        moves = sorted(standard_legal_moves(board), key=lambda m: m.uci())
        if not moves:
            break
        board, _ = resolve_unchecked(board, moves[rng.randrange(len(moves))])
    return board


def random_rbc_position(rng: random.Random, plies: int) -> Board:
    """A position reachable by random blind-request play (may be illegal in
    classical chess, e.g. a king en prise)."""
    from rbclab.board import game_over, request_space

    board = initial_board()
    for _ in range(plies):
        if game_over(board) is not None:
            break
        moves = sorted(request_space(board), key=lambda m: m.packed())
        board, _ = resolve_unchecked(board, moves[rng.randrange(len(moves))])
    return board
