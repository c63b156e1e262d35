import random

import pytest

import oracle
from conftest import random_classical_position, random_rbc_position
from rbclab.board import (
    Board,
    BoardKey,
    Color,
    InvalidBoardError,
    InvalidSenseError,
    MoveRequest,
    PASS,
    Piece,
    PieceKind,
    RejectedRequestError,
    SENSE_CENTERS,
    game_over,
    initial_board,
    parse_square,
    perft,
    request_space,
    resolve,
    resolve_unchecked,
    sense,
    sense_block,
    square_name,
    standard_legal_moves,
)


def sq(name):
    return parse_square(name)


def req(text):
    return MoveRequest.parse(text)


class TestSquaresAndPieces:
    def test_square_name_round_trip(self):
        for i in range(64):
            assert parse_square(square_name(i)) == i

    def test_parse_square_rejects_garbage(self):
        for bad in ("i1", "a9", "e", "e44", ""):
            with pytest.raises(ValueError):
                parse_square(bad)

    def test_twelve_distinct_pieces(self):
        pieces = {Piece(c, k) for c in Color for k in PieceKind}
        assert len(pieces) == 12
        assert len({p.code for p in pieces}) == 12
        assert len({p.letter for p in pieces}) == 12

    def test_piece_letter_round_trip(self):
        for c in Color:
            for k in PieceKind:
                p = Piece(c, k)
                assert Piece.from_letter(p.letter) == p
                assert Piece.from_code(p.code) == p


class TestFen:
    def test_initial_round_trip(self):
        b = initial_board()
        assert Board.from_fen(b.to_fen()) == b

    def test_random_round_trips(self):
        rng = random.Random(7)
        for _ in range(25):
            b = random_rbc_position(rng, rng.randrange(0, 40))
            assert Board.from_fen(b.to_fen()) == b

    def test_kingless_board_parses(self):
        # relaxed parse: a captured king must still serialize and re-parse
        b = Board.from_fen("8/8/8/8/8/8/8/K7 w - - 0 1")
        assert b.king_square(Color.BLACK) is None
        assert game_over(b) == Color.WHITE

    def test_ep_field(self):
        b = Board.from_fen("rnbqkbnr/ppp1pppp/8/3pP3/8/8/PPPP1PPP/RNBQKBNR w KQkq d6 0 3")
        assert b.ep_square == sq("d6")


class TestValidate:
    def test_reachable_positions_are_sound(self):
        rng = random.Random(21)
        for _ in range(30):
            b = random_rbc_position(rng, rng.randrange(0, 30))
            if game_over(b) is None:
                assert b.validate() == [], b.to_fen()

    def test_catches_back_rank_pawn(self):
        b = Board.from_fen("P3k3/8/8/8/8/8/8/4K3 w - - 0 1")
        assert any("back rank" in p for p in b.validate())

    def test_catches_phantom_castle_right(self):
        b = Board.from_fen("4k3/8/8/8/8/8/8/4K2R w Q - 0 1")
        assert any("castling right" in p for p in b.validate())

    def test_catches_bad_ep(self):
        b = Board.from_fen("4k3/8/8/8/8/8/8/4K3 w - e6 0 1")
        assert any("en-passant" in p for p in b.validate())

    def test_ep_with_pawn_beyond_is_fine(self):
        b = Board.from_fen("rnbqkbnr/ppp1pppp/8/3pP3/8/8/PPPP1PPP/RNBQKBNR w KQkq d6 0 3")
        assert b.validate() == []


class TestBoardKey:
    def test_equal_boards_equal_keys(self):
        a = initial_board().key()
        b = Board.from_fen(initial_board().to_fen()).key()
        assert a == b and hash(a) == hash(b)

    def test_distinct_boards_distinct_payloads(self):
        rng = random.Random(3)
        seen = set()
        for _ in range(50):
            b = random_rbc_position(rng, rng.randrange(0, 30))
            seen.add(b.key().payload)
        assert len(seen) > 10  # random play produces variety

    def test_key_ordering_is_payload_ordering(self):
        a, b = initial_board().key(), random_classical_position(random.Random(1), 6).key()
        assert (a < b) == (a.payload < b.payload)


class TestRequestSpace:
    def test_initial_contents(self):
        space = {r.uci() for r in request_space(initial_board())}
        for want in ("pass", "a2a3", "a2a4", "b1c3", "b2a3", "b2c3"):
            assert want in space
        pawn_reqs = [u for u in space if len(u) == 4 and u[1] == "2" and u[0] in "abcdefgh"]
        assert len(pawn_reqs) >= 16
        # full enumeration: 30 pawn + 4 knight requests plus the pass
        assert len(space) == 35

    def test_lone_kings(self):
        b = Board.from_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 1")
        space = request_space(b)
        steps = {r.uci() for r in space if not r.is_pass}
        assert steps == {"e1d1", "e1d2", "e1e2", "e1f2", "e1f1"}

    def test_own_piece_blocks_ray_exclusive(self):
        b = Board.from_fen("4k3/8/8/8/8/P7/8/R3K3 w - - 0 1")
        ups = {r.uci() for r in request_space(b) if r.uci().startswith("a1a")}
        assert ups == {"a1a2"}

    def test_diagonal_always_requestable(self):
        b = Board.from_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")
        space = {r.uci() for r in request_space(b)}
        assert "e2d3" in space and "e2f3" in space

    def test_castle_requestable_through_opponent(self):
        # enemy knight on f1 does not block the request, only the resolution
        b = Board.from_fen("4k3/8/8/8/8/8/8/4Kn1R w K - 0 1")
        space = {r.uci() for r in request_space(b)}
        assert "e1g1" in space

    def test_castle_blocked_by_own_piece(self):
        b = Board.from_fen("4k3/8/8/8/8/8/8/4KB1R w K - 0 1")
        space = {r.uci() for r in request_space(b)}
        assert "e1g1" not in space

    def test_promotion_requests_enumerated(self):
        b = Board.from_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1")
        promos = {r.uci() for r in request_space(b) if r.uci().startswith("a7a8")}
        assert promos == {"a7a8n", "a7a8b", "a7a8r", "a7a8q"}

    def test_missing_king_rejected(self):
        b = Board.from_fen("8/8/8/8/8/8/8/K7 w - - 0 1")
        with pytest.raises(InvalidBoardError):
            request_space(b, Color.BLACK)

    def test_superset_of_classical_legal(self):
        # blind requests ignore check, so they cover classical legality
        # minus castling (its through-check rules do not exist here)
        rng = random.Random(11)
        for _ in range(60):
            b = random_classical_position(rng, rng.randrange(0, 30))
            space = request_space(b)
            for m in standard_legal_moves(b):
                assert m in space


class TestResolve:
    def test_rejects_own_blocked_request(self):
        with pytest.raises(RejectedRequestError):
            resolve(initial_board(), req("a1a8"))

    def test_slider_captures_first_blocker(self):
        b = Board.from_fen("4k3/8/8/8/6p1/8/4B3/4K3 w - - 0 1")
        nb, res = resolve(b, req("e2h5"))
        assert res.taken.landed == sq("g4")
        assert res.capture_square == sq("g4")
        assert nb.piece_at(sq("g4")) == Piece(Color.WHITE, PieceKind.BISHOP)

    def test_pawn_two_push_far_blocked_advances_one(self):
        b = Board.from_fen("4k3/8/8/8/4n3/8/4P3/4K3 w - - 0 1")
        nb, res = resolve(b, req("e2e4"))
        assert res.taken.landed == sq("e3")
        assert res.capture_square is None
        assert nb.ep_square is None

    def test_pawn_two_push_near_blocked_nothing_moves(self):
        b = Board.from_fen("4k3/8/8/8/8/4n3/4P3/4K3 w - - 0 1")
        nb, res = resolve(b, req("e2e4"))
        assert res.taken is None
        assert nb.side_to_move == Color.BLACK

    def test_pawn_single_push_blocked_nothing_moves(self):
        b = Board.from_fen("4k3/8/8/8/8/4n3/4P3/4K3 w - - 0 1")
        nb, res = resolve(b, req("e2e3"))
        assert res.taken is None

    def test_castle_blocked_by_opponent_nothing_moves(self):
        b = Board.from_fen("4k3/8/8/8/8/8/8/4Kn1R w K - 0 1")
        nb, res = resolve(b, req("e1g1"))
        assert res.taken is None
        assert res.capture_square is None
        assert nb.side_to_move == Color.BLACK
        assert nb.piece_at(sq("e1")) == Piece(Color.WHITE, PieceKind.KING)
        assert nb.castling_mask & 1  # the right survives a failed attempt

    def test_castle_resolves_when_clear(self):
        b = Board.from_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1")
        nb, res = resolve(b, req("e1g1"))
        assert res.taken.landed == sq("g1")
        assert nb.piece_at(sq("f1")) == Piece(Color.WHITE, PieceKind.ROOK)
        assert nb.castling_mask == 0

    def test_failed_pawn_diagonal(self):
        b = Board.from_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")
        nb, res = resolve(b, req("e2d3"))
        assert res.taken is None

    def test_pawn_diagonal_capture(self):
        b = Board.from_fen("4k3/8/8/8/8/3n4/4P3/4K3 w - - 0 1")
        nb, res = resolve(b, req("e2d3"))
        assert res.taken.landed == sq("d3")
        assert res.capture_square == sq("d3")

    def test_en_passant_capture_square_differs_from_landing(self):
        b = Board.from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 1")
        nb, res = resolve(b, req("e5d6"))
        assert res.taken.landed == sq("d6")
        assert res.capture_square == sq("d5")
        assert nb.piece_at(sq("d5")) is None

    def test_stale_en_passant_belief_nothing_moves(self):
        # the board disagrees that en passant is available
        b = Board.from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - - 0 1")
        nb, res = resolve(b, req("e5d6"))
        assert res.taken is None

    def test_promotion_defaults_to_queen(self):
        b = Board.from_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1")
        nb, res = resolve_unchecked(b, MoveRequest.move(sq("a7"), sq("a8")))
        assert nb.piece_at(sq("a8")) == Piece(Color.WHITE, PieceKind.QUEEN)

    def test_promotion_request_kind_honored(self):
        b = Board.from_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1")
        nb, res = resolve(b, req("a7a8n"))
        assert nb.piece_at(sq("a8")) == Piece(Color.WHITE, PieceKind.KNIGHT)

    def test_pass_flips_side_and_clears_ep(self):
        b = Board.from_fen("rnbqkbnr/ppp1pppp/8/3pP3/8/8/PPPP1PPP/RNBQKBNR w KQkq d6 0 3")
        nb, res = resolve(b, PASS)
        assert res.taken is None and res.capture_square is None
        assert nb.side_to_move == Color.BLACK
        assert nb.ep_square is None

    def test_slider_capture_short_updates_rights_by_landing(self):
        # rook request a1a8 captures a blocker on a4; white queenside right
        # dies because the rook left home, black's stays intact
        b = Board.from_fen("r3k3/8/8/8/n7/8/8/R3K3 w Qq - 0 1")
        nb, res = resolve(b, req("a1a8"))
        assert res.taken.landed == sq("a4")
        assert nb.castling_mask == 8  # only black queenside

    def test_totality_over_request_space(self):
        rng = random.Random(5)
        for _ in range(40):
            b = random_rbc_position(rng, rng.randrange(0, 25))
            if game_over(b) is not None:
                continue
            for r in request_space(b):
                nb, res = resolve_unchecked(b, r)
                assert nb.side_to_move != b.side_to_move

    def test_resolve_removes_at_most_one_piece(self):
        rng = random.Random(9)
        for _ in range(30):
            b = random_rbc_position(rng, rng.randrange(0, 25))
            if game_over(b) is not None:
                continue
            count = sum(1 for _ in b.pieces())
            for r in sorted(request_space(b), key=lambda m: m.packed())[:10]:
                nb, res = resolve_unchecked(b, r)
                after = sum(1 for _ in nb.pieces())
                assert count - 1 <= after <= count
                # opponent pieces move only by vanishing at the capture square
                if res.capture_square is None:
                    assert after == count


class TestSense:
    def test_exactly_36_centers(self):
        assert len(SENSE_CENTERS) == 36
        for c in SENSE_CENTERS:
            f, r = c & 7, c >> 3
            assert 1 <= f <= 6 and 1 <= r <= 6

    def test_initial_sense_b2(self):
        result = sense(initial_board(), sq("b2"))
        contents = dict(result.contents)
        assert contents[sq("a1")] == Piece(Color.WHITE, PieceKind.ROOK)
        assert contents[sq("b2")] == Piece(Color.WHITE, PieceKind.PAWN)
        assert contents[sq("c3")] is None

    def test_empty_region(self):
        result = sense(initial_board(), sq("e5"))
        assert all(p is None for _, p in result.contents)

    def test_block_row_major(self):
        blk = sense_block(sq("d4"))
        assert [square_name(s) for s in blk] == [
            "c3", "d3", "e3", "c4", "d4", "e4", "c5", "d5", "e5"]

    def test_off_interior_rejected(self):
        for bad in ("a1", "h8", "a4", "d8"):
            with pytest.raises(InvalidSenseError):
                sense(initial_board(), sq(bad))

    def test_sense_is_pure(self):
        b = initial_board()
        payload_before = b.payload
        r1 = sense(b, sq("c3"))
        r2 = sense(b, sq("c3"))
        assert r1 == r2
        assert b.payload == payload_before


class TestGameOver:
    def test_initial_none(self):
        assert game_over(initial_board()) is None

    def test_black_king_captured(self):
        assert game_over(Board.from_fen("4Q3/8/8/8/8/8/8/4K3 w - - 0 1")) == Color.WHITE

    def test_both_kings_midgame(self):
        rng = random.Random(2)
        b = random_classical_position(rng, 14)
        assert game_over(b) is None

    def test_no_kings_invalid(self):
        with pytest.raises(InvalidBoardError):
            game_over(Board.from_fen("8/8/8/8/8/8/8/8 w - - 0 1"))


PERFT_CASES = [
    ("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", [20, 400, 8902, 197281]),
    ("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", [48, 2039, 97862]),
    ("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", [14, 191, 2812, 43238]),
    ("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", [44, 1486, 62379]),
    ("r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10", [46, 2079, 89890]),
]


class TestStandardLegalMoves:
    def test_initial_twenty(self):
        assert len(standard_legal_moves(initial_board())) == 20

    @pytest.mark.parametrize("fen,counts", PERFT_CASES)
    def test_perft(self, fen, counts):
        b = Board.from_fen(fen)
        for depth, want in enumerate(counts, start=1):
            assert perft(b, depth) == want

    def test_stalemate_empty(self):
        b = Board.from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
        assert standard_legal_moves(b) == frozenset()

    def test_matches_naive_oracle_on_random_positions(self):
        rng = random.Random(13)
        for _ in range(40):
            b = random_classical_position(rng, rng.randrange(0, 40))
            mine = {m.uci() for m in standard_legal_moves(b)}
            theirs = {oracle.move_uci(m) for m in oracle.legal_moves(
                oracle.Position.from_fen(b.to_fen()))}
            assert mine == theirs, b.to_fen()

    def test_oracle_perft_agreement_shallow(self):
        pos = oracle.Position.from_fen(PERFT_CASES[0][0])
        assert oracle.perft(pos, 2) == 400


class TestClassicalEquivalence:
    def test_resolve_matches_classical_apply(self):
        # on classical-legal moves the blind resolution is plain chess
        rng = random.Random(17)
        checked = 0
        while checked < 300:
            b = random_classical_position(rng, rng.randrange(0, 40))
            moves = sorted(standard_legal_moves(b), key=lambda m: m.uci())
            if not moves:
                continue
            m = moves[rng.randrange(len(moves))]
            nb, res = resolve_unchecked(b, m)
            pos = oracle.Position.from_fen(b.to_fen())
            promo = m.uci()[4] if len(m.uci()) == 5 else None
            om = ((m.from_sq & 7, m.from_sq >> 3), (m.to_sq & 7, m.to_sq >> 3), promo)
            expected = oracle.apply_move(pos, om)
            assert nb.to_fen() == expected.to_fen(), (b.to_fen(), m.uci())
            assert res.taken is not None
            checked += 1
