"""Numba-compiled board kernel: move generation, move resolution, search.

Board layout (uint8 vector of length 67):
    [0:64]  square contents, a1=0 .. h8=63 (rank*8 + file)
            0 empty; 1..6 white P N B R Q K; 7..12 black p n b r q k
    [64]    side to move: 0 white, 1 black
    [65]    castling rights mask: 1 white-kingside, 2 white-queenside,
            4 black-kingside, 8 black-queenside
    [66]    en-passant target square, 255 when none

Moves are packed ints: from | to<<6 | promo<<12, where promo is a piece
kind code (2=N 3=B 4=R 5=Q) or 0.  PASS is -1.

Three move generators live here because the game needs three distinct
notions of "available move":
    gen_requests  - blind request space (opponent occupancy unknown)
    gen_pseudo    - classical pseudo-legal on known occupancy (search tree)
    gen_legal     - strict classical legality (oracle / perft)
"""

import numpy as np
from numba import njit

BOARD_LEN = 67
STM = 64
CASTLE = 65
EP = 66
EP_NONE = 255

EMPTY = 0
PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6

WK_RIGHT, WQ_RIGHT, BK_RIGHT, BQ_RIGHT = 1, 2, 4, 8

A1, B1, C1, D1, E1, F1, G1, H1 = range(8)
A8, B8, C8, D8, E8, F8, G8, H8 = range(56, 64)

PASS = -1
MAXMOVES = 512

WIN = 1_000_000
NEG_INF = -8 * WIN

# material in centipawns; the king value makes its loss dominate any trade
MAT = np.array([0, 100, 320, 330, 500, 900, 100000], dtype=np.int64)
MOBILITY_WEIGHT = 2
# blind captures travel along open lines, so exposed kings lose games that
# classical chess would call safe; penalize empty ray squares around the king
KING_AIR_WEIGHT = 14


def _build_tables():
    knight = np.full((64, 8), -1, dtype=np.int8)
    king = np.full((64, 8), -1, dtype=np.int8)
    ray = np.full((64, 8, 7), -1, dtype=np.int8)
    kdel = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
    gdel = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
    # ray directions: 0 N, 1 S, 2 E, 3 W (rook), 4 NE, 5 NW, 6 SE, 7 SW (bishop)
    rdel = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    for sq in range(64):
        r, f = sq >> 3, sq & 7
        for i, (dr, df) in enumerate(kdel):
            rr, ff = r + dr, f + df
            if 0 <= rr < 8 and 0 <= ff < 8:
                knight[sq, i] = rr * 8 + ff
        for i, (dr, df) in enumerate(gdel):
            rr, ff = r + dr, f + df
            if 0 <= rr < 8 and 0 <= ff < 8:
                king[sq, i] = rr * 8 + ff
        for d, (dr, df) in enumerate(rdel):
            rr, ff = r + dr, f + df
            k = 0
            while 0 <= rr < 8 and 0 <= ff < 8:
                ray[sq, d, k] = rr * 8 + ff
                rr += dr
                ff += df
                k += 1
    return knight, king, ray


KNIGHT_TGT, KING_TGT, RAY = _build_tables()

# lookup tables are threaded through jitted functions as one explicit
# argument: embedding global arrays in cached artifacts is unreliable
TABLES = (KNIGHT_TGT, KING_TGT, RAY, MAT)


@njit(cache=True, inline="always")
def piece_kind(p):
    return p - 6 if p > 6 else p


@njit(cache=True, inline="always")
def piece_color(p):
    # only meaningful for p != 0
    return 1 if p > 6 else 0


@njit(cache=True, inline="always")
def make_piece(kind, color):
    return kind + 6 if color == 1 else kind


@njit(cache=True, inline="always")
def pack_move(frm, to, promo):
    return frm | (to << 6) | (promo << 12)


@njit(cache=True, inline="always")
def move_from(mv):
    return mv & 63


@njit(cache=True, inline="always")
def move_to(mv):
    return (mv >> 6) & 63


@njit(cache=True, inline="always")
def move_promo(mv):
    return (mv >> 12) & 7


@njit(cache=True)
def find_king(b, color):
    target = make_piece(KING, color)
    for sq in range(64):
        if b[sq] == target:
            return sq
    return -1


@njit(cache=True, inline="always")
def _is_own(b, sq, color):
    p = b[sq]
    if p == 0:
        return False
    return piece_color(p) == color


@njit(cache=True, inline="always")
def _is_opp(b, sq, color):
    p = b[sq]
    if p == 0:
        return False
    return piece_color(p) != color


@njit(cache=True)
def gen_requests(b, out, tbl):
    """Blind request space for the side to move, excluding Pass.

    Own pieces block; opponent occupancy is treated as unknown, so slider
    rays run through enemy pieces and pawn diagonals are always on offer.
    """
    color = b[STM]
    n = 0
    fwd = 8 if color == 0 else -8
    start_rank = 1 if color == 0 else 6
    promo_rank = 7 if color == 0 else 0
    for frm in range(64):
        p = b[frm]
        if p == 0 or piece_color(p) != color:
            continue
        kind = piece_kind(p)
        if kind == PAWN:
            to = frm + fwd
            if 0 <= to < 64 and not _is_own(b, to, color):
                if to >> 3 == promo_rank:
                    for pr in range(KNIGHT, QUEEN + 1):
                        out[n] = pack_move(frm, to, pr)
                        n += 1
                else:
                    out[n] = pack_move(frm, to, 0)
                    n += 1
            if frm >> 3 == start_rank:
                near = frm + fwd
                far = frm + 2 * fwd
                if not _is_own(b, near, color) and not _is_own(b, far, color):
                    out[n] = pack_move(frm, far, 0)
                    n += 1
            f = frm & 7
            for df in (-1, 1):
                ff = f + df
                if ff < 0 or ff > 7:
                    continue
                to = frm + fwd + df
                if to < 0 or to > 63 or _is_own(b, to, color):
                    continue
                if to >> 3 == promo_rank:
                    for pr in range(KNIGHT, QUEEN + 1):
                        out[n] = pack_move(frm, to, pr)
                        n += 1
                else:
                    out[n] = pack_move(frm, to, 0)
                    n += 1
        elif kind == KNIGHT:
            for i in range(8):
                to = tbl[0][frm, i]
                if to >= 0 and not _is_own(b, to, color):
                    out[n] = pack_move(frm, to, 0)
                    n += 1
        elif kind == KING:
            for i in range(8):
                to = tbl[1][frm, i]
                if to >= 0 and not _is_own(b, to, color):
                    out[n] = pack_move(frm, to, 0)
                    n += 1
            rights = b[CASTLE]
            if color == 0 and frm == E1:
                if (rights & WK_RIGHT) and b[H1] == ROOK and not _is_own(b, F1, 0) and not _is_own(b, G1, 0):
                    out[n] = pack_move(E1, G1, 0)
                    n += 1
                if (rights & WQ_RIGHT) and b[A1] == ROOK and not _is_own(b, D1, 0) and not _is_own(b, C1, 0) and not _is_own(b, B1, 0):
                    out[n] = pack_move(E1, C1, 0)
                    n += 1
            elif color == 1 and frm == E8:
                brook = make_piece(ROOK, 1)
                if (rights & BK_RIGHT) and b[H8] == brook and not _is_own(b, F8, 1) and not _is_own(b, G8, 1):
                    out[n] = pack_move(E8, G8, 0)
                    n += 1
                if (rights & BQ_RIGHT) and b[A8] == brook and not _is_own(b, D8, 1) and not _is_own(b, C8, 1) and not _is_own(b, B8, 1):
                    out[n] = pack_move(E8, C8, 0)
                    n += 1
        else:
            d0, d1 = (0, 8) if kind == QUEEN else ((0, 4) if kind == ROOK else (4, 8))
            for d in range(d0, d1):
                for k in range(7):
                    to = tbl[2][frm, d, k]
                    if to < 0 or _is_own(b, to, color):
                        break
                    out[n] = pack_move(frm, to, 0)
                    n += 1
    return n


@njit(cache=True)
def gen_pseudo(b, out, tbl):
    """Classical pseudo-legal moves on known occupancy (check is ignored)."""
    color = b[STM]
    n = 0
    fwd = 8 if color == 0 else -8
    start_rank = 1 if color == 0 else 6
    promo_rank = 7 if color == 0 else 0
    ep = b[EP]
    for frm in range(64):
        p = b[frm]
        if p == 0 or piece_color(p) != color:
            continue
        kind = piece_kind(p)
        if kind == PAWN:
            to = frm + fwd
            if 0 <= to < 64 and b[to] == 0:
                if to >> 3 == promo_rank:
                    for pr in range(KNIGHT, QUEEN + 1):
                        out[n] = pack_move(frm, to, pr)
                        n += 1
                else:
                    out[n] = pack_move(frm, to, 0)
                    n += 1
                if frm >> 3 == start_rank and b[frm + 2 * fwd] == 0:
                    out[n] = pack_move(frm, frm + 2 * fwd, 0)
                    n += 1
            f = frm & 7
            for df in (-1, 1):
                ff = f + df
                if ff < 0 or ff > 7:
                    continue
                to = frm + fwd + df
                if to < 0 or to > 63:
                    continue
                if _is_opp(b, to, color):
                    if to >> 3 == promo_rank:
                        for pr in range(KNIGHT, QUEEN + 1):
                            out[n] = pack_move(frm, to, pr)
                            n += 1
                    else:
                        out[n] = pack_move(frm, to, 0)
                        n += 1
                elif ep != EP_NONE and to == ep:
                    out[n] = pack_move(frm, to, 0)
                    n += 1
        elif kind == KNIGHT:
            for i in range(8):
                to = tbl[0][frm, i]
                if to >= 0 and not _is_own(b, to, color):
                    out[n] = pack_move(frm, to, 0)
                    n += 1
        elif kind == KING:
            for i in range(8):
                to = tbl[1][frm, i]
                if to >= 0 and not _is_own(b, to, color):
                    out[n] = pack_move(frm, to, 0)
                    n += 1
            rights = b[CASTLE]
            if color == 0 and frm == E1:
                if (rights & WK_RIGHT) and b[H1] == ROOK and b[F1] == 0 and b[G1] == 0:
                    out[n] = pack_move(E1, G1, 0)
                    n += 1
                if (rights & WQ_RIGHT) and b[A1] == ROOK and b[D1] == 0 and b[C1] == 0 and b[B1] == 0:
                    out[n] = pack_move(E1, C1, 0)
                    n += 1
            elif color == 1 and frm == E8:
                brook = make_piece(ROOK, 1)
                if (rights & BK_RIGHT) and b[H8] == brook and b[F8] == 0 and b[G8] == 0:
                    out[n] = pack_move(E8, G8, 0)
                    n += 1
                if (rights & BQ_RIGHT) and b[A8] == brook and b[D8] == 0 and b[C8] == 0 and b[B8] == 0:
                    out[n] = pack_move(E8, C8, 0)
                    n += 1
        else:
            d0, d1 = (0, 8) if kind == QUEEN else ((0, 4) if kind == ROOK else (4, 8))
            for d in range(d0, d1):
                for k in range(7):
                    to = tbl[2][frm, d, k]
                    if to < 0 or _is_own(b, to, color):
                        break
                    out[n] = pack_move(frm, to, 0)
                    n += 1
                    if b[to] != 0:
                        break
    return n


@njit(cache=True)
def count_moves(b, color, tbl):
    """Cheap pseudo-move count for one color (mobility term)."""
    n = 0
    fwd = 8 if color == 0 else -8
    start_rank = 1 if color == 0 else 6
    for frm in range(64):
        p = b[frm]
        if p == 0 or piece_color(p) != color:
            continue
        kind = piece_kind(p)
        if kind == PAWN:
            to = frm + fwd
            if 0 <= to < 64 and b[to] == 0:
                n += 1
                if frm >> 3 == start_rank and b[frm + 2 * fwd] == 0:
                    n += 1
            f = frm & 7
            for df in (-1, 1):
                ff = f + df
                if 0 <= ff <= 7:
                    to = frm + fwd + df
                    if 0 <= to <= 63 and _is_opp(b, to, color):
                        n += 1
        elif kind == KNIGHT:
            for i in range(8):
                to = tbl[0][frm, i]
                if to >= 0 and not _is_own(b, to, color):
                    n += 1
        elif kind == KING:
            for i in range(8):
                to = tbl[1][frm, i]
                if to >= 0 and not _is_own(b, to, color):
                    n += 1
        else:
            d0, d1 = (0, 8) if kind == QUEEN else ((0, 4) if kind == ROOK else (4, 8))
            for d in range(d0, d1):
                for k in range(7):
                    to = tbl[2][frm, d, k]
                    if to < 0 or _is_own(b, to, color):
                        break
                    n += 1
                    if b[to] != 0:
                        break
    return n


@njit(cache=True)
def is_attacked(b, sq, by, tbl):
    """True if square sq is attacked by a piece of color `by`."""
    r, f = sq >> 3, sq & 7
    # pawns
    if by == 0:
        for df in (-1, 1):
            rr, ff = r - 1, f + df
            if 0 <= rr and 0 <= ff <= 7 and b[rr * 8 + ff] == PAWN:
                return True
    else:
        bp = make_piece(PAWN, 1)
        for df in (-1, 1):
            rr, ff = r + 1, f + df
            if rr <= 7 and 0 <= ff <= 7 and b[rr * 8 + ff] == bp:
                return True
    kn = make_piece(KNIGHT, by)
    for i in range(8):
        t = tbl[0][sq, i]
        if t >= 0 and b[t] == kn:
            return True
    kg = make_piece(KING, by)
    for i in range(8):
        t = tbl[1][sq, i]
        if t >= 0 and b[t] == kg:
            return True
    rk = make_piece(ROOK, by)
    qn = make_piece(QUEEN, by)
    for d in range(0, 4):
        for k in range(7):
            t = tbl[2][sq, d, k]
            if t < 0:
                break
            p = b[t]
            if p != 0:
                if p == rk or p == qn:
                    return True
                break
    bi = make_piece(BISHOP, by)
    for d in range(4, 8):
        for k in range(7):
            t = tbl[2][sq, d, k]
            if t < 0:
                break
            p = b[t]
            if p != 0:
                if p == bi or p == qn:
                    return True
                break
    return False


@njit(cache=True, inline="always")
def _update_rights(out, rights):
    # a right survives only while both king and rook still sit at home
    if out[E1] != KING:
        rights &= ~(WK_RIGHT | WQ_RIGHT)
    if out[H1] != ROOK:
        rights &= ~WK_RIGHT
    if out[A1] != ROOK:
        rights &= ~WQ_RIGHT
    bking = KING + 6
    brook = ROOK + 6
    if out[E8] != bking:
        rights &= ~(BK_RIGHT | BQ_RIGHT)
    if out[H8] != brook:
        rights &= ~BK_RIGHT
    if out[A8] != brook:
        rights &= ~BQ_RIGHT
    out[CASTLE] = rights


@njit(cache=True)
def apply_classical(b, mv, out):
    """Standard chess make-move (moves assumed from gen_pseudo/gen_legal)."""
    out[:] = b
    color = b[STM]
    out[STM] = 1 - color
    ep = b[EP]
    out[EP] = EP_NONE
    frm = move_from(mv)
    to = move_to(mv)
    promo = move_promo(mv)
    p = b[frm]
    kind = piece_kind(p)
    if kind == KING and (to - frm == 2 or frm - to == 2):
        out[frm] = 0
        out[to] = p
        rook = make_piece(ROOK, color)
        if to > frm:
            out[frm + 3] = 0
            out[frm + 1] = rook
        else:
            out[frm - 4] = 0
            out[frm - 1] = rook
    else:
        if kind == PAWN:
            if to == ep and ep != EP_NONE and (to & 7) != (frm & 7) and b[to] == 0:
                victim = to - 8 if color == 0 else to + 8
                out[victim] = 0
            if to - frm == 16 or frm - to == 16:
                out[EP] = (frm + to) >> 1
            if to >> 3 == (7 if color == 0 else 0):
                pr = promo if promo != 0 else QUEEN
                p = make_piece(pr, color)
        out[frm] = 0
        out[to] = p
    _update_rights(out, b[CASTLE])


@njit(cache=True)
def gen_legal(b, out, scratch_moves, scratch_board, tbl):
    """Strict classical legal moves (king safety and castling-through-check)."""
    color = b[STM]
    n = gen_pseudo(b, scratch_moves, tbl)
    m = 0
    for i in range(n):
        mv = scratch_moves[i]
        frm = move_from(mv)
        to = move_to(mv)
        if piece_kind(b[frm]) == KING and (to - frm == 2 or frm - to == 2):
            mid = (frm + to) >> 1
            if is_attacked(b, frm, 1 - color, tbl) or is_attacked(b, mid, 1 - color, tbl):
                continue
        apply_classical(b, mv, scratch_board)
        ks = find_king(scratch_board, color)
        if ks >= 0 and not is_attacked(scratch_board, ks, 1 - color, tbl):
            out[m] = mv
            m += 1
    return m


@njit(cache=True)
def perft(b, depth, tbl):
    # iterative (explicit stack): recursive jitted functions cannot be cached
    if depth == 0:
        return 1
    moves = np.empty((depth, MAXMOVES), dtype=np.int32)
    nmoves = np.empty(depth, dtype=np.int64)
    idx = np.empty(depth, dtype=np.int64)
    boards = np.empty((depth + 1, BOARD_LEN), dtype=np.uint8)
    scratch_m = np.empty(MAXMOVES, dtype=np.int32)
    scratch_b = np.empty(BOARD_LEN, dtype=np.uint8)
    boards[0][:] = b
    nmoves[0] = gen_legal(boards[0], moves[0], scratch_m, scratch_b, tbl)
    idx[0] = 0
    if depth == 1:
        return nmoves[0]
    total = 0
    sp = 0
    while sp >= 0:
        if sp == depth - 1:
            total += nmoves[sp]
            sp -= 1
            continue
        if idx[sp] >= nmoves[sp]:
            sp -= 1
            continue
        mv = moves[sp, idx[sp]]
        idx[sp] += 1
        apply_classical(boards[sp], mv, boards[sp + 1])
        sp += 1
        nmoves[sp] = gen_legal(boards[sp], moves[sp], scratch_m, scratch_b, tbl)
        idx[sp] = 0
    return total


@njit(cache=True)
def resolve_move(b, mv, out):
    """Apply a blind request under RBC semantics.

    Returns (moved_from, landed, capture_square); -1 marks "absent".
    A request that turns out impossible on the true board moves nothing,
    but the turn still passes (side to move flips, en passant expires).
    """
    out[:] = b
    color = b[STM]
    out[STM] = 1 - color
    ep = b[EP]
    out[EP] = EP_NONE
    if mv < 0:
        return -1, -1, -1
    frm = move_from(mv)
    to = move_to(mv)
    promo = move_promo(mv)
    p = b[frm]
    kind = piece_kind(p)
    landed = -1
    capsq = -1
    if kind == KING and (to - frm == 2 or frm - to == 2):
        # squares strictly between king and rook must all be empty
        blocked = False
        if to > frm:
            for q in range(frm + 1, frm + 3):
                if b[q] != 0:
                    blocked = True
        else:
            for q in range(frm - 3, frm):
                if b[q] != 0:
                    blocked = True
        if not blocked:
            out[frm] = 0
            out[to] = p
            rook = make_piece(ROOK, color)
            if to > frm:
                out[frm + 3] = 0
                out[frm + 1] = rook
            else:
                out[frm - 4] = 0
                out[frm - 1] = rook
            landed = to
        _update_rights(out, b[CASTLE])
        return (frm if landed >= 0 else -1), landed, capsq
    if kind == KNIGHT or kind == KING:
        if _is_own(b, to, color):
            landed = -1
        else:
            if b[to] != 0:
                capsq = to
            landed = to
    elif kind == PAWN:
        fwd = 8 if color == 0 else -8
        d = to - frm
        if d == fwd:
            if b[to] == 0:
                landed = to
        elif d == 2 * fwd:
            near = frm + fwd
            if b[near] == 0:
                if b[to] == 0:
                    landed = to
                    out[EP] = near
                else:
                    landed = near
        else:
            if _is_opp(b, to, color):
                landed = to
                capsq = to
            elif ep != EP_NONE and to == ep:
                victim = to - fwd
                if _is_opp(b, victim, color) and piece_kind(b[victim]) == PAWN:
                    landed = to
                    capsq = victim
    else:
        dr = (to >> 3) - (frm >> 3)
        df = (to & 7) - (frm & 7)
        sr = 0 if dr == 0 else (1 if dr > 0 else -1)
        sf = 0 if df == 0 else (1 if df > 0 else -1)
        step = sr * 8 + sf
        q = frm + step
        while True:
            if b[q] != 0:
                if _is_opp(b, q, color):
                    landed = q
                    capsq = q
                break
            if q == to:
                landed = to
                break
            q += step
    if landed >= 0:
        out[frm] = 0
        newp = p
        if kind == PAWN and (landed >> 3 == 7 or landed >> 3 == 0):
            pr = promo if promo != 0 else QUEEN
            newp = make_piece(pr, color)
        if capsq >= 0 and capsq != landed:
            out[capsq] = 0
        out[landed] = newp
    _update_rights(out, b[CASTLE])
    return (frm if landed >= 0 else -1), landed, capsq


@njit(cache=True)
def _king_air(b, color, tbl):
    """Empty ray squares reachable from the king: open attack lanes."""
    ks = find_king(b, color)
    if ks < 0:
        return 0
    air = 0
    for d in range(8):
        for k in range(7):
            t = tbl[2][ks, d, k]
            if t < 0 or b[t] != 0:
                break
            air += 1
    return air


@njit(cache=True)
def static_eval(b, tbl):
    """Material, mobility, and king exposure, from the side to move's view."""
    score = 0
    for sq in range(64):
        p = b[sq]
        if p == 0:
            continue
        v = tbl[3][piece_kind(p)]
        score += v if p <= 6 else -v
    score += MOBILITY_WEIGHT * (count_moves(b, 0, tbl) - count_moves(b, 1, tbl))
    score += KING_AIR_WEIGHT * (_king_air(b, 1, tbl) - _king_air(b, 0, tbl))
    return score if b[STM] == 0 else -score


@njit(cache=True)
def order_moves(b, moves, n):
    """Captures first by descending victim value; stable within buckets."""
    if n <= 1:
        return
    tmp = np.empty(n, dtype=np.int32)
    m = 0
    for victim in range(KING, 0, -1):
        for i in range(n):
            t = move_to(moves[i])
            if b[t] != 0 and piece_kind(b[t]) == victim:
                tmp[m] = moves[i]
                m += 1
    for i in range(n):
        if b[move_to(moves[i])] == 0:
            tmp[m] = moves[i]
            m += 1
    moves[:n] = tmp


QPLY = 24  # extra plies reserved for the capture-resolution tail

# node-stack rows for the iterative alpha-beta
_SN, _SI, _SA, _SB, _SBEST, _SOKQ = 0, 1, 2, 3, 4, 5


@njit(cache=True)
def _ab_value(b0, depth0, alpha0, beta0, movebuf, boardbuf, stk, tbl):
    """Iterative negamax with alpha-beta and a captures-only quiescence tail.

    Nodes deeper than depth0 resolve captures only, with stand-pat.  The
    explicit stack exists because recursive jitted functions cannot be
    cached reliably.
    """
    ENTER, RESUME, ABSORB, POP = 0, 1, 2, 3
    maxsp = stk.shape[1] - 1
    boardbuf[0][:] = b0
    stk[_SA, 0] = alpha0
    stk[_SB, 0] = beta0
    sp = 0
    state = ENTER
    val = 0
    while True:
        if state == ENTER:
            b = boardbuf[sp]
            remaining = depth0 - sp
            okq = find_king(b, 1 - b[STM])
            if okq < 0:
                val = WIN + (remaining if remaining > 0 else 0)
                state = POP
                continue
            if remaining <= 0:
                stand = static_eval(b, tbl)
                if stand >= stk[_SB, sp] or sp >= maxsp:
                    val = stand
                    state = POP
                    continue
                stk[_SBEST, sp] = stand
                if stand > stk[_SA, sp]:
                    stk[_SA, sp] = stand
            else:
                stk[_SBEST, sp] = NEG_INF
            n = gen_pseudo(b, movebuf[sp], tbl)
            if remaining > 0 and n == 0:
                val = static_eval(b, tbl)
                state = POP
                continue
            order_moves(b, movebuf[sp], n)
            stk[_SN, sp] = n
            stk[_SI, sp] = 0
            stk[_SOKQ, sp] = okq
            state = RESUME
        elif state == RESUME:
            b = boardbuf[sp]
            remaining = depth0 - sp
            state = -1
            while True:
                i = stk[_SI, sp]
                if i >= stk[_SN, sp]:
                    val = stk[_SBEST, sp]
                    state = POP
                    break
                stk[_SI, sp] = i + 1
                mv = movebuf[sp, i]
                to = move_to(mv)
                if remaining <= 0 and b[to] == 0:
                    continue
                if to == stk[_SOKQ, sp]:
                    if remaining <= 0:
                        val = WIN
                        state = POP
                        break
                    score = WIN + remaining
                    if score > stk[_SBEST, sp]:
                        stk[_SBEST, sp] = score
                    if stk[_SBEST, sp] > stk[_SA, sp]:
                        stk[_SA, sp] = stk[_SBEST, sp]
                    if stk[_SA, sp] >= stk[_SB, sp]:
                        val = stk[_SBEST, sp]
                        state = POP
                        break
                    continue
                apply_classical(b, mv, boardbuf[sp + 1])
                stk[_SA, sp + 1] = -stk[_SB, sp]
                stk[_SB, sp + 1] = -stk[_SA, sp]
                sp += 1
                state = ENTER
                break
        elif state == ABSORB:
            score = -val
            if score > stk[_SBEST, sp]:
                stk[_SBEST, sp] = score
            if stk[_SBEST, sp] > stk[_SA, sp]:
                stk[_SA, sp] = stk[_SBEST, sp]
            if stk[_SA, sp] >= stk[_SB, sp]:
                val = stk[_SBEST, sp]
                state = POP
            else:
                state = RESUME
        else:  # POP
            if sp == 0:
                return val
            sp -= 1
            state = ABSORB


@njit(cache=True)
def search_best(b, depth, tbl):
    """Fixed-depth alpha-beta root search; deterministic first-best move."""
    stack = depth + QPLY
    movebuf = np.empty((stack, MAXMOVES), dtype=np.int32)
    boardbuf = np.empty((stack, BOARD_LEN), dtype=np.uint8)
    stk = np.empty((6, stack), dtype=np.int64)
    rootmoves = np.empty(MAXMOVES, dtype=np.int32)
    color = b[STM]
    okq = find_king(b, 1 - color)
    n = gen_pseudo(b, rootmoves, tbl)
    if n == 0:
        return PASS, static_eval(b, tbl)
    order_moves(b, rootmoves, n)
    best = NEG_INF
    bestmv = rootmoves[0]
    alpha = NEG_INF
    beta = -NEG_INF
    child = np.empty(BOARD_LEN, dtype=np.uint8)
    for i in range(n):
        mv = rootmoves[i]
        if okq >= 0 and move_to(mv) == okq:
            score = WIN + depth
        else:
            apply_classical(b, mv, child)
            score = -_ab_value(child, depth - 1, -beta, -alpha,
                               movebuf, boardbuf, stk, tbl)
        if score > best:
            best = score
            bestmv = mv
        if best > alpha:
            alpha = best
    return bestmv, best


@njit(cache=True)
def score_roots(b, depth, out_moves, out_scores, tbl):
    """Exact scores for every root move (full window), for top-k ranking."""
    stack = depth + QPLY
    movebuf = np.empty((stack, MAXMOVES), dtype=np.int32)
    boardbuf = np.empty((stack, BOARD_LEN), dtype=np.uint8)
    stk = np.empty((6, stack), dtype=np.int64)
    rootmoves = np.empty(MAXMOVES, dtype=np.int32)
    color = b[STM]
    okq = find_king(b, 1 - color)
    n = gen_pseudo(b, rootmoves, tbl)
    order_moves(b, rootmoves, n)
    child = np.empty(BOARD_LEN, dtype=np.uint8)
    for i in range(n):
        mv = rootmoves[i]
        if okq >= 0 and move_to(mv) == okq:
            score = WIN + depth
        else:
            apply_classical(b, mv, child)
            score = -_ab_value(child, depth - 1, NEG_INF, -NEG_INF,
                               movebuf, boardbuf, stk, tbl)
        out_moves[i] = mv
        out_scores[i] = score
    return n


@njit(cache=True)
def count_requests_total(boards, tbl):
    total = 0
    buf = np.empty(MAXMOVES, dtype=np.int32)
    for i in range(boards.shape[0]):
        total += gen_requests(boards[i], buf, tbl) + 1  # plus Pass
    return total


@njit(cache=True)
def expand_filtered(boards, notice_sq, tbl):
    """All RBC successors (each request plus Pass) of each board whose
    capture square matches the observation; duplicates not removed.

    notice_sq == -1 keeps only capture-free successors; otherwise only
    successors capturing exactly at notice_sq survive.
    """
    total = count_requests_total(boards, tbl)
    out = np.empty((total, BOARD_LEN), dtype=np.uint8)
    buf = np.empty(MAXMOVES, dtype=np.int32)
    tmp = np.empty(BOARD_LEN, dtype=np.uint8)
    m = 0
    for i in range(boards.shape[0]):
        b = boards[i]
        n = gen_requests(b, buf, tbl)
        for j in range(-1, n):
            mv = PASS if j < 0 else buf[j]
            _, _, capsq = resolve_move(b, mv, tmp)
            if capsq == notice_sq:
                out[m] = tmp
                m += 1
    return out[:m]


@njit(cache=True)
def expand_with_capsq(boards, tbl):
    """All RBC successors with their capture squares (for branching counts)."""
    total = count_requests_total(boards, tbl)
    out = np.empty((total, BOARD_LEN), dtype=np.uint8)
    caps = np.empty(total, dtype=np.int32)
    buf = np.empty(MAXMOVES, dtype=np.int32)
    tmp = np.empty(BOARD_LEN, dtype=np.uint8)
    m = 0
    for i in range(boards.shape[0]):
        b = boards[i]
        n = gen_requests(b, buf, tbl)
        for j in range(-1, n):
            mv = PASS if j < 0 else buf[j]
            _, _, capsq = resolve_move(b, mv, tmp)
            out[m] = tmp
            caps[m] = capsq
            m += 1
    return out[:m], caps[:m]


@njit(cache=True)
def resolve_many(boards, mv):
    """Resolve one request against every board; returns successors and the
    (landed, capture_square) observation pair per board."""
    n = boards.shape[0]
    out = np.empty((n, BOARD_LEN), dtype=np.uint8)
    landed = np.empty(n, dtype=np.int32)
    caps = np.empty(n, dtype=np.int32)
    for i in range(n):
        _, ld, cs = resolve_move(boards[i], mv, out[i])
        landed[i] = ld
        caps[i] = cs
    return out, landed, caps
