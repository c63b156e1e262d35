"""Slow, independent classical-chess implementation used only as a test
oracle.  Dict-based position, straightforward scans, no shared code with
the package kernel."""

from __future__ import annotations

FILES = "abcdefgh"

W_PIECES = "PNBRQK"
B_PIECES = "pnbrqk"

KNIGHT_JUMPS = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
KING_STEPS = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
ROOK_DIRS = [(1, 0), (-1, 0), (0, 1), (0, -1)]
BISHOP_DIRS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


class Position:
    """Mutable classical position: {(file, rank): piece-letter}."""

    def __init__(self, board, white_to_move, castling, ep):
        self.board = board        # dict[(f, r)] = letter
        self.white_to_move = white_to_move
        self.castling = castling  # subset of "KQkq"
        self.ep = ep              # (f, r) or None

    @classmethod
    def from_fen(cls, fen):
        parts = fen.split()
        board = {}
        for r, row in enumerate(parts[0].split("/")):
            rank = 7 - r
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                else:
                    board[(f, rank)] = ch
                    f += 1
        ep = None
        if len(parts) > 3 and parts[3] != "-":
            ep = (FILES.index(parts[3][0]), int(parts[3][1]) - 1)
        castling = parts[2] if len(parts) > 2 and parts[2] != "-" else ""
        return cls(board, parts[1] == "w" if len(parts) > 1 else True, castling, ep)

    def to_fen(self):
        rows = []
        for rank in range(7, -1, -1):
            row = ""
            empty = 0
            for f in range(8):
                p = self.board.get((f, rank))
                if p is None:
                    empty += 1
                else:
                    if empty:
                        row += str(empty)
                        empty = 0
                    row += p
            if empty:
                row += str(empty)
            rows.append(row)
        ep = "-" if self.ep is None else FILES[self.ep[0]] + str(self.ep[1] + 1)
        cast = self.castling or "-"
        stm = "w" if self.white_to_move else "b"
        return f"{'/'.join(rows)} {stm} {cast} {ep} 0 1"

    def copy(self):
        return Position(dict(self.board), self.white_to_move, self.castling, self.ep)

    def is_white(self, sq):
        p = self.board.get(sq)
        return p is not None and p.isupper()

    def is_black(self, sq):
        p = self.board.get(sq)
        return p is not None and p.islower()

    def mine(self, sq):
        return self.is_white(sq) if self.white_to_move else self.is_black(sq)

    def theirs(self, sq):
        return self.is_black(sq) if self.white_to_move else self.is_white(sq)


def on_board(f, r):
    return 0 <= f < 8 and 0 <= r < 8


def attacked_by(pos, sq, by_white):
    """Is sq attacked by the given color?"""
    f0, r0 = sq
    pawn_dr = -1 if by_white else 1
    pawn = "P" if by_white else "p"
    for df in (-1, 1):
        s = (f0 + df, r0 + pawn_dr)
        if on_board(*s) and pos.board.get(s) == pawn:
            return True
    knight = "N" if by_white else "n"
    for df, dr in KNIGHT_JUMPS:
        s = (f0 + df, r0 + dr)
        if on_board(*s) and pos.board.get(s) == knight:
            return True
    king = "K" if by_white else "k"
    for df, dr in KING_STEPS:
        s = (f0 + df, r0 + dr)
        if on_board(*s) and pos.board.get(s) == king:
            return True
    rook, queen = ("R", "Q") if by_white else ("r", "q")
    for df, dr in ROOK_DIRS:
        f, r = f0 + df, r0 + dr
        while on_board(f, r):
            p = pos.board.get((f, r))
            if p is not None:
                if p in (rook, queen):
                    return True
                break
            f += df
            r += dr
    bishop = "B" if by_white else "b"
    for df, dr in BISHOP_DIRS:
        f, r = f0 + df, r0 + dr
        while on_board(f, r):
            p = pos.board.get((f, r))
            if p is not None:
                if p in (bishop, queen):
                    return True
                break
            f += df
            r += dr
    return False


def king_square(pos, white):
    target = "K" if white else "k"
    for sq, p in pos.board.items():
        if p == target:
            return sq
    return None


def pseudo_moves(pos):
    """(from, to, promo) triples; promo is a lowercase letter or None."""
    out = []
    fwd = 1 if pos.white_to_move else -1
    start_rank = 1 if pos.white_to_move else 6
    last_rank = 7 if pos.white_to_move else 0
    for (f, r), p in sorted(pos.board.items()):
        if pos.white_to_move != p.isupper():
            continue
        kind = p.lower()
        if kind == "p":
            one = (f, r + fwd)
            if on_board(*one) and one not in pos.board:
                if one[1] == last_rank:
                    for promo in "nbrq":
                        out.append(((f, r), one, promo))
                else:
                    out.append(((f, r), one, None))
                two = (f, r + 2 * fwd)
                if r == start_rank and two not in pos.board:
                    out.append(((f, r), two, None))
            for df in (-1, 1):
                d = (f + df, r + fwd)
                if not on_board(*d):
                    continue
                if pos.theirs(d):
                    if d[1] == last_rank:
                        for promo in "nbrq":
                            out.append(((f, r), d, promo))
                    else:
                        out.append(((f, r), d, None))
                elif pos.ep is not None and d == pos.ep:
                    out.append(((f, r), d, None))
        elif kind == "n":
            for df, dr in KNIGHT_JUMPS:
                d = (f + df, r + dr)
                if on_board(*d) and not pos.mine(d):
                    out.append(((f, r), d, None))
        elif kind == "k":
            for df, dr in KING_STEPS:
                d = (f + df, r + dr)
                if on_board(*d) and not pos.mine(d):
                    out.append(((f, r), d, None))
            home_rank = 0 if pos.white_to_move else 7
            rights = ("K", "Q") if pos.white_to_move else ("k", "q")
            rook = "R" if pos.white_to_move else "r"
            if (f, r) == (4, home_rank):
                if (rights[0] in pos.castling and pos.board.get((7, home_rank)) == rook
                        and (5, home_rank) not in pos.board and (6, home_rank) not in pos.board):
                    out.append(((f, r), (6, home_rank), None))
                if (rights[1] in pos.castling and pos.board.get((0, home_rank)) == rook
                        and all((x, home_rank) not in pos.board for x in (1, 2, 3))):
                    out.append(((f, r), (2, home_rank), None))
        else:
            dirs = (ROOK_DIRS if kind == "r"
                    else BISHOP_DIRS if kind == "b"
                    else ROOK_DIRS + BISHOP_DIRS)
            for df, dr in dirs:
                ff, rr = f + df, r + dr
                while on_board(ff, rr):
                    if pos.mine((ff, rr)):
                        break
                    out.append(((f, r), (ff, rr), None))
                    if (ff, rr) in pos.board:
                        break
                    ff += df
                    rr += dr
    return out


def apply_move(pos, move):
    """Standard make-move; returns a new Position."""
    (f0, r0), (f1, r1), promo = move
    new = pos.copy()
    p = new.board.pop((f0, r0))
    kind = p.lower()
    new.ep = None
    if kind == "p":
        if (f1, r1) == pos.ep and f1 != f0 and (f1, r1) not in pos.board:
            del new.board[(f1, r0)]  # en passant victim stands beside us
        if abs(r1 - r0) == 2:
            new.ep = (f0, (r0 + r1) // 2)
        if r1 in (0, 7):
            promo = promo or "q"
            p = promo.upper() if p.isupper() else promo.lower()
    if kind == "k" and abs(f1 - f0) == 2:
        home = r0
        if f1 == 6:
            rook = new.board.pop((7, home))
            new.board[(5, home)] = rook
        else:
            rook = new.board.pop((0, home))
            new.board[(3, home)] = rook
    new.board[(f1, r1)] = p
    rights = ""
    for ch in new.castling:
        home = 0 if ch.isupper() else 7
        king = "K" if ch.isupper() else "k"
        rook_file = 7 if ch.lower() == "k" else 0
        rook = "R" if ch.isupper() else "r"
        if new.board.get((4, home)) == king and new.board.get((rook_file, home)) == rook:
            rights += ch
    new.castling = rights
    new.white_to_move = not pos.white_to_move
    return new


def legal_moves(pos):
    """Strict classical legality."""
    out = []
    for move in pseudo_moves(pos):
        (f0, r0), (f1, r1), _ = move
        piece = pos.board[(f0, r0)]
        if piece.lower() == "k" and abs(f1 - f0) == 2:
            mid = ((f0 + f1) // 2, r0)
            if (attacked_by(pos, (f0, r0), not pos.white_to_move)
                    or attacked_by(pos, mid, not pos.white_to_move)):
                continue
        child = apply_move(pos, move)
        ks = king_square(child, pos.white_to_move)
        if ks is not None and not attacked_by(child, ks, child.white_to_move):
            out.append(move)
    return out


def move_uci(move):
    (f0, r0), (f1, r1), promo = move
    s = FILES[f0] + str(r0 + 1) + FILES[f1] + str(r1 + 1)
    return s + promo if promo else s


def perft(pos, depth):
    if depth == 0:
        return 1
    total = 0
    for move in legal_moves(pos):
        total += perft(apply_move(pos, move), depth - 1)
    return total
