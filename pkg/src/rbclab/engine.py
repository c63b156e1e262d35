"""External engine evaluator speaking the universal chess interface over a
child process.  Positions an engine cannot score (king en prise, missing
king) and any engine failure fall back to the builtin evaluator; every
substitution is logged."""

from __future__ import annotations

import logging
import select
import shlex
import subprocess
from typing import Optional

from . import _kernel as K
from .board import Board, MoveRequest
from .bots import BuiltinEvaluator, Evaluator

__all__ = ["EngineError", "UciClient", "ExternalEngineEvaluator"]

log = logging.getLogger(__name__)


class EngineError(RuntimeError):
    """Engine process failed to start, respond, or answer in time."""


class UciClient:
    """Thin line-oriented client for one engine process.

    Reads go through a raw descriptor with manual line buffering; mixing
    select() with a buffered reader deadlocks once lines queue up in the
    Python-side buffer.
    """

    def __init__(self, command: str, timeout: float = 30.0):
        self.timeout = timeout
        self._buf = bytearray()
        try:
            self.proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                bufsize=0,
            )
        except OSError as e:
            raise EngineError(f"cannot start engine {command!r}: {e}") from e

    def send(self, line: str) -> None:
        if self.proc.poll() is not None:
            raise EngineError("engine process exited")
        try:
            self.proc.stdin.write((line + "\n").encode())
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise EngineError(f"engine pipe broken: {e}") from e

    def read_line(self) -> str:
        import os as _os
        import time as _time
        fd = self.proc.stdout.fileno()
        deadline = _time.monotonic() + self.timeout
        while b"\n" not in self._buf:
            remaining = deadline - _time.monotonic()
            if remaining <= 0:
                raise EngineError(f"engine silent for {self.timeout}s")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                raise EngineError(f"engine silent for {self.timeout}s")
            chunk = _os.read(fd, 65536)
            if chunk == b"":
                raise EngineError("engine closed its output")
            self._buf.extend(chunk)
        line, _, rest = bytes(self._buf).partition(b"\n")
        self._buf = bytearray(rest)
        return line.decode(errors="replace").strip()

    def expect(self, token: str) -> list[str]:
        seen = []
        while True:
            line = self.read_line()
            seen.append(line)
            if line.split(" ", 1)[0] == token or line == token:
                return seen

    def close(self) -> None:
        try:
            if self.proc.poll() is None:
                self.send("quit")
                self.proc.wait(timeout=3)
        except (EngineError, subprocess.TimeoutExpired):
            self.proc.kill()


def _king_en_prise(board: Board) -> bool:
    """True when the side to move could capture the opponent king right now;
    classical engines reject such positions."""
    arr = board.array()
    mover = int(arr[K.STM])
    okq = K.find_king(arr, 1 - mover)
    if okq < 0:
        return True
    return bool(K.is_attacked(arr, okq, mover, K.TABLES))


class ExternalEngineEvaluator(Evaluator):
    """Drives a UCI engine at fixed depth with one search thread and a fixed
    multi-PV width; deterministic for a fixed configuration."""

    def __init__(self, command: str, depth: int = 10, multipv: int = 5,
                 timeout: float = 30.0):
        self.command = command
        self.depth = depth
        self.multipv = multipv
        self.timeout = timeout
        self._client: Optional[UciClient] = None
        self._dead = False
        self._fallback = BuiltinEvaluator(depth=min(depth, 3))
        self.substitutions = 0
        self._best_cache: dict[bytes, tuple[MoveRequest, int]] = {}
        self._topk_cache: dict[tuple[bytes, int], list[tuple[MoveRequest, int]]] = {}

    # -- engine plumbing ----------------------------------------------------

    def _ensure(self) -> UciClient:
        if self._dead:
            raise EngineError("engine marked dead")
        if self._client is None:
            client = UciClient(self.command, self.timeout)
            client.send("uci")
            client.expect("uciok")
            client.send("setoption name Threads value 1")
            client.send(f"setoption name MultiPV value {self.multipv}")
            client.send("setoption name Ponder value false")
            client.send("isready")
            client.expect("readyok")
            self._client = client
        return self._client

    def close(self) -> None:
        if self._client is not None:
            self._client.close()
            self._client = None

    def _mark_dead(self, why: Exception) -> None:
        log.warning("engine failure (%s); builtin evaluator takes over", why)
        self._dead = True
        self.substitutions += 1
        self.close()

    def _analyse(self, board: Board) -> dict[int, tuple[str, int]]:
        """Run one fixed-depth search; returns multipv rank -> (move, score)."""
        client = self._ensure()
        client.send("ucinewgame")
        client.send("isready")
        client.expect("readyok")
        client.send(f"position fen {board.to_fen()}")
        client.send(f"go depth {self.depth}")
        ranked: dict[int, tuple[str, int]] = {}
        while True:
            line = client.read_line()
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "bestmove":
                return ranked
            if parts[0] != "info" or "pv" not in parts or "score" not in parts:
                continue
            try:
                depth = int(parts[parts.index("depth") + 1])
                if depth != self.depth:
                    continue
                rank = 1
                if "multipv" in parts:
                    rank = int(parts[parts.index("multipv") + 1])
                si = parts.index("score")
                if parts[si + 1] == "cp":
                    score = int(parts[si + 2])
                else:  # mate n
                    n = int(parts[si + 2])
                    score = K.WIN - n * 100 if n > 0 else -K.WIN - n * 100
                move = parts[parts.index("pv") + 1]
                ranked[rank] = (move, score)
            except (ValueError, IndexError):
                continue

    # -- evaluator surface -----------------------------------------------------

    def best_move(self, board: Board) -> tuple[MoveRequest, int]:
        key = board.payload
        hit = self._best_cache.get(key)
        if hit is None:
            hit = self._evaluate(board, 1)[0] if not self._use_fallback(board) else \
                self._fallback.best_move(board)
            self._best_cache[key] = hit
        return hit

    def top_k(self, board: Board, k: int) -> list[tuple[MoveRequest, int]]:
        key = (board.payload, k)
        hit = self._topk_cache.get(key)
        if hit is None:
            if self._use_fallback(board):
                hit = self._fallback.top_k(board, k)
            else:
                hit = self._evaluate(board, k)
            self._topk_cache[key] = hit
        return hit

    def _use_fallback(self, board: Board) -> bool:
        if self._dead:
            return True
        if _king_en_prise(board):
            self.substitutions += 1
            log.debug("position %s unsuitable for engine; builtin used",
                      board.to_fen())
            return True
        return False

    def _evaluate(self, board: Board, k: int) -> list[tuple[MoveRequest, int]]:
        try:
            ranked = self._analyse(board)
        except EngineError as e:
            self._mark_dead(e)
            return ([self._fallback.best_move(board)] if k == 1
                    else self._fallback.top_k(board, k))
        out = []
        for rank in sorted(ranked):
            move, score = ranked[rank]
            try:
                out.append((MoveRequest.parse(move), score))
            except ValueError:
                continue
            if len(out) >= k:
                break
        if not out:
            return ([self._fallback.best_move(board)] if k == 1
                    else self._fallback.top_k(board, k))
        return out
