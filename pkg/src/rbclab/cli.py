"""Command line front end: single games, tournaments, pass-probability
sweeps, and report re-aggregation.

Exit codes: 0 success, 2 configuration error, 3 engine error, 4 the game
ended by forfeit (play only).
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from .arbiter import DrawConfig, EndReason, play_game
from .bots import BOT_NAMES, build_bot
from .engine import EngineError
from .metrics import MetricsConfig
from .tournament import (
    BotSpec,
    ConfigError,
    EvaluatorConfig,
    TournamentConfig,
    pass_sweep,
    reaggregate,
    run,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ENGINE = 3
EXIT_FORFEIT = 4

ENGINE_ENV = "RBCLAB_ENGINE"


def _evaluator_config(args) -> EvaluatorConfig:
    command = args.engine or os.environ.get(ENGINE_ENV)
    depth = args.depth if args.depth is not None else (10 if command else 3)
    if command:
        return EvaluatorConfig("uci", depth=depth, command=command)
    return EvaluatorConfig("builtin", depth=depth)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--depth", type=int, default=None,
                   help="evaluator search depth (builtin default 3)")
    p.add_argument("--engine", default=None,
                   help=f"UCI engine command (or set ${ENGINE_ENV})")


def cmd_play(args) -> int:
    eval_cfg = _evaluator_config(args)
    rng = random.Random(args.seed)
    bots = []
    for name, prob in ((args.white, args.white_pass), (args.black, args.black_pass)):
        bot_rng = random.Random(rng.getrandbits(64))
        bots.append(build_bot(name, bot_rng, eval_cfg.build(), pass_prob=prob))
    white, black = bots
    if args.draws == "on":
        draw_cfg = DrawConfig.standard(args.max_fullmoves)
    elif args.draws == "off":
        draw_cfg = DrawConfig.disabled(args.max_fullmoves)
    else:
        draw_cfg = DrawConfig.auto(white.name, black.name, args.max_fullmoves)
    record = play_game(white, black, draw_cfg, args.seed)
    print(f"{record.white} vs {record.black}: {record.outcome.value}"
          f" ({record.reason.value}, {len(record.halfturns)} half-turns)")
    print(f"final: {record.final_fen}")
    if args.record:
        Path(args.record).write_text(record.to_jsonl())
        print(f"record written to {args.record}")
    return EXIT_FORFEIT if record.reason == EndReason.FORFEIT else EXIT_OK


def cmd_tournament(args) -> int:
    if args.config:
        cfg = TournamentConfig.from_json(Path(args.config).read_text())
    else:
        roster = tuple(BotSpec(n) for n in (args.roster.split(",") if args.roster
                                            else BOT_NAMES))
        cfg = TournamentConfig(roster=roster)
    overrides = {}
    if args.games is not None:
        overrides["games_per_pairing"] = args.games
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["out_dir"] = Path(args.out)
    if args.engine or args.depth is not None or not args.config:
        overrides["evaluator"] = _evaluator_config(args)
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    cfg.validate()
    report = run(cfg)
    sys.stdout.write(report.summary_csv())
    return EXIT_OK


def cmd_sweep(args) -> int:
    probs = [float(p) for p in args.probs.split(",") if p != ""]
    cfg = TournamentConfig(
        roster=(BotSpec("MHTBot"), BotSpec("RandomBot25")),
        games_per_pairing=max(2, args.games),
        master_seed=args.seed,
        evaluator=_evaluator_config(args),
        metrics=MetricsConfig(enabled=True, branch_enabled=False),
        max_fullmoves=args.max_fullmoves,
    )
    csv_text = pass_sweep(cfg, probs, games_per_prob=args.games)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(csv_text)
        print(f"wrote {out / 'sweep.csv'}")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_report(args) -> int:
    report = reaggregate(Path(args.out))
    sys.stdout.write(report.summary_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbclab",
        description="Reconnaissance blind chess games, tournaments, and metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="play one game")
    p.add_argument("--white", required=True)
    p.add_argument("--black", required=True)
    p.add_argument("--white-pass", type=float, default=None,
                   help="pass probability when white is a RandomBotX")
    p.add_argument("--black-pass", type=float, default=None)
    p.add_argument("--draws", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--max-fullmoves", type=int, default=200)
    p.add_argument("--record", default=None, help="write the game record here")
    _add_common(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("tournament", help="run a round-robin tournament")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--roster", default=None, help="comma-separated bot names")
    p.add_argument("--games", type=int, default=None,
                   help="games per unordered pairing (even)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="artifact directory")
    _add_common(p)
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("sweep", help="MHTBot vs RandomBotX pass sweep")
    p.add_argument("--probs", default="0,0.25,0.5,1.0")
    p.add_argument("--games", type=int, default=10, help="games per probability")
    p.add_argument("--max-fullmoves", type=int, default=60)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="re-aggregate CSVs from stored artifacts")
    p.add_argument("--out", required=True, help="tournament artifact directory")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineError as e:
        print(f"engine error: {e}", file=sys.stderr)
        return EXIT_ENGINE
    except FileNotFoundError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
