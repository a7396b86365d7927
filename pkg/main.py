#!/usr/bin/env python3
"""
LocalComplexity - learning the complexity of local quantum observations

Generates spin-chain observation datasets (Gibbs ensembles, Lindblad steady
states, random U(1) circuits), trains bottleneck autoencoders to count the
latent variables behind them, analyses the latent space and reconstructs
local Hamiltonians from thermal data.

Usage:
    python main.py gen-gge --nc 2 --n 500 --L 10 --seed 7
    python main.py sweep --dataset gge --latent-dims 0 1 2 3
    python main.py reconstruct --dataset gge --checkpoint model.npz --sweep sweep.csv
    python main.py --config run.json report --sweeps sweep.csv

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

import argparse
import json
import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.config.settings import DEFAULT_JOBS, DEFAULT_SEED, EXIT_CODES, LOG_LEVEL, OUTPUT_DIR
from src.errors import ArgumentError, ParseError, ToolkitError
from src.tools.pipeline_tools import TOOLS

S = argparse.SUPPRESS


def print_banner():
    """Print application banner."""
    print("""
╔═══════════════════════════════════════════════════════════════════════════════╗
║                                                                               ║
║            L O C A L   C O M P L E X I T Y   T O O L K I T                   ║
║         latent variables of local observations in spin chains                 ║
║                                                                               ║
╠═══════════════════════════════════════════════════════════════════════════════╣
║  Data:      gen-gge · gen-lindblad · gen-circuit                              ║
║  Learning:  train · sweep                                                     ║
║  Analysis:  intrinsic-dim · embed · correlate                                 ║
║  Physics:   reconstruct                                                       ║
║  Output:    report                                                            ║
╚═══════════════════════════════════════════════════════════════════════════════╝
    """)


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as ArgumentError."""

    def error(self, message):
        raise ArgumentError(f"{self.prog}: {message}")


def _global_flags() -> argparse.ArgumentParser:
    parent = UsageParser(add_help=False)
    parent.add_argument("--config", default=S, help="JSON file with default arguments")
    parent.add_argument("--seed", type=int, default=S, help=f"master seed (default {DEFAULT_SEED})")
    parent.add_argument("--output-dir", dest="output_dir", default=S,
                        help=f"artifact directory (default {OUTPUT_DIR})")
    parent.add_argument("--jobs", "-j", type=int, default=S, help="worker threads")
    parent.add_argument("--quiet", "-q", action="store_true", default=S, help="minimal output")
    parent.add_argument("--log-level", dest="log_level", default=S,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging level")
    return parent


def _network_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--dataset", "-d", default=S, help="dataset stem or .obs file")
    sub.add_argument("--width", type=int, default=S, help="hidden layer width")
    sub.add_argument("--depth", type=int, default=S, help="hidden layers per side")
    sub.add_argument("--output-activation", dest="output_activation", default=S,
                     choices=["linear", "tanh"])
    sub.add_argument("--batch-size", dest="batch_size", type=int, default=S)
    sub.add_argument("--steps", type=int, default=S)
    sub.add_argument("--eval-every", dest="eval_every", type=int, default=S)
    sub.add_argument("--lr", type=float, default=S)
    sub.add_argument("--train-fraction", dest="train_fraction", type=float, default=S)


def build_parser() -> argparse.ArgumentParser:
    parent = _global_flags()
    parser = UsageParser(
        description="LocalComplexity - latent variables of local quantum observations",
        parents=[parent],
    )
    subs = parser.add_subparsers(dest="command", parser_class=UsageParser)

    def add(name: str) -> argparse.ArgumentParser:
        return subs.add_parser(name, parents=[parent], help=TOOLS[name].description)

    p = add("gen-gge")
    p.add_argument("--nc", dest="n_charges", type=int, default=S, help="number of charges N_C")
    p.add_argument("--n", type=int, default=S, help="number of states")
    p.add_argument("--L", type=int, default=S, help="chain length")
    p.add_argument("--support", type=int, default=S)
    p.add_argument("--J", type=float, default=S)
    p.add_argument("--hx", dest="h_x", type=float, default=S)
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=S)
    p.add_argument("--name", default=S)

    p = add("gen-lindblad")
    p.add_argument("--kind", choices=["rotated", "structured"], default=S)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--N", type=int, default=S, help="chain length")
    p.add_argument("--model", choices=["tfim", "chaotic", "structured"], default=S)
    p.add_argument("--epsilon", type=float, default=S)
    p.add_argument("--support", type=int, default=S)
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=S)
    p.add_argument("--name", default=S)

    p = add("gen-circuit")
    p.add_argument("--n-initial", dest="n_initial", type=int, default=S)
    p.add_argument("--steps", type=int, default=S)
    p.add_argument("--L", type=int, default=S)
    p.add_argument("--support", type=int, default=S)
    p.add_argument("--record-steps", dest="record_steps", type=int, nargs="+", default=S)
    p.add_argument("--same-odd-gate", dest="fresh_odd_gate", action="store_false", default=S,
                   help="reuse the even-layer gate on odd links")
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=S)
    p.add_argument("--name", default=S)

    p = add("train")
    _network_flags(p)
    p.add_argument("--latent-dim", dest="latent_dim", type=int, default=S)
    p.add_argument("--name", default=S)

    p = add("sweep")
    _network_flags(p)
    p.add_argument("--latent-dims", dest="latent_dims", type=int, nargs="+", default=S)
    p.add_argument("--seeds", type=int, nargs="+", default=S)
    p.add_argument("--name", default=S)

    p = add("intrinsic-dim")
    p.add_argument("--dataset", "-d", default=S)
    p.add_argument("--checkpoint", default=S)
    p.add_argument("--discard", dest="discard_fraction", type=float, default=S)
    p.add_argument("--window", dest="windows", type=float, nargs=2, action="append", default=S,
                   metavar=("LO", "HI"))
    p.add_argument("--min-window-points", dest="min_window_points", type=int, default=S)
    p.add_argument("--name", default=S)

    p = add("embed")
    p.add_argument("--dataset", "-d", default=S)
    p.add_argument("--checkpoint", default=S)
    p.add_argument("--perplexity", type=float, default=S)
    p.add_argument("--iterations", type=int, default=S)
    p.add_argument("--color", nargs="+", default=S, help="annotations used for colouring")
    p.add_argument("--name", default=S)

    p = add("correlate")
    p.add_argument("--dataset", "-d", default=S)
    p.add_argument("--checkpoint", default=S)
    p.add_argument("--observable", default=S)
    p.add_argument("--direction", type=int, default=S)
    p.add_argument("--name", default=S)

    p = add("reconstruct")
    p.add_argument("--dataset", "-d", default=S)
    p.add_argument("--checkpoint", default=S)
    p.add_argument("--sweep", default=S, help="sweep table with N_L = 0 and 1")
    p.add_argument("--force", action="store_true", default=S, help="skip the sweep evidence check")
    p.add_argument("--mode", choices=["tangent", "pca1"], default=S)
    p.add_argument("--top-m", dest="top_m", type=int, default=S)
    p.add_argument("--candidates", nargs="+", default=S)
    p.add_argument("--L-oracle", dest="L_oracle", type=int, default=S)
    p.add_argument("--k", dest="k_neighbors", type=int, default=S)
    p.add_argument("--max-rows", dest="max_rows", type=int, default=S)
    p.add_argument("--name", default=S)

    p = add("report")
    p.add_argument("--sweeps", nargs="+", default=S)
    p.add_argument("--labels", nargs="+", default=S)
    p.add_argument("--name", default=S)
    return parser


def load_config(path: str, command: str) -> Dict[str, Any]:
    """Top-level scalar keys plus the section named after the subcommand."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ArgumentError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.msg, row=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise ParseError(path, "config must be a JSON object")
    merged = {k: v for k, v in data.items() if k not in TOOLS}
    section = data.get(command, {})
    if not isinstance(section, dict):
        raise ParseError(path, f"section {command!r} must be a JSON object")
    merged.update(section)
    return merged


def resolve_arguments(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags > config file > settings defaults."""
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "log_level")}
    merged: Dict[str, Any] = {"seed": DEFAULT_SEED, "output_dir": OUTPUT_DIR, "jobs": DEFAULT_JOBS}
    if getattr(args, "config", None):
        merged.update(load_config(args.config, args.command))
        merged.pop("log_level", None)
    merged.update(flags)
    return merged


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if not args.command:
            raise ArgumentError("a subcommand is required (see --help)")
        logging.basicConfig(
            level=getattr(logging, getattr(args, "log_level", LOG_LEVEL).upper(), logging.INFO),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        params = resolve_arguments(args)
        quiet = bool(params.get("quiet", False))
        if not quiet:
            print_banner()

        start_time = datetime.now()
        tool = TOOLS[args.command]()
        result = json.loads(tool.run(**params))
        duration = (datetime.now() - start_time).total_seconds()

        if not quiet:
            print(f"\n{'='*60}")
            print(f"✅ {args.command} complete ({duration:.1f} s)")
            for key, value in result.items():
                print(f"   {key}: {value}")
            print(f"{'='*60}\n")
        return EXIT_CODES["ok"]

    except ToolkitError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
