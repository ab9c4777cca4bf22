"""Command line entry point.

Five subcommands map onto the harness run modes:

    photonfqh sweep-frequency  --config cfg.json --out runs/freq
    photonfqh sweep-interaction --config cfg.json --out runs/u
    photonfqh sweep-size       --config cfg.json --out runs/size
    photonfqh protocol         --config cfg.json --out runs/melt
    photonfqh lindblad-validate --config cfg.json --out runs/oracle

Exit status is 0 only when every sweep point converged (zero flagged rows
in results.csv), 1 when any row is flagged, and 2 on a config error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, PhotonFqhError
from .harness import MODES, load_config, run_mode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonfqh",
        description="driven-dissipative flux-lattice photon simulator",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run the {mode} mode")
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument("--out", required=True, help="output directory for manifest/results")
        p.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
        p.add_argument("--seed", type=int, default=0, help="seed recorded in the manifest")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        flagged = run_mode(args.mode, cfg, args.out, threads=args.threads, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PhotonFqhError as exc:
        print(f"run failed during setup: {exc}", file=sys.stderr)
        return 1
    if flagged:
        print(f"{flagged} flagged row(s); see results.csv and diagnostics.json", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
