"""``cqed-detect`` command line entry point."""
from __future__ import annotations

import argparse
import sys

from ..errors import CQEDError
from . import output
from .config import load_config
from .scenarios import SCENARIOS

HELP = {
    "decay": "survival of |e> vs the golden-rule exponential",
    "fig1": "normalized D_g click probability against the D_e efficiency",
    "chain": "outcome probabilities and conditional cavity states, with oracle deltas",
    "fidelity": "fidelity between miscounting and ideal detectors over a parameter sweep",
    "sample": "Monte Carlo click records drawn from the chain distribution",
    "validate": "check a configuration file and exit",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqed-detect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in HELP.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", required=True, metavar="PATH", help="TOML scenario file")
        if name == "validate":
            continue
        p.add_argument("--out", metavar="PATH", help="output file (default: config 'output' or stdout)")
        p.add_argument("--seed", type=int, help="override the configured RNG seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            mode = "dynamical" if cfg.dynamical else "phenomenological"
            print(f"ok: schema_version={cfg.schema_version} model={cfg.model.value} "
                  f"mode={mode} state={cfg.state_label}")
            return 0
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        table = SCENARIOS[args.command](cfg)
    except CQEDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = output.render(table, args.format)
    dest = args.out or cfg.output
    if dest:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
