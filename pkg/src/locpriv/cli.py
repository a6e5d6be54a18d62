"""Command-line interface.

Subcommands: ``ingest`` (PLT directory to binned corpus), ``simulate``
(config to results table), ``attack`` (protection report), ``metrics``
(single-instance entropy calculator), and ``demo-fig4`` (built-in worked
example of posterior propagation).  Exit codes: 0 success, 1 usage error,
2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import CellOutOfGrid, LocPrivError
from .geolife import bin_trajectories, parse_plt, write_corpus
from .grid import GridSpec, HistoryModel, LocationSet, normalized_priors
from .metrics import (
    cell_entropy,
    entropy,
    posterior_pair,
    transition_entropy_pair,
)
from .results import emit_results, format_results
from .simulation import CorpusSource, config_history, run_experiment

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract reserves 2 for data."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _cells_arg(text: str) -> tuple[int, ...]:
    try:
        cells = tuple(int(c) for c in text.split(",") if c)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad cell list {text!r}") from exc
    if not cells:
        raise argparse.ArgumentTypeError("cell list is empty")
    return cells


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML experiment config file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--reps", type=int, help="override config repetitions")
    p.add_argument("--grid-n", type=int, help="override grid side length")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument(
        "--format", choices=("csv", "long"), default="csv", dest="fmt",
        help="results layout (default csv)",
    )


def _load_cfg(args: argparse.Namespace):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.reps is not None:
        cfg = dataclasses.replace(cfg, repetitions=args.reps)
    if args.grid_n is not None:
        cfg = dataclasses.replace(
            cfg, grid=dataclasses.replace(cfg.grid, n=args.grid_n)
        )
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="locpriv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_ing = sub.add_parser("ingest", help="bin PLT GPS logs into a corpus")
    p_ing.add_argument("plt_dir", help="directory scanned recursively for .plt")
    p_ing.add_argument("--out", required=True, help="corpus file to write")
    p_ing.add_argument("--grid-n", type=int, default=100)
    p_ing.add_argument(
        "--origin-lat", type=float, required=True,
        help="latitude of the grid's south-west corner",
    )
    p_ing.add_argument(
        "--origin-lon", type=float, required=True,
        help="longitude of the grid's south-west corner",
    )
    p_ing.add_argument("--cell-size-km", type=float, default=0.01)
    p_ing.add_argument(
        "--gap-minutes", type=float, default=20.0,
        help="time gap that splits a trajectory",
    )

    p_sim = sub.add_parser("simulate", help="run the configured benchmark")
    _add_common(p_sim)

    p_att = sub.add_parser(
        "attack", help="run the decoder over generated trajectories"
    )
    _add_common(p_att)
    p_att.add_argument(
        "--corpus", help="corpus file overriding the config history source"
    )

    p_met = sub.add_parser(
        "metrics", help="entropy calculator for one location set"
    )
    _add_common(p_met)
    p_met.add_argument(
        "--cells", type=_cells_arg, required=True,
        help="comma-separated cells; the first is the real location",
    )
    p_met.add_argument(
        "--prev", type=_cells_arg,
        help="previous location set for the transition-entropy",
    )

    sub.add_parser(
        "demo-fig4",
        help="print the built-in worked example of posterior propagation",
    )
    return parser


def _cmd_ingest(args: argparse.Namespace) -> int:
    grid = GridSpec(
        n=args.grid_n,
        origin_lat=args.origin_lat,
        origin_lon=args.origin_lon,
        cell_size_km=args.cell_size_km,
    )
    files = sorted(Path(args.plt_dir).rglob("*.plt"))
    if not files:
        print(f"no .plt files under {args.plt_dir}", file=sys.stderr)
        return 2
    groups = []
    skipped = 0
    for f in files:
        parts = f.parts
        user = parts[parts.index("Trajectory") - 1] if "Trajectory" in parts else f.stem
        try:
            groups.append((user, parse_plt(f)))
        except LocPrivError as exc:
            logger.warning("skipping %s: %s", f, exc)
            skipped += 1
    records = bin_trajectories(groups, grid, gap_seconds=args.gap_minutes * 60.0)
    write_corpus(records, args.out)
    print(
        f"parsed {len(files) - skipped} of {len(files)} files, "
        f"wrote {len(records)} records to {args.out}"
    )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    rows = run_experiment(cfg)
    if args.out:
        emit_results(rows, args.out, args.fmt)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(format_results(rows, args.fmt))
    return 0


def _cmd_attack(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    if args.corpus:
        cfg = dataclasses.replace(cfg, history_source=CorpusSource(args.corpus))
    rows = run_experiment(cfg)
    if args.out:
        emit_results(rows, args.out, args.fmt)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        print("algorithm k length mean_protection_rate")
        for r in rows:
            print(
                f"{r.algorithm} {r.k} {r.path_length} "
                f"{r.mean_protection_rate:.4f}"
            )
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    h = config_history(cfg)
    for c in args.cells + (args.prev or ()):
        if not cfg.grid.contains(c):
            raise CellOutOfGrid(
                f"cell {c} outside the {cfg.grid.n}x{cfg.grid.n} grid"
            )
    ls = LocationSet(cells=args.cells, real_index=0)
    print(f"cells: {','.join(str(c) for c in ls.cells)}")
    priors = normalized_priors(h, ls)
    print(f"normalized priors: {np.array2string(priors, precision=6)}")
    print(f"cell entropy (raw): {cell_entropy(h, ls):.6f} bits")
    print(f"cell entropy (normalized): {cell_entropy(h, ls, normalized=True):.6f} bits")
    if args.prev:
        prev = LocationSet(cells=args.prev, real_index=0)
        post = posterior_pair(h, prev, normalized_priors(h, prev), ls)
        print(f"posterior from prev: {np.array2string(post, precision=6)}")
        print(
            f"transition entropy: {transition_entropy_pair(h, prev, ls):.6f} bits"
        )
    return 0


def _cmd_demo(args: argparse.Namespace) -> int:
    # 2x2 grid, three active cells: counts chosen so the within-set priors
    # are (3/5, 1/5, 1/5) and the three transition rows are
    # (1/3,1/3,1/3), (1/4,2/4,1/4), (1/4,3/4,0).
    grid = GridSpec(n=2)
    h = HistoryModel(
        grid=grid,
        query_count=np.array([3, 1, 1, 0], dtype=np.int64),
        transitions={
            0: {0: 1, 1: 1, 2: 1},
            1: {0: 1, 1: 2, 2: 1},
            2: {0: 1, 1: 3},
        },
        total_queries=5,
    )
    prev = LocationSet(cells=(0, 1, 2), real_index=0)
    nxt = LocationSet(cells=(0, 1, 2), real_index=0)
    priors = normalized_priors(h, prev)
    post = posterior_pair(h, prev, priors, nxt)
    print("worked example: one posterior-propagation step")
    print(f"normalized priors of the previous set: {priors}")
    print(f"posterior of the next set:             {post}")
    print("expected:                              [0.3  0.45 0.25]")
    print(f"transition entropy: {entropy(post):.6f} bits")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "simulate": _cmd_simulate,
    "attack": _cmd_attack,
    "metrics": _cmd_metrics,
    "demo-fig4": _cmd_demo,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except LocPrivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
