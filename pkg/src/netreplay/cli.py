"""Command-line front end.

Two subcommands: ``analyze`` replays a trace and writes the evolution series,
``gen`` produces synthetic traces with known structure. The output directory
defaults to ``./netreplay-out`` and can be overridden by the NETREPLAY_OUT
environment variable; an explicit ``--out`` always wins.
"""

from __future__ import annotations

import argparse
import os
import sys

from netreplay.distances import BoundConfig, EstimatorConfig
from netreplay.generate import generate, write_stream
from netreplay.pipeline import STAT_GROUPS, RunConfig, run_evolution

DEFAULT_OUT = "netreplay-out"
OUT_ENV_VAR = "NETREPLAY_OUT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netreplay",
        description="Replay a timestamped link trace and track statistic evolution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="replay a trace and compute per-checkpoint statistics")
    an.add_argument("input", help="trace file, optionally .gz")
    an.add_argument("--checkpoints", type=int, default=100, metavar="K",
                    help="nominal number of checkpoints (default 100)")
    an.add_argument("--seed", type=int, default=0, metavar="S",
                    help="global random seed (default 0)")
    an.add_argument("--stats", default=",".join(STAT_GROUPS), metavar="GROUPS",
                    help="comma list from conn,deg,dist,tri (default all)")
    an.add_argument("--imin", type=int, default=10, metavar="I",
                    help="minimum samples before the distance estimator may stop")
    an.add_argument("--eps", type=float, default=0.1, metavar="E",
                    help="stability threshold for the distance estimator")
    an.add_argument("--gap", type=int, default=5, metavar="G",
                    help="diameter bracket width that counts as converged")
    an.add_argument("--min-iters", type=int, default=10, metavar="T",
                    help="minimum diameter bounding iterations")
    an.add_argument("--cap", type=int, default=100, metavar="C",
                    help="hard cap on diameter bounding iterations")
    an.add_argument("--out", default=None, metavar="DIR", help="output directory")
    an.add_argument("--dump-distributions", action="store_true",
                    help="also write the per-checkpoint degree distributions")
    an.add_argument("--no-cache", action="store_true",
                    help="ignore and do not write the binary stream cache")

    gen = sub.add_parser("gen", help="generate a synthetic trace")
    gen.add_argument(
        "model",
        choices=["path", "complete", "random-gnp", "preferential-attachment", "two-phase"],
    )
    gen.add_argument("--nodes", type=int, metavar="N", help="node count (path, complete, random-gnp, preferential-attachment)")
    gen.add_argument("--prob", type=float, metavar="P", help="link probability (random-gnp)")
    gen.add_argument("--links-per-node", type=int, metavar="K",
                     help="links per new node (preferential-attachment, two-phase)")
    gen.add_argument("--phase1-nodes", type=int, metavar="N1", help="phase 1 size (two-phase)")
    gen.add_argument("--phase2-nodes", type=int, metavar="N2", help="phase 2 size (two-phase)")
    gen.add_argument("--extra-per-node", type=int, metavar="R",
                     help="extra links per phase 2 node (two-phase)")
    gen.add_argument("--seed", type=int, default=0, metavar="S")
    gen.add_argument("--out", required=True, metavar="FILE", help="trace file to write")
    return parser


def _gen_params(args) -> dict:
    required = {
        "path": ["nodes"],
        "complete": ["nodes"],
        "random-gnp": ["nodes", "prob"],
        "preferential-attachment": ["nodes", "links_per_node"],
        "two-phase": ["phase1_nodes", "links_per_node", "phase2_nodes", "extra_per_node"],
    }[args.model]
    params = {}
    for name in required:
        value = getattr(args, name)
        if value is None:
            flag = "--" + name.replace("_", "-")
            raise SystemExit(f"netreplay gen {args.model}: missing {flag}")
        params[name] = value
    return params


def _run_analyze(args) -> int:
    out_dir = args.out or os.environ.get(OUT_ENV_VAR) or DEFAULT_OUT
    groups = frozenset(g.strip() for g in args.stats.split(",") if g.strip())
    config = RunConfig(
        input_path=args.input,
        nominal_checkpoints=args.checkpoints,
        stats=groups,
        estimator=EstimatorConfig(i_min=args.imin, epsilon=args.eps),
        bounds=BoundConfig(
            min_iterations=args.min_iters, gap_target=args.gap, iteration_cap=args.cap
        ),
        seed=args.seed,
        out_dir=out_dir,
        dump_distributions=args.dump_distributions,
        use_cache=not args.no_cache,
    )
    result = run_evolution(config)
    print(
        f"replayed {result.final_m} links over {result.final_n} nodes "
        f"at {len(result.checkpoints)} checkpoints -> {out_dir}"
    )
    return 0


def _run_gen(args) -> int:
    stream = generate(args.model, seed=args.seed, **_gen_params(args))
    write_stream(args.out, stream)
    print(f"wrote {len(stream[0])} events to {args.out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _run_analyze(args)
        return _run_gen(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"netreplay: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
