"""Command-line entry point: plan, generate or load a stream, replay,
and write the metrics/summary/plot artifacts to the output directory.

Exit codes: 0 clean run, 1 finished with violations, 2 bad usage.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, StreamError
from .pipeline import MODES, PipelineConfig, plan_parameters, run_pipeline
from .report import write_report
from .streams import generate_stream, read_stream


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dynmatch",
        description=(
            "Replay a bipartite update stream through the orientation, "
            "degree-bounded subgraph, and matching layers."
        ),
    )
    p.add_argument("--mode", choices=MODES, default="general")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--beta", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--alpha", type=int, default=1,
                   help="arboricity bound fed to the orientation cap")
    p.add_argument("--alpha-cap", type=int, default=None)
    p.add_argument("--m-max", type=int, default=4096,
                   help="edge budget behind the default beta preset")
    p.add_argument("--stream-kind", default="random",
                   choices=["random", "sliding_window", "forest_union",
                            "four_block", "three_block"])
    p.add_argument("--stream-file", default=None,
                   help="replay this update file instead of generating")
    p.add_argument("--n-left", type=int, default=None)
    p.add_argument("--n-right", type=int, default=None)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint-every", type=int, default=100)
    p.add_argument("--validate-every", type=int, default=1)
    p.add_argument("--out-dir", default="run_out")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--block", type=int, default=None)
    p.add_argument("--deterministic-timing", action="store_true",
                   help="report zero wall times so outputs are reproducible")
    p.add_argument("--no-plots", action="store_true")
    return p


def _stream_params(args, resolved) -> dict:
    n_left = args.n_left if args.n_left is not None else 60
    n_right = args.n_right if args.n_right is not None else 60
    kind = args.stream_kind
    if kind == "random":
        return {
            "n_left": n_left,
            "n_right": n_right,
            "steps": args.steps,
            "density": args.density,
        }
    if kind == "sliding_window":
        if args.window is None:
            raise ConfigError("sliding_window needs --window")
        return {
            "n_left": n_left,
            "n_right": n_right,
            "steps": args.steps,
            "window": args.window,
        }
    if kind == "forest_union":
        return {
            "n_left": n_left,
            "n_right": n_right,
            "steps": args.steps,
            "alpha": args.alpha,
        }
    if args.block is None:
        raise ConfigError(f"{kind} needs --block")
    if kind == "four_block":
        return {"block": args.block, "steps": args.steps}
    return {
        "block": args.block,
        "beta": resolved.beta,
        "lam": resolved.lam if resolved.lam is not None else 0.5,
        "steps": args.steps,
    }


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    cfg = PipelineConfig(
        mode=args.mode,
        eps=args.eps,
        beta=args.beta,
        lam=args.lam,
        alpha=args.alpha,
        alpha_cap=args.alpha_cap,
        m_max=args.m_max,
        seed=args.seed,
        checkpoint_every=args.checkpoint_every,
        validate_every=args.validate_every,
        n_left=args.n_left,
        n_right=args.n_right,
        deterministic_timing=args.deterministic_timing,
    )
    try:
        resolved = plan_parameters(cfg)
        if args.stream_file is not None:
            stream = read_stream(args.stream_file)
        else:
            stream = generate_stream(
                args.stream_kind, _stream_params(args, resolved), args.seed
            )
        result = run_pipeline(cfg, stream)
    except (ConfigError, StreamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    paths = write_report(result, args.out_dir, plots=not args.no_plots)
    s = result.summary
    print(
        f"mode={args.mode} eps={args.eps} beta={resolved.beta} "
        f"lam={resolved.lam} steps={s['steps']}"
    )
    print(
        f"final: m={s['final_m']} mu_G={s['final_mu_g']} "
        f"mu_H={s['final_mu_h']} matching={s['final_matching']} "
        f"ratio={s['final_ratio']:.4f}"
    )
    print(f"wrote {paths['metrics']} and {paths['summary']}")
    if result.violations:
        for line in result.violations[:5]:
            print(f"violation: {line}", file=sys.stderr)
        extra = len(result.violations) - 5
        if extra > 0:
            print(f"... and {extra} more", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
