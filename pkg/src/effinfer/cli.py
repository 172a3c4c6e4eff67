"""Command-line entry points ``infer`` and ``infer-bench``.

Exit status: 0 on success, 2 for usage errors, 3 when the weights
degenerate (every particle or proposal has zero probability).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .components import DegenerateWeightsError, EmptyTraceError
from .harness import (
    ALGORITHMS,
    MODELS,
    RunConfig,
    bench,
    execute,
    format_records,
    loglog_slope,
    summary_lines,
)

EXIT_USAGE = 2
EXIT_DEGENERATE = 3


def _params(text: str) -> dict[str, str]:
    out = {}
    for item in filter(None, text.split(",")):
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, choices=sorted(MODELS))
    parser.add_argument("--params", type=_params, default={}, help="model parameters, k=v,k=v")
    parser.add_argument("--alg", required=True, choices=ALGORITHMS)
    parser.add_argument("--iters", type=int, default=1000, help="MH steps, or draws for simulate")
    parser.add_argument("--particles", type=int, default=100)
    parser.add_argument("--moves", type=int, default=1, help="SSMH moves per resample (rmpf)")
    parser.add_argument("--theta", default="", help="comma-separated tags proposed by pmh")
    parser.add_argument("--seed", type=int, required=True)


def _config(args, parser) -> RunConfig:
    try:
        return RunConfig(
            model=args.model,
            alg=args.alg,
            seed=args.seed,
            params=args.params,
            iters=args.iters,
            particles=args.particles,
            moves=args.moves,
            theta=tuple(t for t in args.theta.split(",") if t),
            burn_in=getattr(args, "burn_in", 0),
            thin=getattr(args, "thin", 1),
        )
    except ValueError as e:
        parser.error(str(e))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="infer", description="Run an inference algorithm on a validation model."
    )
    _common(parser)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    parser.add_argument("--burn-in", type=int, default=0, help="drop this many leading MH nodes")
    parser.add_argument("--thin", type=int, default=1, help="keep every k-th MH node")
    args = parser.parse_args(argv)
    cfg = _config(args, parser)
    try:
        result = execute(cfg)
    except DegenerateWeightsError as e:
        print(f"infer: degenerate weights: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (EmptyTraceError, ValueError) as e:
        print(f"infer: {e}", file=sys.stderr)
        return EXIT_USAGE
    args.out.write_text(format_records(result, args.format), encoding="utf-8", newline="")
    print("\n".join(summary_lines(result)))
    return 0


def bench_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="infer-bench", description="Time an algorithm across a geometric size sweep."
    )
    _common(parser)
    parser.add_argument("--sweep", required=True, choices=("iters", "particles", "observations"))
    parser.add_argument("--sizes", type=_int_list, required=True, help="e.g. 1000,2000,4000,8000")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)
    cfg = _config(args, parser)
    try:
        table = bench(cfg, args.sweep, args.sizes, args.repeats)
    except DegenerateWeightsError as e:
        print(f"infer-bench: degenerate weights: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as e:
        print(f"infer-bench: {e}", file=sys.stderr)
        return EXIT_USAGE
    print("size,mean_seconds")
    for size, secs in table:
        print(f"{size},{secs:.6f}")
    if len(table) > 1:
        print(f"# loglog_slope={loglog_slope(table):.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
