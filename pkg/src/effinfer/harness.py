"""Run any algorithm on any validation model and turn the result into rows.

Used by the ``infer`` and ``infer-bench`` commands; importable for scripts.
"""

from __future__ import annotations

import csv
import gc
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .components import log_mean_exp, normalise
from .metropolis import acceptance_rate, im, ssmh
from .model import simulate
from .models import (
    HMMData,
    coin_flip,
    hmm_series,
    lin_gauss_hmm,
    lin_regr,
    line_data,
)
from .particle import mulpfilter, pmh, rmpf
from .rng import RandomSource

__all__ = [
    "ALGORITHMS",
    "MODELS",
    "RunConfig",
    "RunResult",
    "execute",
    "format_records",
    "summary_lines",
    "bench",
    "loglog_slope",
]

ALGORITHMS = ("simulate", "im", "ssmh", "mpf", "rmpf", "pmh")


@dataclass(frozen=True)
class ModelSpec:
    build: Callable[[dict], Any]
    defaults: dict
    flatten: Callable[[Any], dict]
    theta: tuple[str, ...]
    size_param: str  # swept by ``--sweep observations``


def _hmm(params):
    return lin_gauss_hmm(HMMData(hmm_series(int(params["T"])), params["q"], params["r"]))


def _flatten_path(path):
    cols = {"x0#0": path[0]}
    for i, x in enumerate(path[1:]):
        cols[f"x#{i}"] = x
    return cols


MODELS: dict[str, ModelSpec] = {
    "coinflip": ModelSpec(
        lambda p: coin_flip(int(p["heads"]), int(p["tails"])),
        {"heads": 8, "tails": 2},
        lambda p: {"p#0": p},
        ("p",),
        "heads",
    ),
    "linregr": ModelSpec(
        lambda p: lin_regr(line_data(int(p["n"]), p["slope"], p["intercept"])),
        {"n": 8, "slope": 3.0, "intercept": 0.0},
        lambda mc: {"m#0": mc[0], "c#0": mc[1]},
        ("m", "c"),
        "n",
    ),
    "hmm": ModelSpec(_hmm, {"T": 5, "q": 1.0, "r": 1.0}, _flatten_path, ("x0",), "T"),
}


@dataclass(frozen=True)
class RunConfig:
    model: str
    alg: str
    seed: int
    params: dict = field(default_factory=dict)
    iters: int = 1000
    particles: int = 100
    moves: int = 1
    theta: tuple[str, ...] = ()
    burn_in: int = 0
    thin: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.alg not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.alg!r}; choose from {', '.join(ALGORITHMS)}")
        spec = MODELS[self.model]
        unknown = set(self.params) - set(spec.defaults)
        if unknown:
            raise ValueError(
                f"unknown parameter(s) {', '.join(sorted(unknown))} for {self.model}; "
                f"known: {', '.join(spec.defaults)}"
            )
        if self.iters < 0 or self.particles < 1 or self.moves < 0:
            raise ValueError("iters/moves must be >= 0 and particles >= 1")
        if self.burn_in < 0 or self.thin < 1:
            raise ValueError("burn-in must be >= 0 and thin >= 1")

    def model_params(self) -> dict:
        spec = MODELS[self.model]
        out = dict(spec.defaults)
        for k, v in self.params.items():
            out[k] = type(spec.defaults[k])(v)
        return out


@dataclass
class RunResult:
    config: RunConfig
    rows: list[dict]  # one per retained sample/particle, oldest first
    weights: list[float]  # log weight per row
    acceptance: float | None = None
    log_evidence: float | None = None
    weighted: bool = False  # rows are importance-weighted particles


def _run_alg(cfg: RunConfig, model, src: RandomSource):
    alg = cfg.alg
    if alg == "simulate":
        return [simulate(model, child) for child in src.split(cfg.iters)]
    if alg == "im":
        return im(cfg.iters, model, src)
    if alg == "ssmh":
        return ssmh(cfg.iters, {}, model, src)
    if alg == "mpf":
        return mulpfilter(cfg.particles, model, src)
    if alg == "rmpf":
        return rmpf(cfg.particles, cfg.moves, model, src)
    theta = cfg.theta or MODELS[cfg.model].theta
    return pmh(cfg.iters, cfg.particles, theta, model, src)


def execute(cfg: RunConfig) -> RunResult:
    spec = MODELS[cfg.model]
    model = spec.build(cfg.model_params())
    out = _run_alg(cfg, model, RandomSource(cfg.seed))
    flatten = spec.flatten

    if cfg.alg == "simulate":
        rows = [{"sample_index": i, "log_weight": 0.0, **flatten(x)} for i, x in enumerate(out)]
        return RunResult(cfg, rows, [0.0] * len(rows))

    if cfg.alg in ("im", "ssmh", "pmh"):
        chain = out[::-1]
        acc = acceptance_rate(chain)
        rows, weights = [], []
        for i in range(cfg.burn_in, len(chain), cfg.thin):
            x, (w, _) = chain[i]
            row = {"sample_index": i}
            if cfg.alg == "ssmh":
                total = math.fsum(w.values())
                row["log_weight"] = total
                row.update({f"lp:{a}": lp for a, lp in w.items()})
                weights.append(total)
            else:
                row["log_weight"] = w
                weights.append(w)
            row.update(flatten(x))
            rows.append(row)
        return RunResult(cfg, rows, weights, acceptance=acc)

    weights = [w[0] if cfg.alg == "rmpf" else w for _, w in out]
    rows = [
        {"sample_index": i, "log_weight": w, **flatten(x)}
        for i, ((x, _), w) in enumerate(zip(out, weights))
    ]
    return RunResult(cfg, rows, weights, log_evidence=log_mean_exp(weights), weighted=True)


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _columns(rows: list[dict]) -> list[str]:
    cols: dict[str, None] = {}
    for row in rows:
        for k in row:
            cols.setdefault(k, None)
    return list(cols)


def format_records(result: RunResult, fmt: str = "csv") -> str:
    rows = result.rows
    if fmt == "jsonl":
        return "".join(json.dumps(row) + "\n" for row in rows)
    if fmt != "csv":
        raise ValueError(f"unknown output format {fmt!r}")
    buf = io.StringIO()
    cols = _columns(rows)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_fmt(row[c]) if c in row else "" for c in cols])
    return buf.getvalue()


def summary_lines(result: RunResult) -> list[str]:
    cfg = result.config
    lines = [f"model={cfg.model} alg={cfg.alg} seed={cfg.seed} records={len(result.rows)}"]
    if result.acceptance is not None:
        lines.append(f"acceptance_rate={result.acceptance:.4f}")
    if result.log_evidence is not None:
        lines.append(f"log_evidence={result.log_evidence:.6f}")
    if not result.rows:
        return lines
    if result.weighted:
        probs = np.exp(normalise(result.weights))
    else:
        probs = np.full(len(result.rows), 1.0 / len(result.rows))
    skip = {"sample_index", "log_weight"}
    for col in _columns(result.rows):
        if col in skip or col.startswith("lp:"):
            continue
        vals = np.array([row[col] for row in result.rows], dtype=float)
        mean = float(probs @ vals)
        std = float(np.sqrt(max(probs @ (vals - mean) ** 2, 0.0)))
        lines.append(f"{col}: mean={mean:.6f} std={std:.6f}")
    return lines


# -- scaling ----------------------------------------------------------------


def _sized(cfg: RunConfig, sweep: str, size: int) -> RunConfig:
    if sweep == "iters":
        return replace(cfg, iters=size)
    if sweep == "particles":
        return replace(cfg, particles=size)
    if sweep == "observations":
        key = MODELS[cfg.model].size_param
        return replace(cfg, params={**cfg.params, key: size})
    raise ValueError(f"unknown sweep {sweep!r}; choose iters, particles or observations")


def bench(cfg: RunConfig, sweep: str, sizes: list[int], repeats: int = 3) -> list[tuple[int, float]]:
    """Mean wall-clock seconds of the algorithm alone at each size.

    The garbage collector is paused while timing, as ``timeit`` does.
    """
    table = []
    for size in sizes:
        sized = _sized(cfg, sweep, size)
        model = MODELS[sized.model].build(sized.model_params())
        times = []
        for rep in range(repeats):
            src = RandomSource(sized.seed + rep)
            gc.collect()
            was_enabled = gc.isenabled()
            gc.disable()
            try:
                t0 = time.perf_counter()
                _run_alg(sized, model, src)
                times.append(time.perf_counter() - t0)
            finally:
                if was_enabled:
                    gc.enable()
        table.append((size, sum(times) / len(times)))
    return table


def loglog_slope(table: list[tuple[int, float]]) -> float:
    x = np.log([s for s, _ in table])
    y = np.log([t for _, t in table])
    return float(np.polyfit(x, y, 1)[0])
