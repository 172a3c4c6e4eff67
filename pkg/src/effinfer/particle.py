"""Particle filtering as a skeleton plus swappable Resample handlers.

:func:`pfilter` steps every particle to its next observation, stops once all
have finished, and otherwise asks for a Resample. Instances supply the
stepper and the Resample handler:

* :func:`mulpfilter`: multinomial resampling, weights are log-probs.
* :func:`rmpf`: resample-move; each resampled particle is rejuvenated by
  single-site MH over its trace.
* :func:`pmh`: Independence Metropolis whose model runs are weighted by a
  multinomial particle filter over the non-proposed sites.
"""

from __future__ import annotations

import warnings
from typing import Any, Callable, Iterable, Sequence, TypeVar

from ._debug import LockstepError, debug_enabled
from .components import (
    _advance_stops,
    advance,
    categorical,
    categorical_many,
    done,
    log_mean_exp,
    normalise,
    reuse_trace,
    suspend_after,
)
from .effects import (
    Computation,
    Effect,
    Request,
    Value,
    handle_deep,
    handle_stateful,
    perform,
    run_random,
)
from .metropolis import handle_propose_im, mh, ssmh
from .model import Addr, Model, assign_addresses, default_observe, default_sample
from .rng import RandomSource, as_source

__all__ = [
    "ResampleEffect",
    "Resample",
    "pfilter",
    "handle_resample_mul",
    "step_model_mul",
    "mulpfilter",
    "handle_resample_rmpf",
    "step_model_rmpf",
    "rmpf",
    "exec_model_pmh",
    "pmh",
    "log_evidence",
]

A = TypeVar("A")
W = TypeVar("W")

Particle = tuple  # (Model, weight)
ModelStep = Callable[[Particle], Callable[[RandomSource], Particle]]


class ResampleEffect(Effect):
    __slots__ = ()


class Resample(ResampleEffect):
    __slots__ = ("particles",)

    def __init__(self, particles: list[Particle]):
        self.particles = particles

    def __repr__(self):
        return f"Resample(<{len(self.particles)} particles>)"


def _step_all(step: ModelStep, pws: list[Particle]):
    def action(src):
        children = src.split(len(pws))
        if not debug_enabled():
            return [step(pw)(s) for pw, s in zip(pws, children)]
        out = []
        stops = set()
        for pw, s in zip(pws, children):
            seen = []
            token = _advance_stops.set(seen)
            try:
                out.append(step(pw)(s))
            finally:
                _advance_stops.reset(token)
            stops.update(seen)
        if len(stops) > 1:
            raise LockstepError(
                "particles stopped at different observe sites: "
                + ", ".join(sorted(map(str, stops)))
            )
        return out

    return action


def pfilter(n: int, w0: W, step: ModelStep, model: Model[A]) -> Computation[list[tuple[A, W]]]:
    """Run ``n`` copies of ``model`` from weight ``w0`` until all finish.

    Each round steps every particle once (one external action, per-particle
    child sources) and then either returns ``[(value, weight)]`` or issues
    one Resample. Leaves the Resample and Random effects unhandled.
    """
    if n < 1:
        raise ValueError(f"particle count must be at least 1, got {n}")

    def round_(pws):
        return perform(_step_all(step, pws)).bind(after_step)

    def after_step(pws):
        results = done(pws)
        if results is not None:
            return Value(results)
        return Request(Resample(pws), round_)

    return round_([(model, w0)] * n)


def log_evidence(results: Iterable[tuple[Any, Any]]) -> float:
    """Log mean of the final particle weights (the first component of a
    ``(weight, trace)`` state)."""
    ws = [w[0] if isinstance(w, tuple) else w for _, w in results]
    return log_mean_exp(ws)


# -- multinomial ------------------------------------------------------------


def _mul_hop(op, k):
    pws = op.particles
    ws = [w for _, w in pws]
    ws_norm = normalise(ws)
    w_bar = log_mean_exp(ws)
    return perform(lambda src: categorical_many(ws_norm, len(pws), src)).bind(
        lambda idxs: k([(pws[i][0], w_bar) for i in idxs])
    )


def handle_resample_mul():
    """Multinomial resampling; survivors all carry the log mean weight."""
    return handle_deep(ResampleEffect, Value, _mul_hop)


_sample_h = default_sample()


def step_model_mul(pw: Particle) -> Callable[[RandomSource], Particle]:
    p, w = pw
    return lambda src: run_random(_sample_h(advance(w, p)), src)


def mulpfilter(n: int, model: Model[A], seed: int | RandomSource) -> list[tuple[A, float]]:
    pf = pfilter(n, 0.0, step_model_mul, assign_addresses(model))
    return run_random(handle_resample_mul()(pf), as_source(seed))


# -- resample-move ----------------------------------------------------------


def handle_resample_rmpf(m: int, model: Model[A]):
    """Multinomially resample particle traces, then move each with ``m``
    single-site MH steps over ``model`` suspended after the current
    observation (which the moves condition on). State counts the Resamples
    seen so far.

    ``model`` must already carry addresses (see :func:`assign_addresses`).
    """

    def hop(t, op, k):
        pws = op.particles
        ws = [state[0] for _, state in pws]
        taus = [state[1] for _, state in pws]
        ws_norm = normalise(ws)
        w_bar = log_mean_exp(ws)
        # inclusive: the move targets the posterior given observations 0..t,
        # matching the weights; the exclusive form would leave out y_t
        model_t = suspend_after(t, model, inclusive=True)

        def move(src):
            idxs = categorical_many(ws_norm, len(taus), src)
            moved = []
            for i, child in zip(idxs, src.split(len(idxs))):
                p_mov, (_, tau_mov) = ssmh(m, taus[i], model_t, child)[0]
                moved.append((p_mov, (w_bar, tau_mov)))
            return moved

        return perform(move).bind(lambda moved: k(t + 1, moved))

    return handle_stateful(ResampleEffect, 0, lambda _, x: Value(x), hop)


def step_model_rmpf(pw: Particle) -> Callable[[RandomSource], Particle]:
    p, (w, tau) = pw

    def action(src):
        (p_next, w_next), tau_next = run_random(reuse_trace(tau)(advance(w, p)), src)
        return (p_next, (w_next, tau_next))

    return action


def rmpf(n: int, m: int, model: Model[A], seed: int | RandomSource) -> list[tuple[A, tuple]]:
    model = assign_addresses(model)
    pf = pfilter(n, (0.0, {}), step_model_rmpf, model)
    return run_random(handle_resample_rmpf(m, model)(pf), as_source(seed))


# -- particle Metropolis-Hastings -------------------------------------------


def exec_model_pmh(n: int):
    """Model executor weighting a run under ``tau_theta`` by an ``n``-particle
    multinomial filter; sites outside ``tau_theta`` are drawn fresh per
    particle. Returns ``tau_theta`` itself as the node's trace."""

    def exec_(tau_theta: dict, model: Model[A]):
        sample_h = reuse_trace(tau_theta)

        def step(pw):
            p, w = pw
            return lambda src: run_random(sample_h(advance(w, p)), src)[0]

        def action(src):
            pf = handle_resample_mul()(pfilter(n, 0.0, step, assign_addresses(model)))
            results = run_random(pf, src)
            ws = [w for _, w in results]
            idx = categorical(normalise(ws), src)
            return (results[idx][0], (log_mean_exp(ws), tau_theta))

        return action

    return exec_


_observe_h = default_observe()


def _select(tau: dict, theta: Sequence[str | Addr]) -> dict:
    tags = {t for t in theta if isinstance(t, str)}
    addrs = {t for t in theta if isinstance(t, tuple)}
    selected = {a: r for a, r in tau.items() if a.tag in tags or a in addrs}
    seen_tags = {a.tag for a in selected}
    missing = sorted(tags - seen_tags) + sorted(str(Addr(*a)) for a in addrs - selected.keys())
    if missing:
        warnings.warn(f"no sample sites match {', '.join(missing)}", stacklevel=3)
    if not selected:
        raise ValueError("none of the requested sites are sampled by the model")
    return selected


def pmh(
    m: int,
    n: int,
    theta: Sequence[str | Addr],
    model: Model[A],
    seed: int | RandomSource,
) -> list[tuple[A, tuple[float, dict]]]:
    """Independence Metropolis over the sites named by ``theta`` (tags or
    full addresses), each proposal weighted by an ``n``-particle filter."""
    if not theta:
        raise ValueError("theta must name at least one site")
    src = as_source(seed)
    _, tau = run_random(reuse_trace({})(_observe_h(assign_addresses(model))), src.spawn())
    tau_theta = _select(tau, theta)
    chain = mh(m, tau_theta, exec_model_pmh(n), model)
    return run_random(handle_propose_im()(chain), src)
