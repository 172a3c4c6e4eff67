"""Metropolis-Hastings as a skeleton plus swappable Propose/Accept handlers.

:func:`mh` only decides *when* to propose, execute and accept. What a
proposal is, how a model run is weighted, and when to accept are supplied by
an instance: Independence Metropolis (:func:`im`) or Single-Site
Metropolis-Hastings (:func:`ssmh`).

A chain node is ``(value, (weight, trace))``; chains come back newest-first.
"""

from __future__ import annotations

import math
from typing import Callable, TypeVar

from ._debug import debug_enabled
from .components import (
    EmptyTraceError,
    likelihood,
    pick_uniform,
    reuse_trace,
    trace_log_probs,
)
from .effects import (
    Computation,
    Effect,
    Request,
    Value,
    handle_deep,
    handle_stateful,
    perform,
    random_uniform,
    run_random,
)
from .model import Model, assign_addresses, default_observe
from .rng import RandomSource, as_source

__all__ = [
    "ProposeEffect",
    "Propose",
    "Accept",
    "mh",
    "accept_im",
    "ssmh_log_ratio",
    "handle_propose_im",
    "exec_model_im",
    "im",
    "handle_propose_ssmh",
    "exec_model_ssmh",
    "ssmh",
    "acceptance_rate",
]

A = TypeVar("A")

Node = tuple  # (value, (weight, trace))
ModelExec = Callable[[dict, Model], Callable[[RandomSource], Node]]


class ProposeEffect(Effect):
    __slots__ = ()


class Propose(ProposeEffect):
    __slots__ = ("trace",)

    def __init__(self, trace: dict):
        self.trace = trace

    def __repr__(self):
        return f"Propose(<{len(self.trace)} sites>)"


class Accept(ProposeEffect):
    __slots__ = ("current", "proposed")

    def __init__(self, current: Node, proposed: Node):
        self.current = current
        self.proposed = proposed

    def __repr__(self):
        return "Accept(...)"


def _to_list(cons) -> list:
    out = []
    while cons is not None:
        node, cons = cons
        out.append(node)
    return out


def mh(n: int, tau0: dict, exec_: ModelExec, model: Model[A]) -> Computation[list[Node]]:
    """``n`` abstract Metropolis-Hastings steps from trace ``tau0``.

    Leaves the Propose effect and the Random effect (for running ``exec_``)
    to be handled. The result has ``n + 1`` nodes, newest first.
    """
    if n < 0:
        raise ValueError(f"iteration count must be non-negative, got {n}")

    def step(i, chain):
        if i >= n:
            return Value(_to_list(chain))
        current = chain[0]
        return Request(
            Propose(current[1][1]),
            lambda tau: perform(exec_(tau, model)).bind(
                lambda proposed: Request(
                    Accept(current, proposed),
                    lambda nxt: step(i + 1, (nxt, chain)),
                )
            ),
        )

    return perform(exec_(tau0, model)).bind(lambda node0: step(0, (node0, None)))


def acceptance_rate(chain: list[Node]) -> float:
    """Fraction of transitions that moved to a new node (chain in any order)."""
    if len(chain) < 2:
        return float("nan")
    moves = sum(1 for a, b in zip(chain, chain[1:]) if a is not b)
    return moves / (len(chain) - 1)


# -- Independence Metropolis ------------------------------------------------


def accept_im(w: float, w_new: float, u: float) -> bool:
    ratio = w_new - w
    if ratio != ratio:
        return False
    # exp(ratio) >= 1 > u whenever ratio >= 0
    return ratio >= 0.0 or math.exp(ratio) >= u


def _uniforms(n: int) -> Computation[list[float]]:
    def go(i, acc):
        if i == n:
            return Value(_to_list(acc)[::-1])
        return random_uniform().bind(lambda r: go(i + 1, (r, acc)))

    return go(0, None)


def _im_hop(op, k):
    if type(op) is Propose:
        keys = list(op.trace)
        return _uniforms(len(keys)).bind(lambda rs: k(dict(zip(keys, rs))))
    w = op.current[1][0]
    w_new = op.proposed[1][0]
    return random_uniform().bind(
        lambda u: k(op.proposed if accept_im(w, w_new, u) else op.current)
    )


def handle_propose_im():
    """Propose redraws every site; Accept compares total log-likelihoods."""
    return handle_deep(ProposeEffect, Value, _im_hop)


def exec_model_im(tau: dict, model: Model[A]) -> Callable[[RandomSource], Node]:
    """Run ``model`` under ``tau``, weighting by summed observe log-probs."""

    def action(src):
        c = reuse_trace(tau)(likelihood()(assign_addresses(model)))
        (x, w), tau_out = run_random(c, src)
        return (x, (w, tau_out))

    return action


def im(n: int, model: Model[A], seed: int | RandomSource) -> list[Node]:
    chain = mh(n, {}, exec_model_im, model)
    return run_random(handle_propose_im()(chain), as_source(seed))


# -- Single-Site Metropolis-Hastings ----------------------------------------


def ssmh_log_ratio(w: dict, w_new: dict, site, n_sites: int, n_sites_new: int) -> float:
    """Log acceptance ratio over sites shared by both runs, excluding ``site``,
    corrected for the change in trace size."""
    total = 0.0
    for a, lp in w_new.items():
        if a != site:
            old = w.get(a)
            if old is not None:
                total += lp - old
    return total + math.log(n_sites) - math.log(n_sites_new)


def _check_same_observes(w, tau, w_new, tau_new):
    obs = {a for a in w if a not in tau}
    obs_new = {a for a in w_new if a not in tau_new}
    if obs != obs_new:
        raise AssertionError(
            f"runs visited different observe sites: {sorted(map(str, obs ^ obs_new))}"
        )


def handle_propose_ssmh():
    """Propose redraws one site chosen uniformly; Accept uses per-site
    log-prob differences. State is the site last proposed."""
    check = debug_enabled()

    def hop(site, op, k):
        if type(op) is Propose:
            keys = list(op.trace)
            if not keys:
                raise EmptyTraceError("single-site proposal on a model with no sample sites")

            def chosen(r1):
                a = pick_uniform(keys, r1)
                return random_uniform().bind(lambda r: k(a, {**op.trace, a: r}))

            return random_uniform().bind(chosen)

        x, (w, tau) = op.current
        x_new, (w_new, tau_new) = op.proposed
        if check:
            _check_same_observes(w, tau, w_new, tau_new)
        ratio = ssmh_log_ratio(w, w_new, site, len(tau), len(tau_new))

        def decide(u):
            if ratio == ratio and (ratio >= 0.0 or math.exp(ratio) >= u):
                pruned = {a: r for a, r in tau_new.items() if a in w_new}
                if len(pruned) == len(tau_new):
                    return k(site, op.proposed)
                return k(site, (x_new, (w_new, pruned)))
            return k(site, op.current)

        return random_uniform().bind(decide)

    # the initial site is never read
    return handle_stateful(ProposeEffect, None, lambda _, x: Value(x), hop)


_observe_h = default_observe()


def exec_model_ssmh(tau: dict, model: Model[A]) -> Callable[[RandomSource], Node]:
    """Run ``model`` under ``tau``, recording the log-prob of every site."""

    def action(src):
        c = reuse_trace(tau)(_observe_h(trace_log_probs()(assign_addresses(model))))
        (x, lp), tau_out = run_random(c, src)
        return (x, (lp, tau_out))

    return action


def ssmh(n: int, tau: dict, model: Model[A], seed: int | RandomSource) -> list[Node]:
    chain = mh(n, tau, exec_model_ssmh, model)
    return run_random(handle_propose_ssmh()(chain), as_source(seed))
